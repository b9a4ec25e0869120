#pragma once

#include <string>

#include "unimos/types.hpp"

namespace unimos {

// UMS1 array container: magic "UMS1", u8 kind (0 = image float32,
// 1 = labels uint8), u32 LE height, u32 LE width, then height*width payload
// values row-major little-endian.

void write_container(const std::string& path, const Image& image);
void write_container(const std::string& path, const LabelMap& labels);

Image read_image_container(const std::string& path);
LabelMap read_label_container(const std::string& path);

/// Encode/decode to memory; the file functions are thin wrappers. Useful for
/// byte-level tests and the checkpoint archive.
std::string encode_container(const Image& image);
std::string encode_container(const LabelMap& labels);
Image decode_image_container(const std::string& bytes, const std::string& origin = "<memory>");
LabelMap decode_label_container(const std::string& bytes, const std::string& origin = "<memory>");

}  // namespace unimos
