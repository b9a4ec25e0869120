#include "unimos/container.hpp"

#include <cstring>
#include <fstream>
#include <limits>

namespace unimos {
namespace {

constexpr char kMagic[4] = {'U', 'M', 'S', '1'};
constexpr std::uint8_t kKindImage = 0;
constexpr std::uint8_t kKindLabels = 1;
constexpr std::size_t kHeaderSize = 4 + 1 + 4 + 4;

void put_u32le(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t get_u32le(const std::string& bytes, std::size_t offset) {
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + offset;
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::string encode_header(std::uint8_t kind, int h, int w) {
    std::string out;
    out.append(kMagic, 4);
    out.push_back(static_cast<char>(kind));
    put_u32le(out, static_cast<std::uint32_t>(h));
    put_u32le(out, static_cast<std::uint32_t>(w));
    return out;
}

struct Header {
    std::uint8_t kind;
    std::uint32_t h, w;
};

Header decode_header(const std::string& bytes, const std::string& origin, std::uint8_t expected_kind) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw FormatError(origin + ": bad magic, expected 'UMS1'", 0);
    if (bytes.size() < 5) throw FormatError(origin + ": truncated before kind byte", 4);
    Header hd{};
    hd.kind = static_cast<std::uint8_t>(bytes[4]);
    if (hd.kind != kKindImage && hd.kind != kKindLabels)
        throw FormatError(origin + ": unknown kind byte " + std::to_string(hd.kind), 4);
    if (hd.kind != expected_kind)
        throw FormatError(origin + ": kind " + std::to_string(hd.kind) + " but expected " +
                              std::to_string(expected_kind),
                          4);
    if (bytes.size() < kHeaderSize) throw FormatError(origin + ": truncated dimension fields", 5);
    hd.h = get_u32le(bytes, 5);
    hd.w = get_u32le(bytes, 9);
    if (hd.h == 0 || hd.w == 0 || hd.h > (1u << 20) || hd.w > (1u << 20))
        throw FormatError(origin + ": implausible dimensions " + std::to_string(hd.h) + "x" +
                              std::to_string(hd.w),
                          5);
    return hd;
}

void check_payload(const std::string& bytes, const std::string& origin, std::size_t expect) {
    if (bytes.size() < kHeaderSize + expect)
        throw FormatError(origin + ": truncated payload, need " + std::to_string(kHeaderSize + expect) +
                              " bytes, have " + std::to_string(bytes.size()),
                          bytes.size());
    if (bytes.size() > kHeaderSize + expect)
        throw FormatError(origin + ": trailing bytes after payload", kHeaderSize + expect);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to '" + path + "'");
}

}  // namespace

std::string encode_container(const Image& image) {
    std::string out = encode_header(kKindImage, image.height, image.width);
    static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);
    out.resize(kHeaderSize + image.pixels.size() * 4);
    std::memcpy(out.data() + kHeaderSize, image.pixels.data(), image.pixels.size() * 4);
    return out;  // little-endian host assumed; asserted in decode
}

std::string encode_container(const LabelMap& labels) {
    std::string out = encode_header(kKindLabels, labels.height, labels.width);
    out.resize(kHeaderSize + labels.labels.size());
    std::memcpy(out.data() + kHeaderSize, labels.labels.data(), labels.labels.size());
    return out;
}

Image decode_image_container(const std::string& bytes, const std::string& origin) {
    Header hd = decode_header(bytes, origin, kKindImage);
    const std::size_t n = static_cast<std::size_t>(hd.h) * hd.w;
    check_payload(bytes, origin, n * 4);
    Image img(static_cast<int>(hd.h), static_cast<int>(hd.w));
    std::memcpy(img.pixels.data(), bytes.data() + kHeaderSize, n * 4);
    return img;
}

LabelMap decode_label_container(const std::string& bytes, const std::string& origin) {
    Header hd = decode_header(bytes, origin, kKindLabels);
    const std::size_t n = static_cast<std::size_t>(hd.h) * hd.w;
    check_payload(bytes, origin, n);
    LabelMap lm(static_cast<int>(hd.h), static_cast<int>(hd.w));
    std::memcpy(lm.labels.data(), bytes.data() + kHeaderSize, n);
    return lm;
}

void write_container(const std::string& path, const Image& image) {
    write_file(path, encode_container(image));
}

void write_container(const std::string& path, const LabelMap& labels) {
    write_file(path, encode_container(labels));
}

Image read_image_container(const std::string& path) {
    return decode_image_container(read_file(path), path);
}

LabelMap read_label_container(const std::string& path) {
    return decode_label_container(read_file(path), path);
}

}  // namespace unimos
