#pragma once

#include <string>
#include <vector>

#include "unimos/types.hpp"

namespace unimos {

/// Parses a dataset manifest. Item paths are resolved relative to the
/// manifest's directory; the returned descriptor holds resolved paths.
DatasetDescriptor read_manifest(const std::string& path, const ClassRegistry& registry);

/// Writes a manifest with paths exactly as given (callers pass
/// manifest-relative paths).
void write_manifest(const std::string& path, const DatasetDescriptor& desc,
                    const ClassRegistry& registry);

/// A dataset pulled into memory.
struct LoadedDataset {
    DatasetDescriptor desc;
    std::vector<Image> images;
    std::vector<LabelMap> labels;  // empty when unlabeled
};

/// Reads every item. For labeled datasets, verifies image/label dimensions
/// match and label values stay inside C_k plus background.
LoadedDataset load_dataset(const std::string& manifest_path, const ClassRegistry& registry);

}  // namespace unimos
