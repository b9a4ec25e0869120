#include "unimos/types.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace unimos {

ClassRegistry::ClassRegistry(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw ValidationError("registry: needs at least one foreground class");
    std::set<std::string> seen;
    for (const auto& n : names_) {
        if (n.empty()) throw ValidationError("registry: empty class name");
        if (!seen.insert(n).second) throw ValidationError("registry: duplicate class name '" + n + "'");
    }
}

const std::string& ClassRegistry::name(int index) const {
    if (index < 1 || index > num_foreground())
        throw ValidationError("registry: foreground index " + std::to_string(index) + " out of range 1.." +
                              std::to_string(num_foreground()));
    return names_[static_cast<std::size_t>(index) - 1];
}

int ClassRegistry::index_of(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw ValidationError("registry: unknown class name '" + name + "'");
    return static_cast<int>(it - names_.begin()) + 1;
}

ClassRegistry ClassRegistry::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("registry: cannot open '" + path + "'");
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) names.push_back(line);
    }
    return ClassRegistry(std::move(names));
}

void ClassRegistry::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("registry: cannot write '" + path + "'");
    for (const auto& n : names_) out << n << "\n";
}

bool PartialLabelSpec::contains(int cls) const {
    return std::binary_search(annotated.begin(), annotated.end(), cls);
}

void PartialLabelSpec::validate(const ClassRegistry& registry) const {
    if (annotated.empty()) throw ValidationError("partial label spec: annotated set is empty");
    int prev = 0;
    for (int c : annotated) {
        if (c < 1 || c > registry.num_foreground())
            throw ValidationError("partial label spec: class index " + std::to_string(c) +
                                  " outside registry range 1.." + std::to_string(registry.num_foreground()));
        if (c <= prev) throw ValidationError("partial label spec: annotated set must be sorted and unique");
        prev = c;
    }
}

void DatasetDescriptor::validate() const {
    if (name.empty()) throw ValidationError("dataset '" + name + "': empty name");
    for (const auto& item : items) {
        if (kind == DatasetKind::labeled && !item.label_path)
            throw ValidationError("dataset '" + name + "': labeled dataset item '" + item.image_path +
                                  "' has no label path");
        if (kind == DatasetKind::unlabeled && item.label_path)
            throw ValidationError("dataset '" + name + "': unlabeled dataset item '" + item.image_path +
                                  "' lists a label file");
    }
    if (kind == DatasetKind::labeled && spec.annotated.empty())
        throw ValidationError("dataset '" + name + "': labeled dataset without annotated classes");
}

void PhantomSpec::validate() const {
    if (height < 8) throw ValidationError("phantom spec: height must be >= 8");
    if (width < 8) throw ValidationError("phantom spec: width must be >= 8");
    if (count < 1) throw ValidationError("phantom spec: count must be >= 1");
    if (noise_std < 0) throw ValidationError("phantom spec: noise_std must be >= 0");
    if (background_std < 0) throw ValidationError("phantom spec: background_std must be >= 0");
    if (classes.empty()) throw ValidationError("phantom spec: classes must be non-empty");
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const auto& c = classes[i];
        const std::string tag = "phantom spec: class " + std::to_string(i + 1);
        if (c.radius_min < 2) throw ValidationError(tag + ": radius_min must be >= 2 px");
        if (c.radius_max < c.radius_min) throw ValidationError(tag + ": radius_max must be >= radius_min");
        if (c.intensity_std < 0) throw ValidationError(tag + ": intensity_std must be >= 0");
        if (2 * c.radius_max >= std::min(height, width))
            throw ValidationError(tag + ": radius_max too large for image size");
    }
}

}  // namespace unimos
