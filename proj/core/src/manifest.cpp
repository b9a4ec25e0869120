#include "unimos/manifest.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "unimos/container.hpp"

namespace fs = std::filesystem;

namespace unimos {
namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) out.push_back(trim(part));
    return out;
}

}  // namespace

DatasetDescriptor read_manifest(const std::string& path, const ClassRegistry& registry) {
    std::ifstream in(path);
    if (!in) throw IoError("manifest: cannot open '" + path + "'");
    const fs::path base = fs::path(path).parent_path();

    DatasetDescriptor desc;
    bool kind_seen = false;
    bool classes_seen = false;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("manifest '" + path + "' line " + std::to_string(line_no) +
                                  ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key == "name") {
            desc.name = value;
        } else if (key == "kind") {
            kind_seen = true;
            if (value == "labeled")
                desc.kind = DatasetKind::labeled;
            else if (value == "unlabeled")
                desc.kind = DatasetKind::unlabeled;
            else
                throw ValidationError("manifest '" + path + "': kind must be labeled|unlabeled, got '" +
                                      value + "'");
        } else if (key == "classes") {
            classes_seen = true;
            for (const auto& name : split(value, ','))
                if (!name.empty()) desc.spec.annotated.push_back(registry.index_of(name));
            std::sort(desc.spec.annotated.begin(), desc.spec.annotated.end());
        } else if (key == "item") {
            auto parts = split(value, ',');
            if (parts.empty() || parts.size() > 2 || parts[0].empty())
                throw ValidationError("manifest '" + path + "' line " + std::to_string(line_no) +
                                      ": item must be image_path[,label_path]");
            DatasetDescriptor::Item item;
            item.image_path = (base / parts[0]).string();
            if (parts.size() == 2 && !parts[1].empty()) item.label_path = (base / parts[1]).string();
            desc.items.push_back(std::move(item));
        } else {
            throw ValidationError("manifest '" + path + "': unknown key '" + key + "'");
        }
    }
    if (!kind_seen) throw ValidationError("manifest '" + path + "': missing kind");
    if (desc.kind == DatasetKind::unlabeled && classes_seen)
        throw ValidationError("manifest '" + path + "': unlabeled dataset must not list classes");
    if (desc.kind == DatasetKind::labeled) {
        if (!classes_seen) throw ValidationError("manifest '" + path + "': labeled dataset missing classes");
        desc.spec.validate(registry);
    }
    desc.validate();
    return desc;
}

void write_manifest(const std::string& path, const DatasetDescriptor& desc,
                    const ClassRegistry& registry) {
    desc.validate();
    std::ofstream out(path);
    if (!out) throw IoError("manifest: cannot write '" + path + "'");
    out << "name = " << desc.name << "\n";
    out << "kind = " << (desc.kind == DatasetKind::labeled ? "labeled" : "unlabeled") << "\n";
    if (desc.kind == DatasetKind::labeled) {
        out << "classes = ";
        for (std::size_t i = 0; i < desc.spec.annotated.size(); ++i) {
            if (i) out << ",";
            out << registry.name(desc.spec.annotated[i]);
        }
        out << "\n";
    }
    for (const auto& item : desc.items) {
        out << "item = " << item.image_path;
        if (item.label_path) out << "," << *item.label_path;
        out << "\n";
    }
}

LoadedDataset load_dataset(const std::string& manifest_path, const ClassRegistry& registry) {
    LoadedDataset ds;
    ds.desc = read_manifest(manifest_path, registry);
    for (const auto& item : ds.desc.items) {
        Image img = read_image_container(item.image_path);
        if (item.label_path) {
            LabelMap lm = read_label_container(*item.label_path);
            if (lm.height != img.height || lm.width != img.width)
                throw ValidationError("dataset '" + ds.desc.name + "': label dims " +
                                      std::to_string(lm.height) + "x" + std::to_string(lm.width) +
                                      " do not match image dims for '" + item.image_path + "'");
            for (std::uint8_t v : lm.labels) {
                if (v != 0 && !ds.desc.spec.contains(v))
                    throw ValidationError("dataset '" + ds.desc.name + "': label value " +
                                          std::to_string(v) + " outside annotated classes in '" +
                                          *item.label_path + "'");
            }
            ds.labels.push_back(std::move(lm));
        }
        ds.images.push_back(std::move(img));
    }
    return ds;
}

}  // namespace unimos
