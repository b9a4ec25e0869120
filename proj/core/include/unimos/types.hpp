#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "unimos/errors.hpp"

namespace unimos {

/// Single-channel 2D intensity grid, row-major, working range [0,1].
struct Image {
    int height = 0;
    int width = 0;
    std::vector<float> pixels;

    Image() = default;
    Image(int h, int w, float fill = 0.f)
        : height(h), width(w), pixels(static_cast<std::size_t>(h) * w, fill) {}

    float& at(int y, int x) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    float at(int y, int x) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return pixels.size(); }
};

/// Per-pixel integer class map. 0 is background-or-unannotated; foreground
/// classes are 1..K.
struct LabelMap {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> labels;

    LabelMap() = default;
    LabelMap(int h, int w, std::uint8_t fill = 0)
        : height(h), width(w), labels(static_cast<std::size_t>(h) * w, fill) {}

    std::uint8_t& at(int y, int x) { return labels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int y, int x) const { return labels[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return labels.size(); }
};

/// Ordered foreground class names. Background is implicit index 0 and never
/// appears here; foreground class c has index c in 1..K.
class ClassRegistry {
public:
    ClassRegistry() = default;
    explicit ClassRegistry(std::vector<std::string> names);

    int num_foreground() const { return static_cast<int>(names_.size()); }
    /// Total classes including background.
    int num_classes() const { return num_foreground() + 1; }

    const std::string& name(int index) const;          // index in 1..K
    int index_of(const std::string& name) const;        // throws if unknown
    const std::vector<std::string>& names() const { return names_; }

    static ClassRegistry load(const std::string& path);
    void save(const std::string& path) const;

private:
    std::vector<std::string> names_;
};

/// The foreground classes a dataset actually annotated (C_k).
struct PartialLabelSpec {
    std::vector<int> annotated;  // sorted, unique, subset of 1..K

    bool contains(int cls) const;
    void validate(const ClassRegistry& registry) const;
};

enum class DatasetKind { labeled, unlabeled };

/// One dataset as described by its on-disk manifest.
struct DatasetDescriptor {
    std::string name;
    DatasetKind kind = DatasetKind::labeled;
    PartialLabelSpec spec;  // meaningful only when kind == labeled
    struct Item {
        std::string image_path;
        std::optional<std::string> label_path;
    };
    std::vector<Item> items;

    void validate() const;
};

/// Parameters of the synthetic phantom generator. One ellipse-like blob per
/// foreground class, non-overlapping, class-specific intensity.
struct PhantomSpec {
    int height = 96;
    int width = 96;
    int count = 4;
    std::uint64_t seed = 0;
    double noise_std = 0.03;          // per-pixel Gaussian noise
    double background_mean = 0.20;
    double background_std = 0.0;      // per-image draw of the background level
    struct ClassShape {
        double radius_min = 8.0;      // pixels
        double radius_max = 14.0;
        double intensity_mean = 0.7;
        double intensity_std = 0.0;   // per-image draw of the class level
    };
    std::vector<ClassShape> classes;  // one entry per foreground class

    void validate() const;            // throws ValidationError naming the field
};

}  // namespace unimos
