#pragma once

#include <cstdint>
#include <vector>

#include "unimos/types.hpp"

namespace unimos {

/// Hard per-pixel targets derived from a weak-view prediction: argmax class
/// plus a confidence keep-mask (max probability >= tau). Pixels with
/// keep == 0 contribute nothing to unsupervised losses.
struct PseudoLabel {
    LabelMap labels;
    std::vector<std::uint8_t> keep;  // same H*W layout as labels
    double tau = 0.95;

    double kept_fraction() const {
        if (keep.empty()) return 0.0;
        std::size_t n = 0;
        for (auto k : keep) n += (k != 0);
        return static_cast<double>(n) / static_cast<double>(keep.size());
    }
};

}  // namespace unimos
