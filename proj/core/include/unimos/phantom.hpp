#pragma once

#include <utility>
#include <vector>

#include "unimos/types.hpp"

namespace unimos {

/// Generates `spec.count` image/label pairs. Deterministic function of
/// (spec.seed, spec): every image gets one ellipse-like blob per foreground
/// class, placed without overlap, filled with a per-image class intensity
/// draw, then pixel noise, then a clamp to [0,1].
std::vector<std::pair<Image, LabelMap>> generate_phantom(const PhantomSpec& spec,
                                                         const ClassRegistry& registry);

/// Keeps labels inside `spec.annotated`, everything else becomes background.
/// Total and idempotent; simulates a partially labeled dataset.
LabelMap restrict_labels(const LabelMap& full, const PartialLabelSpec& spec);

}  // namespace unimos
