#pragma once

#include <string>
#include <vector>

#include "unimos/pseudo_label.hpp"
#include "unimos/rng.hpp"
#include "unimos/types.hpp"

namespace unimos {

/// Exactly invertible spatial disturbance applied identically to images and
/// label maps: horizontal flip, then vertical flip, then k counter-clockwise
/// 90-degree rotations.
struct WeakTransform {
    bool hflip = false;
    bool vflip = false;
    int k_rot90 = 0;  // 0..3
};

WeakTransform sample_weak(RngStream& rng);
Image apply_weak(const WeakTransform& t, const Image& image);
LabelMap apply_weak(const WeakTransform& t, const LabelMap& labels);

/// Appearance disturbance record. Stages run in order: intensity jitter
/// (brightness, contrast, gamma, clamped to [0,1] after each), Gaussian
/// blur, CutMix. Only CutMix moves pixels, and only inside its box.
struct StrongTransform {
    bool jitter_applied = false;
    float brightness = 0.f;   // additive shift in [-0.2, 0.2]
    float contrast = 1.f;     // scale about the image mean, in [0.8, 1.2]
    float gamma = 1.f;        // exponent in [0.7, 1.3]

    bool blur_applied = false;
    float blur_sigma = 0.f;   // in [0, 1.5] px

    bool cutmix_applied = false;
    int partner = -1;         // index within the batch
    int box_top = 0, box_left = 0, box_height = 0, box_width = 0;
};

/// Per-stage application probabilities. The jitter/blur/gamma value ranges
/// themselves are fixed.
struct StrongParams {
    double p_jitter = 0.8;
    double p_blur = 0.2;
    double p_cutmix = 0.5;
};

std::vector<StrongTransform> sample_strong(RngStream& rng, int batch_size, int height, int width,
                                           const StrongParams& params = {});

/// Intensity stages only (jitter + blur); what each batch member looks like
/// before CutMix pulls in a partner's region.
Image apply_strong_stages(const StrongTransform& t, const Image& image);

/// Full batch application including CutMix. CutMix boxes are filled from the
/// partner's post-jitter/blur, pre-CutMix image.
std::vector<Image> apply_strong(const std::vector<StrongTransform>& ts,
                                const std::vector<Image>& images);

/// Single-pair form: the partner image stands in for the batch.
Image apply_strong(const StrongTransform& t, const Image& image, const Image& partner);

/// Moves a pseudo-label through a strong transform: intensity stages leave
/// it untouched, CutMix mixes labels and keep-masks with the same box.
PseudoLabel transport_pseudo_label(const PseudoLabel& y, const StrongTransform& t,
                                   const PseudoLabel& partner);
std::vector<PseudoLabel> transport_pseudo_labels(const std::vector<StrongTransform>& ts,
                                                 const std::vector<PseudoLabel>& ys);

// One-line records for --dump-augs debug replay.
std::string to_line(const WeakTransform& t);
std::string to_line(const StrongTransform& t);
WeakTransform parse_weak_line(const std::string& line);
StrongTransform parse_strong_line(const std::string& line);

}  // namespace unimos
