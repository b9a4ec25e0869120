#include "unimos/augment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace unimos {
namespace {

template <typename Grid>
Grid hflip_grid(const Grid& in) {
    Grid out(in.height, in.width);
    for (int y = 0; y < in.height; ++y)
        for (int x = 0; x < in.width; ++x) out.at(y, x) = in.at(y, in.width - 1 - x);
    return out;
}

template <typename Grid>
Grid vflip_grid(const Grid& in) {
    Grid out(in.height, in.width);
    for (int y = 0; y < in.height; ++y)
        for (int x = 0; x < in.width; ++x) out.at(y, x) = in.at(in.height - 1 - y, x);
    return out;
}

// One counter-clockwise quarter turn; output dims are swapped.
template <typename Grid>
Grid rot90_grid(const Grid& in) {
    Grid out(in.width, in.height);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x) out.at(y, x) = in.at(x, in.width - 1 - y);
    return out;
}

template <typename Grid>
Grid apply_weak_grid(const WeakTransform& t, const Grid& in) {
    if (t.k_rot90 < 0 || t.k_rot90 > 3)
        throw ValidationError("weak transform: k_rot90 must be in 0..3");
    Grid out = in;
    if (t.hflip) out = hflip_grid(out);
    if (t.vflip) out = vflip_grid(out);
    for (int k = 0; k < t.k_rot90; ++k) out = rot90_grid(out);
    return out;
}

float clamp01(float v) { return std::clamp(v, 0.f, 1.f); }

void blur_separable(Image& img, float sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<float> kernel(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0;
    for (int i = -radius; i <= radius; ++i) {
        double w = std::exp(-0.5 * i * i / (sigma * sigma));
        kernel[static_cast<std::size_t>(i + radius)] = static_cast<float>(w);
        sum += w;
    }
    for (auto& w : kernel) w = static_cast<float>(w / sum);

    Image tmp(img.height, img.width);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            float acc = 0;
            for (int i = -radius; i <= radius; ++i) {
                int xx = std::clamp(x + i, 0, img.width - 1);
                acc += kernel[static_cast<std::size_t>(i + radius)] * img.at(y, xx);
            }
            tmp.at(y, x) = acc;
        }
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            float acc = 0;
            for (int i = -radius; i <= radius; ++i) {
                int yy = std::clamp(y + i, 0, img.height - 1);
                acc += kernel[static_cast<std::size_t>(i + radius)] * tmp.at(yy, x);
            }
            img.at(y, x) = acc;
        }
}

void validate_box(const StrongTransform& t, int height, int width) {
    if (!t.cutmix_applied) return;
    if (t.box_top < 0 || t.box_left < 0 || t.box_height < 1 || t.box_width < 1 ||
        t.box_top + t.box_height > height || t.box_left + t.box_width > width)
        throw ValidationError("strong transform: cutmix box (" + std::to_string(t.box_top) + "," +
                              std::to_string(t.box_left) + "," + std::to_string(t.box_height) + "," +
                              std::to_string(t.box_width) + ") out of bounds for " +
                              std::to_string(height) + "x" + std::to_string(width));
}

}  // namespace

WeakTransform sample_weak(RngStream& rng) {
    WeakTransform t;
    t.hflip = rng.bernoulli(0.5);
    t.vflip = rng.bernoulli(0.5);
    t.k_rot90 = rng.uniform_int(0, 3);
    return t;
}

Image apply_weak(const WeakTransform& t, const Image& image) { return apply_weak_grid(t, image); }
LabelMap apply_weak(const WeakTransform& t, const LabelMap& labels) { return apply_weak_grid(t, labels); }

std::vector<StrongTransform> sample_strong(RngStream& rng, int batch_size, int height, int width,
                                           const StrongParams& params) {
    std::vector<StrongTransform> ts(static_cast<std::size_t>(batch_size));
    for (int i = 0; i < batch_size; ++i) {
        StrongTransform& t = ts[static_cast<std::size_t>(i)];
        t.jitter_applied = rng.bernoulli(params.p_jitter);
        if (t.jitter_applied) {
            t.brightness = static_cast<float>(rng.uniform(-0.2, 0.2));
            t.contrast = static_cast<float>(rng.uniform(0.8, 1.2));
            t.gamma = static_cast<float>(rng.uniform(0.7, 1.3));
        }
        t.blur_applied = rng.bernoulli(params.p_blur);
        if (t.blur_applied) t.blur_sigma = static_cast<float>(rng.uniform(0.1, 1.5));
        t.cutmix_applied = batch_size > 1 && rng.bernoulli(params.p_cutmix);
        if (t.cutmix_applied) {
            int partner = rng.uniform_int(0, batch_size - 2);
            t.partner = partner >= i ? partner + 1 : partner;
            t.box_height = rng.uniform_int(height / 4, height / 2);
            t.box_width = rng.uniform_int(width / 4, width / 2);
            t.box_top = rng.uniform_int(0, height - t.box_height);
            t.box_left = rng.uniform_int(0, width - t.box_width);
        }
    }
    return ts;
}

Image apply_strong_stages(const StrongTransform& t, const Image& image) {
    if (t.blur_sigma < 0.f || t.blur_sigma > 1.5f)
        throw ValidationError("strong transform: blur sigma must be in [0, 1.5]");
    Image out = image;
    if (t.jitter_applied) {
        for (auto& p : out.pixels) p = clamp01(p + t.brightness);
        double mean = 0;
        for (auto p : out.pixels) mean += p;
        mean /= static_cast<double>(out.pixels.size());
        for (auto& p : out.pixels)
            p = clamp01(static_cast<float>((p - mean) * t.contrast + mean));
        for (auto& p : out.pixels) p = std::pow(p, t.gamma);
    }
    if (t.blur_applied && t.blur_sigma > 0.f) blur_separable(out, t.blur_sigma);
    return out;
}

std::vector<Image> apply_strong(const std::vector<StrongTransform>& ts,
                                const std::vector<Image>& images) {
    if (ts.size() != images.size())
        throw ValidationError("apply_strong: " + std::to_string(ts.size()) + " transforms for " +
                              std::to_string(images.size()) + " images");
    std::vector<Image> staged;
    staged.reserve(images.size());
    for (std::size_t i = 0; i < images.size(); ++i)
        staged.push_back(apply_strong_stages(ts[i], images[i]));

    std::vector<Image> out = staged;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const StrongTransform& t = ts[i];
        if (!t.cutmix_applied) continue;
        validate_box(t, out[i].height, out[i].width);
        if (t.partner < 0 || t.partner >= static_cast<int>(images.size()))
            throw ValidationError("strong transform: cutmix partner index " +
                                  std::to_string(t.partner) + " outside batch");
        const Image& src = staged[static_cast<std::size_t>(t.partner)];
        if (src.height != out[i].height || src.width != out[i].width)
            throw ValidationError("strong transform: cutmix partner dims differ");
        for (int y = t.box_top; y < t.box_top + t.box_height; ++y)
            for (int x = t.box_left; x < t.box_left + t.box_width; ++x)
                out[i].at(y, x) = src.at(y, x);
    }
    return out;
}

Image apply_strong(const StrongTransform& t, const Image& image, const Image& partner) {
    Image mine = apply_strong_stages(t, image);
    if (!t.cutmix_applied) return mine;
    validate_box(t, mine.height, mine.width);
    Image theirs = apply_strong_stages(t, partner);  // partner record unknown; stages of t stand in
    for (int y = t.box_top; y < t.box_top + t.box_height; ++y)
        for (int x = t.box_left; x < t.box_left + t.box_width; ++x)
            mine.at(y, x) = theirs.at(y, x);
    return mine;
}

PseudoLabel transport_pseudo_label(const PseudoLabel& y, const StrongTransform& t,
                                   const PseudoLabel& partner) {
    if (!t.cutmix_applied) return y;
    validate_box(t, y.labels.height, y.labels.width);
    if (partner.labels.height != y.labels.height || partner.labels.width != y.labels.width)
        throw ValidationError("transport_pseudo_label: partner shape mismatch");
    PseudoLabel out = y;
    for (int yy = t.box_top; yy < t.box_top + t.box_height; ++yy)
        for (int xx = t.box_left; xx < t.box_left + t.box_width; ++xx) {
            const std::size_t idx = static_cast<std::size_t>(yy) * y.labels.width + xx;
            out.labels.labels[idx] = partner.labels.labels[idx];
            out.keep[idx] = partner.keep[idx];
        }
    return out;
}

std::vector<PseudoLabel> transport_pseudo_labels(const std::vector<StrongTransform>& ts,
                                                 const std::vector<PseudoLabel>& ys) {
    if (ts.size() != ys.size())
        throw ValidationError("transport_pseudo_labels: size mismatch");
    std::vector<PseudoLabel> out;
    out.reserve(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const StrongTransform& t = ts[i];
        if (t.cutmix_applied) {
            if (t.partner < 0 || t.partner >= static_cast<int>(ys.size()))
                throw ValidationError("transport_pseudo_labels: partner index outside batch");
            out.push_back(transport_pseudo_label(ys[i], t, ys[static_cast<std::size_t>(t.partner)]));
        } else {
            out.push_back(ys[i]);
        }
    }
    return out;
}

std::string to_line(const WeakTransform& t) {
    std::ostringstream os;
    os << "weak hflip=" << (t.hflip ? 1 : 0) << " vflip=" << (t.vflip ? 1 : 0)
       << " rot90=" << t.k_rot90;
    return os.str();
}

std::string to_line(const StrongTransform& t) {
    std::ostringstream os;
    os << "strong jitter=" << (t.jitter_applied ? 1 : 0) << " brightness=" << t.brightness
       << " contrast=" << t.contrast << " gamma=" << t.gamma << " blur=" << (t.blur_applied ? 1 : 0)
       << " sigma=" << t.blur_sigma << " cutmix=" << (t.cutmix_applied ? 1 : 0)
       << " partner=" << t.partner << " box=" << t.box_top << "," << t.box_left << ","
       << t.box_height << "," << t.box_width;
    return os.str();
}

namespace {

std::vector<std::pair<std::string, std::string>> parse_fields(const std::string& line,
                                                              const std::string& expect_head) {
    std::istringstream is(line);
    std::string head;
    is >> head;
    if (head != expect_head)
        throw ValidationError("transform record: expected '" + expect_head + "', got '" + head + "'");
    std::vector<std::pair<std::string, std::string>> out;
    std::string tok;
    while (is >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw ValidationError("transform record: bad field '" + tok + "'");
        out.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
    }
    return out;
}

}  // namespace

WeakTransform parse_weak_line(const std::string& line) {
    WeakTransform t;
    for (const auto& [k, v] : parse_fields(line, "weak")) {
        if (k == "hflip") t.hflip = std::stoi(v) != 0;
        else if (k == "vflip") t.vflip = std::stoi(v) != 0;
        else if (k == "rot90") t.k_rot90 = std::stoi(v);
        else throw ValidationError("weak record: unknown field '" + k + "'");
    }
    return t;
}

StrongTransform parse_strong_line(const std::string& line) {
    StrongTransform t;
    for (const auto& [k, v] : parse_fields(line, "strong")) {
        if (k == "jitter") t.jitter_applied = std::stoi(v) != 0;
        else if (k == "brightness") t.brightness = std::stof(v);
        else if (k == "contrast") t.contrast = std::stof(v);
        else if (k == "gamma") t.gamma = std::stof(v);
        else if (k == "blur") t.blur_applied = std::stoi(v) != 0;
        else if (k == "sigma") t.blur_sigma = std::stof(v);
        else if (k == "cutmix") t.cutmix_applied = std::stoi(v) != 0;
        else if (k == "partner") t.partner = std::stoi(v);
        else if (k == "box") {
            std::istringstream bs(v);
            char sep;
            bs >> t.box_top >> sep >> t.box_left >> sep >> t.box_height >> sep >> t.box_width;
        } else {
            throw ValidationError("strong record: unknown field '" + k + "'");
        }
    }
    return t;
}

}  // namespace unimos
