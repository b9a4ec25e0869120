#include "unimos/phantom.hpp"

#include <algorithm>
#include <cmath>

#include "unimos/rng.hpp"

namespace unimos {
namespace {

struct Ellipse {
    double cy, cx, ry, rx, angle;

    bool contains(int y, int x) const {
        const double dy = y - cy;
        const double dx = x - cx;
        const double c = std::cos(angle), s = std::sin(angle);
        const double u = (dx * c + dy * s) / rx;
        const double v = (-dx * s + dy * c) / ry;
        return u * u + v * v <= 1.0;
    }
};

Ellipse sample_ellipse(RngStream& rng, const PhantomSpec& spec, const PhantomSpec::ClassShape& shape) {
    Ellipse e{};
    e.ry = rng.uniform(shape.radius_min, shape.radius_max);
    e.rx = rng.uniform(shape.radius_min, shape.radius_max);
    const double margin = std::max(e.ry, e.rx) + 1.0;
    e.cy = rng.uniform(margin, spec.height - 1 - margin);
    e.cx = rng.uniform(margin, spec.width - 1 - margin);
    e.angle = rng.uniform(0.0, 3.141592653589793);
    return e;
}

}  // namespace

std::vector<std::pair<Image, LabelMap>> generate_phantom(const PhantomSpec& spec,
                                                         const ClassRegistry& registry) {
    spec.validate();
    if (static_cast<int>(spec.classes.size()) != registry.num_foreground())
        throw ValidationError("phantom spec: classes has " + std::to_string(spec.classes.size()) +
                              " entries but registry has " + std::to_string(registry.num_foreground()));

    const int K = registry.num_foreground();
    std::vector<std::pair<Image, LabelMap>> out;
    out.reserve(static_cast<std::size_t>(spec.count));

    for (int idx = 0; idx < spec.count; ++idx) {
        RngStream rng = RngStream::derive(spec.seed, rng_tag::kPhantom, static_cast<std::uint64_t>(idx));

        const double bg = spec.background_mean + spec.background_std * rng.normal();
        Image img(spec.height, spec.width, static_cast<float>(bg));
        LabelMap lm(spec.height, spec.width, 0);

        std::vector<Ellipse> placed;
        for (int c = 1; c <= K; ++c) {
            const auto& shape = spec.classes[static_cast<std::size_t>(c) - 1];
            Ellipse e{};
            bool ok = false;
            for (int attempt = 0; attempt < 400 && !ok; ++attempt) {
                e = sample_ellipse(rng, spec, shape);
                ok = true;
                for (const auto& other : placed) {
                    const double dy = e.cy - other.cy, dx = e.cx - other.cx;
                    const double min_dist = std::max(e.ry, e.rx) + std::max(other.ry, other.rx) + 2.0;
                    if (dy * dy + dx * dx < min_dist * min_dist) {
                        ok = false;
                        break;
                    }
                }
            }
            if (!ok)
                throw ValidationError("phantom spec: could not place class " + std::to_string(c) +
                                      " without overlap; radius_max too large for image size");
            placed.push_back(e);

            const double level = shape.intensity_mean + shape.intensity_std * rng.normal();
            const int y0 = std::max(0, static_cast<int>(e.cy - std::max(e.ry, e.rx) - 1));
            const int y1 = std::min(spec.height - 1, static_cast<int>(e.cy + std::max(e.ry, e.rx) + 1));
            const int x0 = std::max(0, static_cast<int>(e.cx - std::max(e.ry, e.rx) - 1));
            const int x1 = std::min(spec.width - 1, static_cast<int>(e.cx + std::max(e.ry, e.rx) + 1));
            for (int y = y0; y <= y1; ++y)
                for (int x = x0; x <= x1; ++x)
                    if (e.contains(y, x)) {
                        img.at(y, x) = static_cast<float>(level);
                        lm.at(y, x) = static_cast<std::uint8_t>(c);
                    }
        }

        if (spec.noise_std > 0) {
            for (auto& p : img.pixels) p += static_cast<float>(spec.noise_std * rng.normal());
        }
        for (auto& p : img.pixels) p = std::clamp(p, 0.0f, 1.0f);

        out.emplace_back(std::move(img), std::move(lm));
    }
    return out;
}

LabelMap restrict_labels(const LabelMap& full, const PartialLabelSpec& spec) {
    LabelMap out = full;
    for (auto& v : out.labels)
        if (v != 0 && !spec.contains(v)) v = 0;
    return out;
}

}  // namespace unimos
