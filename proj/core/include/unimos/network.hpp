#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "unimos/layers.hpp"
#include "unimos/rng.hpp"
#include "unimos/tensor.hpp"

namespace unimos::nn {

struct ModelConfig {
    int pyramid_depth = 3;      // number of input scales: full, 1/2, ... 1/2^(D-1)
    int width = 16;             // channel width, constant through the network
    int num_classes = 4;        // K+1 including background
    int input_size = 96;        // square input side S
    double feature_dropout = 0.5;
    int resize_to = 0;          // optional pre-resize side (e.g. 256 -> crop to S); 0 disables

    void validate() const {
        if (pyramid_depth < 1) throw ValidationError("model: pyramid_depth must be >= 1");
        if (width < 1) throw ValidationError("model: width must be >= 1");
        if (num_classes < 2) throw ValidationError("model: num_classes must be >= 2");
        const int div = 1 << pyramid_depth;
        if (input_size <= 0 || input_size % div != 0)
            throw ValidationError("model: input_size must be divisible by 2^pyramid_depth (" +
                                  std::to_string(div) + ")");
        if (feature_dropout < 0.0 || feature_dropout >= 1.0)
            throw ValidationError("model: feature_dropout must be in [0, 1)");
    }
};

/// Closed form for the trainable parameter count:
///   stem 3x3 (1 -> W):        10*W
///   (2D+1) blocks of two 3x3 W -> W convs: (4D+2) * (9*W^2 + W)
///   head 1x1 (W -> C):        C*(W+1)
inline std::size_t parameter_count(const ModelConfig& cfg) {
    const std::size_t W = static_cast<std::size_t>(cfg.width);
    const std::size_t D = static_cast<std::size_t>(cfg.pyramid_depth);
    const std::size_t C = static_cast<std::size_t>(cfg.num_classes);
    return 10 * W + (4 * D + 2) * (9 * W * W + W) + C * (W + 1);
}

/// Average-pool pyramid: scale 0 is the input, scale d has side S / 2^d.
template <typename T>
std::vector<Tensor<T>> build_pyramid(const Tensor<T>& images, int depth) {
    if (depth < 1) throw ValidationError("build_pyramid: depth must be >= 1");
    const int div = 1 << (depth - 1);
    if (images.h % div != 0 || images.w % div != 0)
        throw ValidationError("build_pyramid: side not divisible by 2^(depth-1) = " +
                              std::to_string(div));
    std::vector<Tensor<T>> scales;
    scales.reserve(static_cast<std::size_t>(depth));
    scales.push_back(images);
    for (int d = 1; d < depth; ++d) scales.push_back(avgpool2_forward(scales.back()));
    return scales;
}

template <typename T>
struct ConvParam {
    std::string name;
    int in_c = 0, out_c = 0, k = 3;
    std::vector<T> w, gw;
    std::vector<T> b, gb;

    void init_shape(const std::string& n, int ic, int oc, int kk) {
        name = n;
        in_c = ic;
        out_c = oc;
        k = kk;
        w.assign(static_cast<std::size_t>(oc) * ic * kk * kk, T(0));
        gw.assign(w.size(), T(0));
        b.assign(static_cast<std::size_t>(oc), T(0));
        gb.assign(b.size(), T(0));
    }
    void init_he(RngStream& rng) {
        const double std = std::sqrt(2.0 / (static_cast<double>(in_c) * k * k));
        for (auto& v : w) v = static_cast<T>(std * rng.normal());
        for (auto& v : b) v = T(0);
    }
};

template <typename T>
struct ParamView {
    std::string name;
    std::vector<T>* values;
    std::vector<T>* grads;
};

/// Activations recorded during forward, consumed by backward.
template <typename T>
struct ForwardTrace {
    std::vector<Tensor<T>> pyramid;        // D input scales
    std::vector<Tensor<T>> stem_out;       // post-relu stem features per scale
    struct Block {
        Tensor<T> in, mid, out;            // out = relu(c2(relu(c1(in))))
    };
    std::vector<Block> enc;                // D encoder blocks
    Block bot;                             // bottleneck at side S/2^D
    std::vector<Block> dec;                // D decoder blocks, index = depth
    Tensor<T> probs;
    double fp_rate = 0.0;                  // feature perturbation, 0 = none
    std::vector<std::uint8_t> fp_keep;     // per (item, channel) keep flags
};

/// Pyramid-input U-shaped segmentation network. A shared stem embeds every
/// pyramid scale; encoder blocks fuse the pooled previous level with the
/// stem features of the matching scale by addition; the decoder mirrors the
/// encoder with nearest-neighbour upsampling and additive skips; a single
/// 1x1 head emits per-pixel softmax probabilities.
template <typename T>
class PyramidUNet {
public:
    explicit PyramidUNet(const ModelConfig& cfg) : cfg_(cfg) {
        cfg_.validate();
        const int W = cfg_.width;
        stem_.init_shape("stem", 1, W, 3);
        enc_.resize(static_cast<std::size_t>(cfg_.pyramid_depth));
        dec_.resize(static_cast<std::size_t>(cfg_.pyramid_depth));
        for (int d = 0; d < cfg_.pyramid_depth; ++d) {
            enc_[d].first.init_shape("enc" + std::to_string(d) + ".c1", W, W, 3);
            enc_[d].second.init_shape("enc" + std::to_string(d) + ".c2", W, W, 3);
            dec_[d].first.init_shape("dec" + std::to_string(d) + ".c1", W, W, 3);
            dec_[d].second.init_shape("dec" + std::to_string(d) + ".c2", W, W, 3);
        }
        bot_.first.init_shape("bot.c1", W, W, 3);
        bot_.second.init_shape("bot.c2", W, W, 3);
        head_.init_shape("head", W, cfg_.num_classes, 1);
    }

    void init(RngStream& rng) {
        stem_.init_he(rng);
        for (auto& b : enc_) {
            b.first.init_he(rng);
            b.second.init_he(rng);
        }
        bot_.first.init_he(rng);
        bot_.second.init_he(rng);
        for (auto& b : dec_) {
            b.first.init_he(rng);
            b.second.init_he(rng);
        }
        head_.init_he(rng);
    }

    const ModelConfig& config() const { return cfg_; }

    /// Plain forward. Fills `trace` when given (needed for backward) and
    /// `features_out` with the bottleneck encoder features.
    Tensor<T> forward(const Tensor<T>& images, ForwardTrace<T>* trace = nullptr,
                      Tensor<T>* features_out = nullptr) const {
        ForwardTrace<T> local;
        ForwardTrace<T>& tr = trace ? *trace : local;
        tr.fp_rate = 0.0;
        tr.fp_keep.clear();
        return run_forward(images, tr, features_out);
    }

    /// Forward with channel dropout on the bottleneck encoder features.
    /// With rate 0 this is bit-identical to forward().
    Tensor<T> forward_feature_perturbed(const Tensor<T>& images, RngStream& rng,
                                        ForwardTrace<T>* trace = nullptr,
                                        std::vector<std::uint8_t>* mask_out = nullptr) const {
        const double rate = cfg_.feature_dropout;
        if (rate < 0.0 || rate >= 1.0)
            throw ValidationError("model: feature_dropout must be in [0, 1)");
        ForwardTrace<T> local;
        ForwardTrace<T>& tr = trace ? *trace : local;
        tr.fp_rate = rate;
        tr.fp_keep.clear();
        if (rate > 0.0) {
            tr.fp_keep.resize(static_cast<std::size_t>(images.n) * cfg_.width);
            for (auto& m : tr.fp_keep) m = rng.bernoulli(1.0 - rate) ? 1 : 0;
        }
        Tensor<T> probs = run_forward(images, tr, nullptr);
        if (mask_out) *mask_out = tr.fp_keep;
        return probs;
    }

    /// Accumulates parameter gradients for d(loss)/d(probs). Call zero_grad()
    /// first unless accumulating across streams on purpose.
    void backward(const ForwardTrace<T>& tr, const Tensor<T>& grad_probs) {
        const int D = cfg_.pyramid_depth;
        ConvScratch<T> scratch;

        Tensor<T> g = softmax_backward(tr.probs, grad_probs);

        // head (input = dec[0].out)
        Tensor<T> g_dec_out(tr.dec[0].out.n, tr.dec[0].out.c, tr.dec[0].out.h, tr.dec[0].out.w);
        conv2d_backward(tr.dec[0].out, head_.w, head_.out_c, head_.k, g, &g_dec_out, head_.gw,
                        head_.gb, scratch);

        // decoder, shallow to deep; collect skip grads for the encoder
        std::vector<Tensor<T>> g_enc_out(static_cast<std::size_t>(D));
        Tensor<T> g_bot_dropped;
        for (int d = 0; d < D; ++d) {
            Tensor<T> g_in = block_backward(dec_[d], tr.dec[d], g_dec_out, scratch);
            g_enc_out[d] = g_in;  // additive skip: gradient passes through unchanged
            Tensor<T>& deeper = (d + 1 < D) ? tr.dec[d + 1].out : tr.bot.out;
            Tensor<T> g_up(deeper.n, deeper.c, deeper.h, deeper.w);
            upsample2_backward_add(g_in, g_up);
            if (d + 1 < D)
                g_dec_out = std::move(g_up);
            else
                g_bot_dropped = std::move(g_up);
        }

        // undo feature dropout scaling
        if (tr.fp_rate > 0.0) dropout2d_apply(g_bot_dropped, tr.fp_keep, tr.fp_rate);

        // bottleneck, then its pooled input feeds the deepest encoder block
        Tensor<T> g_bot_in = block_backward(bot_, tr.bot, g_bot_dropped, scratch);
        avgpool2_backward_add(g_bot_in, g_enc_out[static_cast<std::size_t>(D) - 1]);

        // encoder, deep to shallow; each block input splits into the pooled
        // previous level and the shared stem at this scale
        for (int d = D - 1; d >= 0; --d) {
            Tensor<T> g_in = block_backward(enc_[d], tr.enc[d], g_enc_out[d], scratch);
            conv2d_backward(tr.pyramid[d], stem_.w, stem_.out_c, stem_.k,
                            relu_masked(tr.stem_out[d], g_in), nullptr, stem_.gw, stem_.gb,
                            scratch);
            if (d > 0) avgpool2_backward_add(g_in, g_enc_out[d - 1]);
        }
    }

    void zero_grad() {
        for (auto v : params()) std::fill(v.grads->begin(), v.grads->end(), T(0));
    }

    std::vector<ParamView<T>> params() {
        std::vector<ParamView<T>> out;
        auto add = [&out](ConvParam<T>& p) {
            out.push_back({p.name + ".w", &p.w, &p.gw});
            out.push_back({p.name + ".b", &p.b, &p.gb});
        };
        add(stem_);
        for (auto& b : enc_) {
            add(b.first);
            add(b.second);
        }
        add(bot_.first);
        add(bot_.second);
        for (auto& b : dec_) {
            add(b.first);
            add(b.second);
        }
        add(head_);
        return out;
    }

    std::size_t num_parameters() {
        std::size_t n = 0;
        for (auto v : params()) n += v.values->size();
        return n;
    }

private:
    using Block = std::pair<ConvParam<T>, ConvParam<T>>;

    static Tensor<T> relu_masked(const Tensor<T>& out, const Tensor<T>& grad) {
        Tensor<T> g = grad;
        relu_backward(out, g);
        return g;
    }

    void block_forward(const Block& blk, Tensor<T> in, typename ForwardTrace<T>::Block& tr,
                       ConvScratch<T>& scratch) const {
        tr.in = std::move(in);
        conv2d_forward(tr.in, blk.first.w, blk.first.b, blk.first.out_c, blk.first.k, tr.mid,
                       scratch);
        relu_forward(tr.mid);
        conv2d_forward(tr.mid, blk.second.w, blk.second.b, blk.second.out_c, blk.second.k, tr.out,
                       scratch);
        relu_forward(tr.out);
    }

    Tensor<T> block_backward(Block& blk, const typename ForwardTrace<T>::Block& tr,
                             const Tensor<T>& g_out, ConvScratch<T>& scratch) {
        Tensor<T> g2 = relu_masked(tr.out, g_out);
        Tensor<T> g_mid(tr.mid.n, tr.mid.c, tr.mid.h, tr.mid.w);
        conv2d_backward(tr.mid, blk.second.w, blk.second.out_c, blk.second.k, g2, &g_mid,
                        blk.second.gw, blk.second.gb, scratch);
        relu_backward(tr.mid, g_mid);
        Tensor<T> g_in(tr.in.n, tr.in.c, tr.in.h, tr.in.w);
        conv2d_backward(tr.in, blk.first.w, blk.first.out_c, blk.first.k, g_mid, &g_in,
                        blk.first.gw, blk.first.gb, scratch);
        return g_in;
    }

    Tensor<T> run_forward(const Tensor<T>& images, ForwardTrace<T>& tr,
                          Tensor<T>* features_out) const {
        if (images.c != 1)
            throw ValidationError("model: expected single-channel input, got " +
                                  std::to_string(images.c) + " channels");
        if (images.h != cfg_.input_size || images.w != cfg_.input_size)
            throw ValidationError("model: input is " + std::to_string(images.h) + "x" +
                                  std::to_string(images.w) + " but configured side is S = " +
                                  std::to_string(cfg_.input_size));
        for (T v : images.data)
            if (!std::isfinite(static_cast<double>(v)))
                throw ValidationError("model: non-finite input pixel");

        const int D = cfg_.pyramid_depth;
        ConvScratch<T> scratch;

        tr.pyramid = build_pyramid(images, D);
        tr.stem_out.resize(static_cast<std::size_t>(D));
        tr.enc.resize(static_cast<std::size_t>(D));
        tr.dec.resize(static_cast<std::size_t>(D));
        for (int d = 0; d < D; ++d) {
            conv2d_forward(tr.pyramid[d], stem_.w, stem_.b, stem_.out_c, stem_.k, tr.stem_out[d],
                           scratch);
            relu_forward(tr.stem_out[d]);
        }

        for (int d = 0; d < D; ++d) {
            Tensor<T> in;
            if (d == 0) {
                in = tr.stem_out[0];
            } else {
                in = avgpool2_forward(tr.enc[d - 1].out);
                for (std::size_t i = 0; i < in.data.size(); ++i)
                    in.data[i] += tr.stem_out[d].data[i];
            }
            block_forward(enc_[d], std::move(in), tr.enc[d], scratch);
        }

        block_forward(bot_, avgpool2_forward(tr.enc[static_cast<std::size_t>(D) - 1].out), tr.bot,
                      scratch);
        if (features_out) *features_out = tr.bot.out;

        Tensor<T> deep = tr.bot.out;
        if (tr.fp_rate > 0.0) dropout2d_apply(deep, tr.fp_keep, tr.fp_rate);

        for (int d = D - 1; d >= 0; --d) {
            Tensor<T> in = upsample2_forward(deep);
            const Tensor<T>& skip = tr.enc[d].out;
            for (std::size_t i = 0; i < in.data.size(); ++i) in.data[i] += skip.data[i];
            block_forward(dec_[d], std::move(in), tr.dec[d], scratch);
            deep = tr.dec[d].out;
        }

        Tensor<T> logits;
        conv2d_forward(tr.dec[0].out, head_.w, head_.b, head_.out_c, head_.k, logits, scratch);
        tr.probs = softmax_forward(logits);
        return tr.probs;
    }

    ModelConfig cfg_;
    ConvParam<T> stem_;
    std::vector<Block> enc_;
    Block bot_;
    std::vector<Block> dec_;
    ConvParam<T> head_;
};

}  // namespace unimos::nn
