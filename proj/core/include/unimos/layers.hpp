#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>

#include "unimos/tensor.hpp"

// Primitive layer ops, forward and backward, templated on the scalar so the
// same code runs the float training path and the double gradient checks.
// Convolutions go through im2col + GEMM.

namespace unimos::nn {

template <typename T>
using MatMap = Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
template <typename T>
using ConstMatMap =
    Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

/// Scratch space reused across conv calls within one forward/backward pass.
template <typename T>
struct ConvScratch {
    std::vector<T> col;   // [in_c*k*k, out_h*out_w]
    std::vector<T> col2;  // gradient buffer of the same shape
};

// im2col for stride-1 same-padding convolution (pad = k/2).
template <typename T>
void im2col(const T* in, int in_c, int h, int w, int k, T* col) {
    const int pad = k / 2;
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    std::size_t row = 0;
    for (int ci = 0; ci < in_c; ++ci) {
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx, ++row) {
                T* dst = col + row * plane;
                for (int y = 0; y < h; ++y) {
                    const int sy = y + ky - pad;
                    if (sy < 0 || sy >= h) {
                        for (int x = 0; x < w; ++x) dst[static_cast<std::size_t>(y) * w + x] = T(0);
                        continue;
                    }
                    const T* src = in + ci * plane + static_cast<std::size_t>(sy) * w;
                    for (int x = 0; x < w; ++x) {
                        const int sx = x + kx - pad;
                        dst[static_cast<std::size_t>(y) * w + x] =
                            (sx < 0 || sx >= w) ? T(0) : src[sx];
                    }
                }
            }
        }
    }
}

// Scatter-add transpose of im2col.
template <typename T>
void col2im_add(const T* col, int in_c, int h, int w, int k, T* in_grad) {
    const int pad = k / 2;
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    std::size_t row = 0;
    for (int ci = 0; ci < in_c; ++ci) {
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx, ++row) {
                const T* src = col + row * plane;
                for (int y = 0; y < h; ++y) {
                    const int sy = y + ky - pad;
                    if (sy < 0 || sy >= h) continue;
                    T* dst = in_grad + ci * plane + static_cast<std::size_t>(sy) * w;
                    for (int x = 0; x < w; ++x) {
                        const int sx = x + kx - pad;
                        if (sx >= 0 && sx < w) dst[sx] += src[static_cast<std::size_t>(y) * w + x];
                    }
                }
            }
        }
    }
}

/// Stride-1, same-padding convolution. weights: [out_c, in_c*k*k], bias: [out_c].
template <typename T>
void conv2d_forward(const Tensor<T>& in, const std::vector<T>& weights, const std::vector<T>& bias,
                    int out_c, int k, Tensor<T>& out, ConvScratch<T>& scratch) {
    const int rows = in.c * k * k;
    const std::size_t plane = in.plane();
    if (out.n != in.n || out.c != out_c || out.h != in.h || out.w != in.w)
        out = Tensor<T>(in.n, out_c, in.h, in.w);
    scratch.col.resize(static_cast<std::size_t>(rows) * plane);
    ConstMatMap<T> wmat(weights.data(), out_c, rows);
    for (int ni = 0; ni < in.n; ++ni) {
        im2col(in.item(ni), in.c, in.h, in.w, k, scratch.col.data());
        ConstMatMap<T> cmat(scratch.col.data(), rows, static_cast<Eigen::Index>(plane));
        MatMap<T> omat(out.item(ni), out_c, static_cast<Eigen::Index>(plane));
        omat.noalias() = wmat * cmat;
        for (int co = 0; co < out_c; ++co) omat.row(co).array() += bias[static_cast<std::size_t>(co)];
    }
}

/// Accumulates weight/bias grads; adds input grad into in_grad when non-null.
template <typename T>
void conv2d_backward(const Tensor<T>& in, const std::vector<T>& weights, int out_c, int k,
                     const Tensor<T>& grad_out, Tensor<T>* in_grad, std::vector<T>& grad_w,
                     std::vector<T>& grad_b, ConvScratch<T>& scratch) {
    const int rows = in.c * k * k;
    const std::size_t plane = in.plane();
    scratch.col.resize(static_cast<std::size_t>(rows) * plane);
    scratch.col2.resize(static_cast<std::size_t>(rows) * plane);
    ConstMatMap<T> wmat(weights.data(), out_c, rows);
    MatMap<T> gwmat(grad_w.data(), out_c, rows);
    for (int ni = 0; ni < in.n; ++ni) {
        im2col(in.item(ni), in.c, in.h, in.w, k, scratch.col.data());
        ConstMatMap<T> cmat(scratch.col.data(), rows, static_cast<Eigen::Index>(plane));
        ConstMatMap<T> gomat(grad_out.item(ni), out_c, static_cast<Eigen::Index>(plane));
        gwmat.noalias() += gomat * cmat.transpose();
        for (int co = 0; co < out_c; ++co) grad_b[static_cast<std::size_t>(co)] += gomat.row(co).sum();
        if (in_grad) {
            MatMap<T> gcmat(scratch.col2.data(), rows, static_cast<Eigen::Index>(plane));
            gcmat.noalias() = wmat.transpose() * gomat;
            col2im_add(scratch.col2.data(), in.c, in.h, in.w, k, in_grad->item(ni));
        }
    }
}

template <typename T>
void relu_forward(Tensor<T>& t) {
    for (auto& v : t.data)
        if (v < T(0)) v = T(0);
}

/// Masks grad by the post-activation output (out > 0).
template <typename T>
void relu_backward(const Tensor<T>& out, Tensor<T>& grad) {
    for (std::size_t i = 0; i < out.data.size(); ++i)
        if (out.data[i] <= T(0)) grad.data[i] = T(0);
}

template <typename T>
Tensor<T> avgpool2_forward(const Tensor<T>& in) {
    if (in.h % 2 || in.w % 2) throw ValidationError("avgpool2: spatial dims must be even");
    Tensor<T> out(in.n, in.c, in.h / 2, in.w / 2);
    for (int ni = 0; ni < in.n; ++ni)
        for (int ci = 0; ci < in.c; ++ci)
            for (int y = 0; y < out.h; ++y)
                for (int x = 0; x < out.w; ++x)
                    out.at(ni, ci, y, x) =
                        (in.at(ni, ci, 2 * y, 2 * x) + in.at(ni, ci, 2 * y, 2 * x + 1) +
                         in.at(ni, ci, 2 * y + 1, 2 * x) + in.at(ni, ci, 2 * y + 1, 2 * x + 1)) /
                        T(4);
    return out;
}

template <typename T>
void avgpool2_backward_add(const Tensor<T>& grad_out, Tensor<T>& grad_in) {
    for (int ni = 0; ni < grad_out.n; ++ni)
        for (int ci = 0; ci < grad_out.c; ++ci)
            for (int y = 0; y < grad_out.h; ++y)
                for (int x = 0; x < grad_out.w; ++x) {
                    const T g = grad_out.at(ni, ci, y, x) / T(4);
                    grad_in.at(ni, ci, 2 * y, 2 * x) += g;
                    grad_in.at(ni, ci, 2 * y, 2 * x + 1) += g;
                    grad_in.at(ni, ci, 2 * y + 1, 2 * x) += g;
                    grad_in.at(ni, ci, 2 * y + 1, 2 * x + 1) += g;
                }
}

template <typename T>
Tensor<T> upsample2_forward(const Tensor<T>& in) {
    Tensor<T> out(in.n, in.c, in.h * 2, in.w * 2);
    for (int ni = 0; ni < in.n; ++ni)
        for (int ci = 0; ci < in.c; ++ci)
            for (int y = 0; y < out.h; ++y)
                for (int x = 0; x < out.w; ++x)
                    out.at(ni, ci, y, x) = in.at(ni, ci, y / 2, x / 2);
    return out;
}

template <typename T>
void upsample2_backward_add(const Tensor<T>& grad_out, Tensor<T>& grad_in) {
    for (int ni = 0; ni < grad_out.n; ++ni)
        for (int ci = 0; ci < grad_out.c; ++ci)
            for (int y = 0; y < grad_out.h; ++y)
                for (int x = 0; x < grad_out.w; ++x)
                    grad_in.at(ni, ci, y / 2, x / 2) += grad_out.at(ni, ci, y, x);
}

/// Channel dropout scales: one multiplier per (item, channel) plane.
/// Inverted dropout: kept planes scale by 1/(1-rate).
template <typename T>
void dropout2d_apply(Tensor<T>& t, const std::vector<std::uint8_t>& keep_mask, double rate) {
    if (rate == 0.0) return;
    const T scale = static_cast<T>(1.0 / (1.0 - rate));
    const std::size_t plane = t.plane();
    for (int ni = 0; ni < t.n; ++ni)
        for (int ci = 0; ci < t.c; ++ci) {
            T* p = t.item(ni) + static_cast<std::size_t>(ci) * plane;
            const T m = keep_mask[static_cast<std::size_t>(ni) * t.c + ci] ? scale : T(0);
            for (std::size_t i = 0; i < plane; ++i) p[i] *= m;
        }
}

/// Per-pixel softmax over the channel dimension.
template <typename T>
Tensor<T> softmax_forward(const Tensor<T>& logits) {
    Tensor<T> out(logits.n, logits.c, logits.h, logits.w);
    const std::size_t plane = logits.plane();
    for (int ni = 0; ni < logits.n; ++ni) {
        const T* in = logits.item(ni);
        T* op = out.item(ni);
        for (std::size_t p = 0; p < plane; ++p) {
            T mx = in[p];
            for (int ci = 1; ci < logits.c; ++ci) mx = std::max(mx, in[ci * plane + p]);
            T sum = T(0);
            for (int ci = 0; ci < logits.c; ++ci) {
                const T e = std::exp(in[ci * plane + p] - mx);
                op[ci * plane + p] = e;
                sum += e;
            }
            for (int ci = 0; ci < logits.c; ++ci) op[ci * plane + p] /= sum;
        }
    }
    return out;
}

/// grad_logits = p .* (grad_probs - sum_c(grad_probs .* p))
template <typename T>
Tensor<T> softmax_backward(const Tensor<T>& probs, const Tensor<T>& grad_probs) {
    Tensor<T> out(probs.n, probs.c, probs.h, probs.w);
    const std::size_t plane = probs.plane();
    for (int ni = 0; ni < probs.n; ++ni) {
        const T* p = probs.item(ni);
        const T* g = grad_probs.item(ni);
        T* o = out.item(ni);
        for (std::size_t px = 0; px < plane; ++px) {
            T dot = T(0);
            for (int ci = 0; ci < probs.c; ++ci) dot += g[ci * plane + px] * p[ci * plane + px];
            for (int ci = 0; ci < probs.c; ++ci)
                o[ci * plane + px] = p[ci * plane + px] * (g[ci * plane + px] - dot);
        }
    }
    return out;
}

}  // namespace unimos::nn
