#pragma once

#include <cstddef>
#include <vector>

#include "unimos/errors.hpp"
#include "unimos/types.hpp"

namespace unimos {

/// Dense NCHW tensor. Thin wrapper: layers index it directly.
template <typename T>
struct Tensor {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<T> data;

    Tensor() = default;
    Tensor(int n_, int c_, int h_, int w_)
        : n(n_), c(c_), h(h_), w(w_),
          data(static_cast<std::size_t>(n_) * c_ * h_ * w_, T(0)) {}

    std::size_t size() const { return data.size(); }
    std::size_t plane() const { return static_cast<std::size_t>(h) * w; }

    T* item(int ni) { return data.data() + static_cast<std::size_t>(ni) * c * plane(); }
    const T* item(int ni) const { return data.data() + static_cast<std::size_t>(ni) * c * plane(); }

    T& at(int ni, int ci, int y, int x) {
        return data[((static_cast<std::size_t>(ni) * c + ci) * h + y) * w + x];
    }
    T at(int ni, int ci, int y, int x) const {
        return data[((static_cast<std::size_t>(ni) * c + ci) * h + y) * w + x];
    }

    bool same_shape(const Tensor& o) const { return n == o.n && c == o.c && h == o.h && w == o.w; }

    void fill(T v) { std::fill(data.begin(), data.end(), v); }
};

template <typename T>
Tensor<T> images_to_tensor(const std::vector<Image>& images) {
    if (images.empty()) return {};
    const int h = images[0].height, w = images[0].width;
    Tensor<T> t(static_cast<int>(images.size()), 1, h, w);
    for (std::size_t i = 0; i < images.size(); ++i) {
        if (images[i].height != h || images[i].width != w)
            throw ValidationError("images_to_tensor: mixed image sizes in batch");
        for (std::size_t p = 0; p < images[i].pixels.size(); ++p)
            t.data[i * images[i].pixels.size() + p] = static_cast<T>(images[i].pixels[p]);
    }
    return t;
}

template <typename T>
Image tensor_item_to_image(const Tensor<T>& t, int ni, int ci = 0) {
    Image img(t.h, t.w);
    for (int y = 0; y < t.h; ++y)
        for (int x = 0; x < t.w; ++x) img.at(y, x) = static_cast<float>(t.at(ni, ci, y, x));
    return img;
}

}  // namespace unimos
