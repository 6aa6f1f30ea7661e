#pragma once

// Zero-padded linear convolution and spectral multipliers on uniform grids,
// backed by FFTW.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <mutex>
#include <numbers>
#include <vector>

#include <fftw3.h>

#include "fracgrad/error.hpp"
#include "fracgrad/fields.hpp"

namespace fracgrad::fft {

namespace detail {
// FFTW planning is not thread-safe; execution on distinct plans is.
inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace detail

/// Real-to-complex transform pair on a fixed padded shape.
class RealTransform {
public:
    explicit RealTransform(std::vector<int> shape) : shape_(std::move(shape)) {
        real_size_ = 1;
        for (int s : shape_) real_size_ *= static_cast<std::size_t>(s);
        complex_size_ = real_size_ / static_cast<std::size_t>(shape_.back()) *
                        (static_cast<std::size_t>(shape_.back()) / 2 + 1);
        real_ = fftw_alloc_real(real_size_);
        spec_ = fftw_alloc_complex(complex_size_);
        std::lock_guard lock(detail::planner_mutex());
        forward_ = fftw_plan_dft_r2c(static_cast<int>(shape_.size()), shape_.data(), real_, spec_, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_c2r(static_cast<int>(shape_.size()), shape_.data(), spec_, real_, FFTW_ESTIMATE);
    }

    RealTransform(const RealTransform&) = delete;
    RealTransform& operator=(const RealTransform&) = delete;

    ~RealTransform() {
        std::lock_guard lock(detail::planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
        fftw_free(real_);
        fftw_free(spec_);
    }

    double* real() { return real_; }
    std::complex<double>* spectrum() { return reinterpret_cast<std::complex<double>*>(spec_); }
    std::size_t real_size() const { return real_size_; }
    std::size_t complex_size() const { return complex_size_; }
    const std::vector<int>& shape() const { return shape_; }

    void forward() { fftw_execute(forward_); }

    /// Inverse transform, normalized so backward(forward(x)) == x.
    void backward() {
        fftw_execute(backward_);
        const double scale = 1.0 / static_cast<double>(real_size_);
        for (std::size_t i = 0; i < real_size_; ++i) real_[i] *= scale;
    }

private:
    std::vector<int> shape_;
    std::size_t real_size_ = 0;
    std::size_t complex_size_ = 0;
    double* real_ = nullptr;
    fftw_complex* spec_ = nullptr;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

/// Signed integer cell offset.
using Offset = std::array<long, 3>;

inline std::vector<int> padded_shape(const Grid& g, int pad) {
    require(pad >= 2, "padding factor must be at least 2");
    std::vector<int> shape;
    for (int k = 0; k < g.dim(); ++k) shape.push_back(static_cast<int>(g.n()[k]) * pad);
    return shape;
}

namespace detail {
template <class Visit>
void for_each_padded(const std::vector<int>& shape, Visit&& visit) {
    const int d = static_cast<int>(shape.size());
    const int s1 = d > 1 ? shape[1] : 1;
    const int s2 = d > 2 ? shape[2] : 1;
    std::size_t lin = 0;
    for (int a = 0; a < shape[0]; ++a)
        for (int b = 0; b < s1; ++b)
            for (int c = 0; c < s2; ++c) visit(lin++, std::array<int, 3>{a, b, c});
}

inline void scatter(const Grid& g, const std::vector<int>& shape, std::span<const double> f, double* dst,
                    std::size_t real_size) {
    std::fill(dst, dst + real_size, 0.0);
    const int d = g.dim();
    const std::size_t s1 = d > 1 ? static_cast<std::size_t>(shape[1]) : 1;
    const std::size_t s2 = d > 2 ? static_cast<std::size_t>(shape[2]) : 1;
    for (std::size_t lin = 0; lin < g.size(); ++lin) {
        const Index i = g.multi(lin);
        dst[(i[0] * s1 + i[1]) * s2 + i[2]] = f[lin];
    }
}

inline std::vector<double> gather(const Grid& g, const std::vector<int>& shape, const double* src) {
    const int d = g.dim();
    const std::size_t s1 = d > 1 ? static_cast<std::size_t>(shape[1]) : 1;
    const std::size_t s2 = d > 2 ? static_cast<std::size_t>(shape[2]) : 1;
    std::vector<double> out(g.size());
    for (std::size_t lin = 0; lin < g.size(); ++lin) {
        const Index i = g.multi(lin);
        out[lin] = src[(i[0] * s1 + i[1]) * s2 + i[2]];
    }
    return out;
}
} // namespace detail

/// out_i = sum_j f_j K(i - j) over the grid, computed as a circular
/// convolution on a box padded by `pad` per axis. With pad >= 2 every offset
/// in [-(n-1), n-1] is represented once, so there is no wrap-around.
/// `kernel(offset)` must be defined for those offsets.
template <class Kernel>
std::vector<double> convolve_linear(const Grid& g, std::span<const double> f, Kernel&& kernel, int pad = 2) {
    const auto shape = padded_shape(g, pad);
    const int d = g.dim();
    RealTransform kt(shape), ft(shape);
    detail::for_each_padded(shape, [&](std::size_t lin, std::array<int, 3> j) {
        Offset o{0, 0, 0};
        for (int k = 0; k < d; ++k) {
            const long n = static_cast<long>(g.n()[k]);
            const long p = shape[k];
            o[k] = j[k] <= p - n ? j[k] : j[k] - p;
        }
        kt.real()[lin] = kernel(o);
    });
    detail::scatter(g, shape, f, ft.real(), ft.real_size());
    kt.forward();
    ft.forward();
    auto* a = ft.spectrum();
    const auto* b = kt.spectrum();
    for (std::size_t i = 0; i < ft.complex_size(); ++i) a[i] *= b[i];
    ft.backward();
    return detail::gather(g, shape, ft.real());
}

/// Applies the Fourier multiplier m(|xi|^2) to f zero-padded by `pad`, with
/// xi_k = 2 pi k / (P_k h_k) the continuous frequencies of the padded box.
template <class Multiplier>
std::vector<double> apply_multiplier(const Grid& g, std::span<const double> f, Multiplier&& m, int pad = 2) {
    const auto shape = padded_shape(g, pad);
    const int d = g.dim();
    RealTransform ft(shape);
    detail::scatter(g, shape, f, ft.real(), ft.real_size());
    ft.forward();
    std::array<int, 3> cshape{1, 1, 1};
    for (int k = 0; k < d; ++k) cshape[k] = shape[k];
    cshape[d - 1] = shape[d - 1] / 2 + 1;
    auto freq = [&](int k, int j) {
        const int p = shape[k];
        const int kk = j <= p / 2 ? j : j - p;
        return 2.0 * std::numbers::pi * kk / (p * g.h()[k]);
    };
    auto* spec = ft.spectrum();
    std::size_t lin = 0;
    for (int a = 0; a < cshape[0]; ++a)
        for (int b = 0; b < cshape[1]; ++b)
            for (int c = 0; c < cshape[2]; ++c) {
                const std::array<int, 3> j{a, b, c};
                double xi2 = 0.0;
                for (int k = 0; k < d; ++k) {
                    const double x = freq(k, j[k]);
                    xi2 += x * x;
                }
                spec[lin++] *= m(xi2);
            }
    ft.backward();
    return detail::gather(g, shape, ft.real());
}

/// Convolves one fixed input with many kernels, reusing its spectrum.
class Convolver {
public:
    Convolver(const Grid& g, std::span<const double> f, int pad = 2)
        : grid_(g), shape_(padded_shape(g, pad)), input_(shape_), work_(shape_) {
        detail::scatter(g, shape_, f, input_.real(), input_.real_size());
        input_.forward();
    }

    template <class Kernel>
    std::vector<double> apply(Kernel&& kernel) {
        const int d = grid_.dim();
        detail::for_each_padded(shape_, [&](std::size_t lin, std::array<int, 3> j) {
            Offset o{0, 0, 0};
            for (int k = 0; k < d; ++k) {
                const long n = static_cast<long>(grid_.n()[k]);
                const long p = shape_[k];
                o[k] = j[k] <= p - n ? j[k] : j[k] - p;
            }
            work_.real()[lin] = kernel(o);
        });
        work_.forward();
        auto* a = work_.spectrum();
        const auto* b = input_.spectrum();
        for (std::size_t i = 0; i < work_.complex_size(); ++i) a[i] *= b[i];
        work_.backward();
        return detail::gather(grid_, shape_, work_.real());
    }

private:
    Grid grid_;
    std::vector<int> shape_;
    RealTransform input_;
    RealTransform work_;
};

} // namespace fracgrad::fft
