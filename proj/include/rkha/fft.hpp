#pragma once

#include <cstddef>
#include <vector>

#include "rkha/errors.hpp"
#include "rkha/util.hpp"

namespace rkha::fft {

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Iterative radix-2 Cooley-Tukey on a power-of-two length. Twiddles are
// recomputed per stage from std::polar, so results are bit-deterministic for
// a given binary.
inline void transform(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    require((n & (n - 1)) == 0 && n > 0, errc::dimension_mismatch,
            "fft length must be a power of two");
    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 6.283185307179586476925286766559 / double(len);
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                cplx u = a[i + j];
                cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / double(n);
        for (auto& z : a) z *= inv;
    }
}

// In-place transform along one axis of a dense row-major d-dimensional array.
// `shape` lists the extent per axis; the extent of `axis` must be a power of 2.
inline void transform_axis(std::vector<cplx>& data, const std::vector<std::size_t>& shape,
                           std::size_t axis, bool inverse) {
    std::size_t stride = 1;
    for (std::size_t k = axis + 1; k < shape.size(); ++k) stride *= shape[k];
    const std::size_t len = shape[axis];
    const std::size_t block = stride * len;
    std::vector<cplx> line(len);
    for (std::size_t base = 0; base < data.size(); base += block) {
        for (std::size_t off = 0; off < stride; ++off) {
            for (std::size_t k = 0; k < len; ++k) line[k] = data[base + off + k * stride];
            transform(line, inverse);
            for (std::size_t k = 0; k < len; ++k) data[base + off + k * stride] = line[k];
        }
    }
}

} // namespace rkha::fft
