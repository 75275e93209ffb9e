#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "rkha/errors.hpp"
#include "rkha/fft.hpp"
#include "rkha/util.hpp"

namespace rkha {

enum class lattice_kind { integer_lattice, scaled_grid };

// Finite truncation of the dual group: nodes are the multi-indices k with
// |k_i| <= radius, standing for the dual point step*k. An integer lattice
// (dual of the torus) carries counting measure; a scaled grid (dual of R^d)
// carries the rectangle-rule weight step^dim per node.
struct dual_lattice {
    int dim = 1;
    lattice_kind kind = lattice_kind::integer_lattice;
    double step = 1.0;
    int radius = 0;

    int axis_nodes() const { return 2 * radius + 1; }

    std::size_t node_count() const {
        std::size_t n = 1;
        for (int i = 0; i < dim; ++i) n *= std::size_t(axis_nodes());
        return n;
    }

    double node_measure() const {
        if (kind == lattice_kind::integer_lattice) return 1.0;
        double m = 1.0;
        for (int i = 0; i < dim; ++i) m *= step;
        return m;
    }

    bool in_range(const std::vector<int>& idx) const {
        for (int i = 0; i < dim; ++i)
            if (idx[i] < -radius || idx[i] > radius) return false;
        return true;
    }

    std::size_t flatten(const std::vector<int>& idx) const {
        std::size_t f = 0;
        for (int i = 0; i < dim; ++i) f = f * std::size_t(axis_nodes()) + std::size_t(idx[i] + radius);
        return f;
    }

    void unflatten(std::size_t flat, std::vector<int>& idx) const {
        idx.resize(std::size_t(dim));
        for (int i = dim - 1; i >= 0; --i) {
            idx[std::size_t(i)] = int(flat % std::size_t(axis_nodes())) - radius;
            flat /= std::size_t(axis_nodes());
        }
    }

    // dual point gamma' = step * k
    std::vector<double> dual_point(const std::vector<int>& idx) const {
        std::vector<double> g(std::size_t(dim), 0.0);
        for (int i = 0; i < dim; ++i) g[std::size_t(i)] = step * idx[std::size_t(i)];
        return g;
    }

    bool same_geometry(const dual_lattice& o) const {
        return dim == o.dim && kind == o.kind && step == o.step;
    }

    friend bool operator==(const dual_lattice& a, const dual_lattice& b) {
        return a.same_geometry(b) && a.radius == b.radius;
    }
};

inline dual_lattice make_integer_lattice(int dim, int radius) {
    require(dim >= 1, errc::dimension_mismatch, "dimension must be positive");
    require(radius >= 0, errc::radius_mismatch, "radius must be nonnegative");
    return {dim, lattice_kind::integer_lattice, 1.0, radius};
}

inline dual_lattice make_scaled_grid(int dim, double step, int radius) {
    require(dim >= 1, errc::dimension_mismatch, "dimension must be positive");
    require(step > 0.0, errc::parse_error, "grid step must be positive");
    require(radius >= 0, errc::radius_mismatch, "radius must be nonnegative");
    return {dim, lattice_kind::scaled_grid, step, radius};
}

inline dual_lattice enlarge(const dual_lattice& lat, int factor) {
    require(factor >= 1, errc::radius_mismatch, "enlarge factor must be >= 1");
    dual_lattice out = lat;
    out.radius = lat.radius * factor;
    return out;
}

// One complex value per lattice node, row-major over (k_1+R, ..., k_d+R).
struct lattice_array {
    dual_lattice lattice;
    std::vector<cplx> values;

    lattice_array() = default;
    explicit lattice_array(const dual_lattice& lat) : lattice(lat), values(lat.node_count()) {}
    lattice_array(const dual_lattice& lat, std::vector<cplx> v) : lattice(lat), values(std::move(v)) {
        require(values.size() == lattice.node_count(), errc::dimension_mismatch,
                "value count does not match lattice node count");
    }

    cplx& at(const std::vector<int>& idx) { return values[lattice.flatten(idx)]; }
    const cplx& at(const std::vector<int>& idx) const { return values[lattice.flatten(idx)]; }
};

// Copy onto a lattice of different radius: values outside the source window
// are zero, values outside the target window are dropped.
inline lattice_array reframe(const lattice_array& a, int radius) {
    dual_lattice lat = a.lattice;
    lat.radius = radius;
    lattice_array out(lat);
    std::vector<int> idx;
    if (radius <= a.lattice.radius) {
        for (std::size_t f = 0; f < out.values.size(); ++f) {
            lat.unflatten(f, idx);
            out.values[f] = a.values[a.lattice.flatten(idx)];
        }
    } else {
        for (std::size_t f = 0; f < a.values.size(); ++f) {
            a.lattice.unflatten(f, idx);
            out.values[lat.flatten(idx)] = a.values[f];
        }
    }
    return out;
}

namespace detail {

inline void check_conv_inputs(const lattice_array& a, const lattice_array& b, int out_radius) {
    require(a.lattice.same_geometry(b.lattice), errc::lattice_kind_mismatch,
            "convolution inputs live on different lattices");
    require(a.lattice.radius == b.lattice.radius, errc::radius_mismatch,
            "convolution inputs have different radii");
    require(out_radius >= 0, errc::radius_mismatch, "output radius must be nonnegative");
    require(a.lattice.radius >= 2 * out_radius, errc::radius_mismatch,
            "input radius must be at least twice the output radius");
}

// Lexicographic walker over the box [lo, hi]^d keeping the flat offsets of
// alpha (into a) and gamma-alpha (into b) updated incrementally.
struct box_walker {
    const std::vector<int>* lo;
    const std::vector<int>* hi;
    const std::vector<std::size_t>* stride;
    std::vector<int> pos;
    std::size_t fa = 0, fb = 0;

    void advance() {
        for (int i = int(pos.size()) - 1; i >= 0; --i) {
            auto u = std::size_t(i);
            if (pos[u] < (*hi)[u]) {
                ++pos[u];
                fa += (*stride)[u];
                fb -= (*stride)[u];
                return;
            }
            auto span = std::size_t((*hi)[u] - (*lo)[u]);
            pos[u] = (*lo)[u];
            fa -= span * (*stride)[u];
            fb += span * (*stride)[u];
        }
    }

    void retreat() {
        for (int i = int(pos.size()) - 1; i >= 0; --i) {
            auto u = std::size_t(i);
            if (pos[u] > (*lo)[u]) {
                --pos[u];
                fa -= (*stride)[u];
                fb += (*stride)[u];
                return;
            }
            auto span = std::size_t((*hi)[u] - (*lo)[u]);
            pos[u] = (*hi)[u];
            fa += span * (*stride)[u];
            fb -= span * (*stride)[u];
        }
    }
};

} // namespace detail

// Direct-sum convolution: (a*b)(gamma) = measure * sum_alpha a(alpha) b(gamma-alpha),
// exact on |gamma| <= out_radius given inputs tabulated on radius >= 2*out_radius.
// Terms are accumulated in mirrored pairs from both ends of the index box, which
// makes convolve_direct(a,b) == convolve_direct(b,a) bit for bit.
inline lattice_array convolve_direct(const lattice_array& a, const lattice_array& b, int out_radius) {
    detail::check_conv_inputs(a, b, out_radius);
    const dual_lattice& in = a.lattice;
    const int d = in.dim;
    const int R = in.radius;

    dual_lattice out_lat = in;
    out_lat.radius = out_radius;
    lattice_array out(out_lat);

    std::vector<std::size_t> stride(std::size_t(d), 1);
    for (int i = d - 2; i >= 0; --i)
        stride[std::size_t(i)] = stride[std::size_t(i + 1)] * std::size_t(in.axis_nodes());

    const double measure = in.node_measure();
    std::vector<int> g;
    std::vector<int> lo(std::size_t(d), 0), hi(std::size_t(d), 0);
    detail::box_walker fwd, bwd;
    fwd.lo = bwd.lo = &lo;
    fwd.hi = bwd.hi = &hi;
    fwd.stride = bwd.stride = &stride;

    for (std::size_t oflat = 0; oflat < out.values.size(); ++oflat) {
        out_lat.unflatten(oflat, g);
        std::size_t n = 1;
        std::size_t fa_lo = 0, fb_lo = 0, fa_hi = 0, fb_hi = 0;
        for (int i = 0; i < d; ++i) {
            auto u = std::size_t(i);
            lo[u] = std::max(-R, g[u] - R);
            hi[u] = std::min(R, g[u] + R);
            n *= std::size_t(hi[u] - lo[u] + 1);
            fa_lo += std::size_t(lo[u] + R) * stride[u];
            fb_lo += std::size_t(g[u] - lo[u] + R) * stride[u];
            fa_hi += std::size_t(hi[u] + R) * stride[u];
            fb_hi += std::size_t(g[u] - hi[u] + R) * stride[u];
        }
        fwd.pos = lo;
        fwd.fa = fa_lo;
        fwd.fb = fb_lo;
        bwd.pos = hi;
        bwd.fa = fa_hi;
        bwd.fb = fb_hi;

        cplx sum(0.0, 0.0);
        for (std::size_t j = 0; j < n / 2; ++j) {
            cplx pair = a.values[fwd.fa] * b.values[fwd.fb] + a.values[bwd.fa] * b.values[bwd.fb];
            sum += pair;
            fwd.advance();
            bwd.retreat();
        }
        if (n & 1) sum += a.values[fwd.fa] * b.values[fwd.fb];
        out.values[oflat] = sum * measure;
    }
    return out;
}

// Transform-based path: zero-pad each axis to a power of two covering the
// full linear convolution, multiply spectra, invert, extract the window.
inline lattice_array convolve_fft(const lattice_array& a, const lattice_array& b, int out_radius) {
    detail::check_conv_inputs(a, b, out_radius);
    const dual_lattice& in = a.lattice;
    const int d = in.dim;
    const int R = in.radius;
    const std::size_t pad = fft::next_pow2(std::size_t(4 * R + 1));

    std::vector<std::size_t> shape(std::size_t(d), pad);
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= pad;
    require(total <= (std::size_t(1) << 30), errc::size_limit, "fft buffer too large");

    std::vector<cplx> fa(total, cplx(0, 0)), fb(total, cplx(0, 0));
    const std::size_t an = std::size_t(in.axis_nodes());
    // embed at offset alpha + R per axis
    std::vector<std::size_t> digits(std::size_t(d), 0);
    for (std::size_t flat = 0; flat < a.values.size(); ++flat) {
        std::size_t rem = flat;
        for (int i = d - 1; i >= 0; --i) {
            digits[std::size_t(i)] = rem % an;
            rem /= an;
        }
        std::size_t pos = 0;
        for (int i = 0; i < d; ++i) pos = pos * pad + digits[std::size_t(i)];
        fa[pos] = a.values[flat];
        fb[pos] = b.values[flat];
    }
    for (int ax = 0; ax < d; ++ax) {
        fft::transform_axis(fa, shape, std::size_t(ax), false);
        fft::transform_axis(fb, shape, std::size_t(ax), false);
    }
    for (std::size_t i = 0; i < total; ++i) fa[i] *= fb[i];
    for (int ax = 0; ax < d; ++ax) fft::transform_axis(fa, shape, std::size_t(ax), true);

    dual_lattice out_lat = in;
    out_lat.radius = out_radius;
    lattice_array out(out_lat);
    const double measure = in.node_measure();
    std::vector<int> g;
    for (std::size_t oflat = 0; oflat < out.values.size(); ++oflat) {
        out_lat.unflatten(oflat, g);
        std::size_t pos = 0;
        for (int i = 0; i < d; ++i) pos = pos * pad + std::size_t(g[std::size_t(i)] + 2 * R);
        out.values[oflat] = fa[pos] * measure;
    }
    return out;
}

// Dispatcher: direct summation for small problems, transform path when the
// double-loop cost would exceed ~4M terms. Both paths are deterministic.
inline lattice_array convolve(const lattice_array& a, const lattice_array& b, int out_radius) {
    detail::check_conv_inputs(a, b, out_radius);
    dual_lattice out_lat = a.lattice;
    out_lat.radius = out_radius;
    const double cost = double(out_lat.node_count()) * double(a.lattice.node_count());
    if (cost <= double(std::size_t(1) << 22)) return convolve_direct(a, b, out_radius);
    return convolve_fft(a, b, out_radius);
}

} // namespace rkha
