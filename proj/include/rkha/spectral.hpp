#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "rkha/errors.hpp"
#include "rkha/lattice.hpp"
#include "rkha/util.hpp"
#include "rkha/weights.hpp"

namespace rkha {

// Element of H_lambda stored by its Fourier coefficients on a lattice
// truncation. The weight fixes the inner product; the coefficient lattice may
// be any radius of the same geometry (family weights evaluate anywhere).
struct spectral_fn {
    weight w;
    lattice_array coeffs;

    const dual_lattice& lattice() const { return coeffs.lattice; }
};

inline void check_same_space(const spectral_fn& f, const spectral_fn& g) {
    require(f.w.same_source(g.w), errc::weight_mismatch, "operands built from different weights");
    require(f.lattice() == g.lattice(), errc::radius_mismatch, "operands tabulated on different radii");
}

// character gamma_k(x) = e^{2 pi i <step*k, x>}; kernel coefficients carry the
// conjugate, lambda(gamma) * conj(gamma(x)).
inline spectral_fn kernel_section(const weight& w, const dual_lattice& on,
                                  std::span<const double> x) {
    require(int(x.size()) == on.dim, errc::dimension_mismatch, "point dimension");
    spectral_fn f{w, lattice_array(on)};
    std::vector<int> idx;
    for (std::size_t flat = 0; flat < f.coeffs.values.size(); ++flat) {
        on.unflatten(flat, idx);
        double turns = 0.0;
        for (int i = 0; i < on.dim; ++i) turns += on.step * idx[std::size_t(i)] * x[std::size_t(i)];
        f.coeffs.values[flat] = w.value(idx) * std::conj(unit_turn(turns));
    }
    return f;
}

// f(x) = measure * sum f_hat(gamma) gamma(x)
inline cplx evaluate(const spectral_fn& f, std::span<const double> x) {
    const dual_lattice& lat = f.lattice();
    require(int(x.size()) == lat.dim, errc::dimension_mismatch, "point dimension");
    std::vector<int> idx;
    cplx s(0.0, 0.0);
    for (std::size_t flat = 0; flat < f.coeffs.values.size(); ++flat) {
        lat.unflatten(flat, idx);
        double turns = 0.0;
        for (int i = 0; i < lat.dim; ++i) turns += lat.step * idx[std::size_t(i)] * x[std::size_t(i)];
        s += f.coeffs.values[flat] * unit_turn(turns);
    }
    return s * lat.node_measure();
}

// <f,g> = measure * sum f_hat conj(g_hat) / lambda
inline cplx inner(const spectral_fn& f, const spectral_fn& g) {
    check_same_space(f, g);
    const dual_lattice& lat = f.lattice();
    std::vector<int> idx;
    cplx s(0.0, 0.0);
    for (std::size_t flat = 0; flat < f.coeffs.values.size(); ++flat) {
        lat.unflatten(flat, idx);
        s += f.coeffs.values[flat] * std::conj(g.coeffs.values[flat]) / f.w.value(idx);
    }
    return s * lat.node_measure();
}

inline double norm_squared(const spectral_fn& f) {
    const dual_lattice& lat = f.lattice();
    std::vector<int> idx;
    double s = 0.0;
    for (std::size_t flat = 0; flat < f.coeffs.values.size(); ++flat) {
        lat.unflatten(flat, idx);
        s += abs2(f.coeffs.values[flat]) / f.w.value(idx);
    }
    return s * lat.node_measure();
}

inline double norm(const spectral_fn& f) { return std::sqrt(norm_squared(f)); }

// k(x,y) := <k_x, k_y> = k_x(y)
inline cplx kernel_value(const weight& w, const dual_lattice& on, std::span<const double> x,
                         std::span<const double> y) {
    return inner(kernel_section(w, on, x), kernel_section(w, on, y));
}

// ---------------------------------------------------------------------------
// Tensor coefficients on Gamma x Gamma

struct tensor_coeffs {
    weight w;
    dual_lattice factor; // per-factor lattice (radius R)
    std::vector<cplx> values; // row-major over (alpha_flat, beta_flat)

    std::size_t factor_nodes() const { return factor.node_count(); }
    cplx& at(std::size_t aflat, std::size_t bflat) { return values[aflat * factor_nodes() + bflat]; }
    const cplx& at(std::size_t aflat, std::size_t bflat) const {
        return values[aflat * factor_nodes() + bflat];
    }
};

inline constexpr std::size_t tensor_size_cap = std::size_t(1) << 28;

inline tensor_coeffs make_tensor(const weight& w, const dual_lattice& factor,
                                 std::size_t cap = tensor_size_cap) {
    const std::size_t n = factor.node_count();
    require(n <= cap / n, errc::size_limit, "tensor allocation exceeds the size cap");
    tensor_coeffs t{w, factor, std::vector<cplx>(n * n, cplx(0, 0))};
    return t;
}

inline tensor_coeffs tensor_product(const spectral_fn& f, const spectral_fn& g) {
    check_same_space(f, g);
    tensor_coeffs t = make_tensor(f.w, f.lattice());
    const std::size_t n = t.factor_nodes();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) t.values[a * n + b] = f.coeffs.values[a] * g.coeffs.values[b];
    return t;
}

inline cplx tensor_inner(const tensor_coeffs& F, const tensor_coeffs& G) {
    require(F.w.same_source(G.w) && F.factor == G.factor, errc::weight_mismatch,
            "tensor operands live in different spaces");
    const dual_lattice& lat = F.factor;
    const std::size_t n = lat.node_count();
    std::vector<double> lam = F.w.tabulate(lat);
    const double m = lat.node_measure();
    cplx s(0.0, 0.0);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            s += F.values[a * n + b] * std::conj(G.values[a * n + b]) / (lam[a] * lam[b]);
    return s * (m * m);
}

inline double tensor_norm_squared(const tensor_coeffs& F) {
    const dual_lattice& lat = F.factor;
    const std::size_t n = lat.node_count();
    std::vector<double> lam = F.w.tabulate(lat);
    const double m = lat.node_measure();
    double s = 0.0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) s += abs2(F.values[a * n + b]) / (lam[a] * lam[b]);
    return s * (m * m);
}

inline double tensor_norm(const tensor_coeffs& F) { return std::sqrt(tensor_norm_squared(F)); }

// ---------------------------------------------------------------------------
// Comultiplication and pointwise multiplication

// Delta(f)(alpha, beta) = (f_hat(alpha+beta)/lambda(alpha+beta)) * lambda(alpha)lambda(beta).
// The ratio is divided out first; kernel sections then map to elementary
// tensors without rounding residue.
inline tensor_coeffs comult(const spectral_fn& f, int out_radius) {
    const dual_lattice& in = f.lattice();
    require(in.radius >= 2 * out_radius, errc::radius_mismatch,
            "comultiplication needs coefficients on twice the tensor radius");
    dual_lattice factor = in;
    factor.radius = out_radius;

    // s = f_hat / lambda on the input window
    std::vector<cplx> s(f.coeffs.values.size());
    {
        std::vector<int> idx;
        for (std::size_t flat = 0; flat < s.size(); ++flat) {
            in.unflatten(flat, idx);
            s[flat] = f.coeffs.values[flat] / f.w.value(idx);
        }
    }
    std::vector<double> lam = f.w.tabulate(factor);

    tensor_coeffs t = make_tensor(f.w, factor);
    const std::size_t n = factor.node_count();
    std::vector<int> ia, ib;
    std::vector<int> sum(std::size_t(in.dim), 0);
    for (std::size_t a = 0; a < n; ++a) {
        factor.unflatten(a, ia);
        for (std::size_t b = 0; b < n; ++b) {
            factor.unflatten(b, ib);
            for (int i = 0; i < in.dim; ++i) sum[std::size_t(i)] = ia[std::size_t(i)] + ib[std::size_t(i)];
            t.values[a * n + b] = s[in.flatten(sum)] * (lam[a] * lam[b]);
        }
    }
    return t;
}

// (fg)^ = f_hat * g_hat (doubled-window convolution, node measure included)
inline spectral_fn multiply(const spectral_fn& f, const spectral_fn& g, int out_radius) {
    check_same_space(f, g);
    return spectral_fn{f.w, convolve(f.coeffs, g.coeffs, out_radius)};
}

inline bool is_unital(const dual_lattice& lat) { return lat.kind == lattice_kind::integer_lattice; }

// The constant function 1: hat(1) = delta_0. Only integer lattices carry it.
inline spectral_fn unit_element(const weight& w, const dual_lattice& on) {
    require(is_unital(on), errc::lattice_kind_mismatch,
            "the constant function 1 requires a counting-measure lattice");
    spectral_fn f{w, lattice_array(on)};
    std::vector<int> zero(std::size_t(on.dim), 0);
    f.coeffs.at(zero) = cplx(1.0, 0.0);
    return f;
}

// ---------------------------------------------------------------------------
// Comultiplication norms

// Norm of the comultiplication realized on the truncation: f on radius 2R maps
// to a tensor with per-factor radius R, and
//   |Delta f|^2 = measure * sum_gamma w_R(gamma) |f_hat(gamma)|^2 / lambda(gamma)^2
// with w_R the self-convolution of lambda restricted to the tensor window.
// The norm is the max of w_R/lambda over |gamma| <= 2R, attained by a delta probe.
struct window_norm_result {
    double norm_squared = 0.0;
    std::vector<int> argmax;
    lattice_array window_convolution; // w_R on radius 2R
};

inline window_norm_result comult_window_norm(const weight& w, int tensor_radius) {
    dual_lattice factor = w.lattice();
    factor.radius = tensor_radius;
    dual_lattice big = factor;
    big.radius = 4 * tensor_radius;

    lattice_array lam_cut(big); // lambda restricted to the tensor window, zero beyond
    std::vector<int> idx;
    for (std::size_t f = 0; f < lam_cut.values.size(); ++f) {
        big.unflatten(f, idx);
        bool inside = true;
        for (int i = 0; i < big.dim; ++i)
            if (std::abs(idx[std::size_t(i)]) > tensor_radius) inside = false;
        lam_cut.values[f] = inside ? cplx(w.value(idx), 0.0) : cplx(0.0, 0.0);
    }
    window_norm_result res;
    res.window_convolution = convolve(lam_cut, lam_cut, 2 * tensor_radius);
    double best = -1.0;
    for (std::size_t f = 0; f < res.window_convolution.values.size(); ++f) {
        res.window_convolution.lattice.unflatten(f, idx);
        double ratio = res.window_convolution.values[f].real() / w.value(idx);
        if (ratio > best) {
            best = ratio;
            res.argmax = idx;
        }
    }
    res.norm_squared = best;
    return res;
}

struct comult_report {
    double delta_norm = 0.0;   // sqrt of the weights-module subconvolutivity constant
    double banach_scale = 0.0; // = delta_norm
    bool unital = false;
    subconv_verdict certification = subconv_verdict::unconfirmed;
    std::vector<std::pair<int, double>> c_convergence;
    double window_norm = 0.0;  // realized norm of the truncated comultiplication
    double max_sqrt_kxx = 0.0; // max over sampled x of sqrt(k(x,x)) on radius R
    bool kernel_bound_ok = false;
};

inline comult_report make_comult_report(const weight& w, int radius) {
    comult_report rep;
    std::vector<int> ladder;
    for (int r = radius; r >= 1 && int(ladder.size()) < 3; r /= 2) ladder.insert(ladder.begin(), r);
    if (ladder.empty()) ladder.push_back(radius);
    double c = 0.0;
    for (int r : ladder) {
        c = subconvolutivity_constant(w, r).constant;
        rep.c_convergence.emplace_back(r, c);
    }
    rep.delta_norm = std::sqrt(c);
    rep.banach_scale = rep.delta_norm;
    rep.unital = is_unital(w.lattice());
    if (rep.c_convergence.size() >= 2) {
        const double last = rep.c_convergence.back().second;
        const double prev = rep.c_convergence[rep.c_convergence.size() - 2].second;
        if (last > prev * 1.2)
            rep.certification = subconv_verdict::unbounded;
        else if (std::fabs(last - prev) < 1e-6 * std::fabs(prev))
            rep.certification = subconv_verdict::certified;
        else
            rep.certification = subconv_verdict::unconfirmed;
    } else {
        rep.certification = subconv_verdict::certified;
    }
    if (radius >= 1) rep.window_norm = std::sqrt(comult_window_norm(w, radius).norm_squared);
    else rep.window_norm = rep.delta_norm;

    // boundedness of the kernel: sqrt(k(x,x)) <= |Delta| at sampled points
    dual_lattice on = w.lattice();
    on.radius = radius;
    rep.max_sqrt_kxx = 0.0;
    for (int j = 0; j < 5; ++j) {
        std::vector<double> x(std::size_t(on.dim), 0.0);
        for (int i = 0; i < on.dim; ++i)
            x[std::size_t(i)] = (on.kind == lattice_kind::integer_lattice)
                                    ? double(j) / 5.0
                                    : double(j) * 0.37;
        auto kx = kernel_section(w, on, x);
        rep.max_sqrt_kxx = std::max(rep.max_sqrt_kxx, std::sqrt(norm_squared(kx)));
    }
    rep.kernel_bound_ok = rep.max_sqrt_kxx <= rep.delta_norm * (1.0 + 1e-9);
    return rep;
}

// ---------------------------------------------------------------------------
// Multiplication operator norm by power iteration

// M_f g = trunc_R(f*g) for f on radius 2R, g on radius R. The adjoint with
// respect to the weighted inner product on the radius-R window is
//   (M_f^* e)(beta) = measure * sum_alpha conj(f_hat(alpha)) e(alpha+beta)
//                      * lambda(beta)/lambda(alpha+beta).
inline double mult_operator_norm(const spectral_fn& f, int R, double tol = 1e-8,
                                 int max_iter = 10000) {
    const dual_lattice& big = f.lattice();
    require(big.radius >= 2 * R, errc::radius_mismatch, "multiplier needs coefficients on radius 2R");
    dual_lattice small = big;
    small.radius = R;
    const std::size_t n = small.node_count();
    const std::size_t nb = big.node_count();
    const double m = big.node_measure();

    std::vector<double> lam_small = f.w.tabulate(small);
    std::vector<double> lam_big = f.w.tabulate(big);

    // index maps between the two windows
    std::vector<std::size_t> small_to_big(n);
    {
        std::vector<int> idx;
        for (std::size_t flat = 0; flat < n; ++flat) {
            small.unflatten(flat, idx);
            small_to_big[flat] = big.flatten(idx);
        }
    }

    auto weighted_norm2 = [&](const std::vector<cplx>& v) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += abs2(v[i]) / lam_small[i];
        return s * m;
    };

    // forward: w = trunc_R(f * g)
    std::vector<cplx> gbig(nb);
    auto forward = [&](const std::vector<cplx>& g, std::vector<cplx>& out) {
        std::fill(gbig.begin(), gbig.end(), cplx(0, 0));
        for (std::size_t i = 0; i < n; ++i) gbig[small_to_big[i]] = g[i];
        lattice_array garr(big, gbig);
        lattice_array prod = convolve(f.coeffs, garr, R);
        out = prod.values;
    };

    // adjoint
    std::vector<int> ia, ib;
    std::vector<int> sum(std::size_t(big.dim), 0);
    auto adjoint = [&](const std::vector<cplx>& e, std::vector<cplx>& out) {
        out.assign(n, cplx(0, 0));
        for (std::size_t bflat = 0; bflat < n; ++bflat) {
            small.unflatten(bflat, ib);
            cplx acc(0, 0);
            for (std::size_t aflat = 0; aflat < nb; ++aflat) {
                big.unflatten(aflat, ia);
                bool ok = true;
                for (int i = 0; i < big.dim; ++i) {
                    sum[std::size_t(i)] = ia[std::size_t(i)] + ib[std::size_t(i)];
                    if (std::abs(sum[std::size_t(i)]) > R) ok = false;
                }
                if (!ok) continue;
                const std::size_t sflat = small.flatten(sum);
                acc += std::conj(f.coeffs.values[aflat]) * e[sflat] *
                       (lam_small[bflat] / lam_small[sflat]);
            }
            out[bflat] = acc * m;
        }
    };

    // power iteration on M^* M from the normalized all-ones start
    std::vector<cplx> v(n, cplx(1.0, 0.0)), w, u;
    double nv = std::sqrt(weighted_norm2(v));
    for (auto& z : v) z /= nv;
    double est = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        forward(v, w);
        const double nw = std::sqrt(weighted_norm2(w));
        if (nw == 0.0) return 0.0; // f annihilates the window
        adjoint(w, u);
        double nu = std::sqrt(weighted_norm2(u));
        if (nu == 0.0) return nw;
        for (auto& z : u) z /= nu;
        v.swap(u);
        const double prev = est;
        est = nw;
        if (it > 0 && std::fabs(est - prev) <= tol * est) return est;
    }
    fail(errc::no_convergence, "power iteration did not converge");
}

// ---------------------------------------------------------------------------
// Weak approximate unit on gridded R

// hat(eta_n) = n * 1_{[-1/(2n), 1/(2n)]} sampled at node centers, inclusive
// boundary, mass not renormalized.
inline spectral_fn approx_unit(int n, const weight& w, const dual_lattice& on) {
    require(n >= 1, errc::grid_too_coarse, "n must be positive");
    require(on.kind == lattice_kind::scaled_grid, errc::lattice_kind_mismatch,
            "approximate unit lives on a gridded real line");
    require(on.dim == 1, errc::dimension_mismatch, "approximate unit is one-dimensional");
    require(on.step <= 1.0 / (2.0 * double(n)), errc::grid_too_coarse,
            "grid step exceeds the indicator half-width");
    spectral_fn f{w, lattice_array(on)};
    const double half = 1.0 / (2.0 * double(n));
    std::vector<int> idx(1);
    for (int k = -on.radius; k <= on.radius; ++k) {
        idx[0] = k;
        if (std::fabs(on.step * k) <= half) f.coeffs.at(idx) = cplx(double(n), 0.0);
    }
    return f;
}

// quadrature mass of the sampled indicator (exact integral is 1)
inline double approx_unit_mass(int n, const dual_lattice& on) {
    const double half = 1.0 / (2.0 * double(n));
    long count = 0;
    for (int k = -on.radius; k <= on.radius; ++k)
        if (std::fabs(on.step * k) <= half) ++count;
    return double(n) * on.step * double(count);
}

// ---------------------------------------------------------------------------
// Group-like test

struct group_like_result {
    bool group_like = false;
    double residual = 0.0;
};

// residual = |Delta(xi) - xi (x) xi|_{HxH} / |xi|^2
inline group_like_result is_group_like(const spectral_fn& xi, double tol, int tensor_radius = -1) {
    const double n2 = norm_squared(xi);
    require(n2 > 0.0, errc::zero_element, "group-like test on the zero element");
    if (tensor_radius < 0) tensor_radius = xi.lattice().radius / 2;
    tensor_coeffs d = comult(xi, tensor_radius);

    // xi (x) xi restricted to the tensor window
    dual_lattice factor = xi.lattice();
    factor.radius = tensor_radius;
    const std::size_t n = factor.node_count();
    std::vector<std::size_t> to_big(n);
    {
        std::vector<int> idx;
        for (std::size_t flat = 0; flat < n; ++flat) {
            factor.unflatten(flat, idx);
            to_big[flat] = xi.lattice().flatten(idx);
        }
    }
    tensor_coeffs diff = d;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            diff.values[a * n + b] -= xi.coeffs.values[to_big[a]] * xi.coeffs.values[to_big[b]];

    group_like_result res;
    res.residual = tensor_norm(diff) / n2;
    res.group_like = res.residual < tol;
    return res;
}

} // namespace rkha
