#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rkha/errors.hpp"
#include "rkha/linalg.hpp"
#include "rkha/spectral.hpp"

namespace rkha {

// Finite point sample with its Hermitian PSD Gram matrix. Point labels are
// opaque strings; all geometry enters through the Gram values.
struct sampled_kernel {
    std::vector<std::string> points;
    cmatrix gram;

    std::size_t size() const { return points.size(); }

    std::size_t index_of(const std::string& label) const {
        for (std::size_t i = 0; i < points.size(); ++i)
            if (points[i] == label) return i;
        fail(errc::phi_out_of_range, "unknown point label '" + label + "'");
    }
};

inline constexpr double kernel_herm_tol = 1e-12;
inline constexpr double kernel_psd_tol = 1e-10;

// Hermiticity to 1e-12 relative, PSD to min eig >= -1e-10 * trace.
inline void validate_kernel(const sampled_kernel& k) {
    require(k.gram.rows() == k.points.size() && k.gram.cols() == k.points.size(),
            errc::dimension_mismatch, "gram size does not match point count");
    std::set<std::string> seen;
    for (const auto& p : k.points)
        require(seen.insert(p).second, errc::duplicate_label, "duplicate point label '" + p + "'");
    if (k.points.empty()) return;
    const double scale = std::max(k.gram.max_abs(), 1e-300);
    require(hermiticity_residual(k.gram) <= kernel_herm_tol * scale, errc::point_set_mismatch,
            "gram matrix is not Hermitian");
    const double tr = k.gram.trace_real();
    require(min_eigenvalue(k.gram) >= -kernel_psd_tol * std::max(tr, 0.0) - 1e-300,
            errc::point_set_mismatch, "gram matrix is not positive semidefinite");
}

inline sampled_kernel make_kernel(std::vector<std::string> points, cmatrix gram) {
    sampled_kernel k{std::move(points), std::move(gram)};
    validate_kernel(k);
    return k;
}

// Gram of kernel sections of H_lambda on sample points: K_ij = k(x_i, x_j).
inline sampled_kernel gram_from_weight(const weight& w, const dual_lattice& on,
                                       const std::vector<std::vector<double>>& xs,
                                       const std::vector<std::string>& labels = {}) {
    const std::size_t n = xs.size();
    std::vector<spectral_fn> sections;
    sections.reserve(n);
    for (const auto& x : xs) sections.push_back(kernel_section(w, on, x));
    cmatrix K(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) K(i, j) = inner(sections[i], sections[j]);
    std::vector<std::string> pts;
    if (!labels.empty()) {
        require(labels.size() == n, errc::dimension_mismatch, "label count");
        pts = labels;
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            std::string s = "x" + std::to_string(i) + "=(";
            for (std::size_t c = 0; c < xs[i].size(); ++c)
                s += (c ? "," : "") + fmt17(xs[i][c]);
            s += ")";
            pts.push_back(std::move(s));
        }
    }
    return make_kernel(std::move(pts), std::move(K));
}

// ---------------------------------------------------------------------------
// Constructions

// Kronecker product on the product point set.
inline sampled_kernel tensor_kernel(const sampled_kernel& k1, const sampled_kernel& k2) {
    const std::size_t n1 = k1.size(), n2 = k2.size();
    sampled_kernel out;
    out.points.reserve(n1 * n2);
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j)
            out.points.push_back("(" + k1.points[i] + "," + k2.points[j] + ")");
    out.gram = cmatrix(n1 * n2, n1 * n2);
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j)
            for (std::size_t a = 0; a < n1; ++a)
                for (std::size_t b = 0; b < n2; ++b)
                    out.gram(i * n2 + j, a * n2 + b) = k1.gram(i, a) * k2.gram(j, b);
    validate_kernel(out);
    return out;
}

// Block-diagonal Gram on the disjoint union; zero cross blocks.
inline sampled_kernel direct_sum_kernel(const sampled_kernel& k1, const sampled_kernel& k2) {
    sampled_kernel out;
    out.points = k1.points;
    out.points.insert(out.points.end(), k2.points.begin(), k2.points.end());
    const std::size_t n1 = k1.size(), n = n1 + k2.size();
    out.gram = cmatrix(n, n);
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n1; ++j) out.gram(i, j) = k1.gram(i, j);
    for (std::size_t i = n1; i < n; ++i)
        for (std::size_t j = n1; j < n; ++j) out.gram(i, j) = k2.gram(i - n1, j - n1);
    validate_kernel(out);
    return out;
}

inline void check_same_points(const sampled_kernel& k1, const sampled_kernel& k2) {
    require(k1.points == k2.points, errc::point_set_mismatch,
            "construction needs identical point lists");
}

// Entrywise sum. Included for completeness; the pointwise-sum space is not
// compatible with the algebra structure, so it stays out of algebra tests.
inline sampled_kernel sum_kernel(const sampled_kernel& k1, const sampled_kernel& k2) {
    check_same_points(k1, k2);
    sampled_kernel out{k1.points, k1.gram + k2.gram};
    validate_kernel(out);
    return out;
}

// Entrywise (Hadamard) product; PSD by the Schur product theorem.
inline sampled_kernel product_kernel(const sampled_kernel& k1, const sampled_kernel& k2) {
    check_same_points(k1, k2);
    sampled_kernel out{k1.points, k1.gram};
    for (std::size_t i = 0; i < out.gram.rows(); ++i)
        for (std::size_t j = 0; j < out.gram.cols(); ++j) out.gram(i, j) *= k2.gram(i, j);
    validate_kernel(out);
    return out;
}

// phi: S -> X given as ordered (s_label, x_label) pairs.
using label_map = std::vector<std::pair<std::string, std::string>>;

// Gram'(s,t) = K(phi(s), phi(t)) on the new point set S.
inline sampled_kernel pullback_kernel(const sampled_kernel& k, const label_map& phi) {
    sampled_kernel out;
    std::vector<std::size_t> target;
    for (const auto& [s, x] : phi) {
        out.points.push_back(s);
        target.push_back(k.index_of(x));
    }
    const std::size_t n = target.size();
    out.gram = cmatrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out.gram(i, j) = k.gram(target[i], target[j]);
    validate_kernel(out);
    return out;
}

// Minimal-norm interpretation of a function given by its values on the sample:
// |f|^2 = v^dagger K^+ v with the spectral pseudo-inverse.
inline double element_norm_squared(const sampled_kernel& k, const std::vector<cplx>& values,
                                   double rel_cutoff = 1e-12) {
    require(values.size() == k.size(), errc::dimension_mismatch, "value count");
    return quadratic_form(pseudo_inverse(k.gram, rel_cutoff), values);
}

// ---------------------------------------------------------------------------
// Pushout

namespace detail {

// Value vectors carry the K^{-1} inner product; functions constant on fibers
// of phi form the coordinate subspace spanned by fiber indicators. P is the
// K^{-1}-orthogonal projection onto that subspace.
struct pushout_data {
    std::vector<std::string> s_points;        // ordered labels of S
    std::vector<std::vector<std::size_t>> fibers; // X indices per S point (may be empty)
    cmatrix projection;                       // m x m on value vectors
};

inline pushout_data pushout_projection(const sampled_kernel& k, const label_map& phi,
                                       const std::vector<std::string>& s_points_hint = {}) {
    const std::size_t m = k.size();
    require(phi.size() == m, errc::phi_out_of_range, "phi must be total on the sample");

    pushout_data out;
    std::map<std::string, std::size_t> s_index;
    auto add_s = [&](const std::string& s) {
        if (!s_index.count(s)) {
            s_index[s] = out.s_points.size();
            out.s_points.push_back(s);
            out.fibers.emplace_back();
        }
    };
    for (const auto& s : s_points_hint) add_s(s);
    for (const auto& [x, s] : phi) add_s(s);
    for (const auto& [x, s] : phi) out.fibers[s_index[s]].push_back(k.index_of(x));

    // strict positive definiteness
    auto e = hermitian_eig(k.gram);
    require(!e.values.empty() && e.values.front() > 0.0 &&
                e.values.back() / e.values.front() < 1e12,
            errc::singular_gram, "pushout needs a strictly positive definite gram");
    cmatrix kinv(m, m);
    for (std::size_t t = 0; t < m; ++t) {
        const double inv = 1.0 / e.values[t];
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                kinv(i, j) += inv * e.vectors(i, t) * std::conj(e.vectors(j, t));
    }

    // B: indicators of nonempty fibers
    std::vector<std::size_t> nonempty;
    for (std::size_t s = 0; s < out.fibers.size(); ++s)
        if (!out.fibers[s].empty()) nonempty.push_back(s);
    const std::size_t r = nonempty.size();
    cmatrix B(m, r);
    for (std::size_t c = 0; c < r; ++c)
        for (std::size_t x : out.fibers[nonempty[c]]) B(x, c) = cplx(1, 0);

    cmatrix BtKinv = B.adjoint() * kinv;  // r x m
    cmatrix M = BtKinv * B;               // r x r, Hermitian PD
    auto em = hermitian_eig(M);
    cmatrix Minv(r, r);
    for (std::size_t t = 0; t < r; ++t) {
        require(em.values[t] > 0.0, errc::singular_gram, "degenerate fiber subspace");
        const double inv = 1.0 / em.values[t];
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j)
                Minv(i, j) += inv * em.vectors(i, t) * std::conj(em.vectors(j, t));
    }
    out.projection = B * (Minv * BtKinv); // m x m
    return out;
}

} // namespace detail

// k_phi(s,t) = (P k_{x_t})(x_s) for any fiber representatives; zero on empty
// fibers. Representative independence is asserted to 1e-10.
inline sampled_kernel pushout_kernel(const sampled_kernel& k, const label_map& phi,
                                     const std::vector<std::string>& s_points_hint = {}) {
    auto data = detail::pushout_projection(k, phi, s_points_hint);
    const std::size_t m = k.size();
    const std::size_t ns = data.s_points.size();

    // projected kernel columns: ktilde_x = P K e_x (value vectors)
    cmatrix PK = data.projection * k.gram;
    const double scale = std::max(k.gram.max_abs(), 1e-300);

    sampled_kernel out;
    out.points = data.s_points;
    out.gram = cmatrix(ns, ns);
    for (std::size_t t = 0; t < ns; ++t) {
        if (data.fibers[t].empty()) continue;
        // check the column is independent of the representative
        const std::size_t x0 = data.fibers[t].front();
        for (std::size_t alt : data.fibers[t])
            for (std::size_t i = 0; i < m; ++i)
                require(std::abs(PK(i, alt) - PK(i, x0)) <= 1e-10 * scale, errc::singular_gram,
                        "pushout kernel depends on the fiber representative");
        for (std::size_t s = 0; s < ns; ++s) {
            if (data.fibers[s].empty()) continue;
            out.gram(s, t) = PK(data.fibers[s].front(), x0);
        }
    }
    validate_kernel(out);
    return out;
}

// Exposed for the projection property checks (P^2 = P, K^{-1}-self-adjoint).
inline cmatrix pushout_projection_matrix(const sampled_kernel& k, const label_map& phi) {
    return detail::pushout_projection(k, phi).projection;
}

// ---------------------------------------------------------------------------
// Unitalization and feature maps

// Gram on points + {inf}: 1 everywhere on the border, 1 + K inside.
inline sampled_kernel unitalize_kernel(const sampled_kernel& k,
                                       const std::string& unit_label = "inf") {
    for (const auto& p : k.points)
        require(p != unit_label, errc::duplicate_label,
                "unit label '" + unit_label + "' already present");
    const std::size_t n = k.size();
    sampled_kernel out;
    out.points.push_back(unit_label);
    out.points.insert(out.points.end(), k.points.begin(), k.points.end());
    out.gram = cmatrix(n + 1, n + 1);
    out.gram(0, 0) = cplx(1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        out.gram(0, i + 1) = cplx(1, 0);
        out.gram(i + 1, 0) = cplx(1, 0);
        for (std::size_t j = 0; j < n; ++j) out.gram(i + 1, j + 1) = cplx(1, 0) + k.gram(i, j);
    }
    validate_kernel(out);
    return out;
}

// K_ij = <phi(x_j) | phi(x_i)> for feature vectors in C^m.
inline sampled_kernel feature_map_kernel(const std::vector<std::string>& labels,
                                         const std::vector<std::vector<cplx>>& features) {
    require(labels.size() == features.size(), errc::dimension_mismatch, "label count");
    const std::size_t n = features.size();
    for (const auto& f : features)
        require(f.size() == features.front().size(), errc::dimension_mismatch,
                "feature vectors must share one dimension");
    sampled_kernel out;
    out.points = labels;
    out.gram = cmatrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx s(0, 0);
            for (std::size_t l = 0; l < features[i].size(); ++l)
                s += std::conj(features[j][l]) * features[i][l];
            out.gram(i, j) = s;
        }
    validate_kernel(out);
    return out;
}

// ---------------------------------------------------------------------------
// Metric diagnostics

struct metric_table {
    std::vector<std::vector<double>> points;
    std::vector<double> kappa;              // k(x,x)
    std::vector<std::vector<double>> dist;  // d(x,y) = |k_x - k_y|
    double kappa_residual = 0.0;            // max |kappa(x) - kappa(0)|
};

inline metric_table metric_diagnostics(const weight& w, const dual_lattice& on,
                                       const std::vector<std::vector<double>>& xs) {
    metric_table t;
    t.points = xs;
    const std::size_t n = xs.size();
    std::vector<spectral_fn> sections;
    sections.reserve(n);
    for (const auto& x : xs) sections.push_back(kernel_section(w, on, x));
    t.kappa.resize(n);
    for (std::size_t i = 0; i < n; ++i) t.kappa[i] = inner(sections[i], sections[i]).real();

    std::vector<double> origin(std::size_t(on.dim), 0.0);
    const double kappa0 = inner(kernel_section(w, on, origin), kernel_section(w, on, origin)).real();
    for (double kx : t.kappa) t.kappa_residual = std::max(t.kappa_residual, std::fabs(kx - kappa0));

    t.dist.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double d2 = t.kappa[i] + t.kappa[j] - 2.0 * inner(sections[i], sections[j]).real();
            t.dist[i][j] = std::sqrt(std::max(d2, 0.0));
        }
    return t;
}

} // namespace rkha
