#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rkha/errors.hpp"
#include "rkha/lattice.hpp"

namespace rkha {

// lambda(gamma) = exp(-tau * sum_i |gamma_i|^p), 0 < p <= 1. For p < 1 these
// weights are subconvolutive and satisfy the GRS and BD conditions; at p = 1
// both asymptotic conditions fail.
struct subexp_family {
    double tau = 1.0;
    double p = 0.5;
};

// Strictly positive weight on a dual lattice: either a closed-form family,
// evaluable at any node, or a tabulated array limited to its lattice.
class weight {
public:
    static weight subexp(const dual_lattice& lat, double tau, double p) {
        require(tau > 0.0, errc::non_positive_weight, "tau must be positive");
        require(p > 0.0 && p <= 1.0, errc::non_positive_weight, "p must lie in (0,1]");
        weight w;
        w.lattice_ = lat;
        w.family_ = subexp_family{tau, p};
        w.symmetric_ = true;
        return w;
    }

    static weight from_table(const dual_lattice& lat, std::vector<double> values) {
        require(values.size() == lat.node_count(), errc::dimension_mismatch,
                "table size does not match lattice");
        for (double v : values)
            require(v > 0.0 && std::isfinite(v), errc::non_positive_weight,
                    "weight table has a non-positive entry");
        weight w;
        w.lattice_ = lat;
        w.table_ = std::make_shared<const std::vector<double>>(std::move(values));
        w.symmetric_ = w.check_symmetry();
        return w;
    }

    const dual_lattice& lattice() const { return lattice_; }
    bool is_family() const { return family_.has_value(); }
    const std::optional<subexp_family>& family() const { return family_; }
    bool symmetric() const { return symmetric_; }

    // |gamma'|_p^p = sum |step*k_i|^p for the given multi-index
    double p_norm_pow(const std::vector<int>& idx) const {
        const double p = family_ ? family_->p : 1.0;
        double s = 0.0;
        for (int i = 0; i < lattice_.dim; ++i)
            s += std::pow(std::fabs(lattice_.step * idx[std::size_t(i)]), p);
        return s;
    }

    double value(const std::vector<int>& idx) const {
        if (family_) return std::exp(-family_->tau * p_norm_pow(idx));
        require(lattice_.in_range(idx), errc::probe_out_of_range,
                "index outside tabulated weight radius");
        return (*table_)[lattice_.flatten(idx)];
    }

    // lambda on every node of `on` (same geometry, any radius for families)
    std::vector<double> tabulate(const dual_lattice& on) const {
        require(on.same_geometry(lattice_), errc::lattice_kind_mismatch,
                "tabulation lattice has different geometry");
        if (!family_)
            require(on.radius <= lattice_.radius, errc::probe_out_of_range,
                    "tabulation radius exceeds table radius");
        std::vector<double> out(on.node_count());
        std::vector<int> idx;
        for (std::size_t f = 0; f < out.size(); ++f) {
            on.unflatten(f, idx);
            out[f] = value(idx);
        }
        return out;
    }

    lattice_array tabulate_array(const dual_lattice& on) const {
        auto v = tabulate(on);
        lattice_array a(on);
        for (std::size_t i = 0; i < v.size(); ++i) a.values[i] = cplx(v[i], 0.0);
        return a;
    }

    bool same_source(const weight& o) const {
        if (!lattice_.same_geometry(o.lattice_)) return false;
        if (family_ && o.family_) return family_->tau == o.family_->tau && family_->p == o.family_->p;
        if (table_ && o.table_) return table_ == o.table_ || *table_ == *o.table_;
        return false;
    }

private:
    weight() = default;

    bool check_symmetry() const {
        std::vector<int> idx, neg;
        for (std::size_t f = 0; f < lattice_.node_count(); ++f) {
            lattice_.unflatten(f, idx);
            neg = idx;
            for (auto& k : neg) k = -k;
            double a = (*table_)[f];
            double b = (*table_)[lattice_.flatten(neg)];
            if (std::fabs(a - b) > 1e-14 * std::max(std::fabs(a), std::fabs(b))) return false;
        }
        return true;
    }

    dual_lattice lattice_;
    std::optional<subexp_family> family_;
    std::shared_ptr<const std::vector<double>> table_;
    bool symmetric_ = true;
};

// ---------------------------------------------------------------------------
// Subconvolutivity

struct subconv_result {
    double constant = 0.0;       // max over |gamma| <= R of (lambda*lambda)(gamma)/lambda(gamma)
    std::vector<int> argmax;     // where the max is attained
    lattice_array self_convolution; // (lambda*lambda) on the output window
};

// C_R computed with the exact doubled-window convolution: lambda is tabulated
// on radius 2R, the self-convolution is evaluated on radius R.
inline subconv_result subconvolutivity_constant(const weight& w, int out_radius) {
    dual_lattice big = w.lattice();
    big.radius = 2 * out_radius;
    if (!w.is_family())
        require(w.lattice().radius >= 2 * out_radius, errc::radius_mismatch,
                "weight table must cover radius 2R");
    lattice_array lam = w.tabulate_array(big);
    lattice_array conv = convolve(lam, lam, out_radius);

    subconv_result res;
    res.self_convolution = conv;
    std::vector<int> idx;
    double best = -1.0;
    for (std::size_t f = 0; f < conv.values.size(); ++f) {
        conv.lattice.unflatten(f, idx);
        double ratio = conv.values[f].real() / w.value(idx);
        if (ratio > best) {
            best = ratio;
            res.argmax = idx;
        }
    }
    res.constant = best;
    return res;
}

// ---------------------------------------------------------------------------
// Asymptotic weight conditions

enum class verdict { holds, fails, inconclusive };

inline const char* verdict_name(verdict v) {
    switch (v) {
        case verdict::holds: return "holds";
        case verdict::fails: return "fails";
        case verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

enum class evidence_kind { analytic, numeric };

inline const char* evidence_name(evidence_kind e) {
    return e == evidence_kind::analytic ? "analytic" : "numeric";
}

struct grs_probe_result {
    std::vector<int> probe;
    std::vector<double> sequence; // a_n = lambda(n*gamma)^{1/n}, n = 1..n_max
    verdict v = verdict::inconclusive;
};

struct grs_report {
    std::vector<grs_probe_result> probes;
    verdict combined = verdict::inconclusive;
    evidence_kind evidence = evidence_kind::numeric;
    int n_max = 0;
    double tol = 0.0;
};

struct bd_probe_result {
    std::vector<int> probe;
    std::vector<double> partial_sums; // S_N = sum_{n<=N} ln(1/lambda(n*gamma))/n^2
    double tail_bound = std::numeric_limits<double>::quiet_NaN();
    verdict v = verdict::inconclusive;
};

struct bd_report {
    std::vector<bd_probe_result> probes;
    verdict combined = verdict::inconclusive;
    evidence_kind evidence = evidence_kind::numeric;
    int n_max = 0;
};

// default probes: the d unit vectors plus the all-ones direction
inline std::vector<std::vector<int>> default_probes(const dual_lattice& lat) {
    std::vector<std::vector<int>> probes;
    if (lat.radius < 1) return probes; // trivial group: no nonzero directions
    for (int i = 0; i < lat.dim; ++i) {
        std::vector<int> e(std::size_t(lat.dim), 0);
        e[std::size_t(i)] = 1;
        probes.push_back(std::move(e));
    }
    if (lat.dim > 1) probes.emplace_back(std::size_t(lat.dim), 1);
    return probes;
}

namespace detail {

inline bool is_zero_probe(const std::vector<int>& g) {
    for (int k : g)
        if (k != 0) return false;
    return true;
}

// numeric verdict rule on a sequence a_n -> ? :
//   holds        if a_{n_max} is within tol of 1 and the last quarter approaches 1 monotonically
//   fails        if the last quarter has stabilized at a level below 1 - tol
//   inconclusive otherwise
inline verdict grs_numeric_verdict(const std::vector<double>& a, double tol) {
    if (a.empty()) return verdict::inconclusive;
    const std::size_t n = a.size();
    const std::size_t q0 = n - std::max<std::size_t>(n / 4, 1);
    bool monotone = true;
    for (std::size_t i = q0 + 1; i < n; ++i)
        if (std::fabs(a[i] - 1.0) > std::fabs(a[i - 1] - 1.0) + 1e-12) monotone = false;
    double spread = 0.0;
    for (std::size_t i = q0; i < n; ++i) spread = std::max(spread, std::fabs(a[i] - a[n - 1]));
    const bool stabilized = spread < tol / 10.0;
    if (std::fabs(a[n - 1] - 1.0) < tol && monotone) return verdict::holds;
    if (stabilized && a[n - 1] < 1.0 - tol) return verdict::fails;
    return verdict::inconclusive;
}

} // namespace detail

inline grs_report grs_check(const weight& w, const std::vector<std::vector<int>>& probes,
                            int n_max, double tol) {
    require(n_max >= 1, errc::probe_out_of_range, "n_max must be positive");
    grs_report rep;
    rep.n_max = n_max;
    rep.tol = tol;
    rep.evidence = w.is_family() ? evidence_kind::analytic : evidence_kind::numeric;

    bool any_fails = false, all_hold = !probes.empty();
    std::vector<int> ng;
    for (const auto& g : probes) {
        require(int(g.size()) == w.lattice().dim, errc::dimension_mismatch, "probe dimension");
        grs_probe_result pr;
        pr.probe = g;
        pr.sequence.reserve(std::size_t(n_max));
        for (int n = 1; n <= n_max; ++n) {
            ng = g;
            for (auto& k : ng) k *= n;
            pr.sequence.push_back(std::pow(w.value(ng), 1.0 / double(n)));
        }
        if (w.is_family() && !detail::is_zero_probe(g)) {
            // a_n = exp(-tau n^{p-1} |gamma|_p^p): converges to 1 iff p < 1
            pr.v = (w.family()->p < 1.0) ? verdict::holds : verdict::fails;
        } else if (detail::is_zero_probe(g)) {
            pr.v = verdict::holds; // lambda(0)^{1/n} -> 1 for any positive weight
        } else {
            pr.v = detail::grs_numeric_verdict(pr.sequence, tol);
        }
        any_fails |= (pr.v == verdict::fails);
        all_hold &= (pr.v == verdict::holds);
        rep.probes.push_back(std::move(pr));
    }
    rep.combined = any_fails ? verdict::fails : (all_hold ? verdict::holds : verdict::inconclusive);
    return rep;
}

inline bd_report bd_check(const weight& w, const std::vector<std::vector<int>>& probes, int n_max) {
    require(n_max >= 1, errc::probe_out_of_range, "n_max must be positive");
    bd_report rep;
    rep.n_max = n_max;
    rep.evidence = w.is_family() ? evidence_kind::analytic : evidence_kind::numeric;

    bool any_fails = false, all_hold = !probes.empty();
    std::vector<int> ng;
    for (const auto& g : probes) {
        require(int(g.size()) == w.lattice().dim, errc::dimension_mismatch, "probe dimension");
        bd_probe_result pr;
        pr.probe = g;
        pr.partial_sums.reserve(std::size_t(n_max));
        double s = 0.0;
        for (int n = 1; n <= n_max; ++n) {
            ng = g;
            for (auto& k : ng) k *= n;
            s += std::log(1.0 / w.value(ng)) / (double(n) * double(n));
            pr.partial_sums.push_back(s);
        }
        if (w.is_family() && !detail::is_zero_probe(g)) {
            const double p = w.family()->p;
            const double gp = w.family()->tau * w.p_norm_pow(g);
            if (p < 1.0) {
                // sum_{n>N} gp n^{p-2} <= gp N^{p-1}/(1-p)
                pr.tail_bound = gp * std::pow(double(n_max), p - 1.0) / (1.0 - p);
                pr.v = verdict::holds;
            } else {
                pr.v = verdict::fails; // terms gp/n: harmonic divergence
            }
        } else if (detail::is_zero_probe(g)) {
            pr.v = verdict::holds;
        } else {
            pr.v = verdict::inconclusive; // finite data cannot certify a tail
        }
        any_fails |= (pr.v == verdict::fails);
        all_hold &= (pr.v == verdict::holds);
        rep.probes.push_back(std::move(pr));
    }
    rep.combined = any_fails ? verdict::fails : (all_hold ? verdict::holds : verdict::inconclusive);
    return rep;
}

// ---------------------------------------------------------------------------
// Full weight report

enum class subconv_verdict { certified, unconfirmed, unbounded };

inline const char* subconv_verdict_name(subconv_verdict v) {
    switch (v) {
        case subconv_verdict::certified: return "certified";
        case subconv_verdict::unconfirmed: return "unconfirmed";
        case subconv_verdict::unbounded: return "unbounded";
    }
    return "?";
}

struct weight_report {
    // subconvolutivity section
    double c_subconv = 0.0;
    std::vector<int> argmax;
    std::vector<std::pair<int, double>> c_convergence; // (radius, C_R) over doublings
    subconv_verdict subconv = subconv_verdict::unconfirmed;
    double stabilization_tol = 1e-6;
    double growth_threshold = 1.2;

    grs_report grs;
    bd_report bd;
};

// Runs the subconvolutivity ladder over radius doublings ending at `radius`,
// plus the GRS/BD analyzers with the default probe set.
inline weight_report analyze_weight(const weight& w, int radius, int grs_n_max = 256,
                                    double grs_tol = 1e-2, int bd_n_max = 256) {
    weight_report rep;
    std::vector<int> ladder;
    for (int r = radius; r >= 1 && int(ladder.size()) < 3; r /= 2) ladder.insert(ladder.begin(), r);
    if (ladder.empty()) ladder.push_back(radius); // radius 0: trivial group
    for (int r : ladder) {
        auto sc = subconvolutivity_constant(w, r);
        rep.c_convergence.emplace_back(r, sc.constant);
        rep.c_subconv = sc.constant;
        rep.argmax = sc.argmax;
    }
    if (rep.c_convergence.size() >= 2) {
        const double last = rep.c_convergence.back().second;
        const double prev = rep.c_convergence[rep.c_convergence.size() - 2].second;
        if (last > prev * rep.growth_threshold)
            rep.subconv = subconv_verdict::unbounded;
        else if (std::fabs(last - prev) < rep.stabilization_tol * std::fabs(prev))
            rep.subconv = subconv_verdict::certified;
        else
            rep.subconv = subconv_verdict::unconfirmed;
    } else {
        rep.subconv = subconv_verdict::certified; // single node: exact
    }

    const auto probes = default_probes(w.lattice());
    // for tables, keep n*probe inside the tabulated radius
    int gmax = grs_n_max, bmax = bd_n_max;
    if (!w.is_family()) {
        gmax = std::min(gmax, w.lattice().radius);
        bmax = std::min(bmax, w.lattice().radius);
    }
    if (!probes.empty() && gmax >= 1) rep.grs = grs_check(w, probes, gmax, grs_tol);
    if (!probes.empty() && bmax >= 1) rep.bd = bd_check(w, probes, bmax);
    return rep;
}

} // namespace rkha
