#pragma once

#include <vector>

#include "rkha/errors.hpp"
#include "rkha/lattice.hpp"
#include "rkha/linalg.hpp"

namespace rkha::verify {

// Plain O(N^2) discrete convolution, ascending index order, no transform, no
// pairing tricks. This is the reference every convolution path is checked
// against; it must stay independent of the main engine.
inline lattice_array oracle_convolution(const lattice_array& a, const lattice_array& b,
                                        int out_radius) {
    require(a.lattice.same_geometry(b.lattice), errc::lattice_kind_mismatch,
            "oracle inputs live on different lattices");
    dual_lattice out_lat = a.lattice;
    out_lat.radius = out_radius;
    lattice_array out(out_lat);

    const int d = a.lattice.dim;
    std::vector<int> g, al;
    std::vector<int> diff(std::size_t(d), 0);
    for (std::size_t of = 0; of < out.values.size(); ++of) {
        out_lat.unflatten(of, g);
        cplx s(0, 0);
        for (std::size_t af = 0; af < a.values.size(); ++af) {
            a.lattice.unflatten(af, al);
            bool ok = true;
            for (int i = 0; i < d; ++i) {
                diff[std::size_t(i)] = g[std::size_t(i)] - al[std::size_t(i)];
                if (std::abs(diff[std::size_t(i)]) > b.lattice.radius) ok = false;
            }
            if (!ok) continue;
            s += a.values[af] * b.values[b.lattice.flatten(diff)];
        }
        out.values[of] = s * a.lattice.node_measure();
    }
    return out;
}

// Minimal-norm extension by constrained elimination: minimize |f|_H^2 over
// f in span{k_x : x in X} subject to f(x_{phi(s)}) = values_s. Solved through
// the Lagrange system on the distinct constrained rows with an LU factor,
// which keeps this route independent of the spectral pseudo-inverse used by
// the pullback norm.
inline double oracle_min_norm_extension(const cmatrix& K, const std::vector<std::size_t>& phi,
                                        const std::vector<cplx>& values) {
    require(phi.size() == values.size(), errc::dimension_mismatch, "phi/value count");
    const std::size_t m = K.rows();

    // collapse duplicate targets; conflicting values are infeasible
    std::vector<std::size_t> targets;
    std::vector<cplx> rhs;
    for (std::size_t s = 0; s < phi.size(); ++s) {
        require(phi[s] < m, errc::phi_out_of_range, "phi target outside the sample");
        bool found = false;
        for (std::size_t t = 0; t < targets.size(); ++t) {
            if (targets[t] == phi[s]) {
                require(std::abs(rhs[t] - values[s]) <= 1e-9 * (1.0 + std::abs(rhs[t])),
                        errc::infeasible_constraints, "conflicting values on one fiber");
                found = true;
                break;
            }
        }
        if (!found) {
            targets.push_back(phi[s]);
            rhs.push_back(values[s]);
        }
    }
    const std::size_t r = targets.size();
    if (r == 0) return 0.0;

    // stationarity gives coefficients supported on the constrained rows with
    // K_JJ mu = v; the minimum value is v^dagger mu
    cmatrix kjj(r, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) kjj(i, j) = K(targets[i], targets[j]);
    lu_decomposition lu(kjj);
    require(!lu.singular(), errc::singular_gram, "degenerate constraint system");
    auto mu = lu.solve(rhs);
    cplx val(0, 0);
    for (std::size_t i = 0; i < r; ++i) val += std::conj(rhs[i]) * mu[i];
    return val.real();
}

// Independent inner-product route: plain descending-order long double sums.
inline cplx oracle_weighted_inner(const std::vector<cplx>& f, const std::vector<cplx>& g,
                                  const std::vector<double>& lam, double measure) {
    require(f.size() == g.size() && f.size() == lam.size(), errc::dimension_mismatch, "sizes");
    long double re = 0.0L, im = 0.0L;
    for (std::size_t i = f.size(); i-- > 0;) {
        const cplx t = f[i] * std::conj(g[i]);
        re += (long double)(t.real()) / lam[i];
        im += (long double)(t.imag()) / lam[i];
    }
    return {double(re * measure), double(im * measure)};
}

} // namespace rkha::verify
