#include <doctest.h>

#include "rkha/linalg.hpp"
#include "rkha/util.hpp"

using namespace rkha;

namespace {

cmatrix random_hermitian(std::size_t n, rng& r) {
    cmatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = cplx(r.normal(), 0.0);
        for (std::size_t j = i + 1; j < n; ++j) {
            a(i, j) = r.cnormal();
            a(j, i) = std::conj(a(i, j));
        }
    }
    return a;
}

cmatrix random_psd(std::size_t n, rng& r, double ridge = 0.0) {
    cmatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g(i, j) = r.cnormal();
    cmatrix a = g.adjoint() * g;
    for (std::size_t i = 0; i < n; ++i) a(i, i) += ridge;
    return a;
}

} // namespace

TEST_CASE("hermitian eigendecomposition reconstructs the matrix") {
    rng r(42);
    for (std::size_t n : {std::size_t(1), std::size_t(2), std::size_t(3), std::size_t(6),
                          std::size_t(10)}) {
        cmatrix a = random_hermitian(n, r);
        auto e = hermitian_eig(a);
        for (std::size_t i = 1; i < n; ++i) CHECK(e.values[i] >= e.values[i - 1]);
        const double scale = std::max(a.max_abs(), 1.0);
        for (std::size_t k = 0; k < n; ++k) {
            std::vector<cplx> v(n);
            for (std::size_t i = 0; i < n; ++i) v[i] = e.vectors(i, k);
            auto av = a.apply(v);
            for (std::size_t i = 0; i < n; ++i)
                CHECK(std::abs(av[i] - e.values[k] * v[i]) < 1e-12 * scale);
        }
        cmatrix vv = e.vectors.adjoint() * e.vectors;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                CHECK(std::abs(vv(i, j) - (i == j ? cplx(1, 0) : cplx(0, 0))) < 1e-13);
    }
}

TEST_CASE("psd matrices have nonnegative spectrum") {
    rng r(7);
    for (int t = 0; t < 5; ++t) {
        cmatrix a = random_psd(5, r);
        CHECK(min_eigenvalue(a) >= -1e-12 * a.trace_real());
    }
}

TEST_CASE("pseudo-inverse of a full-rank matrix is the inverse") {
    rng r(3);
    cmatrix a = random_psd(4, r, 0.5);
    cmatrix p = pseudo_inverse(a);
    cmatrix id = a * p;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(std::abs(id(i, j) - (i == j ? cplx(1, 0) : cplx(0, 0))) < 1e-11);
}

TEST_CASE("pseudo-inverse treats tiny eigenvalues as zero") {
    // rank-1 kernel v v^dagger: pinv = v v^dagger / |v|^4
    cmatrix a(2, 2);
    const cplx v0(1.0, 0.0), v1(0.0, 2.0);
    a(0, 0) = v0 * std::conj(v0);
    a(0, 1) = v0 * std::conj(v1);
    a(1, 0) = v1 * std::conj(v0);
    a(1, 1) = v1 * std::conj(v1);
    cmatrix p = pseudo_inverse(a);
    const double n4 = 25.0; // (1 + 4)^2
    CHECK(std::abs(p(0, 0) - a(0, 0) / n4) < 1e-13);
    CHECK(std::abs(p(1, 1) - a(1, 1) / n4) < 1e-13);
    CHECK(std::abs(p(0, 1) - a(0, 1) / n4) < 1e-13);
}

TEST_CASE("lu solves against multiplication") {
    rng r(9);
    for (int t = 0; t < 5; ++t) {
        cmatrix a = random_psd(6, r, 0.3);
        std::vector<cplx> x(6);
        for (auto& z : x) z = r.cnormal();
        auto b = a.apply(x);
        lu_decomposition lu(a);
        REQUIRE(!lu.singular());
        auto xs = lu.solve(b);
        for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(xs[i] - x[i]) < 1e-10);
    }
}

TEST_CASE("lu flags singular systems") {
    cmatrix a(2, 2);
    a(0, 0) = cplx(1, 0);
    a(0, 1) = cplx(2, 0);
    a(1, 0) = cplx(2, 0);
    a(1, 1) = cplx(4, 0);
    lu_decomposition lu(a);
    CHECK(lu.singular());
}

TEST_CASE("quadratic form is real and nonnegative on psd matrices") {
    rng r(11);
    cmatrix a = random_psd(4, r, 0.1);
    std::vector<cplx> v(4);
    for (auto& z : v) z = r.cnormal();
    CHECK(quadratic_form(a, v) >= 0.0);
}
