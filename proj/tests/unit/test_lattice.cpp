#include <doctest.h>

#include "rkha/lattice.hpp"
#include "rkha/oracles.hpp"
#include "rkha/util.hpp"

using namespace rkha;

namespace {

lattice_array random_array(const dual_lattice& lat, rng& r) {
    lattice_array a(lat);
    for (auto& z : a.values) z = r.cnormal();
    return a;
}

double max_rel_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double scale = 0.0;
    for (const auto& z : a) scale = std::max(scale, std::abs(z));
    for (const auto& z : b) scale = std::max(scale, std::abs(z));
    if (scale == 0.0) return 0.0;
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m / scale;
}

} // namespace

TEST_CASE("lattice geometry and enlarge") {
    auto z = make_integer_lattice(1, 32);
    CHECK(z.node_count() == 65);
    CHECK(z.node_measure() == 1.0);
    CHECK(enlarge(z, 2).radius == 64);
    CHECK(enlarge(z, 1) == z);

    auto g = make_scaled_grid(1, 0.1, 50);
    CHECK(enlarge(g, 2).radius == 100);
    CHECK(g.node_measure() == doctest::Approx(0.1));

    auto g2 = make_scaled_grid(2, 0.5, 3);
    CHECK(g2.node_count() == 49);
    CHECK(g2.node_measure() == doctest::Approx(0.25));

    std::vector<int> idx{-3, 2};
    CHECK(g2.flatten(idx) == std::size_t(0 * 7 + 5));
    std::vector<int> back;
    g2.unflatten(g2.flatten(idx), back);
    CHECK(back == idx);
}

TEST_CASE("delta convolution identity") {
    auto lat = make_integer_lattice(1, 4);
    lattice_array d(lat);
    d.at({0}) = 1.0;
    auto c = convolve(d, d, 2);
    for (int k = -2; k <= 2; ++k)
        CHECK(c.at({k}) == (k == 0 ? cplx(1, 0) : cplx(0, 0)));
}

TEST_CASE("indicator self-convolution is the triangle") {
    auto lat = make_integer_lattice(1, 4);
    lattice_array a(lat);
    for (int k = -1; k <= 1; ++k) a.at({k}) = 1.0;
    auto c = convolve(a, a, 2);
    const double expect[5] = {1, 2, 3, 2, 1};
    for (int k = -2; k <= 2; ++k) CHECK(c.at({k}).real() == expect[k + 2]);
}

TEST_CASE("convolution preconditions") {
    auto lat = make_integer_lattice(1, 8);
    lattice_array a(lat), b(lat);
    CHECK_THROWS_AS((void)convolve(a, b, 5), error);
    lattice_array c(make_scaled_grid(1, 0.5, 8));
    CHECK_THROWS_AS((void)convolve(a, c, 2), error);
    lattice_array d(make_integer_lattice(1, 4));
    CHECK_THROWS_AS((void)convolve(a, d, 2), error);
}

TEST_CASE("direct path agrees with the O(N^2) oracle on random input") {
    rng r(42);
    for (int trial = 0; trial < 10; ++trial) {
        auto lat = make_integer_lattice(1, 32);
        auto a = random_array(lat, r);
        auto b = random_array(lat, r);
        auto c = convolve_direct(a, b, 16);
        auto o = verify::oracle_convolution(a, b, 16);
        CHECK(max_rel_diff(c.values, o.values) < 1e-12);
    }
    // two-dimensional case with grid measure
    for (int trial = 0; trial < 3; ++trial) {
        auto lat = make_scaled_grid(2, 0.25, 6);
        auto a = random_array(lat, r);
        auto b = random_array(lat, r);
        auto c = convolve_direct(a, b, 3);
        auto o = verify::oracle_convolution(a, b, 3);
        CHECK(max_rel_diff(c.values, o.values) < 1e-12);
    }
}

TEST_CASE("transform path agrees with direct to 1e-12 at radius <= 64") {
    rng r(7);
    auto lat = make_integer_lattice(1, 64);
    auto a = random_array(lat, r);
    auto b = random_array(lat, r);
    auto c1 = convolve_direct(a, b, 32);
    auto c2 = convolve_fft(a, b, 32);
    CHECK(max_rel_diff(c1.values, c2.values) < 1e-12);

    auto lat2 = make_scaled_grid(2, 0.5, 8);
    auto a2 = random_array(lat2, r);
    auto b2 = random_array(lat2, r);
    CHECK(max_rel_diff(convolve_direct(a2, b2, 4).values, convolve_fft(a2, b2, 4).values) < 1e-12);
}

TEST_CASE("direct convolution commutes bitwise") {
    rng r(11);
    auto lat = make_integer_lattice(1, 24);
    auto a = random_array(lat, r);
    auto b = random_array(lat, r);
    auto ab = convolve_direct(a, b, 12);
    auto ba = convolve_direct(b, a, 12);
    for (std::size_t i = 0; i < ab.values.size(); ++i) CHECK(ab.values[i] == ba.values[i]);

    auto lat2 = make_scaled_grid(2, 0.3, 5);
    auto a2 = random_array(lat2, r);
    auto b2 = random_array(lat2, r);
    auto ab2 = convolve_direct(a2, b2, 2);
    auto ba2 = convolve_direct(b2, a2, 2);
    for (std::size_t i = 0; i < ab2.values.size(); ++i) CHECK(ab2.values[i] == ba2.values[i]);
}

TEST_CASE("convolution is bilinear") {
    rng r(19);
    auto lat = make_integer_lattice(1, 16);
    auto a = random_array(lat, r);
    auto b = random_array(lat, r);
    auto c = random_array(lat, r);
    const cplx s(0.7, -0.3);
    lattice_array combo(lat);
    for (std::size_t i = 0; i < combo.values.size(); ++i)
        combo.values[i] = a.values[i] + s * b.values[i];
    auto lhs = convolve(combo, c, 8);
    auto ca = convolve(a, c, 8);
    auto cb = convolve(b, c, 8);
    for (std::size_t i = 0; i < lhs.values.size(); ++i)
        CHECK(std::abs(lhs.values[i] - (ca.values[i] + s * cb.values[i])) <
              1e-13 * std::max(1.0, std::abs(lhs.values[i])));
}

TEST_CASE("transform convolution commutes to 1e-14") {
    rng r(13);
    auto lat = make_integer_lattice(1, 48);
    auto a = random_array(lat, r);
    auto b = random_array(lat, r);
    auto ab = convolve_fft(a, b, 24);
    auto ba = convolve_fft(b, a, 24);
    CHECK(max_rel_diff(ab.values, ba.values) < 1e-14);
}

TEST_CASE("subexp tabulation convolved at gamma=0 matches the double-loop oracle") {
    // lambda(k) = exp(-sqrt|k|) tabulated on radius 128, convolved to radius 64
    auto lat = make_integer_lattice(1, 128);
    lattice_array lam(lat);
    for (int k = -128; k <= 128; ++k) lam.at({k}) = std::exp(-std::sqrt(double(std::abs(k))));
    auto c = convolve(lam, lam, 64);
    auto o = verify::oracle_convolution(lam, lam, 64);
    const double at0 = c.at({0}).real();
    CHECK(std::fabs(at0 - o.at({0}).real()) <= 1e-12 * std::fabs(at0));
    // frozen reference from the independent double-loop scan
    CHECK(at0 == doctest::Approx(1.5628923988777137).epsilon(1e-13));
}

TEST_CASE("radius-zero lattice convolves as scalar arithmetic") {
    auto lat = make_integer_lattice(1, 0);
    lattice_array a(lat);
    a.values[0] = cplx(2.0, 0.0);
    auto c = convolve(a, a, 0);
    CHECK(c.values[0] == cplx(4.0, 0.0));
}
