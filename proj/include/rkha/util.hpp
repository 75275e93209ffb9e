#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

namespace rkha {

using cplx = std::complex<double>;

// Deterministic PRNG (splitmix64). The standard <random> engines are
// specified, but the distributions are not; certification runs must be
// reproducible down to the last bit, so both are hand-rolled here.
class rng {
public:
    explicit rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // standard normal via Box-Muller; second value cached
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    cplx cnormal() {
        double re = normal();
        double im = normal();
        return {re, im};
    }

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// FNV-1a 64-bit digest over raw bytes; used to stamp oracle inputs.
class digest {
public:
    void bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h_ ^= p[i];
            h_ *= 0x100000001b3ULL;
        }
    }
    void f64(double x) { bytes(&x, sizeof x); }
    void i64(std::int64_t x) { bytes(&x, sizeof x); }
    void str(const std::string& s) { bytes(s.data(), s.size()); }
    template <class T>
    void span(const std::vector<T>& v) {
        bytes(v.data(), v.size() * sizeof(T));
    }

    std::uint64_t value() const { return h_; }

    std::string hex() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
        return buf;
    }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

// Doubles are printed with 17 significant digits everywhere so that every
// emitted value round-trips exactly.
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// e^{2*pi*i*t} with t measured in turns. Quarter turns are exact, which keeps
// character products closed on the fourth roots of unity.
inline cplx unit_turn(double t) {
    t -= std::floor(t);
    double q = 4.0 * t;
    if (q == std::floor(q)) {
        switch (int(q)) {
            case 0: return {1.0, 0.0};
            case 1: return {0.0, 1.0};
            case 2: return {-1.0, 0.0};
            case 3: return {0.0, -1.0};
        }
    }
    double a = 6.283185307179586476925286766559 * t;
    return {std::cos(a), std::sin(a)};
}

inline double sqr(double x) { return x * x; }
inline double abs2(cplx z) { return z.real() * z.real() + z.imag() * z.imag(); }

} // namespace rkha
