#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rkha/errors.hpp"
#include "rkha/util.hpp"

namespace rkha {

// Dense row-major complex matrix. Gram matrices in this toolkit are small
// (tens of points), so a compact self-contained implementation beats an
// external dependency.
class cmatrix {
public:
    cmatrix() = default;
    cmatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), m_(rows * cols, cplx(0, 0)) {}

    static cmatrix identity(std::size_t n) {
        cmatrix I(n, n);
        for (std::size_t i = 0; i < n; ++i) I(i, i) = cplx(1, 0);
        return I;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return m_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return m_[i * cols_ + j]; }

    const std::vector<cplx>& data() const { return m_; }
    std::vector<cplx>& data() { return m_; }

    cmatrix adjoint() const {
        cmatrix a(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) a(j, i) = std::conj((*this)(i, j));
        return a;
    }

    friend cmatrix operator*(const cmatrix& a, const cmatrix& b) {
        require(a.cols_ == b.rows_, errc::dimension_mismatch, "matrix product shape");
        cmatrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx(0, 0)) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend cmatrix operator-(const cmatrix& a, const cmatrix& b) {
        require(a.rows_ == b.rows_ && a.cols_ == b.cols_, errc::dimension_mismatch, "shape");
        cmatrix c = a;
        for (std::size_t i = 0; i < c.m_.size(); ++i) c.m_[i] -= b.m_[i];
        return c;
    }

    friend cmatrix operator+(const cmatrix& a, const cmatrix& b) {
        require(a.rows_ == b.rows_ && a.cols_ == b.cols_, errc::dimension_mismatch, "shape");
        cmatrix c = a;
        for (std::size_t i = 0; i < c.m_.size(); ++i) c.m_[i] += b.m_[i];
        return c;
    }

    std::vector<cplx> apply(const std::vector<cplx>& v) const {
        require(v.size() == cols_, errc::dimension_mismatch, "matrix-vector shape");
        std::vector<cplx> out(rows_, cplx(0, 0));
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
        return out;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& z : m_) m = std::max(m, std::abs(z));
        return m;
    }

    double trace_real() const {
        double t = 0.0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i).real();
        return t;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cplx> m_;
};

inline double hermiticity_residual(const cmatrix& a) {
    double r = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r = std::max(r, std::abs(a(i, j) - std::conj(a(j, i))));
    return r;
}

struct eig_result {
    std::vector<double> values; // ascending
    cmatrix vectors;            // columns are eigenvectors
};

// Cyclic complex Jacobi for Hermitian matrices. Deterministic sweeps,
// accuracy at the level of a few ulps of |A| for the sizes used here.
inline eig_result hermitian_eig(const cmatrix& a0) {
    require(a0.rows() == a0.cols(), errc::dimension_mismatch, "eigensolver needs a square matrix");
    const std::size_t n = a0.rows();
    cmatrix a = a0;
    cmatrix v = cmatrix::identity(n);
    if (n == 0) return {{}, v};

    const double scale = std::max(a.max_abs(), 1e-300);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
        if (off <= 1e-15 * scale) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag <= 1e-18 * scale) continue;
                const cplx w = apq / mag; // phase
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                // real rotation angle for [[app, mag],[mag, aqq]]; with
                // U = [[c, -s w],[s conj(w), c]] the zeroing condition reads
                // t^2 - 2 tau t - 1 = 0, stable root below
                const double tau = (aqq - app) / (2.0 * mag);
                const double t = (tau >= 0.0 ? -1.0 : 1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // U = [[c, -s w],[s conj(w), c]] acting on columns (p, q)
                for (std::size_t i = 0; i < n; ++i) {
                    const cplx aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip + s * std::conj(w) * aiq;
                    a(i, q) = -s * w * aip + c * aiq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const cplx apj = a(p, j), aqj = a(q, j);
                    a(p, j) = c * apj + s * w * aqj;
                    a(q, j) = -s * std::conj(w) * apj + c * aqj;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const cplx vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip + s * std::conj(w) * viq;
                    v(i, q) = -s * w * vip + c * viq;
                }
                a(p, q) = cplx(0, 0);
                a(q, p) = cplx(0, 0);
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i).real();
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return diag[x] < diag[y]; });

    eig_result res;
    res.values.resize(n);
    res.vectors = cmatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        res.values[j] = diag[order[j]];
        for (std::size_t i = 0; i < n; ++i) res.vectors(i, j) = v(i, order[j]);
    }
    return res;
}

inline double min_eigenvalue(const cmatrix& hermitian) {
    auto e = hermitian_eig(hermitian);
    return e.values.empty() ? 0.0 : e.values.front();
}

// Spectral pseudo-inverse of a Hermitian matrix; eigenvalues below
// rel_cutoff * max|eigenvalue| count as zero.
inline cmatrix pseudo_inverse(const cmatrix& hermitian, double rel_cutoff = 1e-12) {
    auto e = hermitian_eig(hermitian);
    const std::size_t n = hermitian.rows();
    double emax = 0.0;
    for (double x : e.values) emax = std::max(emax, std::fabs(x));
    cmatrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        if (std::fabs(e.values[k]) <= rel_cutoff * emax || e.values[k] == 0.0) continue;
        const double inv = 1.0 / e.values[k];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                out(i, j) += inv * e.vectors(i, k) * std::conj(e.vectors(j, k));
    }
    return out;
}

// v^dagger M v for Hermitian M: the imaginary part is rounding noise
inline double quadratic_form(const cmatrix& m, const std::vector<cplx>& v) {
    auto mv = m.apply(v);
    cplx s(0, 0);
    for (std::size_t i = 0; i < v.size(); ++i) s += std::conj(v[i]) * mv[i];
    return s.real();
}

// LU decomposition with partial pivoting; this is the independent solve route
// used by the verification oracles.
class lu_decomposition {
public:
    explicit lu_decomposition(const cmatrix& a) : n_(a.rows()), lu_(a), perm_(a.rows()) {
        require(a.rows() == a.cols(), errc::dimension_mismatch, "LU needs a square matrix");
        std::iota(perm_.begin(), perm_.end(), std::size_t(0));
        for (std::size_t k = 0; k < n_; ++k) {
            std::size_t piv = k;
            double best = std::abs(lu_(k, k));
            for (std::size_t i = k + 1; i < n_; ++i)
                if (std::abs(lu_(i, k)) > best) {
                    best = std::abs(lu_(i, k));
                    piv = i;
                }
            if (best == 0.0) {
                singular_ = true;
                return;
            }
            if (piv != k) {
                for (std::size_t j = 0; j < n_; ++j) std::swap(lu_(k, j), lu_(piv, j));
                std::swap(perm_[k], perm_[piv]);
            }
            for (std::size_t i = k + 1; i < n_; ++i) {
                lu_(i, k) /= lu_(k, k);
                const cplx f = lu_(i, k);
                for (std::size_t j = k + 1; j < n_; ++j) lu_(i, j) -= f * lu_(k, j);
            }
        }
    }

    bool singular() const { return singular_; }

    std::vector<cplx> solve(const std::vector<cplx>& b) const {
        require(!singular_, errc::singular_gram, "singular system");
        require(b.size() == n_, errc::dimension_mismatch, "rhs size");
        std::vector<cplx> x(n_);
        for (std::size_t i = 0; i < n_; ++i) x[i] = b[perm_[i]];
        for (std::size_t i = 1; i < n_; ++i)
            for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
        for (std::size_t ii = n_; ii-- > 0;) {
            for (std::size_t j = ii + 1; j < n_; ++j) x[ii] -= lu_(ii, j) * x[j];
            x[ii] /= lu_(ii, ii);
        }
        return x;
    }

private:
    std::size_t n_;
    cmatrix lu_;
    std::vector<std::size_t> perm_;
    bool singular_ = false;
};

} // namespace rkha
