#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of these call into the library's numerics.

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "ahilb/graded.hpp"
#include "ahilb/integer_lattice.hpp"
#include "ahilb/matrix.hpp"
#include "ahilb/toric.hpp"

namespace ahilb::oracle {

inline IntVector unit(std::size_t dim, std::size_t i) {
    IntVector v(dim);
    v[i] = 1;
    return v;
}

// Indices of degree-n monomials whose total degree in `vars` is at least l.
inline std::set<std::size_t> monomials_in_power(const GradedAlgebra& a, const std::vector<int>& vars, int l, int n) {
    std::set<std::size_t> out;
    const auto basis = a.basis(n);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        int d = 0;
        for (int v : vars) d += basis[i][v];
        if (d >= l) out.insert(i);
    }
    return out;
}

inline IntMatrix span_of(const std::set<std::size_t>& idx, std::size_t dim) {
    IntMatrix m(0, dim);
    for (std::size_t i : idx) m.append_row(unit(dim, i));
    return hermite_normal_form(m);
}

// Fraction-free Bareiss elimination with row pivoting.
inline Rational determinant(RationalMatrix m) {
    const std::size_t n = m.rows();
    Rational sign = 1, prev = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && m(p, k) == 0) ++p;
        if (p == n) return 0;
        if (p != k) {
            m.swap_rows(p, k);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
        prev = m(k, k);
    }
    return n == 0 ? Rational(1) : sign * m(n - 1, n - 1);
}

inline double log_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

// N! prod a_i! / (n+N)!: Fubini-Study L2 norm squared of x^a.
inline double fs_entry(const std::vector<int>& a) {
    const int N = static_cast<int>(a.size()) - 1;
    int n = 0;
    double s = log_factorial(N);
    for (int x : a) {
        n += x;
        s += log_factorial(x);
    }
    return std::exp(s - log_factorial(n + N));
}

// Gauss-Legendre nodes on [0,1] by Newton iteration on P_m.
inline void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
    x.assign(m, 0.0);
    w.assign(m, 0.0);
    const double pi = std::acos(-1.0);
    for (int i = 0; i < m; ++i) {
        double z = std::cos(pi * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= m; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::fabs(dz) < 1e-16) break;
        }
        x[i] = 0.5 * (1.0 - z);
        w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
}

// Fubini-Study Gram entry of x0^(n-a) x1^a on P^1 as a log-coordinate
// integral: int exp(2at) (1+e^{2t})^{-n} dnu, dnu = 2 e^{2t}/(1+e^{2t})^2 dt,
// by composite Simpson on [-L, L].
inline double fs_p1_quadrature(int n, int a, double L = 40.0, int intervals = 40000) {
    const double h = 2.0 * L / intervals;
    auto f = [&](double t) {
        const double lse = t > 0 ? 2.0 * t + std::log1p(std::exp(-2.0 * t)) : std::log1p(std::exp(2.0 * t));
        return 2.0 * std::exp(2.0 * a * t + 2.0 * t - (n + 2.0) * lse);
    };
    double s = f(-L) + f(L);
    for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(-L + i * h);
    return s * h / 3.0;
}

// Same on P^2 in moment coordinates: the normalized FS measure pushes
// forward to the uniform measure on the simplex, handled by a Duffy map.
inline double fs_p2_quadrature(const std::vector<int>& a, int m = 40) {
    std::vector<double> x, w;
    gauss_legendre(m, x, w);
    double s = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const double u = x[i], v = x[j] * (1.0 - x[i]);
            const double jac = 1.0 - x[i];
            s += w[i] * w[j] * jac * std::pow(1.0 - u - v, a[0]) * std::pow(u, a[1]) * std::pow(v, a[2]);
        }
    return 2.0 * s;
}

// log sum_k exp(-pi k^2 / s2) for the rank-one lattice with Gram [[1/s2]].
inline double theta_rank_one(double gram) {
    double s = 0.0;
    for (int k = -200; k <= 200; ++k) s += std::exp(-std::acos(-1.0) * gram * k * k);
    return std::log(s);
}

// Slope-clipped lower envelope at each node: max over slopes s in [lo, hi]
// of min_j (phi_j + s (t_i - t_j)). The inner function is concave
// piecewise linear in s, so its maximum sits at a breakpoint or an endpoint.
inline std::vector<double> envelope_1d(const std::vector<double>& t, const std::vector<double>& phi, double lo,
                                       double hi) {
    std::vector<double> candidates{lo, hi};
    for (std::size_t j = 0; j < t.size(); ++j)
        for (std::size_t k = j + 1; k < t.size(); ++k) {
            const double s = (phi[k] - phi[j]) / (t[k] - t[j]);
            if (s > lo && s < hi) candidates.push_back(s);
        }
    std::vector<double> out(t.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < t.size(); ++i)
        for (double s : candidates) {
            double m = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < t.size(); ++j) m = std::min(m, phi[j] + s * (t[i] - t[j]));
            out[i] = std::max(out[i], m);
        }
    return out;
}

}  // namespace ahilb::oracle
