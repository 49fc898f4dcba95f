#include "ahilb/integer_lattice.hpp"

#include <cmath>

#include "ahilb/errors.hpp"

namespace ahilb {

double log_abs(const BigInt& z) {
    if (z == 0) return -HUGE_VAL;
    long exponent = 0;
    const double mantissa = mpz_get_d_2exp(&exponent, z.get_mpz_t());
    return std::log(std::fabs(mantissa)) + static_cast<double>(exponent) * std::log(2.0);
}

double log_abs(const Rational& q) { return log_abs(BigInt(q.get_num())) - log_abs(BigInt(q.get_den())); }

namespace {

BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

// row_i -= q * row_r
void sub_row(IntMatrix& m, std::size_t i, std::size_t r, const BigInt& q) {
    if (q == 0) return;
    for (std::size_t j = 0; j < m.cols(); ++j)
        if (m(r, j) != 0) m(i, j) -= q * m(r, j);
}

bool row_is_zero(const IntMatrix& m, std::size_t i) {
    for (std::size_t j = 0; j < m.cols(); ++j)
        if (m(i, j) != 0) return false;
    return true;
}

}  // namespace

IntMatrix hermite_normal_form(const IntMatrix& generators) {
    IntMatrix h(0, generators.cols());
    for (std::size_t i = 0; i < generators.rows(); ++i)
        if (!row_is_zero(generators, i)) h.append_row(generators.row(i));

    const std::size_t m = h.rows();
    std::size_t r = 0;
    for (std::size_t col = 0; col < h.cols() && r < m; ++col) {
        for (;;) {
            std::size_t best = m;
            for (std::size_t i = r; i < m; ++i) {
                if (h(i, col) == 0) continue;
                if (best == m || abs(h(i, col)) < abs(h(best, col))) best = i;
            }
            if (best == m) break;
            h.swap_rows(r, best);
            bool clean = true;
            for (std::size_t i = r + 1; i < m; ++i) {
                if (h(i, col) == 0) continue;
                sub_row(h, i, r, floor_div(h(i, col), h(r, col)));
                if (h(i, col) != 0) clean = false;
            }
            if (clean) break;
        }
        if (r >= m || h(r, col) == 0) continue;
        if (h(r, col) < 0)
            for (std::size_t j = 0; j < h.cols(); ++j) h(r, j) = -h(r, j);
        for (std::size_t i = 0; i < r; ++i) sub_row(h, i, r, floor_div(h(i, col), h(r, col)));
        ++r;
    }
    h.truncate_rows(r);
    return h;
}

std::vector<std::size_t> pivot_columns(const IntMatrix& hnf) {
    std::vector<std::size_t> pivots;
    pivots.reserve(hnf.rows());
    for (std::size_t i = 0; i < hnf.rows(); ++i) {
        std::size_t j = 0;
        while (j < hnf.cols() && hnf(i, j) == 0) ++j;
        pivots.push_back(j);
    }
    return pivots;
}

std::optional<IntVector> solve_in_hnf(const IntMatrix& basis, std::span<const BigInt> v) {
    if (v.size() != basis.cols()) throw PreconditionError("vector length does not match lattice ambient dimension");
    const auto pivots = pivot_columns(basis);
    IntVector residual(v.begin(), v.end());
    IntVector x(basis.rows());
    for (std::size_t i = 0; i < basis.rows(); ++i) {
        const std::size_t p = pivots[i];
        const BigInt& pivot = basis(i, p);
        if (residual[p] == 0) continue;
        if (!mpz_divisible_p(residual[p].get_mpz_t(), pivot.get_mpz_t())) return std::nullopt;
        x[i] = residual[p] / pivot;
        for (std::size_t j = p; j < basis.cols(); ++j)
            if (basis(i, j) != 0) residual[j] -= x[i] * basis(i, j);
    }
    for (const auto& e : residual)
        if (e != 0) return std::nullopt;
    return x;
}

std::optional<IntMatrix> express_in_basis(const IntMatrix& basis, const IntMatrix& rows) {
    IntMatrix out(rows.rows(), basis.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        auto x = solve_in_hnf(basis, rows.row(i));
        if (!x) return std::nullopt;
        for (std::size_t j = 0; j < x->size(); ++j) out(i, j) = (*x)[j];
    }
    return out;
}

bool lattice_contains(const IntMatrix& big_hnf, const IntMatrix& small) {
    return express_in_basis(big_hnf, small).has_value();
}

std::size_t row_rank(const IntMatrix& m) { return hermite_normal_form(m).rows(); }

SmithForm smith_form(const IntMatrix& full_row_rank) {
    IntMatrix f = full_row_rank;
    const std::size_t k = f.rows();
    const std::size_t m = f.cols();
    IntMatrix w = IntMatrix::identity(m);

    // Column op col_j -= q col_t keeps rowspan(f_orig) = rowspan(f * w) when
    // w applies the inverse operation row_t += q row_j.
    auto col_sub = [&](std::size_t j, std::size_t t, const BigInt& q) {
        if (q == 0) return;
        for (std::size_t i = 0; i < k; ++i)
            if (f(i, t) != 0) f(i, j) -= q * f(i, t);
        for (std::size_t c = 0; c < m; ++c)
            if (w(j, c) != 0) w(t, c) += q * w(j, c);
    };

    for (std::size_t t = 0; t < k; ++t) {
        for (;;) {
            std::size_t bi = k, bj = m;
            for (std::size_t i = t; i < k; ++i)
                for (std::size_t j = t; j < m; ++j) {
                    if (f(i, j) == 0) continue;
                    if (bi == k || abs(f(i, j)) < abs(f(bi, bj))) {
                        bi = i;
                        bj = j;
                    }
                }
            if (bi == k) throw PreconditionError("smith_form expects a full-row-rank matrix");
            f.swap_rows(t, bi);
            f.swap_cols(t, bj);
            w.swap_rows(t, bj);

            bool changed = false;
            for (std::size_t i = t + 1; i < k; ++i) {
                if (f(i, t) == 0) continue;
                sub_row(f, i, t, floor_div(f(i, t), f(t, t)));
                if (f(i, t) != 0) changed = true;
            }
            for (std::size_t j = t + 1; j < m; ++j) {
                if (f(t, j) == 0) continue;
                col_sub(j, t, floor_div(f(t, j), f(t, t)));
                if (f(t, j) != 0) changed = true;
            }
            if (changed) continue;

            std::size_t offender = k;
            for (std::size_t i = t + 1; i < k && offender == k; ++i)
                for (std::size_t j = t + 1; j < m; ++j)
                    if (!mpz_divisible_p(f(i, j).get_mpz_t(), f(t, t).get_mpz_t())) {
                        offender = i;
                        break;
                    }
            if (offender == k) break;
            for (std::size_t j = 0; j < m; ++j) f(t, j) += f(offender, j);
        }
        if (f(t, t) < 0)
            for (std::size_t j = 0; j < m; ++j) f(t, j) = -f(t, j);
    }

    SmithForm out;
    out.diagonal.reserve(k);
    for (std::size_t t = 0; t < k; ++t) out.diagonal.push_back(f(t, t));
    out.adapted_basis = std::move(w);
    return out;
}

IntMatrix Subquotient::free_lift_coordinates() const {
    const std::size_t k = smith.diagonal.size();
    IntMatrix out(0, numerator.rows());
    for (std::size_t i = k; i < smith.adapted_basis.rows(); ++i) out.append_row(smith.adapted_basis.row(i));
    return out;
}

IntMatrix Subquotient::free_lift() const {
    auto coords = free_lift_coordinates();
    if (coords.rows() == 0) return IntMatrix(0, numerator.cols());
    return coords * numerator;
}

BigInt Subquotient::torsion_order() const {
    BigInt order = 1;
    for (const auto& d : torsion) order *= d;
    return order;
}

Subquotient subquotient(const IntMatrix& numerator, const IntMatrix& denominator) {
    Subquotient sq;
    sq.numerator = hermite_normal_form(numerator);
    sq.denominator = hermite_normal_form(denominator);
    if (sq.denominator.cols() != sq.numerator.cols() && sq.denominator.rows() > 0)
        throw PreconditionError("subquotient lattices live in different ambient spaces");
    auto coords = express_in_basis(sq.numerator, sq.denominator);
    if (!coords) throw PreconditionError("subquotient denominator is not contained in the numerator");
    sq.denominator_in_numerator = std::move(*coords);
    if (sq.denominator_in_numerator.rows() == 0) {
        sq.smith.adapted_basis = IntMatrix::identity(sq.numerator.rows());
    } else {
        sq.smith = smith_form(sq.denominator_in_numerator);
    }
    sq.free_rank = sq.numerator.rows() - sq.denominator.rows();
    for (const auto& d : sq.smith.diagonal)
        if (d > 1) sq.torsion.push_back(d);
    return sq;
}

BigInt determinant(const IntMatrix& m) {
    if (m.rows() != m.cols()) throw PreconditionError("determinant of a non-square matrix");
    const std::size_t n = m.rows();
    if (n == 0) return 1;
    IntMatrix a = m;
    BigInt sign = 1;
    BigInt prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && a(p, k) == 0) ++p;
            if (p == n) return 0;
            a.swap_rows(k, p);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j));
                mpz_divexact(a(i, j).get_mpz_t(), a(i, j).get_mpz_t(), prev.get_mpz_t());
            }
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

IntMatrix unimodular_inverse(const IntMatrix& m) {
    if (m.rows() != m.cols()) throw PreconditionError("inverse of a non-square matrix");
    const std::size_t n = m.rows();
    RationalMatrix a = convert<Rational>(m);
    RationalMatrix inv = RationalMatrix::identity(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && a(p, k) == 0) ++p;
        if (p == n) throw PreconditionError("matrix is singular");
        a.swap_rows(k, p);
        inv.swap_rows(k, p);
        const Rational pivot = a(k, k);
        for (std::size_t j = 0; j < n; ++j) {
            a(k, j) /= pivot;
            inv(k, j) /= pivot;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k || a(i, k) == 0) continue;
            const Rational f = a(i, k);
            for (std::size_t j = 0; j < n; ++j) {
                a(i, j) -= f * a(k, j);
                inv(i, j) -= f * inv(k, j);
            }
        }
    }
    IntMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (inv(i, j).get_den() != 1) throw PreconditionError("matrix is not unimodular");
            out(i, j) = inv(i, j).get_num();
        }
    return out;
}

}  // namespace ahilb
