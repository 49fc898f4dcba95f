#include "ahilb/lattice.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "ahilb/errors.hpp"
#include "ahilb/integer_lattice.hpp"

namespace ahilb {

namespace {

thread_local unsigned g_precision_bits = 128;

unsigned digits10_for(unsigned bits) { return static_cast<unsigned>(std::ceil(bits * std::log10(2.0))) + 1; }

Real to_real(const Rational& q) {
    Real num(q.get_num().get_mpz_t());
    Real den(q.get_den().get_mpz_t());
    return num / den;
}

template <class T>
T from_int(const BigInt& v) {
    if constexpr (std::is_same_v<T, Rational>) return Rational(v);
    else return T(v.get_mpz_t());
}

Real pivot_tolerance() { return boost::multiprecision::ldexp(Real(1), -static_cast<int>(g_precision_bits / 2)); }

bool is_unit_row(const IntMatrix& m, std::size_t i) {
    int ones = 0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        if (m(i, j) == 0) continue;
        if (m(i, j) != 1) return false;
        ++ones;
    }
    return ones == 1;
}

bool coordinate_rows(const IntMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        if (!is_unit_row(m, i)) return false;
    return true;
}

std::size_t unit_index(const IntMatrix& m, std::size_t i) {
    for (std::size_t j = 0; j < m.cols(); ++j)
        if (m(i, j) != 0) return j;
    return m.cols();
}

template <class T>
Matrix<T> congruence(const IntMatrix& basis, const Matrix<T>& g) {
    const std::size_t k = basis.rows();
    const std::size_t m = basis.cols();
    Matrix<T> bg(k, m);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t t = 0; t < m; ++t) {
            if (basis(i, t) == 0) continue;
            const T coeff = from_int<T>(basis(i, t));
            for (std::size_t j = 0; j < m; ++j) bg(i, j) += coeff * g(t, j);
        }
    Matrix<T> out(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            T s(0);
            for (std::size_t t = 0; t < m; ++t)
                if (basis(j, t) != 0) s += bg(i, t) * from_int<T>(basis(j, t));
            out(i, j) = s;
        }
    return out;
}

template <class T>
Matrix<T> principal_submatrix(const Matrix<T>& g, const std::vector<std::size_t>& idx) {
    Matrix<T> out(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) out(i, j) = g(idx[i], idx[j]);
    return out;
}

bool is_zero_pivot(const Rational& p) { return p == 0; }
bool is_zero_pivot(const Real& p) { return abs(p) <= pivot_tolerance(); }

// Schur complement of the leading k x k block of a symmetric PSD matrix.
// Zero pivots (PSD: zero rows) are skipped, which realizes the quotient
// seminorm when the leading block is singular.
template <class T>
Matrix<T> schur_complement(Matrix<T> a, std::size_t k) {
    const std::size_t n = a.rows();
    for (std::size_t p = 0; p < k; ++p) {
        const T pivot = a(p, p);
        if (is_zero_pivot(pivot)) continue;
        for (std::size_t i = p + 1; i < n; ++i) {
            if (a(i, p) == 0) continue;
            const T f = a(i, p) / pivot;
            for (std::size_t j = p + 1; j < n; ++j) a(i, j) -= f * a(p, j);
        }
    }
    Matrix<T> out(n - k, n - k);
    for (std::size_t i = k; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) out(i - k, j - k) = out(j - k, i - k) = a(i, j);
    return out;
}

// log det of a symmetric PSD real matrix; nullopt when singular.
std::optional<Real> real_log_det(const RealMatrix& g) {
    const std::size_t n = g.rows();
    if (is_diagonal(g)) {
        Real s = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (g(i, i) <= 0) return std::nullopt;
            s += log(g(i, i));
        }
        return s;
    }
    RealMatrix a = g;
    Real scale_ref = 0;
    for (std::size_t i = 0; i < n; ++i) scale_ref = std::max(scale_ref, Real(abs(a(i, i))));
    if (scale_ref == 0) return std::nullopt;
    const Real tol = pivot_tolerance() * scale_ref;
    Real s = 0;
    for (std::size_t p = 0; p < n; ++p) {
        const Real pivot = a(p, p);
        if (pivot <= tol) return std::nullopt;
        s += log(pivot);
        for (std::size_t i = p + 1; i < n; ++i) {
            if (a(i, p) == 0) continue;
            const Real f = a(i, p) / pivot;
            for (std::size_t j = p + 1; j < n; ++j) a(i, j) -= f * a(p, j);
        }
    }
    return s;
}

}  // namespace

void set_working_precision(unsigned bits) {
    if (bits < 53) throw PreconditionError("precision must be at least 53 bits");
    g_precision_bits = bits;
    Real::default_precision(digits10_for(bits));
}

unsigned working_precision() { return g_precision_bits; }

PrecisionGuard::PrecisionGuard(unsigned bits) : saved_(g_precision_bits) { set_working_precision(bits); }
PrecisionGuard::~PrecisionGuard() { set_working_precision(saved_); }

Rational determinant(const RationalMatrix& m) {
    if (m.rows() != m.cols()) throw PreconditionError("determinant of a non-square matrix");
    const std::size_t n = m.rows();
    if (is_diagonal(m)) {
        Rational d = 1;
        for (std::size_t i = 0; i < n; ++i) d *= m(i, i);
        return d;
    }
    RationalMatrix a = m;
    Rational det = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && a(p, k) == 0) ++p;
        if (p == n) return 0;
        if (p != k) {
            a.swap_rows(k, p);
            det = -det;
        }
        det *= a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            if (a(i, k) == 0) continue;
            const Rational f = a(i, k) / a(k, k);
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return det;
}

bool is_positive_semidefinite(const RationalMatrix& m) {
    if (!is_symmetric(m)) return false;
    RationalMatrix a = m;
    const std::size_t n = a.rows();
    for (std::size_t p = 0; p < n; ++p) {
        if (a(p, p) < 0) return false;
        if (a(p, p) == 0) {
            for (std::size_t j = p + 1; j < n; ++j)
                if (a(p, j) != 0) return false;
            continue;
        }
        for (std::size_t i = p + 1; i < n; ++i) {
            if (a(i, p) == 0) continue;
            const Rational f = a(i, p) / a(p, p);
            for (std::size_t j = p + 1; j < n; ++j) a(i, j) -= f * a(p, j);
        }
    }
    return true;
}

SeminormedLattice::SeminormedLattice(Gram gram, std::vector<BigInt> torsion, double log_scale)
    : gram_(std::move(gram)), torsion_(std::move(torsion)), log_scale_(log_scale) {
    if (auto* q = std::get_if<RationalMatrix>(&gram_))
        for (std::size_t i = 0; i < q->rows(); ++i)
            for (std::size_t j = 0; j < q->cols(); ++j) {
                if ((*q)(i, j).get_den() == 0) throw PreconditionError("zero denominator in Gram matrix");
                (*q)(i, j).canonicalize();
            }
    std::visit(
        [](const auto& g) {
            if (g.rows() != g.cols()) throw PreconditionError("Gram matrix must be square");
            if (!is_symmetric(g)) throw PreconditionError("Gram matrix must be symmetric");
        },
        gram_);
    for (const auto& t : torsion_)
        if (t < 2) throw PreconditionError("torsion orders must be at least 2");
    if (!std::isfinite(log_scale_)) throw PreconditionError("scale must be finite");
}

SeminormedLattice SeminormedLattice::standard(std::size_t rank) {
    return SeminormedLattice(RationalMatrix::identity(rank));
}

std::size_t SeminormedLattice::rank() const {
    return std::visit([](const auto& g) { return g.rows(); }, gram_);
}

BigInt SeminormedLattice::torsion_order() const {
    BigInt t = 1;
    for (const auto& d : torsion_) t *= d;
    return t;
}

RealMatrix SeminormedLattice::real_gram() const {
    const Real factor = exp(Real(2 * log_scale_));
    if (const auto* q = std::get_if<RationalMatrix>(&gram_)) {
        RealMatrix out(q->rows(), q->cols());
        for (std::size_t i = 0; i < q->rows(); ++i)
            for (std::size_t j = 0; j < q->cols(); ++j)
                if ((*q)(i, j) != 0) out(i, j) = to_real((*q)(i, j)) * factor;
        return out;
    }
    RealMatrix out = std::get<RealMatrix>(gram_);
    if (log_scale_ != 0.0)
        for (std::size_t i = 0; i < out.rows(); ++i)
            for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) *= factor;
    return out;
}

Matrix<double> SeminormedLattice::double_gram() const {
    const RealMatrix r = real_gram();
    Matrix<double> out(r.rows(), r.cols());
    for (std::size_t i = 0; i < r.rows(); ++i)
        for (std::size_t j = 0; j < r.cols(); ++j) out(i, j) = r(i, j).convert_to<double>();
    return out;
}

double ExactChi::value() const {
    switch (kind) {
        case Kind::Zero:
            return 0.0;
        case Kind::Infinite:
            return HUGE_VAL;
        case Kind::Finite:
            return -0.5 * log_abs(covolume_sq) + log_scale_term;
    }
    return 0.0;
}

ExactChi chi_exact(const SeminormedLattice& lattice) {
    const auto* q = std::get_if<RationalMatrix>(&lattice.gram());
    if (!q) throw PreconditionError("exact arithmetic degree requires a rational Gram matrix");
    ExactChi out;
    if (lattice.is_zero()) return out;
    const Rational det = determinant(*q);
    if (det == 0) {
        out.kind = ExactChi::Kind::Infinite;
        return out;
    }
    const BigInt t = lattice.torsion_order();
    out.kind = ExactChi::Kind::Finite;
    out.covolume_sq = det / Rational(t * t);
    out.log_scale_term = -static_cast<double>(lattice.rank()) * lattice.log_scale();
    return out;
}

ExactChi exact_sum(const std::vector<ExactChi>& terms) {
    ExactChi out;
    for (const auto& t : terms) {
        if (t.kind == ExactChi::Kind::Infinite) {
            out.kind = ExactChi::Kind::Infinite;
            return out;
        }
        if (t.kind == ExactChi::Kind::Zero) continue;
        out.kind = ExactChi::Kind::Finite;
        out.covolume_sq *= t.covolume_sq;
        out.log_scale_term += t.log_scale_term;
    }
    return out;
}

bool exact_equal(const ExactChi& a, const ExactChi& b) {
    const bool ai = a.kind == ExactChi::Kind::Infinite, bi = b.kind == ExactChi::Kind::Infinite;
    if (ai || bi) return ai && bi;
    const Rational ca = a.kind == ExactChi::Kind::Zero ? Rational(1) : a.covolume_sq;
    const Rational cb = b.kind == ExactChi::Kind::Zero ? Rational(1) : b.covolume_sq;
    const double scale = std::max({1.0, std::fabs(a.log_scale_term), std::fabs(b.log_scale_term)});
    return ca == cb && std::fabs(a.log_scale_term - b.log_scale_term) <= 1e-12 * scale;
}

double exact_difference(const ExactChi& a, const ExactChi& b) {
    const bool ai = a.kind == ExactChi::Kind::Infinite, bi = b.kind == ExactChi::Kind::Infinite;
    if (ai || bi) return ai && bi ? 0.0 : (ai ? HUGE_VAL : -HUGE_VAL);
    const Rational ca = a.kind == ExactChi::Kind::Zero ? Rational(1) : a.covolume_sq;
    const Rational cb = b.kind == ExactChi::Kind::Zero ? Rational(1) : b.covolume_sq;
    const double scale = a.log_scale_term - b.log_scale_term;
    if (ca == cb) return scale;
    const Rational ratio = ca / cb;
    return -0.5 * log_abs(ratio) + scale;
}

double chi(const SeminormedLattice& lattice) {
    if (lattice.is_zero()) return 0.0;
    const double log_torsion = log_abs(lattice.torsion_order());
    const std::size_t r = lattice.rank();
    if (r == 0) return log_torsion;
    const double scale_term = -static_cast<double>(r) * lattice.log_scale();
    if (const auto* q = std::get_if<RationalMatrix>(&lattice.gram())) {
        if (is_diagonal(*q)) {
            double s = 0.0;
            for (std::size_t i = 0; i < r; ++i) {
                if ((*q)(i, i) == 0) return HUGE_VAL;
                s += log_abs((*q)(i, i));
            }
            return -0.5 * s + log_torsion + scale_term;
        }
        const Rational det = determinant(*q);
        if (det == 0) return HUGE_VAL;
        return -0.5 * log_abs(det) + log_torsion + scale_term;
    }
    const auto log_det = real_log_det(std::get<RealMatrix>(lattice.gram()));
    if (!log_det) return HUGE_VAL;
    return -0.5 * log_det->convert_to<double>() + log_torsion + scale_term;
}

SeminormedLattice induced_sub(const SeminormedLattice& lattice, const IntMatrix& basis) {
    if (basis.rows() > 0 && basis.cols() != lattice.rank())
        throw PreconditionError("sublattice basis does not match the lattice rank");
    if (row_rank(basis) != basis.rows()) throw PreconditionError("sublattice generators are dependent");
    return std::visit(
        [&](const auto& g) -> SeminormedLattice {
            using M = std::decay_t<decltype(g)>;
            if (is_diagonal(g) && coordinate_rows(basis)) {
                std::vector<std::size_t> idx;
                for (std::size_t i = 0; i < basis.rows(); ++i) idx.push_back(unit_index(basis, i));
                return SeminormedLattice(Gram(principal_submatrix(g, idx)), {}, lattice.log_scale());
            }
            return SeminormedLattice(Gram(M(congruence(basis, g))), {}, lattice.log_scale());
        },
        lattice.gram());
}

SeminormedLattice quotient_norm(const SeminormedLattice& lattice, const IntMatrix& sub) {
    const IntMatrix h = hermite_normal_form(sub);
    if (h.rows() == 0) return lattice;
    if (h.cols() != lattice.rank()) throw PreconditionError("subgroup does not live in the lattice's free part");
    std::vector<BigInt> torsion = lattice.torsion();

    return std::visit(
        [&](const auto& g) -> SeminormedLattice {
            using M = std::decay_t<decltype(g)>;
            if (is_diagonal(g) && coordinate_rows(h)) {
                std::vector<bool> taken(g.rows(), false);
                for (std::size_t i = 0; i < h.rows(); ++i) taken[unit_index(h, i)] = true;
                std::vector<std::size_t> rest;
                for (std::size_t i = 0; i < g.rows(); ++i)
                    if (!taken[i]) rest.push_back(i);
                return SeminormedLattice(Gram(principal_submatrix(g, rest)), torsion, lattice.log_scale());
            }
            const SmithForm snf = smith_form(h);
            for (const auto& d : snf.diagonal)
                if (d > 1) torsion.push_back(d);
            M adapted = congruence(snf.adapted_basis, g);
            return SeminormedLattice(Gram(M(schur_complement(std::move(adapted), h.rows()))), std::move(torsion),
                                     lattice.log_scale());
        },
        lattice.gram());
}

SeminormedLattice subquotient_norm(const SeminormedLattice& lattice, const IntMatrix& numerator,
                                   const IntMatrix& denominator) {
    const IntMatrix num = hermite_normal_form(numerator);
    const IntMatrix den = hermite_normal_form(denominator);
    auto coords = express_in_basis(num, den);
    if (!coords) throw PreconditionError("denominator is not contained in numerator");
    return quotient_norm(induced_sub(lattice, num), *coords);
}

FiltrationChi filtration_chi_sum(const SeminormedLattice& lattice, const std::vector<IntMatrix>& chain) {
    const std::size_t r = lattice.rank();
    std::vector<IntMatrix> steps;
    for (const auto& f : chain) {
        if (f.rows() > 0 && f.cols() != r) throw PreconditionError("chain element has wrong ambient rank");
        steps.push_back(hermite_normal_form(f));
    }
    steps.push_back(IntMatrix::identity(r));

    FiltrationChi out;
    IntMatrix prev(0, r);
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (!lattice_contains(steps[i], prev)) throw PreconditionError("filtration chain is not increasing");
        SeminormedLattice part = subquotient_norm(lattice, steps[i], prev);
        if (i + 1 == steps.size() && !lattice.torsion().empty()) {
            std::vector<BigInt> tors = part.torsion();
            tors.insert(tors.end(), lattice.torsion().begin(), lattice.torsion().end());
            part = SeminormedLattice(part.gram(), std::move(tors), part.log_scale());
        }
        out.parts.push_back(chi(part));
        if (lattice.is_rational()) out.exact_parts.push_back(chi_exact(part));
        prev = steps[i];
    }
    out.sum = 0.0;
    for (double p : out.parts) out.sum += p;
    out.total = chi(lattice);
    if (lattice.is_rational()) out.exact_identity = exact_equal(exact_sum(out.exact_parts), chi_exact(lattice));
    return out;
}

SeminormedLattice scale(const SeminormedLattice& lattice, double alpha, int weight) {
    return SeminormedLattice(lattice.gram(), lattice.torsion(), lattice.log_scale() + alpha * weight);
}

double theta_radius(std::size_t rank, double tail_tolerance) {
    if (!(tail_tolerance > 0.0)) throw PreconditionError("tail tolerance must be positive");
    const double k = static_cast<double>(std::max<std::size_t>(rank, 1));
    // Gaussian mass outside the ball of radius c*sqrt(k) is at most
    // beta(c)^k times the total, beta(c) = c sqrt(2 pi e) exp(-pi c^2).
    auto bound = [&](double c) {
        const double beta = c * std::sqrt(2.0 * std::numbers::pi * std::numbers::e) * std::exp(-std::numbers::pi * c * c);
        const double bk = std::pow(beta, k);
        return bk / (1.0 - bk);
    };
    double lo = 1.0 / std::sqrt(2.0 * std::numbers::pi) + 1e-9;
    double hi = 1.0;
    while (!(bound(hi) < tail_tolerance)) hi *= 1.5;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (bound(mid) < tail_tolerance) hi = mid;
        else lo = mid;
    }
    return hi * std::sqrt(k);
}

namespace {

struct NeumaierSum {
    double sum = 0.0;
    double compensation = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x)) compensation += (sum - t) + x;
        else compensation += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + compensation; }
};

}  // namespace

double h0_theta(const SeminormedLattice& lattice, const ThetaOptions& options) {
    const std::size_t k = lattice.rank();
    const double log_torsion = log_abs(lattice.torsion_order());
    if (k == 0) return log_torsion;
    if (k > options.max_rank) throw PreconditionError("enumeration bound exceeded");
    if (!std::isfinite(chi(lattice))) throw PreconditionError("theta undefined for seminorms");

    // G = R^T R with R upper triangular.
    const Matrix<double> g = lattice.double_gram();
    Matrix<double> rr(k, k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        double d = g(j, j);
        for (std::size_t t = 0; t < j; ++t) d -= rr(t, j) * rr(t, j);
        if (!(d > 0.0)) throw PreconditionError("theta undefined for seminorms");
        rr(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < k; ++i) {
            double s = g(j, i);
            for (std::size_t t = 0; t < j; ++t) s -= rr(t, j) * rr(t, i);
            rr(j, i) = s / rr(j, j);
        }
    }

    const double radius = theta_radius(k, options.tail_tolerance);
    const double budget = radius * radius;
    std::vector<long> v(k, 0);
    NeumaierSum total;
    std::size_t visited = 0;
    constexpr std::size_t kMaxPoints = 200'000'000;

    // Depth-first over coordinates k-1 .. 0; partial holds sum over j > i.
    std::function<void(std::size_t, double)> descend = [&](std::size_t level, double used) {
        const std::size_t i = level - 1;
        double center = 0.0;
        for (std::size_t j = i + 1; j < k; ++j) center -= rr(i, j) * static_cast<double>(v[j]);
        center /= rr(i, i);
        const double room = budget - used;
        if (room < 0.0) return;
        const double half = std::sqrt(room) / rr(i, i);
        const long lo = static_cast<long>(std::ceil(center - half));
        const long hi = static_cast<long>(std::floor(center + half));
        for (long x = lo; x <= hi; ++x) {
            v[i] = x;
            const double diff = rr(i, i) * (static_cast<double>(x) - center);
            const double q = used + diff * diff;
            if (q > budget) continue;
            if (i == 0) {
                if (++visited > kMaxPoints) throw ComputationError("enumeration bound exceeded");
                total.add(std::exp(-std::numbers::pi * q));
            } else {
                descend(i, q);
            }
        }
        v[i] = 0;
    };
    descend(k, 0.0);
    return std::log(total.value()) + log_torsion;
}

double h1_theta(const SeminormedLattice& lattice, const ThetaOptions& options) {
    return h0_theta(lattice, options) - chi(lattice);
}

}  // namespace ahilb
