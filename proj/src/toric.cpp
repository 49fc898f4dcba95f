#include "ahilb/toric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "ahilb/errors.hpp"
#include "ahilb/graded.hpp"

namespace ahilb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log1pexp(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// log of the normalized Fubini-Study area density on P^1 in t = log|x1/x0|.
double log_fs_density(double t) { return std::log(2.0) + 2.0 * t - 2.0 * log1pexp(2.0 * t); }

struct LogSum {
    double max = -kInf;
    std::vector<double> terms;
    void add(double x) {
        terms.push_back(x);
        max = std::max(max, x);
    }
    // log of sum(exp(terms) * weights); fixed summation order.
    double value(const std::vector<double>& weights) const {
        if (max == -kInf) return -kInf;
        double s = 0.0, c = 0.0;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const double x = weights[i] * std::exp(terms[i] - max);
            const double t = s + x;
            c += std::fabs(s) >= std::fabs(x) ? (s - t) + x : (x - t) + s;
            s = t;
        }
        return max + std::log(s + c);
    }
};

std::vector<std::pair<double, double>> polygon(const ToricSymbol& sym) {
    std::vector<std::pair<double, double>> v;
    for (std::size_t i = 0; i + 1 < sym.polytope.size(); i += 2) v.emplace_back(sym.polytope[i], sym.polytope[i + 1]);
    return v;
}

bool in_polygon(const std::vector<std::pair<double, double>>& poly, double x, double y) {
    // Convex polygon with counter-clockwise vertices.
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto [x0, y0] = poly[i];
        const auto [x1, y1] = poly[(i + 1) % poly.size()];
        if ((x1 - x0) * (y - y0) - (y1 - y0) * (x - x0) < -1e-12) return false;
    }
    return true;
}

ToricSymbol envelope_1d(const ToricSymbol& sym) {
    const std::size_t m = sym.nodes;
    const double lo = std::max(sym.polytope[0], sym.slopes[0]);
    const double hi = std::min(sym.polytope[1], sym.slopes[1]);
    if (lo > hi) throw PreconditionError("asymptotic slopes leave the moment polytope empty");

    // Lower hull (monotone chain).
    std::vector<std::size_t> hull;
    for (std::size_t i = 0; i < m; ++i) {
        while (hull.size() >= 2) {
            const std::size_t a = hull[hull.size() - 2], b = hull.back();
            const double cross = (sym.node(b) - sym.node(a)) * (sym.values[i] - sym.values[a]) -
                                 (sym.values[b] - sym.values[a]) * (sym.node(i) - sym.node(a));
            if (cross <= 0.0) hull.pop_back();
            else break;
        }
        hull.push_back(i);
    }
    auto seg_slope = [&](std::size_t k) {
        return (sym.values[hull[k + 1]] - sym.values[hull[k]]) / (sym.node(hull[k + 1]) - sym.node(hull[k]));
    };
    // Vertex p supports slope lo, vertex q supports slope hi.
    std::size_t p = 0;
    while (p + 1 < hull.size() && seg_slope(p) < lo) ++p;
    std::size_t q = hull.size() - 1;
    while (q > 0 && seg_slope(q - 1) > hi) --q;

    ToricSymbol out = sym;
    out.slopes = {lo, hi};
    const double tp = sym.node(hull[p]), vp = sym.values[hull[p]];
    const double tq = sym.node(hull[q]), vq = sym.values[hull[q]];
    std::size_t k = p;
    for (std::size_t i = 0; i < m; ++i) {
        const double t = sym.node(i);
        if (i <= hull[p]) {
            out.values[i] = vp + lo * (t - tp);
        } else if (i >= hull[q]) {
            out.values[i] = vq + hi * (t - tq);
        } else {
            while (hull[k + 1] < i) ++k;
            const std::size_t a = hull[k], b = hull[k + 1];
            out.values[i] = (i == a) ? sym.values[a]
                                     : sym.values[a] + (sym.values[b] - sym.values[a]) * static_cast<double>(i - a) /
                                                           static_cast<double>(b - a);
        }
    }
    out.semipositive = true;
    return out;
}

ToricSymbol envelope_2d(const ToricSymbol& sym) {
    if (sym.nodes > 257) throw PreconditionError("two-dimensional envelope grid is limited to 257 nodes per axis");
    const auto poly = polygon(sym);
    double amin = kInf, amax = -kInf, bmin = kInf, bmax = -kInf;
    for (auto [a, b] : poly) {
        amin = std::min(amin, a), amax = std::max(amax, a);
        bmin = std::min(bmin, b), bmax = std::max(bmax, b);
    }
    const std::size_t m = sym.nodes;
    const std::size_t slope_nodes = 2 * m + 1;
    std::vector<std::pair<double, double>> slopes;
    for (std::size_t i = 0; i < slope_nodes; ++i)
        for (std::size_t j = 0; j < slope_nodes; ++j) {
            const double a = amin + (amax - amin) * static_cast<double>(i) / static_cast<double>(slope_nodes - 1);
            const double b = bmin + (bmax - bmin) * static_cast<double>(j) / static_cast<double>(slope_nodes - 1);
            if (in_polygon(poly, a, b)) slopes.emplace_back(a, b);
        }
    std::vector<double> conj(slopes.size(), -kInf);
    for (std::size_t s = 0; s < slopes.size(); ++s)
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                const double v = sym.values[i * m + j];
                if (!std::isfinite(v)) continue;
                conj[s] = std::max(conj[s], slopes[s].first * sym.node(i) + slopes[s].second * sym.node(j) - v);
            }
    ToricSymbol out = sym;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            double best = -kInf;
            for (std::size_t s = 0; s < slopes.size(); ++s)
                best = std::max(best, slopes[s].first * sym.node(i) + slopes[s].second * sym.node(j) - conj[s]);
            out.values[i * m + j] = std::min(best, sym.values[i * m + j]);
        }
    out.semipositive = true;
    return out;
}

}  // namespace

double ToricSymbol::eval(double t) const {
    if (dim != 1) throw PreconditionError("eval is defined for one-dimensional symbols");
    if (t <= -T) return values.front() + slopes[0] * (t + T);
    if (t >= T) return values.back() + slopes[1] * (t - T);
    const double x = (t + T) / step();
    const std::size_t i = std::min(static_cast<std::size_t>(x), nodes - 2);
    const double f = x - static_cast<double>(i);
    return values[i] * (1.0 - f) + values[i + 1] * f;
}

void ToricSymbol::validate() const {
    if (dim != 1 && dim != 2) throw PreconditionError("symbol dimension must be 1 or 2");
    if (nodes < 3) throw PreconditionError("symbol grid needs at least 3 nodes");
    if (!(T > 0.0)) throw PreconditionError("symbol half-width T must be positive");
    const std::size_t expected = dim == 1 ? nodes : nodes * nodes;
    if (values.size() != expected) throw PreconditionError("symbol value count does not match the grid");
    for (double v : values)
        if (!std::isfinite(v)) throw PreconditionError("symbol values must be finite");
    if (dim == 1) {
        if (slopes.size() != 2 || polytope.size() != 2) throw PreconditionError("dim-1 symbols need two slopes");
        for (double v : slopes)
            if (!std::isfinite(v)) throw PreconditionError("asymptotic slopes must be finite");
        if (semipositive && (slopes[0] < polytope[0] - 1e-12 || slopes[1] > polytope[1] + 1e-12))
            throw PreconditionError("semipositive symbols need slopes in the moment polytope");
    } else if (polytope.size() < 6 || polytope.size() % 2 != 0) {
        throw PreconditionError("dim-2 symbols need a polygon with at least 3 vertices");
    }
}

ToricSymbol fubini_study_symbol(int dim, double T, std::size_t nodes) {
    ToricSymbol s;
    s.dim = dim;
    s.T = T;
    s.nodes = nodes;
    if (dim == 1) {
        s.values.resize(nodes);
        for (std::size_t i = 0; i < nodes; ++i) s.values[i] = 0.5 * log1pexp(2.0 * s.node(i));
        s.slopes = {0.0, 1.0};
        s.polytope = {0.0, 1.0};
    } else if (dim == 2) {
        s.values.resize(nodes * nodes);
        for (std::size_t i = 0; i < nodes; ++i)
            for (std::size_t j = 0; j < nodes; ++j) {
                const double x = 2.0 * s.node(i), y = 2.0 * s.node(j);
                const double m = std::max({0.0, x, y});
                s.values[i * nodes + j] = 0.5 * (m + std::log(std::exp(-m) + std::exp(x - m) + std::exp(y - m)));
            }
        s.slopes.clear();
        s.polytope = {0.0, 0.0, 1.0, 0.0, 0.0, 1.0};
    } else {
        throw PreconditionError("symbol dimension must be 1 or 2");
    }
    s.semipositive = true;
    return s;
}

ToricSymbol sample_symbol(const std::function<double(double)>& f, double lo_slope, double hi_slope, double T,
                          std::size_t nodes) {
    ToricSymbol s;
    s.T = T;
    s.nodes = nodes;
    s.values.resize(nodes);
    for (std::size_t i = 0; i < nodes; ++i) s.values[i] = f(s.node(i));
    s.slopes = {lo_slope, hi_slope};
    s.polytope = {0.0, 1.0};
    s.validate();
    return s;
}

ToricSymbol shift(const ToricSymbol& sym, double alpha) {
    ToricSymbol out = sym;
    for (double& v : out.values) v += alpha;
    return out;
}

ToricSymbol pointwise_min(const ToricSymbol& a, const ToricSymbol& b) {
    if (a.dim != 1 || b.dim != 1 || a.nodes != b.nodes || a.T != b.T)
        throw PreconditionError("symbols must share a one-dimensional grid");
    ToricSymbol out = a;
    for (std::size_t i = 0; i < a.nodes; ++i) out.values[i] = std::min(a.values[i], b.values[i]);
    // The tails follow whichever branch is lower far out.
    out.slopes = {a.values.front() <= b.values.front() ? a.slopes[0] : b.slopes[0],
                  a.values.back() <= b.values.back() ? a.slopes[1] : b.slopes[1]};
    out.semipositive = false;
    return out;
}

bool is_convex(const ToricSymbol& sym, double tolerance) {
    if (sym.dim != 1) throw PreconditionError("convexity check is one-dimensional");
    for (std::size_t i = 1; i + 1 < sym.nodes; ++i)
        if (sym.values[i - 1] - 2.0 * sym.values[i] + sym.values[i + 1] < -tolerance) return false;
    const double first = (sym.values[1] - sym.values[0]) / sym.step();
    const double last = (sym.values[sym.nodes - 1] - sym.values[sym.nodes - 2]) / sym.step();
    return sym.slopes[0] <= first + tolerance && last <= sym.slopes[1] + tolerance;
}

RationalMatrix fs_gram(int N, int n) {
    if (N < 1) throw PreconditionError("projective dimension must be positive");
    if (n < 0) throw PreconditionError("degree must be nonnegative");
    const GradedAlgebra a = monomial_algebra(N);
    const auto basis = a.basis(n);
    BigInt fact_N, fact_nN;
    mpz_fac_ui(fact_N.get_mpz_t(), static_cast<unsigned long>(N));
    mpz_fac_ui(fact_nN.get_mpz_t(), static_cast<unsigned long>(n + N));
    std::vector<BigInt> fact(static_cast<std::size_t>(n) + 1);
    fact[0] = 1;
    for (int k = 1; k <= n; ++k) fact[static_cast<std::size_t>(k)] = fact[static_cast<std::size_t>(k - 1)] * k;
    RationalMatrix g(basis.size(), basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        BigInt num = fact_N;
        for (int e : basis[i]) num *= fact[static_cast<std::size_t>(e)];
        g(i, i) = Rational(num, fact_nN);
        g(i, i).canonicalize();
    }
    return g;
}

std::vector<double> fs_gram_quadrature(int N, int n) {
    if (N != 1 && N != 2) throw PreconditionError("quadrature oracle covers N = 1 and N = 2");
    const GradedAlgebra a = monomial_algebra(N);
    const auto basis = a.basis(n);
    const double T = 20.0;
    const std::size_t m = N == 1 ? 8001 : 801;
    const double h = 2.0 * T / static_cast<double>(m - 1);
    // Log of density / (|x0|^2 + ...)^n at every node; monomials add 2 alpha·t.
    std::vector<double> base;
    std::vector<std::array<double, 2>> coords;
    for (std::size_t i = 0; i < m; ++i) {
        const double t1 = -T + h * static_cast<double>(i);
        if (N == 1) {
            const double log_r = log1pexp(2.0 * t1);
            base.push_back(-n * log_r + std::log(2.0) + 2.0 * t1 - 2.0 * log_r);
            coords.push_back({t1, 0.0});
            continue;
        }
        for (std::size_t j = 0; j < m; ++j) {
            const double t2 = -T + h * static_cast<double>(j);
            const double x = 2.0 * t1, y = 2.0 * t2;
            const double mx = std::max({0.0, x, y});
            const double log_r = mx + std::log(std::exp(-mx) + std::exp(x - mx) + std::exp(y - mx));
            base.push_back(-n * log_r + std::log(8.0) + x + y - 3.0 * log_r);
            coords.push_back({t1, t2});
        }
    }
    const std::vector<double> w(base.size(), 1.0);
    std::vector<double> out;
    out.reserve(basis.size());
    for (const auto& e : basis) {
        LogSum sum;
        sum.terms.reserve(base.size());
        for (std::size_t k = 0; k < base.size(); ++k) {
            double v = base[k] + 2.0 * e[1] * coords[k][0];
            if (N == 2) v += 2.0 * e[2] * coords[k][1];
            sum.add(v);
        }
        out.push_back(std::exp(sum.value(w) + static_cast<double>(N) * std::log(h)));
    }
    return out;
}

SeminormedLattice ToricGram::lattice() const {
    RealMatrix g(log_diagonal.size(), log_diagonal.size());
    for (std::size_t i = 0; i < log_diagonal.size(); ++i) g(i, i) = exp(Real(log_diagonal[i]));
    return SeminormedLattice(Gram(std::move(g)));
}

ToricGram toric_gram_p1(const ToricSymbol& sym, int n, const QuadratureOptions& options) {
    if (sym.dim != 1) throw PreconditionError("toric Gram requires a one-dimensional symbol");
    if (n < 0) throw PreconditionError("degree must be nonnegative");
    sym.validate();
    const std::size_t m = sym.nodes;
    const double h = sym.step();
    const double lo = sym.slopes[0], hi = sym.slopes[1];

    ToricGram out;
    out.n = n;
    std::vector<double> w_fine(m, 1.0), w_coarse(m, 0.0);
    w_fine.front() = w_fine.back() = 0.5;
    const bool even_intervals = (m - 1) % 2 == 0;
    for (std::size_t i = 0; i < m; i += 2) w_coarse[i] = 2.0;
    w_coarse.front() = 1.0;
    if (even_intervals) w_coarse.back() = 1.0;

    for (int a = 0; a <= n; ++a) {
        LogSum sum;
        for (std::size_t i = 0; i < m; ++i) {
            const double t = sym.node(i);
            sum.add(2.0 * a * t - 2.0 * n * sym.values[i] + log_fs_density(t));
        }
        const double fine = sum.value(w_fine) + std::log(h);
        // Tails integrate the linear extension of the log-integrand exactly.
        const double left_rate = 2.0 * a - 2.0 * n * lo + 2.0;
        const double right_rate = 2.0 * a - 2.0 * n * hi - 2.0;
        if (!(left_rate > 0.0) || !(right_rate < 0.0))
            throw ComputationError("L2 integral diverges for the given slopes");
        const double tail = std::exp(sum.terms.front() - fine) / left_rate + std::exp(sum.terms.back() - fine) / -right_rate;
        double err = tail;
        if (even_intervals) {
            const double coarse = sum.value(w_coarse) + std::log(h);
            err += std::fabs(std::expm1(coarse - fine));
        }
        out.log_diagonal.push_back(fine + std::log1p(tail));
        out.error_bound.push_back(err);
        out.max_error = std::max(out.max_error, err);
        if (err > options.relative_tolerance) {
            std::ostringstream msg;
            msg << "quadrature did not converge: degree " << n << ", weight " << a << ", estimated relative error "
                << err << " > " << options.relative_tolerance;
            throw ComputationError(msg.str());
        }
    }
    return out;
}

ToricSymbol equilibrium_envelope(const ToricSymbol& sym) {
    sym.validate();
    return sym.dim == 1 ? envelope_1d(sym) : envelope_2d(sym);
}

double monomial_sup_norm(const ToricSymbol& sym, int a, int n) {
    if (sym.dim != 1) throw PreconditionError("sup norm requires a one-dimensional symbol");
    if (a < 0 || a > n) throw PreconditionError("monomial weight must satisfy 0 <= a <= n");
    const std::size_t m = sym.nodes;
    auto f = [&](std::size_t i) { return a * sym.node(i) - n * sym.values[i]; };
    const double left_rate = a - n * sym.slopes[0];
    const double right_rate = a - n * sym.slopes[1];
    if (left_rate < 0.0 || right_rate > 0.0) return kInf;

    std::size_t best = 0;
    for (std::size_t i = 1; i < m; ++i)
        if (f(i) > f(best)) best = i;
    double value = f(best);
    // Flat tails: the supremum is the limit at infinity.
    if (left_rate == 0.0) value = std::max(value, f(0));
    if (right_rate == 0.0) value = std::max(value, f(m - 1));

    if (best > 0 && best + 1 < m) {
        // Golden-section search on the cubic through four neighbouring nodes.
        const std::size_t i0 = best == 1 ? 0 : best - 2;
        const std::size_t i3 = std::min(m - 1, i0 + 3);
        const std::size_t base = i3 - 3;
        double y[4];
        for (int k = 0; k < 4; ++k) y[k] = f(base + static_cast<std::size_t>(k));
        auto cubic = [&](double x) {
            double s = 0.0;
            for (int j = 0; j < 4; ++j) {
                double l = 1.0;
                for (int k = 0; k < 4; ++k)
                    if (k != j) l *= (x - k) / static_cast<double>(j - k);
                s += y[j] * l;
            }
            return s;
        };
        double lo = static_cast<double>(best - base) - 1.0, hi = lo + 2.0;
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
        for (int it = 0; it < 100; ++it) {
            if (cubic(x1) < cubic(x2)) lo = x1;
            else hi = x2;
            x1 = hi - g * (hi - lo);
            x2 = lo + g * (hi - lo);
        }
        value = std::max(value, cubic(0.5 * (lo + hi)));
    }
    return std::exp(value);
}

ToricSymbol deformed_infinity_symbol(const ToricSymbol& sym) {
    if (sym.dim != 1) throw PreconditionError("the built-in deformation needs a symbol on P^1");
    sym.validate();
    // Conjugate of U(1)·T on the face l = a of {0 <= a <= 1, -1 <= l <= a}
    // is phi^*(a); the face symbol is its Legendre transform, i.e. the
    // envelope of phi with slopes in [0, 1].
    ToricSymbol face = sym;
    face.polytope = {0.0, 1.0};
    return envelope_1d(face);
}

SequenceInequality sequence_inequality_check(const std::vector<SequenceEntry>& b, int N, double eps) {
    if (N < 0) throw PreconditionError("N must be nonnegative");
    const double bound = 1.0 / std::sqrt(2.0 * (N + 1));
    if (!(eps > 0.0) || eps > bound * (1.0 + 1e-15)) throw PreconditionError("eps must lie in (0, 1/sqrt(2(N+1))]");
    SequenceInequality out;
    double weighted = 0.0;
    std::set<std::vector<int>> seen;
    for (const auto& e : b) {
        if (!seen.insert(e.index).second) throw PreconditionError("multi-indices must be distinct");
        if (e.index.size() != static_cast<std::size_t>(N + 1))
            throw PreconditionError("multi-index length must be N+1");
        int degree = 0;
        for (int k : e.index) {
            if (k < 0) throw PreconditionError("multi-index entries must be nonnegative");
            degree += k;
        }
        out.lhs += e.value * e.value;
        weighted += std::fabs(e.value) * std::pow(eps, degree);
    }
    out.rhs = 0.5 * weighted * weighted;
    out.slack = out.lhs - out.rhs;
    out.holds = out.slack >= -1e-12 * std::max(1.0, out.lhs);
    return out;
}

}  // namespace ahilb
