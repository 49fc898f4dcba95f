#include "ahilb/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ahilb/errors.hpp"

namespace ahilb {

namespace {

double factorial(int r) { return std::tgamma(static_cast<double>(r) + 1.0); }

bool close(double a, double b, double rel) { return std::fabs(a - b) <= rel * std::max({1.0, std::fabs(a), std::fabs(b)}); }

void require_free(const GradedAlgebra& a) {
    if (!a.is_free()) throw PreconditionError("metrics are defined on polynomial rings only");
}

// Least squares on the columns {1, log(n)/n, 1/n} by modified Gram-Schmidt.
std::vector<long double> fit_model(const std::vector<int>& n, const std::vector<double>& y) {
    const std::size_t m = n.size();
    std::vector<std::vector<long double>> q(3, std::vector<long double>(m));
    for (std::size_t i = 0; i < m; ++i) {
        const long double x = n[i];
        q[0][i] = 1.0L;
        q[1][i] = std::log(x) / x;
        q[2][i] = 1.0L / x;
    }
    long double r[3][3] = {};
    for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < j; ++k) {
            long double dot = 0;
            for (std::size_t i = 0; i < m; ++i) dot += q[k][i] * q[j][i];
            r[k][j] = dot;
            for (std::size_t i = 0; i < m; ++i) q[j][i] -= dot * q[k][i];
        }
        long double norm = 0;
        for (std::size_t i = 0; i < m; ++i) norm += q[j][i] * q[j][i];
        norm = std::sqrt(norm);
        if (norm == 0) throw PreconditionError("fit design matrix is rank deficient");
        r[j][j] = norm;
        for (std::size_t i = 0; i < m; ++i) q[j][i] /= norm;
    }
    long double qty[3] = {};
    for (int j = 0; j < 3; ++j)
        for (std::size_t i = 0; i < m; ++i) qty[j] += q[j][i] * y[i];
    std::vector<long double> c(3);
    for (int j = 2; j >= 0; --j) {
        long double s = qty[j];
        for (int k = j + 1; k < 3; ++k) s -= r[j][k] * c[static_cast<std::size_t>(k)];
        c[static_cast<std::size_t>(j)] = s / r[j][j];
    }
    return c;
}

double model(const std::vector<long double>& c, int n) {
    const long double x = n;
    return static_cast<double>(c[0] + c[1] * std::log(x) / x + c[2] / x);
}

std::vector<double> grid_weight(const MetricSpec& m, const ToricSymbol& grid) {
    std::vector<double> w(grid.nodes);
    if (m.kind == MetricSpec::Kind::FubiniStudy) {
        for (std::size_t i = 0; i < grid.nodes; ++i) {
            const double x = 2.0 * grid.node(i);
            w[i] = 0.5 * (x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x))) + m.shift;
        }
    } else {
        for (std::size_t i = 0; i < grid.nodes; ++i) w[i] = m.symbol.values[i] + m.shift;
    }
    return w;
}

std::vector<double> tail_slopes(const MetricSpec& m) {
    return m.kind == MetricSpec::Kind::FubiniStudy ? std::vector<double>{0.0, 1.0} : m.symbol.slopes;
}

}  // namespace

MetricSpec MetricSpec::fubini_study(double shift) {
    MetricSpec m;
    m.shift = shift;
    return m;
}

MetricSpec MetricSpec::toric(ToricSymbol symbol, double shift, QuadratureOptions quadrature) {
    symbol.validate();
    if (symbol.dim != 1) throw PreconditionError("toric metrics are supported on P^1");
    MetricSpec m;
    m.kind = Kind::Toric;
    m.symbol = std::move(symbol);
    m.shift = shift;
    m.quadrature = quadrature;
    return m;
}

SeminormedLattice degree_lattice(const MetricSpec& metric, int N, int n) {
    const double log_scale = -static_cast<double>(n) * metric.shift;
    if (metric.kind == MetricSpec::Kind::FubiniStudy) return SeminormedLattice(Gram(fs_gram(N, n)), {}, log_scale);
    if (N != 1) throw PreconditionError("toric metrics are supported on P^1");
    std::optional<ToricGram> gram;
    if (metric.store) gram = metric.store->load(n);
    if (!gram) {
        gram = toric_gram_p1(metric.symbol, n, metric.quadrature);
        if (metric.store) metric.store->save(*gram);
    }
    const SeminormedLattice base = gram->lattice();
    return SeminormedLattice(base.gram(), {}, log_scale);
}

Geometry Geometry::projective_space(int N) {
    GradedAlgebra a = monomial_algebra(N);
    return {a, GradedModule::ring(a)};
}

std::vector<ChiPoint> chi_sequence(const Geometry& geometry, const MetricSpec& metric, int n_min, int n_max) {
    require_free(geometry.algebra);
    if (n_min < 0 || n_max < n_min) throw PreconditionError("degree range must satisfy 0 <= n_min <= n_max");
    const int N = geometry.algebra.projective_dimension();
    const bool whole = geometry.module.kind() == GradedModule::Kind::Ring;
    std::vector<ChiPoint> out;
    for (int n = n_min; n <= n_max; ++n) {
        const SeminormedLattice L = degree_lattice(metric, N, n);
        const IntMatrix num = geometry.module.numerator(n);
        const bool full = whole && num.rows() == L.rank();
        const SeminormedLattice piece = full ? L : subquotient_norm(L, num, geometry.module.denominator(n));
        out.push_back({n, chi(piece), piece.rank()});
    }
    return out;
}

InvariantEstimate estimate_invariants(const std::vector<ChiPoint>& sequence, int r, const EstimateOptions& options) {
    if (r < 1) throw PreconditionError("normalization exponent r must be positive");
    InvariantEstimate est;
    est.r = r;
    const double rf = factorial(r);
    for (const auto& p : sequence) {
        if (p.n < 1) continue;
        if (!std::isfinite(p.chi)) {
            std::ostringstream msg;
            msg << "arithmetic degree is infinite at degree " << p.n << "; the seminorm is degenerate";
            throw ComputationError(msg.str());
        }
        est.n.push_back(p.n);
        est.chi.push_back(p.chi);
        est.normalized.push_back(rf * p.chi / std::pow(static_cast<double>(p.n), r));
    }
    if (est.n.size() < options.min_points) throw PreconditionError("insufficient data: too few degrees for the fit");
    const auto [lo, hi] = std::minmax_element(est.n.begin(), est.n.end());
    if (*hi < 10 * *lo) throw PreconditionError("insufficient data: degrees must span a decade");

    const auto c = fit_model(est.n, est.normalized);
    for (int j = 0; j < 3; ++j) est.coefficients[j] = static_cast<double>(c[static_cast<std::size_t>(j)]);
    double ss = 0.0;
    for (std::size_t i = 0; i < est.n.size(); ++i) {
        est.residuals.push_back(est.normalized[i] - model(c, est.n[i]));
        ss += est.residuals.back() * est.residuals.back();
    }
    est.rms_residual = std::sqrt(ss / static_cast<double>(est.n.size()));
    if (est.rms_residual > options.residual_threshold) {
        std::ostringstream msg;
        msg << "fit residual " << est.rms_residual << " exceeds threshold " << options.residual_threshold;
        throw ComputationError(msg.str());
    }

    // Width: residual envelope on the upper half plus drift of a tail-only fit.
    const int median = est.n[est.n.size() / 2];
    std::vector<int> tn;
    std::vector<double> ty;
    double tail_resid = 0.0;
    for (std::size_t i = 0; i < est.n.size(); ++i)
        if (est.n[i] >= median) {
            tn.push_back(est.n[i]);
            ty.push_back(est.normalized[i]);
            tail_resid = std::max(tail_resid, std::fabs(est.residuals[i]));
        }
    double drift = 0.0;
    if (tn.size() >= 3) drift = std::fabs(static_cast<double>(fit_model(tn, ty)[0] - c[0]));
    est.c = est.coefficients[0];
    est.width = std::max(tail_resid, drift);
    est.c_upper = est.c + est.width;
    est.c_lower = est.c - est.width;
    est.converged = est.width <= options.converged_width;
    return est;
}

FamilyEstimate estimate_family(const std::vector<std::vector<ChiPoint>>& sequences, int r,
                               const EstimateOptions& options, double tolerance) {
    if (sequences.empty()) throw PreconditionError("family is empty");
    FamilyEstimate out;
    for (const auto& s : sequences) out.members.push_back(estimate_invariants(s, r, options));
    bool up = true, down = true;
    for (std::size_t j = 1; j < out.members.size(); ++j) {
        const double d = out.members[j].c - out.members[j - 1].c;
        if (d < -tolerance) up = false;
        if (d > tolerance) down = false;
    }
    if (!up && !down) throw PreconditionError("non-monotone family");
    out.increasing = up;
    out.limit = out.members.back().c;
    return out;
}

ConservationReport conservation_check(const GradedAlgebra& a, const GradedIdeal& ideal, const MetricSpec& metric,
                                      int n_min, int n_max) {
    require_free(a);
    if (n_min < 0 || n_max < n_min) throw PreconditionError("degree range must satisfy 0 <= n_min <= n_max");
    const int N = a.projective_dimension();
    ConservationReport report;
    report.threshold_n0 = isotypic_decomposition(a, ideal, n_max).threshold_n0;
    report.passed = true;
    for (int n = n_min; n <= n_max; ++n) {
        const SeminormedLattice L = degree_lattice(metric, N, n);
        std::vector<IntMatrix> chain;
        for (int l = n; l >= 1; --l) chain.push_back(ideal_power_piece(a, ideal, l, n));
        const FiltrationChi f = filtration_chi_sum(L, chain);
        ConservationDegree d;
        d.n = n;
        d.parts.assign(f.parts.rbegin(), f.parts.rend());
        d.sum = f.sum;
        d.chi_total = f.total;
        d.defect = L.is_rational() ? exact_difference(exact_sum(f.exact_parts), chi_exact(L)) : f.sum - f.total;
        d.exact = f.exact_identity;
        const bool ok = L.is_rational() ? d.exact : close(f.sum, f.total, 1e-9);
        if (!ok) {
            report.failing_degrees.push_back(n);
            report.passed = false;
        }
        report.degrees.push_back(std::move(d));
    }
    return report;
}

ConservationNumeric conservation_numeric(const ToricSymbol& symbol, int n_min, int n_max, double tolerance,
                                         const QuadratureOptions& quadrature) {
    const ToricSymbol infinity = deformed_infinity_symbol(symbol);
    const std::vector<int> ideal_vars{1};
    std::vector<ChiPoint> one, inf;
    for (int n = std::max(n_min, 1); n <= n_max; ++n) {
        const ToricGram g1 = toric_gram_p1(symbol, n, quadrature);
        double s1 = 0.0;
        for (double v : g1.log_diagonal) s1 += v;
        one.push_back({n, -0.5 * s1, g1.log_diagonal.size()});

        // F(l,n) is spanned by the class of x0^(n-l) x1^l.
        const ToricGram gi = toric_gram_p1(infinity, n, quadrature);
        double si = 0.0;
        std::size_t rank = 0;
        for (int l = 0; l <= n; ++l) {
            const std::size_t block = monomial_block_rank(1, ideal_vars, l, n) - monomial_block_rank(1, ideal_vars, l + 1, n);
            if (block != 1) throw ComputationError("fiber at infinity block is not of rank one");
            si += gi.log_diagonal[static_cast<std::size_t>(l)];
            ++rank;
        }
        inf.push_back({n, -0.5 * si, rank});
    }
    ConservationNumeric out;
    out.fiber_one = estimate_invariants(one, 2);
    out.fiber_infinity = estimate_invariants(inf, 2);
    out.difference = std::fabs(out.fiber_one.c - out.fiber_infinity.c);
    out.tolerance = tolerance;
    out.passed = out.difference < tolerance;
    return out;
}

ProjectionReport projection_formula_check(const GradedAlgebra& a, const GradedIdeal& ideal, int n_min, int n_max,
                                          double tolerance) {
    require_free(a);
    const auto vars = ideal.coordinate_variables();
    if (!vars) throw PreconditionError("projection check needs an ideal generated by coordinates");
    const int NX = a.projective_dimension();
    const int NY = NX - static_cast<int>(vars->size());
    if (NY < 0) throw PreconditionError("the subscheme is empty");
    ProjectionReport report;
    report.passed = true;
    for (int n = n_min; n <= n_max; ++n) {
        ProjectionDegree d;
        d.n = n;
        const SeminormedLattice LX(Gram(fs_gram(NX, n)));
        const SeminormedLattice pushed = quotient_norm(LX, ideal_power_piece(a, ideal, 1, n));
        d.rank = pushed.rank();
        d.pushforward_chi = chi(pushed);
        if (NY == 0) {
            d.restricted_chi = 0.0;
            if (d.rank != 1) throw ComputationError("restricted section count mismatch");
        } else {
            const SeminormedLattice LY(Gram(fs_gram(NY, n)));
            if (LY.rank() != d.rank) throw ComputationError("restricted section count mismatch");
            d.restricted_chi = chi(LY);
        }
        d.defect = d.pushforward_chi - d.restricted_chi;
        const double log_ratio = std::lgamma(NX + 1.0) + std::lgamma(n + NY + 1.0) - std::lgamma(NY + 1.0) -
                                 std::lgamma(n + NX + 1.0);
        d.predicted_defect = -0.5 * static_cast<double>(d.rank) * log_ratio;
        if (n > 0) d.normalized_defect = factorial(NY + 1) * d.defect / std::pow(static_cast<double>(n), NY + 1);
        d.match = std::fabs(d.defect - d.predicted_defect) <= tolerance * std::max(1.0, std::fabs(d.predicted_defect));
        if (!d.match) report.passed = false;
        report.degrees.push_back(d);
    }
    return report;
}

AdditivityReport additivity_check(const GradedAlgebra& a, const GradedIdeal& ideal, const MetricSpec& metric,
                                  int n_min, int n_max, int r) {
    require_free(a);
    if (n_min < 0 || n_max < n_min) throw PreconditionError("degree range must satisfy 0 <= n_min <= n_max");
    const int N = a.projective_dimension();
    AdditivityReport report;
    report.passed = true;
    for (int n = n_min; n <= n_max; ++n) {
        const SeminormedLattice L = degree_lattice(metric, N, n);
        const IntMatrix sub = ideal_power_piece(a, ideal, 1, n);
        const SeminormedLattice S = induced_sub(L, sub);
        const SeminormedLattice Q = quotient_norm(L, sub);
        AdditivityDegree d;
        d.n = n;
        d.chi_total = chi(L);
        d.chi_sub = chi(S);
        d.chi_quotient = chi(Q);
        d.defect = d.chi_sub + d.chi_quotient - d.chi_total;
        if (L.is_rational()) {
            const ExactChi parts = exact_sum({chi_exact(S), chi_exact(Q)});
            d.exact = exact_equal(parts, chi_exact(L));
            d.defect = exact_difference(parts, chi_exact(L));
        }
        const bool ok = L.is_rational() ? d.exact : close(d.chi_sub + d.chi_quotient, d.chi_total, 1e-9);
        if (!ok) report.passed = false;
        report.degrees.push_back(d);
    }
    if (n_max > 0 && !report.degrees.empty()) {
        const auto& last = report.degrees.back();
        const double norm = factorial(r) / std::pow(static_cast<double>(n_max), r);
        report.normalized_total = norm * last.chi_total;
        report.normalized_sum = norm * (last.chi_sub + last.chi_quotient);
    }
    return report;
}

bool weight_leq(const MetricSpec& a, const MetricSpec& b, double tolerance) {
    if (a.kind == MetricSpec::Kind::FubiniStudy && b.kind == MetricSpec::Kind::FubiniStudy)
        return a.shift <= b.shift + tolerance;
    const ToricSymbol& grid = a.kind == MetricSpec::Kind::Toric ? a.symbol : b.symbol;
    if (a.kind == MetricSpec::Kind::Toric && b.kind == MetricSpec::Kind::Toric &&
        (a.symbol.nodes != b.symbol.nodes || a.symbol.T != b.symbol.T))
        throw PreconditionError("metrics must share a grid to be compared");
    const auto wa = grid_weight(a, grid), wb = grid_weight(b, grid);
    for (std::size_t i = 0; i < wa.size(); ++i)
        if (wa[i] > wb[i] + tolerance) return false;
    const auto sa = tail_slopes(a), sb = tail_slopes(b);
    return sa[0] >= sb[0] - tolerance && sa[1] <= sb[1] + tolerance;
}

MonotonicityReport monotonicity_check(const MetricSpec& larger, const MetricSpec& smaller, int n_min, int n_max) {
    if (!weight_leq(larger, smaller, 1e-12))
        throw PreconditionError("the first metric must be pointwise larger (its weight smaller)");
    MonotonicityReport report;
    report.passed = true;
    for (int n = n_min; n <= n_max; ++n) {
        const double cl = chi(degree_lattice(larger, 1, n));
        const double cs = chi(degree_lattice(smaller, 1, n));
        report.n.push_back(n);
        report.chi_larger.push_back(cl);
        report.chi_smaller.push_back(cs);
        if (cl > cs + 1e-9 * std::max({1.0, std::fabs(cl), std::fabs(cs)})) report.passed = false;
    }
    return report;
}

ApproximationReport approximation_check(const MetricSpec& limit, const std::vector<MetricSpec>& family, int n_min,
                                        int n_max, int r, double tolerance, const EstimateOptions& options) {
    if (family.empty()) throw PreconditionError("family is empty");
    bool up = true, down = true;
    for (std::size_t j = 0; j < family.size(); ++j) {
        const MetricSpec& next = j + 1 < family.size() ? family[j + 1] : limit;
        up = up && weight_leq(family[j], next, 1e-12);
        down = down && weight_leq(next, family[j], 1e-12);
    }
    if (!up && !down) throw PreconditionError("non-monotone family");
    const Geometry g = Geometry::projective_space(1);
    ApproximationReport report;
    report.increasing = up;
    for (const auto& m : family) report.estimates.push_back(estimate_invariants(chi_sequence(g, m, n_min, n_max), r, options).c);
    report.target = estimate_invariants(chi_sequence(g, limit, n_min, n_max), r, options).c;
    report.monotone = true;
    for (std::size_t j = 1; j < report.estimates.size(); ++j) {
        const double step = report.estimates[j] - report.estimates[j - 1];
        if ((up && step < -1e-9) || (!up && step > 1e-9)) report.monotone = false;
    }
    report.gap = std::fabs(report.target - report.estimates.back());
    report.passed = report.monotone && report.gap <= tolerance;
    return report;
}

}  // namespace ahilb
