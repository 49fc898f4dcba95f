// Acceptance gate: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ahilb/cli.hpp"
#include "ahilb/deformation.hpp"
#include "ahilb/invariants.hpp"
#include "ahilb/lattice.hpp"
#include "ahilb/toric.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace ahilb;
using Json = nlohmann::json;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

std::string run_cli(const std::vector<std::string>& args, int* code = nullptr) {
    std::ostringstream out, err;
    const int c = cli::run(args, out, err);
    if (code) *code = c;
    return out.str();
}

double from_hex(const Json& j) { return std::strtod(j.get<std::string>().c_str(), nullptr); }

double fs_phi(double t) { return t > 0 ? t + 0.5 * std::log1p(std::exp(-2.0 * t)) : 0.5 * std::log1p(std::exp(2.0 * t)); }

Outcome height_of_p1() {
    const auto t0 = std::chrono::steady_clock::now();
    int code = 0;
    const std::string out = run_cli({"invariant", "--variety", "p1", "--metric", "fs", "--r", "2", "--n-max", "400"}, &code);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (code != 0) return {false, "exit code " + std::to_string(code)};
    const Json e = Json::parse(out)["estimate"];
    const double c = from_hex(e["c"]);
    return {std::fabs(c - 0.5) <= 0.02 && secs < 60.0,
            "c=" + fmt("%.6f", c) + " width=" + fmt("%.2e", from_hex(e["width"])) + " time=" + fmt("%.1fs", secs)};
}

Outcome isotypic_vs_oracle() {
    std::size_t cases = 0;
    for (int N = 1; N <= 2; ++N) {
        const GradedAlgebra a = monomial_algebra(N);
        for (int mask = 1; mask < (1 << (N + 1)); ++mask) {
            std::vector<int> vars;
            for (int v = 0; v <= N; ++v)
                if (mask & (1 << v)) vars.push_back(v);
            if (static_cast<int>(vars.size()) > N) continue;
            const GradedIdeal I = GradedIdeal::coordinate(a, vars);
            for (int n = 0; n <= 8; ++n) {
                const IsotypicDecomposition d = isotypic_decomposition_at(a, I, n);
                const std::size_t dim = a.ambient_dimension(n);
                if (!d.r1_E0_is_full || !d.chain_ok || d.components.size() != static_cast<std::size_t>(n + 1))
                    return {false, "structure N=" + std::to_string(N) + " n=" + std::to_string(n)};
                for (const auto& c : d.components) {
                    const auto here = oracle::monomials_in_power(a, vars, c.l, n);
                    const auto next = oracle::monomials_in_power(a, vars, c.l + 1, n);
                    const bool e_ok = c.E == oracle::span_of(here, dim) && c.r1 == c.E;
                    const bool f_ok = c.F.free_rank == here.size() - next.size() && c.F.torsion.empty();
                    bool chain = true;
                    if (c.l < n) chain = lattice_contains(c.E, d.components[c.l + 1].E);
                    RationalMatrix phi(c.phi.rows(), c.phi.cols());
                    for (std::size_t i = 0; i < phi.rows(); ++i)
                        for (std::size_t j = 0; j < phi.cols(); ++j) phi(i, j) = Rational(c.phi(i, j));
                    const bool phi_ok = c.phi_isomorphism && phi.rows() == phi.cols() &&
                                        phi.rows() == c.F.free_rank && abs(oracle::determinant(phi)) == 1;
                    if (!(e_ok && f_ok && chain && phi_ok && c.exact))
                        return {false, "mismatch N=" + std::to_string(N) + " n=" + std::to_string(n) +
                                           " l=" + std::to_string(c.l)};
                    ++cases;
                }
            }
        }
    }
    return {true, std::to_string(cases) + " (N,I,n,l) blocks match"};
}

Outcome conservation_exact() {
    double worst = 0.0;
    for (int N : {1, 2}) {
        const GradedAlgebra a = monomial_algebra(N);
        const GradedIdeal I = GradedIdeal::coordinate(a, {N});
        const ConservationReport r = conservation_check(a, I, MetricSpec::fubini_study(), 0, 12);
        if (!r.passed) return {false, "report failed for P^" + std::to_string(N)};
        for (const auto& d : r.degrees) {
            if (!d.exact || d.defect != 0.0) return {false, "nonzero defect at n=" + std::to_string(d.n)};
            // Diagonal Gram with monomial subquotients: parts are sums over
            // monomials of exact x_N-degree l.
            const auto basis = a.basis(d.n);
            for (int l = 0; l <= d.n; ++l) {
                double ref = 0.0;
                for (const auto& e : basis)
                    if (e[N] == l) ref -= 0.5 * std::log(oracle::fs_entry(e));
                worst = std::max(worst, std::fabs(d.parts.at(l) - ref) / std::max(1.0, std::fabs(ref)));
            }
        }
    }
    return {worst < 1e-12, "zero defect n<=12; parts vs oracle " + fmt("%.1e", worst)};
}

Outcome conservation_numeric_fs() {
    const ConservationNumeric r = conservation_numeric(fubini_study_symbol(), 10, 200);
    return {r.passed && r.difference < 0.05, "fiber1=" + fmt("%.6f", r.fiber_one.c) + " fiberinf=" +
                                                 fmt("%.6f", r.fiber_infinity.c) + " diff=" + fmt("%.2e", r.difference)};
}

Outcome lattice_calculus() {
    testing::Gen g(20240601);
    double worst_sum = 0.0, worst_scale = 0.0, worst_mono = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t k = static_cast<std::size_t>(g.integer(1, 8));
        const RationalMatrix gram = testing::random_definite_gram(g, k, 2, 3);
        const SeminormedLattice L(gram);
        const FiltrationChi f = filtration_chi_sum(L, testing::random_full_flag(g, k, 2));
        if (!f.exact_identity) return {false, "exact filtration identity failed at trial " + std::to_string(trial)};
        const double ref = -0.5 * std::log(oracle::determinant(gram).get_d());
        worst_sum = std::max({worst_sum, std::fabs(f.sum - ref) / std::max(1.0, std::fabs(ref)),
                              std::fabs(f.total - ref) / std::max(1.0, std::fabs(ref))});

        // Adding a semidefinite term enlarges the norm and lowers chi.
        RationalMatrix c(k, 1);
        for (std::size_t i = 0; i < k; ++i) c(i, 0) = g.rational(2, 2);
        RationalMatrix bigger = gram;
        const RationalMatrix extra = c * c.transpose();
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) bigger(i, j) += extra(i, j);
        const double lo = chi(SeminormedLattice(bigger)), hi = chi(L);
        worst_mono = std::max(worst_mono, (lo - hi) / std::max(1.0, std::fabs(hi)));

        const double alpha = g.uniform(-2.0, 2.0);
        const int w = static_cast<int>(g.integer(-3, 3));
        const double scaled = chi(scale(L, alpha, w));
        const double expect = hi - alpha * w * static_cast<double>(k);
        worst_scale = std::max(worst_scale, std::fabs(scaled - expect) / std::max(1.0, std::fabs(expect)));
    }
    const bool pass = worst_sum <= 1e-12 && worst_scale <= 1e-12 && worst_mono <= 1e-12;
    return {pass, "1000 flags exact; sum err " + fmt("%.1e", worst_sum) + " scale err " + fmt("%.1e", worst_scale) +
                      " monotone excess " + fmt("%.1e", std::max(0.0, worst_mono))};
}

Outcome theta_suite() {
    const double h0 = h0_theta(SeminormedLattice::standard(1));
    const double ref = oracle::theta_rank_one(1.0);
    bool pass = std::fabs(h0 - 0.0829015200) < 1e-6 && std::fabs(h0 - ref) < 1e-6;
    testing::Gen g(6006);
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t k = static_cast<std::size_t>(g.integer(1, 6));
        const SeminormedLattice L(testing::random_definite_gram(g, k, 2, 2));
        const double h = h0_theta(L);
        worst = std::min(worst, h - std::max(0.0, chi(L)));
    }
    pass = pass && worst >= -1e-12;
    return {pass, "h0(Z)=" + fmt("%.10f", h0) + "; min h0-max(0,chi) over 500 = " + fmt("%.3e", worst)};
}

Outcome fs_quadrature() {
    double worst = 0.0, worst_oracle = 0.0;
    for (int N : {1, 2}) {
        const GradedAlgebra a = monomial_algebra(N);
        for (int n = 0; n <= (N == 1 ? 20 : 8); ++n) {
            const RationalMatrix exact = fs_gram(N, n);
            const auto quad = fs_gram_quadrature(N, n);
            const auto basis = a.basis(n);
            for (std::size_t i = 0; i < quad.size(); ++i) {
                const double e = exact(i, i).get_d();
                worst = std::max(worst, std::fabs(quad[i] / e - 1.0));
                const double o = N == 1 ? oracle::fs_p1_quadrature(n, basis[i][1]) : oracle::fs_p2_quadrature(basis[i]);
                worst_oracle = std::max(worst_oracle, std::fabs(o / e - 1.0));
            }
        }
    }
    return {worst < 1e-6 && worst_oracle < 1e-6,
            "library quadrature " + fmt("%.1e", worst) + ", test-side quadrature " + fmt("%.1e", worst_oracle)};
}

Outcome envelope_invariance() {
    // Minimum of two Fubini-Study weights: not convex near the crossing.
    const double T = 12.0;
    const std::size_t nodes = 32769;
    const ToricSymbol phi =
        pointwise_min(fubini_study_symbol(1, T, nodes),
                      shift(sample_symbol([](double t) { return fs_phi(t - 3.0); }, 0.0, 1.0, T, nodes), 1.5));
    const ToricSymbol env = equilibrium_envelope(phi);
    QuadratureOptions q;
    q.relative_tolerance = 5e-2;
    const Geometry p1 = Geometry::projective_space(1);
    const auto a = estimate_invariants(chi_sequence(p1, MetricSpec::toric(phi, 0.0, q), 10, 100), 2);
    const auto b = estimate_invariants(chi_sequence(p1, MetricSpec::toric(env, 0.0, q), 10, 100), 2);
    const double gap = std::fabs(a.c - b.c);
    bool pass = !is_convex(phi) && gap < 0.05;

    testing::Gen g(31337);
    std::size_t bad = 0, oracle_checked = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const ToricSymbol s = testing::random_symbol(g, 33, 4.0, 2.0);
        ToricSymbol larger = s;
        for (auto& v : larger.values) v += 0.5 * g.uniform();
        const ToricSymbol e = equilibrium_envelope(s);
        const ToricSymbol ee = equilibrium_envelope(e);
        const ToricSymbol el = equilibrium_envelope(larger);
        for (std::size_t i = 0; i < s.nodes; ++i) {
            if (e.values[i] > s.values[i] + 1e-12) ++bad;
            if (std::fabs(ee.values[i] - e.values[i]) > 1e-12) ++bad;
            if (e.values[i] > el.values[i] + 1e-12) ++bad;
        }
        if (trial % 20 == 0) {
            std::vector<double> t;
            for (std::size_t i = 0; i < s.nodes; ++i) t.push_back(s.node(i));
            const auto ref = oracle::envelope_1d(t, s.values, 0.0, 1.0);
            for (std::size_t i = 0; i < s.nodes; ++i)
                if (std::fabs(ref[i] - e.values[i]) > 1e-10) ++bad;
            ++oracle_checked;
        }
    }
    pass = pass && bad == 0;
    return {pass, "c(phi)=" + fmt("%.5f", a.c) + " c(env)=" + fmt("%.5f", b.c) + " gap=" + fmt("%.2e", gap) +
                      "; 10^4 symbols, " + std::to_string(bad) + " violations, " + std::to_string(oracle_checked) +
                      " oracle comparisons"};
}

Outcome sequence_inequality_suite() {
    testing::Gen g(4242);
    double min_slack = HUGE_VAL;
    for (int trial = 0; trial < 10000; ++trial) {
        const int N = static_cast<int>(g.integer(0, 5));
        const double eps = 1.0 / std::sqrt(2.0 * (N + 1));
        std::map<std::vector<int>, double> support;
        const int count = static_cast<int>(g.integer(1, 30));
        for (int e = 0; e < count; ++e) {
            std::vector<int> idx;
            for (int k = 0; k <= N; ++k) idx.push_back(static_cast<int>(g.integer(0, 4)));
            support[idx] = g.uniform() < 0.1 ? 0.0 : g.uniform(0.0, 10.0);
        }
        std::vector<SequenceEntry> b;
        double lhs = 0.0, weighted = 0.0;
        for (const auto& [idx, v] : support) {
            b.push_back({idx, v});
            int d = 0;
            for (int x : idx) d += x;
            lhs += v * v;
            weighted += v * std::pow(eps, d);
        }
        const SequenceInequality r = sequence_inequality_check(b, N, eps);
        const double slack = lhs - 0.5 * weighted * weighted;
        if (!r.holds || slack < 0.0 || std::fabs(r.slack - slack) > 1e-9 * std::max(1.0, lhs))
            return {false, "violated at trial " + std::to_string(trial)};
        if (lhs > 0) min_slack = std::min(min_slack, slack / lhs);
    }
    return {true, "10^4 vectors; min relative slack " + fmt("%.4f", min_slack)};
}

Outcome determinism() {
    const auto dir = std::filesystem::temp_directory_path() / "ahilb_acceptance_cache";
    std::filesystem::remove_all(dir);
    const std::vector<std::vector<std::string>> commands{
        {"invariant", "--variety", "p1", "--metric", "fs", "--r", "2", "--n-max", "200"},
        {"chi", "--metric", "toric:fs", "--n-max", "40", "--cache-dir", dir.string()},
        {"invariant", "--metric", "toric:fs", "--n-min", "10", "--n-max", "100", "--cache-dir", dir.string()},
        {"conserve", "--variety", "p2", "--ideal", "x2", "--n-max", "6"},
        {"check", "--seed", "17"}};
    std::size_t compared = 0;
    for (const auto& cmd : commands) {
        const std::string first = run_cli(cmd);  // cold cache for the toric commands
        const std::string second = run_cli(cmd); // warm cache
        if (first != second || first.empty()) return {false, "output differs for " + cmd[0]};
        ++compared;
    }
    // Cached and uncached runs agree.
    const std::string cached = run_cli({"chi", "--metric", "toric:fs", "--n-max", "40", "--cache-dir", dir.string()});
    const std::string uncached = run_cli({"chi", "--metric", "toric:fs", "--n-max", "40"});
    if (cached != uncached) return {false, "cached and uncached toric output differ"};
    std::filesystem::remove_all(dir);
    return {true, std::to_string(compared) + " commands byte-identical cold/warm; cache-free run identical"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"height of P^1", height_of_p1},
        {"isotypic decomposition", isotypic_vs_oracle},
        {"conservation exact core", conservation_exact},
        {"conservation numeric", conservation_numeric_fs},
        {"lattice calculus", lattice_calculus},
        {"theta suite", theta_suite},
        {"FS Gram validation", fs_quadrature},
        {"envelope invariance", envelope_invariance},
        {"sequence inequality", sequence_inequality_suite},
        {"determinism", determinism}};
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failures;
        std::printf("criterion %2zu: %s  %-26s %s  [%.1fs]\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
