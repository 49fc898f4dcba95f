#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ahilb/deformation.hpp"
#include "ahilb/graded.hpp"
#include "ahilb/lattice.hpp"
#include "ahilb/toric.hpp"

namespace ahilb {

/// Persistent store for the toric Grams of one metric, keyed by degree.
class GramStore {
public:
    virtual ~GramStore() = default;
    virtual std::optional<ToricGram> load(int n) = 0;
    virtual void save(const ToricGram& gram) = 0;
};

/// A metric on O(1): Fubini-Study (exact rational Grams on any P^N) or a
/// toric symbol on P^1, optionally with its weight shifted by a constant.
///
/// Weight convention: the metric is exp(-n phi) in degree n, so a larger
/// weight is a smaller metric and raises chi.
struct MetricSpec {
    enum class Kind { FubiniStudy, Toric };
    Kind kind = Kind::FubiniStudy;
    ToricSymbol symbol;
    double shift = 0.0;
    QuadratureOptions quadrature;
    std::shared_ptr<GramStore> store;  ///< optional, toric only

    static MetricSpec fubini_study(double shift = 0.0);
    static MetricSpec toric(ToricSymbol symbol, double shift = 0.0, QuadratureOptions quadrature = {});
};

/// Gram of S_n (monomial basis) for the metric. Toric metrics need N = 1.
SeminormedLattice degree_lattice(const MetricSpec& metric, int N, int n);

/// Geometry: a free algebra (P^N) and a degreewise module over it.
struct Geometry {
    GradedAlgebra algebra;
    GradedModule module;

    static Geometry projective_space(int N);
};

struct ChiPoint {
    int n = 0;
    double chi = 0.0;
    std::size_t rank = 0;
};

/// chi of M_n with the subquotient norm of the metric, n in [n_min, n_max].
std::vector<ChiPoint> chi_sequence(const Geometry& geometry, const MetricSpec& metric, int n_min, int n_max);

struct EstimateOptions {
    std::size_t min_points = 20;
    double residual_threshold = 0.05;  ///< RMS residual gate on normalized values
    double converged_width = 0.02;
};

struct InvariantEstimate {
    int r = 0;
    std::vector<int> n;
    std::vector<double> chi;
    std::vector<double> normalized;  ///< r!/n^r chi
    std::vector<double> residuals;
    double coefficients[3] = {0, 0, 0};  ///< 1, log(n)/n, 1/n
    double rms_residual = 0.0;
    double c = 0.0;
    double width = 0.0;
    double c_upper = 0.0;
    double c_lower = 0.0;
    bool converged = false;
};

/// Least-squares fit of r!/n^r chi_n against {1, log(n)/n, 1/n}. Throws
/// PreconditionError on too few points or a range spanning less than a
/// decade, ComputationError when the residual gate fails.
InvariantEstimate estimate_invariants(const std::vector<ChiPoint>& sequence, int r, const EstimateOptions& options = {});

struct FamilyEstimate {
    std::vector<InvariantEstimate> members;
    double limit = 0.0;
    bool increasing = false;
};

/// Estimates along a family of metrics monotone in the seminorm order; the
/// limit is the last member. Throws PreconditionError when the estimates are
/// not monotone within `tolerance`.
FamilyEstimate estimate_family(const std::vector<std::vector<ChiPoint>>& sequences, int r,
                               const EstimateOptions& options = {}, double tolerance = 1e-9);

struct ConservationDegree {
    int n = 0;
    std::vector<double> parts;  ///< chi(F(l,n)) for l = 0 .. n
    double sum = 0.0;
    double chi_total = 0.0;
    bool exact = false;         ///< product of subquotient covolumes equals the total
    double defect = 0.0;
};

struct ConservationReport {
    std::vector<ConservationDegree> degrees;
    int threshold_n0 = 0;
    std::vector<int> failing_degrees;
    bool passed = false;
};

/// Filtration core: sum over l of chi(I^l_n / I^{l+1}_n) against chi(S_n),
/// with rational Grams (Fubini-Study) compared exactly.
ConservationReport conservation_check(const GradedAlgebra& a, const GradedIdeal& ideal, const MetricSpec& metric,
                                      int n_min, int n_max);

struct ConservationNumeric {
    InvariantEstimate fiber_one;
    InvariantEstimate fiber_infinity;
    double difference = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

/// Built-in deformation of P^1 along (x1): invariant of the symbol on the
/// fiber over 1 against the deformed symbol on the fiber at infinity,
/// whose degree-n sections are the blocks F(l,n) (monomial weight l).
ConservationNumeric conservation_numeric(const ToricSymbol& symbol, int n_min, int n_max, double tolerance = 0.05,
                                         const QuadratureOptions& quadrature = {});

struct ProjectionDegree {
    int n = 0;
    std::size_t rank = 0;
    double pushforward_chi = 0.0;  ///< (S/I)_n on X with the quotient norm
    double restricted_chi = 0.0;   ///< S(Y)_n with Y's own Fubini-Study Gram
    double defect = 0.0;
    double predicted_defect = 0.0;
    double normalized_defect = 0.0;
    bool match = false;
};

struct ProjectionReport {
    std::vector<ProjectionDegree> degrees;
    bool passed = false;
};

/// X = P^N, Y = V(ideal) for a coordinate ideal with Fubini-Study metrics on
/// both sides. The L2 norms differ by the per-monomial volume factor
/// N_Y!(n+N_X)! / (N_X!(n+N_Y)!), so the per-degree defect is compared
/// with its closed form and the normalized defect tends to 0.
ProjectionReport projection_formula_check(const GradedAlgebra& a, const GradedIdeal& ideal, int n_min, int n_max,
                                          double tolerance = 1e-9);

struct AdditivityDegree {
    int n = 0;
    double chi_total = 0.0;
    double chi_sub = 0.0;
    double chi_quotient = 0.0;
    bool exact = false;
    double defect = 0.0;
};

struct AdditivityReport {
    std::vector<AdditivityDegree> degrees;
    double normalized_total = 0.0;  ///< r!/n^r chi at n_max
    double normalized_sum = 0.0;
    bool passed = false;
};

AdditivityReport additivity_check(const GradedAlgebra& a, const GradedIdeal& ideal, const MetricSpec& metric,
                                  int n_min, int n_max, int r);

struct MonotonicityReport {
    std::vector<int> n;
    std::vector<double> chi_larger;   ///< chi for the larger metric (smaller weight)
    std::vector<double> chi_smaller;
    bool passed = false;
};

/// `larger` must be the larger metric, i.e. its weight is pointwise <= the
/// weight of `smaller`. Checks chi_n(larger) <= chi_n(smaller) on P^1.
MonotonicityReport monotonicity_check(const MetricSpec& larger, const MetricSpec& smaller, int n_min, int n_max);

struct ApproximationReport {
    std::vector<double> estimates;  ///< per family member
    double target = 0.0;
    double gap = 0.0;
    bool increasing = false;  ///< weights increase to the limit (metrics decrease)
    bool monotone = false;
    bool passed = false;
};

/// `family` converges monotonically to `limit` from either side in the
/// weight order; estimates must move monotonically in the same direction and
/// end within `tolerance` of the estimate of `limit`.
ApproximationReport approximation_check(const MetricSpec& limit, const std::vector<MetricSpec>& family, int n_min,
                                        int n_max, int r, double tolerance = 0.05, const EstimateOptions& options = {});

/// Pointwise weight comparison of two toric metrics including their shifts
/// (Fubini-Study counts as its symbol on the grid of the other side).
bool weight_leq(const MetricSpec& a, const MetricSpec& b, double tolerance = 0.0);

}  // namespace ahilb
