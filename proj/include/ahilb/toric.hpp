#pragma once

#include <functional>
#include <vector>

#include "ahilb/lattice.hpp"

namespace ahilb {

/// Weight function of a rotation-invariant metric in log coordinates.
///
/// The metric is |s|(t) = exp(a·t - n·phi(t)) for the monomial of weight a
/// in degree n. Values live on a uniform grid over [-T, T]^dim with `nodes`
/// points per axis (row-major, first axis slowest).
///
/// For dim 1, `slopes` = {lo, hi} are the asymptotic slopes at -inf and +inf
/// and `polytope` = {0, degree}. For dim 2, `polytope` holds the vertices of
/// the moment polygon flattened as {a0, b0, a1, b1, ...} and `slopes` is
/// unused.
struct ToricSymbol {
    int dim = 1;
    double T = 30.0;
    std::size_t nodes = 4097;
    std::vector<double> values;
    std::vector<double> slopes{0.0, 1.0};
    std::vector<double> polytope{0.0, 1.0};
    bool semipositive = false;

    double step() const { return 2.0 * T / static_cast<double>(nodes - 1); }
    double node(std::size_t i) const { return -T + step() * static_cast<double>(i); }
    /// Value at t, extended linearly with the asymptotic slopes off the grid.
    double eval(double t) const;

    /// Throws PreconditionError when shapes or slopes are inconsistent.
    void validate() const;
};

ToricSymbol fubini_study_symbol(int dim = 1, double T = 30.0, std::size_t nodes = 4097);
/// Samples f on the grid (dim 1).
ToricSymbol sample_symbol(const std::function<double(double)>& f, double lo_slope, double hi_slope, double T = 30.0,
                          std::size_t nodes = 4097);
ToricSymbol shift(const ToricSymbol& sym, double alpha);
/// Pointwise minimum of two dim-1 symbols on the same grid.
ToricSymbol pointwise_min(const ToricSymbol& a, const ToricSymbol& b);
/// Convexity of the samples up to `tolerance` on second differences.
bool is_convex(const ToricSymbol& sym, double tolerance = 1e-12);

/// Closed-form L^2 Gram of the Fubini-Study metric on H^0(P^N, O(n)) in the
/// monomial basis: ||x^alpha||^2 = prod(alpha_i!) N! / (n+N)!.
RationalMatrix fs_gram(int N, int n);

/// Independent quadrature of the same entries (N = 1 or 2) in log
/// coordinates; entries in monomial order, as doubles.
std::vector<double> fs_gram_quadrature(int N, int n);

struct QuadratureOptions {
    double relative_tolerance = 1e-8;
};

/// Diagonal Gram of a dim-1 symbol in degree n against the normalized
/// Fubini-Study area measure, stored as logs of the diagonal entries.
struct ToricGram {
    int n = 0;
    std::vector<double> log_diagonal;  ///< index a = exponent of x1
    std::vector<double> error_bound;   ///< relative error estimate per entry
    double max_error = 0.0;

    SeminormedLattice lattice() const;
};

/// Throws ComputationError (with the estimated bound) when an entry misses
/// the tolerance.
ToricGram toric_gram_p1(const ToricSymbol& sym, int n, const QuadratureOptions& options = {});

/// Largest convex minorant with slopes in the moment polytope. Exact lower
/// hull in dim 1; discrete Legendre biconjugate in dim 2.
ToricSymbol equilibrium_envelope(const ToricSymbol& sym);

/// sup_t exp(a t - n phi(t)) (dim 1). +inf when the sup diverges.
double monomial_sup_norm(const ToricSymbol& sym, int a, int n);

/// Symbol on the fiber at infinity of the deformation of P^1 along (x1).
///
/// U(1)·T lies over t_u = 0 in the (t, t_u) coordinates of the deformation
/// surface, whose moment polygon is {0 <= a <= 1, -1 <= l <= a}. Its
/// conjugate is phi^*(a) independently of l, so the convex hull restricted
/// to the face l = a is sup_a (a t' - phi^*(a)).
ToricSymbol deformed_infinity_symbol(const ToricSymbol& sym);

struct SequenceEntry {
    std::vector<int> index;  ///< multi-index of length N+1
    double value = 0.0;
};

struct SequenceInequality {
    bool holds = false;
    double lhs = 0.0;   ///< sum |b|^2
    double rhs = 0.0;   ///< (sum |b| eps^{|n|})^2 / 2
    double slack = 0.0;
};

SequenceInequality sequence_inequality_check(const std::vector<SequenceEntry>& b, int N, double eps);

}  // namespace ahilb
