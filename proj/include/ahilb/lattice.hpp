#pragma once

#include <variant>
#include <vector>

#include <boost/multiprecision/mpfr.hpp>

#include "ahilb/matrix.hpp"

namespace ahilb {

/// Extended-precision real used for floating Gram factorizations.
using Real = boost::multiprecision::mpfr_float;
using RealMatrix = Matrix<Real>;

/// Working precision (in bits) for Real arithmetic on this thread.
void set_working_precision(unsigned bits);
unsigned working_precision();

/// Sets the working precision for the lifetime of the guard.
class PrecisionGuard {
public:
    explicit PrecisionGuard(unsigned bits);
    ~PrecisionGuard();
    PrecisionGuard(const PrecisionGuard&) = delete;
    PrecisionGuard& operator=(const PrecisionGuard&) = delete;

private:
    unsigned saved_;
};

using Gram = std::variant<RationalMatrix, RealMatrix>;

/// A finitely generated abelian group Z^r ⊕ torsion with a Hilbertian
/// seminorm on its free part, given by a Gram matrix scaled by
/// exp(2 * log_scale).
class SeminormedLattice {
public:
    SeminormedLattice() : gram_(RationalMatrix()) {}
    explicit SeminormedLattice(Gram gram, std::vector<BigInt> torsion = {}, double log_scale = 0.0);

    static SeminormedLattice standard(std::size_t rank);

    std::size_t rank() const;
    const Gram& gram() const { return gram_; }
    const std::vector<BigInt>& torsion() const { return torsion_; }
    double log_scale() const { return log_scale_; }
    bool is_rational() const { return std::holds_alternative<RationalMatrix>(gram_); }
    bool is_zero() const { return rank() == 0 && torsion_order() == 1; }
    BigInt torsion_order() const;

    /// Gram matrix including the scale factor, in extended precision.
    RealMatrix real_gram() const;
    /// Scaled Gram in double precision (for enumeration).
    Matrix<double> double_gram() const;

private:
    Gram gram_;
    std::vector<BigInt> torsion_;
    double log_scale_ = 0.0;
};

/// Arithmetic degree: 0 for the zero group, +inf for a genuine seminorm,
/// otherwise -1/2 log det(gram) + log #torsion.
double chi(const SeminormedLattice& lattice);

/// Exact form of the arithmetic degree for rational Grams:
/// chi = -1/2 log(covolume_sq) - rank * log_scale, with
/// covolume_sq = det(gram) / #torsion^2.
struct ExactChi {
    enum class Kind { Zero, Finite, Infinite };
    Kind kind = Kind::Zero;
    Rational covolume_sq = 1;
    double log_scale_term = 0.0;  ///< -rank * log_scale

    double value() const;
};

ExactChi chi_exact(const SeminormedLattice& lattice);

/// Exact product of the covolumes of a family, i.e. the exact form of a sum
/// of arithmetic degrees. Infinite if any term is.
ExactChi exact_sum(const std::vector<ExactChi>& terms);
bool exact_equal(const ExactChi& a, const ExactChi& b);

/// a - b from the exact covolume ratio; 0 exactly when the covolumes agree.
double exact_difference(const ExactChi& a, const ExactChi& b);

/// Restriction of the seminorm to the sublattice spanned by the rows of
/// `basis` (coordinates in the free part of `lattice`).
SeminormedLattice induced_sub(const SeminormedLattice& lattice, const IntMatrix& basis);

/// Quotient of `lattice` by the subgroup spanned by the rows of `sub`
/// (possibly non-saturated, possibly dependent generators), with the
/// quotient seminorm on its free part.
SeminormedLattice quotient_norm(const SeminormedLattice& lattice, const IntMatrix& sub);

/// Induced-then-quotient norm on numerator/denominator, both given by row
/// bases in the coordinates of `lattice` with denominator ⊆ numerator.
SeminormedLattice subquotient_norm(const SeminormedLattice& lattice, const IntMatrix& numerator,
                                   const IntMatrix& denominator);

struct FiltrationChi {
    std::vector<double> parts;
    std::vector<ExactChi> exact_parts;  ///< filled for rational Grams
    double sum = 0.0;
    double total = 0.0;                 ///< chi(L)
    bool exact_identity = false;        ///< product of covolumes matches exactly
};

/// Subquotient arithmetic degrees of a chain 0 = F_0 ⊆ F_1 ⊆ ... ⊆ F_k = L.
/// `chain` holds the row bases of F_1 .. F_{k-1}; F_k is L itself (including
/// its torsion). Throws PreconditionError on a non-increasing chain.
FiltrationChi filtration_chi_sum(const SeminormedLattice& lattice, const std::vector<IntMatrix>& chain);

/// Multiplies the seminorm by exp(alpha * weight).
SeminormedLattice scale(const SeminormedLattice& lattice, double alpha, int weight);

struct ThetaOptions {
    double tail_tolerance = 1e-12;
    std::size_t max_rank = 12;
};

/// log sum_{v} exp(-pi ||v||^2) over the lattice (torsion elements have
/// norm zero). Accurate to tail_tolerance.
double h0_theta(const SeminormedLattice& lattice, const ThetaOptions& options = {});
/// h0_theta - chi.
double h1_theta(const SeminormedLattice& lattice, const ThetaOptions& options = {});

/// Radius R (in norm units) of the enumeration ellipsoid for a given rank
/// and tail tolerance.
double theta_radius(std::size_t rank, double tail_tolerance);

/// Determinant of a rational matrix by exact elimination.
Rational determinant(const RationalMatrix& m);

/// Whether the symmetric matrix is positive semidefinite (exact).
bool is_positive_semidefinite(const RationalMatrix& m);

}  // namespace ahilb
