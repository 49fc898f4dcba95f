#pragma once

#include <optional>
#include <vector>

#include "ahilb/matrix.hpp"

namespace ahilb {

/// Row Hermite normal form of the lattice spanned by the rows of `generators`.
///
/// The result has full row rank, pivots strictly increasing to the right,
/// positive pivots, and entries above each pivot reduced into [0, pivot).
/// It is a canonical basis: two generator sets span the same lattice iff
/// their normal forms are equal.
IntMatrix hermite_normal_form(const IntMatrix& generators);

/// Pivot column of each row of a matrix already in Hermite normal form.
std::vector<std::size_t> pivot_columns(const IntMatrix& hnf);

/// Coordinates x with x * basis == v, for `basis` in Hermite normal form.
/// Empty when v is not in the lattice.
std::optional<IntVector> solve_in_hnf(const IntMatrix& basis, std::span<const BigInt> v);

/// Expresses every row of `rows` in the coordinates of `basis` (HNF).
std::optional<IntMatrix> express_in_basis(const IntMatrix& basis, const IntMatrix& rows);

bool lattice_contains(const IntMatrix& big_hnf, const IntMatrix& small);

/// Rank over Q of the row space.
std::size_t row_rank(const IntMatrix& m);

/// Smith form of a full-row-rank k x m matrix F.
///
/// `diagonal` holds d_1 | d_2 | ... | d_k (all positive) and the rows of the
/// unimodular m x m matrix `adapted_basis` (W) satisfy
///     rowspan(F) = span(d_1 W_1, ..., d_k W_k).
struct SmithForm {
    std::vector<BigInt> diagonal;
    IntMatrix adapted_basis;
};

SmithForm smith_form(const IntMatrix& full_row_rank);

/// Structure of a subquotient U/D of lattices D ⊆ U ⊆ Z^m.
struct Subquotient {
    IntMatrix numerator;       ///< HNF basis of U (ambient coordinates)
    IntMatrix denominator;     ///< HNF basis of D (ambient coordinates)
    IntMatrix denominator_in_numerator;  ///< D expressed in U coordinates
    SmithForm smith;           ///< of denominator_in_numerator
    std::size_t free_rank = 0;
    std::vector<BigInt> torsion;  ///< invariant factors > 1

    /// Representatives in U of a basis of the free part of U/D, expressed in
    /// numerator coordinates (rows of the adapted basis past the denominator
    /// rank).
    IntMatrix free_lift_coordinates() const;
    /// Same representatives in ambient coordinates.
    IntMatrix free_lift() const;
    /// Order of the torsion subgroup.
    BigInt torsion_order() const;
};

/// Computes U/D; throws PreconditionError when D is not contained in U.
Subquotient subquotient(const IntMatrix& numerator, const IntMatrix& denominator);

/// Determinant of a square integer matrix (fraction-free Bareiss).
BigInt determinant(const IntMatrix& m);

/// Inverse of a unimodular integer matrix; throws when |det| != 1.
IntMatrix unimodular_inverse(const IntMatrix& m);

}  // namespace ahilb
