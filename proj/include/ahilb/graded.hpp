#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ahilb/integer_lattice.hpp"

namespace ahilb {

using Exponent = std::vector<int>;

/// A homogeneous relation of the given degree, as integer coefficients on
/// the degree-`degree` monomial basis.
struct Relation {
    int degree = 0;
    IntVector coefficients;
};

/// Degreewise integer presentation of a graded ring generated in degree 1:
/// Z[x_0, ..., x_N] modulo an ideal generated by explicit homogeneous
/// relations.
///
/// Every sublattice of S_n is stored by its preimage in the free lattice on
/// degree-n monomials (which always contains the relation lattice R_n).
/// Monomials within a degree are ordered lexicographically with x_0 first,
/// so x_0^n has index 0.
class GradedAlgebra {
public:
    GradedAlgebra() = default;
    GradedAlgebra(int num_variables, std::vector<Relation> relations);

    int num_variables() const { return num_variables_; }
    int projective_dimension() const { return num_variables_ - 1; }
    const std::vector<Relation>& relations() const { return relations_; }
    bool is_free() const { return relations_.empty(); }

    std::vector<Exponent> basis(int n) const;
    std::size_t ambient_dimension(int n) const;
    std::size_t index_of(const Exponent& e) const;

    /// HNF basis of the relation lattice R_n in monomial coordinates.
    IntMatrix relation_lattice(int n) const;
    /// Free rank of S_n (the Hilbert function of the presented ring).
    std::size_t rank(int n) const;
    /// Invariant factors > 1 of S_n.
    std::vector<BigInt> torsion(int n) const;

    /// Multiplication by x_var as a map S_n -> S_{n+1} (rows: source basis).
    IntMatrix multiplication(int var, int n) const;
    /// The family S_1 (x) S_n -> S_{n+1}, one matrix per variable.
    std::vector<IntMatrix> mult(int n) const;

    /// Product of homogeneous elements of degrees p and q (monomial coordinates).
    IntVector multiply(std::span<const BigInt> a, int p, std::span<const BigInt> b, int q) const;

    /// Rows x_0^n ... spanning the whole ambient lattice of degree n.
    IntMatrix full_lattice(int n) const;
    /// The zero subgroup of S_n (i.e. R_n).
    IntMatrix zero_lattice(int n) const { return relation_lattice(n); }

private:
    int num_variables_ = 0;
    std::vector<Relation> relations_;
};

/// Polynomial ring of P^N: N+1 variables, no relations.
GradedAlgebra monomial_algebra(int projective_dim);

/// Homogeneous ideal generated by degree-1 elements.
class GradedIdeal {
public:
    GradedIdeal() = default;
    GradedIdeal(const GradedAlgebra& parent, std::vector<IntVector> generators);

    /// Ideal generated by the listed variables.
    static GradedIdeal coordinate(const GradedAlgebra& parent, const std::vector<int>& variables);

    const std::vector<IntVector>& generators() const { return generators_; }
    int num_variables() const { return num_variables_; }
    bool is_zero() const { return generators_.empty(); }

    /// The subset of variables generating the ideal, when it is generated by
    /// coordinate functions.
    std::optional<std::vector<int>> coordinate_variables() const;

private:
    int num_variables_ = 0;
    std::vector<IntVector> generators_;
};

/// HNF basis (ambient monomial coordinates) of I^l_n ⊆ S_n, I^l = S for l <= 0.
IntMatrix ideal_power_piece(const GradedAlgebra& a, const GradedIdeal& ideal, int l, int n);

/// Direct product enumeration of S_{n-l}·(I_1)^l, without the incremental
/// reduction used by ideal_power_piece.
IntMatrix ideal_power_piece_bruteforce(const GradedAlgebra& a, const GradedIdeal& ideal, int l, int n);

/// I^l_n / I^{l+1}_n with lift map to representatives in I^l_n.
Subquotient quotient_piece(const GradedAlgebra& a, const GradedIdeal& ideal, int l, int n);

/// Degreewise subquotient module U_n / D_n of the free monomial lattice.
class GradedModule {
public:
    enum class Kind { Ring, IdealPower, Quotient, Graded };

    /// S itself.
    static GradedModule ring(const GradedAlgebra& a);
    /// I^l as a submodule of S.
    static GradedModule ideal_power(const GradedAlgebra& a, const GradedIdeal& ideal, int l);
    /// S / I.
    static GradedModule quotient(const GradedAlgebra& a, const GradedIdeal& ideal);
    /// I^l / I^{l+1}.
    static GradedModule graded_piece(const GradedAlgebra& a, const GradedIdeal& ideal, int l);
    /// The zero module.
    static GradedModule zero(const GradedAlgebra& a);

    Kind kind() const { return kind_; }
    const GradedAlgebra& algebra() const { return algebra_; }

    IntMatrix numerator(int n) const;
    IntMatrix denominator(int n) const;
    Subquotient piece(int n) const;
    std::size_t rank(int n) const { return piece(n).free_rank; }

    /// Multiplication by x_var from the numerator of degree n to the
    /// numerator of degree n+1, in numerator coordinates.
    IntMatrix action(int var, int n) const;
    /// Checks that the action maps numerator and denominator into their
    /// degree n+1 counterparts for every variable.
    bool action_compatible(int n) const;

private:
    GradedModule(Kind kind, GradedAlgebra a, GradedIdeal ideal, int l, bool zero = false)
        : kind_(kind), algebra_(std::move(a)), ideal_(std::move(ideal)), power_(l), zero_(zero) {}

    Kind kind_;
    GradedAlgebra algebra_;
    GradedIdeal ideal_;
    int power_ = 0;
    bool zero_ = false;
};

/// Free ranks of S_n for n in [n_min, n_max].
std::vector<std::size_t> hilbert_function(const GradedAlgebra& a, int n_min, int n_max);
std::vector<std::size_t> hilbert_function(const GradedModule& m, int n_min, int n_max);

/// binomial(n, k) as an exact integer.
BigInt binomial(long n, long k);

}  // namespace ahilb
