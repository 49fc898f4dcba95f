#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ahilb/graded.hpp"

namespace ahilb {

/// One G_m-isotypic block u^n I^l_n (u/t)^l of the degree-n sections of the
/// deformation. The (u, t) coordinates are never materialized; only the
/// l-index and the character exponent n + l are kept.
struct DeformationBlock {
    int l = 0;
    int weight = 0;
    IntMatrix basis;  ///< HNF of I^l_n in ambient monomial coordinates
    std::size_t rank = 0;
};

struct DeformationBlocks {
    int n = 0;
    std::vector<DeformationBlock> blocks;  ///< l = -n .. n
    std::size_t total_rank = 0;

    const DeformationBlock& block(int l) const { return blocks.at(static_cast<std::size_t>(l + n)); }
};

DeformationBlocks deformation_blocks(const GradedAlgebra& a, const GradedIdeal& ideal, int n);

/// Brute-force rank of u^n I^l_n (u/t)^l for coordinate ideals on P^N,
/// counting monomials whose ideal-variable degree is at least max(l, 0).
std::size_t monomial_block_rank(int projective_dim, const std::vector<int>& ideal_vars, int l, int n);

struct FiberInfinityBlock {
    int l = 0;
    Subquotient piece;  ///< I^l_n / I^{l+1}_n
};

/// Degree-n piece of the fiber at infinity, ⊕_{0<=l<=n} I^l_n / I^{l+1}_n.
struct FiberInfinityPiece {
    int n = 0;
    std::vector<FiberInfinityBlock> blocks;
    std::size_t free_rank = 0;
    std::vector<BigInt> torsion;
};

FiberInfinityPiece fiber_infinity_piece(const GradedAlgebra& a, const GradedIdeal& ideal, int n);

/// The maps attached to one isotypic component E(l,n).
struct IsotypicComponent {
    int l = 0;
    IntMatrix E;          ///< HNF basis of E(l,n) = I^l_n
    IntMatrix r1;         ///< E coordinates -> S_n (inclusion)
    Subquotient F;        ///< F(l,n) = I^l_n / I^{l+1}_n
    IntMatrix rinf;       ///< E coordinates -> free coordinates of F
    IntMatrix rinf_torsion;  ///< E coordinates -> torsion coordinates of F (mod invariants)
    IntMatrix phi;        ///< free part of r1(E_l)/r1(E_{l+1}) -> F(l,n)
    bool phi_isomorphism = false;
    bool exact = false;   ///< 0 -> r1(E_{l+1}) -> r1(E_l) -> F -> 0 ranks/torsion agree
};

struct IsotypicDecomposition {
    int n = 0;
    std::vector<IsotypicComponent> components;  ///< l = 0 .. n
    bool r1_E0_is_full = false;
    bool chain_ok = false;
    bool holds() const;
};

IsotypicDecomposition isotypic_decomposition_at(const GradedAlgebra& a, const GradedIdeal& ideal, int n);

/// Decomposition at degree n together with a scan of degrees 0..n: the
/// minimal n0 such that every identity holds on [n0, n] (n + 1 when the
/// identities fail at n itself) and the degrees where something failed.
struct IsotypicReport {
    IsotypicDecomposition decomposition;
    int threshold_n0 = 0;
    std::vector<int> failing_degrees;
};

IsotypicReport isotypic_decomposition(const GradedAlgebra& a, const GradedIdeal& ideal, int n);

/// A bilinear relation among x_i, y_i, t, u written as sum of coefficient * left * right.
struct BilinearRelation {
    struct Term {
        int coefficient = 1;
        std::string left;
        std::string right;
    };
    std::vector<Term> terms;
    std::string to_string() const;
};

/// Equations of D_YX inside P^{N+M} x P^1 for X = P^N and Y = div(x_0..x_{M-1}):
/// t*y_i - u*x_i and x_j*y_i - y_j*x_i for j < i.
std::vector<BilinearRelation> embedding_relations(int ambient_dim, int generator_count);

struct BlockRestriction {
    int l = 0;
    IntMatrix map;  ///< source block coordinates -> target block coordinates
    bool surjective = false;
};

struct FunctorialRestriction {
    int n = 0;
    std::vector<BlockRestriction> blocks;  ///< l = -n .. n
    bool all_surjective = false;
};

/// Degree-n map S_n(source) -> S_n(target) induced by sending each source
/// variable to the linear form given by a row of `variable_images`.
IntMatrix induced_degree_map(const GradedAlgebra& source, const GradedAlgebra& target,
                             const IntMatrix& variable_images, int n);

/// Block-wise map between deformation blocks induced by a degreewise
/// surjection carrying `source_ideal` onto `target_ideal`.
FunctorialRestriction functorial_restriction(const GradedAlgebra& source, const GradedIdeal& source_ideal,
                                             const GradedAlgebra& target, const GradedIdeal& target_ideal,
                                             const IntMatrix& variable_images, int n);

}  // namespace ahilb
