#include <doctest.h>

#include "ahilb/deformation.hpp"
#include "ahilb/errors.hpp"
#include "ahilb/integer_lattice.hpp"
#include "oracles.hpp"

using namespace ahilb;

namespace {

std::vector<std::size_t> block_ranks(const DeformationBlocks& b) {
    std::vector<std::size_t> out;
    for (const auto& blk : b.blocks) out.push_back(blk.rank);
    return out;
}

}  // namespace

TEST_CASE("deformation blocks") {
    const GradedAlgebra p1 = monomial_algebra(1);
    const GradedIdeal x1 = GradedIdeal::coordinate(p1, {1});

    const DeformationBlocks b1 = deformation_blocks(p1, x1, 1);
    CHECK(block_ranks(b1) == std::vector<std::size_t>{2, 2, 1});
    CHECK(b1.total_rank == 5);
    CHECK(b1.block(1).weight == 2);

    const DeformationBlocks b2 = deformation_blocks(p1, x1, 2);
    CHECK(block_ranks(b2) == std::vector<std::size_t>{3, 3, 3, 2, 1});
    CHECK(b2.total_rank == 12);

    const DeformationBlocks z = deformation_blocks(p1, GradedIdeal(p1, {}), 2);
    CHECK(block_ranks(z) == std::vector<std::size_t>{3, 3, 3, 0, 0});
}

TEST_CASE("deformation blocks: rank sum and containment") {
    for (int N = 1; N <= 3; ++N) {
        const GradedAlgebra a = monomial_algebra(N);
        for (int M = 1; M <= N; ++M) {
            std::vector<int> vars;
            for (int v = N - M + 1; v <= N; ++v) vars.push_back(v);
            const GradedIdeal I = GradedIdeal::coordinate(a, vars);
            for (int n = 0; n <= 4; ++n) {
                const DeformationBlocks b = deformation_blocks(a, I, n);
                std::size_t sum = 0;
                for (int l = -n; l <= n; ++l) {
                    sum += b.block(l).rank;
                    CHECK(b.block(l).rank == monomial_block_rank(N, vars, l, n));
                    CHECK(b.block(l).weight == n + l);
                    if (l > -n) CHECK(lattice_contains(b.block(l - 1).basis, b.block(l).basis));
                }
                CHECK(sum == b.total_rank);
            }
        }
    }
}

TEST_CASE("fiber at infinity pieces") {
    const GradedAlgebra p1 = monomial_algebra(1);
    const FiberInfinityPiece f = fiber_infinity_piece(p1, GradedIdeal::coordinate(p1, {1}), 3);
    REQUIRE(f.blocks.size() == 4);
    for (const auto& b : f.blocks) CHECK(b.piece.free_rank == 1);

    const GradedAlgebra p2 = monomial_algebra(2);
    const FiberInfinityPiece g = fiber_infinity_piece(p2, GradedIdeal::coordinate(p2, {2}), 2);
    std::vector<std::size_t> ranks;
    for (const auto& b : g.blocks) ranks.push_back(b.piece.free_rank);
    CHECK(ranks == std::vector<std::size_t>{3, 2, 1});

    const FiberInfinityPiece h = fiber_infinity_piece(p2, GradedIdeal::coordinate(p2, {2}), 0);
    REQUIRE(h.blocks.size() == 1);
    CHECK(h.blocks[0].piece.free_rank == 1);
}

TEST_CASE("isotypic decomposition") {
    const GradedAlgebra p1 = monomial_algebra(1);
    const IsotypicDecomposition d = isotypic_decomposition_at(p1, GradedIdeal::coordinate(p1, {1}), 4);
    CHECK(d.holds());
    const auto& c2 = d.components.at(2);
    CHECK(c2.l == 2);
    CHECK(c2.F.free_rank == 1);
    CHECK(c2.phi_isomorphism);

    const GradedAlgebra p2 = monomial_algebra(2);
    const IsotypicDecomposition e = isotypic_decomposition_at(p2, GradedIdeal::coordinate(p2, {1, 2}), 3);
    std::size_t total = 0;
    for (const auto& c : e.components) total += c.F.free_rank;
    CHECK(total == 10);
    CHECK(e.r1_E0_is_full);

    const IsotypicReport r = isotypic_decomposition(p2, GradedIdeal::coordinate(p2, {2}), 6);
    CHECK(r.threshold_n0 == 0);
    CHECK(r.failing_degrees.empty());
}

TEST_CASE("isotypic decomposition with torsion in the graded pieces") {
    // I = (2 x1): I^l / I^{l+1} picks up 2-torsion.
    const GradedAlgebra p1 = monomial_algebra(1);
    const GradedIdeal I(p1, {IntVector{0, 2}});
    const IsotypicDecomposition d = isotypic_decomposition_at(p1, I, 3);
    CHECK(d.holds());
    bool saw_torsion = false;
    for (const auto& c : d.components) saw_torsion = saw_torsion || !c.F.torsion.empty();
    CHECK(saw_torsion);
}

TEST_CASE("embedding relations") {
    auto strings = [](int N, int M) {
        std::vector<std::string> out;
        for (const auto& r : embedding_relations(N, M)) out.push_back(r.to_string());
        return out;
    };
    CHECK(strings(1, 1) == std::vector<std::string>{"t*y0 - u*x0"});
    CHECK(strings(2, 2) == std::vector<std::string>{"t*y0 - u*x0", "t*y1 - u*x1", "x0*y1 - y0*x1"});
    CHECK(strings(3, 0).empty());
    CHECK_THROWS_AS(embedding_relations(1, 3), PreconditionError);
}

TEST_CASE("functorial restriction") {
    const GradedAlgebra p2 = monomial_algebra(2);
    const GradedAlgebra p1 = monomial_algebra(1);
    IntMatrix kill_x2(3, 2);
    kill_x2(0, 0) = 1;
    kill_x2(1, 1) = 1;

    const FunctorialRestriction f = functorial_restriction(p2, GradedIdeal::coordinate(p2, {1}), p1,
                                                           GradedIdeal::coordinate(p1, {1}), kill_x2, 2);
    CHECK(f.all_surjective);
    CHECK(f.blocks.size() == 5);

    const FunctorialRestriction id = functorial_restriction(p1, GradedIdeal::coordinate(p1, {1}), p1,
                                                            GradedIdeal::coordinate(p1, {1}),
                                                            IntMatrix::identity(2), 3);
    CHECK(id.all_surjective);
    for (const auto& b : id.blocks) CHECK(b.map == IntMatrix::identity(b.map.rows()));

    CHECK_THROWS_AS(functorial_restriction(p2, GradedIdeal::coordinate(p2, {2}), p1, GradedIdeal::coordinate(p1, {1}),
                                           kill_x2, 2),
                    PreconditionError);
}
