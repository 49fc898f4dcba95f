#include <doctest.h>

#include <cmath>

#include "ahilb/errors.hpp"
#include "ahilb/lattice.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace ahilb;

namespace {

RationalMatrix rat(std::initializer_list<std::initializer_list<long>> rows) {
    std::vector<std::vector<Rational>> r;
    for (auto row : rows) {
        r.emplace_back();
        for (long x : row) r.back().push_back(Rational(x));
    }
    return RationalMatrix::from_rows(r, r.empty() ? 0 : r[0].size());
}

IntMatrix ints(std::initializer_list<std::initializer_list<long>> rows, std::size_t cols) {
    IntMatrix m(0, cols);
    for (auto row : rows) {
        IntVector v;
        for (long x : row) v.push_back(BigInt(x));
        m.append_row(v);
    }
    return m;
}

RationalMatrix inverse(const RationalMatrix& g) {
    const std::size_t n = g.rows();
    RationalMatrix a = g, inv = RationalMatrix::identity(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (a(p, c) == 0) ++p;
        a.swap_rows(p, c);
        inv.swap_rows(p, c);
        const Rational d = a(c, c);
        for (std::size_t j = 0; j < n; ++j) {
            a(c, j) /= d;
            inv(c, j) /= d;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || a(i, c) == 0) continue;
            const Rational f = a(i, c);
            for (std::size_t j = 0; j < n; ++j) {
                a(i, j) -= f * a(c, j);
                inv(i, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

}  // namespace

TEST_CASE("chi examples") {
    CHECK(chi(SeminormedLattice(rat({{1}}))) == doctest::Approx(0.0));
    CHECK(chi(SeminormedLattice(rat({{4}}))) == doctest::Approx(-std::log(2.0)));
    CHECK(chi(SeminormedLattice(RationalMatrix(0, 0), {BigInt(5)})) == doctest::Approx(std::log(5.0)));
    CHECK(std::isinf(chi(SeminormedLattice(rat({{1, 0}, {0, 0}})))));
    CHECK(chi(SeminormedLattice()) == 0.0);
}

TEST_CASE("lattice validation") {
    CHECK_THROWS_AS(SeminormedLattice(rat({{1, 2}})), PreconditionError);
    CHECK_THROWS_AS(SeminormedLattice(rat({{1, 2}, {0, 1}})), PreconditionError);
    CHECK_THROWS_AS(SeminormedLattice(rat({{1}}), {BigInt(1)}), PreconditionError);
}

TEST_CASE("induced and quotient norms") {
    const SeminormedLattice z2 = SeminormedLattice::standard(2);
    const SeminormedLattice sub = induced_sub(z2, ints({{1, 1}}, 2));
    CHECK(std::get<RationalMatrix>(sub.gram()) == rat({{2}}));
    CHECK(chi(induced_sub(z2, ints({{1, 0}, {0, 1}}, 2))) == doctest::Approx(chi(z2)));

    const SeminormedLattice L(rat({{2, 1}, {1, 2}}));
    CHECK(std::get<RationalMatrix>(induced_sub(L, ints({{1, 0}}, 2)).gram()) == rat({{2}}));
    const SeminormedLattice q = quotient_norm(L, ints({{1, 0}}, 2));
    CHECK(std::get<RationalMatrix>(q.gram())(0, 0) == Rational(3, 2));

    const SeminormedLattice z1 = SeminormedLattice::standard(1);
    const SeminormedLattice mod2 = quotient_norm(z1, ints({{2}}, 1));
    CHECK(mod2.rank() == 0);
    CHECK(chi(mod2) == doctest::Approx(std::log(2.0)));

    const SeminormedLattice same = quotient_norm(L, IntMatrix(0, 2));
    CHECK(std::get<RationalMatrix>(same.gram()) == std::get<RationalMatrix>(L.gram()));
}

TEST_CASE("filtration sums") {
    const SeminormedLattice L(rat({{2, 1}, {1, 2}}));
    const FiltrationChi f = filtration_chi_sum(L, {ints({{1, 0}}, 2)});
    REQUIRE(f.parts.size() == 2);
    CHECK(f.parts[0] == doctest::Approx(-0.5 * std::log(2.0)));
    CHECK(f.parts[1] == doctest::Approx(-0.5 * std::log(1.5)));
    CHECK(f.sum == doctest::Approx(-0.5 * std::log(3.0)));
    CHECK(f.exact_identity);

    const FiltrationChi one = filtration_chi_sum(L, {});
    REQUIRE(one.parts.size() == 1);
    CHECK(one.parts[0] == doctest::Approx(chi(L)));

    CHECK_THROWS_AS(filtration_chi_sum(L, {ints({{1, 0}}, 2), ints({{0, 1}}, 2)}), PreconditionError);
}

TEST_CASE("filtration additivity on random flags (exact) against a determinant oracle") {
    testing::Gen g(2024);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t k = static_cast<std::size_t>(g.integer(1, 6));
        const RationalMatrix gram = testing::random_definite_gram(g, k);
        const SeminormedLattice L(gram);
        const FiltrationChi f = filtration_chi_sum(L, testing::random_full_flag(g, k));
        CHECK(f.exact_identity);
        const double oracle = -0.5 * std::log(oracle::determinant(gram).get_d());
        CHECK(f.total == doctest::Approx(oracle).epsilon(1e-12));
        CHECK(f.sum == doctest::Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("chi is invariant under unimodular base change") {
    testing::Gen g(8);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t k = static_cast<std::size_t>(g.integer(2, 5));
        const RationalMatrix gram = testing::random_definite_gram(g, k);
        RationalMatrix u = RationalMatrix::identity(k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j) u(i, j) = Rational(g.integer(-3, 3));
        const RationalMatrix changed = u * gram * u.transpose();
        CHECK(chi_exact(SeminormedLattice(changed)).covolume_sq == chi_exact(SeminormedLattice(gram)).covolume_sq);
    }
}

TEST_CASE("scaling") {
    const SeminormedLattice L = SeminormedLattice::standard(3);
    CHECK(chi(scale(L, 0.0, 5)) == doctest::Approx(chi(L)));
    CHECK(chi(scale(L, 1.0, 2)) == doctest::Approx(chi(L) - 6.0));
}

TEST_CASE("real Grams agree with rational Grams") {
    testing::Gen g(3);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t k = static_cast<std::size_t>(g.integer(1, 5));
        const RationalMatrix q = testing::random_definite_gram(g, k);
        const SeminormedLattice exact(q);
        const SeminormedLattice real(exact.real_gram());
        CHECK(chi(real) == doctest::Approx(chi(exact)).epsilon(1e-12));
        const auto flag = testing::random_full_flag(g, k);
        const IntMatrix sub = flag.empty() ? IntMatrix(0, k) : flag[0];
        CHECK(chi(quotient_norm(real, sub)) == doctest::Approx(chi(quotient_norm(exact, sub))).epsilon(1e-10));
    }
}

TEST_CASE("theta invariants") {
    const SeminormedLattice z = SeminormedLattice::standard(1);
    CHECK(h0_theta(z) == doctest::Approx(oracle::theta_rank_one(1.0)).epsilon(1e-12));
    CHECK(h0_theta(z) == doctest::Approx(0.0829015).epsilon(1e-6));
    CHECK(h1_theta(z) == doctest::Approx(0.0829015).epsilon(1e-6));
    CHECK(h0_theta(SeminormedLattice(RationalMatrix(0, 0), {BigInt(3)})) == doctest::Approx(std::log(3.0)));

    const SeminormedLattice big(rat({{100}}));
    CHECK(h1_theta(big) == doctest::Approx(oracle::theta_rank_one(0.01)).epsilon(1e-9));
    CHECK(h0_theta(big) == doctest::Approx(oracle::theta_rank_one(100.0)).epsilon(1e-12));
    CHECK_THROWS_AS(h0_theta(SeminormedLattice(rat({{1, 0}, {0, 0}}))), PreconditionError);
}

TEST_CASE("theta: Poisson duality on random lattices") {
    testing::Gen g(77);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t k = static_cast<std::size_t>(g.integer(1, 4));
        const RationalMatrix q = testing::random_definite_gram(g, k, 2, 2);
        const SeminormedLattice L(q);
        const SeminormedLattice dual(inverse(q));
        CHECK(h1_theta(L) == doctest::Approx(h0_theta(dual)).epsilon(1e-9));
        CHECK(h0_theta(L) >= std::max(0.0, chi(L)) - 1e-12);
    }
}

TEST_CASE("working precision") {
    CHECK_THROWS_AS(set_working_precision(20), PreconditionError);
    {
        PrecisionGuard guard(256);
        CHECK(working_precision() == 256);
    }
    CHECK(working_precision() != 256);
}
