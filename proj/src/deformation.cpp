#include "ahilb/deformation.hpp"

#include <algorithm>
#include <numeric>

#include "ahilb/errors.hpp"

namespace ahilb {

DeformationBlocks deformation_blocks(const GradedAlgebra& a, const GradedIdeal& ideal, int n) {
    if (n < 0) throw PreconditionError("deformation_blocks requires n >= 0");
    DeformationBlocks out;
    out.n = n;
    const std::size_t relations = a.relation_lattice(n).rows();
    for (int l = -n; l <= n; ++l) {
        DeformationBlock b;
        b.l = l;
        b.weight = n + l;
        b.basis = ideal_power_piece(a, ideal, l, n);
        b.rank = b.basis.rows() - relations;
        out.total_rank += b.rank;
        out.blocks.push_back(std::move(b));
    }
    return out;
}

namespace {

std::size_t count_weighted(int vars, int degree, const std::vector<bool>& in_ideal, int pos, int weight, int min_weight) {
    if (pos == vars - 1) return (weight + (in_ideal[pos] ? degree : 0)) >= min_weight ? 1 : 0;
    std::size_t total = 0;
    for (int e = 0; e <= degree; ++e)
        total += count_weighted(vars, degree - e, in_ideal, pos + 1, weight + (in_ideal[pos] ? e : 0), min_weight);
    return total;
}

}  // namespace

std::size_t monomial_block_rank(int projective_dim, const std::vector<int>& ideal_vars, int l, int n) {
    const int vars = projective_dim + 1;
    std::vector<bool> in_ideal(vars, false);
    for (int v : ideal_vars) in_ideal.at(v) = true;
    if (ideal_vars.empty() && l > 0) return 0;
    return count_weighted(vars, n, in_ideal, 0, 0, std::max(l, 0));
}

FiberInfinityPiece fiber_infinity_piece(const GradedAlgebra& a, const GradedIdeal& ideal, int n) {
    if (n < 0) throw PreconditionError("fiber_infinity_piece requires n >= 0");
    FiberInfinityPiece out;
    out.n = n;
    IntMatrix upper = ideal_power_piece(a, ideal, 0, n);
    for (int l = 0; l <= n; ++l) {
        IntMatrix lower = ideal_power_piece(a, ideal, l + 1, n);
        FiberInfinityBlock b{l, subquotient(upper, lower)};
        out.free_rank += b.piece.free_rank;
        out.torsion.insert(out.torsion.end(), b.piece.torsion.begin(), b.piece.torsion.end());
        out.blocks.push_back(std::move(b));
        upper = std::move(lower);
    }
    return out;
}

bool IsotypicDecomposition::holds() const {
    if (!r1_E0_is_full || !chain_ok) return false;
    return std::all_of(components.begin(), components.end(),
                       [](const IsotypicComponent& c) { return c.phi_isomorphism && c.exact; });
}

namespace {

IntMatrix select_columns(const IntMatrix& m, const std::vector<std::size_t>& cols) {
    IntMatrix out(m.rows(), cols.size());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(i, cols[j]);
    return out;
}

IsotypicComponent build_component(int l, const IntMatrix& e_l, const IntMatrix& e_next) {
    IsotypicComponent c;
    c.l = l;
    c.E = e_l;
    c.r1 = e_l;
    c.F = subquotient(e_l, e_next);

    const std::size_t k = c.F.smith.diagonal.size();
    const IntMatrix w_inv = unimodular_inverse(c.F.smith.adapted_basis);
    std::vector<std::size_t> free_cols(w_inv.cols() - k);
    std::iota(free_cols.begin(), free_cols.end(), k);
    std::vector<std::size_t> torsion_cols;
    std::vector<BigInt> torsion_orders;
    for (std::size_t i = 0; i < k; ++i)
        if (c.F.smith.diagonal[i] > 1) {
            torsion_cols.push_back(i);
            torsion_orders.push_back(c.F.smith.diagonal[i]);
        }
    c.rinf = select_columns(w_inv, free_cols);
    c.rinf_torsion = select_columns(w_inv, torsion_cols);
    for (std::size_t i = 0; i < c.rinf_torsion.rows(); ++i)
        for (std::size_t j = 0; j < torsion_cols.size(); ++j) {
            BigInt r;
            mpz_fdiv_r(r.get_mpz_t(), c.rinf_torsion(i, j).get_mpz_t(), torsion_orders[j].get_mpz_t());
            c.rinf_torsion(i, j) = r;
        }

    // r1(E_l)/r1(E_{l+1}) computed inside S_n, then pulled back through r1 and
    // pushed to F through r_inf.
    const Subquotient image = subquotient(hermite_normal_form(c.r1), hermite_normal_form(e_next));
    const IntMatrix lifts = image.free_lift();
    c.phi = IntMatrix(lifts.rows(), c.rinf.cols());
    bool pulled_back = true;
    for (std::size_t i = 0; i < lifts.rows(); ++i) {
        auto coords = solve_in_hnf(c.E, lifts.row(i));
        if (!coords) {
            pulled_back = false;
            break;
        }
        for (std::size_t j = 0; j < c.rinf.cols(); ++j) {
            BigInt s = 0;
            for (std::size_t t = 0; t < coords->size(); ++t) s += (*coords)[t] * c.rinf(t, j);
            c.phi(i, j) = s;
        }
    }
    bool free_iso = pulled_back && c.phi.rows() == c.phi.cols() && abs(determinant(c.phi)) == 1;

    bool torsion_iso = image.torsion == c.F.torsion;
    if (torsion_iso && !torsion_orders.empty()) {
        IntMatrix t(torsion_orders.size(), torsion_orders.size());
        std::size_t row = 0;
        for (std::size_t i = 0; i < image.smith.diagonal.size(); ++i) {
            if (image.smith.diagonal[i] <= 1) continue;
            IntMatrix gen(0, image.numerator.rows());
            gen.append_row(image.smith.adapted_basis.row(i));
            const IntMatrix ambient = gen * image.numerator;
            auto coords = solve_in_hnf(c.E, ambient.row(0));
            if (!coords) {
                torsion_iso = false;
                break;
            }
            for (std::size_t j = 0; j < torsion_orders.size(); ++j) {
                BigInt s = 0;
                for (std::size_t q = 0; q < coords->size(); ++q) s += (*coords)[q] * c.rinf_torsion(q, j);
                t(row, j) = s;
            }
            ++row;
        }
        if (torsion_iso) {
            const BigInt det = determinant(t);
            for (const auto& d : torsion_orders) {
                BigInt g;
                mpz_gcd(g.get_mpz_t(), det.get_mpz_t(), d.get_mpz_t());
                if (g != 1) torsion_iso = false;
            }
        }
    }
    c.phi_isomorphism = free_iso && torsion_iso;
    c.exact = e_l.rows() == e_next.rows() + c.F.free_rank &&
              image.free_rank == c.F.free_rank && image.torsion == c.F.torsion;
    return c;
}

}  // namespace

IsotypicDecomposition isotypic_decomposition_at(const GradedAlgebra& a, const GradedIdeal& ideal, int n) {
    if (n < 0) throw PreconditionError("isotypic_decomposition requires n >= 0");
    IsotypicDecomposition d;
    d.n = n;
    std::vector<IntMatrix> e;
    for (int l = 0; l <= n + 1; ++l) e.push_back(ideal_power_piece(a, ideal, l, n));
    d.r1_E0_is_full = hermite_normal_form(e[0]) == hermite_normal_form(a.full_lattice(n));
    d.chain_ok = true;
    for (int l = 0; l <= n; ++l)
        if (!lattice_contains(e[l], e[l + 1])) d.chain_ok = false;
    if (!d.chain_ok) return d;
    for (int l = 0; l <= n; ++l) d.components.push_back(build_component(l, e[l], e[l + 1]));
    return d;
}

IsotypicReport isotypic_decomposition(const GradedAlgebra& a, const GradedIdeal& ideal, int n) {
    IsotypicReport report;
    report.threshold_n0 = 0;
    for (int m = 0; m <= n; ++m) {
        IsotypicDecomposition d = isotypic_decomposition_at(a, ideal, m);
        if (!d.holds()) {
            report.failing_degrees.push_back(m);
            report.threshold_n0 = m + 1;
        }
        if (m == n) report.decomposition = std::move(d);
    }
    return report;
}

std::string BilinearRelation::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto& t = terms[i];
        const int c = t.coefficient;
        if (i == 0) {
            if (c < 0) out += "-";
        } else {
            out += c < 0 ? " - " : " + ";
        }
        if (std::abs(c) != 1) out += std::to_string(std::abs(c)) + "*";
        out += t.left + "*" + t.right;
    }
    return out;
}

std::vector<BilinearRelation> embedding_relations(int ambient_dim, int generator_count) {
    if (ambient_dim < 1) throw PreconditionError("embedding_relations requires N >= 1");
    if (generator_count < 0 || generator_count > ambient_dim + 1)
        throw PreconditionError("embedding_relations requires 0 <= M <= N+1");
    std::vector<BilinearRelation> out;
    auto x = [](int i) { return "x" + std::to_string(i); };
    auto y = [](int i) { return "y" + std::to_string(i); };
    for (int i = 0; i < generator_count; ++i) out.push_back({{{1, "t", y(i)}, {-1, "u", x(i)}}});
    for (int i = 0; i < generator_count; ++i)
        for (int j = 0; j < i; ++j) out.push_back({{{1, x(j), y(i)}, {-1, y(j), x(i)}}});
    return out;
}

IntMatrix induced_degree_map(const GradedAlgebra& source, const GradedAlgebra& target,
                             const IntMatrix& variable_images, int n) {
    if (static_cast<int>(variable_images.rows()) != source.num_variables() ||
        static_cast<int>(variable_images.cols()) != target.num_variables())
        throw PreconditionError("variable image matrix has the wrong shape");
    const auto mons = source.basis(n);
    IntMatrix out(mons.size(), target.ambient_dimension(n));
    for (std::size_t i = 0; i < mons.size(); ++i) {
        IntVector acc{1};
        int deg = 0;
        for (int v = 0; v < source.num_variables(); ++v)
            for (int p = 0; p < mons[i][v]; ++p) {
                acc = target.multiply(acc, deg, variable_images.row(v), 1);
                ++deg;
            }
        for (std::size_t j = 0; j < acc.size(); ++j) out(i, j) = acc[j];
    }
    return out;
}

namespace {

IntMatrix stack(IntMatrix rows, const IntMatrix& more) {
    for (std::size_t i = 0; i < more.rows(); ++i) rows.append_row(more.row(i));
    return rows;
}

}  // namespace

FunctorialRestriction functorial_restriction(const GradedAlgebra& source, const GradedIdeal& source_ideal,
                                             const GradedAlgebra& target, const GradedIdeal& target_ideal,
                                             const IntMatrix& variable_images, int n) {
    if (n < 0) throw PreconditionError("functorial_restriction requires n >= 0");
    const IntMatrix r1 = target.relation_lattice(1);
    const IntMatrix deg1 = induced_degree_map(source, target, variable_images, 1);
    if (hermite_normal_form(stack(deg1, r1)) != hermite_normal_form(target.full_lattice(1)))
        throw PreconditionError("variable images do not define a surjection in degree 1");
    for (const auto& rel : source.relations()) {
        const IntMatrix m = induced_degree_map(source, target, variable_images, rel.degree);
        IntMatrix row(0, m.rows());
        row.append_row(rel.coefficients);
        IntMatrix image = row * m;
        const IntMatrix rt = target.relation_lattice(rel.degree);
        bool zero = true;
        for (const auto& c : image.row_vector(0)) zero = zero && c == 0;
        if (!zero && !lattice_contains(rt, image))
            throw PreconditionError("surjection does not respect the source relations");
    }

    IntMatrix gens_image(0, target.ambient_dimension(1));
    for (const auto& g : source_ideal.generators()) {
        IntMatrix row(0, g.size());
        row.append_row(g);
        gens_image = stack(gens_image, row * deg1);
    }
    IntMatrix target_gens(0, target.ambient_dimension(1));
    for (const auto& g : target_ideal.generators()) target_gens.append_row(g);
    if (hermite_normal_form(stack(gens_image, r1)) != hermite_normal_form(stack(target_gens, r1)))
        throw PreconditionError("ideal images do not generate the target ideal");

    FunctorialRestriction out;
    out.n = n;
    out.all_surjective = true;
    const IntMatrix map = induced_degree_map(source, target, variable_images, n);
    const IntMatrix rn = target.relation_lattice(n);
    for (int l = -n; l <= n; ++l) {
        const IntMatrix src = ideal_power_piece(source, source_ideal, l, n);
        const IntMatrix tgt = ideal_power_piece(target, target_ideal, l, n);
        const IntMatrix image = src.rows() ? src * map : IntMatrix(0, map.cols());
        BlockRestriction b;
        b.l = l;
        auto coords = express_in_basis(tgt, image);
        if (!coords) throw ComputationError("induced map does not send source block into target block");
        b.map = std::move(*coords);
        b.surjective = hermite_normal_form(stack(image, rn)) == tgt;
        out.all_surjective = out.all_surjective && b.surjective;
        out.blocks.push_back(std::move(b));
    }
    return out;
}

}  // namespace ahilb
