#include "ahilb/graded.hpp"

#include <algorithm>
#include <functional>

#include "ahilb/errors.hpp"

namespace ahilb {

BigInt binomial(long n, long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    BigInt out;
    mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return out;
}

namespace {

std::size_t count_monomials(long degree, long vars) {
    if (degree < 0) return 0;
    if (vars == 0) return degree == 0 ? 1 : 0;
    return binomial(degree + vars - 1, vars - 1).get_ui();
}

void enumerate(int vars, int degree, Exponent& prefix, std::vector<Exponent>& out) {
    const int pos = static_cast<int>(prefix.size());
    if (pos == vars - 1) {
        prefix.push_back(degree);
        out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int e = degree; e >= 0; --e) {
        prefix.push_back(e);
        enumerate(vars, degree - e, prefix, out);
        prefix.pop_back();
    }
}

}  // namespace

GradedAlgebra::GradedAlgebra(int num_variables, std::vector<Relation> relations)
    : num_variables_(num_variables), relations_(std::move(relations)) {
    if (num_variables_ < 1) throw PreconditionError("a graded algebra needs at least one variable");
    for (const auto& r : relations_) {
        if (r.degree < 1) throw PreconditionError("relations must have positive degree");
        if (r.coefficients.size() != ambient_dimension(r.degree))
            throw PreconditionError("relation coefficient vector does not match the monomial basis of its degree");
    }
}

GradedAlgebra monomial_algebra(int projective_dim) {
    if (projective_dim < 1) throw PreconditionError("monomial_algebra requires num_vars >= 1");
    return GradedAlgebra(projective_dim + 1, {});
}

std::vector<Exponent> GradedAlgebra::basis(int n) const {
    std::vector<Exponent> out;
    if (n < 0) return out;
    out.reserve(ambient_dimension(n));
    Exponent prefix;
    enumerate(num_variables_, n, prefix, out);
    return out;
}

std::size_t GradedAlgebra::ambient_dimension(int n) const { return count_monomials(n, num_variables_); }

std::size_t GradedAlgebra::index_of(const Exponent& e) const {
    if (static_cast<int>(e.size()) != num_variables_) throw PreconditionError("exponent length mismatch");
    long remaining = 0;
    for (int x : e) remaining += x;
    std::size_t index = 0;
    for (int i = 0; i + 1 < num_variables_; ++i) {
        const long later = num_variables_ - i - 1;
        const long bound = remaining - e[i] - 1;
        if (bound >= 0) index += binomial(bound + later, later).get_ui();
        remaining -= e[i];
    }
    return index;
}

IntVector GradedAlgebra::multiply(std::span<const BigInt> a, int p, std::span<const BigInt> b, int q) const {
    const auto ba = basis(p);
    const auto bb = basis(q);
    if (a.size() != ba.size() || b.size() != bb.size()) throw PreconditionError("element does not match degree");
    IntVector out(ambient_dimension(p + q));
    Exponent e(num_variables_);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (b[j] == 0) continue;
            for (int v = 0; v < num_variables_; ++v) e[v] = ba[i][v] + bb[j][v];
            out[index_of(e)] += a[i] * b[j];
        }
    }
    return out;
}

IntMatrix GradedAlgebra::full_lattice(int n) const { return IntMatrix::identity(ambient_dimension(n)); }

IntMatrix GradedAlgebra::relation_lattice(int n) const {
    const std::size_t dim = ambient_dimension(n);
    IntMatrix rows(0, dim);
    for (const auto& r : relations_) {
        if (r.degree > n) continue;
        const int cofactor_degree = n - r.degree;
        const std::size_t cofactors = ambient_dimension(cofactor_degree);
        for (std::size_t c = 0; c < cofactors; ++c) {
            IntVector unit(cofactors);
            unit[c] = 1;
            rows.append_row(multiply(unit, cofactor_degree, r.coefficients, r.degree));
        }
    }
    return hermite_normal_form(rows);
}

std::size_t GradedAlgebra::rank(int n) const { return ambient_dimension(n) - relation_lattice(n).rows(); }

std::vector<BigInt> GradedAlgebra::torsion(int n) const {
    if (is_free()) return {};
    return subquotient(full_lattice(n), relation_lattice(n)).torsion;
}

IntMatrix GradedAlgebra::multiplication(int var, int n) const {
    if (var < 0 || var >= num_variables_) throw PreconditionError("variable index out of range");
    const auto src = basis(n);
    IntMatrix m(src.size(), ambient_dimension(n + 1));
    for (std::size_t i = 0; i < src.size(); ++i) {
        Exponent e = src[i];
        ++e[var];
        m(i, index_of(e)) = 1;
    }
    return m;
}

std::vector<IntMatrix> GradedAlgebra::mult(int n) const {
    std::vector<IntMatrix> out;
    for (int v = 0; v < num_variables_; ++v) out.push_back(multiplication(v, n));
    return out;
}

GradedIdeal::GradedIdeal(const GradedAlgebra& parent, std::vector<IntVector> generators)
    : num_variables_(parent.num_variables()), generators_(std::move(generators)) {
    for (const auto& g : generators_) {
        if (static_cast<int>(g.size()) != num_variables_)
            throw PreconditionError("ideal generators must be vectors in the degree-1 piece");
        if (std::all_of(g.begin(), g.end(), [](const BigInt& c) { return c == 0; }))
            throw PreconditionError("ideal generators must be nonzero");
    }
}

GradedIdeal GradedIdeal::coordinate(const GradedAlgebra& parent, const std::vector<int>& variables) {
    std::vector<IntVector> gens;
    for (int v : variables) {
        if (v < 0 || v >= parent.num_variables()) throw PreconditionError("ideal variable index out of range");
        IntVector g(parent.num_variables());
        g[v] = 1;
        gens.push_back(std::move(g));
    }
    return GradedIdeal(parent, std::move(gens));
}

std::optional<std::vector<int>> GradedIdeal::coordinate_variables() const {
    std::vector<int> vars;
    for (const auto& g : generators_) {
        int found = -1;
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (g[j] == 0) continue;
            if (found >= 0 || abs(g[j]) != 1) return std::nullopt;
            found = static_cast<int>(j);
        }
        vars.push_back(found);
    }
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    return vars;
}

namespace {

IntMatrix coordinate_power(const GradedAlgebra& a, const std::vector<int>& vars, int l, int n) {
    const auto mons = a.basis(n);
    IntMatrix rows(0, mons.size());
    IntVector unit(mons.size());
    for (std::size_t i = 0; i < mons.size(); ++i) {
        int weight = 0;
        for (int v : vars) weight += mons[i][v];
        if (weight < l) continue;
        unit[i] = 1;
        rows.append_row(unit);
        unit[i] = 0;
    }
    return rows;
}

IntMatrix with_relations(const GradedAlgebra& a, IntMatrix rows, int n) {
    const auto rel = a.relation_lattice(n);
    for (std::size_t i = 0; i < rel.rows(); ++i) rows.append_row(rel.row(i));
    return hermite_normal_form(rows);
}

}  // namespace

IntMatrix ideal_power_piece(const GradedAlgebra& a, const GradedIdeal& ideal, int l, int n) {
    if (n < 0) throw PreconditionError("degree must be nonnegative");
    if (ideal.num_variables() != a.num_variables() && !ideal.is_zero())
        throw PreconditionError("ideal belongs to a different algebra");
    if (l <= 0) return a.full_lattice(n);
    if (l > n || ideal.is_zero()) return a.zero_lattice(n);

    if (a.is_free()) {
        if (auto vars = ideal.coordinate_variables()) return coordinate_power(a, *vars, l, n);
    }

    // (I_1)^l in degree l, then S_1 * I^l_{m} -> I^l_{m+1}.
    IntMatrix current(0, a.ambient_dimension(1));
    for (const auto& g : ideal.generators()) current.append_row(g);
    current = with_relations(a, std::move(current), 1);
    for (int deg = 2; deg <= l; ++deg) {
        IntMatrix next(0, a.ambient_dimension(deg));
        for (std::size_t i = 0; i < current.rows(); ++i)
            for (const auto& g : ideal.generators()) next.append_row(a.multiply(current.row(i), deg - 1, g, 1));
        current = with_relations(a, std::move(next), deg);
    }
    for (int deg = l + 1; deg <= n; ++deg) {
        IntMatrix next(0, a.ambient_dimension(deg));
        const auto maps = a.mult(deg - 1);
        for (const auto& m : maps) {
            const IntMatrix image = current * m;
            for (std::size_t i = 0; i < image.rows(); ++i) next.append_row(image.row(i));
        }
        current = with_relations(a, std::move(next), deg);
    }
    return current;
}

IntMatrix ideal_power_piece_bruteforce(const GradedAlgebra& a, const GradedIdeal& ideal, int l, int n) {
    if (l <= 0) return a.full_lattice(n);
    if (l > n || ideal.is_zero()) return a.zero_lattice(n);
    const auto& gens = ideal.generators();
    IntMatrix rows(0, a.ambient_dimension(n));
    const std::size_t cofactors = a.ambient_dimension(n - l);
    // multisets of generator indices of size l
    std::vector<std::size_t> pick(l, 0);
    std::function<void(int, std::size_t)> walk = [&](int depth, std::size_t start) {
        if (depth == l) {
            IntVector product = gens[pick[0]];
            for (int k = 1; k < l; ++k) product = a.multiply(product, k, gens[pick[k]], 1);
            for (std::size_t c = 0; c < cofactors; ++c) {
                IntVector unit(cofactors);
                unit[c] = 1;
                rows.append_row(a.multiply(unit, n - l, product, l));
            }
            return;
        }
        for (std::size_t g = start; g < gens.size(); ++g) {
            pick[depth] = g;
            walk(depth + 1, g);
        }
    };
    walk(0, 0);
    return with_relations(a, std::move(rows), n);
}

Subquotient quotient_piece(const GradedAlgebra& a, const GradedIdeal& ideal, int l, int n) {
    if (l < 0) throw PreconditionError("quotient_piece requires l >= 0");
    return subquotient(ideal_power_piece(a, ideal, l, n), ideal_power_piece(a, ideal, l + 1, n));
}

GradedModule GradedModule::ring(const GradedAlgebra& a) { return {Kind::Ring, a, GradedIdeal(), 0}; }

GradedModule GradedModule::ideal_power(const GradedAlgebra& a, const GradedIdeal& ideal, int l) {
    return {Kind::IdealPower, a, ideal, l};
}

GradedModule GradedModule::quotient(const GradedAlgebra& a, const GradedIdeal& ideal) {
    return {Kind::Quotient, a, ideal, 1};
}

GradedModule GradedModule::graded_piece(const GradedAlgebra& a, const GradedIdeal& ideal, int l) {
    if (l < 0) throw PreconditionError("graded piece index must be nonnegative");
    return {Kind::Graded, a, ideal, l};
}

GradedModule GradedModule::zero(const GradedAlgebra& a) { return {Kind::Ring, a, GradedIdeal(), 0, true}; }

IntMatrix GradedModule::numerator(int n) const {
    if (zero_) return algebra_.zero_lattice(n);
    switch (kind_) {
        case Kind::Ring:
        case Kind::Quotient:
            return algebra_.full_lattice(n);
        case Kind::IdealPower:
        case Kind::Graded:
            return ideal_power_piece(algebra_, ideal_, power_, n);
    }
    return {};
}

IntMatrix GradedModule::denominator(int n) const {
    switch (kind_) {
        case Kind::Ring:
        case Kind::IdealPower:
            return algebra_.zero_lattice(n);
        case Kind::Quotient:
            return ideal_power_piece(algebra_, ideal_, 1, n);
        case Kind::Graded:
            return ideal_power_piece(algebra_, ideal_, power_ + 1, n);
    }
    return {};
}

Subquotient GradedModule::piece(int n) const { return subquotient(numerator(n), denominator(n)); }

IntMatrix GradedModule::action(int var, int n) const {
    const IntMatrix src = numerator(n);
    const IntMatrix dst = numerator(n + 1);
    if (src.rows() == 0) return IntMatrix(0, dst.rows());
    auto coords = express_in_basis(dst, src * algebra_.multiplication(var, n));
    if (!coords) throw ComputationError("module numerator is not stable under multiplication");
    return *coords;
}

bool GradedModule::action_compatible(int n) const {
    const IntMatrix un = numerator(n), dn = denominator(n);
    const IntMatrix un1 = hermite_normal_form(numerator(n + 1));
    const IntMatrix dn1 = hermite_normal_form(denominator(n + 1));
    for (int v = 0; v < algebra_.num_variables(); ++v) {
        const IntMatrix m = algebra_.multiplication(v, n);
        if (un.rows() > 0 && !lattice_contains(un1, un * m)) return false;
        if (dn.rows() > 0 && !lattice_contains(dn1, dn * m)) return false;
    }
    return true;
}

std::vector<std::size_t> hilbert_function(const GradedAlgebra& a, int n_min, int n_max) {
    std::vector<std::size_t> out;
    for (int n = n_min; n <= n_max; ++n) out.push_back(a.rank(n));
    return out;
}

std::vector<std::size_t> hilbert_function(const GradedModule& m, int n_min, int n_max) {
    std::vector<std::size_t> out;
    for (int n = n_min; n <= n_max; ++n) out.push_back(m.rank(n));
    return out;
}

}  // namespace ahilb
