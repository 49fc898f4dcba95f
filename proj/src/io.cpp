#include "ahilb/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "ahilb/errors.hpp"

namespace ahilb::io {

std::string hex(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", x);
    return buf;
}

double parse_double(const Json& j) {
    if (j.is_number()) return j.get<double>();
    if (!j.is_string()) throw PreconditionError("expected a number");
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw PreconditionError("malformed number '" + s + "'");
    return v;
}

std::string rational_string(const Rational& q) { return q.get_str(); }

Rational parse_rational(const Json& j) {
    if (j.is_number_integer()) return Rational(BigInt(std::to_string(j.get<long long>())));
    if (!j.is_string()) throw PreconditionError("expected an exact rational");
    Rational q;
    if (q.set_str(j.get<std::string>(), 10) != 0) throw PreconditionError("malformed rational '" + j.get<std::string>() + "'");
    if (q.get_den() == 0) throw PreconditionError("zero denominator");
    q.canonicalize();
    return q;
}

BigInt parse_integer(const Json& j) {
    if (j.is_number_integer()) return BigInt(std::to_string(j.get<long long>()));
    if (j.is_string()) {
        BigInt z;
        if (z.set_str(j.get<std::string>(), 10) != 0) throw PreconditionError("malformed integer");
        return z;
    }
    throw PreconditionError("expected an integer");
}

namespace {

Json integer_json(const BigInt& z) {
    if (z.fits_slong_p()) return z.get_si();
    return z.get_str();
}

bool is_exact_entry(const Json& e) {
    if (e.is_number_integer()) return true;
    if (!e.is_string()) return false;
    const std::string s = e.get<std::string>();
    if (s.empty()) return false;
    for (char c : s)
        if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '/' || c == '-' || c == '+')) return false;
    return true;
}

}  // namespace

Json to_json(const IntMatrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json r = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(integer_json(m(i, j)));
        rows.push_back(r);
    }
    return rows;
}

Json to_json(const RationalMatrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json r = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(rational_string(m(i, j)));
        rows.push_back(r);
    }
    return rows;
}

Json to_json(const RealMatrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json r = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(hex(m(i, j).convert_to<double>()));
        rows.push_back(r);
    }
    return rows;
}

RingFile parse_ring(const Json& j) {
    if (!j.is_object() || !j.contains("vars")) throw PreconditionError("ring file needs \"vars\"");
    const int vars = j.at("vars").get<int>();
    if (vars < 2) throw PreconditionError("ring needs at least two variables");
    std::vector<Relation> relations;
    if (j.contains("relations")) {
        for (const auto& r : j.at("relations")) {
            Relation rel;
            rel.degree = r.at("degree").get<int>();
            for (const auto& c : r.at("coefficients")) rel.coefficients.push_back(parse_integer(c));
            relations.push_back(std::move(rel));
        }
    }
    RingFile out{GradedAlgebra(vars, std::move(relations)), {}};
    if (j.contains("ideal")) {
        for (const auto& g : j.at("ideal")) {
            IntVector v;
            for (const auto& c : g) v.push_back(parse_integer(c));
            out.ideal.push_back(std::move(v));
        }
    }
    return out;
}

SeminormedLattice parse_lattice(const Json& j) {
    if (!j.is_object() || !j.contains("gram")) throw PreconditionError("lattice file needs \"gram\"");
    const auto& g = j.at("gram");
    const std::size_t r = g.size();
    if (j.contains("rank") && j.at("rank").get<std::size_t>() != r) throw PreconditionError("rank does not match gram");
    std::vector<BigInt> torsion;
    if (j.contains("torsion"))
        for (const auto& t : j.at("torsion")) torsion.push_back(parse_integer(t));
    bool exact = true;
    for (const auto& row : g) {
        if (row.size() != r) throw PreconditionError("gram must be square");
        for (const auto& e : row) exact = exact && is_exact_entry(e);
    }
    if (exact) {
        RationalMatrix m(r, r);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t k = 0; k < r; ++k) m(i, k) = parse_rational(g[i][k]);
        if (!is_positive_semidefinite(m)) throw PreconditionError("gram must be positive semidefinite");
        return SeminormedLattice(Gram(std::move(m)), std::move(torsion));
    }
    RealMatrix m(r, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t k = 0; k < r; ++k)
            if (is_exact_entry(g[i][k])) {
                const Rational q = parse_rational(g[i][k]);
                m(i, k) = Real(q.get_num().get_mpz_t()) / Real(q.get_den().get_mpz_t());
            } else {
                m(i, k) = Real(parse_double(g[i][k]));
            }
    return SeminormedLattice(Gram(std::move(m)), std::move(torsion));
}

Json to_json(const SeminormedLattice& l) {
    Json j;
    j["rank"] = l.rank();
    Json t = Json::array();
    for (const auto& d : l.torsion()) t.push_back(integer_json(d));
    j["torsion"] = t;
    j["gram"] = std::visit([](const auto& g) { return to_json(g); }, l.gram());
    if (l.log_scale() != 0.0) j["log_scale"] = hex(l.log_scale());
    return j;
}

ToricSymbol parse_symbol(const Json& j) {
    ToricSymbol s;
    s.dim = j.value("dim", 1);
    s.T = parse_double(j.at("T"));
    s.values.clear();
    for (const auto& v : j.at("values")) s.values.push_back(parse_double(v));
    if (s.dim == 1) {
        s.nodes = s.values.size();
        s.slopes.clear();
        for (const auto& v : j.at("slopes")) s.slopes.push_back(parse_double(v));
        s.polytope = {0.0, 1.0};
    } else {
        s.nodes = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(s.values.size()))));
        s.slopes.clear();
        s.polytope = {0.0, 0.0, 1.0, 0.0, 0.0, 1.0};
    }
    if (j.contains("polytope")) {
        s.polytope.clear();
        for (const auto& v : j.at("polytope")) s.polytope.push_back(parse_double(v));
    }
    s.semipositive = j.value("semipositive", false);
    s.validate();
    return s;
}

Json to_json(const ToricSymbol& s) {
    Json j;
    j["dim"] = s.dim;
    j["T"] = hex(s.T);
    Json values = Json::array();
    for (double v : s.values) values.push_back(hex(v));
    j["values"] = values;
    Json slopes = Json::array();
    for (double v : s.slopes) slopes.push_back(hex(v));
    j["slopes"] = slopes;
    Json poly = Json::array();
    for (double v : s.polytope) poly.push_back(hex(v));
    j["polytope"] = poly;
    j["semipositive"] = s.semipositive;
    return j;
}

Json to_json(const DeformationBlocks& b, int threshold_n0) {
    Json j;
    j["n"] = b.n;
    Json blocks = Json::array();
    for (const auto& blk : b.blocks) blocks.push_back({{"l", blk.l}, {"rank", blk.rank}, {"weight", blk.weight}});
    j["blocks"] = blocks;
    j["total_rank"] = b.total_rank;
    j["threshold_n0"] = threshold_n0;
    return j;
}

Json to_json(const IsotypicReport& r) {
    Json j;
    const auto& d = r.decomposition;
    j["n"] = d.n;
    j["holds"] = d.holds();
    j["r1_E0_is_full"] = d.r1_E0_is_full;
    j["chain_ok"] = d.chain_ok;
    j["threshold_n0"] = r.threshold_n0;
    j["failing_degrees"] = r.failing_degrees;
    Json comps = Json::array();
    for (const auto& c : d.components) {
        Json t = Json::array();
        for (const auto& v : c.F.torsion) t.push_back(integer_json(v));
        comps.push_back({{"l", c.l},
                         {"E_rank", c.E.rows()},
                         {"F_free_rank", c.F.free_rank},
                         {"F_torsion", t},
                         {"phi_isomorphism", c.phi_isomorphism},
                         {"exact", c.exact}});
    }
    j["components"] = comps;
    return j;
}

Json to_json(const InvariantEstimate& e) {
    Json j;
    j["r"] = e.r;
    j["c"] = hex(e.c);
    j["c_upper"] = hex(e.c_upper);
    j["c_lower"] = hex(e.c_lower);
    j["width"] = hex(e.width);
    j["rms_residual"] = hex(e.rms_residual);
    j["converged"] = e.converged;
    j["fit"] = {{"const", hex(e.coefficients[0])}, {"log_n_over_n", hex(e.coefficients[1])},
                {"inv_n", hex(e.coefficients[2])}};
    Json seq = Json::array();
    for (std::size_t i = 0; i < e.n.size(); ++i)
        seq.push_back({{"n", e.n[i]}, {"chi", hex(e.chi[i])}, {"normalized", hex(e.normalized[i])},
                       {"residual", hex(e.residuals[i])}});
    j["sequence"] = seq;
    return j;
}

Json to_json(const ToricGram& g) {
    Json j;
    j["n"] = g.n;
    Json ld = Json::array(), eb = Json::array();
    for (double v : g.log_diagonal) ld.push_back(hex(v));
    for (double v : g.error_bound) eb.push_back(hex(v));
    j["log_diagonal"] = ld;
    j["error_bound"] = eb;
    j["max_error"] = hex(g.max_error);
    return j;
}

ToricGram parse_toric_gram(const Json& j) {
    ToricGram g;
    g.n = j.at("n").get<int>();
    for (const auto& v : j.at("log_diagonal")) g.log_diagonal.push_back(parse_double(v));
    for (const auto& v : j.at("error_bound")) g.error_bound.push_back(parse_double(v));
    g.max_error = parse_double(j.at("max_error"));
    return g;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PreconditionError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw PreconditionError("invalid JSON in '" + path + "': " + e.what());
    }
}

}  // namespace ahilb::io
