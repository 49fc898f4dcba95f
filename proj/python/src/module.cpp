#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ahilb/cli.hpp"
#include "ahilb/errors.hpp"
#include "ahilb/io.hpp"

namespace py = pybind11;
using namespace ahilb;
using io::Json;

namespace {

GradedIdeal ideal_of(const GradedAlgebra& a, const std::vector<int>& vars) {
    return vars.empty() ? GradedIdeal(a, {}) : GradedIdeal::coordinate(a, vars);
}

Geometry geometry_of(int N, const std::vector<int>& vars) {
    const GradedAlgebra a = monomial_algebra(N);
    if (vars.empty()) return Geometry::projective_space(N);
    return {a, GradedModule::quotient(a, GradedIdeal::coordinate(a, vars))};
}

MetricSpec metric_of(const std::string& symbol_json, double shift) {
    if (symbol_json.empty()) return MetricSpec::fubini_study(shift);
    return MetricSpec::toric(io::parse_symbol(Json::parse(symbol_json)), shift);
}

Json chi_points(const std::vector<ChiPoint>& seq) {
    Json out = Json::array();
    for (const auto& p : seq) out.push_back({{"n", p.n}, {"chi", p.chi}, {"rank", p.rank}});
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<ComputationError>(m, "ComputationError", PyExc_RuntimeError);

    m.def("hilbert_function", [](int N, std::vector<int> ideal, int n_min, int n_max) {
        const Geometry g = geometry_of(N, ideal);
        std::vector<std::size_t> out;
        for (int n = n_min; n <= n_max; ++n) out.push_back(g.module.rank(n));
        return out;
    });

    m.def("deformation_blocks", [](int N, std::vector<int> ideal, int n) {
        const GradedAlgebra a = monomial_algebra(N);
        const IsotypicReport r = isotypic_decomposition(a, ideal_of(a, ideal), n);
        return io::to_json(deformation_blocks(a, ideal_of(a, ideal), n), r.threshold_n0).dump();
    });

    m.def("isotypic", [](int N, std::vector<int> ideal, int n) {
        const GradedAlgebra a = monomial_algebra(N);
        return io::to_json(isotypic_decomposition(a, ideal_of(a, ideal), n)).dump();
    });

    m.def("fs_gram", [](int N, int n) { return io::to_json(fs_gram(N, n)).dump(); });

    m.def("chi", [](const std::string& lattice) { return chi(io::parse_lattice(Json::parse(lattice))); });
    m.def("h0_theta", [](const std::string& lattice) { return h0_theta(io::parse_lattice(Json::parse(lattice))); });
    m.def("h1_theta", [](const std::string& lattice) { return h1_theta(io::parse_lattice(Json::parse(lattice))); });

    m.def("chi_sequence", [](int N, std::vector<int> ideal, const std::string& symbol, double shift, int n_min,
                             int n_max) {
        return chi_points(chi_sequence(geometry_of(N, ideal), metric_of(symbol, shift), n_min, n_max)).dump();
    });

    m.def("estimate", [](int N, std::vector<int> ideal, const std::string& symbol, double shift, int n_min, int n_max,
                         int r) {
        const auto seq = chi_sequence(geometry_of(N, ideal), metric_of(symbol, shift), n_min, n_max);
        return io::to_json(estimate_invariants(seq, r)).dump();
    });

    m.def("conservation", [](int N, std::vector<int> ideal, int n_min, int n_max) {
        const GradedAlgebra a = monomial_algebra(N);
        const ConservationReport r = conservation_check(a, ideal_of(a, ideal), MetricSpec::fubini_study(), n_min, n_max);
        Json degrees = Json::array();
        for (const auto& d : r.degrees)
            degrees.push_back({{"n", d.n}, {"parts", d.parts}, {"sum", d.sum}, {"chi_total", d.chi_total},
                               {"exact", d.exact}, {"defect", d.defect}});
        return Json{{"degrees", degrees}, {"passed", r.passed}, {"failing_degrees", r.failing_degrees}}.dump();
    });

    m.def("fs_symbol", [](int dim, double T, std::size_t nodes) {
        return io::to_json(fubini_study_symbol(dim, T, nodes)).dump();
    }, py::arg("dim") = 1, py::arg("T") = 30.0, py::arg("nodes") = 4097);

    m.def("envelope", [](const std::string& symbol) {
        return io::to_json(equilibrium_envelope(io::parse_symbol(Json::parse(symbol)))).dump();
    });

    m.def("sequence_inequality", [](std::vector<std::pair<std::vector<int>, double>> entries, int N, double eps) {
        std::vector<SequenceEntry> b;
        for (auto& [idx, value] : entries) b.push_back({idx, value});
        const SequenceInequality r = sequence_inequality_check(b, N, eps);
        return py::make_tuple(r.holds, r.slack);
    });

    m.def("run", [](std::vector<std::string> args) {
        std::ostringstream out, err;
        int code = 0;
        {
            py::gil_scoped_release release;
            code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
    });

    m.def("sha256_hex", &cli::sha256_hex);
}
