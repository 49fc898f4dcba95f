#include "ahilb/cli.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "ahilb/errors.hpp"
#include "ahilb/io.hpp"

namespace ahilb::cli {

namespace fs = std::filesystem;
using io::Json;
using io::hex;

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw ComputationError("sha256 failed");
    std::ostringstream s;
    for (unsigned int i = 0; i < len; ++i) s << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return s.str();
}

namespace {

struct RunConfig {
    std::string command;
    std::string variety = "p1";
    std::string ideal;
    std::string metric = "fs";
    std::string metric2;
    std::string lattice;
    double shift = 0.0;
    double shift2 = 0.0;
    int n = -1;
    int n_min = -1;
    int n_max = -1;
    int r = -1;
    unsigned precision = 128;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "json";
    std::string cache_dir;
    double tail_tol = 1e-12;
    double quad_tol = 1e-8;
    int steps = 7;
    bool numeric = false;
    int numeric_n_max = 200;
};

// Table for CSV output; floats printed with 17 significant digits.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string dec(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct Report {
    Json json;
    Table table;
    bool failed = false;
};

// ---- Gram cache ------------------------------------------------------------

class DirectoryLock {
public:
    DirectoryLock(const fs::path& dir, bool exclusive) {
        fd_ = ::open((dir / ".lock").c_str(), O_RDWR | O_CREAT, 0644);
        if (fd_ >= 0) ::flock(fd_, exclusive ? LOCK_EX : LOCK_SH);
    }
    ~DirectoryLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }
    DirectoryLock(const DirectoryLock&) = delete;
    DirectoryLock& operator=(const DirectoryLock&) = delete;

private:
    int fd_ = -1;
};

void write_atomically(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw PreconditionError("cannot write '" + path.string() + "'");
        f << content;
        if (!f.flush()) throw ComputationError("write failed for '" + path.string() + "'");
    }
    fs::rename(tmp, path);
}

class FileGramStore : public GramStore {
public:
    FileGramStore(fs::path dir, std::string key) : dir_(std::move(dir)), key_(std::move(key)) {
        fs::create_directories(dir_);
    }

    std::optional<ToricGram> load(int n) override {
        const fs::path p = entry(n);
        DirectoryLock lock(dir_, false);
        std::ifstream in(p);
        if (!in) return std::nullopt;
        try {
            Json j = Json::parse(in);
            if (j.value("key", "") != key_) return std::nullopt;
            return io::parse_toric_gram(j.at("gram"));
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }

    void save(const ToricGram& gram) override {
        DirectoryLock lock(dir_, true);
        Json j{{"key", key_}, {"gram", io::to_json(gram)}};
        write_atomically(entry(gram.n), j.dump());
    }

private:
    fs::path entry(int n) const { return dir_ / (sha256_hex(key_ + ":" + std::to_string(n)) + ".json"); }

    fs::path dir_;
    std::string key_;
};

// ---- Config resolution -----------------------------------------------------

struct Resolved {
    GradedAlgebra algebra;
    GradedIdeal ideal;
    std::string ideal_label;
};

bool looks_like_file(const std::string& s) { return s.find('/') != std::string::npos || s.ends_with(".json"); }

Resolved resolve_geometry(const RunConfig& c) {
    Resolved r;
    std::vector<IntVector> file_ideal;
    if (c.variety.size() >= 2 && c.variety[0] == 'p' &&
        c.variety.find_first_not_of("0123456789", 1) == std::string::npos) {
        r.algebra = monomial_algebra(std::stoi(c.variety.substr(1)));
    } else if (looks_like_file(c.variety)) {
        io::RingFile rf = io::parse_ring(io::read_json_file(c.variety));
        r.algebra = rf.algebra;
        file_ideal = rf.ideal;
    } else {
        throw PreconditionError("unknown variety '" + c.variety + "' (use pN or a ring file)");
    }

    if (c.ideal.empty()) {
        r.ideal = GradedIdeal(r.algebra, file_ideal);
        r.ideal_label = file_ideal.empty() ? "none" : "file";
    } else if (c.ideal == "none" || c.ideal == "0") {
        r.ideal = GradedIdeal(r.algebra, {});
        r.ideal_label = "none";
    } else if (looks_like_file(c.ideal)) {
        r.ideal = GradedIdeal(r.algebra, io::parse_ring(io::read_json_file(c.ideal)).ideal);
        r.ideal_label = "file";
    } else {
        std::vector<int> vars;
        std::stringstream ss(c.ideal);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.size() < 2 || tok[0] != 'x' || tok.find_first_not_of("0123456789", 1) != std::string::npos)
                throw PreconditionError("ideal must be a list like x1,x2");
            const int v = std::stoi(tok.substr(1));
            if (v >= r.algebra.num_variables()) throw PreconditionError("ideal variable " + tok + " out of range");
            vars.push_back(v);
        }
        r.ideal = GradedIdeal::coordinate(r.algebra, vars);
        r.ideal_label = c.ideal;
    }
    return r;
}

std::string cache_root(const RunConfig& c) {
    if (!c.cache_dir.empty()) return c.cache_dir;
    if (const char* env = std::getenv("AHILB_CACHE_DIR")) return env;
    return {};
}

MetricSpec resolve_metric(const RunConfig& c, const std::string& spec, double shift) {
    if (spec == "fs") return MetricSpec::fubini_study(shift);
    if (!spec.starts_with("toric:")) throw PreconditionError("metric must be fs or toric:<symbol file>");
    const std::string src = spec.substr(6);
    ToricSymbol sym = src == "fs" ? fubini_study_symbol() : io::parse_symbol(io::read_json_file(src));
    QuadratureOptions q;
    q.relative_tolerance = c.quad_tol;
    MetricSpec m = MetricSpec::toric(sym, shift, q);
    if (const std::string root = cache_root(c); !root.empty()) {
        const Json key{{"kind", "toric-gram"}, {"symbol", io::to_json(sym)}, {"quad_tol", hex(c.quad_tol)}};
        m.store = std::make_shared<FileGramStore>(root, sha256_hex(key.dump()));
    }
    return m;
}

std::string metric_label(const std::string& spec) {
    if (!spec.starts_with("toric:") || spec == "toric:fs") return spec;
    std::ifstream in(spec.substr(6), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return "toric:sha256:" + sha256_hex(ss.str());
}

Json config_json(const RunConfig& c) {
    Json j;
    j["command"] = c.command;
    j["variety"] = looks_like_file(c.variety) ? "file" : c.variety;
    j["ideal"] = c.ideal;
    j["metric"] = metric_label(c.metric);
    if (!c.metric2.empty()) j["metric2"] = metric_label(c.metric2);
    j["shift"] = hex(c.shift);
    j["n"] = c.n;
    j["n_min"] = c.n_min;
    j["n_max"] = c.n_max;
    j["r"] = c.r;
    j["precision"] = c.precision;
    j["seed"] = c.seed;
    return j;
}

void default_range(RunConfig& c, int lo, int hi) {
    if (c.n_max < 0) c.n_max = hi;
    if (c.n_min < 0) c.n_min = lo;
    if (c.n_min > c.n_max) throw PreconditionError("--n-min exceeds --n-max");
}

int require_n(const RunConfig& c) {
    if (c.n < 0) throw PreconditionError("--n is required");
    return c.n;
}

Geometry module_geometry(const Resolved& g) {
    if (g.ideal.is_zero()) return {g.algebra, GradedModule::ring(g.algebra)};
    return {g.algebra, GradedModule::quotient(g.algebra, g.ideal)};
}

// ---- Commands --------------------------------------------------------------

Report cmd_hilbert(RunConfig& c) {
    default_range(c, 0, 10);
    const Resolved g = resolve_geometry(c);
    const Geometry geo = module_geometry(g);
    const auto values = hilbert_function(geo.module, c.n_min, c.n_max);
    Report r;
    r.json["values"] = values;
    r.table.header = {"n", "rank"};
    for (std::size_t i = 0; i < values.size(); ++i)
        r.table.rows.push_back({std::to_string(c.n_min + static_cast<int>(i)), std::to_string(values[i])});
    return r;
}

Report cmd_blocks(RunConfig& c) {
    const int n = require_n(c);
    const Resolved g = resolve_geometry(c);
    const auto blocks = deformation_blocks(g.algebra, g.ideal, n);
    const auto iso = isotypic_decomposition(g.algebra, g.ideal, n);
    Report r;
    r.json = io::to_json(blocks, iso.threshold_n0);
    r.table.header = {"l", "rank", "weight"};
    for (const auto& b : blocks.blocks)
        r.table.rows.push_back({std::to_string(b.l), std::to_string(b.rank), std::to_string(b.weight)});
    return r;
}

Report cmd_iso(RunConfig& c) {
    const int n = require_n(c);
    const Resolved g = resolve_geometry(c);
    const auto rep = isotypic_decomposition(g.algebra, g.ideal, n);
    Report r;
    r.json = io::to_json(rep);
    r.table.header = {"l", "E_rank", "F_free_rank", "phi_isomorphism", "exact"};
    for (const auto& comp : rep.decomposition.components)
        r.table.rows.push_back({std::to_string(comp.l), std::to_string(comp.E.rows()), std::to_string(comp.F.free_rank),
                                comp.phi_isomorphism ? "1" : "0", comp.exact ? "1" : "0"});
    return r;
}

Report cmd_chi(RunConfig& c) {
    default_range(c, 0, 10);
    const Resolved g = resolve_geometry(c);
    const MetricSpec m = resolve_metric(c, c.metric, c.shift);
    const auto seq = chi_sequence(module_geometry(g), m, c.n_min, c.n_max);
    Report r;
    Json rows = Json::array();
    r.table.header = {"n", "chi", "rank"};
    for (const auto& p : seq) {
        rows.push_back({{"n", p.n}, {"chi", hex(p.chi)}, {"rank", p.rank}});
        r.table.rows.push_back({std::to_string(p.n), dec(p.chi), std::to_string(p.rank)});
    }
    r.json["sequence"] = rows;
    return r;
}

Report cmd_theta(RunConfig& c) {
    if (c.lattice.empty()) throw PreconditionError("--lattice is required");
    const SeminormedLattice L = io::parse_lattice(io::read_json_file(c.lattice));
    ThetaOptions opt;
    opt.tail_tolerance = c.tail_tol;
    const double x = chi(L);
    const double h0 = h0_theta(L, opt);
    Report r;
    r.json["chi"] = hex(x);
    r.json["h0_theta"] = hex(h0);
    r.json["h1_theta"] = hex(h0 - x);
    r.json["tail_tolerance"] = hex(c.tail_tol);
    r.table.header = {"quantity", "value"};
    r.table.rows = {{"chi", dec(x)}, {"h0_theta", dec(h0)}, {"h1_theta", dec(h0 - x)}};
    return r;
}

Report cmd_gram(RunConfig& c) {
    const int n = require_n(c);
    const Resolved g = resolve_geometry(c);
    const MetricSpec m = resolve_metric(c, c.metric, c.shift);
    const SeminormedLattice L = degree_lattice(m, g.algebra.projective_dimension(), n);
    Report r;
    r.json["n"] = n;
    r.json["lattice"] = io::to_json(L);
    r.table.header = {"index", "entry"};
    const RealMatrix rg = L.real_gram();
    for (std::size_t i = 0; i < L.rank(); ++i) {
        std::string e = L.is_rational() ? io::rational_string(std::get<RationalMatrix>(L.gram())(i, i))
                                        : dec(rg(i, i).convert_to<double>());
        r.table.rows.push_back({std::to_string(i), e});
    }
    return r;
}

Report cmd_envelope(RunConfig& c) {
    ToricSymbol sym = c.metric == "fs" ? fubini_study_symbol() : resolve_metric(c, c.metric, 0.0).symbol;
    const ToricSymbol env = equilibrium_envelope(shift(sym, c.shift));
    Report r;
    r.json["symbol"] = io::to_json(env);
    r.table.header = {"t", "value"};
    if (env.dim == 1)
        for (std::size_t i = 0; i < env.nodes; ++i) r.table.rows.push_back({dec(env.node(i)), dec(env.values[i])});
    return r;
}

Report cmd_invariant(RunConfig& c) {
    const Resolved g = resolve_geometry(c);
    const MetricSpec m = resolve_metric(c, c.metric, c.shift);
    if (c.n_max < 0) c.n_max = m.kind == MetricSpec::Kind::FubiniStudy ? 400 : 200;
    if (c.n_min < 0) c.n_min = std::max(1, c.n_max / 20);
    const Geometry geo = module_geometry(g);
    if (c.r < 0) c.r = geo.algebra.projective_dimension() + 1 - (g.ideal.is_zero() ? 0 : 1);
    const auto est = estimate_invariants(chi_sequence(geo, m, c.n_min, c.n_max), c.r);
    Report r;
    r.json["estimate"] = io::to_json(est);
    r.table.header = {"n", "chi", "normalized", "residual"};
    for (std::size_t i = 0; i < est.n.size(); ++i)
        r.table.rows.push_back(
            {std::to_string(est.n[i]), dec(est.chi[i]), dec(est.normalized[i]), dec(est.residuals[i])});
    return r;
}

Report cmd_conserve(RunConfig& c) {
    default_range(c, 0, 12);
    const Resolved g = resolve_geometry(c);
    const MetricSpec m = resolve_metric(c, c.metric, c.shift);
    const auto rep = conservation_check(g.algebra, g.ideal, m, c.n_min, c.n_max);
    Report r;
    Json degrees = Json::array();
    r.table.header = {"n", "sum", "chi", "defect", "exact"};
    for (const auto& d : rep.degrees) {
        Json parts = Json::array();
        for (double p : d.parts) parts.push_back(hex(p));
        degrees.push_back({{"n", d.n}, {"parts", parts}, {"sum", hex(d.sum)}, {"chi", hex(d.chi_total)},
                           {"defect", hex(d.defect)}, {"exact", d.exact}});
        r.table.rows.push_back({std::to_string(d.n), dec(d.sum), dec(d.chi_total), dec(d.defect), d.exact ? "1" : "0"});
    }
    r.json["exact_core"] = {{"degrees", degrees}, {"threshold_n0", rep.threshold_n0},
                            {"failing_degrees", rep.failing_degrees}, {"passed", rep.passed}};
    r.failed = !rep.passed;
    if (c.numeric) {
        if (g.algebra.projective_dimension() != 1 || g.ideal.coordinate_variables() != std::vector<int>{1})
            throw PreconditionError("the numeric part is built for P^1 with the ideal x1");
        const ToricSymbol sym = m.kind == MetricSpec::Kind::Toric ? m.symbol : fubini_study_symbol();
        QuadratureOptions q;
        q.relative_tolerance = c.quad_tol;
        const auto num = conservation_numeric(shift(sym, c.shift), std::max(1, c.numeric_n_max / 20), c.numeric_n_max,
                                              0.05, q);
        r.json["numeric"] = {{"fiber_one", hex(num.fiber_one.c)},
                             {"fiber_infinity", hex(num.fiber_infinity.c)},
                             {"difference", hex(num.difference)},
                             {"tolerance", hex(num.tolerance)},
                             {"passed", num.passed}};
        r.failed = r.failed || !num.passed;
    }
    r.json["passed"] = !r.failed;
    return r;
}

Report cmd_project(RunConfig& c) {
    default_range(c, 0, 12);
    const Resolved g = resolve_geometry(c);
    const auto rep = projection_formula_check(g.algebra, g.ideal, c.n_min, c.n_max);
    Report r;
    Json degrees = Json::array();
    r.table.header = {"n", "rank", "pushforward", "restricted", "defect", "predicted", "normalized_defect"};
    for (const auto& d : rep.degrees) {
        degrees.push_back({{"n", d.n}, {"rank", d.rank}, {"pushforward_chi", hex(d.pushforward_chi)},
                           {"restricted_chi", hex(d.restricted_chi)}, {"defect", hex(d.defect)},
                           {"predicted_defect", hex(d.predicted_defect)},
                           {"normalized_defect", hex(d.normalized_defect)}, {"match", d.match}});
        r.table.rows.push_back({std::to_string(d.n), std::to_string(d.rank), dec(d.pushforward_chi),
                                dec(d.restricted_chi), dec(d.defect), dec(d.predicted_defect),
                                dec(d.normalized_defect)});
    }
    r.json["degrees"] = degrees;
    r.json["passed"] = rep.passed;
    r.failed = !rep.passed;
    return r;
}

Report cmd_additive(RunConfig& c) {
    default_range(c, 0, 12);
    const Resolved g = resolve_geometry(c);
    const MetricSpec m = resolve_metric(c, c.metric, c.shift);
    if (c.r < 0) c.r = g.algebra.projective_dimension() + 1;
    const auto rep = additivity_check(g.algebra, g.ideal, m, c.n_min, c.n_max, c.r);
    Report r;
    Json degrees = Json::array();
    r.table.header = {"n", "chi", "chi_sub", "chi_quotient", "exact"};
    for (const auto& d : rep.degrees) {
        degrees.push_back({{"n", d.n}, {"chi", hex(d.chi_total)}, {"chi_sub", hex(d.chi_sub)},
                           {"chi_quotient", hex(d.chi_quotient)}, {"defect", hex(d.defect)}, {"exact", d.exact}});
        r.table.rows.push_back(
            {std::to_string(d.n), dec(d.chi_total), dec(d.chi_sub), dec(d.chi_quotient), d.exact ? "1" : "0"});
    }
    r.json["degrees"] = degrees;
    r.json["normalized_total"] = hex(rep.normalized_total);
    r.json["normalized_sum"] = hex(rep.normalized_sum);
    r.json["passed"] = rep.passed;
    r.failed = !rep.passed;
    return r;
}

Report cmd_monotone(RunConfig& c) {
    default_range(c, 1, 20);
    const MetricSpec larger = resolve_metric(c, c.metric, c.shift);
    const MetricSpec smaller = resolve_metric(c, c.metric2.empty() ? c.metric : c.metric2, c.shift2);
    const auto rep = monotonicity_check(larger, smaller, c.n_min, c.n_max);
    Report r;
    Json rows = Json::array();
    r.table.header = {"n", "chi_larger", "chi_smaller"};
    for (std::size_t i = 0; i < rep.n.size(); ++i) {
        rows.push_back({{"n", rep.n[i]}, {"chi_larger", hex(rep.chi_larger[i])}, {"chi_smaller", hex(rep.chi_smaller[i])}});
        r.table.rows.push_back({std::to_string(rep.n[i]), dec(rep.chi_larger[i]), dec(rep.chi_smaller[i])});
    }
    r.json["degrees"] = rows;
    r.json["passed"] = rep.passed;
    r.failed = !rep.passed;
    return r;
}

Report cmd_approx(RunConfig& c) {
    const MetricSpec limit = resolve_metric(c, c.metric, c.shift);
    if (c.n_max < 0) c.n_max = 100;
    if (c.n_min < 0) c.n_min = std::max(1, c.n_max / 10);
    if (c.r < 0) c.r = 2;
    if (c.steps < 1) throw PreconditionError("--steps must be positive");
    std::vector<MetricSpec> family;
    for (int k = 0; k < c.steps; ++k) {
        MetricSpec m = limit;
        m.shift = c.shift - 1.0 / std::ldexp(1.0, k);
        family.push_back(m);
    }
    const auto rep = approximation_check(limit, family, c.n_min, c.n_max, c.r);
    Report r;
    Json est = Json::array();
    r.table.header = {"member", "estimate"};
    for (std::size_t j = 0; j < rep.estimates.size(); ++j) {
        est.push_back(hex(rep.estimates[j]));
        r.table.rows.push_back({std::to_string(j), dec(rep.estimates[j])});
    }
    r.json["estimates"] = est;
    r.json["target"] = hex(rep.target);
    r.json["gap"] = hex(rep.gap);
    r.json["increasing"] = rep.increasing;
    r.json["monotone"] = rep.monotone;
    r.json["passed"] = rep.passed;
    r.failed = !rep.passed;
    return r;
}

// Quick property suite with seeded generators (raw engine output only, so
// results do not depend on the standard library's distributions).
Report cmd_check(RunConfig& c) {
    std::mt19937_64 rng(c.seed);
    auto uniform_int = [&](long lo, long hi) { return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
    auto uniform01 = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    struct Item {
        std::string name;
        bool passed;
    };
    std::vector<Item> items;

    {
        bool ok = true;
        for (int trial = 0; trial < 50 && ok; ++trial) {
            const std::size_t k = static_cast<std::size_t>(uniform_int(1, 6));
            RationalMatrix b(k, k);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) b(i, j) = Rational(uniform_int(-4, 4), uniform_int(1, 3));
            RationalMatrix g = b * b.transpose();
            for (std::size_t i = 0; i < k; ++i) g(i, i) += Rational(1, uniform_int(1, 5));
            const SeminormedLattice L(g);
            std::vector<IntMatrix> chain;
            IntMatrix f(0, k);
            for (std::size_t step = 0; step + 1 < k; ++step) {
                IntVector row(k);
                for (auto& x : row) x = uniform_int(-3, 3);
                f.append_row(row);
                if (row_rank(f) != f.rows()) break;
                chain.push_back(f);
            }
            ok = filtration_chi_sum(L, chain).exact_identity;
        }
        items.push_back({"filtration_additivity", ok});
    }
    {
        bool ok = true;
        for (int N = 1; N <= 2 && ok; ++N)
            for (int M = 1; M <= N && ok; ++M) {
                const GradedAlgebra a = monomial_algebra(N);
                std::vector<int> vars;
                for (int v = N - M + 1; v <= N; ++v) vars.push_back(v);
                const GradedIdeal I = GradedIdeal::coordinate(a, vars);
                for (int n = 0; n <= 5 && ok; ++n) {
                    const auto dec_n = isotypic_decomposition_at(a, I, n);
                    ok = dec_n.holds();
                    for (const auto& comp : dec_n.components)
                        ok = ok && comp.E.rows() == monomial_block_rank(N, vars, comp.l, n);
                }
            }
        items.push_back({"isotypic_decomposition", ok});
    }
    {
        const GradedAlgebra a = monomial_algebra(1);
        items.push_back({"conservation_core",
                         conservation_check(a, GradedIdeal::coordinate(a, {1}), MetricSpec::fubini_study(), 0, 8).passed});
    }
    {
        bool ok = true;
        for (int trial = 0; trial < 50 && ok; ++trial) {
            const std::size_t k = static_cast<std::size_t>(uniform_int(1, 4));
            RationalMatrix b(k, k);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) b(i, j) = Rational(uniform_int(-3, 3), uniform_int(1, 4));
            RationalMatrix g = b * b.transpose();
            for (std::size_t i = 0; i < k; ++i) g(i, i) += Rational(1, 4);
            const SeminormedLattice L(g);
            const double h0 = h0_theta(L);
            ok = h0 >= -1e-12 && h0 >= chi(L) - 1e-12;
        }
        items.push_back({"theta_positivity", ok});
    }
    {
        bool ok = true;
        for (int trial = 0; trial < 100 && ok; ++trial) {
            ToricSymbol s = fubini_study_symbol(1, 6.0, 121);
            for (auto& v : s.values) v += 0.5 * uniform01();
            s.semipositive = false;
            const ToricSymbol e = equilibrium_envelope(s);
            const ToricSymbol ee = equilibrium_envelope(e);
            for (std::size_t i = 0; i < s.nodes && ok; ++i)
                ok = e.values[i] <= s.values[i] + 1e-12 && std::fabs(ee.values[i] - e.values[i]) <= 1e-12;
        }
        items.push_back({"envelope_projection", ok});
    }
    {
        bool ok = true;
        for (int trial = 0; trial < 1000 && ok; ++trial) {
            const int N = static_cast<int>(uniform_int(0, 5));
            std::map<std::vector<int>, double> support;
            const int count = static_cast<int>(uniform_int(1, 12));
            for (int e = 0; e < count; ++e) {
                std::vector<int> index;
                for (int k = 0; k <= N; ++k) index.push_back(static_cast<int>(uniform_int(0, 3)));
                support[index] = uniform01();
            }
            std::vector<SequenceEntry> b;
            for (const auto& [index, value] : support) b.push_back({index, value});
            ok = sequence_inequality_check(b, N, 1.0 / std::sqrt(2.0 * (N + 1))).holds;
        }
        items.push_back({"sequence_inequality", ok});
    }
    {
        bool ok = true;
        for (int n = 0; n <= 6 && ok; ++n) {
            const RationalMatrix g = fs_gram(1, n);
            const auto q = fs_gram_quadrature(1, n);
            for (std::size_t i = 0; i < q.size(); ++i) ok = ok && std::fabs(q[i] / g(i, i).get_d() - 1.0) < 1e-6;
        }
        items.push_back({"fs_gram_quadrature", ok});
    }

    Report r;
    Json list = Json::array();
    r.table.header = {"check", "passed"};
    for (const auto& it : items) {
        list.push_back({{"name", it.name}, {"passed", it.passed}});
        r.table.rows.push_back({it.name, it.passed ? "1" : "0"});
        r.failed = r.failed || !it.passed;
    }
    r.json["checks"] = list;
    r.json["passed"] = !r.failed;
    return r;
}

std::string render_csv(const Table& t) {
    if (t.header.empty()) throw PreconditionError("this command has no tabular output");
    std::ostringstream s;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) s << (i ? "," : "") << cells[i];
        s << '\n';
    };
    line(t.header);
    for (const auto& row : t.rows) line(row);
    return s.str();
}

Json error_json(const std::string& type, const std::string& message) {
    return Json{{"schema", io::kSchema}, {"error", {{"type", type}, {"message", message}}}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app{"ahilb: arithmetic Hilbert invariants and deformation to the cone"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--variety", c.variety, "pN or ring file");
    app.add_option("--ideal", c.ideal, "x1,x2 | none | ideal file");
    app.add_option("--metric", c.metric, "fs | toric:<symbol file> | toric:fs");
    app.add_option("--metric2", c.metric2, "second metric (monotone: the smaller metric)");
    app.add_option("--shift", c.shift, "constant added to the weight of --metric");
    app.add_option("--shift2", c.shift2, "constant added to the weight of --metric2");
    app.add_option("--lattice", c.lattice, "lattice file for theta");
    app.add_option("--n", c.n, "degree")->check(CLI::NonNegativeNumber);
    app.add_option("--n-min", c.n_min, "first degree")->check(CLI::NonNegativeNumber);
    app.add_option("--n-max", c.n_max, "last degree")->check(CLI::NonNegativeNumber);
    app.add_option("--r", c.r, "normalization exponent")->check(CLI::PositiveNumber);
    app.add_option("--precision", c.precision, "bits for extended precision")->check(CLI::Range(53u, 4096u));
    app.add_option("--seed", c.seed, "seed for randomized checks");
    app.add_option("--out", c.out, "output file (written atomically)");
    app.add_option("--format", c.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--cache-dir", c.cache_dir, "Gram cache directory (default $AHILB_CACHE_DIR)");
    app.add_option("--tail-tol", c.tail_tol, "theta tail tolerance")->check(CLI::PositiveNumber);
    app.add_option("--quad-tol", c.quad_tol, "relative quadrature tolerance")->check(CLI::PositiveNumber);
    app.add_option("--steps", c.steps, "approximation family size");
    app.add_flag("--numeric", c.numeric, "conserve: also run the toric fiber comparison");
    app.add_option("--numeric-n-max", c.numeric_n_max, "conserve: last degree of the numeric part");

    const std::vector<std::pair<std::string, std::function<Report(RunConfig&)>>> commands{
        {"hilbert", cmd_hilbert},     {"blocks", cmd_blocks},       {"iso", cmd_iso},
        {"chi", cmd_chi},             {"theta", cmd_theta},         {"gram", cmd_gram},
        {"envelope", cmd_envelope},   {"invariant", cmd_invariant}, {"conserve", cmd_conserve},
        {"project", cmd_project},     {"additive", cmd_additive},   {"monotone", cmd_monotone},
        {"approx", cmd_approx},       {"check", cmd_check}};
    const std::map<std::string, std::string> help{
        {"hilbert", "ranks of the graded pieces"},
        {"blocks", "isotypic blocks of the deformation in degree n"},
        {"iso", "check the isotypic decomposition in degree n"},
        {"chi", "chi of each degree"},
        {"theta", "h0 and h1 of a lattice file"},
        {"gram", "Gram matrix of degree n"},
        {"envelope", "equilibrium envelope of a toric symbol"},
        {"invariant", "asymptotic invariant from a chi sequence"},
        {"conserve", "conservation across the deformation"},
        {"project", "projection formula for a coordinate subvariety"},
        {"additive", "additivity in a short exact sequence"},
        {"monotone", "monotonicity in the metric"},
        {"approx", "continuity along a monotone family of metrics"},
        {"check", "seeded self-check suite"}};
    for (const auto& [name, fn] : commands) app.add_subcommand(name, help.at(name));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        out << error_json("config", e.what()).dump(2) << '\n';
        return kConfigError;
    }
    for (const auto& [name, fn] : commands)
        if (app.got_subcommand(name)) c.command = name;

    try {
        set_working_precision(c.precision);
        Report report;
        for (const auto& [name, fn] : commands)
            if (name == c.command) report = fn(c);
        std::string text;
        if (c.format == "csv") {
            text = render_csv(report.table);
        } else {
            Json doc = report.json;
            doc["schema"] = io::kSchema;
            doc["config"] = config_json(c);
            text = doc.dump(2) + "\n";
        }
        if (c.out.empty()) out << text;
        else write_atomically(c.out, text);
        return report.failed ? kCheckFailed : kOk;
    } catch (const PreconditionError& e) {
        out << error_json("config", e.what()).dump(2) << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        out << error_json("computation", e.what()).dump(2) << '\n';
        err << "ahilb: " << e.what() << '\n';
        return kComputationError;
    }
}

}  // namespace ahilb::cli
