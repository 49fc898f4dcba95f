#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ahilb/cli.hpp"

namespace {

struct Result {
    int code;
    std::string out;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = ahilb::cli::run(args, out, err);
    return {code, out.str()};
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("ahilb_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("cli: hilbert and blocks") {
    const Result h = run({"hilbert", "--variety", "p2", "--n-max", "4"});
    REQUIRE(h.code == 0);
    const auto j = nlohmann::json::parse(h.out);
    CHECK(j["values"] == nlohmann::json::array({1, 3, 6, 10, 15}));
    CHECK(j["schema"] == "1");

    const Result b = run({"blocks", "--variety", "p1", "--ideal", "x1", "--n", "1"});
    REQUIRE(b.code == 0);
    CHECK(nlohmann::json::parse(b.out)["total_rank"] == 5);
}

TEST_CASE("cli: csv output") {
    const Result h = run({"hilbert", "--variety", "p1", "--n-max", "2", "--format", "csv"});
    CHECK(h.code == 0);
    CHECK(h.out == "n,rank\n0,1\n1,2\n2,3\n");
}

TEST_CASE("cli: error exit codes") {
    CHECK(run({"hilbert", "--variety", "q7"}).code == ahilb::cli::kConfigError);
    CHECK(run({"frobnicate"}).code == ahilb::cli::kConfigError);
    CHECK(run({"blocks", "--variety", "p1"}).code == ahilb::cli::kConfigError);
    CHECK(run({"theta", "--lattice", "/nonexistent/file.json"}).code == ahilb::cli::kConfigError);
    const Result bad = run({"chi", "--metric", "hyperbolic"});
    CHECK(bad.code == ahilb::cli::kConfigError);
    CHECK(nlohmann::json::parse(bad.out)["error"]["type"] == "config");
    CHECK(run({"monotone", "--shift", "1", "--shift2", "0", "--n-max", "3"}).code == ahilb::cli::kConfigError);
}

TEST_CASE("cli: theta from a lattice file") {
    const auto dir = scratch("theta");
    std::ofstream(dir / "z.json") << R"({"gram": [["1"]]})";
    const Result r = run({"theta", "--lattice", (dir / "z.json").string()});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(std::strtod(j["h0_theta"].get<std::string>().c_str(), nullptr) == doctest::Approx(0.0829015).epsilon(1e-6));
}

TEST_CASE("cli: ring and symbol files") {
    const auto dir = scratch("files");
    std::ofstream(dir / "ring.json") << R"({"vars": 2, "ideal": [[0, 1]]})";
    const Result r = run({"iso", "--variety", (dir / "ring.json").string(), "--n", "3"});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["holds"] == true);

    const Result env = run({"envelope", "--metric", "toric:fs"});
    REQUIRE(env.code == 0);
    std::ofstream(dir / "sym.json") << nlohmann::json::parse(env.out)["symbol"].dump();
    const Result g = run({"gram", "--metric", "toric:" + (dir / "sym.json").string(), "--n", "3"});
    CHECK(g.code == 0);
}

TEST_CASE("cli: atomic output and cache determinism") {
    const auto dir = scratch("cache");
    const std::vector<std::string> args{"chi", "--metric", "toric:fs", "--n-max", "12", "--cache-dir",
                                        (dir / "c").string(), "--out", (dir / "a.json").string()};
    REQUIRE(run(args).code == 0);
    std::vector<std::string> again = args;
    again.back() = (dir / "b.json").string();
    REQUIRE(run(again).code == 0);
    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream in(p);
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
    };
    CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
    CHECK_FALSE(slurp(dir / "a.json").empty());
    std::size_t entries = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir / "c"))
        if (e.path().extension() == ".json") ++entries;
    CHECK(entries == 13);
}

TEST_CASE("cli: check suite") {
    const Result r = run({"check", "--seed", "3"});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["passed"] == true);
}

TEST_CASE("sha256") {
    CHECK(ahilb::cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
