#pragma once

#include <string>

#include <json.hpp>

#include "ahilb/deformation.hpp"
#include "ahilb/graded.hpp"
#include "ahilb/invariants.hpp"
#include "ahilb/lattice.hpp"
#include "ahilb/toric.hpp"

namespace ahilb::io {

using Json = nlohmann::json;

inline constexpr const char* kSchema = "1";

/// Hex-float text ("%a"), round-trips exactly; "inf" / "-inf" for infinities.
std::string hex(double x);
/// Accepts JSON numbers, hex or decimal strings, and "inf".
double parse_double(const Json& j);

std::string rational_string(const Rational& q);
Rational parse_rational(const Json& j);
BigInt parse_integer(const Json& j);

Json to_json(const IntMatrix& m);
Json to_json(const RationalMatrix& m);
Json to_json(const RealMatrix& m);

struct RingFile {
    GradedAlgebra algebra;
    std::vector<IntVector> ideal;
};
/// {"vars": N+1, "relations": [{"degree": d, "coefficients": [...]}], "ideal": [[...], ...]}
RingFile parse_ring(const Json& j);

/// {"rank": r, "torsion": [...], "gram": [[...]]}; "p/q" entries give a
/// rational Gram, any floating entry makes it extended precision.
SeminormedLattice parse_lattice(const Json& j);
Json to_json(const SeminormedLattice& l);

/// {"dim", "T", "values", "slopes", "polytope" (optional)}.
ToricSymbol parse_symbol(const Json& j);
Json to_json(const ToricSymbol& s);

Json to_json(const DeformationBlocks& b, int threshold_n0);
Json to_json(const IsotypicReport& r);
Json to_json(const InvariantEstimate& e);
Json to_json(const ToricGram& g);
ToricGram parse_toric_gram(const Json& j);

Json read_json_file(const std::string& path);

}  // namespace ahilb::io
