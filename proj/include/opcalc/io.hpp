#pragma once

// JSON and CSV formats.
//   matrix:  {"n": 2, "re": [[...], [...]], "im": [[...], [...]]}   ("im" optional)
//   measure: {"a": 0, "b": 1, "atoms": [[t, w], ...],
//             "densities": [{"p": .., "q": .., "c": .., "kind": "jacobi"}], "order": 64}
//   symbol:  {"builtin": "example1a" | "example1b", "alpha": .., "b": ..}
//            or {"measure": {...}, "class": "ZR_0b" | "ZR_ab"}   (class defaults from a)
// Parse failures throw InvalidArgument.

#include "opcalc/frechet.hpp"
#include "opcalc/perturb.hpp"
#include "opcalc/shift.hpp"

#include <json.hpp>

#include <string>

namespace opcalc {

inline constexpr const char* kVersion = "0.1.0";

namespace io {

using json = nlohmann::ordered_json;

json to_json(const Matrix& M);
Matrix matrix_from_json(const json& j);

/// Rows of comma separated reals; blank lines and lines starting with # are skipped.
Matrix matrix_from_csv(const std::string& text);

json to_json(const RepresentingMeasure& m);
RepresentingMeasure measure_from_json(const json& j);

json to_json(const MarkovSymbol& s);
MarkovSymbol symbol_from_json(const json& j);

json to_json(const OperatorCertificate& c, bool with_grid = false);
json to_json(const BoundReport& r);
json to_json(const SuiteSummary& s);
json to_json(const TraceFormulaReport& r);
json to_json(const MembershipReport& r);
json to_json(cplx z);

std::string read_file(const std::string& path);
json parse(const std::string& text, const std::string& what);
/// .csv -> matrix_from_csv, anything else -> JSON matrix.
Matrix load_matrix(const std::string& path);
MarkovSymbol load_symbol(const std::string& path);

}  // namespace io
}  // namespace opcalc
