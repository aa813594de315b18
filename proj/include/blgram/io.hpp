#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "blgram/actuator_selection.hpp"
#include "blgram/energy_bounds.hpp"
#include "blgram/gramian.hpp"
#include "blgram/network_analysis.hpp"
#include "blgram/system.hpp"

namespace blgram::io {

/// Insertion-ordered JSON value: emitted documents keep field order stable.
using Json = nlohmann::ordered_json;

/// Significant digits used when emitting floating-point values.
inline constexpr int kJsonSigDigits = 17;  ///< Round-trips doubles bit-for-bit.
inline constexpr int kCsvSigDigits = 12;

// -- reading ---------------------------------------------------------------

/// Whole file as a string; InputError when unreadable.
std::string read_file(const std::string& path);

/// Parses text as JSON; InputError with the origin name on failure.
Json parse_json_text(const std::string& text, const std::string& origin);

/// {"n": int, "m": int, "A": rows, "F": [rows...], "B": rows}.
BilinearSystem system_from_json(const Json& j);

/// {"A": rows, "candidates": [{"F": rows, "B": flat}, ...]}.
ActuatorLibrary library_from_json(const Json& j);

/// CSV with header "u1,...,um" and one input vector per row.
std::vector<Vector> inputs_from_csv(const std::string& text, Index m);

/// Nested row-major array -> matrix. rows/cols of -1 accept any extent.
Matrix matrix_from_json(const Json& j, const std::string& name, Index rows, Index cols);

/// Flat array -> vector.
Vector vector_from_json(const Json& j, const std::string& name, Index size);

// -- building --------------------------------------------------------------

Json matrix_to_json(const Matrix& m);  ///< Nested rows.
Json vector_to_json(const Vector& v);  ///< Flat array.
Json system_to_json(const BilinearSystem& sys);
Json gramian_to_json(const GramianResult& g);
/// include_psi appends the certificate weight matrix.
Json energy_bound_to_json(const EnergyBound& eb, bool include_psi);
Json expansion_to_json(const LinearExpansion& e);
Json witness_to_json(double a, double f, double w, const RatioWitness& wit);

// -- emission --------------------------------------------------------------

/// Fixed-significant-digit rendering. Zero keeps its sign ("0" / "-0.0") so a
/// reparse restores the exact bit pattern. Non-finite values are the caller's
/// responsibility (encode as null or a string before dumping).
std::string format_double(double x, int sig);

/// Serializes with 2-space indentation, LF newlines, doubles at
/// kJsonSigDigits significant digits, and a trailing newline.
std::string dump_json(const Json& j);

/// "k,energy,bound,slack" rows at kCsvSigDigits.
std::string energy_report_csv(const EnergyReport& r);

/// "n,lambda_min_bilinear,lambda_min_linear,lambda_min_bound,assumptions_hold";
/// NaN lambdas and inapplicable bounds become empty cells.
std::string sweep_csv(const std::vector<SweepRecord>& recs);

/// Writes text to path (LF, no transformation); InputError on failure.
void write_file(const std::string& path, const std::string& text);

}  // namespace blgram::io
