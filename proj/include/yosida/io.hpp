// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <json.hpp>

#include "yosida/delay.hpp"
#include "yosida/dichotomy.hpp"
#include "yosida/linops.hpp"
#include "yosida/models.hpp"
#include "yosida/yosida.hpp"

namespace yosida::io {

using nlohmann::json;

// Matrix formats. JSON: {"dim": n, "re": [[...]], "im": [[...]]} ("im" optional on
// input). Text: n lines, each holding n "re im" pairs. Both round-trip finite
// doubles bit-exactly.
json matrix_to_json(const OperatorMatrix &m);
OperatorMatrix matrix_from_json(const json &j);
std::string matrix_to_text(const OperatorMatrix &m);
OperatorMatrix matrix_from_text(const std::string &text);

enum class MatrixFormat { Json, Text };

/// Reads either format; JSON is recognized by a leading '{'.
OperatorMatrix load_matrix(const std::string &path);
void save_matrix(const std::string &path, const OperatorMatrix &m, MatrixFormat format);

std::string read_file(const std::string &path);
void write_file(const std::string &path, const std::string &contents);

/// Serializes with every floating-point number in 17-significant-digit form, so
/// equal inputs give byte-identical output. Non-finite numbers become null.
std::string dump(const json &j, int indent = 2);

/// Parses a JSON document, or a TOML document restricted to tables, arrays of
/// tables, inline tables, arrays, strings, numbers and booleans.
json parse_config(const std::string &text);
json parse_toml(const std::string &text);

json to_json(cplx z);
json to_json(const std::vector<cplx> &zs);
json to_json(const SemigroupBound &b);
json to_json(const YosidaDistanceEstimate &e);
json to_json(const BoundedPerturbationReport &r);
json to_json(const ClassPReport &r);
json to_json(const SemigroupDifferenceReport &r);
json to_json(const DichotomyReport &r);
json to_json(const PersistenceReport &r);
json to_json(const CharRoot &r);
json to_json(const DelaySystem &s);
json to_json(const DelayDichotomyReport &r);
json to_json(const GeneratorDistanceReport &r);
json to_json(const A0BoundReport &r);
json to_json(const FunctionalBoundReport &r);

}  // namespace yosida::io
