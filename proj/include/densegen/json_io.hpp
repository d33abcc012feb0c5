#pragma once

#include <string>

#include <json.hpp>

#include "densegen/generators.hpp"
#include "densegen/harness.hpp"
#include "densegen/planner.hpp"
#include "densegen/upsilon.hpp"

namespace densegen::json_io {

using nlohmann::json;

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);

json bordered_to_json(const upsilon::BorderedMatrix& b);
upsilon::BorderedMatrix bordered_from_json(const json& j);

json pair_to_json(const gen::GeneratorPair& p);
/// Pairs whose provenance names a ladder are rebuilt through the ladder
/// constructors so the inner pair and letter lift come back too.
gen::GeneratorPair pair_from_json(const json& j);

json word_to_json(const Word& w);
Word word_from_json(const json& j);

json plan_to_json(const planner::CombinePlan& p);
planner::CombinePlan plan_from_json(const json& j);

json report_to_json(const harness::DensityReport& r);

json approx_to_json(const synthesis::ApproxResult& r);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace densegen::json_io
