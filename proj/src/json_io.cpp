#include "densegen/json_io.hpp"

#include <fstream>
#include <sstream>

#include "densegen/errors.hpp"

namespace densegen::json_io {

namespace {

json scalar_to_json(Scalar v, FieldTag field) {
  if (field == FieldTag::Real && v.imag() == 0.0) return json(v.real());
  return json::array({v.real(), v.imag()});
}

Scalar scalar_from_json(const json& j) {
  if (j.is_number()) return Scalar(j.get<double>());
  if (j.is_array() && j.size() == 2)
    return Scalar(j.at(0).get<double>(), j.at(1).get<double>());
  fail(ErrKind::BadInput, "scalar must be a number or [re, im]");
}

FieldTag field_from_json(const json& j) {
  const std::string f = j.get<std::string>();
  if (f == "real") return FieldTag::Real;
  if (f == "complex") return FieldTag::Complex;
  fail(ErrKind::BadInput, "field must be \"real\" or \"complex\"");
}

}  // namespace

json matrix_to_json(const Matrix& m) {
  json data = json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) data.push_back(scalar_to_json(m.at(i, j), m.field()));
  return json{{"field", to_string(m.field())},
              {"rows", m.rows()},
              {"cols", m.cols()},
              {"data", data}};
}

Matrix matrix_from_json(const json& j) {
  const FieldTag field = field_from_json(j.at("field"));
  const int rows = j.at("rows").get<int>();
  const int cols = j.at("cols").get<int>();
  const json& data = j.at("data");
  if (!data.is_array() || static_cast<int>(data.size()) != rows * cols)
    fail(ErrKind::BadInput, "data length must be rows*cols");
  Matrix m(field, rows, cols);
  int k = 0;
  for (int i = 0; i < rows; ++i)
    for (int c = 0; c < cols; ++c) m.at(i, c) = scalar_from_json(data.at(k++));
  if (field == FieldTag::Real)
    for (const Scalar& v : m.data())
      if (v.imag() != 0.0) fail(ErrKind::BadInput, "real matrix with nonzero imaginary part");
  return m;
}

json bordered_to_json(const upsilon::BorderedMatrix& b) {
  return json{{"F", matrix_to_json(b.f)},
              {"X", matrix_to_json(b.x)},
              {"Y", matrix_to_json(b.y)},
              {"eta", json::array({b.eta.real(), b.eta.imag()})}};
}

upsilon::BorderedMatrix bordered_from_json(const json& j) {
  upsilon::BorderedMatrix b;
  b.f = matrix_from_json(j.at("F"));
  b.x = matrix_from_json(j.at("X"));
  b.y = matrix_from_json(j.at("Y"));
  b.eta = scalar_from_json(j.at("eta"));
  return b;
}

json pair_to_json(const gen::GeneratorPair& p) {
  return json{{"A", matrix_to_json(p.a)},    {"B", matrix_to_json(p.b)},
              {"field", to_string(p.field)}, {"dim", p.dim},
              {"density_scope", gen::to_string(p.scope)},  {"provenance", p.provenance}};
}

gen::GeneratorPair pair_from_json(const json& j) {
  const FieldTag field = field_from_json(j.at("field"));
  const int dim = j.at("dim").get<int>();
  const std::string provenance = j.value("provenance", "");
  try {
    gen::GeneratorPair p =
        field == FieldTag::Real ? gen::build_real_pair(dim) : gen::build_complex_pair(dim);
    const Matrix a = matrix_from_json(j.at("A"));
    const Matrix b = matrix_from_json(j.at("B"));
    if ((p.a - a).max_abs() <= 1e-9 && (p.b - b).max_abs() <= 1e-9) return p;
  } catch (const Error&) {
    // not a ladder pair; fall through to the raw form
  }
  gen::GeneratorPair p;
  p.a = matrix_from_json(j.at("A"));
  p.b = matrix_from_json(j.at("B"));
  p.field = field;
  p.dim = dim;
  p.scope = gen::DensityScope::Unvalidated;
  p.provenance = provenance;
  return p;
}

json word_to_json(const Word& w) {
  json letters = json::array();
  for (const Letter& l : w.letters)
    letters.push_back(json::array({l.gen == Gen::A ? "A" : "B", l.exp}));
  return json{{"letters", letters}};
}

Word word_from_json(const json& j) {
  Word w;
  for (const json& l : j.at("letters")) {
    const std::string g = l.at(0).get<std::string>();
    if (g != "A" && g != "B") fail(ErrKind::BadInput, "letter must be A or B");
    w.append(g == "A" ? Gen::A : Gen::B, l.at(1).get<long>());
  }
  return w;
}

namespace {

json point_to_json(const upsilon::UpsilonPoint& p) {
  return json::array(
      {json::array({p.a.real(), p.a.imag()}), json::array({p.eta.real(), p.eta.imag()})});
}

upsilon::UpsilonPoint point_from_json(const json& j) {
  return {scalar_from_json(j.at(0)), scalar_from_json(j.at(1))};
}

json operand_to_json(const planner::Operand& op) {
  if (op.is_ref) return json{{"ref", op.ref}};
  return json{{"point", point_to_json(op.value)}};
}

planner::Operand operand_from_json(const json& j) {
  if (j.contains("ref")) return planner::Operand::prev(j.at("ref").get<int>());
  return planner::Operand::point(point_from_json(j.at("point")));
}

}  // namespace

json plan_to_json(const planner::CombinePlan& p) {
  json steps = json::array();
  for (const planner::PlanStep& st : p.steps) {
    switch (st.kind) {
      case planner::PlanStep::Kind::Combine:
        steps.push_back(json{{"kind", "combine"},
                             {"p", operand_to_json(st.p)},
                             {"q", operand_to_json(st.q)},
                             {"r", json::array({st.r.real(), st.r.imag()})},
                             {"s", json::array({st.s.real(), st.s.imag()})}});
        break;
      case planner::PlanStep::Kind::Surrogate:
        steps.push_back(
            json{{"kind", "surrogate"}, {"base", point_to_json(st.base)}, {"t", st.param}});
        break;
      case planner::PlanStep::Kind::ProductRealize:
        steps.push_back(json{{"kind", "product"},
                             {"c", st.c.real()},
                             {"d", st.d.real()},
                             {"v", st.v.real()}});
        break;
    }
  }
  return json{{"mode", planner::to_string(p.mode)},
              {"target", point_to_json(p.target)},
              {"steps", steps},
              {"predicted_error", p.predicted_error}};
}

planner::CombinePlan plan_from_json(const json& j) {
  planner::CombinePlan p;
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "complex")
    p.mode = planner::PlanMode::ComplexFull;
  else if (mode == "real+")
    p.mode = planner::PlanMode::RealPlus;
  else if (mode == "real-")
    p.mode = planner::PlanMode::RealMinus;
  else
    fail(ErrKind::BadInput, "unknown plan mode");
  p.target = point_from_json(j.at("target"));
  p.predicted_error = j.at("predicted_error").get<double>();
  for (const json& s : j.at("steps")) {
    planner::PlanStep st;
    const std::string kind = s.at("kind").get<std::string>();
    if (kind == "combine") {
      st.kind = planner::PlanStep::Kind::Combine;
      st.p = operand_from_json(s.at("p"));
      st.q = operand_from_json(s.at("q"));
      st.r = scalar_from_json(s.at("r"));
      st.s = scalar_from_json(s.at("s"));
    } else if (kind == "surrogate") {
      st.kind = planner::PlanStep::Kind::Surrogate;
      st.base = point_from_json(s.at("base"));
      st.param = s.at("t").get<double>();
    } else if (kind == "product") {
      st.kind = planner::PlanStep::Kind::ProductRealize;
      st.c = s.at("c").get<double>();
      st.d = s.at("d").get<double>();
      st.v = s.at("v").get<double>();
    } else {
      fail(ErrKind::BadInput, "unknown plan step kind");
    }
    p.steps.push_back(st);
  }
  return p;
}

json report_to_json(const harness::DensityReport& r) {
  return json{{"pair_id", r.pair_id},
              {"dimension", r.dimension},
              {"field", to_string(r.field)},
              {"samples", r.samples},
              {"eps", r.eps},
              {"hit_rate", r.hit_rate},
              {"error_quantiles", r.error_quantiles},
              {"witness_samples", r.witness_samples},
              {"witness_hit_rate", r.witness_hit_rate},
              {"witness_error_quantiles", r.witness_error_quantiles},
              {"budget", r.budget},
              {"seed", r.seed}};
}

json approx_to_json(const synthesis::ApproxResult& r) {
  return json{{"word", word_to_json(r.word)},
              {"achieved_error", r.achieved_error},
              {"target_norm", r.target_norm},
              {"evaluations", r.evaluations},
              {"wall_budget_used", r.wall_budget_used},
              {"budget_exhausted", r.budget_exhausted}};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrKind::BadInput, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrKind::BadInput, "cannot write " + path);
  out << text;
}

}  // namespace densegen::json_io
