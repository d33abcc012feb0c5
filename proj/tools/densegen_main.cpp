#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "densegen/errors.hpp"
#include "densegen/harness.hpp"
#include "densegen/json_io.hpp"
#include "densegen/planner.hpp"
#include "densegen/synthesis.hpp"
#include "densegen/upsilon.hpp"

namespace {

using namespace densegen;
using json_io::json;

void emit(const json& j, const std::string& out_path) {
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    json_io::write_file(out_path, text);
}

json load(const std::string& path) { return json::parse(json_io::read_file(path)); }

FieldTag parse_field(const std::string& f) {
  if (f == "real") return FieldTag::Real;
  if (f == "complex") return FieldTag::Complex;
  fail(ErrKind::BadInput, "field must be real or complex");
}

upsilon::UpsilonPoint parse_target(const std::vector<double>& v) {
  if (v.size() == 2) return {Scalar(v[0]), Scalar(v[1])};
  if (v.size() == 4) return {Scalar(v[0], v[1]), Scalar(v[2], v[3])};
  fail(ErrKind::BadInput, "--target takes u,v or u_re,u_im,v_re,v_im");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bordered-matrix density toolkit"};
  // global options (e.g. --seed) may also be given after the subcommand
  app.fallthrough();
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  double tol = 1e-9;
  std::string out_path;
  bool json_only = false;
  app.add_option("--seed", seed, "PRNG seed")->capture_default_str();
  app.add_option("--tol", tol, "classification tolerance")->capture_default_str();
  app.add_flag("--json", json_only, "machine-readable output only");

  // generate
  auto* cmd_gen = app.add_subcommand("generate", "build a ladder generator pair");
  int gen_dim = 2;
  std::string gen_field = "real";
  cmd_gen->add_option("--dim", gen_dim, "dimension")->required();
  cmd_gen->add_option("--field", gen_field, "real|complex")->required();
  cmd_gen->add_option("--out", out_path, "output file");

  // upsilon
  auto* cmd_ups = app.add_subcommand("upsilon", "Upsilon point and class of a matrix");
  std::string ups_in;
  cmd_ups->add_option("--in", ups_in, "matrix JSON file")->required();
  cmd_ups->add_option("--out", out_path, "output file");

  // factor
  auto* cmd_fac = app.add_subcommand("factor", "same-fiber sandwich factorization");
  std::string fac_g1, fac_g2;
  bool fac_positive = false;
  cmd_fac->add_option("--g1", fac_g1, "matrix JSON file")->required();
  cmd_fac->add_option("--g2", fac_g2, "matrix JSON file")->required();
  cmd_fac->add_flag("--positive", fac_positive, "signed-class mode");
  cmd_fac->add_option("--out", out_path, "output file");

  // combine
  auto* cmd_comb = app.add_subcommand("combine", "combine two Upsilon points at z = r*s");
  std::vector<double> comb_p, comb_q;
  double comb_r = 1.0, comb_s = 1.0;
  int comb_n = 2;
  bool comb_positive = false;
  cmd_comb->add_option("--p", comb_p, "point a,eta")->required()->expected(2, 4);
  cmd_comb->add_option("--q", comb_q, "point a,eta")->required()->expected(2, 4);
  cmd_comb->add_option("--r", comb_r)->required();
  cmd_comb->add_option("--s", comb_s)->required();
  cmd_comb->add_option("--n", comb_n, "core dimension");
  cmd_comb->add_flag("--real-positive", comb_positive);
  cmd_comb->add_option("--out", out_path, "output file");

  // plan
  auto* cmd_plan = app.add_subcommand("plan", "plan an Upsilon-plane target");
  std::string plan_mode = "complex";
  std::vector<double> plan_target;
  double plan_t = 1e-5;
  cmd_plan->add_option("--mode", plan_mode, "complex|real+|real-")->required();
  cmd_plan->add_option("--target", plan_target, "u,v")->required()->expected(2, 4);
  cmd_plan->add_option("--t", plan_t, "surrogate parameter");
  cmd_plan->add_option("--out", out_path, "output file");

  // approx
  auto* cmd_approx = app.add_subcommand("approx", "approximate a matrix by a word");
  std::string ap_pair, ap_target;
  double ap_eps = 1e-2;
  std::int64_t ap_budget = 1'000'000;
  cmd_approx->add_option("--pair", ap_pair, "pair JSON file")->required();
  cmd_approx->add_option("--target", ap_target, "matrix JSON file")->required();
  cmd_approx->add_option("--eps", ap_eps);
  cmd_approx->add_option("--budget", ap_budget);
  cmd_approx->add_option("--out", out_path, "output file");

  // verify-density
  auto* cmd_vd = app.add_subcommand("verify-density", "sampled density report");
  int vd_dim = 2, vd_samples = 10;
  std::string vd_field = "real";
  double vd_eps = 0.5;
  std::int64_t vd_budget = 20'000;
  cmd_vd->add_option("--dim", vd_dim);
  cmd_vd->add_option("--field", vd_field);
  cmd_vd->add_option("--samples", vd_samples);
  cmd_vd->add_option("--eps", vd_eps);
  cmd_vd->add_option("--budget", vd_budget);
  cmd_vd->add_option("--out", out_path, "output file");

  // transitivity
  auto* cmd_tr = app.add_subcommand("transitivity", "n-transitivity demonstration");
  int tr_dim = 3;
  std::string tr_field = "real";
  double tr_radius = 0.5;
  std::int64_t tr_budget = 1'000'000;
  cmd_tr->add_option("--dim", tr_dim);
  cmd_tr->add_option("--field", tr_field);
  cmd_tr->add_option("--radius", tr_radius);
  cmd_tr->add_option("--budget", tr_budget);
  cmd_tr->add_option("--out", out_path, "output file");

  // check-dependence
  auto* cmd_dep = app.add_subcommand("check-dependence", "orbit-confinement obstruction check");
  int dep_n = 3, dep_trials = 100;
  std::string dep_field = "real";
  cmd_dep->add_option("--n", dep_n);
  cmd_dep->add_option("--field", dep_field);
  cmd_dep->add_option("--trials", dep_trials);
  cmd_dep->add_option("--out", out_path, "output file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_gen) {
      const auto pair = parse_field(gen_field) == FieldTag::Real
                            ? gen::build_real_pair(gen_dim)
                            : gen::build_complex_pair(gen_dim);
      emit(json_io::pair_to_json(pair), out_path);
      return 0;
    }
    if (*cmd_ups) {
      const Matrix g = json_io::matrix_from_json(load(ups_in));
      const auto b = upsilon::split(g);
      const auto pt = upsilon::upsilon_of(b);
      emit(json{{"a", {pt.a.real(), pt.a.imag()}},
                {"eta", {pt.eta.real(), pt.eta.imag()}},
                {"class", upsilon::to_string(upsilon::classify(b, tol))}},
           out_path);
      return 0;
    }
    if (*cmd_fac) {
      const auto g1 = upsilon::split(json_io::matrix_from_json(load(fac_g1)));
      const auto g2 = upsilon::split(json_io::matrix_from_json(load(fac_g2)));
      const auto [sl, sr] = upsilon::same_fiber_factor(g1, g2, fac_positive);
      emit(json{{"S_left", json_io::matrix_to_json(sl)},
                {"S_right", json_io::matrix_to_json(sr)}},
           out_path);
      return 0;
    }
    if (*cmd_comb) {
      const auto p = parse_target(comb_p), q = parse_target(comb_q);
      const auto real = upsilon::realize_combine(p, q, comb_r, comb_s, comb_n, comb_positive);
      const auto pt = upsilon::combine_points(p, q, Scalar(comb_r) * Scalar(comb_s),
                                              comb_positive);
      emit(json{{"point", {{pt.a.real(), pt.a.imag()}, {pt.eta.real(), pt.eta.imag()}}},
                {"m1", json_io::matrix_to_json(real.m1)},
                {"m2", json_io::matrix_to_json(real.m2)},
                {"product", json_io::matrix_to_json(real.product)}},
           out_path);
      return 0;
    }
    if (*cmd_plan) {
      const auto tgt = parse_target(plan_target);
      planner::CombinePlan plan;
      if (plan_mode == "complex")
        plan = planner::plan_complex_point(tgt.a, tgt.eta, plan_t);
      else if (plan_mode == "real+")
        plan = planner::plan_real_plus(tgt.a.real(), tgt.eta.real(), plan_t);
      else if (plan_mode == "real-")
        plan = planner::plan_real_minus(tgt.a.real(), tgt.eta.real());
      else
        fail(ErrKind::BadInput, "--mode must be complex, real+ or real-");
      emit(json_io::plan_to_json(plan), out_path);
      return 0;
    }
    if (*cmd_approx) {
      const auto pair = json_io::pair_from_json(load(ap_pair));
      const Matrix target = json_io::matrix_from_json(load(ap_target));
      synthesis::SearchBudget budget;
      budget.max_evaluations = ap_budget;
      const auto res = synthesis::approx_matrix(target, pair, ap_eps, budget);
      emit(json_io::approx_to_json(res), out_path);
      return res.achieved_error <= ap_eps ? 0 : 2;
    }
    if (*cmd_vd) {
      const auto pair = parse_field(vd_field) == FieldTag::Real
                            ? gen::build_real_pair(vd_dim)
                            : gen::build_complex_pair(vd_dim);
      synthesis::SearchBudget budget;
      budget.max_evaluations = vd_budget;
      const auto rep = harness::density_experiment(pair, vd_samples, vd_eps, budget, seed);
      emit(json_io::report_to_json(rep), out_path);
      return 0;
    }
    if (*cmd_tr) {
      const auto pair = parse_field(tr_field) == FieldTag::Real
                            ? gen::build_real_pair(tr_dim)
                            : gen::build_complex_pair(tr_dim);
      SplitMix64 rng(seed);
      const Matrix u = numkernel::random_invertible(pair.field, tr_dim, rng);
      const Matrix v = numkernel::random_matrix(pair.field, tr_dim, tr_dim, rng);
      synthesis::SearchBudget budget;
      budget.max_evaluations = tr_budget;
      const auto res = harness::transitivity_demo(pair, u, v, tr_radius, budget, seed);
      emit(json{{"word", json_io::word_to_json(res.word)},
                {"distance", res.distance},
                {"success", res.success}},
           out_path);
      return res.success ? 0 : 2;
    }
    if (*cmd_dep) {
      SplitMix64 rng(seed);
      const FieldTag field = parse_field(dep_field);
      std::vector<Matrix> x;
      for (int i = 0; i <= dep_n; ++i) x.push_back(numkernel::random_vector(field, dep_n, rng));
      const Matrix f = numkernel::random_matrix(field, dep_n, dep_n, rng);
      double worst = 0.0;
      const bool pass = harness::dependence_invariant_check(x, f, dep_trials, &worst, seed + 1);
      emit(json{{"pass", pass}, {"worst_residual_ratio", worst}}, out_path);
      return pass ? 0 : 2;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
