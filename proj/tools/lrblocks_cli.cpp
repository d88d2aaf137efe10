#include "lrblocks/cheb.hpp"
#include "lrblocks/error_fit.hpp"
#include "lrblocks/lattice.hpp"
#include "lrblocks/lr_bounds.hpp"
#include "lrblocks/planner.hpp"
#include "lrblocks/qsp.hpp"
#include "lrblocks/resources.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

using namespace lrblocks;
using nlohmann::ordered_json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream s;
    s << std::cin.rdbuf();
    return s.str();
  }
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void emit(const std::string& output, const std::string& text) {
  if (output.empty() || output == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(output);
  if (!out) throw std::invalid_argument("cannot write " + output);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

struct HamiltonianSource {
  std::string file;
  int n = 10;
  std::uint64_t seed = 7;
  double horizon = 1.0;

  void add_to(CLI::App* app) {
    app->add_option("--hamiltonian", file, "Hamiltonian JSON (default: random-field Heisenberg chain)");
    app->add_option("--n", n, "Chain length for the built-in Heisenberg chain");
    app->add_option("--seed", seed, "Field seed for the built-in Heisenberg chain");
    app->add_option("--horizon", horizon, "Time horizon for the built-in Heisenberg chain");
  }

  LatticeHamiltonian load() const {
    if (!file.empty()) return hamiltonian_from_json(read_file(file));
    return build_heisenberg_1d(n, random_fields(n, seed), horizon);
  }
};

// ------------------------------------------------------------------ sweep

struct SweepArgs {
  std::string config;
  std::optional<int> n;
  std::optional<std::uint64_t> seed;
  std::vector<int> ells;
  std::vector<double> t_grid;
  std::vector<int> positions;
  std::string output;
};

int run_sweep(const SweepArgs& a) {
  resources::SweepConfig cfg;
  if (!a.config.empty()) cfg = resources::sweep_config_from_json(read_file(a.config));
  if (a.n) cfg.n = *a.n;
  if (a.seed) cfg.seed = *a.seed;
  if (!a.ells.empty()) cfg.ells = a.ells;
  if (!a.t_grid.empty()) cfg.t_grid = a.t_grid;
  if (!a.positions.empty()) cfg.positions = a.positions;
  const auto samples = resources::sweep(cfg);
  std::ostringstream s;
  fit::write_csv(s, samples);
  emit(a.output, s.str());
  return 0;
}

// -------------------------------------------------------------------- fit

struct FitArgs {
  std::string input = "-";
  std::string output;
};

int run_fit(const FitArgs& a) {
  std::istringstream in(read_file(a.input));
  const auto samples = fit::read_csv(in);
  emit(a.output, fit::to_json(fit::fit(samples)));
  return 0;
}

// ------------------------------------------------------------------- plan

struct PlanArgs {
  HamiltonianSource source;
  std::string kind = "recursive";
  double t = 1.0;
  int ell = 4;
  int block = 8;
  int a = 1;
  int repetitions = 2;
  bool merged = false;
  std::string model;
  std::string output;
};

int run_plan(const PlanArgs& a) {
  const auto h = a.source.load();
  std::optional<plan::ErrorPredictor> predictor;
  if (!a.model.empty()) {
    predictor = plan::ErrorPredictor::fitted(h, fit::model_from_json(read_file(a.model)));
  } else {
    predictor = plan::ErrorPredictor::analytic(h);
  }
  plan::DecompositionPlan p;
  if (a.kind == "recursive") {
    p = plan::plan_recursive_1d(h, a.t, a.ell, a.block, &*predictor);
  } else if (a.kind == "staircase") {
    p = plan::plan_staircase_1d(h, a.t, a.a, a.a + a.ell - 1, &*predictor);
  } else if (a.kind == "stacks") {
    p = plan::plan_stacks(h, a.t, a.a, a.a + a.ell - 1, a.repetitions, a.merged);
  } else {
    throw std::invalid_argument("plan kind must be recursive, staircase or stacks");
  }
  emit(a.output, plan::to_json(p));
  return 0;
}

// ----------------------------------------------------------------- verify

struct VerifyArgs {
  std::string plan;
  std::string hamiltonian;
  double slack = 1.0;
  std::string output;
};

int run_verify(const VerifyArgs& a) {
  const auto r = resources::verify(read_file(a.plan), read_file(a.hamiltonian), a.slack);
  emit(a.output, resources::to_json(r));
  return r.result.pass ? 0 : kExitValidation;
}

// ----------------------------------------------------------------- bounds

struct BoundsArgs {
  HamiltonianSource source;
  double t = 1.0;
  int ell = 4;
  double mu = 1.0;
  double eps = 1e-3;
  std::string output;
};

int run_bounds(const BoundsArgs& a) {
  const auto h = a.source.load();
  const auto in = extract_bound_inputs(h, a.mu);
  bounds::BoundQuery q;
  q.inputs = in;
  q.t = a.t;
  q.ell = a.ell;
  ordered_json j;
  j["zeta0"] = in.zeta0;
  j["zeta"] = in.zeta;
  j["eta"] = in.eta;
  j["mu"] = in.mu;
  j["K"] = in.K;
  j["degree"] = in.degree;
  j["t"] = a.t;
  j["ell"] = a.ell;
  j["strict"] = bounds::bound_strict_local(q);
  j["commutator_aware"] = bounds::bound_commutator_aware(q);
  j["eps"] = a.eps;
  j["ell_strict"] = bounds::solve_overlap(a.eps, a.t, in, bounds::BoundKind::strict);
  j["ell_commutator_aware"] = bounds::solve_overlap(a.eps, a.t, in, bounds::BoundKind::commutator_aware);
  emit(a.output, j.dump(2));
  return 0;
}

// -------------------------------------------------------------- qsp-check

struct QspArgs {
  std::uint64_t seed = 7;
  int trials = 50;
  int qubits = 2;
  int terms = 4;
  std::vector<double> alpha_t{0.5, 1.0, 2.0};
  double eps = 1e-3;
  int points = 1001;
  std::string output;
};

int run_qsp_check(const QspArgs& a) {
  ordered_json j;
  double worst_phase = 0.0;
  double worst_standard = 0.0;
  for (int k = 0; k < a.trials; ++k) {
    const auto h = qsp::random_lcu_hamiltonian(a.qubits, a.terms, a.seed + static_cast<std::uint64_t>(k));
    const auto enc = qsp::encode_lcu(h);
    const auto w = qsp::build_qubiterate(enc);
    const auto c = qsp::check_eigenphases(enc, w);
    worst_phase = std::max({worst_phase, c.max_phase_error, c.max_invariance_leak, c.max_trace_error});
    worst_standard = std::max(worst_standard, enc.standard_form_error());
  }
  j["trials"] = a.trials;
  j["max_phase_error"] = worst_phase;
  j["max_standard_form_error"] = worst_standard;
  bool pass = worst_phase <= 1e-9 && worst_standard <= 1e-9;

  ordered_json ja = ordered_json::array();
  for (double at : a.alpha_t) {
    const auto trunc = qsp::jacobi_anger(at, a.eps);
    double sup = 0.0;
    for (int i = 0; i < a.points; ++i) {
      const double theta = -std::numbers::pi + 2.0 * std::numbers::pi * i / (a.points - 1);
      const cplx exact = std::exp(cplx(0.0, -at * std::sin(theta)));
      sup = std::max(sup, std::abs(qsp::jacobi_anger_series(trunc, theta) - exact));
    }
    pass = pass && sup <= trunc.error_bound;
    ja.push_back({{"alpha_t", at}, {"q", trunc.order}, {"bound", trunc.error_bound}, {"measured", sup}});
  }
  j["jacobi_anger"] = ja;
  j["pass"] = pass;
  emit(a.output, j.dump(2));
  return pass ? 0 : kExitValidation;
}

// ------------------------------------------------------------------- cheb

struct ChebArgs {
  std::string function = "exp";
  double rho = 2.0;
  double eps = 1e-8;
  int points = 1001;
  bool coefficients = false;
  std::string output;
};

int run_cheb(const ChebArgs& a) {
  if (!(a.rho > 1.0)) throw std::invalid_argument("rho must exceed 1");
  // Maximum modulus on the Bernstein ellipse E_rho.
  const double semi_major = 0.5 * (a.rho + 1.0 / a.rho);
  const double semi_minor = 0.5 * (a.rho - 1.0 / a.rho);
  std::function<double(double)> f;
  double bound = 0.0;
  if (a.function == "exp") {
    f = [](double x) { return std::exp(x); };
    bound = std::exp(semi_major);
  } else if (a.function == "cos") {
    f = [](double x) { return std::cos(x); };
    bound = std::cosh(semi_minor);
  } else if (a.function == "sin") {
    f = [](double x) { return std::sin(x); };
    bound = std::cosh(semi_minor);
  } else {
    throw std::invalid_argument("function must be exp, cos or sin");
  }
  const int degree = cheb::degree_for_accuracy(a.rho, bound, a.eps);
  const auto e = cheb::expand(f, a.rho, bound, degree);
  double sup = 0.0;
  for (int i = 0; i < a.points; ++i) {
    const double x = -1.0 + 2.0 * i / (a.points - 1);
    sup = std::max(sup, std::abs(cheb::evaluate(e, x) - f(x)));
  }
  const double rhs = cheb::truncation_bound(a.rho, bound, degree);
  ordered_json j;
  j["function"] = a.function;
  j["rho"] = a.rho;
  j["bound"] = bound;
  j["eps"] = a.eps;
  j["degree"] = degree;
  j["error_bound"] = rhs;
  j["measured"] = sup;
  j["warnings"] = e.warnings;
  if (a.coefficients) j["coefficients"] = e.coeffs;
  j["pass"] = sup <= rhs;
  emit(a.output, j.dump(2));
  return sup <= rhs ? 0 : kExitValidation;
}

// --------------------------------------------------------------- estimate

struct EstimateArgs {
  std::string hamiltonian;
  int n = 50;
  std::optional<double> T;
  double eps = 1e-3;
  int ell = 8;
  bool merged = false;
  double split = 1.0 / 3.0;
  double t_max = 1.0;
  std::uint64_t seed = 7;
  std::string model;
  double c_o = 1.0;
  double c_g = 1.0;
  std::string prep = "arbitrary";
  std::string output;
};

int run_estimate(const EstimateArgs& a) {
  resources::ChainProfile chain;
  int n = a.n;
  if (!a.hamiltonian.empty()) {
    const auto h = hamiltonian_from_json(read_file(a.hamiltonian));
    chain = resources::ChainProfile::from_hamiltonian(h);
    n = h.n_sites();
  } else {
    chain = resources::ChainProfile::heisenberg(random_fields(n, a.seed));
  }
  resources::EstimateRequest req;
  req.n = n;
  req.T = a.T.value_or(static_cast<double>(n));
  req.eps = a.eps;
  req.ell = a.ell;
  req.merged = a.merged;
  req.split = a.split;
  req.t_max = a.t_max;
  req.cost.c_o = a.c_o;
  req.cost.c_g = a.c_g;
  if (a.prep == "arbitrary") req.cost.arbitrary_prep = true;
  else if (a.prep == "log") req.cost.arbitrary_prep = false;
  else throw std::invalid_argument("prep must be arbitrary or log");
  if (!a.model.empty()) req.model = fit::model_from_json(read_file(a.model));
  emit(a.output, resources::to_json(resources::estimate(req, chain)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lieb-Robinson block decomposition planner and resource estimator"};
  app.require_subcommand(1);

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Staircase error sweep on a random-field Heisenberg chain (CSV)");
  sweep->add_option("--config", sweep_args.config, "Sweep config JSON");
  sweep->add_option("--n", sweep_args.n, "Chain length (at most 11)");
  sweep->add_option("--seed", sweep_args.seed, "Field seed");
  sweep->add_option("--ell", sweep_args.ells, "Overlap sizes")->delimiter(',');
  sweep->add_option("--t-grid", sweep_args.t_grid, "Block times")->delimiter(',');
  sweep->add_option("--positions", sweep_args.positions, "Overlap start sites")->delimiter(',');
  sweep->add_option("--output", sweep_args.output, "Output file (default stdout)");

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the error model to a sweep CSV");
  fit_cmd->add_option("--input", fit_args.input, "Sweep CSV ('-' for stdin)");
  fit_cmd->add_option("--output", fit_args.output, "Output file (default stdout)");

  PlanArgs plan_args;
  auto* plan_cmd = app.add_subcommand("plan", "Build a block decomposition plan (JSON)");
  plan_args.source.add_to(plan_cmd);
  plan_cmd->add_option("--kind", plan_args.kind, "recursive, staircase or stacks");
  plan_cmd->add_option("--t", plan_args.t, "Block time");
  plan_cmd->add_option("--ell", plan_args.ell, "Overlap size");
  plan_cmd->add_option("--block", plan_args.block, "Sites between cuts (recursive)");
  plan_cmd->add_option("--a", plan_args.a, "First overlap site (staircase, stacks)");
  plan_cmd->add_option("--repetitions", plan_args.repetitions, "Stack count (stacks)");
  plan_cmd->add_flag("--merged", plan_args.merged, "Merge adjacent identical blocks (stacks)");
  plan_cmd->add_option("--fit", plan_args.model, "Fitted model JSON for predicted_error");
  plan_cmd->add_option("--output", plan_args.output, "Output file (default stdout)");

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "Apply a plan and compare with exact evolution");
  verify->add_option("--plan", verify_args.plan, "Plan JSON")->required();
  verify->add_option("--hamiltonian", verify_args.hamiltonian, "Hamiltonian JSON")->required();
  verify->add_option("--slack", verify_args.slack, "Multiplier on predicted_error");
  verify->add_option("--output", verify_args.output, "Output file (default stdout)");

  BoundsArgs bounds_args;
  auto* bounds_cmd = app.add_subcommand("bounds", "Lieb-Robinson bound inputs, values and overlap sizes");
  bounds_args.source.add_to(bounds_cmd);
  bounds_cmd->add_option("--t", bounds_args.t, "Evolution time");
  bounds_cmd->add_option("--ell", bounds_args.ell, "Distance");
  bounds_cmd->add_option("--mu", bounds_args.mu, "Decay rate");
  bounds_cmd->add_option("--eps", bounds_args.eps, "Target error for the overlap solve");
  bounds_cmd->add_option("--output", bounds_args.output, "Output file (default stdout)");

  QspArgs qsp_args;
  auto* qsp_cmd = app.add_subcommand("qsp-check", "Qubiterate eigenphases and Jacobi-Anger truncation");
  qsp_cmd->add_option("--seed", qsp_args.seed, "Seed of the first random Hamiltonian");
  qsp_cmd->add_option("--trials", qsp_args.trials, "Random LCU Hamiltonians");
  qsp_cmd->add_option("--qubits", qsp_args.qubits, "System qubits");
  qsp_cmd->add_option("--terms", qsp_args.terms, "Pauli terms per Hamiltonian");
  qsp_cmd->add_option("--alpha-t", qsp_args.alpha_t, "alpha * t values")->delimiter(',');
  qsp_cmd->add_option("--eps", qsp_args.eps, "Truncation target");
  qsp_cmd->add_option("--output", qsp_args.output, "Output file (default stdout)");

  ChebArgs cheb_args;
  auto* cheb_cmd = app.add_subcommand("cheb", "Chebyshev expansion with the analytic error bound");
  cheb_cmd->add_option("--function", cheb_args.function, "exp, cos or sin");
  cheb_cmd->add_option("--rho", cheb_args.rho, "Bernstein ellipse parameter");
  cheb_cmd->add_option("--eps", cheb_args.eps, "Target accuracy");
  cheb_cmd->add_flag("--coefficients", cheb_args.coefficients, "Include the coefficients");
  cheb_cmd->add_option("--output", cheb_args.output, "Output file (default stdout)");

  EstimateArgs est_args;
  auto* est = app.add_subcommand("estimate", "Gate-count estimate for block simulation (JSON)");
  est->add_option("--hamiltonian", est_args.hamiltonian, "1D Hamiltonian JSON (default: Heisenberg chain)");
  est->add_option("--n", est_args.n, "Chain length");
  est->add_option("--T", est_args.T, "Total time (default n)");
  est->add_option("--eps", est_args.eps, "Total error");
  est->add_option("--ell", est_args.ell, "Overlap size");
  est->add_flag("--merged", est_args.merged, "Merged stacks");
  est->add_option("--budget-split", est_args.split, "Fraction of eps for each of the LR and QSP budgets");
  est->add_option("--t-max", est_args.t_max, "Largest block time");
  est->add_option("--seed", est_args.seed, "Field seed");
  est->add_option("--fit", est_args.model, "Fitted model JSON (default: analytic bound)");
  est->add_option("--c-o", est_args.c_o, "Cost per select term");
  est->add_option("--c-g", est_args.c_g, "Cost per prepare unit");
  est->add_option("--prep", est_args.prep, "arbitrary or log");
  est->add_option("--output", est_args.output, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*sweep) return run_sweep(sweep_args);
    if (*fit_cmd) return run_fit(fit_args);
    if (*plan_cmd) return run_plan(plan_args);
    if (*verify) return run_verify(verify_args);
    if (*bounds_cmd) return run_bounds(bounds_args);
    if (*qsp_cmd) return run_qsp_check(qsp_args);
    if (*cheb_cmd) return run_cheb(cheb_args);
    if (*est) return run_estimate(est_args);
  } catch (const fit::InfeasibleBudget& e) {
    std::cerr << "infeasible budget: " << e.what() << " (limit " << e.limiting_value << ")\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}
