#pragma once

#include "lrblocks/error_fit.hpp"
#include "lrblocks/exact_oracle.hpp"
#include "lrblocks/lattice.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lrblocks::plan {

enum class Direction { forward, backward };

/// Evolution of the terms inside a site interval. On periodic chains an
/// interval with lo > hi wraps through the boundary.
struct BlockStep {
  int lo = 0;
  int hi = 0;
  Direction direction = Direction::forward;
  double duration = 0.0;
  int slice = 0;

  std::vector<int> sites(int n_sites) const;
  double signed_duration() const { return direction == Direction::forward ? duration : -duration; }
  bool operator==(const BlockStep&) const = default;
};

/// Steps are listed in application order: steps[0] acts first, so the
/// unitary is U_k ... U_1.
struct DecompositionPlan {
  int n_sites = 0;
  int ell = 0;
  int block = 0;
  int layers = 0;
  int cuts = 0;
  int time_steps = 0;
  double total_time = 0.0;
  std::vector<BlockStep> steps;
  double predicted_error = 0.0;
  std::string error_source = "analytic";
};

class InvalidPlan : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Per-cut decomposition error at block time t and overlap ell, from the
/// fitted model when present, else the analytic strictly-local bound.
struct ErrorPredictor {
  std::optional<fit::FitModel> model;
  BoundInputs inputs;
  int max_support = 2;

  static ErrorPredictor analytic(const LatticeHamiltonian& h);
  static ErrorPredictor fitted(const LatticeHamiltonian& h, const fit::FitModel& m);

  double per_cut(double t, int ell) const;
  std::string source() const { return model ? "fit" : "analytic"; }
};

/// Forward on sites [a, n-1], backward on [a, b], forward on [0, b];
/// the overlap holds ell = b - a + 1 sites.
DecompositionPlan plan_staircase_1d(const LatticeHamiltonian& h, double t, int a, int b,
                                    const ErrorPredictor* predictor = nullptr);

/// Covers [0, total_time] in steps of at most t. Cuts sit every `block`
/// sites; each cut is expanded with overlap ell on both sides.
DecompositionPlan plan_recursive_1d(const LatticeHamiltonian& h, double t, int ell, int block,
                                    const ErrorPredictor* predictor = nullptr);

/// r staircase stacks of duration t, alternating orientation; with `merged`
/// adjacent identical blocks are fused into one step of summed duration.
DecompositionPlan plan_stacks(const LatticeHamiltonian& h, double t, int a, int b, int repetitions, bool merged);
DecompositionPlan plan_merged_stacks(const LatticeHamiltonian& h, double t, int a, int b, int repetitions);

struct HyperplaneAccounting {
  int L = 0;
  int D = 0;
  int ell = 0;
  long long blocks_per_axis = 0;
  long long blocks = 0;
  int layers = 0;
  double error = 0.0;
};

HyperplaneAccounting plan_hyperplane_nd(int L, int D, int ell, double mu = 1.0);

int layers_for_coloring(int alpha);

struct StrongTermIsolation {
  double J = 1.0;
  int cut = -1;              // cut sits between sites cut-1 and cut; -1 when no strong term
  std::vector<int> support;  // strong term support
  int ell = 0;
  int ell0 = 0;
  int substeps = 1;
};

StrongTermIsolation isolate_strong_term(double J, int L, double T, double eps, double c = 1.0);
StrongTermIsolation isolate_strong_term(const LatticeHamiltonian& h, double eps, double c = 1.0);

/// Signed time per site; throws InvalidPlan when sites disagree.
double check_telescoping(const DecompositionPlan& plan, double tol = 1e-9);
void validate_plan(const DecompositionPlan& plan, const LatticeHamiltonian& h);

SectorOperator apply_plan(const DecompositionPlan& plan, oracle::BlockEvolver& evolver);
DenseUnitary apply_plan(const DecompositionPlan& plan, const LatticeHamiltonian& h);

/// ||plan - exact|| for a time-independent H, using slice 0's terms for any t.
/// `exact` may carry a precomputed exp(-i t H).
double staircase_error(oracle::BlockEvolver& evolver, double t, int a, int b, const SectorOperator* exact = nullptr);

struct Verification {
  double distance = 0.0;
  double predicted = 0.0;
  bool pass = false;
};

Verification verify_plan(const DecompositionPlan& plan, const LatticeHamiltonian& h, double slack = 1.0);

std::string to_json(const DecompositionPlan& plan);
/// Parses and checks the plan schema, including telescoping.
DecompositionPlan plan_from_json(const std::string& text, int n_sites);

}  // namespace lrblocks::plan
