#pragma once

#include "lrblocks/error_fit.hpp"
#include "lrblocks/planner.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lrblocks::resources {

struct SweepConfig {
  int n = 11;
  std::uint64_t seed = 7;
  std::vector<double> t_grid{0.5, 1.0, 2.0};
  std::vector<int> ells{2, 3, 4, 5, 6, 7};
  /// Overlap start positions; empty means every interior position
  /// 1 <= a <= n - ell - 1 (boundary cuts are exact).
  std::vector<int> positions;
};

inline constexpr int kMaxSweepSites = 11;

SweepConfig sweep_config_from_json(const std::string& text);

/// Staircase errors on the random-field Heisenberg chain, ordered by (t, ell, a).
std::vector<fit::ErrorSample> sweep(const SweepConfig& cfg);

/// Per-bond LCU statistics of a chain: bond j holds the terms anchored at site j.
struct ChainProfile {
  std::vector<double> bond_one_norm;
  std::vector<int> bond_terms;

  static ChainProfile heisenberg(const std::vector<double>& fields);
  static ChainProfile from_hamiltonian(const LatticeHamiltonian& h);

  int n_sites() const { return static_cast<int>(bond_one_norm.size()) + 1; }
  /// Largest coefficient one-norm and term count over windows of `sites` sites.
  std::pair<double, int> window(int sites) const;
  double total_one_norm() const;
  int total_terms() const;
};

struct CostModel {
  double c_o = 1.0;
  double c_g = 1.0;
  bool arbitrary_prep = true;

  double per_query(int m_block) const;
};

struct EstimateRequest {
  int n = 0;
  double T = 0.0;
  double eps = 1e-3;
  int ell = 8;
  bool merged = false;
  double split = 1.0 / 3.0;
  std::optional<fit::FitModel> model;
  CostModel cost;
  double t_max = 1.0;
};

struct ErrorBudget {
  double eps_lr_total = 0.0;
  double eps_box_total = 0.0;
  double headroom = 0.0;
};

struct ResourceReport {
  int n = 0;
  double T = 0.0;
  double eps = 0.0;
  int ell = 0;
  bool merged = false;
  double t_block = 0.0;
  long long m_blocks = 0;
  int q_per_block = 0;
  long long queries_total = 0;
  double gate_estimate = 0.0;
  double reference_full_qsp = 0.0;
  double reference_n3 = 0.0;
  std::string error_source;
  ErrorBudget error_budget;
};

ResourceReport estimate(const EstimateRequest& req, const ChainProfile& chain);

std::string to_json(const ResourceReport& r);
ResourceReport report_from_json(const std::string& text);

struct VerifyReport {
  plan::Verification result;
  std::size_t steps = 0;
  double total_time = 0.0;
};

VerifyReport verify(const std::string& plan_json, const std::string& hamiltonian_json, double slack = 1.0);
std::string to_json(const VerifyReport& r);

}  // namespace lrblocks::resources
