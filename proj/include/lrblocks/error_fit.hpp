#pragma once

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrblocks::fit {

struct ErrorSample {
  int n = 0;
  double t = 0.0;
  int a = 0;
  int ell = 0;
  double error = 0.0;
};

/// eps(t, l) = ampl * (t vel / (l + offset))^(l + offset)
struct FitModel {
  double ampl = 1.0;
  double vel = 1.0;
  double offset = 0.0;

  double predict(double t, double ell) const;
};

struct FitReport {
  FitModel model;
  double r2_log = 0.0;
  double residual = 0.0;  // sum of squared log residuals
  std::size_t used = 0;
  std::size_t excluded_zero = 0;
  int iterations = 0;
};

class DegenerateDataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Log-space least squares by simplex descent from a fixed start grid.
FitReport fit(const std::vector<ErrorSample>& samples);
double r2_log(const FitModel& m, const std::vector<ErrorSample>& samples);

class InfeasibleBudget : public std::runtime_error {
 public:
  InfeasibleBudget(const std::string& what, double limit) : std::runtime_error(what), limiting_value(limit) {}
  double limiting_value;
};

struct BudgetOptions {
  double t_max = 1.0;
  bool merged = false;
  /// Fraction of eps granted to the decomposition error (1/3 by default).
  double split = 1.0 / 3.0;
  double rel_tol = 1e-4;
};

struct Budget {
  double t = 0.0;
  long long m = 0;
  double m_continuous = 0.0;
  double eps_lr = 0.0;      // per-cut decomposition error at t
  bool capped = false;      // t hit t_max with slack left
};

/// Blocks needed for total time T on n sites at block time t and overlap l.
double block_count(double T, int n, double t, int ell, bool merged);

/// Solves eps_lr(t) = split * eps / m(t) by bisection on (0, t_max].
Budget solve_budget(double T, int n, int ell, double eps, const std::function<double(double)>& eps_lr,
                    const BudgetOptions& opt = {});
Budget solve_budget(double T, int n, int ell, double eps, const FitModel& model, const BudgetOptions& opt = {});

void write_csv(std::ostream& out, const std::vector<ErrorSample>& samples);
std::vector<ErrorSample> read_csv(std::istream& in);

std::string to_json(const FitReport& r);
FitModel model_from_json(const std::string& text);

}  // namespace lrblocks::fit
