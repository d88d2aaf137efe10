#include "lrblocks/error_fit.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace lrblocks::fit {

double FitModel::predict(double t, double ell) const {
  const double p = ell + offset;
  if (p <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (t == 0.0) return 0.0;
  return ampl * std::exp(p * (std::log(std::abs(t) * vel) - std::log(p)));
}

namespace {

struct Data {
  std::vector<double> t;
  std::vector<double> ell;
  std::vector<double> log_err;
  double min_ell = 0.0;
};

// x = (log ampl, log vel, offset)
double objective(const gsl_vector* x, void* params) {
  const auto* d = static_cast<const Data*>(params);
  const double la = gsl_vector_get(x, 0);
  const double lv = gsl_vector_get(x, 1);
  const double g = gsl_vector_get(x, 2);
  if (d->min_ell + g <= 1e-9) return 1e300;
  double ss = 0.0;
  for (std::size_t i = 0; i < d->t.size(); ++i) {
    const double p = d->ell[i] + g;
    const double model = la + p * (std::log(d->t[i]) + lv - std::log(p));
    const double r = model - d->log_err[i];
    ss += r * r;
  }
  return std::isfinite(ss) ? ss : 1e300;
}

}  // namespace

double r2_log(const FitModel& m, const std::vector<ErrorSample>& samples) {
  double mean = 0.0;
  std::size_t k = 0;
  for (const auto& s : samples) {
    if (s.error > 0.0 && s.t > 0.0) {
      mean += std::log(s.error);
      ++k;
    }
  }
  if (k == 0) return 0.0;
  mean /= static_cast<double>(k);
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (const auto& s : samples) {
    if (!(s.error > 0.0 && s.t > 0.0)) continue;
    const double y = std::log(s.error);
    const double r = std::log(m.predict(s.t, s.ell)) - y;
    ss_res += r * r;
    ss_tot += (y - mean) * (y - mean);
  }
  return ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
}

FitReport fit(const std::vector<ErrorSample>& samples) {
  Data d;
  FitReport report;
  std::set<int> ells;
  for (const auto& s : samples) {
    if (!(s.error > 0.0) || !(s.t > 0.0)) {
      ++report.excluded_zero;
      continue;
    }
    d.t.push_back(s.t);
    d.ell.push_back(s.ell);
    d.log_err.push_back(std::log(s.error));
    ells.insert(s.ell);
  }
  report.used = d.t.size();
  if (ells.size() < 3) throw DegenerateDataError("fit needs at least 3 distinct ell values with positive error");
  if (d.t.size() < 6) throw DegenerateDataError("fit needs at least 6 samples with positive error");
  d.min_ell = *ells.begin();

  gsl_set_error_handler_off();
  gsl_multimin_function fn{&objective, 3, &d};
  const gsl_multimin_fminimizer_type* type = gsl_multimin_fminimizer_nmsimplex2;
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(type, 3);
  gsl_vector* x = gsl_vector_alloc(3);
  gsl_vector* step = gsl_vector_alloc(3);

  double best = std::numeric_limits<double>::infinity();
  double best_x[3] = {0.0, 0.0, 0.0};
  for (double a0 : {0.1, 1.0, 10.0}) {
    for (double v0 : {0.5, 1.0, 2.0, 4.0}) {
      for (double g0 : {0.0, 1.0, 2.0}) {
        if (d.min_ell + g0 <= 1e-9) continue;
        gsl_vector_set(x, 0, std::log(a0));
        gsl_vector_set(x, 1, std::log(v0));
        gsl_vector_set(x, 2, g0);
        gsl_vector_set_all(step, 0.5);
        gsl_multimin_fminimizer_set(s, &fn, x, step);
        int iter = 0;
        int status = GSL_CONTINUE;
        while (status == GSL_CONTINUE && iter < 10000) {
          ++iter;
          if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
          status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-12);
        }
        report.iterations += iter;
        if (s->fval < best) {
          best = s->fval;
          for (std::size_t i = 0; i < 3; ++i) best_x[i] = gsl_vector_get(s->x, i);
        }
      }
    }
  }
  gsl_vector_free(step);
  gsl_vector_free(x);
  gsl_multimin_fminimizer_free(s);

  report.model = FitModel{std::exp(best_x[0]), std::exp(best_x[1]), best_x[2]};
  report.residual = best;
  report.r2_log = r2_log(report.model, samples);
  return report;
}

double block_count(double T, int n, double t, int ell, bool merged) {
  if (!(t > 0.0) || ell <= 0) throw std::invalid_argument("block_count needs t > 0 and ell > 0");
  return merged ? 3.0 * T * n / (2.0 * t * ell) : 2.0 * T * n / (t * ell);
}

Budget solve_budget(double T, int n, int ell, double eps, const std::function<double(double)>& eps_lr,
                    const BudgetOptions& opt) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
  if (!(opt.t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
  if (!(opt.split > 0.0 && opt.split < 1.0)) throw std::invalid_argument("budget split must lie in (0, 1)");
  // g(t) = eps_lr(t) m(t) / (split eps); the solution is g = 1.
  auto g = [&](double t) { return eps_lr(t) * block_count(T, n, t, ell, opt.merged) / (opt.split * eps); };

  Budget b;
  if (g(opt.t_max) <= 1.0) {
    b.t = opt.t_max;
    b.capped = true;
  } else {
    double lo = opt.t_max;
    double g_lo = g(lo);
    for (int k = 0; k < 200 && g_lo > 1.0; ++k) {
      lo *= 0.5;
      g_lo = g(lo);
    }
    if (g_lo > 1.0) {
      throw InfeasibleBudget("no block time meets the budget; eps_lr * m does not vanish as t -> 0", g_lo);
    }
    double hi = lo * 2.0;
    if (hi > opt.t_max) hi = opt.t_max;
    for (int k = 0; k < 200; ++k) {
      const double mid = 0.5 * (lo + hi);
      const double gm = g(mid);
      if (std::abs(gm - 1.0) <= 0.5 * opt.rel_tol) {
        lo = hi = mid;
        break;
      }
      if (gm > 1.0) hi = mid;
      else lo = mid;
      if (hi - lo <= 1e-15 * hi) break;
    }
    b.t = lo;
  }
  b.m_continuous = block_count(T, n, b.t, ell, opt.merged);
  b.m = static_cast<long long>(std::ceil(b.m_continuous - 1e-9));
  b.eps_lr = eps_lr(b.t);
  return b;
}

Budget solve_budget(double T, int n, int ell, double eps, const FitModel& model, const BudgetOptions& opt) {
  if (!(ell + model.offset > 0.0)) throw std::invalid_argument("model is not valid at this ell");
  return solve_budget(T, n, ell, eps, [&](double t) { return model.predict(t, ell); }, opt);
}

void write_csv(std::ostream& out, const std::vector<ErrorSample>& samples) {
  out << "n,t,a,ell,error\n";
  for (const auto& s : samples) {
    std::ostringstream row;
    row << std::setprecision(17) << s.n << ',' << s.t << ',' << s.a << ',' << s.ell << ',' << s.error;
    out << row.str() << '\n';
  }
}

std::vector<ErrorSample> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "n,t,a,ell,error") throw std::invalid_argument("CSV header must be n,t,a,ell,error");
  std::vector<ErrorSample> out;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    ErrorSample s;
    char c1 = 0, c2 = 0, c3 = 0, c4 = 0;
    if (!(ss >> s.n >> c1 >> s.t >> c2 >> s.a >> c3 >> s.ell >> c4 >> s.error) || c1 != ',' || c2 != ',' ||
        c3 != ',' || c4 != ',') {
      throw std::invalid_argument("CSV row " + std::to_string(row) + " is malformed");
    }
    if (s.error < 0.0 || s.error > 2.0) {
      throw std::invalid_argument("CSV row " + std::to_string(row) + ": error outside [0, 2]");
    }
    out.push_back(s);
  }
  return out;
}

std::string to_json(const FitReport& r) {
  nlohmann::ordered_json j;
  j["ampl"] = r.model.ampl;
  j["vel"] = r.model.vel;
  j["offset"] = r.model.offset;
  j["r2_log"] = r.r2_log;
  return j.dump(2);
}

FitModel model_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  FitModel m;
  m.ampl = j.at("ampl").get<double>();
  m.vel = j.at("vel").get<double>();
  m.offset = j.at("offset").get<double>();
  if (!(m.ampl > 0.0) || !(m.vel > 0.0)) throw std::invalid_argument("fit model needs positive ampl and vel");
  return m;
}

}  // namespace lrblocks::fit
