#include "lrblocks/resources.hpp"

#include "lrblocks/lr_bounds.hpp"
#include "lrblocks/qsp.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace lrblocks::resources {

using nlohmann::json;
using nlohmann::ordered_json;

SweepConfig sweep_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("sweep config: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("sweep config must be an object");
  const std::set<std::string> allowed{"n", "seed", "t_grid", "ells", "positions"};
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw std::invalid_argument("sweep config: unknown field '" + k + "'");
  }
  SweepConfig c;
  try {
    if (j.contains("n")) c.n = j.at("n").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("t_grid")) c.t_grid = j.at("t_grid").get<std::vector<double>>();
    if (j.contains("ells")) c.ells = j.at("ells").get<std::vector<int>>();
    if (j.contains("positions")) c.positions = j.at("positions").get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("sweep config: ") + e.what());
  }
  return c;
}

std::vector<fit::ErrorSample> sweep(const SweepConfig& cfg) {
  if (cfg.n < 2) throw std::invalid_argument("sweep needs at least 2 sites");
  if (cfg.n > kMaxSweepSites) throw DimensionError("sweep is capped at 11 sites");
  for (double t : cfg.t_grid) {
    if (t < 0.0) throw std::invalid_argument("sweep times must be nonnegative");
  }
  const auto h = build_heisenberg_1d(cfg.n, random_fields(cfg.n, cfg.seed));
  oracle::BlockEvolver ev(h);
  std::vector<fit::ErrorSample> out;
  std::vector<int> all(static_cast<std::size_t>(cfg.n));
  for (int i = 0; i < cfg.n; ++i) all[static_cast<std::size_t>(i)] = i;
  for (double t : cfg.t_grid) {
    const auto exact = ev.propagator(0, all, t);
    for (int ell : cfg.ells) {
      if (ell < 1 || ell > cfg.n) throw std::invalid_argument("sweep overlap outside [1, n]");
      std::vector<int> positions = cfg.positions;
      if (positions.empty()) {
        for (int a = 1; a + ell - 1 <= cfg.n - 2; ++a) positions.push_back(a);
      }
      for (int a : positions) {
        const int b = a + ell - 1;
        if (a < 0 || b > cfg.n - 1) continue;
        const double err = t == 0.0 ? 0.0 : plan::staircase_error(ev, t, a, b, &exact);
        out.push_back({cfg.n, t, a, ell, err});
      }
    }
  }
  return out;
}

ChainProfile ChainProfile::heisenberg(const std::vector<double>& fields) {
  const int n = static_cast<int>(fields.size());
  if (n < 2) throw std::invalid_argument("chain needs at least 2 sites");
  ChainProfile p;
  for (int j = 0; j + 1 < n; ++j) {
    double norm = 3.0 + std::abs(fields[static_cast<std::size_t>(j)]);
    int terms = 4;
    if (j == n - 2) {
      norm += std::abs(fields[static_cast<std::size_t>(n - 1)]);
      terms += 1;
    }
    p.bond_one_norm.push_back(norm);
    p.bond_terms.push_back(terms);
  }
  return p;
}

ChainProfile ChainProfile::from_hamiltonian(const LatticeHamiltonian& h) {
  const int n = h.n_sites();
  if (n < 2 || h.lattice().dimension() != 1) throw std::invalid_argument("chain profile needs a 1D chain");
  ChainProfile p;
  p.bond_one_norm.assign(static_cast<std::size_t>(n - 1), 0.0);
  p.bond_terms.assign(static_cast<std::size_t>(n - 1), 0);
  for (const auto& term : h.slices().front().terms) {
    const int anchor = std::min(term.support.front(), n - 2);
    p.bond_one_norm[static_cast<std::size_t>(anchor)] += term.op.one_norm();
    p.bond_terms[static_cast<std::size_t>(anchor)] += static_cast<int>(term.op.terms().size());
  }
  return p;
}

std::pair<double, int> ChainProfile::window(int sites) const {
  const int bonds = std::max(1, std::min(sites - 1, static_cast<int>(bond_one_norm.size())));
  double best_norm = 0.0;
  int best_terms = 0;
  for (std::size_t s = 0; s + static_cast<std::size_t>(bonds) <= bond_one_norm.size(); ++s) {
    double a = 0.0;
    int m = 0;
    for (std::size_t k = s; k < s + static_cast<std::size_t>(bonds); ++k) {
      a += bond_one_norm[k];
      m += bond_terms[k];
    }
    best_norm = std::max(best_norm, a);
    best_terms = std::max(best_terms, m);
  }
  return {best_norm, best_terms};
}

double ChainProfile::total_one_norm() const {
  double s = 0.0;
  for (double v : bond_one_norm) s += v;
  return s;
}

int ChainProfile::total_terms() const {
  int s = 0;
  for (int v : bond_terms) s += v;
  return s;
}

double CostModel::per_query(int m_block) const {
  const double prep = arbitrary_prep ? m_block : std::ceil(std::log2(std::max(2, m_block)));
  return c_o * m_block + c_g * prep;
}

ResourceReport estimate(const EstimateRequest& req, const ChainProfile& chain) {
  if (req.n < 2 || chain.n_sites() != req.n) throw std::invalid_argument("estimate: chain size does not match n");
  if (!(req.T > 0.0)) throw std::invalid_argument("estimate: T must be positive");
  if (!(req.split > 0.0 && req.split <= 0.5)) throw std::invalid_argument("estimate: budget split must lie in (0, 1/2]");

  std::function<double(double)> eps_lr;
  std::string source;
  if (req.model) {
    const auto m = *req.model;
    const int ell = req.ell;
    eps_lr = [m, ell](double t) { return m.predict(t, ell); };
    source = "fit";
  } else {
    // Strictly local bound with one-norms standing in for term norms.
    double zeta0 = 0.0;
    double hmax = 0.0;
    const auto& b = chain.bond_one_norm;
    for (std::size_t p = 0; p <= b.size(); ++p) {
      const double left = p > 0 ? b[p - 1] : 0.0;
      const double right = p < b.size() ? b[p] : 0.0;
      zeta0 = std::max(zeta0, 2.0 * (left + right));
    }
    for (double v : b) hmax = std::max(hmax, v);
    BoundInputs in;
    in.zeta0 = zeta0;
    const int ell = req.ell;
    eps_lr = [in, hmax, ell](double t) {
      bounds::BoundQuery q;
      q.inputs = in;
      q.t = t;
      q.ell = ell;
      q.support_size = 2;
      q.norm_a = hmax;
      return t * bounds::bound_strict_local(q, bounds::Variant::restriction);
    };
    source = "analytic";
  }

  fit::BudgetOptions opt;
  opt.t_max = req.t_max;
  opt.merged = req.merged;
  opt.split = req.split;
  const auto budget = fit::solve_budget(req.T, req.n, req.ell, req.eps, eps_lr, opt);

  ResourceReport r;
  r.n = req.n;
  r.T = req.T;
  r.eps = req.eps;
  r.ell = req.ell;
  r.merged = req.merged;
  r.t_block = budget.t;
  r.m_blocks = budget.m;
  r.error_source = source;
  const double eps_box = req.split * req.eps / static_cast<double>(budget.m);

  struct Kind {
    long long count;
    int sites;
    double time;
  };
  std::vector<Kind> kinds;
  if (req.merged) {
    const long long big = (budget.m + 2) / 3;
    kinds = {{budget.m - big, req.ell, budget.t}, {big, 2 * req.ell, 2.0 * budget.t}};
  } else {
    const long long big = (budget.m + 1) / 2;
    kinds = {{budget.m - big, req.ell, budget.t}, {big, 2 * req.ell, budget.t}};
  }
  for (const auto& k : kinds) {
    if (k.count == 0) continue;
    const auto [alpha, terms] = chain.window(std::min(k.sites, req.n));
    const int q = qsp::jacobi_anger(alpha * k.time, eps_box).order;
    r.q_per_block = std::max(r.q_per_block, q);
    r.queries_total += k.count * q;
    r.gate_estimate += static_cast<double>(k.count) * q * req.cost.per_query(terms);
  }

  const int q_full = qsp::jacobi_anger(chain.total_one_norm() * req.T, req.eps).order;
  r.reference_full_qsp = q_full * req.cost.per_query(chain.total_terms());
  r.reference_n3 = std::pow(static_cast<double>(req.n), 3);

  r.error_budget.eps_lr_total = static_cast<double>(budget.m) * budget.eps_lr;
  r.error_budget.eps_box_total = static_cast<double>(budget.m) * eps_box;
  r.error_budget.headroom = req.eps - r.error_budget.eps_lr_total - r.error_budget.eps_box_total;
  return r;
}

std::string to_json(const ResourceReport& r) {
  ordered_json j;
  j["n"] = r.n;
  j["T"] = r.T;
  j["eps"] = r.eps;
  j["ell"] = r.ell;
  j["merged"] = r.merged;
  j["t_block"] = r.t_block;
  j["m_blocks"] = r.m_blocks;
  j["q_per_block"] = r.q_per_block;
  j["queries_total"] = r.queries_total;
  j["gate_estimate"] = r.gate_estimate;
  j["reference_full_qsp"] = r.reference_full_qsp;
  j["reference_n3"] = r.reference_n3;
  j["error_source"] = r.error_source;
  j["error_budget"] = {{"eps_lr_total", r.error_budget.eps_lr_total},
                       {"eps_box_total", r.error_budget.eps_box_total},
                       {"headroom", r.error_budget.headroom}};
  return j.dump(2);
}

ResourceReport report_from_json(const std::string& text) {
  const auto j = json::parse(text);
  ResourceReport r;
  r.n = j.at("n").get<int>();
  r.T = j.at("T").get<double>();
  r.eps = j.at("eps").get<double>();
  r.ell = j.at("ell").get<int>();
  r.merged = j.at("merged").get<bool>();
  r.t_block = j.at("t_block").get<double>();
  r.m_blocks = j.at("m_blocks").get<long long>();
  r.q_per_block = j.at("q_per_block").get<int>();
  r.queries_total = j.at("queries_total").get<long long>();
  r.gate_estimate = j.at("gate_estimate").get<double>();
  r.reference_full_qsp = j.at("reference_full_qsp").get<double>();
  r.reference_n3 = j.at("reference_n3").get<double>();
  r.error_source = j.at("error_source").get<std::string>();
  const auto& b = j.at("error_budget");
  r.error_budget.eps_lr_total = b.at("eps_lr_total").get<double>();
  r.error_budget.eps_box_total = b.at("eps_box_total").get<double>();
  r.error_budget.headroom = b.at("headroom").get<double>();
  return r;
}

VerifyReport verify(const std::string& plan_json, const std::string& hamiltonian_json, double slack) {
  const auto h = hamiltonian_from_json(hamiltonian_json);
  const auto p = plan::plan_from_json(plan_json, h.n_sites());
  VerifyReport r;
  r.result = plan::verify_plan(p, h, slack);
  r.steps = p.steps.size();
  r.total_time = p.total_time;
  return r;
}

std::string to_json(const VerifyReport& r) {
  ordered_json j;
  j["steps"] = r.steps;
  j["total_time"] = r.total_time;
  j["distance"] = r.result.distance;
  j["predicted_error"] = r.result.predicted;
  j["pass"] = r.result.pass;
  return j.dump(2);
}

}  // namespace lrblocks::resources
