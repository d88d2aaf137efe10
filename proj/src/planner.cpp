#include "lrblocks/planner.hpp"

#include "lrblocks/lr_bounds.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace lrblocks::plan {

namespace {

constexpr double kTol = 1e-12;

bool periodic(const LatticeHamiltonian& h) { return h.lattice().boundary() == Boundary::periodic; }

void require_chain(const LatticeHamiltonian& h) {
  if (h.lattice().dimension() != 1) throw InvalidPlan("1D planning needs a chain lattice");
}

struct TimeStep {
  double duration;
  int slice;
};

// Splits every slice into equal pieces no longer than t.
std::vector<TimeStep> time_steps(const LatticeHamiltonian& h, double t) {
  std::vector<TimeStep> out;
  for (std::size_t i = 0; i < h.slices().size(); ++i) {
    const double len = h.slices()[i].t_end - h.slices()[i].t_start;
    if (len <= kTol) continue;
    const int k = std::max(1, static_cast<int>(std::ceil(len / t - 1e-9)));
    for (int j = 0; j < k; ++j) out.push_back({len / k, static_cast<int>(i)});
  }
  return out;
}

int slice_for(const LatticeHamiltonian& h, double t_mid) {
  for (std::size_t i = 0; i < h.slices().size(); ++i) {
    if (t_mid <= h.slices()[i].t_end + kTol) return static_cast<int>(i);
  }
  return static_cast<int>(h.slices().size()) - 1;
}

bool same_terms(const TimeSlice& x, const TimeSlice& y) {
  if (x.terms.size() != y.terms.size()) return false;
  for (std::size_t k = 0; k < x.terms.size(); ++k) {
    const auto& a = x.terms[k];
    const auto& b = y.terms[k];
    if (a.profile || b.profile || a.support != b.support) return false;
    const auto& ta = a.op.terms();
    const auto& tb = b.op.terms();
    if (ta.size() != tb.size()) return false;
    for (std::size_t j = 0; j < ta.size(); ++j) {
      if (ta[j].coeff != tb[j].coeff || !(ta[j].string == tb[j].string)) return false;
    }
  }
  return true;
}

// Length of the run of consecutive slices starting at s that carry the same terms.
double constant_run(const LatticeHamiltonian& h, int s) {
  const auto& sl = h.slices();
  double len = sl[static_cast<std::size_t>(s)].t_end - sl[static_cast<std::size_t>(s)].t_start;
  for (std::size_t k = static_cast<std::size_t>(s) + 1; k < sl.size(); ++k) {
    if (!same_terms(sl[static_cast<std::size_t>(s)], sl[k])) break;
    len += sl[k].t_end - sl[k].t_start;
  }
  return len;
}

BlockStep fwd(int lo, int hi, double d, int slice) { return {lo, hi, Direction::forward, d, slice}; }
BlockStep bwd(int lo, int hi, double d, int slice) { return {lo, hi, Direction::backward, d, slice}; }

}  // namespace

std::vector<int> BlockStep::sites(int n_sites) const {
  std::vector<int> out;
  if (lo <= hi) {
    for (int s = lo; s <= hi; ++s) out.push_back(s);
  } else {
    for (int s = 0; s <= hi; ++s) out.push_back(s);
    for (int s = lo; s < n_sites; ++s) out.push_back(s);
  }
  return out;
}

ErrorPredictor ErrorPredictor::analytic(const LatticeHamiltonian& h) {
  ErrorPredictor p;
  p.inputs = extract_bound_inputs(h, 1.0);
  p.max_support = 1;
  for (const auto* term : h.all_terms()) p.max_support = std::max(p.max_support, static_cast<int>(term->support.size()));
  return p;
}

ErrorPredictor ErrorPredictor::fitted(const LatticeHamiltonian& h, const fit::FitModel& m) {
  ErrorPredictor p = analytic(h);
  p.model = m;
  return p;
}

double ErrorPredictor::per_cut(double t, int ell) const {
  if (model) return model->predict(t, ell);
  bounds::BoundQuery q;
  q.inputs = inputs;
  q.t = t;
  q.ell = ell;
  q.support_size = max_support;
  q.norm_a = inputs.max_term_norm;
  return std::abs(t) * bounds::bound_strict_local(q, bounds::Variant::restriction);
}

DecompositionPlan plan_staircase_1d(const LatticeHamiltonian& h, double t, int a, int b,
                                    const ErrorPredictor* predictor) {
  require_chain(h);
  const int n = h.n_sites();
  if (!(a >= 0 && a < b && b <= n)) throw InvalidPlan("staircase cut needs 0 <= a < b <= n");
  if (!(t > 0.0 && t <= 1.0 + kTol)) throw InvalidPlan("staircase block time must lie in (0, 1]");
  const int hi = std::min(b, n - 1);
  const int slice = slice_for(h, 0.5 * t);
  DecompositionPlan p;
  p.n_sites = n;
  p.ell = b - a + 1;
  p.block = n;
  p.layers = 3;
  p.cuts = 1;
  p.time_steps = 1;
  p.total_time = t;
  p.steps = {fwd(a, n - 1, t, slice), bwd(a, hi, t, slice), fwd(0, hi, t, slice)};
  const bool whole = a == 0 && hi == n - 1;
  if (whole) p.cuts = 0;
  if (predictor != nullptr) {
    p.predicted_error = whole ? 0.0 : predictor->per_cut(t, p.ell);
    p.error_source = predictor->source();
  }
  return p;
}

DecompositionPlan plan_recursive_1d(const LatticeHamiltonian& h, double t, int ell, int block,
                                    const ErrorPredictor* predictor) {
  require_chain(h);
  const int n = h.n_sites();
  if (ell < 2) throw InvalidPlan("overlap must be at least 2");
  if (block < 2 * ell) throw InvalidPlan("block must be at least 2 * ell");
  if (!(t > 0.0 && t <= 1.0 + kTol)) throw InvalidPlan("block time must lie in (0, 1]");

  DecompositionPlan p;
  p.n_sites = n;
  p.ell = ell;
  p.block = block;
  p.total_time = h.total_time();
  const auto steps = time_steps(h, t);
  p.time_steps = static_cast<int>(steps.size());

  std::vector<int> cuts;
  const bool ring = periodic(h);
  const int s = (n + block - 1) / block;
  if (s > 1) {
    for (int k = 1; k < s; ++k) cuts.push_back(k * block);
    if (ring) {
      cuts.insert(cuts.begin(), 0);
      // Every segment on a ring is interior.
      const int last = n - cuts.back();
      if (last < 2 * ell) throw InvalidPlan("ring too short for this block and overlap");
    } else {
      const int last = n - cuts.back();
      if (last < ell) {
        for (int& c : cuts) c -= ell - last;
      }
      if (cuts.front() < ell) throw InvalidPlan("chain too short for this block and overlap");
      for (std::size_t k = 1; k < cuts.size(); ++k) {
        if (cuts[k] - cuts[k - 1] < 2 * ell) throw InvalidPlan("interior segment shorter than 2 * ell");
      }
    }
  }
  p.cuts = static_cast<int>(cuts.size());
  p.layers = cuts.empty() ? 1 : 3;

  auto wrap = [n](int s) { return ((s % n) + n) % n; };
  for (const auto& ts : steps) {
    if (cuts.empty()) {
      p.steps.push_back(fwd(0, n - 1, ts.duration, ts.slice));
      continue;
    }
    for (int c : cuts) p.steps.push_back(fwd(wrap(c - ell), wrap(c + ell - 1), ts.duration, ts.slice));
    for (int c : cuts) {
      p.steps.push_back(bwd(wrap(c - ell), wrap(c - 1), ts.duration, ts.slice));
      p.steps.push_back(bwd(c, c + ell - 1, ts.duration, ts.slice));
    }
    if (ring) {
      for (std::size_t k = 0; k < cuts.size(); ++k) {
        const int next = k + 1 < cuts.size() ? cuts[k + 1] : n;
        p.steps.push_back(fwd(cuts[k], next - 1, ts.duration, ts.slice));
      }
    } else {
      int lo = 0;
      for (int c : cuts) {
        p.steps.push_back(fwd(lo, c - 1, ts.duration, ts.slice));
        lo = c;
      }
      p.steps.push_back(fwd(lo, n - 1, ts.duration, ts.slice));
    }
  }

  if (predictor != nullptr) {
    double total = 0.0;
    // Each cut is two nested applications of the three-block identity.
    for (const auto& ts : steps) total += 2.0 * p.cuts * (p.cuts > 0 ? predictor->per_cut(ts.duration, ell) : 0.0);
    p.predicted_error = total;
    p.error_source = predictor->source();
  }
  return p;
}

DecompositionPlan plan_stacks(const LatticeHamiltonian& h, double t, int a, int b, int repetitions, bool merged) {
  if (repetitions < 1) throw InvalidPlan("repetitions must be positive");
  if (repetitions * t > h.total_time() + kTol) throw InvalidPlan("stacks run past the Hamiltonian's horizon");
  DecompositionPlan p = plan_staircase_1d(h, t, a, b);
  if (repetitions == 1) return p;
  const auto base = p.steps;
  p.steps.clear();
  for (int r = 0; r < repetitions; ++r) {
    const int slice = slice_for(h, (r + 0.5) * t);
    std::vector<BlockStep> stack = base;
    // Orientation alternates so equal blocks meet at every seam.
    if (r % 2 == 0) std::reverse(stack.begin(), stack.end());
    for (auto& s : stack) {
      s.slice = slice;
      if (merged && !p.steps.empty()) {
        auto& prev = p.steps.back();
        const bool same_slice =
            prev.slice == s.slice ||
            same_terms(h.slices()[static_cast<std::size_t>(prev.slice)], h.slices()[static_cast<std::size_t>(s.slice)]);
        if (prev.lo == s.lo && prev.hi == s.hi && prev.direction == s.direction && same_slice) {
          prev.duration += s.duration;
          continue;
        }
      }
      p.steps.push_back(s);
    }
  }
  p.time_steps = repetitions;
  p.total_time = repetitions * t;
  return p;
}

DecompositionPlan plan_merged_stacks(const LatticeHamiltonian& h, double t, int a, int b, int repetitions) {
  return plan_stacks(h, t, a, b, repetitions, true);
}

HyperplaneAccounting plan_hyperplane_nd(int L, int D, int ell, double mu) {
  if (D < 1 || D > 3) throw std::invalid_argument("D must be 1, 2 or 3");
  if (ell < 1 || ell > L) throw std::invalid_argument("ell must lie in [1, L]");
  HyperplaneAccounting r;
  r.L = L;
  r.D = D;
  r.ell = ell;
  const long long s = (L + 2LL * ell - 1) / (2LL * ell);
  if (s <= 1) {
    r.blocks_per_axis = 1;
    r.blocks = 1;
    r.layers = 1;
    r.error = 0.0;
    return r;
  }
  // Per axis: three steps per cut plus one per segment.
  r.blocks_per_axis = 4 * s - 3;
  r.blocks = 1;
  r.layers = 1;
  for (int d = 0; d < D; ++d) {
    r.blocks *= r.blocks_per_axis;
    r.layers *= 3;
  }
  r.error = std::exp(-mu * ell) * D * std::pow(static_cast<double>(L), D) / ell;
  return r;
}

int layers_for_coloring(int alpha) {
  if (alpha < 2) throw std::invalid_argument("colorability must be at least 2");
  return 2 * alpha - 1;
}

StrongTermIsolation isolate_strong_term(double J, int L, double T, double eps, double c) {
  if (!(J >= 1.0)) throw std::invalid_argument("J must be at least 1");
  if (!(eps > 0.0) || !(T > 0.0) || L <= 0) throw std::invalid_argument("need eps, T, L positive");
  StrongTermIsolation r;
  r.J = J;
  r.ell = static_cast<int>(std::ceil(c * std::log(L * T / eps)));
  r.ell0 = static_cast<int>(std::ceil(c * std::log(J * L * T / eps)));
  r.substeps = static_cast<int>(std::ceil(J - 1e-12));
  return r;
}

StrongTermIsolation isolate_strong_term(const LatticeHamiltonian& h, double eps, double c) {
  require_chain(h);
  const auto report = validate(h);
  std::set<std::vector<int>> supports;
  double J = 1.0;
  std::vector<int> support;
  for (const auto& st : report.strong_terms) {
    const auto& term = h.slices()[st.slice].terms[st.term];
    supports.insert(term.support);
    if (st.norm > J) J = st.norm;
    support = term.support;
  }
  if (supports.size() > 1) throw std::invalid_argument("more than one strong term; isolation handles exactly one");
  auto r = isolate_strong_term(J, h.n_sites(), h.total_time(), eps, c);
  if (!support.empty()) {
    r.support = support;
    r.cut = support.front() + (support.size() > 1 ? 1 : 0);
  }
  return r;
}

double check_telescoping(const DecompositionPlan& plan, double tol) {
  const int n = plan.n_sites;
  std::vector<double> net(static_cast<std::size_t>(n), 0.0);
  for (const auto& s : plan.steps) {
    for (int site : s.sites(n)) net[static_cast<std::size_t>(site)] += s.signed_duration();
  }
  if (n == 0) return 0.0;
  for (int i = 1; i < n; ++i) {
    if (std::abs(net[static_cast<std::size_t>(i)] - net[0]) > tol) {
      std::ostringstream m;
      m << "telescoping violated: site " << i << " evolves for " << net[static_cast<std::size_t>(i)]
        << ", site 0 for " << net[0];
      throw InvalidPlan(m.str());
    }
  }
  return net[0];
}

void validate_plan(const DecompositionPlan& plan, const LatticeHamiltonian& h) {
  const int n = h.n_sites();
  if (plan.n_sites != n) throw InvalidPlan("plan and Hamiltonian disagree on the number of sites");
  for (const auto& s : plan.steps) {
    if (s.lo < 0 || s.hi < 0 || s.lo >= n || s.hi >= n) throw InvalidPlan("step support outside the lattice");
    if (s.lo > s.hi && !periodic(h)) throw InvalidPlan("wrapped support on an open chain");
    if (!(s.duration > 0.0)) throw InvalidPlan("step duration must be positive");
    if (s.slice < 0 || s.slice >= static_cast<int>(h.slices().size())) throw InvalidPlan("step slice out of range");
    if (s.duration > constant_run(h, s.slice) + 1e-9) throw InvalidPlan("step duration exceeds its slice");
  }
  const double net = check_telescoping(plan);
  if (std::abs(net - plan.total_time) > 1e-9) throw InvalidPlan("net evolution time differs from the plan total");
}

SectorOperator apply_plan(const DecompositionPlan& plan, oracle::BlockEvolver& evolver) {
  SectorOperator u = evolver.identity();
  for (const auto& s : plan.steps) {
    u = evolver.propagator(static_cast<std::size_t>(s.slice), s.sites(plan.n_sites), s.signed_duration()) * u;
  }
  return u;
}

DenseUnitary apply_plan(const DecompositionPlan& plan, const LatticeHamiltonian& h) {
  oracle::BlockEvolver ev(h);
  return DenseUnitary(apply_plan(plan, ev).to_dense());
}

double staircase_error(oracle::BlockEvolver& evolver, double t, int a, int b, const SectorOperator* exact) {
  const int n = evolver.hamiltonian().n_sites();
  if (!(a >= 0 && a < b && b <= n)) throw InvalidPlan("staircase cut needs 0 <= a < b <= n");
  const int hi = std::min(b, n - 1);
  std::vector<int> right;
  std::vector<int> overlap;
  std::vector<int> left;
  for (int i = a; i < n; ++i) right.push_back(i);
  for (int i = a; i <= hi; ++i) overlap.push_back(i);
  for (int i = 0; i <= hi; ++i) left.push_back(i);
  const auto r = evolver.propagator(0, right, t);
  const auto y = evolver.propagator(0, overlap, -t);
  const auto l = evolver.propagator(0, left, t);
  std::optional<SectorOperator> own;
  if (exact == nullptr) {
    std::vector<int> all(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
    own = evolver.propagator(0, all, t);
    exact = &*own;
  }
  return product_distance({&r, &y, &l}, *exact);
}

Verification verify_plan(const DecompositionPlan& plan, const LatticeHamiltonian& h, double slack) {
  validate_plan(plan, h);
  oracle::BlockEvolver ev(h);
  std::vector<SectorOperator> factors;
  factors.reserve(plan.steps.size());
  for (const auto& s : plan.steps) {
    factors.push_back(ev.propagator(static_cast<std::size_t>(s.slice), s.sites(plan.n_sites), s.signed_duration()));
  }
  std::vector<const SectorOperator*> ptrs;
  for (const auto& f : factors) ptrs.push_back(&f);
  const auto exact = ev.evolve(0.0, plan.total_time);
  Verification v;
  v.distance = product_distance(ptrs, exact);
  v.predicted = plan.predicted_error;
  v.pass = v.distance <= slack * v.predicted + 1e-9;
  return v;
}

std::string to_json(const DecompositionPlan& plan) {
  nlohmann::ordered_json j;
  j["ell"] = plan.ell;
  auto steps = nlohmann::ordered_json::array();
  for (const auto& s : plan.steps) {
    nlohmann::ordered_json js;
    js["support"] = {s.lo, s.hi};
    js["direction"] = s.direction == Direction::forward ? "f" : "b";
    js["duration"] = s.duration;
    js["slice"] = s.slice;
    steps.push_back(js);
  }
  j["steps"] = steps;
  j["predicted_error"] = plan.predicted_error;
  j["error_source"] = plan.error_source;
  return j.dump(2);
}

DecompositionPlan plan_from_json(const std::string& text, int n_sites) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidPlan(std::string("plan: malformed JSON: ") + e.what());
  }
  const std::set<std::string> top{"ell", "steps", "predicted_error", "error_source"};
  const std::set<std::string> step_keys{"support", "direction", "duration", "slice"};
  try {
    if (!j.is_object()) throw InvalidPlan("plan must be an object");
    for (const auto& [k, v] : j.items()) {
      if (!top.count(k)) throw InvalidPlan("plan: unknown field '" + k + "'");
    }
    DecompositionPlan p;
    p.n_sites = n_sites;
    p.ell = j.at("ell").get<int>();
    p.predicted_error = j.at("predicted_error").get<double>();
    p.error_source = j.at("error_source").get<std::string>();
    if (p.error_source != "fit" && p.error_source != "analytic") throw InvalidPlan("error_source must be fit or analytic");
    if (p.predicted_error < 0.0) throw InvalidPlan("predicted_error must be nonnegative");
    for (const auto& js : j.at("steps")) {
      for (const auto& [k, v] : js.items()) {
        if (!step_keys.count(k)) throw InvalidPlan("plan step: unknown field '" + k + "'");
      }
      BlockStep s;
      const auto sup = js.at("support").get<std::vector<int>>();
      if (sup.size() != 2) throw InvalidPlan("step support must be [lo, hi]");
      s.lo = sup[0];
      s.hi = sup[1];
      if (s.lo < 0 || s.hi < 0 || s.lo >= n_sites || s.hi >= n_sites) throw InvalidPlan("step support outside the lattice");
      const auto dir = js.at("direction").get<std::string>();
      if (dir == "f") s.direction = Direction::forward;
      else if (dir == "b") s.direction = Direction::backward;
      else throw InvalidPlan("step direction must be f or b");
      s.duration = js.at("duration").get<double>();
      s.slice = js.at("slice").get<int>();
      if (!(s.duration > 0.0)) throw InvalidPlan("step duration must be positive");
      p.steps.push_back(s);
    }
    p.total_time = p.steps.empty() ? 0.0 : check_telescoping(p);
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidPlan(std::string("plan: ") + e.what());
  }
}

}  // namespace lrblocks::plan
