#include "lrblocks/lr_bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace lrblocks::bounds {

namespace {

// log((2 zeta0 |t|)^l / l!), or -inf when the power vanishes.
double log_power_over_factorial(double zeta0, double t, int ell) {
  if (ell == 0) return 0.0;
  const double base = 2.0 * zeta0 * std::abs(t);
  if (base == 0.0) return -std::numeric_limits<double>::infinity();
  return ell * std::log(base) - std::lgamma(ell + 1.0);
}

double checked(double v) {
  if (std::isnan(v)) throw std::domain_error("bound evaluated to NaN");
  return v;
}

}  // namespace

double BoundQuery::effective_sum_exp() const {
  if (sum_exp >= 0.0) return sum_exp;
  return support_size * std::exp(-inputs.mu * ell);
}

double bound_strict_local(const BoundQuery& q, Variant v) {
  if (q.ell < 0) throw std::invalid_argument("ell must be nonnegative");
  const double lp = log_power_over_factorial(q.inputs.zeta0, q.t, q.ell);
  if (std::isinf(lp)) return 0.0;
  const double pre = v == Variant::commutator ? 2.0 * q.norm_a * q.norm_b * q.support_size
                                              : q.support_size * q.norm_a;
  if (pre == 0.0) return 0.0;
  return checked(std::exp(std::log(pre) + lp));
}

double bound_commutator_aware(const BoundQuery& q, Variant v) {
  const double eta = q.inputs.eta;
  const double zeta = q.inputs.zeta;
  const double at = std::abs(q.t);
  const double se = q.effective_sum_exp();
  if (eta < 0.0 || eta > 2.0 + 1e-12) throw std::invalid_argument("eta must lie in [0, 2]");
  if (eta == 0.0) {
    const double lim = 4.0 * std::numbers::sqrt2 * zeta * at;
    return v == Variant::commutator ? lim * q.norm_a * q.norm_b * se : lim * zeta * at * q.norm_a * se;
  }
  const double growth = std::expm1(zeta * at * std::sqrt(8.0 * eta));
  const double pre = v == Variant::commutator ? 2.0 / std::sqrt(eta) * q.norm_a * q.norm_b
                                              : 2.0 * zeta * at / std::sqrt(eta) * q.norm_a;
  return checked(pre * growth * se);
}

double bound_strict_commutator_tail(double K, double t, double dist, double norm_b) {
  if (K < 0.0 || dist < 0.0) throw std::invalid_argument("K and dist must be nonnegative");
  const double x = 2.0 * std::sqrt(K) * std::abs(t);
  const int start = static_cast<int>(std::ceil(dist));
  if (x == 0.0) return start == 0 ? 2.0 * norm_b : 0.0;
  // Terms grow until k ~ x, then decay; sum in log space relative to the peak.
  double total = 0.0;
  const double log_x = std::log(x);
  for (int k = start;; ++k) {
    const double term = std::exp(k * log_x - std::lgamma(k + 1.0));
    total += term;
    if (k > x && term <= total * std::numeric_limits<double>::epsilon()) break;
    if (k - start > 100000) break;
  }
  return 2.0 * norm_b * total;
}

int solve_overlap(double eps_target, double t, const BoundInputs& inputs, BoundKind kind, const BoundQuery& shape) {
  if (!(eps_target > 0.0)) throw std::invalid_argument("eps_target must be positive");
  BoundQuery q = shape;
  q.inputs = inputs;
  q.t = t;
  for (int ell = 0; ell <= kMaxOverlap; ++ell) {
    q.ell = ell;
    if (kind == BoundKind::commutator_aware) q.sum_exp = shape.support_size * std::exp(-inputs.mu * ell);
    const double b = kind == BoundKind::strict ? bound_strict_local(q) : bound_commutator_aware(q);
    if (b <= eps_target) return ell;
  }
  throw std::runtime_error("solve_overlap: no overlap up to 10^4 meets the target");
}

}  // namespace lrblocks::bounds
