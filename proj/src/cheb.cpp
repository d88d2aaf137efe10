#include "lrblocks/cheb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace lrblocks::cheb {

ChebyshevExpansion expand(const std::function<double(double)>& f, double rho, double bound, int degree,
                          Interval domain) {
  if (degree < 0) throw std::invalid_argument("degree must be nonnegative");
  if (!(rho > 1.0)) throw std::invalid_argument("rho must exceed 1");
  if (!(domain.hi > domain.lo)) throw std::invalid_argument("empty domain");

  const int nodes = 8 * (degree + 1);
  const double half = 0.5 * (domain.hi - domain.lo);
  const double mid = 0.5 * (domain.hi + domain.lo);
  std::vector<double> samples(static_cast<std::size_t>(nodes));
  for (int k = 0; k < nodes; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / nodes;
    samples[static_cast<std::size_t>(k)] = f(mid + half * std::cos(theta));
  }

  ChebyshevExpansion e;
  e.rho = rho;
  e.bound = bound;
  e.domain = domain;
  e.coeffs.resize(static_cast<std::size_t>(degree) + 1);
  for (int j = 0; j <= degree; ++j) {
    double acc = 0.0;
    for (int k = 0; k < nodes; ++k) {
      acc += samples[static_cast<std::size_t>(k)] * std::cos(2.0 * std::numbers::pi * j * k / nodes);
    }
    e.coeffs[static_cast<std::size_t>(j)] = (j == 0 ? 1.0 : 2.0) * acc / nodes;
  }

  // Roundoff of the quadrature sits near 1e-15 |f|, so allow that much slack.
  const double slack = 1e-13 * std::max(1.0, bound);
  if (std::abs(e.coeffs[0]) > bound + slack) {
    e.warnings.push_back("|a_0| exceeds M; the claimed bound on E_rho is wrong");
  }
  for (int j = 1; j <= degree; ++j) {
    const double limit = 2.0 * bound * std::pow(rho, -j);
    if (std::abs(e.coeffs[static_cast<std::size_t>(j)]) > limit + slack) {
      std::ostringstream msg;
      msg << "|a_" << j << "| = " << std::abs(e.coeffs[static_cast<std::size_t>(j)]) << " exceeds 2M rho^-j = "
          << limit << "; rho or M is overstated";
      e.warnings.push_back(msg.str());
    }
  }
  return e;
}

double evaluate(const ChebyshevExpansion& e, double x) {
  const double tol = 1e-12 * std::max(1.0, std::abs(e.domain.hi - e.domain.lo));
  if (x < e.domain.lo - tol || x > e.domain.hi + tol) {
    throw DomainError("argument outside the expansion domain");
  }
  if (e.coeffs.empty()) return 0.0;
  double u = (2.0 * x - (e.domain.lo + e.domain.hi)) / (e.domain.hi - e.domain.lo);
  u = std::clamp(u, -1.0, 1.0);
  double b1 = 0.0;
  double b2 = 0.0;
  for (std::size_t j = e.coeffs.size() - 1; j >= 1; --j) {
    const double b0 = e.coeffs[j] + 2.0 * u * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return e.coeffs[0] + u * b1 - b2;
}

double truncation_bound(double rho, double bound, int degree) {
  return 2.0 * bound / (rho - 1.0) * std::pow(rho, -degree);
}

int degree_for_accuracy(double rho, double bound, double eps) {
  if (!(rho > 1.0)) throw std::invalid_argument("rho must exceed 1");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const double lead = 2.0 * bound / (rho - 1.0);
  if (eps >= lead) return 0;
  int j = static_cast<int>(std::ceil(std::log(lead / eps) / std::log(rho)));
  j = std::max(j, 0);
  // Guard the ceil against roundoff on either side.
  while (j > 0 && truncation_bound(rho, bound, j - 1) <= eps) --j;
  while (truncation_bound(rho, bound, j) > eps) ++j;
  return j;
}

}  // namespace lrblocks::cheb
