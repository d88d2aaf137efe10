#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrblocks::cheb {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Interval {
  double lo = -1.0;
  double hi = 1.0;
};

/// Truncated Chebyshev series sum_j a_j T_j(u) on `domain`, with u the affine
/// image of the argument in [-1, 1]. `rho` and `bound` record the analyticity
/// claim (f analytic inside the Bernstein ellipse E_rho, |f| <= bound there).
struct ChebyshevExpansion {
  std::vector<double> coeffs;
  double rho = 2.0;
  double bound = 1.0;
  Interval domain;
  /// Filled by `expand` when |a_j| exceeds the decay implied by (rho, bound).
  std::vector<std::string> warnings;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

/// Coefficients by the trapezoid rule on theta -> f(cos theta) with
/// 8(J+1) nodes, then a check of |a_0| <= M and |a_j| <= 2 M rho^{-j}.
ChebyshevExpansion expand(const std::function<double(double)>& f, double rho, double bound, int degree,
                          Interval domain = {});

/// Clenshaw evaluation; throws DomainError outside the domain.
double evaluate(const ChebyshevExpansion& e, double x);

/// Smallest J with 2M/(rho-1) rho^{-J} <= eps.
int degree_for_accuracy(double rho, double bound, double eps);

/// Right-hand side of the approximation lemma, 2M/(rho-1) rho^{-J}.
double truncation_bound(double rho, double bound, int degree);

}  // namespace lrblocks::cheb
