#include "lrblocks/cheb.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <doctest.h>

#include <cmath>

using namespace lrblocks::cheb;

namespace {

double grid_sup_error(const ChebyshevExpansion& e, const std::function<double(double)>& f, int points = 1001) {
  double sup = 0.0;
  for (int i = 0; i < points; ++i) {
    const double x = e.domain.lo + (e.domain.hi - e.domain.lo) * i / (points - 1);
    sup = std::max(sup, std::abs(evaluate(e, x) - f(x)));
  }
  return sup;
}

}  // namespace

TEST_CASE("f(x) = x expands to T_1") {
  const auto e = expand([](double x) { return x; }, 2.0, 2.0, 6);
  CHECK(e.coeffs[1] == doctest::Approx(1.0));
  for (int j = 0; j <= 6; ++j) {
    if (j != 1) CHECK(std::abs(e.coeffs[static_cast<std::size_t>(j)]) <= 1e-12);
  }
}

TEST_CASE("f(x) = 2x^2 - 1 expands to T_2") {
  const auto e = expand([](double x) { return 2 * x * x - 1; }, 2.0, 4.0, 6);
  CHECK(e.coeffs[2] == doctest::Approx(1.0));
  for (int j = 0; j <= 6; ++j) {
    if (j != 2) CHECK(std::abs(e.coeffs[static_cast<std::size_t>(j)]) <= 1e-12);
  }
}

TEST_CASE("exp with rho = 2, J = 15 meets the lemma bound on a 1001-point grid") {
  const double m = std::exp(1.25);
  const auto e = expand([](double x) { return std::exp(x); }, 2.0, m, 15);
  CHECK(e.warnings.empty());
  CHECK(grid_sup_error(e, [](double x) { return std::exp(x); }) <= 2 * m / (2.0 - 1.0) * std::pow(2.0, -15));
}

TEST_CASE("exp coefficients equal 2 I_j(1)") {
  const auto e = expand([](double x) { return std::exp(x); }, 2.0, std::exp(1.25), 12);
  CHECK(e.coeffs[0] == doctest::Approx(boost::math::cyl_bessel_i(0, 1.0)).epsilon(1e-14));
  for (int j = 1; j <= 12; ++j) {
    CHECK(e.coeffs[static_cast<std::size_t>(j)] ==
          doctest::Approx(2.0 * boost::math::cyl_bessel_i(j, 1.0)).epsilon(1e-11));
  }
}

TEST_CASE("Clenshaw evaluation of T_3 at 0.5 is -1") {
  ChebyshevExpansion e;
  e.coeffs = {0.0, 0.0, 0.0, 1.0};
  CHECK(evaluate(e, 0.5) == doctest::Approx(-1.0));
}

TEST_CASE("constant functions evaluate to the constant everywhere") {
  const auto e = expand([](double) { return 2.5; }, 3.0, 2.5, 4);
  for (double x : {-1.0, -0.3, 0.0, 0.77, 1.0}) CHECK(evaluate(e, x) == doctest::Approx(2.5));
}

TEST_CASE("expansions on a shifted domain") {
  const Interval dom{2.0, 5.0};
  const auto f = [](double x) { return std::sin(x); };
  const auto e = expand(f, 2.0, std::cosh(0.75 * 1.5), 20, dom);
  CHECK(grid_sup_error(e, f) <= truncation_bound(2.0, std::cosh(0.75 * 1.5), 20));
  CHECK_THROWS_AS(evaluate(e, 1.0), DomainError);
  CHECK_THROWS_AS(evaluate(e, 5.5), DomainError);
}

TEST_CASE("degree search examples") {
  CHECK(degree_for_accuracy(2.0, 1.0, 2.0) == 0);
  CHECK(degree_for_accuracy(2.0, 1.0, 5.0) == 0);
  CHECK(degree_for_accuracy(2.0, 1.0, 1e-6) == 21);
}

TEST_CASE("returned degree satisfies the bound while one less does not") {
  for (double rho : {1.1, 1.5, 2.0, 4.0}) {
    for (double m : {0.5, 1.0, 30.0}) {
      for (double eps : {1e-2, 1e-6, 1e-12}) {
        const int j = degree_for_accuracy(rho, m, eps);
        CHECK(truncation_bound(rho, m, j) <= eps);
        if (j > 0) CHECK(truncation_bound(rho, m, j - 1) > eps);
      }
    }
  }
}

TEST_CASE("overstated analyticity is reported") {
  // |x| is not analytic; claiming rho = 4 with M = 1 must trip the check.
  const auto e = expand([](double x) { return std::abs(x); }, 4.0, 1.0, 10);
  CHECK_FALSE(e.warnings.empty());
}

TEST_CASE("invalid arguments") {
  CHECK_THROWS_AS(expand([](double x) { return x; }, 1.0, 1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(expand([](double x) { return x; }, 2.0, 1.0, -1), std::invalid_argument);
  CHECK_THROWS_AS(degree_for_accuracy(2.0, 1.0, 0.0), std::invalid_argument);
}
