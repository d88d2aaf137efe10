#include "lrblocks/resources.hpp"

#include <doctest.h>

#include <cmath>

using namespace lrblocks;
using namespace lrblocks::resources;

namespace {

const fit::FitModel kModel{0.19869548894012262, 4.214799926358385, -1.130513751035632};

EstimateRequest request(int n, double eps, bool merged) {
  EstimateRequest r;
  r.n = n;
  r.T = n;
  r.eps = eps;
  r.ell = 8;
  r.merged = merged;
  r.model = kModel;
  return r;
}

}  // namespace

TEST_CASE("sweep at t = 0 has zero error") {
  SweepConfig c;
  c.n = 6;
  c.t_grid = {0.0};
  c.ells = {2};
  const auto s = sweep(c);
  REQUIRE(s.size() == 3);
  for (const auto& x : s) {
    CHECK(x.error == 0.0);
    CHECK(x.n == 6);
  }
  CHECK(s[0].a == 1);
  CHECK(s[2].a == 3);
}

TEST_CASE("sweep is deterministic and ordered by t, ell, a") {
  SweepConfig c;
  c.n = 7;
  c.seed = 3;
  c.t_grid = {0.5, 1.0};
  c.ells = {2, 3};
  const auto a = sweep(c);
  const auto b = sweep(c);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].error == b[k].error);
  for (std::size_t k = 1; k < a.size(); ++k) {
    const bool ordered = a[k - 1].t < a[k].t || (a[k - 1].t == a[k].t && (a[k - 1].ell < a[k].ell ||
                                                                           (a[k - 1].ell == a[k].ell && a[k - 1].a < a[k].a)));
    CHECK(ordered);
  }
}

TEST_CASE("sweep errors match a direct staircase evaluation") {
  SweepConfig c;
  c.n = 7;
  c.seed = 5;
  c.t_grid = {0.7};
  c.ells = {3};
  c.positions = {2};
  const auto s = sweep(c);
  REQUIRE(s.size() == 1);
  const auto h = build_heisenberg_1d(7, random_fields(7, 5));
  oracle::BlockEvolver ev(h);
  CHECK(s[0].error == doctest::Approx(plan::staircase_error(ev, 0.7, 2, 4)).epsilon(1e-9));
}

TEST_CASE("sweep validation") {
  SweepConfig c;
  c.n = 12;
  CHECK_THROWS_AS(sweep(c), DimensionError);
  c.n = 6;
  c.t_grid = {-0.1};
  CHECK_THROWS(sweep(c));
  CHECK_THROWS(sweep_config_from_json(R"({"n": 6, "bogus": 1})"));
  CHECK_THROWS(sweep_config_from_json("[1, 2]"));
  const auto cfg = sweep_config_from_json(R"({"n": 9, "seed": 4, "t_grid": [0.25], "ells": [2, 4]})");
  CHECK(cfg.n == 9);
  CHECK(cfg.seed == 4);
  CHECK(cfg.ells == std::vector<int>{2, 4});
}

TEST_CASE("chain profile of the Heisenberg chain") {
  const std::vector<double> f{0.5, -1.0, 0.25, 2.0};
  const auto p = ChainProfile::heisenberg(f);
  CHECK(p.n_sites() == 4);
  CHECK(p.bond_one_norm == std::vector<double>{3.5, 4.0, 5.25});
  CHECK(p.total_terms() == 13);
  const auto from_h = ChainProfile::from_hamiltonian(build_heisenberg_1d(4, f));
  for (std::size_t k = 0; k < 3; ++k) CHECK(from_h.bond_one_norm[k] == doctest::Approx(p.bond_one_norm[k]));
  CHECK(from_h.bond_terms == p.bond_terms);
  CHECK(p.window(3).first == doctest::Approx(9.25));
}

TEST_CASE("estimate block counts follow the merged and unmerged forms") {
  const auto chain = ChainProfile::heisenberg(random_fields(50, 1));
  for (bool merged : {false, true}) {
    const auto r = estimate(request(50, 1e-3, merged), chain);
    const double m = fit::block_count(50.0, 50, r.t_block, 8, merged);
    CHECK(r.m_blocks == static_cast<long long>(std::ceil(m - 1e-9)));
    CHECK(r.error_source == "fit");
  }
  const auto plain = estimate(request(50, 1e-3, false), chain);
  const auto merged = estimate(request(50, 1e-3, true), chain);
  CHECK(merged.m_blocks < plain.m_blocks);
}

TEST_CASE("estimate cost grows as eps shrinks") {
  const auto chain = ChainProfile::heisenberg(random_fields(50, 2));
  double prev_m = 0.0;
  double prev_g = 0.0;
  for (double eps : {1e-2, 1e-3, 1e-4, 1e-6}) {
    const auto r = estimate(request(50, eps, false), chain);
    CHECK(r.m_blocks >= prev_m);
    CHECK(r.gate_estimate > prev_g);
    prev_m = static_cast<double>(r.m_blocks);
    prev_g = r.gate_estimate;
  }
}

TEST_CASE("estimate stays within the error budget") {
  const auto chain = ChainProfile::heisenberg(random_fields(60, 3));
  for (double split : {0.1, 1.0 / 3.0, 0.5}) {
    for (bool fitted : {true, false}) {
      auto req = request(60, 1e-3, false);
      req.split = split;
      if (!fitted) req.model.reset();
      const auto r = estimate(req, chain);
      const auto& b = r.error_budget;
      CHECK(b.eps_lr_total + b.eps_box_total <= req.eps * (1.0 + 1e-3));
      CHECK(b.headroom == doctest::Approx(req.eps - b.eps_lr_total - b.eps_box_total));
      CHECK(b.eps_box_total == doctest::Approx(split * req.eps));
    }
  }
  auto bad = request(60, 1e-3, false);
  bad.split = 0.6;
  CHECK_THROWS(estimate(bad, chain));
  CHECK_THROWS(estimate(request(61, 1e-3, false), chain));
}

TEST_CASE("report JSON round trip is idempotent") {
  const auto chain = ChainProfile::heisenberg(random_fields(40, 4));
  const auto r = estimate(request(40, 1e-3, true), chain);
  const auto text = to_json(r);
  const auto back = report_from_json(text);
  CHECK(to_json(back) == text);
  CHECK(back.m_blocks == r.m_blocks);
  CHECK(back.error_budget.headroom == r.error_budget.headroom);
}

TEST_CASE("budgeted block time meets its per-cut target on the exact chain") {
  const auto b = fit::solve_budget(50.0, 50, 8, 1e-3, kModel);
  CHECK(b.t == doctest::Approx(0.19912).epsilon(1e-3));
  const double target = 1e-3 / (3.0 * static_cast<double>(b.m));
  const auto h = build_heisenberg_1d(11, random_fields(11, 7));
  oracle::BlockEvolver ev(h);
  for (int a : {1, 2}) CHECK(plan::staircase_error(ev, b.t, a, a + 7) <= target);
}

TEST_CASE("verify: identity plan on a zero Hamiltonian") {
  const auto base = build_heisenberg_1d(4, std::vector<double>(4, 0.0));
  auto slices = base.slices();
  for (auto& term : slices[0].terms) term.op = term.op.scaled(0.0);
  const LatticeHamiltonian zero(base.lattice(), slices);
  const auto p = plan::plan_staircase_1d(zero, 1.0, 1, 2);
  const auto r = verify(plan::to_json(p), hamiltonian_to_json(zero));
  CHECK(r.result.distance < 1e-14);
  CHECK(r.result.pass);
  CHECK(r.steps == 3);
}

TEST_CASE("verify: staircase on n = 9 stays below its analytic prediction") {
  const auto h = build_heisenberg_1d(9, random_fields(9, 8));
  const auto pred = plan::ErrorPredictor::analytic(h);
  const auto p = plan::plan_staircase_1d(h, 0.5, 2, 6, &pred);
  const auto r = verify(plan::to_json(p), hamiltonian_to_json(h));
  CHECK(r.result.distance > 0.0);
  CHECK(r.result.distance <= r.result.predicted);
  CHECK(r.result.pass);
  CHECK(r.total_time == doctest::Approx(0.5));
}

TEST_CASE("verify rejects a corrupted plan") {
  const auto h = build_heisenberg_1d(6, random_fields(6, 9));
  auto p = plan::plan_staircase_1d(h, 0.5, 1, 3);
  p.steps.pop_back();
  CHECK_THROWS_AS(verify(plan::to_json(p), hamiltonian_to_json(h)), plan::InvalidPlan);
  CHECK_THROWS(verify("{}", hamiltonian_to_json(h)));
}
