#include "lrblocks/lattice.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace lrblocks;

namespace {

double dense_norm(const OperatorSum& op) { return spectral_norm(materialize(op)); }

}  // namespace

TEST_CASE("two-site Heisenberg term has eigenvalues {1, 1, 1, -3}") {
  const auto h = build_heisenberg_1d(2, {0.0, 0.0});
  REQUIRE(h.slices().size() == 1);
  REQUIRE(h.slices()[0].terms.size() == 1);
  Eigen::SelfAdjointEigenSolver<Matrix> es(materialize(h.full_sum(0.0)));
  CHECK(es.eigenvalues()(0) == doctest::Approx(-3.0));
  CHECK(es.eigenvalues()(3) == doctest::Approx(1.0));
}

TEST_CASE("three-site Heisenberg chain norm from a dense oracle") {
  const auto h = build_heisenberg_1d(3, {0.0, 0.0, 0.0});
  CHECK(h.slices()[0].terms.size() == 2);
  // Total spin: S(S+1) couplings give spectrum {2 (x4), -4 (x2), 0 (x2)}.
  Eigen::SelfAdjointEigenSolver<Matrix> es(materialize(h.full_sum(0.0)));
  CHECK(es.eigenvalues()(0) == doctest::Approx(-4.0));
  CHECK(es.eigenvalues()(7) == doctest::Approx(2.0));
  CHECK(dense_norm(h.full_sum(0.0)) == doctest::Approx(4.0));
}

TEST_CASE("random fields lie in [-1, 1] and are seeded") {
  const auto a = random_fields(20, 42);
  CHECK(a == random_fields(20, 42));
  CHECK(a != random_fields(20, 43));
  for (double z : a) CHECK(std::abs(z) <= 1.0);
}

TEST_CASE("horizon splits into slices of length at most 1") {
  const auto h = build_heisenberg_1d(4, random_fields(4, 1), 2.5);
  REQUIRE(h.slices().size() == 3);
  CHECK(h.total_time() == doctest::Approx(2.5));
  for (const auto& s : h.slices()) CHECK(s.t_end - s.t_start <= 1.0 + 1e-12);
}

TEST_CASE("commuting Hamiltonian gives eta = 0 and K = 0") {
  TimeSlice s;
  for (int j = 0; j + 1 < 4; ++j) {
    LocalTerm t;
    t.support = {j, j + 1};
    t.op = OperatorSum(4);
    t.op.add(0.5, PauliString(4, {{j, Pauli::Z}, {j + 1, Pauli::Z}}));
    s.terms.push_back(t);
  }
  const LatticeHamiltonian h(Lattice::chain(4), {s});
  const auto in = extract_bound_inputs(h, 1.0);
  CHECK(in.eta == 0.0);
  CHECK(in.K == 0.0);
}

TEST_CASE("single-term Hamiltonian gives zeta0 = |X| |h_X|") {
  TimeSlice s;
  LocalTerm t;
  t.support = {1, 2};
  t.op = OperatorSum(3);
  t.op.add(0.7, PauliString(3, {{1, Pauli::X}, {2, Pauli::Y}}));
  s.terms.push_back(t);
  const LatticeHamiltonian h(Lattice::chain(3), {s});
  CHECK(extract_bound_inputs(h, 1.0).zeta0 == doctest::Approx(2 * 0.7));
}

TEST_CASE("bound inputs for Heisenberg n=5 match a brute-force oracle") {
  const int n = 5;
  const double mu = 1.0;
  const auto h = build_heisenberg_1d(n, random_fields(n, 42));
  const auto in = extract_bound_inputs(h, mu);
  const auto& terms = h.slices()[0].terms;

  double zeta0 = 0.0, zeta = 0.0, K = 0.0, eta = 0.0, max_norm = 0.0;
  for (int x = 0; x < n; ++x) {
    double s0 = 0.0, s1 = 0.0;
    for (const auto& term : terms) {
      if (std::find(term.support.begin(), term.support.end(), x) == term.support.end()) continue;
      const double size = static_cast<double>(term.support.size());
      const double diam = std::abs(term.support.back() - term.support.front());
      const double nrm = dense_norm(term.op);
      s0 += size * nrm;
      s1 += nrm * size * size * std::exp(mu * diam);
    }
    zeta0 = std::max(zeta0, s0);
    zeta = std::max(zeta, s1);
  }
  for (std::size_t a = 0; a < terms.size(); ++a) {
    max_norm = std::max(max_norm, dense_norm(terms[a].op));
    for (std::size_t b = 0; b < terms.size(); ++b) {
      if (a == b) continue;
      const std::set<int> sa(terms[a].support.begin(), terms[a].support.end());
      bool overlap = false;
      for (int q : terms[b].support) overlap = overlap || sa.count(q);
      if (!overlap) continue;
      const Matrix ma = materialize(terms[a].op), mb = materialize(terms[b].op);
      const double c = spectral_norm(ma * mb - mb * ma);
      K = std::max(K, c);
      eta = std::max(eta, std::min(2.0, c / (dense_norm(terms[a].op) * dense_norm(terms[b].op))));
    }
  }
  CHECK(in.zeta0 == doctest::Approx(zeta0).epsilon(1e-10));
  CHECK(in.zeta == doctest::Approx(zeta).epsilon(1e-10));
  CHECK(in.K == doctest::Approx(K).epsilon(1e-10));
  CHECK(in.eta == doctest::Approx(eta).epsilon(1e-10));
  CHECK(in.max_term_norm == doctest::Approx(max_norm).epsilon(1e-10));
  CHECK(in.degree == 2);
}

TEST_CASE("validation flags Heisenberg norms against unit normalization") {
  const auto h = build_heisenberg_1d(6, random_fields(6, 3));
  const auto r = validate(h);
  CHECK_FALSE(r.clean());
  CHECK(r.max_term_norm <= 4.0 + 1e-12);
  CHECK(r.max_term_norm > 1.0);
  CHECK(r.suggested_rescale == doctest::Approx(1.0 / r.max_term_norm));
  CHECK(r.suggested_rescale >= 0.25);
  CHECK(validate(h.scaled(r.suggested_rescale)).clean());
}

TEST_CASE("a term of norm 10 is reported as a strong term") {
  TimeSlice s;
  LocalTerm t;
  t.support = {0, 1};
  t.op = OperatorSum(3);
  t.op.add(10.0, PauliString(3, {{0, Pauli::Z}, {1, Pauli::Z}}));
  s.terms.push_back(t);
  const auto r = validate(LatticeHamiltonian(Lattice::chain(3), {s}));
  REQUIRE(r.strong_terms.size() == 1);
  CHECK(r.strong_terms[0].norm == doctest::Approx(10.0));
}

TEST_CASE("empty Hamiltonian validates clean") {
  const LatticeHamiltonian h(Lattice::chain(3), {TimeSlice{0.0, 1.0, {}}});
  CHECK(validate(h).clean());
}

TEST_CASE("non-local terms and long slices are violations") {
  TimeSlice s{0.0, 1.5, {}};
  LocalTerm t;
  t.support = {0, 2};
  t.op = OperatorSum(3);
  t.op.add(0.5, PauliString(3, {{0, Pauli::X}, {2, Pauli::X}}));
  s.terms.push_back(t);
  const auto r = validate(LatticeHamiltonian(Lattice::chain(3), {s}));
  CHECK(r.violations.size() == 2);
}

TEST_CASE("Hamiltonian JSON round-trips and rejects unknown fields") {
  const auto h = build_heisenberg_1d(4, random_fields(4, 5));
  const auto text = hamiltonian_to_json(h);
  const auto back = hamiltonian_from_json(text);
  CHECK(back.n_sites() == 4);
  CHECK((materialize(back.full_sum(0.5)) - materialize(h.full_sum(0.5))).norm() < 1e-12);
  CHECK(hamiltonian_to_json(back) == text);
  CHECK_THROWS_AS(hamiltonian_from_json(R"({"n": 2, "terms": [], "extra": 1})"), std::invalid_argument);
  CHECK_THROWS_AS(hamiltonian_from_json("{not json"), std::invalid_argument);
}

TEST_CASE("periodic chain distances wrap") {
  const auto l = Lattice::chain(6, Boundary::periodic);
  CHECK(l.distance(0, 5) == doctest::Approx(1.0));
  CHECK(l.distance(0, 3) == doctest::Approx(3.0));
  CHECK(Lattice::chain(6).distance(0, 5) == doctest::Approx(5.0));
}

TEST_CASE("square grid has unit nearest-neighbour distance") {
  const auto g = Lattice::grid(3, 3);
  CHECK(g.dimension() == 2);
  CHECK(g.distance(0, 1) == doctest::Approx(1.0));
  CHECK(g.distance(0, 4) == doctest::Approx(std::sqrt(2.0)));
}
