#pragma once

#include "lrblocks/cheb.hpp"
#include "lrblocks/operator_core.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lrblocks {

enum class Boundary { open, periodic };

/// Sites with coordinates in a Euclidean metric. Coordinates are stored raw;
/// `metric_scale` rescales distances so nearest neighbors sit at distance 1.
class Lattice {
 public:
  Lattice() = default;
  Lattice(int dimension, std::vector<std::array<double, 2>> coords, Boundary boundary,
          std::array<double, 2> extent = {0.0, 0.0});

  static Lattice chain(int n, Boundary boundary = Boundary::open);
  /// width x height square grid, site index = row * width + col.
  static Lattice grid(int width, int height, Boundary boundary = Boundary::open);

  int dimension() const { return dimension_; }
  int size() const { return static_cast<int>(coords_.size()); }
  Boundary boundary() const { return boundary_; }
  const std::vector<std::array<double, 2>>& coords() const { return coords_; }
  double metric_scale() const { return scale_; }

  /// Distance in the rescaled metric.
  double distance(int i, int j) const;
  double distance(const std::vector<int>& a, const std::vector<int>& b) const;
  double diameter(const std::vector<int>& sites) const;
  /// Largest number of sites inside any closed unit ball centered on a site.
  int max_sites_per_unit_ball() const;

 private:
  double raw_distance(int i, int j) const;

  int dimension_ = 1;
  std::vector<std::array<double, 2>> coords_;
  Boundary boundary_ = Boundary::open;
  std::array<double, 2> extent_{0.0, 0.0};
  double scale_ = 1.0;
};

struct LocalTerm {
  std::vector<int> support;  // sorted site indices
  OperatorSum op;            // on the full register; acts only inside support
  /// Optional time profile f(t); the term is f(t) * op.
  std::optional<cheb::ChebyshevExpansion> profile;

  /// Dense matrix on the support qubits only.
  Matrix local_matrix() const;
  double norm() const;
  double coefficient_at(double t) const;
};

struct TimeSlice {
  double t_start = 0.0;
  double t_end = 1.0;
  std::vector<LocalTerm> terms;
};

class LatticeHamiltonian {
 public:
  LatticeHamiltonian() = default;
  LatticeHamiltonian(Lattice lattice, std::vector<TimeSlice> slices);

  const Lattice& lattice() const { return lattice_; }
  int n_sites() const { return lattice_.size(); }
  const std::vector<TimeSlice>& slices() const { return slices_; }
  double total_time() const { return slices_.empty() ? 0.0 : slices_.back().t_end; }

  /// Terms of the slice covering t (first slice wins at boundaries).
  const std::vector<LocalTerm>& terms_at(double t) const;
  /// Every distinct term appearing in any slice.
  std::vector<const LocalTerm*> all_terms() const;

  /// sum of terms supported inside `region`, frozen at time t (profiles sampled).
  OperatorSum restricted_sum(double t, const std::vector<int>& region) const;
  OperatorSum full_sum(double t) const;

  LatticeHamiltonian scaled(double factor) const;
  /// Same terms repeated over unit-or-shorter slices covering [0, horizon].
  LatticeHamiltonian with_horizon(double horizon) const;

 private:
  Lattice lattice_;
  std::vector<TimeSlice> slices_;
};

/// Open-boundary Heisenberg chain, h_j = XX + YY + ZZ + z_j Z_j on bond (j, j+1);
/// the last bond also carries z_{n-1} Z_{n-1}. Slices of length <= 1 cover
/// [0, horizon].
LatticeHamiltonian build_heisenberg_1d(int n, const std::vector<double>& z_fields, double horizon = 1.0);

/// Fields z_j uniform in [-1, 1] from a mt19937_64 seeded with `seed`.
std::vector<double> random_fields(int n, std::uint64_t seed);

struct BoundInputs {
  double zeta0 = 0.0;
  double zeta = 0.0;
  double mu = 1.0;
  double eta = 0.0;
  double K = 0.0;
  int degree = 0;
  double max_term_norm = 0.0;
};

BoundInputs extract_bound_inputs(const LatticeHamiltonian& h, double mu);

struct StrongTerm {
  std::size_t slice = 0;
  std::size_t term = 0;
  double norm = 0.0;
};

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<StrongTerm> strong_terms;
  double max_term_norm = 0.0;
  /// Factor that brings every term to norm <= 1 (1 when already normalized).
  double suggested_rescale = 1.0;
  double metric_scale = 1.0;
  int max_sites_per_unit_ball = 0;

  bool clean() const { return violations.empty(); }
};

inline constexpr int kDefaultDensityCap = 8;

ValidationReport validate(const LatticeHamiltonian& h, int density_cap = kDefaultDensityCap);

/// Parses the JSON ingestion format; unknown fields are rejected.
LatticeHamiltonian hamiltonian_from_json(const std::string& text);
std::string hamiltonian_to_json(const LatticeHamiltonian& h);

}  // namespace lrblocks
