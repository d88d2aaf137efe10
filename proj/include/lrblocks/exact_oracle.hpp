#pragma once

#include "lrblocks/lattice.hpp"
#include "lrblocks/sectors.hpp"

#include <limits>
#include <map>
#include <optional>
#include <tuple>

namespace lrblocks::oracle {

struct EvolutionRequest {
  const LatticeHamiltonian* hamiltonian = nullptr;
  double t_start = 0.0;
  double t_end = 0.0;
  /// Evolve under H_Omega, the sum of terms whose support lies inside Omega.
  std::optional<std::vector<int>> restrict_to;
  /// Midpoint substeps per unit time for terms with a time profile.
  int substeps_per_unit = 64;
};

struct EvolutionResult {
  DenseUnitary unitary;
  /// ||U(k substeps) - U(2k substeps)||; zero for piecewise-constant input.
  double discretization_error = 0.0;
};

/// Time-ordered product of slice propagators, later times to the left.
EvolutionResult evolve(const EvolutionRequest& req);

/// Exact block propagators exp(-i s H_region(slice)) for one Hamiltonian,
/// kept block diagonal in a shared sector partition and cached per
/// (slice, region) so sweeps reuse every eigendecomposition.
class BlockEvolver {
 public:
  explicit BlockEvolver(const LatticeHamiltonian& h);

  const LatticeHamiltonian& hamiltonian() const { return *h_; }
  const std::shared_ptr<const SectorPartition>& partition() const { return partition_; }

  /// exp(-i duration H_region) for the terms of `slice`; negative duration
  /// gives backward evolution.
  SectorOperator propagator(std::size_t slice, const std::vector<int>& region, double duration);
  /// Whole-lattice propagator over [t_start, t_end] (piecewise constant).
  SectorOperator evolve(double t_start, double t_end, const std::optional<std::vector<int>>& region = std::nullopt);
  SectorOperator identity() const { return SectorOperator::identity(partition_); }

  std::size_t cached_systems() const { return cache_.size(); }

 private:
  // Region Hamiltonian diagonalized on the region's qubits only.
  struct LocalSystem {
    std::vector<int> qubits;
    SectorEigensystem system;
  };

  const LocalSystem& system(std::size_t slice, const std::vector<int>& region);
  SectorOperator embed(const LocalSystem& local, const SectorOperator& u) const;

  const LatticeHamiltonian* h_;
  std::shared_ptr<const SectorPartition> partition_;
  // Basis state -> (sector, offset) in partition_.
  std::vector<std::pair<int, Eigen::Index>> position_;
  std::map<std::pair<std::size_t, std::vector<int>>, LocalSystem> cache_;
};

/// ||[A(t), B]|| with A, B single-site Paulis under exp(-i t H), for a
/// time-independent H on at most 12 qubits. A(t) is cached per (t, site, Pauli).
class CommutatorProbe {
 public:
  explicit CommutatorProbe(const OperatorSum& h);

  double commutator_norm(double t, int a_site, Pauli a, int b_site, Pauli b);
  int n_qubits() const { return n_; }

 private:
  const Matrix& heisenberg_picture(double t, int site, Pauli p);

  int n_;
  SectorEigensystem system_;
  std::tuple<double, int, Pauli> cached_key_{-1.0, -1, Pauli::I};
  Matrix cached_;
  double cached_time_ = std::numeric_limits<double>::quiet_NaN();
  SectorOperator cached_u_;
  // Quarter blocks of A(t) split on one qubit: {00, 01, 10, 11}.
  int split_site_ = -1;
  Matrix quarters_[4];
};

/// Heisenberg chain with fields from `seed`; returns ||[A(t), B]||.
double heisenberg_commutator_decay(int n, double t, int a_site, int b_site, std::uint64_t seed,
                                   Pauli a = Pauli::X, Pauli b = Pauli::X);

}  // namespace lrblocks::oracle
