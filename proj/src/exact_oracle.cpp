#include "lrblocks/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lrblocks::oracle {

namespace {

constexpr double kTimeTol = 1e-12;

bool has_profiles(const LatticeHamiltonian& h) {
  for (const auto* term : h.all_terms()) {
    if (term->profile) return true;
  }
  return false;
}

std::vector<int> all_sites(int n) {
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

OperatorSum slice_sum(const LatticeHamiltonian& h, std::size_t slice, double t,
                      const std::vector<int>& region) {
  std::vector<int> sorted = region;
  std::sort(sorted.begin(), sorted.end());
  OperatorSum out(h.n_sites());
  for (const auto& term : h.slices()[slice].terms) {
    if (std::includes(sorted.begin(), sorted.end(), term.support.begin(), term.support.end())) {
      out.add(term.op, term.coefficient_at(t));
    }
  }
  return out;
}

// Product of midpoint exponentials over [a, b] inside one slice, `steps` substeps.
Matrix slice_product(const LatticeHamiltonian& h, std::size_t slice, double a, double b,
                     const std::vector<int>& region, int steps) {
  const Eigen::Index dim = Eigen::Index{1} << h.n_sites();
  Matrix u = Matrix::Identity(dim, dim);
  const double dt = (b - a) / steps;
  for (int k = 0; k < steps; ++k) {
    const double mid = a + (k + 0.5) * dt;
    const auto sys = SectorEigensystem::from_operator(slice_sum(h, slice, mid, region));
    u = sys.evolution(dt).to_dense() * u;
  }
  return u;
}

void check_region(const std::vector<int>& region, int n) {
  for (int s : region) {
    if (s < 0 || s >= n) throw std::out_of_range("restriction region names a site outside the lattice");
  }
}

}  // namespace

EvolutionResult evolve(const EvolutionRequest& req) {
  if (req.hamiltonian == nullptr) throw std::invalid_argument("evolve: no Hamiltonian");
  const auto& h = *req.hamiltonian;
  if (h.n_sites() > kMaxQubits) throw DimensionError("evolve: register exceeds the exact-oracle limit");
  if (req.t_end < req.t_start) throw std::invalid_argument("evolve: t_end precedes t_start");
  if (req.t_start < -kTimeTol || req.t_end > h.total_time() + kTimeTol) {
    throw std::out_of_range("evolve: time window outside the Hamiltonian's slices");
  }
  if (req.substeps_per_unit <= 0) throw std::invalid_argument("evolve: substeps_per_unit must be positive");
  const std::vector<int> region = req.restrict_to ? *req.restrict_to : all_sites(h.n_sites());
  check_region(region, h.n_sites());

  const Eigen::Index dim = Eigen::Index{1} << h.n_sites();
  Matrix coarse = Matrix::Identity(dim, dim);
  Matrix fine = Matrix::Identity(dim, dim);
  const bool profiled = has_profiles(h);

  for (std::size_t i = 0; i < h.slices().size(); ++i) {
    const auto& s = h.slices()[i];
    const double a = std::max(s.t_start, req.t_start);
    const double b = std::min(s.t_end, req.t_end);
    if (b - a <= kTimeTol) continue;
    if (!profiled) {
      const auto sys = SectorEigensystem::from_operator(slice_sum(h, i, 0.5 * (a + b), region));
      coarse = sys.evolution(b - a).to_dense() * coarse;
      continue;
    }
    const int steps = std::max(1, static_cast<int>(std::ceil(req.substeps_per_unit * (b - a))));
    coarse = slice_product(h, i, a, b, region, steps) * coarse;
    fine = slice_product(h, i, a, b, region, 2 * steps) * fine;
  }

  EvolutionResult out;
  if (profiled) {
    out.discretization_error = spectral_norm(Matrix(coarse - fine));
    out.unitary = DenseUnitary(std::move(fine));
  } else {
    out.unitary = DenseUnitary(std::move(coarse));
  }
  return out;
}

BlockEvolver::BlockEvolver(const LatticeHamiltonian& h) : h_(&h) {
  if (h.n_sites() > kMaxQubits) throw DimensionError("BlockEvolver: register exceeds the exact-oracle limit");
  bool conserving = true;
  for (const auto* term : h.all_terms()) {
    if (!conserves_hamming_weight(term->op.restricted_to(term->support))) {
      conserving = false;
      break;
    }
  }
  partition_ = conserving ? SectorPartition::hamming(h.n_sites()) : SectorPartition::trivial(h.n_sites());
  position_.resize(static_cast<std::size_t>(partition_->dim()));
  for (std::size_t s = 0; s < partition_->sectors.size(); ++s) {
    const auto& idx = partition_->sectors[s];
    for (std::size_t k = 0; k < idx.size(); ++k) {
      position_[static_cast<std::size_t>(idx[k])] = {static_cast<int>(s), static_cast<Eigen::Index>(k)};
    }
  }
}

const BlockEvolver::LocalSystem& BlockEvolver::system(std::size_t slice, const std::vector<int>& region) {
  std::vector<int> key = region;
  std::sort(key.begin(), key.end());
  key.erase(std::unique(key.begin(), key.end()), key.end());
  auto it = cache_.find({slice, key});
  if (it != cache_.end()) return it->second;
  check_region(key, h_->n_sites());
  const auto& s = h_->slices().at(slice);
  const auto local = slice_sum(*h_, slice, 0.5 * (s.t_start + s.t_end), key).restricted_to(key);
  auto sys = partition_->is_trivial()
                 ? SectorEigensystem::from_operator(local, SectorPartition::trivial(local.n_qubits()))
                 : SectorEigensystem::from_operator(local, SectorPartition::hamming(local.n_qubits()));
  auto [pos, inserted] = cache_.emplace(std::make_pair(slice, key), LocalSystem{key, std::move(sys)});
  return pos->second;
}

SectorOperator BlockEvolver::embed(const LocalSystem& local, const SectorOperator& u) const {
  const int n = h_->n_sites();
  const int k = static_cast<int>(local.qubits.size());
  const auto& lpart = u.partition();
  // Local basis state -> (local sector, offset).
  std::vector<std::pair<int, Eigen::Index>> lpos(static_cast<std::size_t>(lpart.dim()));
  for (std::size_t s = 0; s < lpart.sectors.size(); ++s) {
    for (std::size_t j = 0; j < lpart.sectors[s].size(); ++j) {
      lpos[static_cast<std::size_t>(lpart.sectors[s][j])] = {static_cast<int>(s), static_cast<Eigen::Index>(j)};
    }
  }
  std::vector<Eigen::Index> bit(static_cast<std::size_t>(k));
  Eigen::Index mask = 0;
  for (int q = 0; q < k; ++q) {
    bit[static_cast<std::size_t>(q)] = Eigen::Index{1} << (n - 1 - local.qubits[static_cast<std::size_t>(q)]);
    mask |= bit[static_cast<std::size_t>(q)];
  }
  auto gather = [&](Eigen::Index x) {
    Eigen::Index r = 0;
    for (int q = 0; q < k; ++q) {
      if (x & bit[static_cast<std::size_t>(q)]) r |= Eigen::Index{1} << (k - 1 - q);
    }
    return r;
  };
  auto scatter = [&](Eigen::Index r) {
    Eigen::Index x = 0;
    for (int q = 0; q < k; ++q) {
      if (r & (Eigen::Index{1} << (k - 1 - q))) x |= bit[static_cast<std::size_t>(q)];
    }
    return x;
  };

  std::vector<Matrix> blocks;
  blocks.reserve(partition_->sectors.size());
  for (std::size_t s = 0; s < partition_->sectors.size(); ++s) {
    const auto& idx = partition_->sectors[s];
    const auto d = static_cast<Eigen::Index>(idx.size());
    Matrix b = Matrix::Zero(d, d);
    for (Eigen::Index c = 0; c < d; ++c) {
      const Eigen::Index y = idx[static_cast<std::size_t>(c)];
      const Eigen::Index rest = y & ~mask;
      const Eigen::Index yr = gather(y);
      const auto [ls, lc] = lpos[static_cast<std::size_t>(yr)];
      const auto& lsector = lpart.sectors[static_cast<std::size_t>(ls)];
      const Matrix& lb = u.blocks()[static_cast<std::size_t>(ls)];
      for (std::size_t r = 0; r < lsector.size(); ++r) {
        const Eigen::Index x = rest | scatter(lsector[r]);
        b(position_[static_cast<std::size_t>(x)].second, c) = lb(static_cast<Eigen::Index>(r), lc);
      }
    }
    blocks.push_back(std::move(b));
  }
  return SectorOperator(partition_, std::move(blocks));
}

SectorOperator BlockEvolver::propagator(std::size_t slice, const std::vector<int>& region, double duration) {
  if (region.empty()) return identity();
  const auto& local = system(slice, region);
  if (local.qubits.empty()) return identity();
  return embed(local, local.system.evolution(duration));
}

SectorOperator BlockEvolver::evolve(double t_start, double t_end, const std::optional<std::vector<int>>& region) {
  if (t_end < t_start) throw std::invalid_argument("evolve: t_end precedes t_start");
  const std::vector<int> sites = region ? *region : all_sites(h_->n_sites());
  SectorOperator u = identity();
  for (std::size_t i = 0; i < h_->slices().size(); ++i) {
    const auto& s = h_->slices()[i];
    const double a = std::max(s.t_start, t_start);
    const double b = std::min(s.t_end, t_end);
    if (b - a <= kTimeTol) continue;
    u = propagator(i, sites, b - a) * u;
  }
  return u;
}

CommutatorProbe::CommutatorProbe(const OperatorSum& h)
    : n_(h.n_qubits()), system_(SectorEigensystem::from_operator(h)) {}

const Matrix& CommutatorProbe::heisenberg_picture(double t, int site, Pauli p) {
  const auto key = std::make_tuple(t, site, p);
  if (key == cached_key_) return cached_;
  if (!(t == cached_time_)) {
    cached_u_ = system_.evolution(t);
    cached_time_ = t;
  }
  const Matrix local = materialize(PauliString(1, {{0, p}}));
  const int qubit[] = {site};
  const auto& partition = cached_u_.partition();
  const Eigen::Index dim = partition.dim();

  // A U, assembled from the block-diagonal U without densifying it.
  Matrix au = cached_u_.to_dense();
  apply_on_qubits(local, qubit, n_, au);

  // A(t) = U^dagger (A U): row block I_s of the result only touches U_s.
  cached_.resize(dim, dim);
  for (std::size_t s = 0; s < partition.sectors.size(); ++s) {
    const auto& idx = partition.sectors[s];
    const auto d = static_cast<Eigen::Index>(idx.size());
    Matrix rows(d, dim);
    for (Eigen::Index r = 0; r < d; ++r) rows.row(r) = au.row(idx[static_cast<std::size_t>(r)]);
    const Matrix out = cached_u_.blocks()[s].adjoint() * rows;
    for (Eigen::Index r = 0; r < d; ++r) cached_.row(idx[static_cast<std::size_t>(r)]) = out.row(r);
  }
  cached_key_ = key;
  return cached_;
}

double CommutatorProbe::commutator_norm(double t, int a_site, Pauli a, int b_site, Pauli b) {
  if (a_site < 0 || a_site >= n_ || b_site < 0 || b_site >= n_) throw std::out_of_range("probe site out of range");
  if (a == Pauli::I || b == Pauli::I) return 0.0;
  const auto key = std::make_tuple(t, a_site, a);
  if (key != cached_key_ || split_site_ != b_site) {
    const Matrix& m = heisenberg_picture(t, a_site, a);
    const Eigen::Index bit = Eigen::Index{1} << (n_ - 1 - b_site);
    std::vector<Eigen::Index> zeros;
    std::vector<Eigen::Index> ones;
    for (Eigen::Index i = 0; i < m.rows(); ++i) ((i & bit) ? ones : zeros).push_back(i);
    quarters_[0] = m(zeros, zeros);
    quarters_[1] = m(zeros, ones);
    quarters_[2] = m(ones, zeros);
    quarters_[3] = m(ones, ones);
    split_site_ = b_site;
  }

  // B = R Z R^dagger with R = H for X and R = S H for Y, so
  // ||[A(t), B]|| = 2 ||(R^dagger A(t) R)_{01}||.
  const cplx i(0.0, 1.0);
  Matrix off;
  switch (b) {
    case Pauli::Z:
      off = quarters_[1];
      break;
    case Pauli::X:
      off = 0.5 * (quarters_[0] - quarters_[1] + quarters_[2] - quarters_[3]);
      break;
    default:
      off = 0.5 * (quarters_[0] - i * quarters_[1] - i * quarters_[2] - quarters_[3]);
      break;
  }
  if (off.rows() <= 128) return 2.0 * spectral_norm(off);
  const Matrix gram = off.adjoint() * off;
  return 2.0 * spectral_norm_krylov(gram.rows(), [&gram](const Vector& q, Vector& w) { w.noalias() = gram * q; }, 1e-8);
}

double heisenberg_commutator_decay(int n, double t, int a_site, int b_site, std::uint64_t seed, Pauli a,
                                   Pauli b) {
  const auto h = build_heisenberg_1d(n, random_fields(n, seed));
  CommutatorProbe probe(h.full_sum(0.5));
  return probe.commutator_norm(t, a_site, a, b_site, b);
}

}  // namespace lrblocks::oracle
