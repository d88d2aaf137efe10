#include "lrblocks/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace lrblocks {

// -------------------------------------------------------------------- Lattice

Lattice::Lattice(int dimension, std::vector<std::array<double, 2>> coords, Boundary boundary,
                 std::array<double, 2> extent)
    : dimension_(dimension), coords_(std::move(coords)), boundary_(boundary), extent_(extent) {
  if (dimension_ != 1 && dimension_ != 2) throw std::invalid_argument("lattice dimension must be 1 or 2");
  if (boundary_ == Boundary::periodic) {
    for (int a = 0; a < dimension_; ++a) {
      if (!(extent_[static_cast<std::size_t>(a)] > 0.0)) throw std::invalid_argument("periodic lattice needs a positive extent");
    }
  }
  double nearest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < size(); ++i) {
    for (int j = i + 1; j < size(); ++j) {
      const double d = raw_distance(i, j);
      if (d < 1e-12) throw std::invalid_argument("lattice sites must have distinct coordinates");
      nearest = std::min(nearest, d);
    }
  }
  scale_ = std::isfinite(nearest) ? 1.0 / nearest : 1.0;
}

Lattice Lattice::chain(int n, Boundary boundary) {
  if (n <= 0) throw std::invalid_argument("chain needs at least one site");
  std::vector<std::array<double, 2>> c(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = {static_cast<double>(i), 0.0};
  return Lattice(1, std::move(c), boundary, {static_cast<double>(n), 0.0});
}

Lattice Lattice::grid(int width, int height, Boundary boundary) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("grid needs positive extents");
  std::vector<std::array<double, 2>> c;
  c.reserve(static_cast<std::size_t>(width * height));
  for (int r = 0; r < height; ++r) {
    for (int col = 0; col < width; ++col) c.push_back({static_cast<double>(col), static_cast<double>(r)});
  }
  return Lattice(2, std::move(c), boundary, {static_cast<double>(width), static_cast<double>(height)});
}

double Lattice::raw_distance(int i, int j) const {
  double acc = 0.0;
  for (int a = 0; a < 2; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    double d = std::abs(coords_[static_cast<std::size_t>(i)][ua] - coords_[static_cast<std::size_t>(j)][ua]);
    if (boundary_ == Boundary::periodic && a < dimension_) d = std::min(d, extent_[ua] - d);
    acc += d * d;
  }
  return std::sqrt(acc);
}

double Lattice::distance(int i, int j) const { return scale_ * raw_distance(i, j); }

double Lattice::distance(const std::vector<int>& a, const std::vector<int>& b) const {
  double best = std::numeric_limits<double>::infinity();
  for (int i : a) {
    for (int j : b) best = std::min(best, distance(i, j));
  }
  return best;
}

double Lattice::diameter(const std::vector<int>& sites) const {
  double best = 0.0;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    for (std::size_t j = i + 1; j < sites.size(); ++j) best = std::max(best, distance(sites[i], sites[j]));
  }
  return best;
}

int Lattice::max_sites_per_unit_ball() const {
  int best = 0;
  for (int i = 0; i < size(); ++i) {
    int count = 0;
    for (int j = 0; j < size(); ++j) count += distance(i, j) <= 1.0 + 1e-9 ? 1 : 0;
    best = std::max(best, count);
  }
  return best;
}

// ------------------------------------------------------------------ LocalTerm

Matrix LocalTerm::local_matrix() const { return materialize(op.restricted_to(support)); }

double LocalTerm::norm() const {
  double peak = 1.0;
  if (profile) {
    peak = 0.0;
    constexpr int samples = 257;
    for (int k = 0; k < samples; ++k) {
      const double x = profile->domain.lo + (profile->domain.hi - profile->domain.lo) * k / (samples - 1);
      peak = std::max(peak, std::abs(cheb::evaluate(*profile, x)));
    }
  }
  return peak * spectral_norm(local_matrix());
}

double LocalTerm::coefficient_at(double t) const {
  if (!profile) return 1.0;
  const double x = std::clamp(t, profile->domain.lo, profile->domain.hi);
  return cheb::evaluate(*profile, x);
}

// --------------------------------------------------------- LatticeHamiltonian

LatticeHamiltonian::LatticeHamiltonian(Lattice lattice, std::vector<TimeSlice> slices)
    : lattice_(std::move(lattice)), slices_(std::move(slices)) {
  for (auto& s : slices_) {
    for (auto& term : s.terms) {
      std::sort(term.support.begin(), term.support.end());
      term.support.erase(std::unique(term.support.begin(), term.support.end()), term.support.end());
      if (term.op.n_qubits() != lattice_.size()) throw std::invalid_argument("term register does not match the lattice");
      for (int q : term.support) {
        if (q < 0 || q >= lattice_.size()) throw std::out_of_range("term support outside the lattice");
      }
      for (int q : term.op.support()) {
        if (!std::binary_search(term.support.begin(), term.support.end(), q)) {
          throw std::invalid_argument("term operator acts outside its declared support");
        }
      }
    }
  }
}

const std::vector<LocalTerm>& LatticeHamiltonian::terms_at(double t) const {
  if (slices_.empty()) throw std::out_of_range("Hamiltonian has no time slices");
  for (const auto& s : slices_) {
    if (t <= s.t_end) return s.terms;
  }
  return slices_.back().terms;
}

std::vector<const LocalTerm*> LatticeHamiltonian::all_terms() const {
  std::vector<const LocalTerm*> out;
  for (const auto& s : slices_) {
    for (const auto& t : s.terms) out.push_back(&t);
  }
  return out;
}

OperatorSum LatticeHamiltonian::restricted_sum(double t, const std::vector<int>& region) const {
  std::vector<int> sorted = region;
  std::sort(sorted.begin(), sorted.end());
  OperatorSum out(n_sites());
  for (const auto& term : terms_at(t)) {
    if (std::includes(sorted.begin(), sorted.end(), term.support.begin(), term.support.end())) {
      out.add(term.op, term.coefficient_at(t));
    }
  }
  return out;
}

OperatorSum LatticeHamiltonian::full_sum(double t) const {
  OperatorSum out(n_sites());
  for (const auto& term : terms_at(t)) out.add(term.op, term.coefficient_at(t));
  return out;
}

LatticeHamiltonian LatticeHamiltonian::scaled(double factor) const {
  std::vector<TimeSlice> slices = slices_;
  for (auto& s : slices) {
    for (auto& term : s.terms) term.op = term.op.scaled(factor);
  }
  return LatticeHamiltonian(lattice_, std::move(slices));
}

LatticeHamiltonian LatticeHamiltonian::with_horizon(double horizon) const {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (slices_.empty()) throw std::invalid_argument("Hamiltonian has no terms to repeat");
  const int count = std::max(1, static_cast<int>(std::ceil(horizon - 1e-12)));
  std::vector<TimeSlice> slices;
  for (int k = 0; k < count; ++k) {
    TimeSlice s;
    s.t_start = horizon * k / count;
    s.t_end = k + 1 == count ? horizon : horizon * (k + 1) / count;
    s.terms = slices_.front().terms;
    slices.push_back(std::move(s));
  }
  return LatticeHamiltonian(lattice_, std::move(slices));
}

// ------------------------------------------------------------------ builders

LatticeHamiltonian build_heisenberg_1d(int n, const std::vector<double>& z_fields, double horizon) {
  if (n < 2) throw std::invalid_argument("Heisenberg chain needs at least 2 sites");
  if (static_cast<int>(z_fields.size()) != n) throw std::invalid_argument("need one field per site");
  TimeSlice slice;
  slice.t_start = 0.0;
  slice.t_end = 1.0;
  for (int j = 0; j + 1 < n; ++j) {
    LocalTerm term;
    term.support = {j, j + 1};
    term.op = OperatorSum(n);
    for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) term.op.add(1.0, PauliString(n, {{j, p}, {j + 1, p}}));
    if (z_fields[static_cast<std::size_t>(j)] != 0.0) {
      term.op.add(z_fields[static_cast<std::size_t>(j)], PauliString(n, {{j, Pauli::Z}}));
    }
    if (j + 2 == n && z_fields[static_cast<std::size_t>(n - 1)] != 0.0) {
      term.op.add(z_fields[static_cast<std::size_t>(n - 1)], PauliString(n, {{n - 1, Pauli::Z}}));
    }
    slice.terms.push_back(std::move(term));
  }
  LatticeHamiltonian h(Lattice::chain(n), {std::move(slice)});
  return h.with_horizon(horizon);
}

std::vector<double> random_fields(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> z(static_cast<std::size_t>(std::max(n, 0)));
  for (auto& v : z) v = dist(rng);
  return z;
}

// -------------------------------------------------------------- bound inputs

namespace {
bool intersects(const std::vector<int>& a, const std::vector<int>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j) ++i; else ++j;
  }
  return false;
}
}  // namespace

BoundInputs extract_bound_inputs(const LatticeHamiltonian& h, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
  BoundInputs in;
  in.mu = mu;
  const int n = h.n_sites();
  for (const auto& slice : h.slices()) {
    const auto& terms = slice.terms;
    std::vector<double> norms(terms.size());
    for (std::size_t k = 0; k < terms.size(); ++k) norms[k] = terms[k].norm();

    std::vector<double> zeta0_site(static_cast<std::size_t>(n), 0.0);
    std::vector<double> zeta_site(static_cast<std::size_t>(n), 0.0);
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const auto& sup = terms[k].support;
      const double size = static_cast<double>(sup.size());
      const double diam = h.lattice().diameter(sup);
      for (int p : sup) {
        zeta0_site[static_cast<std::size_t>(p)] += size * norms[k];
        zeta_site[static_cast<std::size_t>(p)] += norms[k] * size * size * std::exp(mu * diam);
      }
      in.max_term_norm = std::max(in.max_term_norm, norms[k]);
    }
    for (int p = 0; p < n; ++p) {
      in.zeta0 = std::max(in.zeta0, zeta0_site[static_cast<std::size_t>(p)]);
      in.zeta = std::max(in.zeta, zeta_site[static_cast<std::size_t>(p)]);
    }

    for (std::size_t a = 0; a < terms.size(); ++a) {
      int neighbours = 0;
      for (std::size_t b = 0; b < terms.size(); ++b) {
        if (a == b || !intersects(terms[a].support, terms[b].support)) continue;
        ++neighbours;
        if (b < a) continue;
        double c = commutator_norm(terms[a].op, terms[b].op);
        // Profiles scale the commutator by the product of their peaks.
        const double peak_a = norms[a] > 0 ? norms[a] / spectral_norm(terms[a].local_matrix()) : 0.0;
        const double peak_b = norms[b] > 0 ? norms[b] / spectral_norm(terms[b].local_matrix()) : 0.0;
        c *= peak_a * peak_b;
        in.K = std::max(in.K, c);
        if (norms[a] > 0.0 && norms[b] > 0.0) in.eta = std::max(in.eta, std::min(2.0, c / (norms[a] * norms[b])));
      }
      in.degree = std::max(in.degree, neighbours);
    }
  }
  return in;
}

// ---------------------------------------------------------------- validation

ValidationReport validate(const LatticeHamiltonian& h, int density_cap) {
  ValidationReport r;
  r.metric_scale = h.lattice().metric_scale();
  r.max_sites_per_unit_ball = h.lattice().max_sites_per_unit_ball();
  if (r.max_sites_per_unit_ball > density_cap) {
    std::ostringstream m;
    m << "density: a unit ball holds " << r.max_sites_per_unit_ball << " sites (cap " << density_cap << ")";
    r.violations.push_back(m.str());
  }

  const auto& slices = h.slices();
  for (std::size_t s = 0; s < slices.size(); ++s) {
    const auto& sl = slices[s];
    std::ostringstream m;
    if (s == 0 && std::abs(sl.t_start) > 1e-12) m << "slices: first slice starts at " << sl.t_start << ", not 0";
    else if (!(sl.t_end > sl.t_start)) m << "slices: slice " << s << " is empty or reversed";
    else if (s > 0 && std::abs(sl.t_start - slices[s - 1].t_end) > 1e-12) m << "slices: gap or overlap before slice " << s;
    else if (sl.t_end - sl.t_start > 1.0 + 1e-12) m << "slices: slice " << s << " is longer than 1";
    if (!m.str().empty()) r.violations.push_back(m.str());
  }

  for (std::size_t s = 0; s < slices.size(); ++s) {
    for (std::size_t k = 0; k < slices[s].terms.size(); ++k) {
      const auto& term = slices[s].terms[k];
      const double diam = h.lattice().diameter(term.support);
      if (diam > 1.0 + 1e-9) {
        std::ostringstream m;
        m << "locality: term " << k << " of slice " << s << " has diameter " << diam;
        r.violations.push_back(m.str());
      }
      const double nrm = term.norm();
      r.max_term_norm = std::max(r.max_term_norm, nrm);
      if (nrm > 1.0 + 1e-12) {
        std::ostringstream m;
        m << "normalization: term " << k << " of slice " << s << " has norm " << nrm;
        r.violations.push_back(m.str());
        r.strong_terms.push_back({s, k, nrm});
      }
    }
  }
  if (r.max_term_norm > 1.0) r.suggested_rescale = 1.0 / r.max_term_norm;
  return r;
}

}  // namespace lrblocks
