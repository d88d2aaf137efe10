#include "lrblocks/lattice.hpp"

#include <json.hpp>

#include <cmath>
#include <set>

namespace lrblocks {

using nlohmann::json;

namespace {

void require_fields(const json& obj, std::initializer_list<const char*> allowed,
                    std::initializer_list<const char*> required, const std::string& where) {
  if (!obj.is_object()) throw std::invalid_argument(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key)) throw std::invalid_argument(where + ": unknown field '" + key + "'");
  }
  for (const char* key : required) {
    if (!obj.contains(key)) throw std::invalid_argument(where + ": missing field '" + std::string(key) + "'");
  }
}

}  // namespace

LatticeHamiltonian hamiltonian_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("hamiltonian: malformed JSON: ") + e.what());
  }
  require_fields(doc, {"n", "dimension", "boundary", "terms", "slices"}, {"n", "terms"}, "hamiltonian");

  const int n = doc.at("n").get<int>();
  if (n <= 0) throw std::invalid_argument("hamiltonian: n must be positive");
  const int dimension = doc.value("dimension", 1);
  const std::string boundary_name = doc.value("boundary", std::string("open"));
  Boundary boundary;
  if (boundary_name == "open") boundary = Boundary::open;
  else if (boundary_name == "periodic") boundary = Boundary::periodic;
  else throw std::invalid_argument("hamiltonian: boundary must be 'open' or 'periodic'");

  Lattice lattice;
  if (dimension == 1) {
    lattice = Lattice::chain(n, boundary);
  } else if (dimension == 2) {
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    if (side * side != n) throw std::invalid_argument("hamiltonian: 2D input needs a square number of sites");
    lattice = Lattice::grid(side, side, boundary);
  } else {
    throw std::invalid_argument("hamiltonian: dimension must be 1 or 2");
  }

  std::vector<LocalTerm> terms;
  for (const auto& jt : doc.at("terms")) {
    require_fields(jt, {"support", "paulis"}, {"support", "paulis"}, "hamiltonian.terms[]");
    LocalTerm term;
    term.support = jt.at("support").get<std::vector<int>>();
    term.op = OperatorSum(n);
    for (const auto& jp : jt.at("paulis")) {
      require_fields(jp, {"coeff", "string"}, {"coeff", "string"}, "hamiltonian.terms[].paulis[]");
      std::map<int, Pauli> factors;
      const auto& js = jp.at("string");
      if (!js.is_object()) throw std::invalid_argument("hamiltonian: Pauli string must be an object");
      for (const auto& [key, value] : js.items()) {
        std::size_t used = 0;
        int q = 0;
        try {
          q = std::stoi(key, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != key.size()) throw std::invalid_argument("hamiltonian: Pauli key '" + key + "' is not a site index");
        const auto label = value.get<std::string>();
        if (label.size() != 1) throw std::invalid_argument("hamiltonian: Pauli label must be one of X, Y, Z");
        factors[q] = pauli_from_char(label[0]);
      }
      term.op.add(jp.at("coeff").get<double>(), PauliString(n, std::move(factors)));
    }
    terms.push_back(std::move(term));
  }

  std::vector<TimeSlice> slices;
  if (doc.contains("slices")) {
    for (const auto& js : doc.at("slices")) {
      require_fields(js, {"t0", "t1"}, {"t0", "t1"}, "hamiltonian.slices[]");
      TimeSlice s;
      s.t_start = js.at("t0").get<double>();
      s.t_end = js.at("t1").get<double>();
      s.terms = terms;
      slices.push_back(std::move(s));
    }
  }
  if (slices.empty()) slices.push_back(TimeSlice{0.0, 1.0, terms});
  return LatticeHamiltonian(std::move(lattice), std::move(slices));
}

std::string hamiltonian_to_json(const LatticeHamiltonian& h) {
  json doc;
  doc["n"] = h.n_sites();
  doc["dimension"] = h.lattice().dimension();
  doc["boundary"] = h.lattice().boundary() == Boundary::open ? "open" : "periodic";
  json terms = json::array();
  if (!h.slices().empty()) {
    for (const auto& term : h.slices().front().terms) {
      json jt;
      jt["support"] = term.support;
      json paulis = json::array();
      for (const auto& pt : term.op.terms()) {
        json js = json::object();
        for (const auto& [q, p] : pt.string.factors()) js[std::to_string(q)] = std::string(1, to_char(p));
        paulis.push_back({{"coeff", pt.coeff * pt.string.phase().real()}, {"string", js}});
      }
      jt["paulis"] = paulis;
      terms.push_back(jt);
    }
  }
  doc["terms"] = terms;
  json slices = json::array();
  for (const auto& s : h.slices()) slices.push_back({{"t0", s.t_start}, {"t1", s.t_end}});
  doc["slices"] = slices;
  return doc.dump(2);
}

}  // namespace lrblocks
