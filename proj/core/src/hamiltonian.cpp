// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ptscan/hamiltonian.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "json.hpp"
#include "ptscan/errors.hpp"

namespace ptscan {

using nlohmann::json;

namespace {

constexpr cplx kI{0.0, 1.0};

ModeSpec oscillator_mode(std::size_t index, double alpha, double kappa = 0.5) {
  return ModeSpec{index, alpha, kappa, BasisKind::oscillator, 1.0};
}

HamiltonianSpec coupled(std::string name, std::vector<double> alphas, std::vector<int> exponents) {
  HamiltonianSpec h;
  h.name = std::move(name);
  for (std::size_t i = 0; i < alphas.size(); ++i) h.modes.push_back(oscillator_mode(i, alphas[i]));
  h.terms.push_back(MonomialTerm{TermKind::position, kI, std::move(exponents), 0});
  h.coupling_term = 0;
  return h;
}

BasisKind basis_from_string(const std::string& s) {
  if (s == "oscillator") return BasisKind::oscillator;
  if (s == "fourier-sine-periodic" || s == "fourier_sine") return BasisKind::fourier_sine;
  if (s == "sine-box" || s == "sine_box") return BasisKind::sine_box;
  throw DomainError("unknown basis kind '" + s + "'");
}

TermKind term_from_string(const std::string& s) {
  if (s == "position") return TermKind::position;
  if (s == "momentum") return TermKind::momentum;
  if (s == "cosine") return TermKind::cosine;
  throw DomainError("unknown term kind '" + s + "'");
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw DomainError("complex values are [re, im] pairs");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

int MonomialTerm::total_degree() const {
  switch (kind) {
    case TermKind::position:
      return std::accumulate(exponents.begin(), exponents.end(), 0);
    case TermKind::momentum:
      return 2;
    case TermKind::cosine:
      return 0;
  }
  return 0;
}

bool HamiltonianSpec::is_trigonometric() const {
  for (const auto& m : modes) {
    if (m.basis != BasisKind::oscillator) return true;
  }
  return false;
}

void check_well_formed(const HamiltonianSpec& spec) {
  if (spec.modes.empty()) throw DomainError("spec '" + spec.name + "' has no modes");
  for (std::size_t i = 0; i < spec.modes.size(); ++i) {
    const auto& m = spec.modes[i];
    if (m.index != i) throw DomainError("mode indices must be 0..d-1 in order");
    if (!(m.quad_coeff >= 0.0) || !(m.kinetic_coeff > 0.0)) {
      throw DomainError("mode " + std::to_string(i) + ": need quad_coeff >= 0 and kinetic_coeff > 0");
    }
    if (m.basis == BasisKind::oscillator && !(m.quad_coeff > 0.0)) {
      throw DomainError("mode " + std::to_string(i) + ": oscillator basis needs quad_coeff > 0");
    }
    if (m.basis == BasisKind::sine_box && !(m.half_width > 0.0)) {
      throw DomainError("mode " + std::to_string(i) + ": sine-box half_width must be positive");
    }
  }
  for (std::size_t t = 0; t < spec.terms.size(); ++t) {
    const auto& term = spec.terms[t];
    const std::string where = "term " + std::to_string(t) + ": ";
    switch (term.kind) {
      case TermKind::position:
        if (term.exponents.size() != spec.modes.size()) {
          throw DomainError(where + "exponent count differs from mode count");
        }
        for (int k : term.exponents) {
          if (k < 0) throw DomainError(where + "negative exponent");
        }
        break;
      case TermKind::momentum:
      case TermKind::cosine:
        if (term.mode >= spec.modes.size()) throw DomainError(where + "mode index out of range");
        if (!term.exponents.empty()) throw DomainError(where + "momentum/cosine terms carry no exponents");
        if (term.kind == TermKind::cosine && spec.modes[term.mode].basis != BasisKind::fourier_sine) {
          throw DomainError(where + "cosine term needs the fourier-sine-periodic basis");
        }
        break;
    }
  }
  if (spec.terms.empty() ? spec.coupling_term != 0 : spec.coupling_term >= spec.terms.size()) {
    throw DomainError("coupling_term index out of range");
  }
}

std::vector<std::string> preset_names() { return {"E1", "E2", "E3", "E4", "E10", "E11", "E12"}; }

HamiltonianSpec preset(std::string_view name) {
  if (name == "E1") return coupled("E1", {0.5, 0.5}, {2, 1});
  if (name == "E2") return coupled("E2", {0.5, 1.0}, {2, 1});
  if (name == "E3") return coupled("E3", {0.5, 0.5, 0.5}, {1, 1, 1});
  if (name == "E4") return coupled("E4", {0.5, 1.0, 1.5}, {1, 1, 1});
  if (name == "E10") {
    // -d^2/dtheta^2 + i g cos(theta), odd 2pi-periodic eigenfunctions.
    HamiltonianSpec h;
    h.name = "E10";
    h.modes.push_back(ModeSpec{0, 0.0, 1.0, BasisKind::fourier_sine, 1.0});
    h.terms.push_back(MonomialTerm{TermKind::cosine, kI, {}, 0});
    return h;
  }
  if (name == "E11") {
    // -psi'' - i g x psi on |x| <= 1, psi(+-1) = 0.
    HamiltonianSpec h;
    h.name = "E11";
    h.modes.push_back(ModeSpec{0, 0.0, 1.0, BasisKind::sine_box, 1.0});
    h.terms.push_back(MonomialTerm{TermKind::position, -kI, {1}, 0});
    return h;
  }
  if (name == "E12") {
    // p^2 + x^2 + i x^3; the cubic term is the coupling with g = 1.
    HamiltonianSpec h;
    h.name = "E12";
    h.modes.push_back(oscillator_mode(0, 1.0, 1.0));
    h.terms.push_back(MonomialTerm{TermKind::position, kI, {3}, 0});
    h.default_coupling = 1.0;
    return h;
  }
  throw NotFoundError("unknown preset '" + std::string(name) + "'");
}

bool validate_pt(const HamiltonianSpec& spec) {
  for (const auto& m : spec.modes) {
    if (!std::isfinite(m.quad_coeff) || !std::isfinite(m.kinetic_coeff)) return false;
  }
  for (const auto& term : spec.terms) {
    const cplx c = term.coefficient;
    switch (term.kind) {
      case TermKind::momentum:
        if (c.imag() != 0.0) return false;
        break;
      case TermKind::cosine:
        if (c.real() != 0.0) return false;
        break;
      case TermKind::position:
        if (term.total_degree() % 2 == 0 ? c.imag() != 0.0 : c.real() != 0.0) return false;
        break;
    }
  }
  return true;
}

std::size_t sign_flip_mode(const HamiltonianSpec& spec) {
  if (spec.terms.empty()) return spec.modes.size();
  const auto& coupling = spec.terms[spec.coupling_term];
  if (coupling.kind != TermKind::position) return spec.modes.size();
  for (std::size_t m = 0; m < spec.modes.size(); ++m) {
    if (spec.modes[m].basis != BasisKind::oscillator) continue;
    if (coupling.exponents[m] % 2 == 0) continue;
    bool others_even = true;
    for (std::size_t t = 0; t < spec.terms.size(); ++t) {
      if (t == spec.coupling_term) continue;
      const auto& term = spec.terms[t];
      if (term.kind == TermKind::position && term.exponents[m] % 2 != 0) others_even = false;
      if (term.kind == TermKind::cosine && term.mode == m) others_even = false;
    }
    if (others_even) return m;
  }
  return spec.modes.size();
}

std::string_view to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::oscillator:
      return "oscillator";
    case BasisKind::fourier_sine:
      return "fourier-sine-periodic";
    case BasisKind::sine_box:
      return "sine-box";
  }
  return "?";
}

std::string_view to_string(TermKind kind) {
  switch (kind) {
    case TermKind::position:
      return "position";
    case TermKind::momentum:
      return "momentum";
    case TermKind::cosine:
      return "cosine";
  }
  return "?";
}

std::string to_json(const HamiltonianSpec& spec, int indent) {
  json j;
  j["name"] = spec.name;
  j["modes"] = json::array();
  for (const auto& m : spec.modes) {
    json jm{{"index", m.index},
            {"quad_coeff", m.quad_coeff},
            {"kinetic_coeff", m.kinetic_coeff},
            {"basis", std::string(to_string(m.basis))}};
    if (m.basis == BasisKind::sine_box) jm["half_width"] = m.half_width;
    j["modes"].push_back(std::move(jm));
  }
  j["terms"] = json::array();
  for (const auto& t : spec.terms) {
    json jt{{"kind", std::string(to_string(t.kind))}, {"coefficient", complex_to_json(t.coefficient)}};
    if (t.kind == TermKind::position) {
      jt["position_exponents"] = t.exponents;
    } else {
      jt["mode"] = t.mode;
    }
    j["terms"].push_back(std::move(jt));
  }
  j["coupling_term"] = spec.coupling_term;
  j["default_coupling"] = spec.default_coupling;
  return j.dump(indent);
}

HamiltonianSpec spec_from_json(std::string_view text) {
  HamiltonianSpec spec;
  try {
    const json j = json::parse(text);
    spec.name = j.value("name", std::string("custom"));
    for (const auto& jm : j.at("modes")) {
      ModeSpec m;
      m.index = jm.value("index", spec.modes.size());
      m.quad_coeff = jm.at("quad_coeff").get<double>();
      m.kinetic_coeff = jm.value("kinetic_coeff", 0.5);
      m.basis = basis_from_string(jm.value("basis", std::string("oscillator")));
      m.half_width = jm.value("half_width", 1.0);
      spec.modes.push_back(m);
    }
    for (const auto& jt : j.at("terms")) {
      MonomialTerm t;
      t.kind = term_from_string(jt.value("kind", std::string("position")));
      t.coefficient = complex_from_json(jt.at("coefficient"));
      if (t.kind == TermKind::position) {
        t.exponents = jt.at("position_exponents").get<std::vector<int>>();
      } else {
        t.mode = jt.at("mode").get<std::size_t>();
      }
      spec.terms.push_back(std::move(t));
    }
    spec.coupling_term = j.value("coupling_term", std::size_t{0});
    spec.default_coupling = j.value("default_coupling", 0.0);
  } catch (const json::exception& e) {
    throw DomainError(std::string("malformed Hamiltonian JSON: ") + e.what());
  }
  check_well_formed(spec);
  return spec;
}

std::array<cplx, 4> two_by_two_entries(const TwoByTwoSpec& spec) {
  return {std::polar(spec.r, spec.theta), cplx{spec.s, 0.0}, cplx{spec.s, 0.0},
          std::polar(spec.r, -spec.theta)};
}

std::pair<cplx, cplx> eigs_2x2(const TwoByTwoSpec& spec) {
  const double x = spec.r * std::sin(spec.theta);
  const double disc = spec.s * spec.s - x * x;
  const double center = spec.r * std::cos(spec.theta);
  const cplx root = std::sqrt(cplx{disc, 0.0});
  return {center + root, center - root};
}

bool two_by_two_unbroken(const TwoByTwoSpec& spec) {
  const double x = spec.r * std::sin(spec.theta);
  return spec.s * spec.s >= x * x;
}

}  // namespace ptscan
