// Copyright 2026 The qndsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qndsim/decoherence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "qndsim/diagnostics.hpp"

namespace qndsim {
namespace {

constexpr double kPi = std::numbers::pi;

std::pair<double, double> manifold_span(const AtomicSpecies& species, const HyperfineLevel& g) {
  const auto strengths = line_strengths(species, g.f);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& e : species.excited) {
    if (strengths.at(e.f) <= 0.0) continue;
    lo = std::min(lo, e.energy_hz - g.energy_hz);
    hi = std::max(hi, e.energy_hz - g.energy_hz);
  }
  return {lo, hi};
}

double coupling_sum(const AtomicSpecies& species, double probe_hz) {
  const auto result = coupling_and_lineshape(species, probe_hz);
  return result.coupling.at(species.ground[0].f) + result.coupling.at(species.ground[1].f);
}

}  // namespace

std::map<HalfInt, double> line_strengths(const AtomicSpecies& species, HalfInt f) {
  const HalfInt one(1);
  std::map<HalfInt, double> out;
  for (const auto& e : species.excited) {
    const double sixj =
        wigner_6j(species.j_ground, species.j_excited, one, e.f, f, species.nuclear_spin);
    out[e.f] = (e.f.twice() + 1) * (species.j_ground.twice() + 1) * sixj * sixj;
  }
  return out;
}

Detunings detunings_at(const AtomicSpecies& species, double probe_frequency_hz) {
  Detunings out;
  for (const auto& g : species.ground) {
    for (const auto& e : species.excited) {
      out.push_back({g.f, e.f, probe_frequency_hz - (e.energy_hz - g.energy_hz)});
    }
  }
  return out;
}

CouplingAndLineshape coupling_and_lineshape(const AtomicSpecies& species,
                                            const Detunings& detunings) {
  CouplingAndLineshape out;
  std::map<HalfInt, std::map<HalfInt, double>> strengths;
  for (const auto& g : species.ground) {
    strengths[g.f] = line_strengths(species, g.f);
    out.coupling[g.f] = 0.0;
  }
  const double gamma = species.gamma_hz;
  for (const auto& line : detunings) {
    const double s = strengths.at(line.f).at(line.f_prime);
    if (s == 0.0) continue;
    const double delta = line.detuning_hz;
    const double denom = delta * delta + gamma * gamma;
    out.coupling[line.f] += gamma * delta / denom * s;
    out.lineshape += gamma * gamma / denom * s;
  }
  return out;
}

CouplingAndLineshape coupling_and_lineshape(const AtomicSpecies& species,
                                            double probe_frequency_hz) {
  return coupling_and_lineshape(species, detunings_at(species, probe_frequency_hz));
}

FrequencyWindow balance_window(const AtomicSpecies& species) {
  if (species.ground.size() != 2) {
    throw NoRoot("balancing needs exactly two ground levels");
  }
  auto a = manifold_span(species, species.ground[0]);
  auto b = manifold_span(species, species.ground[1]);
  if (a.first > b.first) std::swap(a, b);
  const double low = a.second + species.gamma_hz;
  const double high = b.first - species.gamma_hz;
  if (!(low < high)) throw NoRoot("the two ground-level line manifolds overlap");
  return {low, high};
}

double balance_detunings(const AtomicSpecies& species, FrequencyWindow window) {
  if (species.ground.size() != 2) throw NoRoot("balancing needs exactly two ground levels");
  double lo = window.low_hz;
  double hi = window.high_hz;
  double f_lo = coupling_sum(species, lo);
  const double f_hi = coupling_sum(species, hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if (std::signbit(f_lo) == std::signbit(f_hi)) {
    throw NoRoot(fmt::format("S1 + S2 does not change sign on [{:.6g}, {:.6g}] Hz", lo, hi));
  }
  const double tolerance = 1e-12 * std::max(std::abs(lo), std::abs(hi));
  for (int iter = 0; iter < 400 && hi - lo > tolerance; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = coupling_sum(species, mid);
    if (f_mid == 0.0) return mid;
    if (std::signbit(f_mid) == std::signbit(f_lo)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double balance_detunings(const AtomicSpecies& species) {
  return balance_detunings(species, balance_window(species));
}

void ProbeGeometry::validate() const {
  if (!(beam_area_m2 > 0.0)) throw std::invalid_argument("beam area must be positive");
  if (!(n_atoms > 0.0)) throw std::invalid_argument("atom number must be positive");
  if (!(std::abs(imbalance) <= 1.0)) throw std::invalid_argument("|imbalance| must be <= 1");
}

double resonant_optical_density(const AtomicSpecies& species, const ProbeGeometry& geometry) {
  geometry.validate();
  const double lambda = species.wavelength_m;
  return lambda * lambda * geometry.n_atoms / (4.0 * kPi * geometry.beam_area_m2);
}

double phase_per_atom(const AtomicSpecies& species, const ProbeGeometry& geometry,
                      double s_coupling) {
  geometry.validate();
  const double lambda = species.wavelength_m;
  return lambda * lambda * s_coupling / (2.0 * kPi * geometry.beam_area_m2);
}

OpticalDephasing optical_dephasing(const AtomicSpecies& species, const ProbeGeometry& geometry,
                                   double s1, double s2) {
  geometry.validate();
  const double lambda = species.wavelength_m;
  const double n1 = geometry.n_atoms * (1.0 + geometry.imbalance) / 2.0;
  const double n2 = geometry.n_atoms * (1.0 - geometry.imbalance) / 2.0;
  OpticalDephasing out;
  out.general = lambda * lambda / (4.0 * kPi * geometry.beam_area_m2) * (n1 * s1 + n2 * s2);
  out.balanced =
      resonant_optical_density(species, geometry) * 0.5 * (s1 - s2) * geometry.imbalance;
  return out;
}

double scattering_probability(double rho0, double n_atoms, double contrast, double n_photons,
                              double lineshape) {
  if (contrast > 0.3) {
    warn(fmt::format("scattering_probability: C = {:.3g} is outside the C << 1 limit", contrast));
  }
  const double eta = rho0 / n_atoms * contrast * contrast * n_photons / 2.0 * lineshape;
  if (eta > 1.0) {
    warn(fmt::format("scattering_probability: eta = {:.3g} > 1 clamped to 1", eta));
    return 1.0;
  }
  return eta;
}

double photons_for_eta(double eta, double rho0, double n_atoms, double contrast,
                       double lineshape) {
  return 2.0 * eta * n_atoms / (rho0 * contrast * contrast * lineshape);
}

double squeezing_with_decay(double mu, double rho0, double eta) {
  const double keep = (1.0 - eta) * (1.0 - eta);
  return keep / (1.0 + mu * rho0 * eta) + 1.0 - keep;
}

EtaOptimum optimize_eta(double mu, double rho0) {
  const double inv_golden = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0;
  double b = 1.0;
  double c = b - inv_golden * (b - a);
  double d = a + inv_golden * (b - a);
  double fc = squeezing_with_decay(mu, rho0, c);
  double fd = squeezing_with_decay(mu, rho0, d);
  while (b - a > 1e-6) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_golden * (b - a);
      fc = squeezing_with_decay(mu, rho0, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_golden * (b - a);
      fd = squeezing_with_decay(mu, rho0, d);
    }
  }
  const double eta = 0.5 * (a + b);
  return {eta, squeezing_with_decay(mu, rho0, eta)};
}

double snr(const SnrParams& p) {
  const double denom = p.n_carrier + p.n_sideband + p.n_electronic;
  if (!(denom > 0.0)) return 0.0;
  return std::sqrt(p.n_carrier * p.n_sideband / denom);
}

SqueezingBudget squeezing_budget(const AtomicSpecies& species, const ProbeGeometry& geometry) {
  SqueezingBudget budget;
  budget.probe_frequency_hz = balance_detunings(species);
  const auto cl = coupling_and_lineshape(species, budget.probe_frequency_hz);
  budget.s1 = cl.coupling.at(species.ground[0].f);
  budget.s2 = cl.coupling.at(species.ground[1].f);
  budget.s_coupling = budget.s1;
  budget.lineshape = cl.lineshape;
  budget.mu = budget.s_coupling * budget.s_coupling / budget.lineshape;
  budget.rho0 = resonant_optical_density(species, geometry);
  budget.phi = std::abs(phase_per_atom(species, geometry, budget.s_coupling));
  const auto best = optimize_eta(budget.mu, budget.rho0);
  budget.eta = best.eta;
  budget.xi_squared = best.xi_squared;
  return budget;
}

}  // namespace qndsim
