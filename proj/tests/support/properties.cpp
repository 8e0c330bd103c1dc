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

#include "properties.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "qndsim/analytics.hpp"
#include "qndsim/decoherence.hpp"
#include "qndsim/ensemble.hpp"
#include "qndsim/measurement.hpp"
#include "qndsim/rng.hpp"
#include "qndsim/spin_state.hpp"
#include "qndsim/stats.hpp"
#include "qndsim/wigner.hpp"

namespace qndsim::testing {
namespace {

constexpr double kPi = std::numbers::pi;
using Rng = std::mt19937_64;

class Tally {
 public:
  explicit Tally(std::string name) { out_.name = std::move(name); }

  void check(bool ok, const std::string& what) {
    ++out_.cases;
    if (ok) return;
    if (out_.failures++ == 0) out_.first_failure = what;
  }
  // For properties whose unit of work is not a single boolean.
  void add_cases(std::uint64_t n) { out_.cases += n; }
  void fail(const std::string& what) {
    if (out_.failures++ == 0) out_.first_failure = what;
  }

  PropertyOutcome done() { return std::move(out_); }

 private:
  PropertyOutcome out_;
};

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

CollectiveState random_state(Rng& rng, int max_atoms = 300) {
  const int n = uniform_int(rng, 1, max_atoms);
  std::normal_distribution<double> normal;
  std::vector<Amplitude> c(static_cast<std::size_t>(n) + 1);
  for (auto& a : c) a = Amplitude(normal(rng), normal(rng));
  // Sometimes carve out zero tails to exercise the support window.
  if (uniform(rng, 0, 1) < 0.3 && c.size() > 2) {
    const auto cut = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(c.size()) / 2));
    std::fill(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(cut), Amplitude(0.0, 0.0));
  }
  return CollectiveState(n, std::move(c));
}

InterferometerParams random_params(Rng& rng) {
  return InterferometerParams(uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 0.2));
}

double norm_error(const CollectiveState& s) { return std::abs(s.norm_squared() - 1.0); }

// ---------------------------------------------------------------------------

PropertyOutcome normalization(std::uint64_t seed) {
  Rng rng(seed);
  Tally t("normalization");
  for (int i = 0; i < 2000; ++i) {
    CollectiveState s = random_state(rng);
    const int op = i % 4;
    try {
      if (op == 0) {
        s = apply_detection(s, random_params(rng), {uniform(rng, -kPi, kPi)});
      } else if (op == 1) {
        const double a = uniform(rng, -3, 3);
        s = apply_diagonal_kernel(s, [a](double n) { return std::polar(1.0 + n * n, a * n); });
      } else if (op == 2) {
        std::vector<double> w(s.dimension());
        for (auto& x : w) x = uniform(rng, -700, 0);
        s = reweight(s, w);
      } else {
        s = css_init(s.n_atoms());
      }
    } catch (const DegenerateKernel&) {
      continue;  // a numerically annihilated random state carries no check
    }
    t.check(norm_error(s) < 1e-12 && s.dimension() == static_cast<std::size_t>(s.n_atoms()) + 1,
            fmt::format("op {} N={} norm error {:.3e}", op, s.n_atoms(), norm_error(s)));
  }
  return t.done();
}

PropertyOutcome css_symmetry(std::uint64_t seed) {
  Rng rng(seed);
  Tally t("css_symmetry");
  for (int i = 0; i < 1000; ++i) {
    const int n = i % 2 == 0 ? uniform_int(rng, 1, 200) : uniform_int(rng, 1, 10000);
    const CollectiveState s = css_init(n);
    const auto c = s.amplitudes();
    bool mirror = true;
    for (std::size_t k = 0; k < c.size(); ++k) mirror = mirror && c[k] == c[c.size() - 1 - k];
    const auto m = moments(s);
    const double quarter = 0.25 * n;
    t.check(mirror && std::abs(m.mean_jz) < 1e-12 &&
                std::abs(m.var_jz - quarter) <= 1e-11 * quarter && norm_error(s) < 1e-12,
            fmt::format("N={} mirror={} mean={:.3e} var={:.17g}", n, mirror, m.mean_jz, m.var_jz));
  }
  return t.done();
}

PropertyOutcome kernel_support(std::uint64_t seed) {
  Rng rng(seed);
  Tally t("kernel_support");
  for (int i = 0; i < 1000; ++i) {
    const CollectiveState s = random_state(rng, 100);
    std::vector<double> k(s.dimension());
    for (auto& x : k) x = uniform(rng, 0, 1) < 0.2 ? 0.0 : uniform(rng, 0.0, 2.0);
    const auto base = static_cast<double>(s.n_atoms()) / 2.0;
    CollectiveState out = s;
    try {
      out = apply_diagonal_kernel(s, [&](double n) {
        return Amplitude(k[static_cast<std::size_t>(std::lround(n + base))], 0.0);
      });
    } catch (const DegenerateKernel&) {
      t.check(true, "");
      continue;
    }
    bool inside = true;
    for (std::size_t j = 0; j < s.dimension(); ++j) {
      if (s.amplitudes()[j] == Amplitude(0.0, 0.0)) {
        inside = inside && out.amplitudes()[j] == Amplitude(0.0, 0.0);
      }
    }
    t.check(inside && out.support_begin() >= s.support_begin() &&
                out.support_end() <= s.support_end(),
            fmt::format("case {} grew the support", i));
  }
  return t.done();
}

PropertyOutcome pdf_nonnegative(std::uint64_t seed) {
  Rng rng(seed);
  Tally t("pdf_nonnegative");
  for (int i = 0; i < 1000; ++i) {
    const CollectiveState s = random_state(rng);
    const auto params = random_params(rng);
    const double x = uniform(rng, -kPi, kPi);
    const double p = phase_pdf(s, params, x);
    t.check(p >= 0.0 && std::isfinite(p), fmt::format("P({})={}", x, p));
  }
  return t.done();
}

PropertyOutcome cdf_monotone(std::uint64_t seed) {
  Rng rng(seed);
  Tally t("cdf_monotone");
  for (int i = 0; i < 1000; ++i) {
    const CollectiveState s = random_state(rng);
    const auto dist = PhaseDistribution::of(s, random_params(rng));
    double a = uniform(rng, -kPi, kPi);
    double b = i % 5 == 0 ? std::nextafter(a, 4.0) : uniform(rng, -kPi, kPi);
    if (a > b) std::swap(a, b);
    const bool ends = std::abs(dist.cdf(-kPi)) < 1e-12 && std::abs(dist.cdf(kPi) - 1.0) < 1e-12;
    t.check(dist.cdf(a) <= dist.cdf(b) + 1e-15 && ends,
            fmt::format("F({})={:.17g} > F({})={:.17g}", a, dist.cdf(a), b, dist.cdf(b)));
  }
  return t.done();
}

PropertyOutcome sampler_inverse(std::uint64_t seed) {
  Rng rng(seed);
  Tally t("sampler_inverse");
  for (int i = 0; i < 1000; ++i) {
    const CollectiveState s = random_state(rng);
    const auto params = random_params(rng);
    const auto dist = PhaseDistribution::of(s, params);
    const double u = uniform(rng, 0.0, 1.0);
    const double x = dist.sample(u).phase;
    // |F(x) - u| is bounded by the bracket width times the largest density.
    const double bound = kPhaseTolerance * (1.0 + params.contrast()) / (2.0 * kPi) + 1e-15;
    t.check(x >= -kPi && x < kPi && std::abs(dist.cdf(x) - u) <= bound,
            fmt::format("u={} x={} F(x)={}", u, x, dist.cdf(x)));
  }
  return t.done();
}

PropertyOutcome sampler_ks(std::uint64_t seed) {
  Rng rng(seed);
  Tally t("sampler_ks");
  constexpr int kSamples = 100000;
  const std::array<CollectiveState, 3> states = {
      CollectiveState::dicke(4, 0), css_init(200), random_state(rng, 60)};
  const std::array<InterferometerParams, 3> params = {
      InterferometerParams(0.5, 0.0), InterferometerParams(0.5, 0.02),
      InterferometerParams(0.1, 0.3)};
  for (std::size_t j = 0; j < states.size(); ++j) {
    const auto dist = PhaseDistribution::of(states[j], params[j]);
    TrajectoryRng stream(seed, j);
    std::vector<double> xs(kSamples);
    for (auto& x : xs) x = dist.sample(stream.uniform()).phase;
    const auto fit = stats::ks_test(xs, [&](double x) { return dist.cdf(x); });
    t.add_cases(kSamples);
    if (!(fit.p_value > 1e-3)) {
      t.fail(fmt::format("state {}: D={} p={}", j, fit.statistic, fit.p_value));
    }
  }
  return t.done();
}

PropertyOutcome martingale(std::uint64_t seed) {
  Rng rng(seed);
  Tally t("martingale");
  constexpr int kDraws = 4000;
  for (int j = 0; j < 3; ++j) {
    const CollectiveState prior = random_state(rng, 40);
    const InterferometerParams params(uniform(rng, 0.1, 0.5), 0.1);
    const HeterodyneProbe probe(prior.n_atoms(), params);
    const auto dist = probe.distribution(prior);
    TrajectoryRng stream(seed, 100 + j);
    std::vector<double> post(kDraws);
    for (auto& v : post) {
      CollectiveState s = prior;
      v = probe.detect(s, dist.sample(stream.uniform())).mean_jz;
    }
    double mean = 0.0;
    for (const double v : post) mean += v / kDraws;
    double var = 0.0;
    for (const double v : post) var += (v - mean) * (v - mean) / (kDraws - 1);
    const double se = std::sqrt(var / kDraws);
    const double target = moments(prior).mean_jz;
    t.add_cases(kDraws);
    if (std::abs(mean - target) > 3.0 * se + 1e-12) {
      t.fail(fmt::format("prior {} posterior mean {} (se {})", target, mean, se));
    }
  }
  return t.done();
}

PropertyOutcome product_form(std::uint64_t seed) {
  Rng rng(seed);
  Tally t("product_form");
  for (int i = 0; i < 1000; ++i) {
    const int n = uniform_int(rng, 1, 120);
    const InterferometerParams params(uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 0.05));
    const HeterodyneProbe probe(n, params);
    const int length = uniform_int(rng, 0, 100);
    CollectiveState seq = css_init(n);
    std::vector<double> phases;
    TrajectoryRng stream(seed, static_cast<std::uint64_t>(i));
    for (int k = 0; k < length; ++k) {
      const auto e = probe.distribution(seq).sample(stream.uniform());
      phases.push_back(e.phase);
      probe.detect(seq, e);
    }
    const auto prod = reweight(css_init(n), backaction_weights(params, phases, n));
    double worst = 0.0;
    for (std::size_t k = 0; k < seq.dimension(); ++k) {
      const double x = std::abs(seq.amplitudes()[k]);
      const double y = std::abs(prod.amplitudes()[k]);
      if (x != 0.0 || y != 0.0) worst = std::max(worst, std::abs(x - y) / std::max(x, y));
    }
    t.check(worst <= 1e-9, fmt::format("N={} length={} rel error {:.3e}", n, length, worst));
  }
  return t.done();
}

PropertyOutcome sixj_symmetry(std::uint64_t seed) {
  Rng rng(seed);
  Tally t("sixj_symmetry");
  int valid = 0;
  int invalid = 0;
  while (valid < 1000 || invalid < 200) {
    std::array<HalfInt, 6> j;
    for (auto& x : j) x = HalfInt::from_twice(uniform_int(rng, 0, 12));
    const double v = wigner_6j(j[0], j[1], j[2], j[3], j[4], j[5]);
    const bool ok = triangle(j[0], j[1], j[2]) && triangle(j[0], j[4], j[5]) &&
                    triangle(j[3], j[1], j[5]) && triangle(j[3], j[4], j[2]);
    if (!ok) {
      if (invalid++ < 200) t.check(v == 0.0, "non-triangular symbol is not exactly zero");
      continue;
    }
    if (valid++ >= 1000) continue;
    // Columns (j1 j4), (j2 j5), (j3 j6): any column permutation, and swapping
    // upper and lower entries in any two columns.
    std::array<int, 3> perm = {0, 1, 2};
    double worst = 0.0;
    do {
      const auto up = [&](int c) { return j[static_cast<std::size_t>(perm[c])]; };
      const auto lo = [&](int c) { return j[static_cast<std::size_t>(perm[c] + 3)]; };
      worst = std::max(worst, std::abs(wigner_6j(up(0), up(1), up(2), lo(0), lo(1), lo(2)) - v));
      worst = std::max(worst, std::abs(wigner_6j(lo(0), lo(1), up(2), up(0), up(1), lo(2)) - v));
      worst = std::max(worst, std::abs(wigner_6j(lo(0), up(1), lo(2), up(0), lo(1), up(2)) - v));
      worst = std::max(worst, std::abs(wigner_6j(up(0), lo(1), lo(2), lo(0), up(1), up(2)) - v));
    } while (std::next_permutation(perm.begin(), perm.end()));
    t.check(worst <= 1e-12, fmt::format("{{{} {} {}; {} {} {}}} asymmetry {:.3e}", j[0].str(),
                                        j[1].str(), j[2].str(), j[3].str(), j[4].str(),
                                        j[5].str(), worst));
  }
  return t.done();
}

AtomicSpecies full_manifold_species(HalfInt i, HalfInt j, HalfInt jp) {
  AtomicSpecies s;
  s.name = "generated";
  s.nuclear_spin = i;
  s.j_ground = j;
  s.j_excited = jp;
  s.gamma_hz = 1e6;
  s.wavelength_m = 1e-6;
  for (int f = std::abs(i.twice() - j.twice()); f <= i.twice() + j.twice(); f += 2) {
    s.ground.push_back({HalfInt::from_twice(f), 1e9 * f});
  }
  for (int f = std::abs(i.twice() - jp.twice()); f <= i.twice() + jp.twice(); f += 2) {
    s.excited.push_back({HalfInt::from_twice(f), 1e7 * f});
  }
  return s;
}

PropertyOutcome sum_rule(std::uint64_t seed) {
  Rng rng(seed);
  std::uint64_t cases = 0;
  PropertyOutcome out{"sum_rule"};
  while (cases < 1000) {
    const HalfInt i = HalfInt::from_twice(uniform_int(rng, 0, 9));
    const HalfInt j = HalfInt::from_twice(uniform_int(rng, 1, 4));
    const int dj = uniform_int(rng, -1, 1);
    const HalfInt jp = HalfInt::from_twice(j.twice() + 2 * dj);
    if (jp.twice() < 0 || (j.twice() == 0 && jp.twice() == 0)) continue;
    const AtomicSpecies species = full_manifold_species(i, j, jp);
    for (const auto& g : species.ground) {
      double sum = 0.0;
      bool nonnegative = true;
      for (const auto& [fp, s] : line_strengths(species, g.f)) {
        sum += s;
        nonnegative = nonnegative && s >= 0.0;
      }
      ++cases;
      ++out.cases;
      if (!(std::abs(sum - 1.0) <= 1e-12 && nonnegative) && out.failures++ == 0) {
        out.first_failure = fmt::format("I={} J={} J'={} F={}: sum {:.17g}", i.str(), j.str(),
                                        jp.str(), g.f.str(), sum);
      }
    }
  }
  return out;
}

PropertyOutcome balance_postcondition(std::uint64_t seed) {
  Rng rng(seed);
  Tally t("balance_postcondition");
  for (int c = 0; c < 1000; ++c) {
    AtomicSpecies s;
    s.name = "generated";
    s.nuclear_spin = HalfInt::from_twice(uniform_int(rng, 1, 7));
    s.j_ground = HalfInt::from_twice(1);
    s.j_excited = HalfInt::from_twice(uniform_int(rng, 0, 1) == 0 ? 1 : 3);
    s.gamma_hz = uniform(rng, 1e5, 1e7);
    s.wavelength_m = 780e-9;
    const double split = uniform(rng, 1e9, 1e10);
    const int f_lo = std::abs(s.nuclear_spin.twice() - 1);
    s.ground = {{HalfInt::from_twice(f_lo), -uniform(rng, 0.2, 0.8) * split},
                {HalfInt::from_twice(f_lo + 2), 0.0}};
    s.ground[1].energy_hz = s.ground[0].energy_hz + split;
    for (int f = std::abs(s.nuclear_spin.twice() - s.j_excited.twice());
         f <= s.nuclear_spin.twice() + s.j_excited.twice(); f += 2) {
      s.excited.push_back({HalfInt::from_twice(f), uniform(rng, -0.05, 0.05) * split});
    }
    try {
      const double probe = balance_detunings(s);
      const auto cl = coupling_and_lineshape(s, probe);
      const double s1 = cl.coupling.at(s.ground[0].f);
      const double s2 = cl.coupling.at(s.ground[1].f);
      t.check(std::abs(s1 + s2) / std::abs(s1) < 1e-9,
              fmt::format("case {}: |S1+S2|/|S1| = {:.3e}", c, std::abs(s1 + s2) / std::abs(s1)));
    } catch (const NoRoot& e) {
      t.check(false, fmt::format("case {}: {}", c, e.what()));
    }
  }
  return t.done();
}

PropertyOutcome decay_bound(std::uint64_t seed) {
  Rng rng(seed);
  Tally t("decay_bound");
  for (int i = 0; i < 1000; ++i) {
    const double mu = uniform(rng, 1e-3, 5.0);
    const double rho0 = std::exp(uniform(rng, std::log(1e-2), std::log(1e5)));
    const double eta = uniform(rng, 0.0, 1.0);
    const double xi2 = squeezing_with_decay(mu, rho0, eta);
    t.check(xi2 > 0.0 && xi2 <= 1.0 && squeezing_with_decay(mu, rho0, 0.0) == 1.0 &&
                squeezing_with_decay(mu, rho0, 1.0) == 1.0,
            fmt::format("mu={} rho0={} eta={} xi2={}", mu, rho0, eta, xi2));
  }
  return t.done();
}

PropertyOutcome theory_shape(std::uint64_t seed) {
  Rng rng(seed);
  Tally t("theory_shape");
  for (int i = 0; i < 1000; ++i) {
    const int n = uniform_int(rng, 1, 1000);
    const auto params = random_params(rng);
    const double np1 = uniform(rng, 0.0, 1e7);
    const double np2 = np1 + uniform(rng, 1.0, 1e7);
    const double xi1 = weak_coupling_theory(n, np1, params).xi_squared;
    const double xi2 = weak_coupling_theory(n, np2, params).xi_squared;
    const bool decreasing = params.contrast() == 0.0 || params.phi() == 0.0 ? xi2 == xi1 : xi2 < xi1;
    const bool start = weak_coupling_theory(n, 0.0, params).xi_squared == 1.0;
    const int m = uniform_int(rng, 1, 200);
    const bool center = subprocess_quantities(params, 0, m).n_l == 0.0;
    t.check(decreasing && start && center,
            fmt::format("N={} np={},{} xi2={},{} center={}", n, np1, np2, xi1, xi2, center));
  }
  return t.done();
}

PropertyOutcome worker_determinism(std::uint64_t seed) {
  Tally t("worker_determinism");
  EnsembleConfig config;
  config.n_atoms = 12;
  config.params = InterferometerParams(0.3, 0.05);
  config.n_photons = 300;
  config.n_trajectories = 1000;
  config.record_stride = 50;
  config.seed = seed;
  EnsembleOptions one;
  one.workers = 1;
  const RunResult reference = run_ensemble(config, one);
  for (const unsigned w : {2u, 3u, 8u}) {
    EnsembleOptions many;
    many.workers = w;
    const RunResult other = run_ensemble(config, many);
    bool same_hist = reference.histogram.size() == other.histogram.size();
    for (std::size_t k = 0; same_hist && k < reference.histogram.size(); ++k) {
      same_hist = reference.histogram[k].count == other.histogram[k].count;
    }
    const bool same_series =
        reference.mean_var_jz == other.mean_var_jz && reference.mean_mean_jz == other.mean_mean_jz;
    for (std::uint64_t i = 0; i < config.n_trajectories; ++i) {
      const auto& a = reference.trajectories[i].series;
      const auto& b = other.trajectories[i].series;
      bool same = a.size() == b.size();
      for (std::size_t r = 0; same && r < a.size(); ++r) {
        same = a[r].step == b[r].step && a[r].mean_jz == b[r].mean_jz && a[r].var_jz == b[r].var_jz;
      }
      t.check(same && same_hist && same_series,
              fmt::format("trajectory {} differs with {} workers", i, w));
    }
  }
  return t.done();
}

}  // namespace

const std::vector<Property>& all_properties() {
  static const std::vector<Property> properties = {
      {"normalization", normalization},
      {"css_symmetry", css_symmetry},
      {"kernel_support", kernel_support},
      {"pdf_nonnegative", pdf_nonnegative},
      {"cdf_monotone", cdf_monotone},
      {"sampler_inverse", sampler_inverse},
      {"sampler_ks", sampler_ks},
      {"martingale", martingale},
      {"product_form", product_form},
      {"sixj_symmetry", sixj_symmetry},
      {"sum_rule", sum_rule},
      {"balance_postcondition", balance_postcondition},
      {"decay_bound", decay_bound},
      {"theory_shape", theory_shape},
      {"worker_determinism", worker_determinism},
  };
  return properties;
}

PropertyOutcome run_property(const std::string& name, std::uint64_t seed) {
  for (const auto& p : all_properties()) {
    if (p.name == name) return p.run(seed);
  }
  throw std::invalid_argument("unknown property " + name);
}

}  // namespace qndsim::testing
