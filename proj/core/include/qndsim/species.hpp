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

#pragma once

#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qndsim/wigner.hpp"

namespace qndsim {

struct HyperfineLevel {
  HalfInt f;
  double energy_hz = 0.0;
};

/// Hyperfine structure of one optical line (e.g. an alkali D line).
///
/// Energies are frequency offsets (Hz) from an arbitrary common origin;
/// `gamma_hz` is the half-width at half-maximum of the Lorentzian response.
/// Ground levels are ordered: the first is population "1", the second "2".
struct AtomicSpecies {
  std::string name;
  HalfInt nuclear_spin;
  HalfInt j_ground;
  HalfInt j_excited;
  double gamma_hz = 0.0;
  double wavelength_m = 0.0;
  std::vector<HyperfineLevel> ground;
  std::vector<HyperfineLevel> excited;

  /// Throws std::invalid_argument when a level violates |J - I| <= F <= J + I,
  /// when F values repeat, or when gamma / wavelength are not positive.
  void validate() const;
};

/// Malformed species file. what() carries "source:line: field: reason".
class SpeciesParseError : public std::runtime_error {
 public:
  SpeciesParseError(const std::string& source, int line, const std::string& field,
                    const std::string& reason);

  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int line_;
  std::string field_;
};

/// Parses the `qndsim-species/1` key-value format:
///
///   format = qndsim-species/1
///   name = Rb87_D2
///   I = 3/2
///   J_ground = 1/2
///   J_excited = 3/2
///   gamma_Hz = 3.0333e6
///   lambda_m = 780.241209686e-9
///   ground_level = 1 -4.271676631815181e9     # F energy_Hz
///   excited_level = 3 193.7407e6
///
/// `#` starts a comment. Every scalar key is required exactly once; at least
/// one level of each kind is required.
AtomicSpecies parse_species(std::istream& in, const std::string& source = "<stream>");
AtomicSpecies load_species(const std::filesystem::path& path);

/// Rb-87 D2 line with standard reference level data (the same values as
/// data/rb87_d2.species).
AtomicSpecies rubidium87_d2();

}  // namespace qndsim
