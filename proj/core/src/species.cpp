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

#include "qndsim/species.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace qndsim {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

constexpr const char* kFormatTag = "qndsim-species/1";

}  // namespace

SpeciesParseError::SpeciesParseError(const std::string& source, int line, const std::string& field,
                                     const std::string& reason)
    : std::runtime_error(fmt::format("{}:{}: {}: {}", source, line, field, reason)),
      line_(line),
      field_(field) {}

void AtomicSpecies::validate() const {
  if (!(gamma_hz > 0.0)) throw std::invalid_argument("gamma_Hz must be positive");
  if (!(wavelength_m > 0.0)) throw std::invalid_argument("lambda_m must be positive");
  auto check = [&](const std::vector<HyperfineLevel>& levels, HalfInt j, const char* kind) {
    std::set<HalfInt> seen;
    for (const auto& level : levels) {
      if (!triangle(j, nuclear_spin, level.f)) {
        throw std::invalid_argument(fmt::format("{} level F={} violates |J-I| <= F <= J+I", kind,
                                                level.f.str()));
      }
      if (!seen.insert(level.f).second) {
        throw std::invalid_argument(fmt::format("{} level F={} listed twice", kind, level.f.str()));
      }
    }
  };
  check(ground, j_ground, "ground");
  check(excited, j_excited, "excited");
}

AtomicSpecies parse_species(std::istream& in, const std::string& source) {
  AtomicSpecies species;
  std::map<std::string, int> seen_scalar;
  bool format_seen = false;
  std::string raw;
  int line_no = 0;

  auto fail = [&](const std::string& field, const std::string& reason) {
    throw SpeciesParseError(source, line_no, field, reason);
  };
  auto number = [&](const std::string& field, const std::string& text) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      fail(field, "expected a number, got '" + text + "'");
    }
    return v;
  };
  auto momentum = [&](const std::string& field, const std::string& text) {
    try {
      return HalfInt::parse(text);
    } catch (const std::invalid_argument& e) {
      fail(field, e.what());
    }
    return HalfInt{};
  };

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("<line>", "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (value.empty()) fail(key, "missing value");

    if (key == "ground_level" || key == "excited_level") {
      std::istringstream fields(value);
      std::string f_text, e_text, extra;
      if (!(fields >> f_text >> e_text) || (fields >> extra)) {
        fail(key, "expected '<F> <energy_Hz>'");
      }
      HyperfineLevel level{momentum(key, f_text), number(key, e_text)};
      (key == "ground_level" ? species.ground : species.excited).push_back(level);
      continue;
    }

    if (++seen_scalar[key] > 1) fail(key, "duplicate key");
    if (key == "format") {
      if (value != kFormatTag) fail(key, fmt::format("unsupported format '{}'", value));
      format_seen = true;
    } else if (key == "name") {
      species.name = value;
    } else if (key == "I") {
      species.nuclear_spin = momentum(key, value);
    } else if (key == "J_ground") {
      species.j_ground = momentum(key, value);
    } else if (key == "J_excited") {
      species.j_excited = momentum(key, value);
    } else if (key == "gamma_Hz") {
      species.gamma_hz = number(key, value);
    } else if (key == "lambda_m") {
      species.wavelength_m = number(key, value);
    } else {
      fail(key, "unknown key");
    }
  }

  line_no = std::max(line_no, 1);
  if (!format_seen) fail("format", "missing (expected 'format = qndsim-species/1')");
  for (const char* required : {"name", "I", "J_ground", "J_excited", "gamma_Hz", "lambda_m"}) {
    if (!seen_scalar.count(required)) fail(required, "missing required key");
  }
  if (species.ground.empty()) fail("ground_level", "at least one ground level required");
  if (species.excited.empty()) fail("excited_level", "at least one excited level required");
  try {
    species.validate();
  } catch (const std::invalid_argument& e) {
    fail("<species>", e.what());
  }
  return species;
}

AtomicSpecies load_species(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpeciesParseError(path.string(), 0, "<file>", "cannot open file");
  return parse_species(in, path.string());
}

AtomicSpecies rubidium87_d2() {
  AtomicSpecies rb;
  rb.name = "Rb87_D2";
  rb.nuclear_spin = HalfInt::from_twice(3);
  rb.j_ground = HalfInt::from_twice(1);
  rb.j_excited = HalfInt::from_twice(3);
  rb.gamma_hz = 3.0333e6;
  rb.wavelength_m = 780.241209686e-9;
  rb.ground = {{HalfInt(1), -4.271676631815181e9}, {HalfInt(2), 2.563005979089109e9}};
  rb.excited = {{HalfInt(0), -302.0738e6},
                {HalfInt(1), -229.8518e6},
                {HalfInt(2), -72.9112e6},
                {HalfInt(3), 193.7407e6}};
  return rb;
}

}  // namespace qndsim
