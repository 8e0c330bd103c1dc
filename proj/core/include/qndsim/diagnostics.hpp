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

#include <functional>
#include <string>
#include <string_view>

namespace qndsim {

/// Validity warnings (weak-coupling limits, clamping) go through a single
/// process-wide sink. The default writes to stderr; tests swap it out.
using DiagnosticSink = std::function<void(std::string_view)>;

/// Installs `sink` and returns the previous one. Passing an empty function
/// restores the stderr default.
DiagnosticSink set_diagnostic_sink(DiagnosticSink sink);

void warn(std::string_view message);

/// RAII capture of warnings, mostly for tests.
class ScopedDiagnostics {
 public:
  explicit ScopedDiagnostics(DiagnosticSink sink) : previous_(set_diagnostic_sink(std::move(sink))) {}
  ~ScopedDiagnostics() { set_diagnostic_sink(std::move(previous_)); }
  ScopedDiagnostics(const ScopedDiagnostics&) = delete;
  ScopedDiagnostics& operator=(const ScopedDiagnostics&) = delete;

 private:
  DiagnosticSink previous_;
};

}  // namespace qndsim
