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

#include "qndsim/diagnostics.hpp"

#include <cstdio>
#include <mutex>

namespace qndsim {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

DiagnosticSink& current_sink() {
  static DiagnosticSink sink;
  return sink;
}

}  // namespace

DiagnosticSink set_diagnostic_sink(DiagnosticSink sink) {
  std::lock_guard lock(sink_mutex());
  DiagnosticSink previous = std::move(current_sink());
  current_sink() = std::move(sink);
  return previous;
}

void warn(std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (current_sink()) {
    current_sink()(message);
  } else {
    std::fprintf(stderr, "qndsim warning: %.*s\n", static_cast<int>(message.size()),
                 message.data());
  }
}

}  // namespace qndsim
