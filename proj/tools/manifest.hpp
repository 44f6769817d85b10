// Copyright 2026 The axbstar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Experiment manifests: what to run, with which parameters, on which inputs.

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace axbcli {

using cplx = std::complex<double>;

// Unset fields fall back to per-module defaults when the checks run.
struct Parameters {
  std::optional<double> q;
  std::optional<double> q_weyl;
  std::optional<cplx> nu;
  std::optional<cplx> gamma;
  std::optional<int> k;
  std::optional<double> c;
  std::optional<std::size_t> grid;
  std::optional<double> window;
  std::optional<std::int64_t> max_m;
  std::optional<std::int64_t> max_n;
  std::map<std::string, double> tolerances;

  bool operator==(const Parameters&) const = default;
};

struct ExperimentManifest {
  std::string name;
  std::vector<std::string> targets;
  // empty: every check of every target
  std::vector<std::string> checks;
  Parameters parameters;
  // corpus entry names, set names ("default", "k0") or *.json corpus files
  std::vector<std::string> corpus;
  std::string output_dir;

  bool operator==(const ExperimentManifest&) const = default;
};

const std::vector<std::string>& known_targets();
// check names per target, in run order
const std::vector<std::string>& checks_of(const std::string& target);
// checks whose tolerance a manifest may override
const std::map<std::string, double>& default_tolerances();

nlohmann::json to_json(const ExperimentManifest& m);
nlohmann::json to_json(const Parameters& p);

// Parses and validates. Failures raise axb::Error(InvalidManifest) with a
// "source:line:column: field: message" diagnostic.
ExperimentManifest parse_manifest(const std::string& text, const std::string& source = "<manifest>");
ExperimentManifest load_manifest(const std::string& path);

// Same checks for a manifest built in code (positions are then unknown).
void validate(const ExperimentManifest& m);

// JSON pointer -> 1-based (line, column) of the value, for diagnostics.
std::map<std::string, std::pair<int, int>> locate_pointers(const std::string& text);

// "1.5", "0.5i", "-2i", "0.3+0.5i", "re,im"
cplx parse_complex(const std::string& s);

}  // namespace axbcli
