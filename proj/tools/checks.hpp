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

// Named checks per module, run reports and the per-directory convention ledger.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "axb/corpus.hpp"
#include "manifest.hpp"

namespace axbcli {

enum class Relation { Less, LessEqual, Equal, Greater };

struct CheckResult {
  std::string check;
  std::string status;  // pass | fail | error
  std::optional<double> measured;
  double tolerance = 0.0;
  Relation relation = Relation::Less;  // measured <relation> tolerance passes
  nlohmann::json detail;

  bool passed() const noexcept { return status == "pass"; }
};

nlohmann::json to_json(const CheckResult& r);

struct RunContext {
  std::string run_name;
  Parameters params;
  // resolved corpus; empty means each module picks its own default
  std::vector<axb::NamedHandle> corpus;
  std::filesystem::path out_dir;
  std::vector<std::string> artifacts;
  std::vector<std::string> ledger;

  double tolerance(const std::string& check) const;
};

// Runs the listed checks of one target (all of them when `only` is empty).
std::vector<CheckResult> run_target(const std::string& target, const std::vector<std::string>& only,
                                    RunContext& ctx);

struct RunReport {
  std::string name;
  std::string command;
  nlohmann::json manifest;
  std::vector<CheckResult> checks;
  std::vector<std::string> artifacts;

  bool passed() const noexcept;
};

nlohmann::json to_json(const RunReport& r);

// Output directory: explicit flag, then the manifest's output_dir, then
// $AXB_OUT_DIR, then ./axb-out.
std::filesystem::path resolve_out_dir(const std::optional<std::string>& flag, const std::string& manifest_out = {});

// Writes <out>/<name>.report.json and appends the run to <out>/conventions.txt.
std::filesystem::path write_report(const RunReport& r, const RunContext& ctx);

// Corpus references: entry names of the built-in sets, the set names
// "default" and "k0", or corpus JSON files (relative to `base`).
std::vector<axb::NamedHandle> resolve_corpus(const std::vector<std::string>& refs,
                                             const std::filesystem::path& base = {});

// Handles addressable by name from the command line: gauss1, gauss1-shift,
// poly-gauss1, gauss2, aniso and every corpus entry.
axb::AnalyticHandle named_handle(const std::string& name);

// run(manifest): every check of every target, report written, ledger appended.
RunReport run_manifest(const ExperimentManifest& m, const std::optional<std::string>& out_flag,
                       const std::filesystem::path& manifest_dir = {});

// One table over every *.report.json in `dir` (sorted by file name).
struct SummaryRow {
  std::string run;
  CheckResult result;
};
std::vector<SummaryRow> collect_reports(const std::filesystem::path& dir);
void write_summary(const std::vector<SummaryRow>& rows, std::ostream& table, std::ostream& csv);

std::string format_measured(const std::optional<double>& v);

}  // namespace axbcli
