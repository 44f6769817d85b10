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

#include <string>
#include <vector>

#include "axb/numfield.hpp"

namespace axb {

struct NamedHandle {
  std::string name;
  AnalyticHandle handle;
};

// Five polynomial x Gaussian observables on R^2 used across the test suite.
std::vector<NamedHandle> default_corpus();
// Gaussian-family elements with widths >= 1 in both directions. The k = 0 twist
// amplifies sample roundoff by e^{pi |x|}, which narrower elements do not survive.
std::vector<NamedHandle> k0_corpus();

nlohmann::json corpus_to_json(const std::vector<NamedHandle>& corpus);
std::vector<NamedHandle> corpus_from_json(const nlohmann::json& j);

}  // namespace axb
