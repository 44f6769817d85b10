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

#include "axb/corpus.hpp"

#include "axb/errors.hpp"

namespace axb {

std::vector<NamedHandle> default_corpus() {
  const cplx i(0.0, 1.0);
  std::vector<NamedHandle> c;
  c.push_back({"radial", AnalyticHandle::gaussian2(1.0, 1.0)});
  c.push_back({"chiral", AnalyticHandle(2, Polynomial::monomial(1, 0, 1.0) + Polynomial::monomial(0, 1, 0.5 * i),
                                        {1.0, 0.0, 0.0, 0.5}, {0.0, 0.0}, 1.0)});
  c.push_back({"shifted", AnalyticHandle::gaussian2(1.0, 1.0, {1.0, -0.6}, std::exp(-0.34))});
  c.push_back({"saddle", AnalyticHandle(2, Polynomial(1.0) + Polynomial::monomial(1, 1, 1.0),
                                        {0.8, 0.0, 0.0, 1.2}, {0.0, 0.0}, 1.0)});
  c.push_back({"coupled", AnalyticHandle(2, Polynomial::monomial(0, 2, 1.0), {1.0, 0.5, 0.5, 1.0},
                                         {0.0, 0.0}, 1.0)});
  return c;
}

std::vector<NamedHandle> k0_corpus() {
  Polynomial p(1.0);
  p.add({1, 1}, 0.5);
  const auto d = default_corpus();
  return {d[0], d[2], {"damped", AnalyticHandle(2, p, {1.3, 0.0, 0.0, 1.5}, {0.2, 0.0}, 1.0)}};
}

nlohmann::json corpus_to_json(const std::vector<NamedHandle>& corpus) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : corpus) arr.push_back({{"name", e.name}, {"handle", to_json(e.handle)}});
  return arr;
}

std::vector<NamedHandle> corpus_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidManifest, "corpus must be an array");
  std::vector<NamedHandle> out;
  for (const auto& e : j) {
    if (!e.contains("name") || !e.contains("handle")) {
      throw Error(ErrorCode::InvalidManifest, "corpus entry needs name and handle");
    }
    out.push_back({e["name"].get<std::string>(), handle_from_json(e["handle"])});
  }
  return out;
}

}  // namespace axb
