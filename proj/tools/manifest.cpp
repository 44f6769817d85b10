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

#include "manifest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "axb/corpus.hpp"
#include "axb/errors.hpp"
#include "axb/twisted_weyl.hpp"

namespace axbcli {

using nlohmann::json;

const std::vector<std::string>& known_targets() {
  static const std::vector<std::string> t{"symmoyal", "transforms", "typespaces", "laplace_twist",
                                          "twisted_weyl"};
  return t;
}

const std::vector<std::string>& checks_of(const std::string& target) {
  static const std::map<std::string, std::vector<std::string>> m{
      {"symmoyal", {"commutator_identity", "rho_homomorphism", "derivation", "associativity"}},
      {"transforms",
       {"sf_involution", "twisted_convolution_assoc", "route_ab", "kappa_spread", "kappa_vs_moyal"}},
      {"typespaces", {"certify_gaussian", "reject_quarter", "mult_lemma", "sf_lemma"}},
      {"laplace_twist",
       {"laplace_roundtrip", "c_independence", "j_pullback", "phi_roundtrip", "imaginary_axis",
        "strip_boundary", "hyperbola", "jacobian", "ik_tail"}},
      {"twisted_weyl",
       {"tau_T_roundtrip", "T_tau_roundtrip", "q0_reduction", "star_assoc", "contour_independence",
        "bullet_derivation", "hat_modulus", "hat_star_finite"}},
  };
  static const std::vector<std::string> none;
  const auto it = m.find(target);
  return it == m.end() ? none : it->second;
}

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t{
      {"sf_involution", 1e-6},     {"twisted_convolution_assoc", 1e-6},
      {"route_ab", 1e-6},          {"kappa_spread", 1e-3},
      {"kappa_vs_moyal", 1e-3},    {"laplace_roundtrip", 1e-8},
      {"c_independence", 1e-8},    {"j_pullback", 1e-8},
      {"phi_roundtrip", 1e-12},    {"imaginary_axis", 1e-10},
      {"strip_boundary", 1e-10},   {"hyperbola", 1e-10},
      {"jacobian", 1e-14},         {"ik_tail", 1e-8},
      {"tau_T_roundtrip", 1e-6},   {"T_tau_roundtrip", 1e-6},
      {"q0_reduction", 1e-6},      {"star_assoc", 1e-4},
      {"contour_independence", 1e-6}, {"bullet_derivation", 1e-5},
      {"hat_modulus", 1e-12},
  };
  return t;
}

namespace {

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

}  // namespace

json to_json(const Parameters& p) {
  json j = json::object();
  if (p.q) j["q"] = *p.q;
  if (p.q_weyl) j["q_weyl"] = *p.q_weyl;
  if (p.nu) j["nu"] = complex_json(*p.nu);
  if (p.gamma) j["gamma"] = complex_json(*p.gamma);
  if (p.k) j["k"] = *p.k;
  if (p.c) j["c"] = *p.c;
  if (p.grid) j["grid"] = *p.grid;
  if (p.window) j["window"] = *p.window;
  if (p.max_m) j["max_m"] = *p.max_m;
  if (p.max_n) j["max_n"] = *p.max_n;
  if (!p.tolerances.empty()) j["tolerances"] = p.tolerances;
  return j;
}

json to_json(const ExperimentManifest& m) {
  json j = json::object();
  j["name"] = m.name;
  j["targets"] = m.targets;
  if (!m.checks.empty()) j["checks"] = m.checks;
  j["parameters"] = to_json(m.parameters);
  if (!m.corpus.empty()) j["corpus"] = m.corpus;
  if (!m.output_dir.empty()) j["output_dir"] = m.output_dir;
  return j;
}

// ------------------------------------------------------------ positions

std::map<std::string, std::pair<int, int>> locate_pointers(const std::string& text) {
  struct Frame {
    bool object;
    std::string key;
    std::size_t index = 0;
    bool expect_key = true;
  };
  std::map<std::string, std::pair<int, int>> out;
  std::vector<Frame> st;
  int line = 1;
  int col = 1;
  auto pointer = [&] {
    std::string p;
    for (const auto& f : st) {
      p += '/';
      if (f.object) {
        for (char ch : f.key) {
          if (ch == '~') p += "~0";
          else if (ch == '/') p += "~1";
          else p += ch;
        }
      } else {
        p += std::to_string(f.index);
      }
    }
    return p;
  };
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto read_string = [&] {
    std::string s;
    advance(1);
    while (i < text.size() && text[i] != '"') {
      if (text[i] == '\\' && i + 1 < text.size()) {
        s += text[i + 1];
        advance(2);
      } else {
        s += text[i];
        advance(1);
      }
    }
    advance(1);
    return s;
  };
  while (i < text.size()) {
    const char ch = text[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      advance(1);
      continue;
    }
    if (ch == ',') {
      if (!st.empty()) {
        if (st.back().object) st.back().expect_key = true;
        else ++st.back().index;
      }
      advance(1);
      continue;
    }
    if (ch == ':') {
      advance(1);
      continue;
    }
    if (ch == '}' || ch == ']') {
      if (!st.empty()) st.pop_back();
      advance(1);
      continue;
    }
    if (!st.empty() && st.back().object && st.back().expect_key && ch == '"') {
      st.back().key = read_string();
      st.back().expect_key = false;
      continue;
    }
    out[pointer()] = {line, col};
    if (ch == '{' || ch == '[') {
      st.push_back({ch == '{', "", 0, true});
      advance(1);
    } else if (ch == '"') {
      read_string();
    } else {
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
             std::string_view(",]}:").find(text[i]) == std::string_view::npos) {
        advance(1);
      }
    }
  }
  return out;
}

// ------------------------------------------------------------ parsing

cplx parse_complex(const std::string& raw) {
  std::string s;
  for (char ch : raw) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  }
  auto num = [&](const std::string& t) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (t.empty() || used != t.size()) throw axb::Error(axb::ErrorCode::ParseError, "not a number: '" + raw + "'");
    return v;
  };
  if (s.empty()) throw axb::Error(axb::ErrorCode::ParseError, "empty complex number");
  if (const auto comma = s.find(','); comma != std::string::npos) {
    return {num(s.substr(0, comma)), num(s.substr(comma + 1))};
  }
  if (s.back() != 'i') return {num(s), 0.0};
  s.pop_back();
  // split at a sign that is not the leading one and not an exponent sign
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      const std::string im = s.substr(k);
      return {num(s.substr(0, k)), im.size() == 1 ? (im == "-" ? -1.0 : 1.0) : num(im)};
    }
  }
  if (s.empty() || s == "+") return {0.0, 1.0};
  if (s == "-") return {0.0, -1.0};
  return {0.0, num(s)};
}

namespace {

class Diagnostics {
 public:
  Diagnostics(std::string source, std::map<std::string, std::pair<int, int>> where)
      : source_(std::move(source)), where_(std::move(where)) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& msg) const {
    std::string p = pointer;
    auto it = where_.find(p);
    while (it == where_.end() && !p.empty()) {
      p = p.substr(0, p.rfind('/'));
      it = where_.find(p);
    }
    std::ostringstream os;
    os << source_ << ':';
    if (it != where_.end()) os << it->second.first << ':' << it->second.second << ':';
    os << ' ' << (pointer.empty() ? "/" : pointer) << ": " << msg;
    throw axb::Error(axb::ErrorCode::InvalidManifest, os.str());
  }

 private:
  std::string source_;
  std::map<std::string, std::pair<int, int>> where_;
};

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::string joined(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& e : v) s += (s.empty() ? "" : ", ") + e;
  return s;
}

double number_at(const json& j, const std::string& ptr, const Diagnostics& d) {
  if (!j.is_number()) d.fail(ptr, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) d.fail(ptr, "must be finite");
  return v;
}

std::int64_t integer_at(const json& j, const std::string& ptr, const Diagnostics& d) {
  if (!j.is_number_integer()) d.fail(ptr, "expected an integer");
  return j.get<std::int64_t>();
}

cplx complex_at(const json& j, const std::string& ptr, const Diagnostics& d) {
  if (j.is_number()) return {number_at(j, ptr, d), 0.0};
  if (j.is_array() && j.size() == 2) {
    return {number_at(j[0], ptr + "/0", d), number_at(j[1], ptr + "/1", d)};
  }
  if (j.is_string()) {
    try {
      return parse_complex(j.get<std::string>());
    } catch (const axb::Error& e) {
      d.fail(ptr, e.what());
    }
  }
  d.fail(ptr, "expected a complex number: [re, im], a number or a string like \"0.5i\"");
}

std::vector<std::string> strings_at(const json& j, const std::string& ptr, const Diagnostics& d) {
  if (!j.is_array()) d.fail(ptr, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) d.fail(ptr + "/" + std::to_string(i), "expected a string");
    out.push_back(j[i].get<std::string>());
  }
  return out;
}

bool corpus_name_known(const std::string& n) {
  if (n == "default" || n == "k0") return true;
  if (n.size() > 5 && n.ends_with(".json")) return true;
  for (const auto& e : axb::default_corpus()) {
    if (e.name == n) return true;
  }
  for (const auto& e : axb::k0_corpus()) {
    if (e.name == n) return true;
  }
  return false;
}

// Semantic checks shared by parsed and hand-built manifests.
void check_semantics(const ExperimentManifest& m, const Diagnostics& d) {
  if (m.name.empty()) d.fail("/name", "must be a non-empty string");
  for (char ch : m.name) {
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_' && ch != '.') {
      d.fail("/name", "only letters, digits, '-', '_' and '.' are allowed");
    }
  }
  if (m.targets.empty()) d.fail("/targets", "at least one target is required");
  for (std::size_t i = 0; i < m.targets.size(); ++i) {
    if (!contains(known_targets(), m.targets[i])) {
      d.fail("/targets/" + std::to_string(i),
             "unknown target '" + m.targets[i] + "' (known: " + joined(known_targets()) + ")");
    }
  }
  for (std::size_t i = 0; i < m.checks.size(); ++i) {
    bool found = false;
    for (const auto& t : m.targets) found = found || contains(checks_of(t), m.checks[i]);
    if (!found) d.fail("/checks/" + std::to_string(i), "'" + m.checks[i] + "' is not a check of the listed targets");
  }
  for (std::size_t i = 0; i < m.corpus.size(); ++i) {
    if (!corpus_name_known(m.corpus[i])) {
      d.fail("/corpus/" + std::to_string(i), "no corpus entry named '" + m.corpus[i] + "'");
    }
  }
  const Parameters& p = m.parameters;
  if (p.q && *p.q < 0.0) d.fail("/parameters/q", "must be >= 0");
  if (p.q_weyl && *p.q_weyl <= 0.0) d.fail("/parameters/q_weyl", "must be > 0");
  if (p.k && *p.k != 0 && *p.k != 1) d.fail("/parameters/k", "must be 0 or 1");
  if (p.grid && (*p.grid < 16 || (*p.grid & (*p.grid - 1)) != 0)) {
    d.fail("/parameters/grid", "must be a power of two >= 16");
  }
  if (p.window && *p.window <= 0.0) d.fail("/parameters/window", "must be > 0");
  if (p.max_m && *p.max_m < 0) d.fail("/parameters/max_m", "must be >= 0");
  if (p.max_n && *p.max_n < 0) d.fail("/parameters/max_n", "must be >= 0");
  if (p.gamma && std::abs(std::abs(*p.gamma) - 1.0) > 1e-12) d.fail("/parameters/gamma", "|gamma| must be 1");
  if (p.nu && (p.nu->real() != 0.0 || p.nu->imag() == 0.0)) {
    d.fail("/parameters/nu", "nu must be nonzero and purely imaginary");
  }
  for (const auto& [k, v] : p.tolerances) {
    if (!default_tolerances().contains(k)) d.fail("/parameters/tolerances/" + k, "no adjustable tolerance named '" + k + "'");
    if (!(v > 0.0)) d.fail("/parameters/tolerances/" + k, "tolerances must be positive");
  }
  if (p.c) {
    const int k = p.k.value_or(1);
    const double q = p.q.value_or(k == 0 ? 0.5 : 0.3);
    try {
      axb::validate_contour(k, q, *p.c);
    } catch (const axb::Error& e) {
      d.fail("/parameters/c", std::string("incompatible with k and q: ") + e.what());
    }
  }
}

ExperimentManifest from_json_checked(const json& j, const Diagnostics& d) {
  if (!j.is_object()) d.fail("", "a manifest must be a JSON object");
  if (j.empty()) d.fail("", "manifest is empty; 'name' and 'targets' are required");
  static const std::vector<std::string> top{"name", "targets", "checks", "parameters", "corpus", "output_dir"};
  for (const auto& [k, v] : j.items()) {
    if (!contains(top, k)) d.fail("/" + k, "unknown field (known: " + joined(top) + ")");
  }
  ExperimentManifest m;
  if (!j.contains("name")) d.fail("", "missing field 'name'");
  if (!j["name"].is_string()) d.fail("/name", "expected a string");
  m.name = j["name"].get<std::string>();
  if (!j.contains("targets")) d.fail("", "missing field 'targets'");
  m.targets = strings_at(j["targets"], "/targets", d);
  if (j.contains("checks")) m.checks = strings_at(j["checks"], "/checks", d);
  if (j.contains("corpus")) m.corpus = strings_at(j["corpus"], "/corpus", d);
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) d.fail("/output_dir", "expected a string");
    m.output_dir = j["output_dir"].get<std::string>();
  }
  if (j.contains("parameters")) {
    const json& pj = j["parameters"];
    if (!pj.is_object()) d.fail("/parameters", "expected an object");
    static const std::vector<std::string> keys{"q",    "q_weyl", "nu",    "gamma", "k",         "c",
                                               "grid", "window", "max_m", "max_n", "tolerances"};
    for (const auto& [k, v] : pj.items()) {
      if (!contains(keys, k)) d.fail("/parameters/" + k, "unknown parameter (known: " + joined(keys) + ")");
    }
    Parameters& p = m.parameters;
    auto ptr = [](const char* k) { return std::string("/parameters/") + k; };
    if (pj.contains("q")) p.q = number_at(pj["q"], ptr("q"), d);
    if (pj.contains("q_weyl")) p.q_weyl = number_at(pj["q_weyl"], ptr("q_weyl"), d);
    if (pj.contains("nu")) p.nu = complex_at(pj["nu"], ptr("nu"), d);
    if (pj.contains("gamma")) p.gamma = complex_at(pj["gamma"], ptr("gamma"), d);
    if (pj.contains("k")) p.k = static_cast<int>(integer_at(pj["k"], ptr("k"), d));
    if (pj.contains("c")) p.c = number_at(pj["c"], ptr("c"), d);
    if (pj.contains("grid")) {
      const auto g = integer_at(pj["grid"], ptr("grid"), d);
      if (g <= 0) d.fail(ptr("grid"), "must be positive");
      p.grid = static_cast<std::size_t>(g);
    }
    if (pj.contains("window")) p.window = number_at(pj["window"], ptr("window"), d);
    if (pj.contains("max_m")) p.max_m = integer_at(pj["max_m"], ptr("max_m"), d);
    if (pj.contains("max_n")) p.max_n = integer_at(pj["max_n"], ptr("max_n"), d);
    if (pj.contains("tolerances")) {
      const json& tj = pj["tolerances"];
      if (!tj.is_object()) d.fail(ptr("tolerances"), "expected an object of check -> tolerance");
      for (const auto& [k, v] : tj.items()) p.tolerances[k] = number_at(v, ptr("tolerances") + "/" + k, d);
    }
  }
  check_semantics(m, d);
  return m;
}

}  // namespace

ExperimentManifest parse_manifest(const std::string& text, const std::string& source) {
  const bool blank = std::all_of(text.begin(), text.end(), [](char ch) { return std::isspace(static_cast<unsigned char>(ch)); });
  if (blank) {
    throw axb::Error(axb::ErrorCode::InvalidManifest, source + ":1:1: /: manifest is empty");
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 1;
    int col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    if (const auto p = what.find("syntax error"); p != std::string::npos) what = what.substr(p);
    throw axb::Error(axb::ErrorCode::InvalidManifest,
                     source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }
  return from_json_checked(j, Diagnostics(source, locate_pointers(text)));
}

ExperimentManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw axb::Error(axb::ErrorCode::InvalidManifest, path + ": cannot open manifest");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path);
}

void validate(const ExperimentManifest& m) { check_semantics(m, Diagnostics("<manifest>", {})); }

}  // namespace axbcli
