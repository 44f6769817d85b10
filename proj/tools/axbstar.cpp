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

// axbstar: command-line runner for the ax+b star product checks.
//
// Exit status: 0 every check passed, 1 some check failed, 2 usage error.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "axb/errors.hpp"
#include "axb/laplace_twist.hpp"
#include "axb/twisted_weyl.hpp"
#include "axb/typespaces.hpp"
#include "checks.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;
using namespace axbcli;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

// Raised for flag combinations that cannot run.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool is_usage(const axb::Error& e) {
  switch (e.code()) {
    case axb::ErrorCode::PreconditionViolation:
    case axb::ErrorCode::OnBranchCut:
    case axb::ErrorCode::InvalidExponents:
    case axb::ErrorCode::InvalidManifest:
    case axb::ErrorCode::ParseError:
      return true;
    default:
      return false;
  }
}

void print_checks(const RunReport& r, std::ostream& os) {
  for (const auto& c : r.checks) {
    os << std::left << std::setw(26) << c.check << ' ' << std::setw(5) << c.status << "  measured "
       << std::setw(10) << format_measured(c.measured) << "  tolerance "
       << to_json(c)["relation"].get<std::string>() << ' ' << c.tolerance;
    if (c.status == "error") os << "  (" << c.detail["error"].get<std::string>() << ")";
    os << '\n';
  }
}

// Shared flags; every subcommand reads the subset it understands.
struct Flags {
  std::optional<double> q;
  std::optional<double> q_weyl;
  std::optional<std::string> nu;
  std::optional<std::string> gamma;
  std::optional<int> k;
  std::optional<double> c;
  std::optional<std::size_t> grid;
  std::optional<double> window;
  std::optional<double> tol;
  std::optional<std::string> out;
  std::optional<std::string> name;
  std::vector<std::string> corpus;
  std::string check = "all";
};

Parameters to_parameters(const Flags& f) {
  Parameters p;
  p.q = f.q;
  p.q_weyl = f.q_weyl;
  if (f.nu) p.nu = parse_complex(*f.nu);
  if (f.gamma) p.gamma = parse_complex(*f.gamma);
  p.k = f.k;
  p.c = f.c;
  p.grid = f.grid;
  p.window = f.window;
  return p;
}

void add_out(CLI::App* s, Flags& f) {
  s->add_option("--out", f.out, "output directory (default $AXB_OUT_DIR, then ./axb-out)");
  s->add_option("--name", f.name, "report name (default: the subcommand)");
}

// Runs the chosen checks of one target as a subcommand report.
int run_checks(const std::string& command, const std::string& target, const std::vector<std::string>& checks,
               const Flags& f, const std::string& invocation, ExperimentManifest m) {
  m.name = f.name.value_or(command);
  m.targets = {target};
  m.checks = checks;
  m.parameters = to_parameters(f);
  if (f.tol) {
    for (const auto& c : checks.empty() ? checks_of(target) : checks) {
      if (default_tolerances().contains(c)) m.parameters.tolerances[c] = *f.tol;
    }
  }
  m.corpus = f.corpus;
  validate(m);

  RunContext ctx;
  ctx.run_name = m.name;
  ctx.params = m.parameters;
  ctx.corpus = resolve_corpus(m.corpus);
  ctx.out_dir = resolve_out_dir(f.out);
  fs::create_directories(ctx.out_dir);
  RunReport r;
  r.name = m.name;
  r.command = invocation;
  r.manifest = to_json(m);
  r.checks = run_target(target, m.checks, ctx);
  r.artifacts = ctx.artifacts;
  const auto path = write_report(r, ctx);
  print_checks(r, std::cout);
  std::cout << "report: " << path.string() << '\n';
  return r.passed() ? kPass : kFail;
}

std::vector<std::string> pick(const std::string& check, const std::map<std::string, std::vector<std::string>>& m) {
  if (check == "all") return {};
  const auto it = m.find(check);
  if (it == m.end()) {
    std::string known = "all";
    for (const auto& [k, v] : m) known += ", " + k;
    throw UsageError("--check must be one of: " + known);
  }
  return it->second;
}

std::string invocation_of(int argc, char** argv) {
  std::string s = "axbstar";
  for (int i = 1; i < argc; ++i) s += std::string(" ") + argv[i];
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"axbstar: exact and numerical checks of the ax+b star product"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");
  const std::string invocation = invocation_of(argc, argv);
  std::function<int()> action;

  Flags f;

  // ---------------------------------------------------------------- run
  std::vector<std::string> manifests;
  auto* run = app.add_subcommand("run", "run experiment manifests");
  run->add_option("manifest", manifests, "manifest JSON files")->required();
  run->add_option("--out", f.out, "output directory (overrides the manifest)");
  run->callback([&] {
    action = [&] {
      bool ok = true;
      for (const auto& path : manifests) {
        const ExperimentManifest m = load_manifest(path);
        const RunReport r = run_manifest(m, f.out, fs::path(path).parent_path());
        std::cout << "== " << m.name << '\n';
        print_checks(r, std::cout);
        ok = ok && r.passed();
      }
      return ok ? kPass : kFail;
    };
  });

  // ---------------------------------------------------------------- certify
  std::string fn;
  std::vector<double> alpha, beta, ca, cb;
  axb::ProbeSpec probes;
  auto* cert = app.add_subcommand("certify", "type-S certificate for a closed-form function");
  cert->add_option("--fn", fn, "gauss1, gauss1-shift, poly-gauss1, gauss2, aniso or a corpus entry")->required();
  cert->add_option("--alpha", alpha, "exponents, one per axis")->delimiter(',')->required();
  cert->add_option("--beta", beta, "exponents, one per axis")->delimiter(',')->required();
  cert->add_option("--a", ca, "fixed decay constants")->delimiter(',');
  cert->add_option("--b", cb, "fixed growth constants")->delimiter(',');
  cert->add_option("--x-max", probes.x_max, "probe box, real directions");
  cert->add_option("--y-max", probes.y_max, "probe box, imaginary directions");
  cert->add_option("--points", probes.points, "probes per direction");
  cert->add_option("--tol", f.tol, "slack allowed on the residual");
  add_out(cert, f);
  cert->callback([&] {
    action = [&] {
      const auto h = named_handle(fn);
      if (alpha.size() != static_cast<std::size_t>(h.dims()) || beta.size() != alpha.size()) {
        throw UsageError("--alpha/--beta need " + std::to_string(h.dims()) + " values for " + fn);
      }
      if (f.tol) probes.tolerance = *f.tol;
      axb::CertifyOptions opts;
      if (!ca.empty()) opts.a = ca;
      if (!cb.empty()) opts.b = cb;
      const auto c = axb::certify(h, alpha, beta, probes, opts);
      const auto cj = axb::to_json(c);
      std::cout << cj.dump(2) << '\n';

      RunContext ctx;
      ctx.run_name = f.name.value_or("certify");
      ctx.out_dir = resolve_out_dir(f.out);
      fs::create_directories(ctx.out_dir);
      {
        std::ofstream os(ctx.out_dir / (ctx.run_name + ".certificate.json"));
        os << cj.dump(2) << '\n';
      }
      ctx.artifacts.push_back(ctx.run_name + ".certificate.json");
      ctx.ledger.push_back("typespaces: certify " + fn + "; residual = max log|f| - log(bound) on extended probes");
      RunReport r;
      r.name = ctx.run_name;
      r.command = invocation;
      r.manifest = {{"fn", fn}, {"alpha", alpha}, {"beta", beta}};
      CheckResult cr;
      cr.check = "certified";
      cr.measured = c.residual;
      cr.tolerance = probes.tolerance;
      cr.relation = Relation::LessEqual;
      cr.status = c.certified() ? "pass" : "fail";
      r.checks.push_back(cr);
      r.artifacts = ctx.artifacts;
      write_report(r, ctx);
      return r.passed() ? kPass : kFail;
    };
  });

  // ---------------------------------------------------------------- weyl
  auto* weyl = app.add_subcommand("weyl", "symplectic Fourier, twisted convolution and Weyl product checks");
  weyl->add_option("--q", f.q, "Weyl parameter (default 0.5)");
  weyl->add_option("--grid", f.grid, "grid size per axis");
  weyl->add_option("--window", f.window, "half-width of the square window");
  weyl->add_option("--corpus", f.corpus, "corpus entries, 'default' or corpus files")->delimiter(',');
  weyl->add_option("--check", f.check, "all, sf, conv-assoc, route, kappa");
  weyl->add_option("--tol", f.tol, "tolerance for the selected checks");
  add_out(weyl, f);
  weyl->callback([&] {
    action = [&] {
      if (f.q && !(*f.q > 0.0)) throw UsageError("--q must be > 0 for the twisted convolution");
      const auto checks = pick(f.check, {{"sf", {"sf_involution"}},
                                         {"conv-assoc", {"twisted_convolution_assoc"}},
                                         {"route", {"route_ab"}},
                                         {"kappa", {"kappa_spread", "kappa_vs_moyal"}}});
      return run_checks("weyl", "transforms", checks, f, invocation, {});
    };
  });

  // ---------------------------------------------------------------- star
  auto* st = app.add_subcommand("star", "twisted Weyl product checks");
  st->add_option("--q", f.q, "twist parameter (default 0.3 for k = 1, 0.5 for k = 0)");
  st->add_option("--q-weyl", f.q_weyl, "Weyl parameter inside the product (default --q)");
  st->add_option("--k", f.k, "theta = k pi / 2, k in {0, 1}")->check(CLI::IsMember({0, 1}));
  st->add_option("--c", f.c, "tau inversion contour");
  st->add_option("--nu", f.nu, "bullet nu, e.g. 0.5i");
  st->add_option("--gamma", f.gamma, "bullet gamma, |gamma| = 1");
  st->add_option("--grid", f.grid, "grid size per axis");
  st->add_option("--window", f.window, "half-width of the square window");
  st->add_option("--corpus", f.corpus, "corpus entries, 'default', 'k0' or corpus files")->delimiter(',');
  st->add_option("--check", f.check, "all, assoc, roundtrip, q0, contour, bullet, hat");
  st->add_option("--tol", f.tol, "tolerance for the selected checks");
  add_out(st, f);
  st->callback([&] {
    action = [&] {
      const auto checks = pick(f.check, {{"assoc", {"star_assoc"}},
                                         {"roundtrip", {"tau_T_roundtrip", "T_tau_roundtrip"}},
                                         {"q0", {"q0_reduction"}},
                                         {"contour", {"contour_independence"}},
                                         {"bullet", {"bullet_derivation"}},
                                         {"hat", {"hat_modulus", "hat_star_finite"}}});
      if (f.c) {
        const int k = f.k.value_or(1);
        axb::validate_contour(k, f.q.value_or(k == 0 ? 0.5 : 0.3), *f.c);
      }
      return run_checks("star", "twisted_weyl", checks, f, invocation, {});
    };
  });

  // ---------------------------------------------------------------- twist-map
  std::vector<double> lines;
  double t_max = 3.0;
  std::size_t points = 201;
  auto* tm = app.add_subcommand("twist-map", "CSV of phi-images of vertical lines Re z = c / q");
  tm->add_option("--q", f.q, "twist parameter (default 1)");
  tm->add_option("--k", f.k, "only k = 0 maps lines to hyperbolas")->check(CLI::IsMember({0, 1}));
  tm->add_option("--line", lines, "line parameters c in (0, pi/2)")->delimiter(',')->required();
  tm->add_option("--t-max", t_max, "lines are traced for Im z in [-t_max, t_max]");
  tm->add_option("--points", points, "points per line");
  tm->add_option("--tol", f.tol, "hyperbola residual tolerance");
  add_out(tm, f);
  tm->callback([&] {
    action = [&] {
      if (f.k.value_or(0) != 0) throw UsageError("--k 1 is incompatible with twist-map: line images are hyperbolas for k = 0");
      const double q = f.q.value_or(1.0);
      if (!(q > 0.0)) throw UsageError("--q must be > 0");
      if (points < 2) throw UsageError("--points must be >= 2");
      for (double c : lines) {
        if (!(c > 0.0 && c < axb::kPi / 2)) throw UsageError("--line values must lie in (0, pi/2)");
      }
      const axb::TwistParams tp(q, 0);
      std::vector<double> ts;
      for (std::size_t i = 0; i < points; ++i) {
        ts.push_back(-t_max + 2.0 * t_max * static_cast<double>(i) / static_cast<double>(points - 1));
      }
      RunContext ctx;
      ctx.run_name = f.name.value_or("twist-map");
      ctx.out_dir = resolve_out_dir(f.out);
      fs::create_directories(ctx.out_dir);
      std::ostringstream csv;
      csv << std::setprecision(17) << "c,t,re,im,residual\n";
      double worst = 0.0;
      for (double c : lines) {
        const auto img = axb::line_image(tp, c, ts);
        for (std::size_t i = 0; i < img.size(); ++i) {
          const double res = axb::hyperbola_residual(tp, c, img[i]);
          worst = std::max(worst, std::abs(res));
          csv << c << ',' << ts[i] << ',' << img[i].real() << ',' << img[i].imag() << ',' << res << '\n';
        }
      }
      std::cout << csv.str();
      {
        std::ofstream os(ctx.out_dir / (ctx.run_name + ".csv"));
        os << csv.str();
      }
      ctx.artifacts.push_back(ctx.run_name + ".csv");
      std::ostringstream qs;
      qs << q;
      ctx.ledger.push_back("twist: k = 0, q = " + qs.str() + "; Re z = c / q maps onto -(qX / cos c)^2 + (qY / sin c)^2 = 1");
      RunReport r;
      r.name = ctx.run_name;
      r.command = invocation;
      r.manifest = {{"q", q}, {"lines", lines}, {"t_max", t_max}, {"points", points}};
      CheckResult cr;
      cr.check = "hyperbola";
      cr.measured = worst;
      cr.tolerance = f.tol.value_or(default_tolerances().at("hyperbola"));
      cr.status = worst < cr.tolerance ? "pass" : "fail";
      r.checks.push_back(cr);
      r.artifacts = ctx.artifacts;
      write_report(r, ctx);
      return r.passed() ? kPass : kFail;
    };
  });

  // ---------------------------------------------------------------- formal-check
  std::int64_t max_m = 6;
  std::int64_t max_n = 4;
  auto* fc = app.add_subcommand("formal-check", "exact Moyal / rho identities on the monomial basis");
  fc->add_option("--max-m", max_m, "largest power of l")->check(CLI::NonNegativeNumber);
  fc->add_option("--max-n", max_n, "largest power of e^{-2a}")->check(CLI::NonNegativeNumber);
  add_out(fc, f);
  fc->callback([&] {
    action = [&] {
      ExperimentManifest m;
      m.name = f.name.value_or("formal-check");
      m.targets = {"symmoyal"};
      m.parameters.max_m = max_m;
      m.parameters.max_n = max_n;
      validate(m);
      RunContext ctx;
      ctx.run_name = m.name;
      ctx.params = m.parameters;
      ctx.out_dir = resolve_out_dir(f.out);
      fs::create_directories(ctx.out_dir);
      RunReport rep;
      rep.name = m.name;
      rep.command = invocation;
      rep.manifest = to_json(m);
      rep.checks = run_target("symmoyal", {}, ctx);
      const auto path = write_report(rep, ctx);
      print_checks(rep, std::cout);
      std::cout << "report: " << path.string() << '\n';
      return rep.passed() ? kPass : kFail;
    };
  });

  // ---------------------------------------------------------------- laplace
  double contour_t = 20.0;
  std::size_t contour_n = 401;
  auto* lp = app.add_subcommand("laplace", "Laplace roundtrip, contour independence and the J* convention");
  lp->add_option("--c", f.c, "inversion abscissa (default 0)");
  lp->add_option("--tol", f.tol, "tolerance for the selected checks");
  lp->add_option("--check", f.check, "all, roundtrip, contour, jstar");
  lp->add_option("--t-max", contour_t, "contour CSV extent");
  lp->add_option("--points", contour_n, "contour CSV samples");
  add_out(lp, f);
  lp->callback([&] {
    action = [&] {
      if (contour_n < 2) throw UsageError("--points must be >= 2");
      const auto checks = pick(f.check, {{"roundtrip", {"laplace_roundtrip"}},
                                         {"contour", {"c_independence"}},
                                         {"jstar", {"j_pullback"}}});
      const std::vector<std::string> all{"laplace_roundtrip", "c_independence", "j_pullback"};
      // contour samples of L(e^{-l^2}) for plotting
      const auto out = resolve_out_dir(f.out);
      fs::create_directories(out);
      const std::string name = f.name.value_or("laplace");
      const axb::Evaluator1 F = [](axb::cplx z) { return std::sqrt(axb::kPi) * std::exp(z * z / 4.0); };
      std::ofstream os(out / (name + ".contour.csv"));
      os << std::setprecision(17);
      axb::sample_contour(F, f.c.value_or(0.0), contour_t, contour_n).write_csv(os);
      os.close();
      return run_checks("laplace", "laplace_twist", checks.empty() ? all : checks, f, invocation, {});
    };
  });

  // ---------------------------------------------------------------- report
  std::optional<std::string> dir;
  auto* rp = app.add_subcommand("report", "aggregate every report in a directory into one table");
  rp->add_option("dir", dir, "directory (default: --out resolution)");
  rp->add_option("--out", f.out, "directory to aggregate");
  rp->callback([&] {
    action = [&] {
      const fs::path d = dir ? fs::path(*dir) : resolve_out_dir(f.out);
      const auto rows = collect_reports(d);
      if (rows.empty()) throw UsageError("no *.report.json files in " + d.string());
      std::ostringstream table;
      std::ofstream csv(d / "summary.csv");
      write_summary(rows, table, csv);
      std::cout << table.str();
      std::size_t failed = 0;
      for (const auto& r : rows) failed += r.result.passed() ? 0 : 1;
      std::cout << rows.size() << " checks, " << failed << " not passing\n";
      return failed == 0 ? kPass : kFail;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    return action();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const axb::Error& e) {
    std::cerr << (is_usage(e) ? "usage error: " : "error: ") << e.what() << '\n';
    return is_usage(e) ? kUsage : kFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFail;
  }
}
