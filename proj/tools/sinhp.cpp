// Command-line driver: optimize | solve | sweep | verify | probe.
// Every run writes a manifest echoing the resolved configuration; re-running
// from the manifest reproduces the outputs digit for digit.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sinhp/io.hpp"
#include "sinhp/pipeline.hpp"

namespace fs = std::filesystem;
using namespace sinhp;

namespace {

constexpr const char* kVersion = "sinhp 0.1.0";

struct RunConfig {
  std::string command;
  int k = 1;
  std::string signs = "alternating";
  std::string xi;  // comma-separated explicit centers, empty = optimize
  double lambda = 0.05;
  std::string lambda_range = "0.2:0.0125";
  double factor = 0.5;
  int base_n = 256;
  double tol = 1e-10;
  int seed = 1234;
  int seeds = 16;
  bool sigma = true;
  double eps = 0.0;  // verify window half-width; 0 = automatic
  double mass_tol = 0.15 * 2.0 * pi;
  double height_tol = 0.3;
  std::string profile;  // verify inputs
  std::string report;
  std::string out = "out";
};

std::vector<int> parse_signs(const std::string& text, int k) {
  std::vector<int> signs;
  if (text == "alternating") {
    for (int i = 0; i < k; ++i) signs.push_back(i % 2 == 0 ? 1 : -1);
    return signs;
  }
  for (char c : text) {
    if (c == '+')
      signs.push_back(1);
    else if (c == '-')
      signs.push_back(-1);
    else
      throw std::invalid_argument("--signs must be 'alternating' or a +- pattern");
  }
  if (static_cast<int>(signs.size()) != k)
    throw std::invalid_argument("--signs pattern length must equal k");
  return signs;
}

std::vector<double> parse_xi(const std::string& text) {
  std::vector<double> xis;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) xis.push_back(std::stod(item));
  return xis;
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("--lambda-range must look like start:end");
  return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
}

void write_manifest(const RunConfig& rc) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("version", kVersion);
  kv.emplace_back("command", rc.command);
  kv.emplace_back("k", std::to_string(rc.k));
  kv.emplace_back("signs", rc.signs);
  if (!rc.xi.empty()) kv.emplace_back("xi", rc.xi);
  kv.emplace_back("lambda", fmt15(rc.lambda));
  kv.emplace_back("lambda_range", rc.lambda_range);
  kv.emplace_back("factor", fmt15(rc.factor));
  kv.emplace_back("base_n", std::to_string(rc.base_n));
  kv.emplace_back("tol", fmt15(rc.tol));
  kv.emplace_back("seed", std::to_string(rc.seed));
  kv.emplace_back("seeds", std::to_string(rc.seeds));
  kv.emplace_back("sigma", rc.sigma ? "1" : "0");
  if (rc.eps > 0.0) kv.emplace_back("eps", fmt15(rc.eps));
  kv.emplace_back("mass_tol", fmt15(rc.mass_tol));
  kv.emplace_back("height_tol", fmt15(rc.height_tol));
  if (!rc.profile.empty()) kv.emplace_back("profile", rc.profile);
  if (!rc.report.empty()) kv.emplace_back("report", rc.report);
  kv.emplace_back("out", rc.out);
  write_key_value((fs::path(rc.out) / "manifest.txt").string(), kv);
}

Configuration resolve_config(const RunConfig& rc) {
  const std::vector<int> signs = parse_signs(rc.signs, rc.k);
  if (!rc.xi.empty()) {
    Configuration cfg;
    cfg.xis = parse_xi(rc.xi);
    cfg.signs = signs;
    cfg.validate();
    return cfg;
  }
  const EnergyReport rep = maximize(rc.k, signs, rc.seeds, 1e-11, rc.seed);
  return symmetrize_if_near(rep.config);
}

std::string energy_report_json(const EnergyReport& rep, bool found, int k,
                               const std::vector<int>& signs) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"k\": " << k << ",\n";
  out << "  \"signs\": [";
  for (int i = 0; i < k; ++i) out << (i ? "," : "") << signs[i];
  out << "],\n";
  if (found) {
    out << "  \"xi\": [";
    for (int i = 0; i < rep.config.k(); ++i) out << (i ? "," : "") << fmt15(rep.config.xis[i]);
    out << "],\n";
    out << "  \"value\": " << fmt15(rep.value) << ",\n";
    out << "  \"grad_norm\": " << fmt15(rep.grad_norm) << ",\n";
    out << "  \"hessian_eigs\": [";
    for (int i = 0; i < rep.hessian_eigs.size(); ++i)
      out << (i ? "," : "") << fmt15(rep.hessian_eigs[i]);
    out << "],\n";
    out << "  \"classification\": \"" << to_string(rep.classification) << "\",\n";
  } else {
    out << "  \"classification\": \"none found\",\n";
  }
  out << "  \"seeds_converged\": " << rep.seeds_converged << ",\n";
  out << "  \"seeds_diverged\": " << rep.seeds_diverged << "\n";
  out << "}\n";
  return out.str();
}

int cmd_optimize(const RunConfig& rc) {
  const std::vector<int> signs = parse_signs(rc.signs, rc.k);
  EnergyReport rep;
  bool found = true;
  try {
    rep = maximize(rc.k, signs, rc.seeds, 1e-11, rc.seed);
  } catch (const NoCriticalPoint& e) {
    rep.config.signs = signs;
    rep.seeds_diverged = e.n_diverged;
    found = false;
  }
  if (found) {
    std::printf("k=%d  xi = [", rc.k);
    for (double x : rep.config.xis) std::printf(" %s", fmt15(x).c_str());
    std::printf(" ]  value=%s  classification=%s\n", fmt15(rep.value).c_str(),
                to_string(rep.classification));
  } else {
    std::printf("k=%d  no critical point found (every seed diverged)\n", rc.k);
  }
  write_text((fs::path(rc.out) / "optimize.json").string(),
             energy_report_json(rep, found, rc.k, signs));
  write_manifest(rc);
  return 0;
}

void emit_report_files(const RunConfig& rc, const SolveReport& rep, const std::string& stem) {
  const fs::path dir(rc.out);
  write_profile_csv((dir / (stem + ".csv")).string(), rep.solution.mesh, rep.solution.values);
  write_report_json((dir / (stem + ".json")).string(), rep);
}

int cmd_solve(const RunConfig& rc) {
  const Configuration cfg = resolve_config(rc);
  try {
    const SolveReport rep = run_solve(cfg, rc.lambda, rc.base_n, rc.tol, rc.sigma);
    emit_report_files(rc, rep, "profile");
    write_manifest(rc);
    std::printf("lambda=%s residual_sup=%s newton_iters=%d nodal_count=%d certified=%d\n",
                fmt15(rep.lambda).c_str(), fmt15(rep.residual_sup).c_str(), rep.newton_iters,
                rep.nodal_count, rep.nodal_certified ? 1 : 0);
    return 0;
  } catch (const NonConvergence& e) {
    std::fprintf(stderr, "solver did not converge: %s\n", e.what());
    return 3;
  } catch (const SingularJacobian& e) {
    std::fprintf(stderr, "solver failed: %s\n", e.what());
    return 3;
  }
}

int cmd_sweep(const RunConfig& rc) {
  const Configuration cfg = resolve_config(rc);
  const auto [start, end] = parse_range(rc.lambda_range);
  SweepOptions opts;
  opts.lambda_start = start;
  opts.lambda_end = end;
  opts.factor = rc.factor;
  opts.base_n = rc.base_n;
  opts.tol = rc.tol;
  opts.with_sigma = rc.sigma;
  const ContinuationResult res = run_sweep(cfg, opts);

  const fs::path dir(rc.out);
  for (std::size_t i = 0; i < res.reports.size(); ++i) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "profile_%04zu", i + 1);
    emit_report_files(rc, res.reports[i], stem);
  }
  write_summary_csv((dir / "summary.csv").string(), res.reports);
  write_manifest(rc);
  for (const SolveReport& r : res.reports)
    std::printf("lambda=%s residual_sup=%s nodal=%d certified=%d\n", fmt15(r.lambda).c_str(),
                fmt15(r.residual_sup).c_str(), r.nodal_count, r.nodal_certified ? 1 : 0);
  if (!res.completed) {
    std::fprintf(stderr, "sweep stopped early: %s (last converged lambda %s)\n",
                 res.failure.c_str(),
                 res.reports.empty() ? "none" : fmt15(res.reports.back().lambda).c_str());
    return 3;
  }
  return 0;
}

int cmd_verify(const RunConfig& rc) {
  if (rc.profile.empty() || rc.report.empty()) {
    std::fprintf(stderr, "verify needs --profile and --report\n");
    return 2;
  }
  const Profile prof = read_profile_csv(rc.profile);
  const ReportHeader head = read_report_json(rc.report);

  GridFunction u{mesh_from_nodes(prof.x),
                 Eigen::Map<const Eigen::VectorXd>(prof.u.data(), prof.u.size())};
  Configuration cfg;
  cfg.xis = head.xis;
  cfg.signs = head.signs;
  cfg.validate();
  const double lambda = head.lambda;

  const NodalReport nodal = count_nodal_regions(u, cfg, lambda);
  const bool nodal_pass = nodal.certified && nodal.nodal_count == cfg.k();

  double mass_err = -1.0, height_gap = -1.0;
  bool peaks_pass = false;
  if (static_cast<int>(nodal.zero_locations.size()) == cfg.k() - 1) {
    const PeakReport peaks = peak_diagnostics(u, cfg, lambda, nodal);
    mass_err = 0.0;
    height_gap = 0.0;
    for (int i = 0; i < cfg.k(); ++i) {
      mass_err =
          std::max(mass_err, std::abs(peaks.peaks[i].mass - peaks.peaks[i].sign * 2.0 * pi));
      height_gap = std::max(
          height_gap, std::abs(peaks.peaks[i].height - predicted_peak_height(cfg, lambda, i)));
    }
    peaks_pass = mass_err <= rc.mass_tol && height_gap <= rc.height_tol;
  }

  const double eps = rc.eps > 0.0 ? rc.eps : 0.25 * cfg.margin();
  const ProfileDeviation dev = profile_convergence(u, cfg, lambda, eps);
  const double mono = limit_profile_monotonicity(cfg);
  const bool mono_pass = mono > 0.0;
  const bool all_pass = nodal_pass && peaks_pass && mono_pass;

  std::ostringstream out;
  out << "{\n";
  out << "  \"profile\": \"" << rc.profile << "\",\n";
  out << "  \"lambda\": " << fmt15(lambda) << ",\n";
  out << "  \"checks\": {\n";
  out << "    \"nodal_count\": {\"expected\": " << cfg.k()
      << ", \"measured\": " << nodal.nodal_count
      << ", \"certified\": " << (nodal.certified ? "true" : "false")
      << ", \"pass\": " << (nodal_pass ? "true" : "false") << "},\n";
  out << "    \"local_mass\": {\"max_err\": " << fmt15(mass_err)
      << ", \"tol\": " << fmt15(rc.mass_tol)
      << ", \"pass\": " << (peaks_pass ? "true" : "false") << "},\n";
  out << "    \"peak_height\": {\"max_gap\": " << fmt15(height_gap)
      << ", \"tol\": " << fmt15(rc.height_tol) << "},\n";
  out << "    \"profile_convergence\": {\"sup\": " << fmt15(dev.sup)
      << ", \"weighted_outer_sup\": " << fmt15(dev.weighted_outer_sup)
      << ", \"eps\": " << fmt15(eps) << "},\n";
  out << "    \"monotonicity\": {\"min\": " << fmt15(mono)
      << ", \"pass\": " << (mono_pass ? "true" : "false") << "}\n";
  out << "  },\n";
  out << "  \"pass\": " << (all_pass ? "true" : "false") << "\n";
  out << "}\n";
  write_text((fs::path(rc.out) / "verify.json").string(), out.str());
  write_manifest(rc);
  std::printf("verify: %s\n", all_pass ? "pass" : "FAIL");
  return all_pass ? 0 : 4;
}

int cmd_probe(const RunConfig& rc) {
  const std::vector<int> signs = parse_signs(rc.signs, rc.k);
  const fs::path dir(rc.out);

  bool alternating = true;
  for (int i = 0; i + 1 < rc.k; ++i)
    if (signs[i] == signs[i + 1]) alternating = false;
  if (alternating) {
    std::vector<double> margins;
    for (double e = 1e-2; e >= 1e-8; e *= 0.1) margins.push_back(e);
    std::ostringstream csv;
    csv << "kind,distance,value\n";
    for (const BlowdownRow& row : boundary_blowdown_probe(rc.k, signs, margins))
      csv << row.kind << ',' << fmt15(row.distance) << ',' << fmt15(row.value) << '\n';
    write_text((dir / "blowdown.csv").string(), csv.str());
  }

  if (rc.k >= 3) {
    const ConjectureSummary sum = conjecture_probe(rc.k, signs, rc.seeds, rc.seed);
    std::ostringstream out;
    out << "{\n";
    out << "  \"note\": \"exploratory evidence only, not a proof\",\n";
    out << "  \"k\": " << sum.k << ",\n";
    out << "  \"n_starts\": " << sum.n_starts << ",\n";
    out << "  \"n_converged\": " << sum.n_converged << ",\n";
    out << "  \"n_diverged\": " << sum.n_diverged << ",\n";
    out << "  \"n_inconclusive\": " << sum.n_inconclusive << ",\n";
    out << "  \"distinct_critical_points\": " << sum.clusters.size() << ",\n";
    out << "  \"clusters\": [";
    for (std::size_t c = 0; c < sum.clusters.size(); ++c) {
      out << (c ? "," : "") << "\n    {\"xi\": [";
      for (int i = 0; i < sum.clusters[c].config.k(); ++i)
        out << (i ? "," : "") << fmt15(sum.clusters[c].config.xis[i]);
      out << "], \"classification\": \"" << to_string(sum.clusters[c].classification) << "\"}";
    }
    out << "\n  ]\n}\n";
    write_text((dir / "conjecture.json").string(), out.str());
  }
  write_manifest(rc);
  std::printf("probe: wrote %s\n", (dir / "blowdown.csv").string().c_str());
  return 0;
}

void merge_config_file(CLI::App& app, RunConfig& rc, const std::string& path) {
  const auto kv = read_key_value(path);
  auto take = [&](const char* flag, const char* key, auto setter) {
    const CLI::Option* opt = app.get_option_no_throw(flag);
    const auto it = kv.find(key);
    if (it != kv.end() && (opt == nullptr || opt->count() == 0)) setter(it->second);
  };
  take("--k", "k", [&](const std::string& v) { rc.k = std::stoi(v); });
  take("--signs", "signs", [&](const std::string& v) { rc.signs = v; });
  take("--xi", "xi", [&](const std::string& v) { rc.xi = v; });
  take("--lambda", "lambda", [&](const std::string& v) { rc.lambda = std::stod(v); });
  take("--lambda-range", "lambda_range", [&](const std::string& v) { rc.lambda_range = v; });
  take("--factor", "factor", [&](const std::string& v) { rc.factor = std::stod(v); });
  take("--base-n", "base_n", [&](const std::string& v) { rc.base_n = std::stoi(v); });
  take("--tol", "tol", [&](const std::string& v) { rc.tol = std::stod(v); });
  take("--seed", "seed", [&](const std::string& v) { rc.seed = std::stoi(v); });
  take("--seeds", "seeds", [&](const std::string& v) { rc.seeds = std::stoi(v); });
  take("--sigma", "sigma", [&](const std::string& v) { rc.sigma = v != "0"; });
  take("--eps", "eps", [&](const std::string& v) { rc.eps = std::stod(v); });
  take("--mass-tol", "mass_tol", [&](const std::string& v) { rc.mass_tol = std::stod(v); });
  take("--height-tol", "height_tol", [&](const std::string& v) { rc.height_tol = std::stod(v); });
  take("--profile", "profile", [&](const std::string& v) { rc.profile = v; });
  take("--report", "report", [&](const std::string& v) { rc.report = v; });
  take("--out", "out", [&](const std::string& v) { rc.out = v; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-peak solver for the nonlocal sinh-Poisson equation on (-1,1)"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunConfig rc;
  std::string config_path;

  auto add_shared = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat key = value config file");
    sub->add_option("--k", rc.k, "number of peaks");
    sub->add_option("--signs", rc.signs, "'alternating' or a +- pattern");
    sub->add_option("--xi", rc.xi, "comma-separated centers (skip the optimizer)");
    sub->add_option("--lambda", rc.lambda, "parameter for a single solve");
    sub->add_option("--lambda-range", rc.lambda_range, "sweep range start:end");
    sub->add_option("--factor", rc.factor, "sweep contraction factor in (0,1)");
    sub->add_option("--base-n", rc.base_n, "base mesh subdivision count");
    sub->add_option("--tol", rc.tol, "Newton sup-residual tolerance");
    sub->add_option("--seed", rc.seed, "RNG seed for multistarts");
    sub->add_option("--seeds", rc.seeds, "number of multistart seeds");
    sub->add_flag("--sigma,!--no-sigma", rc.sigma, "compute linearization sigmas");
    sub->add_option("--eps", rc.eps, "peak-window half-width for verification");
    sub->add_option("--mass-tol", rc.mass_tol, "local mass tolerance");
    sub->add_option("--height-tol", rc.height_tol, "peak height tolerance");
    sub->add_option("--profile", rc.profile, "profile CSV to verify");
    sub->add_option("--report", rc.report, "report JSON to verify");
    sub->add_option("--out", rc.out, "output directory");
    return sub;
  };

  CLI::App* optimize = add_shared(app.add_subcommand("optimize", "reduced-energy critical points"));
  CLI::App* solve = add_shared(app.add_subcommand("solve", "single solve at one lambda"));
  CLI::App* sweep = add_shared(app.add_subcommand("sweep", "lambda continuation sweep"));
  CLI::App* verify = add_shared(app.add_subcommand("verify", "check an emitted profile"));
  CLI::App* probe = add_shared(app.add_subcommand("probe", "boundary blow-down and conjecture"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    rc.command = sub->get_name();
    if (!config_path.empty()) merge_config_file(*sub, rc, config_path);
    fs::create_directories(rc.out);

    if (sub == optimize) return cmd_optimize(rc);
    if (sub == solve) return cmd_solve(rc);
    if (sub == sweep) return cmd_sweep(rc);
    if (sub == verify) return cmd_verify(rc);
    if (sub == probe) return cmd_probe(rc);
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const NoCriticalPoint& e) {
    std::fprintf(stderr, "optimizer: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
