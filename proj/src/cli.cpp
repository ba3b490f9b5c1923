#include "wpredict/cli.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wpredict/errors.hpp"
#include "wpredict/estimators.hpp"
#include "wpredict/predictive.hpp"
#include "wpredict/risksim.hpp"
#include "wpredict/scenario.hpp"
#include "wpredict/wasserstein.hpp"

namespace wpredict {

namespace {

Vector parse_vector_arg(const std::string& text, const char* flag) {
  Vector out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string piece =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      const double v = std::stod(piece, &used);
      if (used != piece.size() || !std::isfinite(v)) throw std::invalid_argument(piece);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ValidationError(std::string(flag) + ": cannot parse \"" + piece + "\" as a number");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) {
    throw ValidationError(std::string(flag) + ": expected a comma-separated list of numbers");
  }
  return out;
}

std::vector<double> read_numbers_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read file: " + path);
  std::vector<double> values;
  double x = 0.0;
  while (in >> x) values.push_back(x);
  if (!in.eof()) throw ValidationError("malformed number in file: " + path);
  return values;
}

SpdMatrix parse_cov_arg(const std::string& spec, std::size_t d, const char* flag) {
  if (spec.rfind("iso:", 0) == 0) {
    const Vector v = parse_vector_arg(spec.substr(4), flag);
    if (v.size() != 1) throw ValidationError(std::string(flag) + ": iso: takes one value");
    return SpdMatrix::isotropic(d, v[0]);
  }
  if (spec.rfind("diag:", 0) == 0) {
    const Vector v = parse_vector_arg(spec.substr(5), flag);
    if (v.size() != d) {
      throw ValidationError(std::string(flag) + ": diag: needs " + std::to_string(d) + " values");
    }
    return SpdMatrix::diagonal(v);
  }
  const std::vector<double> values = read_numbers_file(spec);
  if (values.size() != d * d) {
    throw ValidationError(std::string(flag) + ": expected " + std::to_string(d * d) +
                          " entries in " + spec + ", found " + std::to_string(values.size()));
  }
  Matrix m(d, d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      m(i, j) = values[i * d + j];
    }
  }
  return SpdMatrix::from_matrix(m);
}

std::size_t env_threads() {
  const char* v = std::getenv("WPREDICT_THREADS");
  if (v == nullptr || *v == '\0') return 0;
  if (v[0] == '-' || v[0] == '+') {
    throw ValidationError("WPREDICT_THREADS must be a nonnegative integer");
  }
  errno = 0;
  char* end = nullptr;
  const unsigned long long parsed = std::strtoull(v, &end, 10);
  if (errno != 0 || end == v || *end != '\0') {
    throw ValidationError("WPREDICT_THREADS must be a nonnegative integer");
  }
  return static_cast<std::size_t>(parsed);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

struct W2Args {
  std::string mean1, mean2;
  std::string cov1 = "iso:1";
  std::string cov2 = "iso:1";
  std::size_t empirical = 0;
  std::uint64_t seed = 12345;
};

int cmd_w2(const W2Args& a, std::ostream& out) {
  const Vector m1 = parse_vector_arg(a.mean1, "--mean1");
  const Vector m2 = parse_vector_arg(a.mean2, "--mean2");
  if (m1.size() != m2.size()) {
    throw ValidationError("--mean1 and --mean2 must have the same length");
  }
  const SpdMatrix c1 = parse_cov_arg(a.cov1, m1.size(), "--cov1");
  const SpdMatrix c2 = parse_cov_arg(a.cov2, m2.size(), "--cov2");
  const GaussianSpec ga{m1, c1};
  const GaussianSpec gb{m2, c2};
  const double closed = w2_gaussian(ga, gb);
  out << format_number(closed) << "\n";
  if (a.empirical > 0) {
    const EmpiricalCloud pa = sample_gaussian(ga, a.empirical, RandomStream{a.seed, 1});
    const EmpiricalCloud pb = sample_gaussian(gb, a.empirical, RandomStream{a.seed, 2});
    const double emp = empirical_w2_assignment(pa, pb).distance;
    out << "empirical " << format_number(emp) << "\n";
    if (closed > 0.0) {
      out << "rel_gap " << format_number((emp - closed) / closed) << "\n";
    } else {
      out << "abs_gap " << format_number(emp - closed) << "\n";
    }
  }
  return 0;
}

struct RiskArgs {
  std::string scenario;
  std::string out_csv;
  std::string svg;
  bool print_config = false;
};

int cmd_risk(const RiskArgs& a, std::ostream& out) {
  const Scenario sc = load_scenario_file(a.scenario);
  if (a.print_config) {
    out << scenario_to_json(sc) << "\n";
    return 0;
  }
  if (a.out_csv.empty()) {
    throw ValidationError("an output CSV path is required unless --print-config is given");
  }
  SimOptions opts;
  opts.threads = env_threads();
  const RiskCurve curve = simulate_risk(sc, opts);
  write_text_file(a.out_csv, risk_curve_csv(curve));
  if (!a.svg.empty()) {
    write_text_file(a.svg, risk_curve_svg(curve));
  }
  return 0;
}

struct DominanceArgs {
  std::string scenario;
};

int cmd_dominance(const DominanceArgs& a, std::ostream& out) {
  const Scenario sc = load_scenario_file(a.scenario);
  if (sc.estimators.size() != 2) {
    throw ValidationError("dominance requires a scenario with exactly 2 estimators");
  }
  SimOptions opts;
  opts.threads = env_threads();
  opts.keep_replicate_losses = true;
  const RiskCurve curve = simulate_risk(sc, opts);
  const DominanceReport rep = dominance_check(curve.select(0), curve.select(1));

  out << "baseline:   " << rep.baseline_id << "\n";
  out << "challenger: " << rep.challenger_id << "\n";
  out << "pairing:    " << (rep.paired ? "per-replicate" : "independent") << "\n";
  char line[160];
  std::snprintf(line, sizeof(line), "%14s %16s %16s %16s %12s\n", "mu_norm", "risk_base",
                "risk_chal", "gap", "z");
  out << line;
  for (const DominancePoint& p : rep.points) {
    std::snprintf(line, sizeof(line), "%14s %16s %16s %16s %12s\n",
                  format_number(p.mu_norm).c_str(), format_number(p.risk_base).c_str(),
                  format_number(p.risk_chal).c_str(), format_number(p.gap).c_str(),
                  format_number(p.z).c_str());
    out << line;
  }
  out << "VERDICT: " << verdict_name(rep.verdict) << "\n";
  return 0;
}

struct KubokawaArgs {
  std::size_t d = 1;
  std::size_t m = 1;
  std::string phi;
  std::string grid = "0:0.1:100";
  double limit_tol = 1e-2;
  double limit_w = 1e6;
  double const_scale = 1.0;
};

std::vector<double> parse_grid_spec(const std::string& spec) {
  double parts[3];
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t colon = spec.find(':', pos);
    const bool last = (i == 2);
    if (last != (colon == std::string::npos)) {
      throw ValidationError("--grid must look like start:step:stop");
    }
    const std::string piece = spec.substr(pos, last ? std::string::npos : colon - pos);
    try {
      std::size_t used = 0;
      parts[i] = std::stod(piece, &used);
      if (used != piece.size() || !std::isfinite(parts[i])) throw std::invalid_argument(piece);
    } catch (const std::exception&) {
      throw ValidationError("--grid: cannot parse \"" + piece + "\" as a number");
    }
    pos = colon + 1;
  }
  const double start = parts[0], step = parts[1], stop = parts[2];
  if (step <= 0.0) throw ValidationError("--grid step must be positive");
  if (stop < start) throw ValidationError("--grid stop must be at least start");
  const double count_f = std::floor((stop - start) / step + 1e-9) + 1.0;
  if (count_f > 1e7) throw ValidationError("--grid has too many points");
  const std::size_t count = static_cast<std::size_t>(count_f);
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k) {
    grid[k] = start + step * static_cast<double>(k);
  }
  return grid;
}

void read_phi_table(const std::string& path, std::vector<double>& ws, std::vector<double>& vals) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read phi table: " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double w = 0.0, v = 0.0;
    if (!(ls >> w)) {
      std::string junk;
      if (ls.clear(), ls >> junk) {
        throw ValidationError("phi table " + path + " line " + std::to_string(lineno) +
                              ": expected two numbers");
      }
      continue;  // blank or comment-only line
    }
    if (!(ls >> v)) {
      throw ValidationError("phi table " + path + " line " + std::to_string(lineno) +
                            ": expected two numbers per row");
    }
    std::string extra;
    if (ls >> extra) {
      throw ValidationError("phi table " + path + " line " + std::to_string(lineno) +
                            ": trailing content \"" + extra + "\"");
    }
    ws.push_back(w);
    vals.push_back(v);
  }
  if (ws.empty()) throw ValidationError("phi table " + path + " has no rows");
  for (std::size_t i = 0; i < ws.size(); ++i) {
    if (!std::isfinite(ws[i]) || ws[i] < 0.0) {
      throw ValidationError("phi table " + path + ": abscissae must be finite and nonnegative");
    }
    if (i > 0 && ws[i] <= ws[i - 1]) {
      throw ValidationError("phi table " + path + ": abscissae must be strictly increasing");
    }
  }
}

int cmd_check_kubokawa(const KubokawaArgs& a, std::ostream& out) {
  std::vector<double> grid = parse_grid_spec(a.grid);
  PhiFunction phi;
  const std::size_t d = a.d;
  const std::size_t m = a.m;
  if (a.phi == "phi0") {
    phi.eval = [d, m](double w) { return phi0(w, d, m); };
    phi.label = "phi0";
  } else if (a.phi == "const_c") {
    const double value = a.const_scale * equivariant_c(m);
    phi.eval = [value](double) { return value; };
    phi.label = a.const_scale == 1.0
                    ? std::string("const_c")
                    : "const_c*" + format_number(a.const_scale);
  } else if (a.phi.rfind("table:", 0) == 0) {
    std::vector<double> ws, vals;
    read_phi_table(a.phi.substr(6), ws, vals);
    phi.eval = [ws, vals](double w) {
      if (w <= ws.front()) return vals.front();
      if (w >= ws.back()) return vals.back();
      const std::size_t hi = static_cast<std::size_t>(
          std::upper_bound(ws.begin(), ws.end(), w) - ws.begin());
      const std::size_t lo = hi - 1;
      const double t = (w - ws[lo]) / (ws[hi] - ws[lo]);
      return vals[lo] + t * (vals[hi] - vals[lo]);
    };
    phi.label = a.phi;
    grid = ws;
  } else {
    throw ValidationError("--phi must be phi0, const_c, or table:<path>");
  }

  const KubokawaReport rep = check_kubokawa(phi, d, m, grid, a.limit_tol, a.limit_w);
  out << "phi: " << phi.label << "  d=" << d << "  m=" << m << "\n";
  out << "c: " << format_number(rep.c_value) << "\n";
  out << "condition (i) non-decreasing: ";
  if (rep.nondecreasing.ok) {
    out << "PASS\n";
  } else {
    out << "FAIL (first decrease at w=" << format_number(rep.nondecreasing.witness_w) << ")\n";
  }
  out << "condition (ii) limit matches c: ";
  if (rep.limit_matches_c.ok) {
    out << "PASS";
  } else {
    out << "FAIL";
  }
  out << " (phi(" << format_number(rep.limit_w) << ")=" << format_number(rep.limit_value)
      << ")\n";
  out << "condition (iii) phi >= phi0: ";
  if (rep.dominates_phi0.ok) {
    out << "PASS\n";
  } else {
    out << "FAIL (first violation at w=" << format_number(rep.dominates_phi0.witness_w)
        << ")\n";
  }
  const bool all = rep.nondecreasing.ok && rep.limit_matches_c.ok && rep.dominates_phi0.ok;
  out << "overall: " << (all ? "PASS" : "FAIL") << "\n";
  return 0;
}

struct EstimateArgs {
  std::string xbar;
  double s = std::numeric_limits<double>::quiet_NaN();
  std::size_t n = 0;
  std::string estimator;
  double sigma = 1.0;
};

int cmd_estimate(const EstimateArgs& a, std::ostream& out) {
  const EstimatorKind kind = kind_from_name(a.estimator);
  const Vector xbar = parse_vector_arg(a.xbar, "--xbar");
  if (a.n < 1) throw ValidationError("--n must be at least 1");

  const auto print_vector = [&](const char* label, const Vector& v) {
    out << label;
    for (double x : v) out << ' ' << format_number(x);
    out << "\n";
  };

  if (is_location_kind(kind)) {
    LocationScaleModel model;
    model.d = xbar.size();
    model.n = a.n;
    model.sigma_known = a.sigma;
    EstimatorSpec spec;
    spec.kind = kind;
    const PredictiveDensity p = bayes_predictive_location(xbar, spec, model);
    print_vector("mu_hat", p.mu_hat);
    return 0;
  }

  SufficientStats stats{xbar, a.s, a.n};
  if (kind == EstimatorKind::SteinVariance) {
    out << "sigma2_hat " << format_number(stein_variance(stats)) << "\n";
    return 0;
  }
  EstimatorSpec spec;
  spec.kind = kind;
  const LocScaleEstimate est = apply_locscale_estimator(spec, stats);
  print_vector("mu_hat", est.mu_hat);
  out << "sigma_hat " << format_number(est.sigma_hat) << "\n";
  return 0;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"predictive density estimation under Wasserstein-2 loss"};
  app.name("wpredict");
  app.require_subcommand(1);

  W2Args w2a;
  CLI::App* w2cmd = app.add_subcommand("w2", "Wasserstein-2 distance between two Gaussians");
  w2cmd->add_option("--mean1", w2a.mean1, "first mean, comma separated")->required();
  w2cmd->add_option("--mean2", w2a.mean2, "second mean, comma separated")->required();
  w2cmd->add_option("--cov1", w2a.cov1, "first covariance: iso:<v>, diag:<v,...>, or a file");
  w2cmd->add_option("--cov2", w2a.cov2, "second covariance: iso:<v>, diag:<v,...>, or a file");
  w2cmd->add_option("--empirical", w2a.empirical,
                    "also estimate from N sampled points per distribution");
  w2cmd->add_option("--seed", w2a.seed, "sampling seed for --empirical");

  RiskArgs ra;
  CLI::App* riskcmd = app.add_subcommand("risk", "simulate risk curves for a scenario");
  riskcmd->add_option("scenario", ra.scenario, "scenario JSON file")->required();
  riskcmd->add_option("out_csv", ra.out_csv, "output CSV path");
  riskcmd->add_option("--svg", ra.svg, "also write an SVG line chart");
  riskcmd->add_flag("--print-config", ra.print_config,
                    "echo the parsed scenario as canonical JSON and exit");

  DominanceArgs da;
  CLI::App* domcmd =
      app.add_subcommand("dominance", "compare two estimators across a risk grid");
  domcmd->add_option("scenario", da.scenario, "scenario JSON file with exactly 2 estimators")
      ->required();

  KubokawaArgs ka;
  CLI::App* kubcmd =
      app.add_subcommand("check-kubokawa", "check scale-function dominance conditions");
  kubcmd->add_option("--d", ka.d, "dimension")->required();
  kubcmd->add_option("--m", ka.m, "scale degrees of freedom")->required();
  kubcmd->add_option("--phi", ka.phi, "phi0, const_c, or table:<path>")->required();
  kubcmd->add_option("--grid", ka.grid, "evaluation grid start:step:stop");
  kubcmd->add_option("--limit-tol", ka.limit_tol, "tolerance for the limit condition");
  kubcmd->add_option("--limit-w", ka.limit_w, "where to probe the large-w limit");
  kubcmd->add_option("--const-scale", ka.const_scale, "multiplier for const_c");

  EstimateArgs ea;
  CLI::App* estcmd = app.add_subcommand("estimate", "apply an estimator to summary statistics");
  estcmd->add_option("--xbar", ea.xbar, "sample mean, comma separated")->required();
  estcmd->add_option("--s", ea.s, "scaled residual sum of squares");
  estcmd->add_option("--n", ea.n, "sample size")->required();
  estcmd->add_option("--estimator", ea.estimator, "estimator kind")->required();
  estcmd->add_option("--sigma", ea.sigma, "known noise scale for location estimators");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (w2cmd->parsed()) return cmd_w2(w2a, out);
    if (riskcmd->parsed()) return cmd_risk(ra, out);
    if (domcmd->parsed()) return cmd_dominance(da, out);
    if (kubcmd->parsed()) return cmd_check_kubokawa(ka, out);
    if (estcmd->parsed()) return cmd_estimate(ea, out);
    err << "error: no subcommand given\n";
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const SimulationError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace wpredict
