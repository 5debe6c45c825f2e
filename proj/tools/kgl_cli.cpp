// kgl: geometry atlas, propagator kernels, decay fits, quantum checks and
// the acceptance suite for the discrete Klein-Gordon equation on Z^2.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "kgl/acceptance.hpp"
#include "kgl/csv.hpp"
#include "kgl/decay.hpp"
#include "kgl/harmonic.hpp"
#include "kgl/parallel.hpp"
#include "kgl/propagator.hpp"
#include "kgl/singular.hpp"
#include "kgl/velocity.hpp"

namespace fs = std::filesystem;
using namespace kgl;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kResolution = 3, kAcceptance = 4, kTruncation = 5 };

struct RunConfig {
  double omega = 1.0, lambda1 = 1.0, lambda2 = 1.0;
  std::string out = "out";
  int workers = 0;  // 0: all cores
  int max_grid = QuadratureOptions{}.max_grid;

  // geometry
  int n_points = 512;
  int raster = 101;
  double delta = 0.05;
  // kernels
  double t = 10.0;
  int m = 0;
  int window = 30;
  // decay / quantum
  std::optional<double> t_min, t_max, dt;
  double track_v1 = 0.0, track_v2 = 0.0;
  int g_x1 = 0, g_x2 = 0;

  LatticeParams params() const { return {omega, lambda1, lambda2}; }
  QuadratureOptions quadrature() const {
    QuadratureOptions q;
    q.max_grid = max_grid;
    return q;
  }
  TimeGrid time_grid() const {
    TimeGrid g = TimeGrid::defaults(params());
    if (t_min) g.t_min = *t_min;
    if (t_max) g.t_max = *t_max;
    if (dt) g.dt = *dt;
    if (!(g.t_min > 0) || !(g.t_max > g.t_min) || !(g.dt > 0)) {
      throw ConfigError("time grid needs 0 < t_min < t_max and dt > 0");
    }
    return g;
  }
};

template <class T>
T parse_value(const std::string& key, const std::string& text) {
  std::istringstream is(text);
  is.imbue(std::locale::classic());
  T v{};
  if (!(is >> v) || !(is >> std::ws).eof()) {
    throw ConfigError("bad value for " + key + ": '" + text + "'");
  }
  return v;
}

// Flat "key = value" lines; '#' starts a comment. Dashes and underscores in
// keys are interchangeable.
std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '-', '_');
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

void apply_config(RunConfig& c, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    if (key == "omega") c.omega = parse_value<double>(key, value);
    else if (key == "lambda1") c.lambda1 = parse_value<double>(key, value);
    else if (key == "lambda2") c.lambda2 = parse_value<double>(key, value);
    else if (key == "out") c.out = value;
    else if (key == "workers") c.workers = parse_value<int>(key, value);
    else if (key == "max_grid") c.max_grid = parse_value<int>(key, value);
    else if (key == "n_points") c.n_points = parse_value<int>(key, value);
    else if (key == "raster") c.raster = parse_value<int>(key, value);
    else if (key == "delta") c.delta = parse_value<double>(key, value);
    else if (key == "t") c.t = parse_value<double>(key, value);
    else if (key == "m") c.m = parse_value<int>(key, value);
    else if (key == "window") c.window = parse_value<int>(key, value);
    else if (key == "t_min") c.t_min = parse_value<double>(key, value);
    else if (key == "t_max") c.t_max = parse_value<double>(key, value);
    else if (key == "dt") c.dt = parse_value<double>(key, value);
    else if (key == "track_v1") c.track_v1 = parse_value<double>(key, value);
    else if (key == "track_v2") c.track_v2 = parse_value<double>(key, value);
    else if (key == "g_x1") c.g_x1 = parse_value<int>(key, value);
    else if (key == "g_x2") c.g_x2 = parse_value<int>(key, value);
    else throw ConfigError("unknown config key '" + key + "'");
  }
}

void validate(const RunConfig& c) {
  (void)c.params();  // throws ConfigError
  if (c.workers < 0) throw ConfigError("workers must be >= 0");
  if (c.max_grid < 16) throw ConfigError("max-grid must be at least 16");
  if (c.n_points < 64) throw ConfigError("n-points must be at least 64");
  if (c.raster < 2) throw ConfigError("raster must be at least 2");
  if (!(c.delta > 0)) throw ConfigError("delta must be positive");
  if (c.m < -1 || c.m > 1) throw ConfigError("m must be -1, 0 or 1");
  if (c.window < 0) throw ConfigError("window must be non-negative");
  if (!(c.t >= 0)) throw ConfigError("t must be non-negative");
}

std::ofstream open_out(const RunConfig& c, const std::string& name,
                       std::ios::openmode mode = std::ios::out) {
  csv::ensure_directory(c.out);
  const fs::path path = fs::path(c.out) / name;
  std::ofstream os(path, mode | std::ios::trunc);
  if (!os) throw Error("cannot write " + path.string());
  return os;
}

void write_polylines(const RunConfig& c, const std::string& name,
                     std::initializer_list<const CurvePolyline*> curves) {
  auto os = open_out(c, name, std::ios::binary);
  os << "label,index,c1,c2\n";
  for (const CurvePolyline* curve : curves) write_polyline_rows(os, *curve);
  std::cout << "wrote " << (fs::path(c.out) / name).string() << "\n";
}

int cmd_geometry(const RunConfig& c) {
  const LatticeParams p = c.params();
  const auto g1 = sample_gamma1(p, c.n_points);
  const auto g2 = sample_gamma2(p, c.n_points);
  const VelocityAtlas atlas = build_atlas(p, c.n_points);
  write_polylines(c, "gamma1.csv", {&g1[0], &g1[1]});
  write_polylines(c, "gamma2.csv", {&g2[0], &g2[1]});
  write_polylines(c, "phi1.csv", {&atlas.phi[0], &atlas.phi[1]});
  write_polylines(c, "psi1.csv", {&atlas.psi[0]});
  write_polylines(c, "psi2.csv", {&atlas.psi[1]});

  {
    const ABPoint ab = find_astar(p);
    auto os = open_out(c, "astar.csv", std::ios::binary);
    os << "a,b\n" << csv::fmt(ab.a) << ',' << csv::fmt(ab.b) << '\n';
  }
  {
    auto os = open_out(c, "kstar.csv", std::ios::binary);
    os << "k1,k2\n";
    for (const TorusPoint& k : kstar_points(p)) os << csv::fmt(k.k1) << ',' << csv::fmt(k.k2) << '\n';
  }
  {
    auto os = open_out(c, "v3.csv", std::ios::binary);
    os << "v1,v2\n";
    for (const auto& v : atlas.v3) os << csv::fmt(v.x()) << ',' << csv::fmt(v.y()) << '\n';
  }
  {
    // Raster over [-1.25 vmax, 1.25 vmax]^2.
    auto os = open_out(c, "regions.csv", std::ios::binary);
    os << "v1,v2,region\n";
    const double r = 1.25 * atlas.max_speed;
    const int n = c.raster;
    std::vector<std::string> tags(static_cast<std::size_t>(n) * n);
    parallel_for(tags.size(), [&](std::size_t idx) {
      const int i = static_cast<int>(idx) / n, j = static_cast<int>(idx) % n;
      const Vec2 v(-r + 2 * r * i / (n - 1), -r + 2 * r * j / (n - 1));
      tags[idx] = to_string(classify_velocity(atlas, v, c.delta).region);
    });
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        os << csv::fmt(-r + 2 * r * i / (n - 1)) << ',' << csv::fmt(-r + 2 * r * j / (n - 1)) << ','
           << tags[static_cast<std::size_t>(i) * n + j] << '\n';
      }
    }
  }
  std::cout << "max group speed " << csv::fmt(atlas.max_speed) << "\n";
  return kOk;
}

int cmd_kernels(const RunConfig& c) {
  const PropagatorField f =
      kernel_field(c.params(), c.m, c.t, Window::square(c.window), c.quadrature());
  const std::string stem = "kernel_m" + std::string(c.m < 0 ? "neg1" : std::to_string(c.m));
  {
    auto os = open_out(c, stem + ".csv", std::ios::binary);
    write_field_csv(os, f);
  }
  {
    auto os = open_out(c, stem + ".kgf", std::ios::binary);
    write_field_binary(os, f);
  }
  std::cout << "wrote " << (fs::path(c.out) / stem).string() << ".{csv,kgf} (grid " << f.grid_n
            << ")\n";
  return kOk;
}

int cmd_decay(const RunConfig& c) {
  const auto rows = verify_regions(c.params(), c.delta, c.time_grid(), c.m, c.quadrature());
  {
    auto os = open_out(c, "decay.csv", std::ios::binary);
    write_fit_csv(os, rows);
  }
  {
    auto os = open_out(c, "decay.txt", std::ios::binary);
    write_fit_text(os, rows);
  }
  write_fit_text(std::cout, rows);
  bool ok = true;
  for (const auto& r : rows) ok = ok && r.bound_satisfied;
  return ok ? kOk : kFailure;
}

int cmd_quantum(const RunConfig& c) {
  const LatticeParams p = c.params();
  const auto f = ComplexLatticeFunction::delta({0, 0});
  const auto g = ComplexLatticeFunction::delta({c.g_x1, c.g_x2}, Complex(1, 1) / std::sqrt(2.0));
  const LRReport rep =
      lr_verify(p, f, g, c.time_grid(), c.delta, Vec2(c.track_v1, c.track_v2), c.quadrature());
  {
    auto os = open_out(c, "quantum.csv", std::ios::binary);
    write_lr_csv(os, rep);
  }
  std::cout << "region " << to_string(rep.worst_region) << ", exponent " << csv::fmt(rep.fit.exponent);
  if (rep.expected == 0) std::cout << ", mu " << csv::fmt(rep.mu);
  std::cout << ", " << (rep.pass ? "pass" : "FAIL") << "\n";
  return rep.pass ? kOk : kFailure;
}

int cmd_acceptance(bool list, const std::vector<int>& only) {
  if (list) {
    list_acceptance(std::cout);
    return kOk;
  }
  const auto results = run_acceptance(std::cout, only);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? kOk : kAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete Klein-Gordon propagators on Z^2"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<double> omega, lambda1, lambda2;
  std::optional<std::string> out;
  std::optional<int> workers, max_grid;
  std::string config_path;
  app.add_option("--omega", omega, "mass parameter (>= 0)");
  app.add_option("--lambda1", lambda1, "coupling along x1 (> 0)");
  app.add_option("--lambda2", lambda2, "coupling along x2 (> 0)");
  app.add_option("--out", out, "output directory");
  app.add_option("--config", config_path, "flat key=value config file");
  app.add_option("--workers", workers, "worker threads (0 = all cores)");
  app.add_option("--max-grid", max_grid, "largest quadrature grid per axis");

  std::optional<int> n_points, raster, m, window, g_x1, g_x2;
  std::optional<double> delta, t, t_min, t_max, dt, track_v1, track_v2;

  auto* geometry = app.add_subcommand("geometry", "export curves, cusps and region raster");
  geometry->add_option("--n-points", n_points, "samples per curve");
  geometry->add_option("--raster", raster, "velocity raster size per axis");
  geometry->add_option("--delta", delta, "region neighbourhood width");

  auto* kernels = app.add_subcommand("kernels", "kernel field on a square window");
  kernels->add_option("--t", t, "time");
  kernels->add_option("-m,--m", m, "kernel index -1, 0 or 1");
  kernels->add_option("--window", window, "half-width of the window");

  auto* decay = app.add_subcommand("decay", "fit decay exponents per region");
  decay->add_option("-m,--m", m, "kernel index -1, 0 or 1");
  decay->add_option("--delta", delta, "region neighbourhood width");
  decay->add_option("--t-min", t_min);
  decay->add_option("--t-max", t_max);
  decay->add_option("--dt", dt);

  auto* quantum = app.add_subcommand("quantum", "Weyl commutator decay for point-supported f, g");
  quantum->add_option("--delta", delta, "region neighbourhood width");
  quantum->add_option("--t-min", t_min);
  quantum->add_option("--t-max", t_max);
  quantum->add_option("--dt", dt);
  quantum->add_option("--g-x1", g_x1, "support of g");
  quantum->add_option("--g-x2", g_x2, "support of g");
  quantum->add_option("--track-v1", track_v1, "g moves with round(v t)");
  quantum->add_option("--track-v2", track_v2);

  bool list = false;
  std::vector<int> only;
  auto* acceptance = app.add_subcommand("acceptance", "run the acceptance criteria");
  acceptance->add_flag("--list", list, "print the criteria without running them");
  acceptance->add_option("--only", only, "criterion ids to run")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    RunConfig c;
    if (!config_path.empty()) apply_config(c, read_config_file(config_path));
    auto take = [](auto& dst, const auto& src) {
      if (src) dst = *src;
    };
    take(c.omega, omega);
    take(c.lambda1, lambda1);
    take(c.lambda2, lambda2);
    take(c.out, out);
    take(c.workers, workers);
    take(c.max_grid, max_grid);
    take(c.n_points, n_points);
    take(c.raster, raster);
    take(c.delta, delta);
    take(c.t, t);
    take(c.m, m);
    take(c.window, window);
    take(c.g_x1, g_x1);
    take(c.g_x2, g_x2);
    take(c.track_v1, track_v1);
    take(c.track_v2, track_v2);
    if (t_min) c.t_min = t_min;
    if (t_max) c.t_max = t_max;
    if (dt) c.dt = dt;
    validate(c);
    if (c.workers > 0) set_worker_count(c.workers);

    if (*geometry) return cmd_geometry(c);
    if (*kernels) return cmd_kernels(c);
    if (*decay) return cmd_decay(c);
    if (*quantum) return cmd_quantum(c);
    if (*acceptance) return cmd_acceptance(list, only);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const ResolutionError& e) {
    std::cerr << "resolution error: " << e.what() << "\n";
    return kResolution;
  } catch (const TruncationError& e) {
    std::cerr << "truncation error: " << e.what() << "\n";
    return kTruncation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}
