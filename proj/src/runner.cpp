#include "dqm/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "dqm/checks.hpp"
#include "dqm/errors.hpp"
#include "dqm/evolution.hpp"
#include "dqm/functionals.hpp"
#include "dqm/io.hpp"
#include "dqm/operators.hpp"

namespace dqm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* scenario_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::plane_wave: return "plane_wave";
    case ScenarioKind::gaussian_packet: return "gaussian_packet";
    case ScenarioKind::harmonic_ground: return "harmonic_ground";
    case ScenarioKind::harmonic_coherent: return "harmonic_coherent";
    case ScenarioKind::two_particle_product: return "two_particle_product";
    case ScenarioKind::two_particle_entangled: return "two_particle_entangled";
    case ScenarioKind::from_file: return "from_file";
  }
  return "unknown";
}

ScenarioKind scenario_from_name(const std::string& s) {
  for (auto k : {ScenarioKind::plane_wave, ScenarioKind::gaussian_packet,
                 ScenarioKind::harmonic_ground, ScenarioKind::harmonic_coherent,
                 ScenarioKind::two_particle_product,
                 ScenarioKind::two_particle_entangled, ScenarioKind::from_file})
    if (s == scenario_name(k)) return k;
  throw ConfigError("unknown scenario: " + s);
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

ScenarioConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  ScenarioConfig cfg;
  if (!j.contains("scenario")) throw ConfigError("config: 'scenario' missing");
  cfg.scenario = scenario_from_name(j.at("scenario").get<std::string>());
  if (!j.contains("grid")) throw ConfigError("config: 'grid' missing");
  const json& grid = j.at("grid");
  cfg.extents = get_or(grid, "extents", std::vector<double>{});
  cfg.points = get_or(grid, "points", std::vector<int>{});
  cfg.masses = get_or(grid, "masses", std::vector<double>{});
  if (cfg.masses.empty()) cfg.masses.assign(cfg.points.size(), 1.0);

  const json phys = j.value("physics", json::object());
  cfg.hbar = get_or(phys, "hbar", 1.0);
  cfg.lambda = get_or(phys, "lambda", 0.0);
  const json pot = phys.value("potential", json::object());
  const std::string pot_type = get_or<std::string>(pot, "type", "none");
  if (pot_type == "none")
    cfg.potential = PotentialKind::none;
  else if (pot_type == "harmonic")
    cfg.potential = PotentialKind::harmonic;
  else
    throw ConfigError("unknown potential type: " + pot_type);
  cfg.omega = get_or(pot, "omega", 1.0);

  const json state = j.value("state", json::object());
  cfg.x0 = get_or(state, "x0", std::vector<double>{});
  cfg.p0 = get_or(state, "p0", std::vector<double>{});
  cfg.sigma = get_or(state, "sigma", std::vector<double>{});
  cfg.mixing_angle = get_or(state, "mixing_angle", cfg.mixing_angle);
  cfg.state_file = get_or<std::string>(state, "file", "");

  const json integ = j.value("integrator", json::object());
  const std::string mode = get_or<std::string>(integ, "mode", "linear");
  if (mode == "linear")
    cfg.mode = EvolveMode::linear;
  else if (mode == "classical")
    cfg.mode = EvolveMode::classical;
  else
    throw ConfigError("unknown integrator mode: " + mode);
  cfg.dt = get_or(integ, "dt", cfg.dt);
  cfg.steps = get_or(integ, "steps", cfg.steps);
  cfg.stride = get_or(integ, "stride", cfg.stride);
  cfg.seed = get_or<std::uint64_t>(integ, "seed", cfg.seed);
  cfg.ensemble_size = get_or(integ, "ensemble_size", cfg.ensemble_size);

  const json sweep = j.value("sweep", json::object());
  cfg.sweep_lambdas = get_or(sweep, "lambdas", cfg.sweep_lambdas);

  const json output = j.value("output", json::object());
  cfg.write_snapshots = get_or(output, "snapshots", cfg.write_snapshots);
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(is)),
                   std::istreambuf_iterator<char>());
  return config_from_json_text(text);
}

std::string config_to_json_text(const ScenarioConfig& cfg) {
  json j;
  j["scenario"] = scenario_name(cfg.scenario);
  j["grid"] = {{"extents", cfg.extents},
               {"points", cfg.points},
               {"masses", cfg.masses}};
  j["physics"] = {
      {"hbar", cfg.hbar},
      {"lambda", cfg.lambda},
      {"potential",
       {{"type", cfg.potential == PotentialKind::harmonic ? "harmonic" : "none"},
        {"omega", cfg.omega}}}};
  j["state"] = {{"x0", cfg.x0},
                {"p0", cfg.p0},
                {"sigma", cfg.sigma},
                {"mixing_angle", cfg.mixing_angle},
                {"file", cfg.state_file}};
  j["integrator"] = {
      {"mode", cfg.mode == EvolveMode::classical ? "classical" : "linear"},
      {"dt", cfg.dt},
      {"steps", cfg.steps},
      {"stride", cfg.stride},
      {"seed", cfg.seed},
      {"ensemble_size", cfg.ensemble_size}};
  j["sweep"] = {{"lambdas", cfg.sweep_lambdas}};
  j["output"] = {{"snapshots", cfg.write_snapshots}};
  return j.dump(2) + "\n";
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write: " + path.string());
  os << text;
  if (!os) throw ConfigError("write failed: " + path.string());
}

json observables_json(const ObservableRecord& rec) {
  return json{{"time", rec.time},
              {"norm", rec.norm},
              {"energy", rec.energy},
              {"x_mean", rec.x_mean},
              {"p_mean", rec.p_mean},
              {"pcl_mean", rec.pcl_mean},
              {"width", rec.width},
              {"q_mean", rec.q_mean},
              {"fisher", rec.fisher},
              {"mask_fraction", rec.mask_point_fraction}};
}

void write_series_csv(const Trajectory& traj, const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write: " + path.string());
  const int rank = traj.snapshots.front().grid->rank();
  os << "t,norm,energy";
  for (int a = 0; a < rank; ++a) os << ",x_mean_" << a;
  for (int a = 0; a < rank; ++a) os << ",p_mean_" << a;
  for (int a = 0; a < rank; ++a) os << ",pcl_mean_" << a;
  for (int a = 0; a < rank; ++a) os << ",width_" << a;
  os << ",q_mean,fisher,continuity_residual\n";
  for (int n = 0; n < traj.stamp_count(); ++n) {
    const auto& r = traj.observables[n];
    os << format_double(r.time) << ',' << format_double(r.norm) << ','
       << format_double(r.energy);
    for (double v : r.x_mean) os << ',' << format_double(v);
    for (double v : r.p_mean) os << ',' << format_double(v);
    for (double v : r.pcl_mean) os << ',' << format_double(v);
    for (double v : r.width) os << ',' << format_double(v);
    os << ',' << format_double(r.q_mean) << ',' << format_double(r.fisher);
    if (n > 0 && n < traj.stamp_count() - 1)
      os << ',' << format_double(continuity_residual(traj, n));
    else
      os << ",nan";
    os << '\n';
  }
}

int run_analyze(const ScenarioConfig& cfg, const fs::path& out) {
  const WaveField w = build_scenario(cfg);
  const double lambda = cfg.lambda;
  const PolarField p = to_polar(w);
  const RealField q = quantum_potential(p, *w.psi.grid, cfg.hbar);
  double q_min = std::numeric_limits<double>::infinity();
  double q_max = -q_min;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (p.node_mask[i]) continue;
    q_min = std::min(q_min, q[i]);
    q_max = std::max(q_max, q[i]);
  }
  json rep;
  rep["lambda"] = lambda;
  rep["kinetic_expectation"] = kinetic_deformed_expectation(w, lambda);
  rep["classical_momentum_mean"] = classical_momentum_expectation(w);
  rep["factorization_residual"] = factorization_residual(w);
  rep["q_min"] = q_min;
  rep["q_max"] = q_max;
  rep["mask_fraction"] = p.mask_point_fraction;
  rep["lambda_outside_canonical"] = lambda < 0.0 || lambda > 1.0;
  write_text(out / "report.json", rep.dump(2) + "\n");
  return 0;
}

int run_evolve(const ScenarioConfig& cfg, const fs::path& out) {
  const WaveField w = build_scenario(cfg);
  const Trajectory traj = cfg.mode == EvolveMode::classical
                              ? evolve_classical(w, cfg.dt, cfg.steps, cfg.stride)
                              : evolve_linear(w, cfg.dt, cfg.steps, cfg.stride);
  write_series_csv(traj, out / "series.csv");
  if (cfg.write_snapshots) {
    fs::create_directory(out / "snaps");
    for (int n = 0; n < traj.stamp_count(); ++n) {
      const int step =
          static_cast<int>(std::llround(traj.times[n] / cfg.dt));
      write_field_binary(traj.snapshots[n],
                         (out / "snaps" /
                          ("snap_" + std::to_string(step) + ".bin"))
                             .string());
    }
  }
  double drift = 0.0;
  for (const auto& r : traj.observables)
    drift = std::max(drift, std::abs(r.norm - 1.0));
  json rep;
  rep["mode"] = cfg.mode == EvolveMode::classical ? "classical" : "linear";
  rep["stamps"] = traj.stamp_count();
  rep["norm_drift"] = drift;
  rep["norm_tolerance"] = traj.norm_tolerance;
  rep["final"] = observables_json(traj.observables.back());
  rep["lambda_outside_canonical"] = cfg.lambda < 0.0 || cfg.lambda > 1.0;
  write_text(out / "report.json", rep.dump(2) + "\n");
  return 0;
}

int run_sweep(const ScenarioConfig& cfg, const fs::path& out) {
  const WaveField w = build_scenario(cfg);
  const Trajectory traj = cfg.mode == EvolveMode::classical
                              ? evolve_classical(w, cfg.dt, cfg.steps, cfg.stride)
                              : evolve_linear(w, cfg.dt, cfg.steps, cfg.stride);
  std::ofstream os(out / "series.csv");
  if (!os) throw ConfigError("cannot write sweep csv");
  os << "lambda,xi,kinetic_expectation,fisher_part,action_total\n";
  json rows = json::array();
  for (double lambda : cfg.sweep_lambdas) {
    const double xi = xi_of_lambda(lambda, cfg.hbar, w.psi.grid->mass(0));
    const double kin = kinetic_deformed_expectation(w, lambda);
    const ActionBreakdown br = action_density(traj, lambda);
    os << format_double(lambda) << ',' << format_double(xi) << ','
       << format_double(kin) << ',' << format_double(br.fisher_part) << ','
       << format_double(br.total) << '\n';
    rows.push_back({{"lambda", lambda},
                    {"xi", xi},
                    {"kinetic_expectation", kin},
                    {"fisher_part", br.fisher_part},
                    {"action_total", br.total}});
  }
  json rep;
  rep["rows"] = rows;
  rep["lambda_outside_canonical"] = [&] {
    for (double l : cfg.sweep_lambdas)
      if (l < 0.0 || l > 1.0) return true;
    return false;
  }();
  write_text(out / "report.json", rep.dump(2) + "\n");
  return 0;
}

int run_check(const ScenarioConfig& cfg, const fs::path& out) {
  const WaveField w = build_scenario(cfg);
  const auto results = run_invariant_checks(w);
  json checks = json::array();
  for (const auto& r : results)
    checks.push_back({{"name", r.name},
                      {"measured", r.measured},
                      {"tolerance", r.tolerance},
                      {"pass", r.pass}});
  const bool ok = all_passed(results);
  json rep;
  rep["checks"] = checks;
  rep["passed"] = ok;
  rep["lambda_outside_canonical"] = cfg.lambda < 0.0 || cfg.lambda > 1.0;
  write_text(out / "report.json", rep.dump(2) + "\n");
  return ok ? 0 : 1;
}

}  // namespace

int run_command(const ScenarioConfig& cfg, Command cmd,
                const std::string& out_dir) {
  validate_config(cfg);
  const fs::path out(out_dir);
  bool created = false;
  if (fs::exists(out)) {
    if (!fs::is_directory(out) || !fs::is_empty(out))
      throw ConfigError("output directory must be absent or empty: " +
                        out_dir);
  } else {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw ConfigError("cannot create output directory: " + out_dir);
    created = true;
  }
  try {
    write_text(out / "config.json", config_to_json_text(cfg));
    switch (cmd) {
      case Command::analyze: return run_analyze(cfg, out);
      case Command::evolve: return run_evolve(cfg, out);
      case Command::sweep_lambda: return run_sweep(cfg, out);
      case Command::check: return run_check(cfg, out);
    }
    throw ConfigError("unknown command");
  } catch (...) {
    // partial outputs are removed; the directory itself only if we made it
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(out, ec))
      fs::remove_all(entry.path(), ec);
    if (created) fs::remove(out, ec);
    throw;
  }
}

}  // namespace dqm
