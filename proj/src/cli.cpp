#include "kshyp/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "kshyp/bounds.hpp"
#include "kshyp/elliptic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace kshyp {

namespace {

// Rejects keys outside `allowed` so typos never fall back to defaults silently.
void check_keys(const json &obj, const std::set<std::string> &allowed, const std::string &where) {
  if (!obj.is_object()) throw ScenarioError(where + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) throw ScenarioError(where + ": unknown key '" + it.key() + "'");
}

template <class T> T get_or(const json &obj, const std::string &key, T fallback, const std::string &where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception &e) {
    throw ScenarioError(where + "." + key + ": " + e.what());
  }
}

ProfileSpec parse_profile(const json &j, const std::string &where) {
  check_keys(j, {"family", "amplitude", "width"}, where);
  ProfileSpec p;
  p.family = get_or<std::string>(j, "family", p.family, where);
  p.amplitude = get_or(j, "amplitude", p.amplitude, where);
  p.width = get_or(j, "width", p.width, where);
  if (!(p.width > 0.0) || !std::isfinite(p.amplitude)) throw ScenarioError(where + ": need width > 0, finite amplitude");
  return p;
}

json profile_json(const ProfileSpec &p) {
  return {{"family", p.family}, {"amplitude", p.amplitude}, {"width", p.width}};
}

json constants_json(const DispersiveConstants &c) {
  return {{"n", c.n}, {"delta_n", c.delta_n}, {"c_tilde", c.c_tilde}, {"provenance", to_string(c.provenance)}};
}

void read_constants(const json &j, DispersiveConstants &c, const std::string &where) {
  check_keys(j, {"n", "delta_n", "c_tilde", "provenance"}, where);
  if (j.contains("n") && j.at("n").get<int>() != c.n) throw ScenarioError(where + ": dimension mismatch");
  c.delta_n = get_or(j, "delta_n", c.delta_n, where);
  c.c_tilde = get_or(j, "c_tilde", c.c_tilde, where);
  if (j.contains("provenance")) {
    try {
      c.provenance = provenance_from_string(j.at("provenance").get<std::string>());
    } catch (const std::exception &e) {
      throw ScenarioError(where + ".provenance: " + e.what());
    }
  }
}

json read_json_file(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception &e) {
    throw ScenarioError("'" + path.string() + "': " + e.what());
  }
}

void write_json(const fs::path &path, const json &j) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
}

void prepare(const Scenario &s, const fs::path &out) {
  fs::create_directories(out);
  write_json(out / "manifest.json", manifest(s));
}

// Heat flow of u0 as a trajectory; the frozen coefficient for verify-linear.
Trajectory heat_trajectory(const RadialField &u0, const SolverConfig &cfg) {
  Trajectory tr(cfg.dt, cfg.p);
  tr.push(u0);
  for (std::size_t m = 1; m <= cfg.num_steps(); ++m) tr.push(apply_heat(tr.state(m - 1), cfg.dt));
  return tr;
}

int report_exit(const json &report, const fs::path &out, bool pass) {
  write_json(out / "report.json", report);
  std::cout << report.dump(2) << '\n';
  return pass ? kExitPass : kExitCheckFailed;
}

}  // namespace

RadialField ProfileSpec::sample(const RadialGrid &grid) const {
  const double a = amplitude, w = width;
  if (family == "zero") return RadialField(grid);
  if (family == "gaussian") return RadialField::sample(grid, [=](double r) { return a * std::exp(-r * r / (2 * w * w)); });
  if (family == "sech") return RadialField::sample(grid, [=](double r) {
      const double s = 1.0 / std::cosh(r / w);
      return a * s * s;
    });
  if (family == "bump") return RadialField::sample(grid, [=](double r) { return a * r * std::exp(-r * r / (2 * w * w)); });
  throw ScenarioError("unknown profile family '" + family + "'");
}

RadialField Scenario::initial_field() const { return initial.sample(config.grid); }

Forcing Scenario::forcing() const { return Forcing{forcing_signal, forcing_profile.sample(config.grid)}; }

Scenario parse_scenario(const json &j) {
  check_keys(j, {"name", "config", "initial", "forcing", "constants", "checks"}, "scenario");
  Scenario s;
  s.name = get_or<std::string>(j, "name", s.name, "scenario");

  const json cj = j.value("config", json::object());
  check_keys(cj,
             {"n", "p", "alpha", "gamma", "chi", "r_max", "nodes", "dt", "t_end", "rho", "picard_tol",
              "picard_max_iters", "heun", "resolvent_constant", "c_hat", "sigma_margin"},
             "config");
  SolverConfig &c = s.config;
  c.n = get_or(cj, "n", c.n, "config");
  c.p = get_or(cj, "p", c.p, "config");
  c.alpha = get_or(cj, "alpha", c.alpha, "config");
  c.gamma = get_or(cj, "gamma", c.gamma, "config");
  c.chi = get_or(cj, "chi", c.chi, "config");
  c.dt = get_or(cj, "dt", c.dt, "config");
  c.t_end = get_or(cj, "t_end", c.t_end, "config");
  c.rho = get_or(cj, "rho", c.rho, "config");
  c.picard_tol = get_or(cj, "picard_tol", c.picard_tol, "config");
  c.picard_max_iters = get_or(cj, "picard_max_iters", c.picard_max_iters, "config");
  c.heun = get_or(cj, "heun", c.heun, "config");
  c.resolvent_constant = get_or(cj, "resolvent_constant", c.resolvent_constant, "config");
  c.c_hat = get_or(cj, "c_hat", c.c_hat, "config");
  c.sigma_margin = get_or(cj, "sigma_margin", c.sigma_margin, "config");
  try {
    c.grid = RadialGrid(c.n, get_or(cj, "r_max", c.grid.r_max(), "config"),
                        get_or<std::size_t>(cj, "nodes", c.grid.size(), "config"));
    c.validate();
  } catch (const std::invalid_argument &e) {
    throw ScenarioError(e.what());
  }

  if (j.contains("initial")) s.initial = parse_profile(j.at("initial"), "initial");
  if (s.initial.family == "bump") throw ScenarioError("initial: 'bump' is a forcing profile");

  const json fj = j.value("forcing", json::object());
  check_keys(fj, {"profile", "ap", "c0"}, "forcing");
  if (fj.contains("profile")) s.forcing_profile = parse_profile(fj.at("profile"), "forcing.profile");
  try {
    std::vector<TrigTerm> terms;
    for (const auto &t : fj.value("ap", json::array())) {
      check_keys(t, {"lambda", "a", "b"}, "forcing.ap");
      terms.push_back({t.at("lambda").get<double>(), t.value("a", 0.0), t.value("b", 0.0)});
    }
    s.forcing_signal.ap_part = TrigPolynomial(std::move(terms));
    for (const auto &t : fj.value("c0", json::array())) {
      check_keys(t, {"c", "kappa", "shape"}, "forcing.c0");
      DecayingTerm d{t.at("c").get<double>(), t.at("kappa").get<double>(),
                     decay_shape_from_string(t.value("shape", std::string("exponential")))};
      d.validate();
      s.forcing_signal.c0_part.push_back(d);
    }
  } catch (const std::exception &e) {
    throw ScenarioError(std::string("forcing: ") + e.what());
  }

  s.constants = DispersiveConstants::defaults(c.n);
  if (j.contains("constants")) read_constants(j.at("constants"), s.constants, "constants");
  try {
    s.constants.validate();
  } catch (const std::invalid_argument &e) {
    throw ScenarioError(std::string("constants: ") + e.what());
  }

  const json kj = j.value("checks", json::object());
  check_keys(kj, {"epsilon", "window_start", "window_length", "tau_min", "burn_in", "snapshots", "calibration_times"},
             "checks");
  CheckOptions &k = s.checks;
  k.epsilon = get_or(kj, "epsilon", k.epsilon, "checks");
  k.window_start = get_or(kj, "window_start", k.window_start, "checks");
  k.window_length = get_or(kj, "window_length", k.window_length, "checks");
  k.tau_min = get_or(kj, "tau_min", k.tau_min, "checks");
  k.burn_in = get_or(kj, "burn_in", k.burn_in, "checks");
  k.snapshots = get_or(kj, "snapshots", k.snapshots, "checks");
  if (kj.contains("calibration_times")) {
    k.calibration_times = get_or(kj, "calibration_times", k.calibration_times, "checks");
  } else {
    for (int i = 0; i < 16; ++i) k.calibration_times.push_back(0.05 * std::pow(200.0, i / 15.0));
  }
  if (!(k.epsilon > 0.0) || !(k.window_length > 0.0) || k.tau_min < 0.0 || k.burn_in < 0.0)
    throw ScenarioError("checks: need epsilon > 0, window_length > 0, tau_min >= 0, burn_in >= 0");
  for (double t : k.snapshots)
    if (!(t >= 0.0 && t <= c.t_end)) throw ScenarioError("checks.snapshots: time outside [0, t_end]");
  for (double t : k.calibration_times)
    if (!(t > 0.0)) throw ScenarioError("checks.calibration_times: need t > 0");
  return s;
}

Scenario load_scenario(const fs::path &path) {
  Scenario s = parse_scenario(read_json_file(path));
  s.source = path;
  return s;
}

void apply_constants_file(Scenario &s, const fs::path &path) {
  json j = read_json_file(path);
  read_constants(j, s.constants, path.string());
  try {
    s.constants.validate();
  } catch (const std::invalid_argument &e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
}

json manifest(const Scenario &s) {
  const SolverConfig &c = s.config;
  json ap = json::array(), c0 = json::array();
  for (const auto &t : s.forcing_signal.ap_part.terms()) ap.push_back({{"lambda", t.lambda}, {"a", t.a}, {"b", t.b}});
  for (const auto &d : s.forcing_signal.c0_part)
    c0.push_back({{"c", d.c}, {"kappa", d.kappa}, {"shape", to_string(d.shape)}});
  const Rates r = rates(c, s.constants);
  return {{"name", s.name},
          {"source", s.source.string()},
          {"config",
           {{"n", c.n}, {"p", c.p}, {"alpha", c.alpha}, {"gamma", c.gamma}, {"chi", c.chi},
            {"r_max", c.grid.r_max()}, {"nodes", c.grid.size()}, {"dt", c.dt}, {"t_end", c.t_end},
            {"rho", c.rho}, {"picard_tol", c.picard_tol}, {"picard_max_iters", c.picard_max_iters},
            {"heun", c.heun}, {"resolvent_constant", c.resolvent_constant}, {"c_hat", c.c_hat},
            {"sigma_margin", c.sigma_margin}}},
          {"initial", profile_json(s.initial)},
          {"forcing", {{"profile", profile_json(s.forcing_profile)}, {"ap", ap}, {"c0", c0}}},
          {"constants", constants_json(s.constants)},
          {"checks",
           {{"epsilon", s.checks.epsilon}, {"window_start", s.checks.window_start},
            {"window_length", s.checks.window_length}, {"tau_min", s.checks.tau_min},
            {"burn_in", s.checks.burn_in}, {"snapshots", s.checks.snapshots},
            {"calibration_times", s.checks.calibration_times}}},
          {"derived",
           {{"sigma", r.sigma}, {"sigma_eff", (1.0 - c.sigma_margin) * r.sigma},
            {"contraction_factor", c.contraction_factor()}, {"num_steps", c.num_steps()}}},
          {"note", "C (resolvent) and C^ (decay) are unvalued in the analysis; defaults 1 unless overridden"}};
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_trajectory_csv(const fs::path &path, const Trajectory &tr, const Forcing &f) {
  std::ofstream out(path);
  out << "t,norm_p2,norm_p3_forcing,mass,min_u,max_u\n";
  const double q = tr.exponent() / 3.0;
  const double fnorm = lp_norm(f.spatial, q);
  for (std::size_t m = 0; m < tr.size(); ++m) {
    const auto &u = tr.state(m);
    const double t = tr.time(m);
    out << format_number(t) << ',' << format_number(tr.norm(m)) << ','
        << format_number(std::abs(f.temporal(t)) * fnorm) << ',' << format_number(mass(u)) << ','
        << format_number(u.min()) << ',' << format_number(u.max()) << '\n';
  }
}

int cmd_simulate(const Scenario &s, const fs::path &out) {
  prepare(s, out);
  const Forcing f = s.forcing();
  Trajectory tr = evolve(s.initial_field(), f, s.config, s.constants);
  write_trajectory_csv(out / "trajectory.csv", tr, f);
  std::ofstream snap(out / "snapshots.csv");
  snap << "t,r,u,v\n";
  const auto &g = s.config.grid;
  for (double t : s.checks.snapshots) {
    const auto m = static_cast<std::size_t>(std::llround(t / s.config.dt));
    const auto &u = tr.state(m);
    const RadialField v = solve_resolvent(u, s.config.gamma, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i)
      snap << format_number(tr.time(m)) << ',' << format_number(g.node(i)) << ',' << format_number(u[i]) << ','
           << format_number(v[i]) << '\n';
  }
  return kExitPass;
}

int cmd_verify_linear(const Scenario &s, const fs::path &out) {
  prepare(s, out);
  const RadialField u0 = s.initial_field();
  const Forcing f = s.forcing();
  const Trajectory omega = heat_trajectory(u0, s.config);
  const Trajectory u = linear_solution_operator(f, omega, u0, s.config);
  write_trajectory_csv(out / "trajectory.csv", u, f);
  const LinearBoundReport lr = linear_bound_check(u, u0, f, omega, s.config, s.constants);
  BoundsReport b = make_bounds_report(s.config, s.constants);
  b.measured_sup = lr.measured_sup;
  b.theoretical_sup_bound = lr.bound;
  b.passes["linear_bound"] = lr.pass;
  json j = b;
  j["slack"] = lr.slack;
  j["omega"] = "heat flow of the initial datum";
  return report_exit(j, out, b.all_pass());
}

int cmd_verify_fixed_point(const Scenario &s, const fs::path &out) {
  prepare(s, out);
  const Forcing f = s.forcing();
  const PicardResult r = picard_solve(s.initial_field(), f, s.config, s.constants);
  write_trajectory_csv(out / "trajectory.csv", r.trajectory, f);
  const auto &d = r.diagnostics;
  bool ratios_ok = true;
  for (double q : d.ratios) ratios_ok = ratios_ok && q <= 1.1 * d.contraction_factor;
  BoundsReport b = make_bounds_report(s.config, s.constants);
  b.measured_sup = r.trajectory.sup_norm();
  b.theoretical_sup_bound = s.config.rho;
  b.passes["converged"] = d.converged;
  b.passes["contraction_ratios"] = ratios_ok;
  json j = b;
  j["picard"] = {{"iterations", d.iterations}, {"differences", d.differences}, {"ratios", d.ratios},
                 {"contraction_factor", d.contraction_factor}, {"core_lhs", d.core_lhs},
                 {"abort_reason", d.abort_reason}};
  return report_exit(j, out, b.all_pass());
}

int cmd_verify_decay(const Scenario &s, const fs::path &out) {
  prepare(s, out);
  const Forcing f = s.forcing();
  const PicardResult r = picard_solve(s.initial_field(), f, s.config, s.constants);
  write_trajectory_csv(out / "trajectory.csv", r.trajectory, f);
  const DecayReport d = decay_check(r.trajectory, f, s.config, s.constants);
  BoundsReport b = make_bounds_report(s.config, s.constants);
  b.measured_sup = r.trajectory.sup_norm();
  b.fitted_decay_rate = d.fitted_rate;
  b.passes["picard_converged"] = r.diagnostics.converged;
  b.passes["decay_rate"] = d.rate_pass;
  b.passes["gronwall_envelope"] = d.envelope_pass;
  json j = b;
  j["premultiplier"] = d.premultiplier;
  j["max_envelope_ratio"] = d.max_envelope_ratio;
  return report_exit(j, out, b.all_pass());
}

int cmd_verify_massera(const Scenario &s, const fs::path &out) {
  prepare(s, out);
  const MasseraReport m =
      verify_massera_splitting(s.forcing(), std::nullopt, s.initial_field(), s.config, s.constants, s.checks.burn_in);
  {
    std::ofstream csv(out / "difference.csv");
    csv << "t,difference\n";
    for (std::size_t i = 0; i < m.difference.size(); ++i)
      csv << format_number(i * s.config.dt) << ',' << format_number(m.difference[i]) << '\n';
  }
  BoundsReport b = make_bounds_report(s.config, s.constants);
  b.fitted_decay_rate = m.fitted_rate;
  b.measured_sup = m.u_full.sup_norm();
  b.passes["difference_decays"] = m.difference_decays;
  b.passes["initial_layer_rate"] = m.layer_pass;
  json j = b;
  j["layer_rate"] = m.layer_rate;
  j["layer_rate_required"] = m.layer_rate_required;
  j["burn_in"] = m.burn_in;
  j["final_difference"] = m.difference.empty() ? 0.0 : m.difference.back();
  return report_exit(j, out, b.all_pass());
}

int cmd_calibrate(const Scenario &s, const fs::path &out) {
  prepare(s, out);
  std::vector<RadialField> profiles;
  for (double w : {0.5, 1.0, 2.0}) profiles.push_back(ProfileSpec{"gaussian", 1.0, w}.sample(s.config.grid));
  const std::vector<ExponentPair> pairs{{2, 2}, {1.5, 2}, {4.0 / 3.0, 2}, {1, kInfExponent}};
  CalibrationResult r;
  try {
    r = calibrate_with_report(profiles, s.checks.calibration_times, pairs);
  } catch (const std::runtime_error &e) {
    json j{{"error", e.what()}};
    return report_exit(j, out, false);
  }
  write_json(out / "constants.json", constants_json(r.constants));
  json pj = json::array();
  for (std::size_t i = 0; i < pairs.size(); ++i)
    pj.push_back({{"p", pairs[i].p},
                  {"q", std::isinf(pairs[i].q) ? json("inf") : json(pairs[i].q)},
                  {"worst_ratio", r.reports[i].worst_ratio},
                  {"certified", r.reports[i].certified}});
  return report_exit({{"constants", constants_json(r.constants)}, {"worst_ratio", r.worst_ratio}, {"pairs", pj}},
                     out, true);
}

int cmd_translation_scan(const Scenario &s, const fs::path &out) {
  prepare(s, out);
  const TrigPolynomial &h = s.forcing_signal.ap_part;
  const auto taus = find_translation_numbers(h, s.checks.epsilon, s.checks.window_start, s.checks.window_length);
  std::ofstream csv(out / "translations.csv");
  csv << "tau,displacement_bound\n";
  for (double tau : taus) csv << format_number(tau) << ',' << format_number(h.displacement_bound(tau)) << '\n';
  return report_exit({{"epsilon", s.checks.epsilon},
                      {"window_start", s.checks.window_start},
                      {"window_length", s.checks.window_length},
                      {"scan_step", translation_scan_step(h, s.checks.epsilon)},
                      {"count", taus.size()}},
                     out, true);
}

int run_command(const std::string &command, const fs::path &scenario_path, const fs::path &out,
                const std::optional<fs::path> &constants) {
  using Cmd = int (*)(const Scenario &, const fs::path &);
  static const std::map<std::string, Cmd> table{
      {"simulate", cmd_simulate},         {"verify-linear", cmd_verify_linear},
      {"verify-fixed-point", cmd_verify_fixed_point}, {"verify-decay", cmd_verify_decay},
      {"verify-massera", cmd_verify_massera},         {"calibrate", cmd_calibrate},
      {"translation-scan", cmd_translation_scan}};
  try {
    const auto it = table.find(command);
    if (it == table.end()) throw ScenarioError("unknown subcommand '" + command + "'");
    Scenario s = load_scenario(scenario_path);
    if (constants) apply_constants_file(s, *constants);
    return it->second(s, out);
  } catch (const BlowUp &e) {
    std::cerr << "blow-up guard: " << e.what() << " at t = " << e.time << '\n';
    return kExitBlowUp;
  } catch (const ScenarioError &e) {
    std::cerr << "invalid scenario: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument &e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  }
}

int cli_main(int argc, char **argv) {
  CLI::App app{"Radial Keller-Segel on hyperbolic space: simulations and bound checks"};
  app.require_subcommand(1);
  std::vector<std::string> scenarios;
  std::string out_dir = "out";
  std::string constants_path;
  int jobs = 1;
  for (const char *name : {"simulate", "verify-linear", "verify-fixed-point", "verify-decay", "verify-massera",
                           "calibrate", "translation-scan"}) {
    auto *sub = app.add_subcommand(name);
    sub->add_option("--scenario", scenarios, "scenario file(s)")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--jobs", jobs, "threads across scenarios")->check(CLI::PositiveNumber);
    sub->add_option("--constants", constants_path, "dispersive constants file");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitValidation;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  std::optional<fs::path> constants;
  if (!constants_path.empty()) constants = constants_path;

  // one output subdirectory per scenario when several are given
  auto out_for = [&](const std::string &path) {
    return scenarios.size() == 1 ? fs::path(out_dir) : fs::path(out_dir) / fs::path(path).stem();
  };
  std::vector<int> codes(scenarios.size(), kExitPass);
  for (std::size_t begin = 0; begin < scenarios.size(); begin += static_cast<std::size_t>(jobs)) {
    std::vector<std::future<int>> batch;
    const std::size_t end = std::min(scenarios.size(), begin + static_cast<std::size_t>(jobs));
    for (std::size_t i = begin; i < end; ++i)
      batch.push_back(std::async(std::launch::async, [&, i] { return run_command(command, scenarios[i], out_for(scenarios[i]), constants); }));
    for (std::size_t i = begin; i < end; ++i) codes[i] = batch[i - begin].get();
  }
  int worst = kExitPass;
  for (int c : codes) worst = std::max(worst, c);
  return worst;
}

}  // namespace kshyp
