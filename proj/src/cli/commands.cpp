#include "trion/cli/commands.hpp"

#include <fstream>
#include <sstream>
#include <utility>

#include <CLI11.hpp>

#include "trion/error.hpp"

namespace trion::cli {

namespace {

std::string indexed(const char* prefix, int i) { return prefix + std::to_string(i); }

const char* overlap_name(BellLabel label) {
  switch (label) {
    case BellLabel::eta: return "rho1";
    case BellLabel::beta: return "rho2";
    case BellLabel::alpha: return "rho3";
  }
  return "rho1";
}

Trajectory run_trajectory(const RunConfig& cfg) {
  return integrate(cfg.model, cfg.initial_state, 0.0, cfg.n_periods * cfg.model.period(), cfg.integrator);
}

}  // namespace

Table run_spectrum(const RunConfig& cfg) {
  const SweepResult sweep = sweep_quasienergies(cfg.model, cfg.sweep, cfg.integrator);
  Table t;
  t.command = "spectrum";
  t.columns.push_back("phi");
  for (int k = 1; k <= kTrionStates; ++k) t.columns.push_back(indexed("eps_", k));
  for (int k = 1; k <= kTrionStates; ++k) t.columns.push_back(indexed("parity_", k));
  for (int a : sweep.pmin_states) t.columns.push_back(indexed("pmin_", a));
  for (std::size_t j = 0; j < sweep.phis.size(); ++j) {
    std::vector<Cell> row{sweep.phis[j]};
    for (int k = 0; k < kTrionStates; ++k) row.emplace_back(sweep.tracks[j][k]);
    for (int k = 0; k < kTrionStates; ++k) row.emplace_back(static_cast<long long>(parity_sign(sweep.track_parities[j][k])));
    for (const auto& series : sweep.pmin) row.emplace_back(series[j]);
    t.add_row(std::move(row));
  }
  return t;
}

Table run_evolve(const RunConfig& cfg) {
  const Trajectory traj = run_trajectory(cfg);
  Table t;
  t.command = "evolve";
  t.columns.push_back("t");
  for (int k = 1; k <= kTrionStates; ++k) t.columns.push_back(indexed("p", k));
  for (int k = 1; k <= kTrionStates; ++k) {
    t.columns.push_back(indexed("re_c", k));
    t.columns.push_back(indexed("im_c", k));
  }
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const Amplitudes& c = traj.states[i].amplitudes();
    std::vector<Cell> row{traj.times[i]};
    for (const Complex& x : c) row.emplace_back(std::norm(x));
    for (const Complex& x : c) {
      row.emplace_back(x.real());
      row.emplace_back(x.imag());
    }
    t.add_row(std::move(row));
  }
  return t;
}

Table run_entangle(const RunConfig& cfg) {
  const Trajectory traj = run_trajectory(cfg);
  const EntangleSeries s = entangle_series(traj, cfg.entangle, cfg.workers);
  const std::string name = overlap_name(cfg.entangle.target);
  Table t;
  t.command = "entangle";
  t.columns = {"t", "concurrence_full", "concurrence_analytic", "overlap_" + name, "overlap_envelope_" + name};
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    t.add_row({s.times[i], s.concurrence_full[i], s.concurrence_analytic[i], s.overlap[i], s.overlap_envelope[i]});
  }
  return t;
}

Table run_crossings(const RunConfig& cfg) {
  SweepRequest request = cfg.sweep;
  request.pmin_states.clear();
  const SweepResult sweep = sweep_quasienergies(cfg.model, request, cfg.integrator);
  const std::vector<CrossingEvent> events = classify_crossings(sweep, cfg.crossings);
  Table t;
  t.command = "crossings";
  t.columns = {"phi_star", "track_a", "track_b", "kind", "gap"};
  for (const CrossingEvent& e : events) {
    t.add_row({e.phi_star, static_cast<long long>(e.track_a + 1), static_cast<long long>(e.track_b + 1),
               std::string(to_string(e.kind)), e.gap});
  }
  return t;
}

Table run_command(const std::string& command, const RunConfig& cfg) {
  if (command == "spectrum") return run_spectrum(cfg);
  if (command == "evolve") return run_evolve(cfg);
  if (command == "entangle") return run_entangle(cfg);
  if (command == "crossings") return run_crossings(cfg);
  throw ConfigError("unknown command '" + command + "'");
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Floquet analysis of a driven trion in a double quantum dot", "trion-floquet"};
  app.require_subcommand(1);
  std::string config_path;
  std::string preset_name;
  std::string out_path;
  std::string format;
  std::vector<std::string> overrides;
  std::string presets_help = "named parameter set:";
  for (const auto& p : preset_names()) presets_help += " " + p;

  const std::pair<const char*, const char*> commands[] = {
      {"spectrum", "quasienergies and minimum survival over a drive sweep"},
      {"evolve", "sampled populations from a time integration"},
      {"entangle", "concurrence and target overlap along a trajectory"},
      {"crossings", "classified level crossings from a drive sweep"},
  };
  for (const auto& [name, about] : commands) {
    CLI::App* sub = app.add_subcommand(name, about);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--preset", preset_name, presets_help);
    sub->add_option("--out", out_path, "output file (default: standard output)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--override", overrides, "dotted key=value applied last")->allow_extra_args(false);
  }

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "trion-floquet: " << e.what() << '\n';
    return kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  try {
    nlohmann::json doc = layer_config(preset_name, read_json_file(config_path), overrides);
    if (!out_path.empty()) doc["output"]["path"] = out_path;
    if (!format.empty()) doc["output"]["format"] = format;
    cfg = to_run_config(doc);
  } catch (const IoError& e) {
    err << "trion-floquet: " << e.what() << '\n';
    return kIoFailure;
  } catch (const std::exception& e) {
    err << "trion-floquet: config error: " << e.what() << '\n';
    return kConfigError;
  }
  for (const std::string& w : cfg.warnings) err << "trion-floquet: warning: " << w << '\n';

  std::ostringstream buffer;
  try {
    const Table table = run_command(command, cfg);
    write_table(table, cfg.format, buffer);
  } catch (const ConfigError& e) {
    err << "trion-floquet: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    err << "trion-floquet: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalFailure& e) {
    err << "trion-floquet: numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }

  if (cfg.out_path.empty()) {
    out << buffer.str();
    return out ? kOk : kIoFailure;
  }
  std::ofstream file(cfg.out_path, std::ios::binary | std::ios::trunc);
  if (!file) {
    err << "trion-floquet: cannot write " << cfg.out_path << '\n';
    return kIoFailure;
  }
  file << buffer.str();
  file.close();
  if (!file) {
    err << "trion-floquet: write failed for " << cfg.out_path << '\n';
    return kIoFailure;
  }
  return kOk;
}

}  // namespace trion::cli
