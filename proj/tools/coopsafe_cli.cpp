// coopsafe command line: simulate, fmin, validate, plotdata.
//
// Exit codes: 0 success, 1 usage, 2 validation, 3 runtime abort.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "coopsafe/errors.hpp"
#include "coopsafe/scenario.hpp"
#include "coopsafe/simulator.hpp"
#if COOPSAFE_HAS_SERVICE
#include "coopsafe/service.hpp"
#endif

namespace {

using namespace coopsafe;

constexpr int kUsage = 1;
constexpr int kValidation = 2;
constexpr int kRuntime = 3;

struct SimulateArgs {
  std::string scenario;
  std::string out;
  std::string format = "csv";
  std::optional<double> dt;
  std::optional<double> duration;
  bool serve = false;
  unsigned short port = 8400;
  std::string bind = "127.0.0.1";
  std::size_t decimation = 10;
};

void print_summary(const RunSummary& s, double f_min, std::ostream& out) {
  out << "records: " << s.records << "\n";
  out << "min F: " << format_double(s.min_F) << " (F_min " << format_double(f_min) << ")\n";
  out << "phases:";
  for (Phase p : s.phases_visited) out << " " << phase_name(p);
  out << "\n";
  out << "ticks below floor band: " << s.constraint_violations << "\n";
  for (const SwitchEvent& e : s.switches) {
    out << "  t=" << format_double(e.t) << " " << phase_name(e.from) << " -> " << phase_name(e.to)
        << " (" << reason_name(e.reason) << ")\n";
  }
}

int simulate(const SimulateArgs& a) {
  Scenario sc = load_scenario(a.scenario);
  if (a.dt) sc.sim.dt = *a.dt;
  if (a.duration) sc.sim.duration = *a.duration;
  validate_scenario(sc);

  if (a.serve) {
#if COOPSAFE_HAS_SERVICE
    ServiceOptions opt;
    opt.port = a.port;
    opt.address = a.bind;
    opt.decimation = a.decimation;
    Service service(std::move(sc), opt);
    service.start();
    std::cerr << "serving on http://" << a.bind << ":" << service.port() << " (ws path /ws)\n";
    service.wait();
    return 0;
#else
    std::cerr << "this build has no service support\n";
    return kUsage;
#endif
  }

  std::ofstream file(a.out);
  if (!file) {
    std::cerr << "cannot open " << a.out << " for writing\n";
    return kRuntime;
  }
  TraceWriter writer(file, a.format == "jsonl" ? TraceFormat::kJsonl : TraceFormat::kCsv,
                     trace_columns(sc.layout(), sc.robots));
  const RunSummary summary =
      run(sc, [&](const TraceRecord& rec, const Simulator&) { writer.write(rec); });
  print_summary(summary, sc.safety.f_min, std::cout);
  return 0;
}

int plotdata(const std::string& trace_path, const std::string& fields, const std::string& out_path) {
  std::ifstream in(trace_path);
  if (!in) {
    std::cerr << "cannot open trace " << trace_path << "\n";
    return kValidation;
  }
  const TraceTable table = read_trace(in);
  std::vector<std::size_t> picks;
  std::vector<std::string> names;
  std::stringstream list(fields);
  std::string name;
  while (std::getline(list, name, ',')) {
    if (name.empty()) continue;
    std::size_t k = 0;
    while (k < table.columns.size() && table.columns[k] != name) ++k;
    if (k == table.columns.size()) {
      std::cerr << "trace has no column '" << name << "'\n";
      return kUsage;
    }
    picks.push_back(k);
    names.push_back(name);
  }
  if (picks.empty()) {
    std::cerr << "--fields lists no columns\n";
    return kUsage;
  }
  std::ofstream file;
  if (!out_path.empty()) file.open(out_path);
  std::ostream& out = out_path.empty() ? std::cout : file;
  for (std::size_t k = 0; k < names.size(); ++k) out << (k ? "," : "") << names[k];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < picks.size(); ++k) out << (k ? "," : "") << row[picks[k]];
    out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative multi-robot trajectory scaling with a human safety floor"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "run a scenario and write its trace");
  simulate_cmd->add_option("--scenario", sim.scenario, "scenario JSON file")->required();
  auto* out_opt = simulate_cmd->add_option("--out", sim.out, "trace output file");
  simulate_cmd->add_option("--format", sim.format, "csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  simulate_cmd->add_option("--dt", sim.dt, "override the time step [s]");
  simulate_cmd->add_option("--duration", sim.duration, "override the duration [s]");
  auto* serve_flag = simulate_cmd->add_flag("--serve", sim.serve, "run the live service instead");
  simulate_cmd->add_option("--port", sim.port, "service port")->needs(serve_flag);
  simulate_cmd->add_option("--bind", sim.bind, "service address")->needs(serve_flag);
  simulate_cmd->add_option("--decimation", sim.decimation, "broadcast every n-th tick")
      ->needs(serve_flag)
      ->check(CLI::PositiveNumber);
  out_opt->excludes(serve_flag);

  std::string fmin_scenario;
  double d_min = 0.0;
  bool single = false;
  auto* fmin_cmd = app.add_subcommand("fmin", "print the safety floor guaranteeing d >= dmin");
  fmin_cmd->add_option("--scenario", fmin_scenario, "scenario JSON file")->required();
  fmin_cmd->add_option("--dmin", d_min, "minimum operator distance [m]")->required();
  fmin_cmd->add_flag("--single", single, "single-robot bound for each robot instead of the team bound");

  std::string validate_scenario_path;
  auto* validate_cmd = app.add_subcommand("validate", "check a scenario file");
  validate_cmd->add_option("--scenario", validate_scenario_path, "scenario JSON file")->required();

  std::string trace_path;
  std::string fields;
  std::string plot_out;
  auto* plot_cmd = app.add_subcommand("plotdata", "extract trace columns for plotting");
  plot_cmd->add_option("--trace", trace_path, "trace file (csv or jsonl)")->required();
  plot_cmd->add_option("--fields", fields, "comma separated column names")->required();
  plot_cmd->add_option("--out", plot_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return 0;
    const auto parsed = app.get_subcommands();
    std::cerr << (parsed.empty() ? app.help() : parsed.front()->help());
    return kUsage;
  }

  try {
    if (*simulate_cmd) {
      if (!sim.serve && sim.out.empty()) {
        std::cerr << "simulate needs --out unless --serve is given\n" << simulate_cmd->help();
        return kUsage;
      }
      return simulate(sim);
    }
    if (*fmin_cmd) {
      const Scenario sc = load_scenario(fmin_scenario);
      if (!(d_min > 0.0)) {
        std::cerr << "--dmin must be positive\n";
        return kUsage;
      }
      if (single) {
        for (const RobotModel& m : sc.robots) {
          std::printf("%s %.10g\n", m.name.c_str(), compute_f_min_single(m, sc.safety_params, d_min));
        }
      } else {
        std::printf("%.10g\n", compute_f_min(sc.robots, sc.safety_params, d_min));
      }
      return 0;
    }
    if (*validate_cmd) {
      const Scenario sc = load_scenario(validate_scenario_path);
      std::cout << "ok: " << sc.robots.size() << " robots, m = " << sc.layout().m()
                << ", F_min = " << format_double(sc.safety.f_min) << "\n";
      return 0;
    }
    if (*plot_cmd) return plotdata(trace_path, fields, plot_out);
  } catch (const ValidationError& e) {
    std::cerr << "invalid scenario: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "aborted: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
