// Experiment harness: run, sweep, export-dot, validate.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hetsched/experiment.hpp"
#include "hetsched/graph.hpp"

using namespace hetsched;

namespace {

struct Override {
  const char* flag;
  const char* section;
  const char* key;
  const char* help;
};

constexpr Override kOverrides[] = {
    {"--kernel", "kernel", "family", "cholesky | lu | qr"},
    {"--nt", "kernel", "nt", "tiles per dimension"},
    {"--tile", "kernel", "tile", "tile order b"},
    {"--ib", "kernel", "ib", "inner block"},
    {"--cpus", "platform", "cpus", "CPU cores (each GPU uses one)"},
    {"--gpus", "platform", "gpus", "GPU count"},
    {"--switches", "platform", "switches", "PCIe switch count"},
    {"--bandwidth", "platform", "bandwidth", "link bandwidth, bytes/s"},
    {"--latency", "platform", "latency", "link latency, s"},
    {"--switch-cap", "platform", "switch_cap", "aggregate switch bandwidth, bytes/s or inf"},
    {"--scheduler", "scheduler", "name", "heft | dada | ws"},
    {"--alpha", "scheduler", "alpha", "affinity budget in [0, 1]"},
    {"--epsilon", "scheduler", "epsilon", "binary search precision, s"},
    {"--cp", "scheduler", "cp", "communication prediction (0/1)"},
    {"--seed", "run", "seed", "first seed"},
    {"--noise", "run", "noise", "relative duration noise in [0, 1)"},
    {"--reps", "run", "reps", "repetitions"},
};

struct Options {
  std::string config_path;
  std::vector<std::optional<std::string>> values = std::vector<std::optional<std::string>>(std::size(kOverrides));
  std::string out;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "experiment config file");
  for (std::size_t i = 0; i < std::size(kOverrides); ++i) {
    cmd->add_option(kOverrides[i].flag, o.values[i], kOverrides[i].help);
  }
  cmd->add_option("--out", o.out, "output file (default: standard output)");
}

ExperimentConfig resolve(const Options& o) {
  ExperimentConfig cfg = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
  for (std::size_t i = 0; i < std::size(kOverrides); ++i) {
    if (o.values[i]) apply_setting(cfg, kOverrides[i].section, kOverrides[i].key, *o.values[i]);
  }
  return cfg;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw ConfigError("cannot write " + o.out);
  f << text;
}

template <class T, class Parse>
std::vector<T> split_list(const std::string& text, Parse parse) {
  std::vector<T> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(parse(item));
  }
  if (out.empty()) throw ConfigError("empty list '" + text + "'");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator for CPU+GPU task-graph scheduling"};
  app.require_subcommand(1);

  Options run_opts, sweep_opts, dot_opts, validate_opts;
  std::string trace_path;
  auto* run_cmd = app.add_subcommand("run", "run repetitions of one configuration; CSV on output");
  add_common(run_cmd, run_opts);
  run_cmd->add_option("--trace", trace_path, "write the event trace of the first repetition");

  auto* sweep_cmd = app.add_subcommand("sweep", "Cartesian sweep; CSV on output");
  add_common(sweep_cmd, sweep_opts);
  std::string sweep_gpus, sweep_alpha, sweep_sched, sweep_cp;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  sweep_cmd->add_option("--sweep-gpus", sweep_gpus, "comma list of GPU counts");
  sweep_cmd->add_option("--sweep-alpha", sweep_alpha, "comma list of alpha values");
  sweep_cmd->add_option("--sweep-schedulers", sweep_sched, "comma list of schedulers");
  sweep_cmd->add_option("--sweep-cp", sweep_cp, "comma list of cp flags (0/1)");
  sweep_cmd->add_option("--jobs", jobs, "parallel sweep points");

  auto* dot_cmd = app.add_subcommand("export-dot", "print the task graph as DOT");
  add_common(dot_cmd, dot_opts);
  bool as_json = false;
  dot_cmd->add_flag("--json", as_json, "print the JSON dump instead");

  auto* validate_cmd = app.add_subcommand("validate", "check a configuration");
  add_common(validate_cmd, validate_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      ExperimentConfig cfg = resolve(run_opts);
      validate(cfg);
      std::vector<CsvRow> rows;
      for (unsigned rep = 0; rep < cfg.repetitions; ++rep) {
        std::uint64_t seed = cfg.seed + rep;
        bool traced = rep == 0 && !trace_path.empty();
        SimReport report = simulate(cfg, seed, traced);
        if (traced) {
          std::ofstream tf(trace_path);
          if (!tf) throw ConfigError("cannot write " + trace_path);
          write_trace(tf, report.trace);
        }
        rows.push_back(make_row(cfg, seed, rep, report));
      }
      emit(run_opts, format_csv(rows));
    } else if (*sweep_cmd) {
      ExperimentConfig cfg = resolve(sweep_opts);
      SweepAxes axes = single_point(cfg);
      if (!sweep_gpus.empty()) {
        axes.gpus = split_list<unsigned>(sweep_gpus, [](const std::string& s) { return static_cast<unsigned>(std::stoul(s)); });
      }
      if (!sweep_alpha.empty()) axes.alphas = split_list<double>(sweep_alpha, [](const std::string& s) { return parse_double(s); });
      if (!sweep_sched.empty()) axes.schedulers = split_list<std::string>(sweep_sched, [](const std::string& s) { return s; });
      if (!sweep_cp.empty()) axes.cp = split_list<bool>(sweep_cp, [](const std::string& s) { return s == "1" || s == "true"; });
      emit(sweep_opts, format_csv(cmd_sweep(cfg, axes, jobs)));
    } else if (*dot_cmd) {
      ExperimentConfig cfg = resolve(dot_opts);
      validate(cfg);
      TaskGraph g = gen_kernel(cfg.family, cfg.matrix, cfg.materialize_aux);
      emit(dot_opts, as_json ? export_json(g) + "\n" : export_dot(g));
    } else if (*validate_cmd) {
      ExperimentConfig cfg = resolve(validate_opts);
      validate(cfg);
      TaskGraph g = gen_kernel(cfg.family, cfg.matrix, cfg.materialize_aux);
      PerfModel model(timing_table(cfg));
      for (const Task& t : g.tasks()) {
        for (ResourceClass c : {ResourceClass::CPU, ResourceClass::GPU}) model.predict_exec(t, c);
      }
      std::cout << "ok: " << to_string(cfg.family) << " nt=" << cfg.matrix.nt << " tasks=" << g.task_count()
                << " scheduler=" << cfg.scheduler.name << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
