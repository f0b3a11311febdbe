#include <algorithm>
#include <atomic>
#include <exception>
#include <sstream>
#include <thread>

#include "hetsched/experiment.hpp"

namespace hetsched {

std::string csv_header() {
  return "scheduler,alpha,cp,ncpu,ngpu,kernel,n,tile,seed,rep,makespan_s,gflops,"
         "bytes_h2d,bytes_d2h,bytes_d2d,bytes_total,steals_ok,steals_failed";
}

std::string format_row(const CsvRow& r) {
  std::ostringstream os;
  os << r.scheduler << ',' << format_double(r.alpha) << ',' << (r.cp ? 1 : 0) << ',' << r.ncpu << ',' << r.ngpu
     << ',' << r.kernel << ',' << r.n << ',' << r.tile << ',' << r.seed << ',' << r.rep << ','
     << format_double(r.makespan_s) << ',' << format_double(r.gflops) << ',' << r.bytes_h2d << ',' << r.bytes_d2h
     << ',' << r.bytes_d2d << ',' << r.bytes_total << ',' << r.steals_ok << ',' << r.steals_failed;
  return os.str();
}

std::string format_csv(const std::vector<CsvRow>& rows) {
  std::string out = csv_header() + "\n";
  for (const CsvRow& r : rows) out += format_row(r) + "\n";
  return out;
}

SimReport simulate(const ExperimentConfig& cfg, std::uint64_t seed, bool record_trace) {
  validate(cfg);
  Platform platform = Platform::build(cfg.platform);
  TaskGraph graph = gen_kernel(cfg.family, cfg.matrix, cfg.materialize_aux);
  auto scheduler = make_scheduler(cfg.scheduler);
  SimOptions opts;
  opts.seed = seed;
  opts.noise = cfg.noise;
  opts.steal_latency = cfg.steal_latency;
  opts.record_trace = record_trace;
  opts.nominal_flops = flops_of(cfg.family, static_cast<double>(cfg.matrix.nt) * cfg.matrix.b);
  return run(graph, platform, *scheduler, PerfModel(timing_table(cfg)), opts);
}

CsvRow make_row(const ExperimentConfig& cfg, std::uint64_t seed, unsigned rep, const SimReport& report) {
  CsvRow r;
  r.scheduler = cfg.scheduler.name;
  r.alpha = cfg.scheduler.dada.alpha;
  r.cp = cfg.scheduler.dada.with_cp;
  r.ncpu = cfg.platform.cpu_cores - cfg.platform.gpus;
  r.ngpu = cfg.platform.gpus;
  r.kernel = std::string(to_string(cfg.family));
  r.n = cfg.matrix.nt * cfg.matrix.b;
  r.tile = cfg.matrix.b;
  r.seed = seed;
  r.rep = rep;
  r.makespan_s = report.makespan;
  r.gflops = report.gflops;
  r.bytes_h2d = report.bytes_h2d;
  r.bytes_d2h = report.bytes_d2h;
  r.bytes_d2d = report.bytes_d2d;
  r.bytes_total = report.bytes_total;
  r.steals_ok = report.steals_ok;
  r.steals_failed = report.steals_failed;
  return r;
}

std::vector<CsvRow> cmd_run(const ExperimentConfig& cfg) {
  validate(cfg);
  std::vector<CsvRow> rows;
  for (unsigned rep = 0; rep < cfg.repetitions; ++rep) {
    std::uint64_t seed = cfg.seed + rep;
    rows.push_back(make_row(cfg, seed, rep, simulate(cfg, seed)));
  }
  return rows;
}

SweepAxes single_point(const ExperimentConfig& cfg) {
  return {{cfg.scheduler.name}, {cfg.scheduler.dada.with_cp}, {cfg.scheduler.dada.alpha}, {cfg.platform.gpus}};
}

std::vector<CsvRow> cmd_sweep(const ExperimentConfig& cfg, const SweepAxes& axes, unsigned jobs) {
  if (axes.schedulers.empty() || axes.cp.empty() || axes.alphas.empty() || axes.gpus.empty()) {
    throw ConfigError("sweep axes must not be empty");
  }
  std::vector<ExperimentConfig> points;
  for (const std::string& s : axes.schedulers) {
    for (bool cp : axes.cp) {
      for (double alpha : axes.alphas) {
        for (unsigned g : axes.gpus) {
          ExperimentConfig c = cfg;
          c.scheduler.name = s;
          c.scheduler.dada.with_cp = cp;
          c.scheduler.dada.alpha = alpha;
          c.platform.gpus = g;
          validate(c);
          points.push_back(std::move(c));
        }
      }
    }
  }

  std::vector<std::vector<CsvRow>> results(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        results[i] = cmd_run(points[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(points.size())));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  std::vector<CsvRow> rows;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    rows.insert(rows.end(), results[i].begin(), results[i].end());
  }
  return rows;
}

}  // namespace hetsched
