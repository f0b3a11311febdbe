// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hetsched/dada.hpp"
#include "hetsched/experiment.hpp"
#include "hetsched/heft.hpp"
#include "hetsched/kernels.hpp"
#include "hetsched/sim.hpp"
#include "hetsched/transfer.hpp"
#include "replay.hpp"

using namespace hetsched;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double time_limit_s;  // 0: none
  std::function<Outcome()> body;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

DadaConfig dada(double alpha, double epsilon, bool cp = false) {
  DadaConfig c;
  c.alpha = alpha;
  c.epsilon = epsilon;
  c.with_cp = cp;
  return c;
}

BatchPlan stub_phase(const BatchProblem& p, double, double) { return BatchPlan(p); }

// A single-layer random batch on a real platform, with optional scattered
// residency and backlog.
struct RandomBatch {
  RandomInstance inst;
  Platform platform;
  PerfModel model;
  LoadTimestamps stamps;
  ResidencyMap residency;
  ActivationBatch batch;

  RandomBatch(std::mt19937_64& rng, bool scatter) : platform(make_platform(rng)) {
    unsigned n = std::uniform_int_distribution<unsigned>(1, 32)(rng);
    inst = gen_random_layered({n, n, rng()});
    model = PerfModel(inst.timings);
    stamps = LoadTimestamps(platform.worker_count());
    residency = ResidencyMap(inst.graph.data_count(), platform.memory_node_count());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (scatter) {
      for (std::size_t d = 0; d < inst.graph.data_count(); ++d) {
        if (u(rng) < 0.6) {
          auto node = std::uniform_int_distribution<std::uint32_t>(0, platform.memory_node_count() - 1)(rng);
          residency.set_exclusive(DataId{static_cast<std::uint32_t>(d)}, MemoryNodeId{node});
        }
      }
      for (std::size_t w = 0; w < platform.worker_count(); ++w) {
        if (u(rng) < 0.5) stamps.push(WorkerId{static_cast<std::uint32_t>(w)}, 0.0, 0.02 * u(rng));
      }
    }
    for (const Task& t : inst.graph.tasks()) batch.ready.push_back(t.id);
  }

  static Platform make_platform(std::mt19937_64& rng) {
    unsigned cpus = std::uniform_int_distribution<unsigned>(1, 4)(rng);
    unsigned gpus = std::uniform_int_distribution<unsigned>(1, 8)(rng);
    unsigned switches = std::uniform_int_distribution<unsigned>(1, std::min(gpus, 4u))(rng);
    return build_platform(cpus + gpus, gpus, switches, 6e9, 1e-5);
  }

  PlanningContext ctx() const { return {inst.graph, platform, model, stamps, residency}; }
};

Outcome dual_guarantee() {
  std::mt19937_64 rng(1001);
  constexpr double kAlphas[] = {0.0, 0.25, 0.5, 1.0};
  std::size_t batches = 0, accepted = 0, violations = 0;
  for (int i = 0; i < 1200; ++i) {
    RandomBatch rb(rng, i % 2 == 1);
    double alpha = kAlphas[i % 4];
    BatchProblem p = make_batch_problem(rb.batch, rb.ctx(), i % 3 == 0);
    SearchState st = dual_search(p, dada(alpha, 1e-6));
    for (const SearchIteration& it : st.iterations) {
      if (!it.accepted) continue;
      ++accepted;
      violations += !(it.makespan <= (2.0 + alpha) * it.lambda);
    }
    if (st.kept) violations += !(st.kept->makespan(p) <= (2.0 + alpha) * st.lambda);
    ++batches;
  }
  return {violations == 0, fmt("%zu batches, %zu accepted guesses, %zu violations", batches, accepted, violations)};
}

Outcome oracle_ratio() {
  std::mt19937_64 rng(2002);
  std::uniform_real_distribution<double> d(0.05, 5.0);
  double worst = 0.0;
  std::size_t bad = 0;
  for (int i = 0; i < 200; ++i) {
    unsigned n = 1 + i % 12;
    std::vector<TaskTiming> t(n);
    for (auto& x : t) x = {d(rng), d(rng)};
    double opt = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      double cpu = 0.0, gpu = 0.0;
      for (unsigned j = 0; j < n; ++j) ((mask >> j) & 1u ? gpu : cpu) += ((mask >> j) & 1u ? t[j].p_gpu : t[j].p_cpu);
      opt = std::min(opt, std::max(cpu, gpu));
    }
    BatchProblem p = make_independent_problem(t, 1, 1);
    SearchState st = dual_search(p, dada(0.0, 1e-12));
    if (!st.kept) {
      ++bad;
      continue;
    }
    double ms = st.kept->makespan(p);
    worst = std::max(worst, ms / opt);
    bad += !(ms <= 2.0 * opt);
  }
  return {bad == 0, fmt("200 instances, worst ratio %.4f, %zu above 2", worst, bad)};
}

Outcome stub_equivalence() {
  std::mt19937_64 rng(3003);
  std::size_t mismatches = 0;
  for (int i = 0; i < 100; ++i) {
    // Even: fresh residency, so every score is zero. Odd: scattered data with alpha 0.
    bool scatter = i % 2 == 1;
    RandomBatch rb(rng, scatter);
    DadaConfig cfg = dada(scatter ? 0.0 : std::array{0.25, 0.5, 1.0}[i % 3], 1e-6, i % 4 < 2);
    Assignment real = dada_activate(rb.batch, rb.ctx(), cfg);
    Assignment stub = dada_activate(rb.batch, rb.ctx(), cfg, stub_phase);
    bool same = real.placements.size() == stub.placements.size();
    for (std::size_t j = 0; same && j < real.placements.size(); ++j) {
      same = real.placements[j].task == stub.placements[j].task && real.placements[j].worker == stub.placements[j].worker;
    }
    mismatches += !same;
  }
  return {mismatches == 0, fmt("100 batches, %zu mismatches", mismatches)};
}

struct Averages {
  double makespan = 0.0;
  double bytes = 0.0;
};

Outcome alpha_tradeoff() {
  constexpr unsigned kGpus[] = {1, 2, 4, 6, 8};
  constexpr unsigned kSeeds = 30;
  constexpr double kBytesRatio = 0.5;
  constexpr double kSlowdown = 1.25;

  auto config = [](unsigned k, const std::string& name, double alpha, bool cp) {
    ExperimentConfig c;  // m = 12, 4 switches, Cholesky nt = 16, b = 512
    c.platform.gpus = k;
    c.scheduler.name = name;
    c.scheduler.dada.alpha = alpha;
    c.scheduler.dada.with_cp = cp;
    c.noise = 0.1;
    return c;
  };
  struct Job {
    ExperimentConfig cfg;
    std::uint64_t seed;
    SimReport report;
  };
  std::vector<Job> jobs;
  for (unsigned k : kGpus) {
    for (const ExperimentConfig& c : {config(k, "heft", 0.0, false), config(k, "dada", 0.0, false), config(k, "dada", 0.9, true)}) {
      for (unsigned s = 1; s <= kSeeds; ++s) jobs.push_back({c, s, {}});
    }
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::max(1u, std::thread::hardware_concurrency()); ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < jobs.size();) jobs[i].report = simulate(jobs[i].cfg, jobs[i].seed);
    });
  }
  for (auto& th : pool) th.join();

  Outcome out;
  std::ostringstream os;
  for (std::size_t ki = 0; ki < std::size(kGpus); ++ki) {
    std::array<Averages, 3> avg{};
    for (int v = 0; v < 3; ++v) {
      for (unsigned s = 0; s < kSeeds; ++s) {
        const SimReport& r = jobs[(ki * 3 + v) * kSeeds + s].report;
        avg[v].makespan += r.makespan / kSeeds;
        avg[v].bytes += static_cast<double>(r.bytes_total) / kSeeds;
      }
    }
    unsigned k = kGpus[ki];
    double bytes_ratio = avg[2].bytes / avg[1].bytes;
    double slowdown = avg[2].makespan / avg[0].makespan;
    bool a_ok = k < 4 || bytes_ratio <= kBytesRatio;
    bool b_ok = slowdown <= kSlowdown;
    out.pass = out.pass && a_ok && b_ok;
    os << fmt("\n    k=%u bytes %.3f%s makespan %.3f%s", k, bytes_ratio, k < 4 ? "" : (a_ok ? " ok" : " >0.5"), slowdown,
              b_ok ? " ok" : " >1.25");
  }
  out.detail = "DADA(0.9)+CP vs DADA(0) bytes, vs HEFT makespan, 30 seeds:" + os.str();
  return out;
}

struct Instance {
  KernelFamily family;
  unsigned nt;
  std::string scheduler;
  double alpha;
  bool cp;
};

std::vector<Instance> kernel_instances() {
  std::vector<Instance> v;
  for (KernelFamily f : {KernelFamily::Cholesky, KernelFamily::LU, KernelFamily::QR}) {
    for (unsigned nt : {4u, 8u, 16u}) {
      v.push_back({f, nt, "heft", 0.0, false});
      v.push_back({f, nt, "dada", 0.0, false});
      v.push_back({f, nt, "dada", 0.9, true});
      v.push_back({f, nt, "ws", 0.0, false});
    }
  }
  return v;
}

ExperimentConfig instance_config(const Instance& in) {
  ExperimentConfig c;
  c.family = in.family;
  c.matrix.nt = in.nt;
  c.platform.gpus = 4;
  c.scheduler.name = in.scheduler;
  c.scheduler.dada.alpha = in.alpha;
  c.scheduler.dada.with_cp = in.cp;
  return c;
}

std::string label(const Instance& in) {
  return fmt("%s nt=%u %s(%g%s)", std::string(to_string(in.family)).c_str(), in.nt, in.scheduler.c_str(), in.alpha,
             in.cp ? ",cp" : "");
}

Outcome validity_suite() {
  std::size_t runs = 0;
  for (const Instance& in : kernel_instances()) {
    ExperimentConfig c = instance_config(in);
    c.noise = 0.1;
    TaskGraph g = gen_kernel(c.family, c.matrix);
    Platform p = Platform::build(c.platform);
    SimReport a = simulate(c, 5, true);
    SimReport b = simulate(c, 5, true);
    runs += 2;
    if (std::string why = testing::check_run(g, p, a); !why.empty()) return {false, label(in) + ": " + why};
    if (!(a == b)) return {false, label(in) + ": same seed gave different reports"};
  }
  return {true, fmt("%zu runs, all invariants hold", runs)};
}

Outcome dag_shape() {
  auto c2 = [](std::size_t n) { return n * (n - 1) / 2; };
  auto c3 = [](std::size_t n) { return n < 3 ? 0 : n * (n - 1) * (n - 2) / 6; };
  std::size_t bad = 0;
  for (unsigned nt = 1; nt <= 16; ++nt) {
    std::size_t chol = nt + 2 * c2(nt) + c3(nt);
    std::size_t lu = 0;
    for (std::size_t k = 0; k < nt; ++k) lu += 1 + 2 * (nt - 1 - k) + (nt - 1 - k) * (nt - 1 - k);
    bad += gen_cholesky(nt).task_count() != chol;
    bad += gen_lu_incpiv(nt).task_count() != lu;
    bad += gen_qr(nt).task_count() != lu;
  }
  bad += gen_cholesky(4).task_count() != 20;
  return {bad == 0, fmt("nt 1..16, %zu mismatches", bad)};
}

Outcome scale_invariance() {
  std::mt19937_64 rng(7007);
  std::size_t differing = 0;
  for (int i = 0; i < 50; ++i) {
    unsigned width = std::uniform_int_distribution<unsigned>(1, 8)(rng);
    RandomInstance inst = gen_random_layered({48, width, rng()});
    Platform base = RandomBatch::make_platform(rng);
    TimingTable scaled = inst.timings;
    for (auto& [key, value] : scaled) value *= 7.0;
    HeftScheduler s1, s2;
    SimReport a = run(inst.graph, base, s1, PerfModel(inst.timings));
    SimReport b = run(inst.graph, base.with_transfer_scale(7.0), s2, PerfModel(scaled));
    bool same = true;
    for (std::size_t t = 0; t < a.tasks.size(); ++t) same = same && a.tasks[t].worker == b.tasks[t].worker;
    differing += !same;
  }
  return {differing == 0, fmt("50 instances, %zu assignment maps differ", differing)};
}

Outcome lower_bounds() {
  std::size_t runs = 0;
  double tightest = std::numeric_limits<double>::infinity();
  for (const Instance& in : kernel_instances()) {
    ExperimentConfig c = instance_config(in);
    TaskGraph g = gen_kernel(c.family, c.matrix);
    Platform p = Platform::build(c.platform);
    SimReport r = simulate(c, 1);
    double bound = testing::makespan_lower_bound(g, p, timing_table(c));
    ++runs;
    if (!(r.makespan >= bound)) return {false, fmt("%s: makespan %.6g below bound %.6g", label(in).c_str(), r.makespan, bound)};
    tightest = std::min(tightest, r.makespan / bound);
  }
  return {true, fmt("%zu runs, smallest makespan/bound %.3f", runs, tightest)};
}

Outcome contention() {
  Platform p = build_platform(4, 2, 1, 0x1p33, 0.0);
  TransferEngine e(p);
  TransferBooking a = e.book(2097152, kHostNode, MemoryNodeId{1}, 0.0);
  TransferBooking b = e.book(2097152, kHostNode, MemoryNodeId{2}, 0.0);
  bool example = a.start() == 0.0 && a.end() == 0x1p-12 && b.start() == 0x1p-12 && b.end() == 0x1p-11 &&
                 e.switch_busy_until(0) == 0x1p-11;

  std::size_t differing = 0;
  for (const Instance& in : kernel_instances()) {
    if (in.nt > 8) continue;
    ExperimentConfig capped = instance_config(in), open = instance_config(in);
    capped.platform.switches = open.platform.switches = capped.platform.gpus;
    capped.noise = open.noise = 0.1;
    capped.platform.switch_cap = capped.platform.link_bandwidth;
    open.platform.switch_cap = std::numeric_limits<double>::infinity();
    differing += simulate(capped, 3).makespan != simulate(open, 3).makespan;
  }
  return {example && differing == 0,
          fmt("engine example %s, %zu switch_cap-sensitive runs with one GPU per switch", example ? "exact" : "WRONG",
              differing)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "dual approximation guarantee", 10.0, dual_guarantee},
      {2, "within twice the brute-force optimum", 30.0, oracle_ratio},
      {3, "zero affinity equals the stubbed phase", 0.0, stub_equivalence},
      {4, "alpha trade-off trend", 120.0, alpha_tradeoff},
      {5, "scheduler validity", 60.0, validity_suite},
      {6, "kernel DAG shape", 0.0, dag_shape},
      {7, "HEFT scale invariance", 0.0, scale_invariance},
      {8, "makespan lower bounds", 0.0, lower_bounds},
      {9, "contention model", 0.0, contention},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = c.time_limit_s == 0.0 || secs < c.time_limit_s;
    bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("criterion %d: %s  %s (%.2f s%s) %s\n", c.id, pass ? "PASS" : "FAIL", c.title, secs,
                in_time ? "" : ", over the time limit", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
