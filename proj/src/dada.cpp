#include "hetsched/dada.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "hetsched/heft.hpp"

namespace hetsched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Worker index minimizing backlog + load + cost among `candidates`; ties keep the earliest candidate.
std::size_t earliest_finish(const BatchProblem& p, const BatchPlan& plan, std::size_t t,
                            const std::vector<std::size_t>& candidates) {
  std::size_t best = candidates.front();
  double best_finish = kInf;
  for (std::size_t w : candidates) {
    double finish = p.backlog[w] + plan.load[w] + p.cost[t][w];
    if (earlier(finish, best_finish)) {
      best_finish = finish;
      best = w;
    }
  }
  return best;
}

}  // namespace

void BatchPlan::place(const BatchProblem& p, std::size_t t, std::size_t w) {
  worker_of[t] = static_cast<int>(w);
  load[w] += p.cost[t][w];
  order.emplace_back(t, w);
}

double BatchPlan::makespan(const BatchProblem& p) const {
  double m = 0.0;
  for (auto [t, w] : order) m = std::max(m, p.backlog[w] + load[w]);
  return m;
}

std::uint64_t affinity_score(const TaskGraph& graph, const Task& task, const Worker& worker,
                             const ResidencyMap& residency) {
  std::uint64_t score = 0;
  if (worker.memory == kHostNode) return 0;
  for (const Access& a : task.accesses) {
    if (writes(a.mode) && residency.valid_on(a.data, worker.memory)) {
      score += graph.data(a.data).size_bytes;
    }
  }
  return score;
}

BatchProblem make_batch_problem(const ActivationBatch& batch, const PlanningContext& ctx, bool with_cp) {
  BatchProblem p;
  p.tasks = batch.ready;
  for (const Worker& w : ctx.platform.workers()) {
    p.workers.push_back(w.id);
    p.worker_class.push_back(w.cls);
    p.backlog.push_back(std::max(0.0, ctx.stamps.ready_at(w.id) - batch.now));
  }
  const std::size_t n = p.tasks.size();
  const std::size_t nw = p.workers.size();
  p.p_cpu.resize(n);
  p.p_gpu.resize(n);
  p.cost.assign(n, std::vector<double>(nw));
  p.exec.assign(n, std::vector<double>(nw));
  p.score.assign(n, std::vector<std::uint64_t>(nw));
  for (std::size_t t = 0; t < n; ++t) {
    const Task& task = ctx.graph.task(p.tasks[t]);
    TaskTiming timing = task_timing(ctx, task);
    p.p_cpu[t] = timing.p_cpu;
    p.p_gpu[t] = timing.p_gpu;
    for (std::size_t w = 0; w < nw; ++w) {
      const Worker& worker = ctx.platform.worker(p.workers[w]);
      double exec = worker.cls == ResourceClass::CPU ? timing.p_cpu : timing.p_gpu;
      double transfer = with_cp ? predict_transfer(ctx.platform, ctx.graph, task, worker, ctx.residency) : 0.0;
      p.exec[t][w] = exec;
      p.cost[t][w] = exec + transfer;
      p.score[t][w] = affinity_score(ctx.graph, task, worker, ctx.residency);
    }
  }
  return p;
}

BatchProblem make_independent_problem(const std::vector<TaskTiming>& timings, unsigned cpus, unsigned gpus) {
  BatchProblem p;
  for (unsigned c = 0; c < cpus; ++c) p.worker_class.push_back(ResourceClass::CPU);
  for (unsigned g = 0; g < gpus; ++g) p.worker_class.push_back(ResourceClass::GPU);
  for (std::uint32_t w = 0; w < cpus + gpus; ++w) p.workers.push_back(WorkerId{w});
  p.backlog.assign(p.workers.size(), 0.0);
  for (std::size_t t = 0; t < timings.size(); ++t) {
    p.tasks.push_back(TaskId{static_cast<std::uint32_t>(t)});
    p.p_cpu.push_back(cpus > 0 ? timings[t].p_cpu : kInf);
    p.p_gpu.push_back(gpus > 0 ? timings[t].p_gpu : kInf);
    std::vector<double> row;
    for (ResourceClass c : p.worker_class) row.push_back(c == ResourceClass::CPU ? timings[t].p_cpu : timings[t].p_gpu);
    p.cost.push_back(row);
    p.exec.push_back(row);
    p.score.emplace_back(p.workers.size(), 0);
  }
  return p;
}

BatchPlan affinity_phase(const BatchProblem& p, double lambda, double alpha) {
  BatchPlan plan(p);
  if (alpha == 0.0) return plan;

  std::vector<std::tuple<std::uint64_t, TaskId, std::size_t, std::size_t>> pairs;
  for (std::size_t t = 0; t < p.task_count(); ++t) {
    for (std::size_t w = 0; w < p.worker_count(); ++w) {
      if (p.score[t][w] > 0) pairs.emplace_back(p.score[t][w], p.tasks[t], t, w);
    }
  }
  std::sort(pairs.begin(), pairs.end(), [&](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
    return p.workers[std::get<3>(a)] < p.workers[std::get<3>(b)];
  });

  const double budget = alpha * lambda;
  for (const auto& [score, id, t, w] : pairs) {
    if (plan.worker_of[t] >= 0) continue;
    if (plan.load[w] <= budget) plan.place(p, t, w);
  }
  return plan;
}

std::optional<BatchPlan> dual_assign(const BatchProblem& p, double lambda, BatchPlan plan) {
  std::vector<std::size_t> cpus, gpus;
  for (std::size_t w = 0; w < p.worker_count(); ++w) {
    (p.worker_class[w] == ResourceClass::CPU ? cpus : gpus).push_back(w);
  }

  std::vector<std::size_t> remaining;
  for (std::size_t t = 0; t < p.task_count(); ++t) {
    if (plan.worker_of[t] >= 0) continue;
    if (p.p_cpu[t] > lambda && p.p_gpu[t] > lambda) return std::nullopt;
    remaining.push_back(t);
  }
  std::stable_sort(remaining.begin(), remaining.end(), [&](std::size_t a, std::size_t b) {
    double sa = p.speedup(a), sb = p.speedup(b);
    if (sa != sb) return sa > sb;
    return p.tasks[a] < p.tasks[b];
  });

  // Tasks too long for a CPU.
  std::vector<std::size_t> free_tasks;
  for (std::size_t t : remaining) {
    if (p.p_cpu[t] > lambda) {
      plan.place(p, t, earliest_finish(p, plan, t, gpus));
    } else {
      free_tasks.push_back(t);
    }
  }

  // Speedup-greedy filling, one GPU at a time in worker order.
  std::vector<std::size_t> leftover;
  std::size_t g = 0;
  for (std::size_t t : free_tasks) {
    if (p.p_gpu[t] > lambda) {
      leftover.push_back(t);
      continue;
    }
    while (g < gpus.size() && p.backlog[gpus[g]] + plan.load[gpus[g]] > lambda) ++g;
    if (g == gpus.size()) {
      leftover.push_back(t);
    } else {
      plan.place(p, t, gpus[g]);
    }
  }

  // Everything else by earliest finish on the CPUs (on GPUs for a CPU-less platform).
  const std::vector<std::size_t>& sink = cpus.empty() ? gpus : cpus;
  for (std::size_t t : leftover) plan.place(p, t, earliest_finish(p, plan, t, sink));
  return plan;
}

SearchState dual_search(const BatchProblem& p, const DadaConfig& cfg, const AffinityPhaseFn& phase) {
  SearchState st;
  for (std::size_t t = 0; t < p.task_count(); ++t) {
    double hi = 0.0;
    if (std::isfinite(p.p_cpu[t])) hi = std::max(hi, p.p_cpu[t]);
    if (std::isfinite(p.p_gpu[t])) hi = std::max(hi, p.p_gpu[t]);
    st.upper += hi;
  }
  const double accept_factor = DadaConfig::rho + cfg.alpha;
  while (st.upper - st.lower > cfg.epsilon) {
    const double lambda = (st.upper + st.lower) / 2.0;
    std::optional<BatchPlan> candidate = dual_assign(p, lambda, phase(p, lambda, cfg.alpha));
    SearchIteration it{lambda, false, kInf};
    if (candidate) it.makespan = candidate->makespan(p);
    if (candidate && it.makespan <= accept_factor * lambda) {
      it.accepted = true;
      st.upper = lambda;
      st.lambda = lambda;
      st.kept = std::move(candidate);
    } else {
      st.lower = lambda;
    }
    st.iterations.push_back(it);
  }
  return st;
}

Assignment to_assignment(const BatchProblem& p, const BatchPlan& plan) {
  Assignment out;
  out.placements.reserve(plan.order.size());
  for (auto [t, w] : plan.order) {
    out.placements.push_back({p.tasks[t], p.workers[w], p.exec[t][w], p.cost[t][w] - p.exec[t][w]});
  }
  return out;
}

Assignment dada_activate(const ActivationBatch& batch, const PlanningContext& ctx, const DadaConfig& cfg,
                         const AffinityPhaseFn& phase) {
  BatchProblem problem = make_batch_problem(batch, ctx, cfg.with_cp);
  SearchState st = dual_search(problem, cfg, phase);
  if (!st.kept) return heft_activate(batch, ctx);
  return to_assignment(problem, *st.kept);
}

DadaScheduler::DadaScheduler(DadaConfig cfg, AffinityPhaseFn phase) : cfg_(cfg), phase_(std::move(phase)) {
  cfg_.validate();
}

Assignment DadaScheduler::activate(const ActivationBatch& batch, const PlanningContext& ctx) {
  ++batches_;
  BatchProblem problem = make_batch_problem(batch, ctx, cfg_.with_cp);
  SearchState st = dual_search(problem, cfg_, phase_);
  if (!st.kept) {
    ++fallbacks_;
    return heft_activate(batch, ctx);
  }
  return to_assignment(problem, *st.kept);
}

}  // namespace hetsched
