#include "hetsched/sched.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "hetsched/dada.hpp"
#include "hetsched/heft.hpp"
#include "hetsched/work_stealing.hpp"

namespace hetsched {

std::optional<WorkerQueue::Entry> WorkerQueue::pop() {
  if (entries_.empty()) return std::nullopt;
  Entry e = entries_.front();
  entries_.pop_front();
  return e;
}

std::optional<WorkerQueue::Entry> WorkerQueue::steal() {
  if (entries_.empty()) return std::nullopt;
  Entry e = entries_.back();
  entries_.pop_back();
  return e;
}

std::optional<WorkerId> Assignment::worker_of(TaskId t) const {
  for (const Placement& p : placements) {
    if (p.task == t) return p.worker;
  }
  return std::nullopt;
}

double Assignment::batch_makespan(std::size_t worker_count) const {
  std::vector<double> load(worker_count, 0.0);
  for (const Placement& p : placements) load[p.worker.index] += p.cost();
  return load.empty() ? 0.0 : *std::max_element(load.begin(), load.end());
}

TaskTiming task_timing(const PlanningContext& ctx, const Task& task) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  TaskTiming t{inf, inf};
  if (ctx.platform.cpu_workers() > 0) t.p_cpu = ctx.model.predict_exec(task, ResourceClass::CPU);
  if (ctx.platform.gpu_workers() > 0) t.p_gpu = ctx.model.predict_exec(task, ResourceClass::GPU);
  return t;
}

void DadaConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
}

std::unique_ptr<Scheduler> make_scheduler(const SchedulerSpec& spec) {
  if (spec.name == "heft") return std::make_unique<HeftScheduler>();
  if (spec.name == "ws") return std::make_unique<WorkStealingScheduler>();
  if (spec.name == "dada") {
    spec.dada.validate();
    return std::make_unique<DadaScheduler>(spec.dada);
  }
  throw std::invalid_argument("unknown scheduler '" + spec.name + "' (expected heft, dada or ws)");
}

}  // namespace hetsched
