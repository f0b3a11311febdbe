#include "hetsched/work_stealing.hpp"

namespace hetsched {

Assignment ws_activate(const ActivationBatch& batch, const PlanningContext& ctx) {
  WorkerId target = batch.finisher.value_or(WorkerId{0});
  const Worker& w = ctx.platform.worker(target);
  Assignment out;
  for (TaskId t : batch.ready) {
    out.placements.push_back({t, target, ctx.model.predict_exec(ctx.graph.task(t), w.cls), 0.0});
  }
  return out;
}

Assignment WorkStealingScheduler::activate(const ActivationBatch& batch, const PlanningContext& ctx) {
  return ws_activate(batch, ctx);
}

WorkerId pick_victim(WorkerId thief, std::size_t worker_count, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint32_t> dist(0, static_cast<std::uint32_t>(worker_count - 2));
  std::uint32_t v = dist(rng);
  if (v >= thief.index) ++v;
  return WorkerId{v};
}

std::optional<WorkerQueue::Entry> ws_steal(WorkerQueue& victim) { return victim.steal(); }

}  // namespace hetsched
