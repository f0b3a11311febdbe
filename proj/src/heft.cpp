#include "hetsched/heft.hpp"

#include <algorithm>
#include <limits>

namespace hetsched {

std::vector<TaskId> heft_order(const ActivationBatch& batch, const PlanningContext& ctx) {
  std::vector<std::pair<double, TaskId>> keyed;
  keyed.reserve(batch.ready.size());
  for (TaskId t : batch.ready) keyed.emplace_back(task_timing(ctx, ctx.graph.task(t)).speedup(), t);
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<TaskId> out;
  out.reserve(keyed.size());
  for (const auto& k : keyed) out.push_back(k.second);
  return out;
}

Assignment heft_activate(const ActivationBatch& batch, const PlanningContext& ctx) {
  LoadTimestamps stamps = ctx.stamps;
  ResidencyMap residency = ctx.residency;
  Assignment out;

  for (TaskId id : heft_order(batch, ctx)) {
    const Task& task = ctx.graph.task(id);
    double best = std::numeric_limits<double>::infinity();
    Placement chosen{id, WorkerId{0}};
    for (const Worker& w : ctx.platform.workers()) {
      double transfer = predict_transfer(ctx.platform, ctx.graph, task, w, residency);
      double exec = ctx.model.predict_exec(task, w.cls);
      double finish = stamps.ready_at(w.id) + transfer + exec;
      if (earlier(finish, best)) {
        best = finish;
        chosen = {id, w.id, exec, transfer};
      }
    }
    stamps.push(chosen.worker, batch.now, chosen.cost());
    MemoryNodeId node = ctx.platform.worker(chosen.worker).memory;
    for (const Access& a : task.accesses) {
      if (writes(a.mode)) {
        residency.set_exclusive(a.data, node);
      } else {
        residency.add(a.data, node);
      }
    }
    out.placements.push_back(chosen);
  }
  return out;
}

}  // namespace hetsched
