#pragma once

#include <random>

#include "hetsched/sched.hpp"

namespace hetsched {

// Newly ready tasks go to the queue of the worker that completed their last
// predecessor (worker 0 for the initial batch). Balancing happens by steals.
class WorkStealingScheduler final : public Scheduler {
 public:
  std::string name() const override { return "ws"; }
  Assignment activate(const ActivationBatch& batch, const PlanningContext& ctx) override;
  bool steals() const override { return true; }
};

Assignment ws_activate(const ActivationBatch& batch, const PlanningContext& ctx);

// Uniform victim among the other workers; the thief never picks itself.
WorkerId pick_victim(WorkerId thief, std::size_t worker_count, std::mt19937_64& rng);

// Removes one entry from the tail of the victim's queue, if any.
std::optional<WorkerQueue::Entry> ws_steal(WorkerQueue& victim);

}  // namespace hetsched
