#pragma once

#include "hetsched/sched.hpp"

namespace hetsched {

// Ready tasks sorted by decreasing CPU/GPU speedup (ties: ascending TaskId),
// each placed on the worker with the earliest predicted finish, transfers
// included. Stamps and residency are updated hypothetically between
// placements.
Assignment heft_activate(const ActivationBatch& batch, const PlanningContext& ctx);

// Processing order used by heft_activate.
std::vector<TaskId> heft_order(const ActivationBatch& batch, const PlanningContext& ctx);

class HeftScheduler final : public Scheduler {
 public:
  std::string name() const override { return "heft"; }
  Assignment activate(const ActivationBatch& batch, const PlanningContext& ctx) override {
    return heft_activate(batch, ctx);
  }
};

}  // namespace hetsched
