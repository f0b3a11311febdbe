#pragma once

#include <cmath>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hetsched/graph.hpp"
#include "hetsched/perfmodel.hpp"
#include "hetsched/platform.hpp"
#include "hetsched/residency.hpp"

namespace hetsched {

// Owner pops from the head, thieves take from the tail.
class WorkerQueue {
 public:
  struct Entry {
    TaskId task;
    double cost = 0.0;  // predicted seconds charged to the load stamp
  };

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  void push(Entry e) { entries_.push_back(e); }
  std::optional<Entry> pop();
  std::optional<Entry> steal();
  const std::deque<Entry>& entries() const { return entries_; }

 private:
  std::deque<Entry> entries_;
};

// The ready list handed to activate after one completion.
struct ActivationBatch {
  std::vector<TaskId> ready;
  double now = 0.0;
  std::optional<WorkerId> finisher;  // empty for the initial source batch
};

// Read-only view of the runtime state a strategy may consult.
struct PlanningContext {
  const TaskGraph& graph;
  const Platform& platform;
  const PerfModel& model;
  const LoadTimestamps& stamps;  // already synced to batch.now
  const ResidencyMap& residency;
};

struct Placement {
  TaskId task;
  WorkerId worker;
  double exec = 0.0;      // predicted execution time
  double transfer = 0.0;  // predicted transfer time counted in the decision
  double cost() const { return exec + transfer; }
};

// Placements in push order; per-worker queue order follows it.
struct Assignment {
  std::vector<Placement> placements;

  std::optional<WorkerId> worker_of(TaskId t) const;
  // Max over workers of the summed placement costs.
  double batch_makespan(std::size_t worker_count) const;
};

class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual std::string name() const = 0;
  virtual Assignment activate(const ActivationBatch& batch, const PlanningContext& ctx) = 0;
  // Idle workers issue steal requests when true.
  virtual bool steals() const { return false; }
};

// Relative tolerance under which two predicted dates count as a tie.
inline constexpr double kTieTolerance = 1e-9;
inline bool earlier(double a, double b) {
  if (std::isinf(b)) return a < b;
  return a < b - kTieTolerance * std::abs(b);
}

// Predicted execution times of a task on each class; +inf for an absent class.
TaskTiming task_timing(const PlanningContext& ctx, const Task& task);

struct DadaConfig {
  double alpha = 0.5;
  double epsilon = 1e-5;
  bool with_cp = false;
  static constexpr double rho = 2.0;
  void validate() const;
};

struct SchedulerSpec {
  std::string name = "dada";  // heft | dada | ws
  DadaConfig dada;
};

std::unique_ptr<Scheduler> make_scheduler(const SchedulerSpec& spec);

}  // namespace hetsched
