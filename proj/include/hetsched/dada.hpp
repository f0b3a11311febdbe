#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "hetsched/sched.hpp"

namespace hetsched {

// A batch of ready tasks reduced to the numbers the dual approximation needs.
// Tasks and workers are addressed by their position in `tasks` / `workers`.
struct BatchProblem {
  std::vector<TaskId> tasks;
  std::vector<WorkerId> workers;            // ascending WorkerId
  std::vector<ResourceClass> worker_class;  // parallel to workers
  std::vector<double> p_cpu;                // per task, +inf without CPUs
  std::vector<double> p_gpu;                // per task, +inf without GPUs
  // cost[t][w]: execution (plus predicted transfer when cp is on) of task t on worker w.
  std::vector<std::vector<double>> cost;
  std::vector<std::vector<double>> exec;
  // Predicted backlog of worker w beyond the activation date.
  std::vector<double> backlog;
  // score[t][w]: affinity bytes.
  std::vector<std::vector<std::uint64_t>> score;

  std::size_t task_count() const { return tasks.size(); }
  std::size_t worker_count() const { return workers.size(); }
  double speedup(std::size_t t) const { return p_cpu[t] / p_gpu[t]; }
};

// Builds the reduced problem from the simulator state.
BatchProblem make_batch_problem(const ActivationBatch& batch, const PlanningContext& ctx, bool with_cp);

// Abstract problem for tests: identical CPUs, identical GPUs, tasks given by
// (p_cpu, p_gpu), no transfers, idle workers, zero affinity.
BatchProblem make_independent_problem(const std::vector<TaskTiming>& timings, unsigned cpus, unsigned gpus);

// Partial schedule over a BatchProblem.
struct BatchPlan {
  // (task index, worker index) in push order.
  std::vector<std::pair<std::size_t, std::size_t>> order;
  std::vector<int> worker_of;  // -1 when unplaced
  std::vector<double> load;    // batch-local load per worker

  explicit BatchPlan(const BatchProblem& p)
      : worker_of(p.task_count(), -1), load(p.worker_count(), 0.0) {}
  void place(const BatchProblem& p, std::size_t t, std::size_t w);
  std::size_t placed_count() const { return order.size(); }
  // Latest predicted finish, backlog plus batch load, over the workers that
  // received a task of the batch.
  double makespan(const BatchProblem& p) const;
};

// Affinity bytes of a task on a worker: sizes of the task's Write/ReadWrite
// blocks already valid on the worker's memory node.
std::uint64_t affinity_score(const TaskGraph& graph, const Task& task, const Worker& worker,
                             const ResidencyMap& residency);

// Places tasks on their affinity workers, best score first (ties by task then
// worker index), while the worker's backlog plus load before the placement is
// <= alpha * lambda.
// Nothing is placed when alpha is 0.
BatchPlan affinity_phase(const BatchProblem& p, double lambda, double alpha);

// Dual step on the tasks the affinity phase left unplaced. GPUs are filled
// while backlog plus load stays <= lambda. Returns nullopt for a proven
// reject (some task exceeds lambda on every class).
std::optional<BatchPlan> dual_assign(const BatchProblem& p, double lambda, BatchPlan plan);

struct SearchIteration {
  double lambda = 0.0;
  bool accepted = false;
  double makespan = 0.0;  // of the candidate; +inf when dual_assign rejected
};

struct SearchState {
  double lower = 0.0;
  double upper = 0.0;
  double lambda = 0.0;  // last accepted guess
  std::optional<BatchPlan> kept;
  std::vector<SearchIteration> iterations;
};

using AffinityPhaseFn = std::function<BatchPlan(const BatchProblem&, double lambda, double alpha)>;

// Binary search on lambda over [0, max backlog + sum_i max(p_cpu, p_gpu)] to
// precision epsilon; a candidate is kept when its makespan is <= (2 + alpha) * lambda.
SearchState dual_search(const BatchProblem& p, const DadaConfig& cfg,
                        const AffinityPhaseFn& phase = affinity_phase);

// Runs dual_search and converts the kept plan; falls back to HEFT when no
// lambda was accepted.
Assignment dada_activate(const ActivationBatch& batch, const PlanningContext& ctx, const DadaConfig& cfg,
                         const AffinityPhaseFn& phase = affinity_phase);

Assignment to_assignment(const BatchProblem& p, const BatchPlan& plan);

class DadaScheduler final : public Scheduler {
 public:
  explicit DadaScheduler(DadaConfig cfg, AffinityPhaseFn phase = affinity_phase);
  std::string name() const override { return "dada"; }
  Assignment activate(const ActivationBatch& batch, const PlanningContext& ctx) override;

  const DadaConfig& config() const { return cfg_; }
  std::uint64_t batches() const { return batches_; }
  std::uint64_t heft_fallbacks() const { return fallbacks_; }

 private:
  DadaConfig cfg_;
  AffinityPhaseFn phase_;
  std::uint64_t batches_ = 0;
  std::uint64_t fallbacks_ = 0;
};

}  // namespace hetsched
