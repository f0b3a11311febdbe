#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetsched/graph.hpp"
#include "hetsched/platform.hpp"
#include "hetsched/residency.hpp"

namespace hetsched {

struct TimingKey {
  std::string kind;
  ResourceClass cls = ResourceClass::CPU;
  friend auto operator<=>(const TimingKey&, const TimingKey&) = default;
};

// Seed estimates (and, in the simulator, ground-truth durations) per kernel kind and class.
using TimingTable = std::map<TimingKey, double>;

class PerfModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HistoryEntry {
  std::uint64_t samples = 0;
  double mean = 0.0;
};

// History-based execution model: the running mean of observed durations once
// `threshold` samples exist, the fallback table before that.
class PerfModel {
 public:
  PerfModel() = default;
  explicit PerfModel(TimingTable fallback, std::uint64_t threshold = 1)
      : fallback_(std::move(fallback)), threshold_(threshold) {}

  double predict_exec(const std::string& kind, ResourceClass cls) const;
  double predict_exec(const Task& task, ResourceClass cls) const {
    return predict_exec(task.kind, cls);
  }
  bool has_timing(const std::string& kind, ResourceClass cls) const;

  void record_sample(const std::string& kind, ResourceClass cls, double duration);

  const HistoryEntry* history(const std::string& kind, ResourceClass cls) const;
  const TimingTable& fallback() const { return fallback_; }
  void set_fallback(const std::string& kind, ResourceClass cls, double seconds);

 private:
  TimingTable fallback_;
  std::map<TimingKey, HistoryEntry> history_;
  std::uint64_t threshold_ = 1;
};

// Multiplies every entry; used for scale-invariance checks.
TimingTable scale_timings(const TimingTable& table, double factor);

struct TaskTiming {
  double p_cpu = 0.0;
  double p_gpu = 0.0;
  double speedup() const { return p_cpu / p_gpu; }
};

// Per-worker predicted dates. All updates go through the simulation loop.
class LoadTimestamps {
 public:
  LoadTimestamps() = default;
  explicit LoadTimestamps(std::size_t workers) : ready_at_(workers, 0.0), last_completion_(workers, 0.0) {}

  std::size_t size() const { return ready_at_.size(); }
  double ready_at(WorkerId w) const { return ready_at_[w.index]; }
  double last_completion(WorkerId w) const { return last_completion_[w.index]; }

  // Lifts every stale stamp to `now`.
  void sync(double now);
  // Appends `cost` seconds of predicted work to worker w.
  void push(WorkerId w, double now, double cost);
  // A task just completed on w at `now`; `pending` is the predicted cost still queued.
  void resync(WorkerId w, double now, double pending);

 private:
  std::vector<double> ready_at_;
  std::vector<double> last_completion_;
};

// Sum of raw transfer times of the task's Read/ReadWrite inputs not valid on
// the worker's node, each fetched from ResidencyMap::preferred_source.
double predict_transfer(const Platform& platform, const TaskGraph& graph, const Task& task,
                        const Worker& worker, const ResidencyMap& residency);

double completion_time(const PerfModel& model, const LoadTimestamps& stamps, const Platform& platform,
                       const TaskGraph& graph, const ResidencyMap& residency, const Task& task,
                       WorkerId worker, bool with_cp);

// Realized duration = predicted * (1 + u), u ~ U[-a, a], a pure function of
// (seed, task, worker).
class NoiseModel {
 public:
  NoiseModel() = default;
  NoiseModel(std::uint64_t seed, double relative_amplitude);

  double amplitude() const { return amplitude_; }
  double factor(TaskId task, WorkerId worker) const;
  double perturb(double predicted, TaskId task, WorkerId worker) const {
    return predicted * factor(task, worker);
  }

 private:
  std::uint64_t seed_ = 0;
  double amplitude_ = 0.0;
};

}  // namespace hetsched
