#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetsched/graph.hpp"
#include "hetsched/kernels.hpp"
#include "hetsched/perfmodel.hpp"
#include "hetsched/platform.hpp"
#include "hetsched/sched.hpp"
#include "hetsched/transfer.hpp"

namespace hetsched {

enum class TraceKind { Push, Dispatch, Start, End, TransferStart, TransferEnd, Steal, StealFail };

std::string_view to_string(TraceKind k);

// Columns: time,kind,worker,task,data,bytes. Transfers carry the worker that
// requested them; task/data are -1 where they do not apply.
struct TraceRecord {
  double time = 0.0;
  TraceKind kind = TraceKind::Push;
  std::int64_t worker = -1;
  std::int64_t task = -1;
  std::int64_t data = -1;
  std::uint64_t bytes = 0;
  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

void write_trace(std::ostream& os, const std::vector<TraceRecord>& trace);

struct TaskRecord {
  WorkerId worker;
  double dispatch = 0.0;  // popped or stolen
  double start = 0.0;     // inputs present, execution begins
  double end = 0.0;
  friend bool operator==(const TaskRecord&, const TaskRecord&) = default;
};

struct SimReport {
  double makespan = 0.0;
  double flops = 0.0;
  double gflops = 0.0;
  std::uint64_t bytes_h2d = 0;
  std::uint64_t bytes_d2h = 0;
  std::uint64_t bytes_d2d = 0;
  std::uint64_t bytes_total = 0;
  std::uint64_t steals_ok = 0;
  std::uint64_t steals_failed = 0;
  std::uint64_t transfers = 0;
  std::vector<double> busy;         // per worker
  std::vector<TaskRecord> tasks;    // per task
  std::vector<TraceRecord> trace;   // only when requested
  PerfModel final_model;

  // Everything except the final model, which only differs when the inputs do.
  friend bool operator==(const SimReport& a, const SimReport& b) {
    return a.makespan == b.makespan && a.flops == b.flops && a.bytes_h2d == b.bytes_h2d &&
           a.bytes_d2h == b.bytes_d2h && a.bytes_d2d == b.bytes_d2d && a.bytes_total == b.bytes_total &&
           a.steals_ok == b.steals_ok && a.steals_failed == b.steals_failed && a.transfers == b.transfers &&
           a.busy == b.busy && a.tasks == b.tasks && a.trace == b.trace;
  }
};

struct SimOptions {
  std::uint64_t seed = 0;
  double noise = 0.0;            // relative amplitude of realized durations
  double steal_latency = 1e-6;   // one steal request round trip
  bool record_trace = false;
  std::optional<double> nominal_flops;  // GFlop/s numerator; defaults to the tasks' sum
};

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Executes the graph. Ground-truth durations are the model's fallback table
// (perturbed by the noise model); the scheduler sees the model's predictions,
// which are calibrated with every realized duration.
SimReport run(const TaskGraph& graph, const Platform& platform, Scheduler& scheduler, PerfModel model,
              const SimOptions& options = {});

// Leading-order flop counts: Cholesky n^3/3, LU 2n^3/3, QR 4n^3/3.
double flops_of(KernelFamily family, double n);

}  // namespace hetsched
