#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hetsched/graph.hpp"
#include "hetsched/kernels.hpp"
#include "hetsched/platform.hpp"
#include "hetsched/sim.hpp"

namespace hetsched::testing {

// Re-plays a recorded run and returns the first violated property, or "".
inline std::string check_run(const TaskGraph& g, const Platform& p, const SimReport& r) {
  auto fail = [](const std::string& what) { return what; };
  const std::size_t n = g.task_count();

  // Precedence and timing sanity.
  double latest = 0.0;
  for (const Task& t : g.tasks()) {
    const TaskRecord& rec = r.tasks[t.id.index];
    if (rec.start < rec.dispatch || rec.end < rec.start) return fail("bad times for task " + std::to_string(t.id.index));
    latest = std::max(latest, rec.end);
    for (TaskId s : g.successors(t.id)) {
      if (r.tasks[s.index].start < rec.end) {
        return fail("task " + std::to_string(s.index) + " started before predecessor " + std::to_string(t.id.index));
      }
    }
  }
  if (r.makespan != latest) return fail("makespan is not the last completion");
  double busy = 0.0;
  for (double b : r.busy) busy += b;
  if (busy > r.makespan * static_cast<double>(p.worker_count()) * (1 + 1e-12)) return fail("busy time exceeds capacity");
  if (r.bytes_total != r.bytes_h2d + r.bytes_d2h + r.bytes_d2d) return fail("byte totals disagree");

  if (r.trace.empty() && n > 0) return fail("no trace recorded");

  std::vector<int> starts(n, 0), ends(n, 0);
  std::vector<std::uint64_t> valid(g.data_count(), 1);  // host only
  std::set<std::pair<std::uint32_t, std::uint32_t>> in_flight;
  std::vector<int> writers(g.data_count(), 0), readers(g.data_count(), 0);
  std::uint64_t moved = 0, transfers = 0;

  for (const TraceRecord& e : r.trace) {
    const std::uint32_t node = e.worker >= 0 ? p.worker(WorkerId{static_cast<std::uint32_t>(e.worker)}).memory.index : 0;
    switch (e.kind) {
      case TraceKind::TransferStart: {
        DataId d{static_cast<std::uint32_t>(e.data)};
        const Task& t = g.task(TaskId{static_cast<std::uint32_t>(e.task)});
        bool read = std::any_of(t.accesses.begin(), t.accesses.end(),
                                [&](const Access& a) { return a.data == d && reads(a.mode); });
        if (!read) return fail("transfer of a block the task does not read");
        if ((valid[d.index] >> node) & 1u) return fail("transfer of a block already resident");
        if (!in_flight.emplace(d.index, node).second) return fail("duplicate in-flight transfer");
        if (valid[d.index] == 0) return fail("transfer of a block without a valid copy");
        if (e.bytes != g.data(d).size_bytes) return fail("transfer size mismatch");
        ++transfers;
        break;
      }
      case TraceKind::TransferEnd: {
        DataId d{static_cast<std::uint32_t>(e.data)};
        if (!in_flight.erase({d.index, node})) return fail("transfer ended without starting");
        valid[d.index] |= std::uint64_t{1} << node;
        moved += e.bytes;
        break;
      }
      case TraceKind::Start: {
        const Task& t = g.task(TaskId{static_cast<std::uint32_t>(e.task)});
        if (++starts[t.id.index] != 1) return fail("task started twice");
        for (const Access& a : t.accesses) {
          if (reads(a.mode) && !((valid[a.data.index] >> node) & 1u)) return fail("input missing at start");
          if (writes(a.mode)) {
            if (writers[a.data.index] > 0 || readers[a.data.index] > 0) return fail("concurrent writer");
            ++writers[a.data.index];
          } else {
            if (writers[a.data.index] > 0) return fail("read during a write");
            ++readers[a.data.index];
          }
        }
        break;
      }
      case TraceKind::End: {
        const Task& t = g.task(TaskId{static_cast<std::uint32_t>(e.task)});
        if (starts[t.id.index] != 1 || ++ends[t.id.index] != 1) return fail("task ended twice or before starting");
        for (const Access& a : t.accesses) {
          if (writes(a.mode)) {
            --writers[a.data.index];
            valid[a.data.index] = std::uint64_t{1} << node;
          } else {
            --readers[a.data.index];
          }
        }
        break;
      }
      default: break;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (starts[i] != 1 || ends[i] != 1) return fail("task " + std::to_string(i) + " not executed exactly once");
  }
  if (!in_flight.empty()) return fail("transfers left in flight");
  if (moved != r.bytes_total || transfers != r.transfers) return fail("transfer accounting mismatch");
  return "";
}

// max(critical path, total work / workers), both on each task's fastest available class.
inline double makespan_lower_bound(const TaskGraph& g, const Platform& p, const TimingTable& truth) {
  auto fastest = [&](const Task& t) {
    double best = std::numeric_limits<double>::infinity();
    if (p.cpu_workers() > 0) best = std::min(best, truth.at({t.kind, ResourceClass::CPU}));
    if (p.gpu_workers() > 0) best = std::min(best, truth.at({t.kind, ResourceClass::GPU}));
    return best;
  };
  std::vector<double> finish(g.task_count(), 0.0);
  double path = 0.0, area = 0.0;
  for (TaskId id : g.topological_order()) {
    const Task& t = g.task(id);
    double ready = 0.0;
    for (TaskId q : g.predecessors(id)) ready = std::max(ready, finish[q.index]);
    finish[id.index] = ready + fastest(t);
    path = std::max(path, finish[id.index]);
    area += fastest(t);
  }
  return std::max(path, area / static_cast<double>(p.worker_count()));
}

}  // namespace hetsched::testing
