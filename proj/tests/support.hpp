#pragma once

#include <string>
#include <vector>

#include "hetsched/graph.hpp"
#include "hetsched/perfmodel.hpp"
#include "hetsched/platform.hpp"
#include "hetsched/residency.hpp"
#include "hetsched/sched.hpp"

namespace hetsched::testing {

// Independent tasks "t<i>", one private block each, with per-task timings.
struct Batch {
  TaskGraph graph;
  Platform platform;
  PerfModel model;
  LoadTimestamps stamps;
  ResidencyMap residency;
  ActivationBatch batch;

  Batch(Platform p, const std::vector<TaskTiming>& timings, std::uint64_t block_bytes = 8)
      : platform(std::move(p)) {
    GraphBuilder b;
    TimingTable table;
    for (std::size_t i = 0; i < timings.size(); ++i) {
      DataId d = b.add_data(block_bytes);
      std::string kind = "t" + std::to_string(i);
      b.add_task(kind, {{d, AccessMode::ReadWrite}});
      table[{kind, ResourceClass::CPU}] = timings[i].p_cpu;
      table[{kind, ResourceClass::GPU}] = timings[i].p_gpu;
    }
    graph = std::move(b).seal();
    model = PerfModel(table);
    stamps = LoadTimestamps(platform.worker_count());
    residency = ResidencyMap(graph.data_count(), platform.memory_node_count());
    for (const Task& t : graph.tasks()) batch.ready.push_back(t.id);
  }

  PlanningContext ctx() const { return {graph, platform, model, stamps, residency}; }
};

// Zero-latency platform with effectively free transfers.
inline Platform free_platform(unsigned cpus, unsigned gpus, unsigned switches = 1) {
  return build_platform(cpus + gpus, gpus, switches, 1e30, 0.0);
}

}  // namespace hetsched::testing
