#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace hetsched {

enum class ResourceClass { CPU, GPU };

std::string_view to_string(ResourceClass c);

// 0 is host memory; 1..k are the GPU device memories.
struct MemoryNodeId {
  std::uint32_t index = 0;
  friend auto operator<=>(MemoryNodeId, MemoryNodeId) = default;
};

inline constexpr MemoryNodeId kHostNode{0};

struct WorkerId {
  std::uint32_t index = 0;
  friend auto operator<=>(WorkerId, WorkerId) = default;
};

struct Worker {
  WorkerId id;
  ResourceClass cls = ResourceClass::CPU;
  MemoryNodeId memory;
};

// Host <-> device link of one GPU; both directions share it.
struct Link {
  MemoryNodeId from;
  MemoryNodeId to;
  double bandwidth = 0.0;  // bytes/s
  double latency = 0.0;    // s
  std::uint32_t switch_index = 0;
};

class PlatformError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PlatformParams {
  unsigned cpu_cores = 12;
  unsigned gpus = 8;
  unsigned switches = 4;
  double link_bandwidth = 6e9;
  double link_latency = 10e-6;
  // Aggregate bandwidth one switch can carry. Defaults to a single link.
  std::optional<double> switch_cap;
  bool peer_to_peer = false;
};

// Worker order: the (m - k) CPU compute workers first, then GPU workers 0..k-1.
// Each GPU consumes one CPU core for its management thread.
class Platform {
 public:
  static Platform build(const PlatformParams& params);

  unsigned cpu_cores() const { return cpu_cores_; }
  unsigned cpu_workers() const { return cpu_cores_ - gpus_; }
  unsigned gpu_workers() const { return gpus_; }
  unsigned switch_count() const { return switches_; }
  std::size_t worker_count() const { return workers_.size(); }
  std::size_t memory_node_count() const { return gpus_ + 1u; }

  const std::vector<Worker>& workers() const { return workers_; }
  const Worker& worker(WorkerId id) const;
  std::vector<WorkerId> workers_of(ResourceClass cls) const;

  // Link of GPU node `node` (node != host).
  const Link& link_of(MemoryNodeId node) const;
  const std::vector<Link>& links() const { return links_; }

  double switch_cap() const { return switch_cap_; }
  bool peer_to_peer() const { return peer_to_peer_; }

  // GPU g (node g + 1) sits on switch g mod switch_count.
  std::uint32_t switch_of(MemoryNodeId node) const;

  // Contention-free route time: direct hops are latency + bytes / bandwidth,
  // device to device goes through the host as two hops unless peer_to_peer.
  double raw_transfer_time(std::uint64_t bytes, MemoryNodeId from, MemoryNodeId to) const;

  // Number of transfers one switch carries concurrently.
  unsigned switch_lanes() const;

  // Returns a copy with every transfer time multiplied by `factor`.
  Platform with_transfer_scale(double factor) const;

 private:
  void check_node(MemoryNodeId node) const;

  unsigned cpu_cores_ = 0;
  unsigned gpus_ = 0;
  unsigned switches_ = 1;
  std::vector<Worker> workers_;
  std::vector<Link> links_;  // links_[g] belongs to GPU node g + 1
  double switch_cap_ = std::numeric_limits<double>::infinity();
  bool peer_to_peer_ = false;
};

// Convenience for the common call shape.
inline Platform build_platform(unsigned m, unsigned k, unsigned n_switches, double link_bandwidth,
                               double link_latency, std::optional<double> switch_cap = {}) {
  return Platform::build({m, k, n_switches, link_bandwidth, link_latency, switch_cap, false});
}

}  // namespace hetsched
