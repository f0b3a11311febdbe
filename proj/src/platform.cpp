#include "hetsched/platform.hpp"

#include <cmath>
#include <string>

namespace hetsched {

std::string_view to_string(ResourceClass c) { return c == ResourceClass::CPU ? "CPU" : "GPU"; }

Platform Platform::build(const PlatformParams& p) {
  if (p.cpu_cores < p.gpus) {
    throw PlatformError("not enough CPU cores to host GPU workers (" + std::to_string(p.cpu_cores) +
                        " cores, " + std::to_string(p.gpus) + " GPUs)");
  }
  if (p.cpu_cores == 0) throw PlatformError("platform needs at least one worker");
  if (p.gpus > 0 && p.switches == 0) throw PlatformError("GPUs need at least one PCIe switch");
  if (!(p.link_bandwidth > 0.0)) throw PlatformError("link bandwidth must be positive");
  if (!(p.link_latency >= 0.0)) throw PlatformError("link latency must be non-negative");
  if (p.switch_cap && !(*p.switch_cap > 0.0)) throw PlatformError("switch cap must be positive");

  Platform pl;
  pl.cpu_cores_ = p.cpu_cores;
  pl.gpus_ = p.gpus;
  pl.switches_ = p.switches == 0 ? 1 : p.switches;
  pl.peer_to_peer_ = p.peer_to_peer;
  pl.switch_cap_ = p.switch_cap.value_or(p.link_bandwidth);

  std::uint32_t next = 0;
  for (unsigned c = 0; c < pl.cpu_workers(); ++c) {
    pl.workers_.push_back({WorkerId{next++}, ResourceClass::CPU, kHostNode});
  }
  for (unsigned g = 0; g < p.gpus; ++g) {
    MemoryNodeId node{g + 1};
    pl.workers_.push_back({WorkerId{next++}, ResourceClass::GPU, node});
    pl.links_.push_back({kHostNode, node, p.link_bandwidth, p.link_latency, g % pl.switches_});
  }
  return pl;
}

const Worker& Platform::worker(WorkerId id) const {
  if (id.index >= workers_.size()) throw PlatformError("unknown worker " + std::to_string(id.index));
  return workers_[id.index];
}

std::vector<WorkerId> Platform::workers_of(ResourceClass cls) const {
  std::vector<WorkerId> out;
  for (const Worker& w : workers_) {
    if (w.cls == cls) out.push_back(w.id);
  }
  return out;
}

void Platform::check_node(MemoryNodeId node) const {
  if (node.index > gpus_) throw PlatformError("unknown memory node " + std::to_string(node.index));
}

const Link& Platform::link_of(MemoryNodeId node) const {
  check_node(node);
  if (node == kHostNode) throw PlatformError("host memory has no PCIe link");
  return links_[node.index - 1];
}

std::uint32_t Platform::switch_of(MemoryNodeId node) const {
  return link_of(node).switch_index;
}

double Platform::raw_transfer_time(std::uint64_t bytes, MemoryNodeId from, MemoryNodeId to) const {
  check_node(from);
  check_node(to);
  if (from == to) return 0.0;
  auto hop = [&](const Link& l) { return l.latency + static_cast<double>(bytes) / l.bandwidth; };
  if (from == kHostNode) return hop(link_of(to));
  if (to == kHostNode) return hop(link_of(from));
  if (peer_to_peer_) return hop(link_of(to));
  return hop(link_of(from)) + hop(link_of(to));
}

unsigned Platform::switch_lanes() const {
  if (links_.empty()) return 1;
  double ratio = switch_cap_ / links_.front().bandwidth;
  if (!std::isfinite(ratio) || ratio >= static_cast<double>(gpus_)) return gpus_ == 0 ? 1 : gpus_;
  auto lanes = static_cast<unsigned>(std::floor(ratio));
  return lanes == 0 ? 1 : lanes;
}

Platform Platform::with_transfer_scale(double factor) const {
  Platform copy = *this;
  for (Link& l : copy.links_) {
    l.bandwidth /= factor;
    l.latency *= factor;
  }
  copy.switch_cap_ /= factor;
  return copy;
}

}  // namespace hetsched
