#pragma once

#include <cstdint>
#include <vector>

#include "hetsched/platform.hpp"

namespace hetsched {

enum class TransferDirection { HostToDevice, DeviceToHost, DeviceToDevice };

struct TransferHop {
  MemoryNodeId gpu_node;  // the device whose link the hop uses
  double start = 0.0;
  double end = 0.0;
};

struct TransferBooking {
  TransferDirection direction = TransferDirection::HostToDevice;
  std::vector<TransferHop> hops;
  double start() const { return hops.front().start; }
  double end() const { return hops.back().end; }
};

// Contention model for PCIe traffic. Each GPU link carries one transfer at a
// time; each switch carries Platform::switch_lanes() at a time. A hop starts
// at the earliest date its link and one lane of its switch are both free and
// books them until it ends.
class TransferEngine {
 public:
  explicit TransferEngine(const Platform& platform);

  // from != to.
  TransferBooking book(std::uint64_t bytes, MemoryNodeId from, MemoryNodeId to, double ready);

  double link_busy_until(MemoryNodeId gpu_node) const { return link_busy_[gpu_node.index - 1]; }
  // Latest end date booked on any lane of the switch.
  double switch_busy_until(std::uint32_t sw) const;

 private:
  TransferHop book_hop(MemoryNodeId gpu, MemoryNodeId other_gpu, double duration, double ready);
  std::size_t free_lane(std::uint32_t sw) const;

  const Platform* platform_;
  std::vector<double> link_busy_;
  std::vector<std::vector<double>> lanes_;
};

}  // namespace hetsched
