#include "hetsched/transfer.hpp"

#include <algorithm>
#include <stdexcept>

namespace hetsched {

TransferEngine::TransferEngine(const Platform& platform)
    : platform_(&platform),
      link_busy_(platform.gpu_workers(), 0.0),
      lanes_(platform.switch_count(), std::vector<double>(platform.switch_lanes(), 0.0)) {}

double TransferEngine::switch_busy_until(std::uint32_t sw) const {
  return *std::max_element(lanes_[sw].begin(), lanes_[sw].end());
}

std::size_t TransferEngine::free_lane(std::uint32_t sw) const {
  const auto& l = lanes_[sw];
  return static_cast<std::size_t>(std::min_element(l.begin(), l.end()) - l.begin());
}

// `other_gpu` is the far end of a peer-to-peer hop, or the host.
TransferHop TransferEngine::book_hop(MemoryNodeId gpu, MemoryNodeId other_gpu, double duration, double ready) {
  std::uint32_t sw = platform_->switch_of(gpu);
  std::size_t lane = free_lane(sw);
  double start = std::max({ready, link_busy_[gpu.index - 1], lanes_[sw][lane]});

  std::uint32_t other_sw = sw;
  std::size_t other_lane = lane;
  if (other_gpu != kHostNode) {
    start = std::max(start, link_busy_[other_gpu.index - 1]);
    other_sw = platform_->switch_of(other_gpu);
    if (other_sw != sw) {
      other_lane = free_lane(other_sw);
      start = std::max(start, lanes_[other_sw][other_lane]);
    }
  }

  double end = start + duration;
  link_busy_[gpu.index - 1] = end;
  lanes_[sw][lane] = end;
  if (other_gpu != kHostNode) {
    link_busy_[other_gpu.index - 1] = end;
    lanes_[other_sw][other_lane] = end;
  }
  return {gpu, start, end};
}

TransferBooking TransferEngine::book(std::uint64_t bytes, MemoryNodeId from, MemoryNodeId to, double ready) {
  if (from == to) throw std::logic_error("transfer to the node that already holds the data");
  TransferBooking b;
  if (from == kHostNode) {
    b.direction = TransferDirection::HostToDevice;
    b.hops.push_back(book_hop(to, kHostNode, platform_->raw_transfer_time(bytes, from, to), ready));
  } else if (to == kHostNode) {
    b.direction = TransferDirection::DeviceToHost;
    b.hops.push_back(book_hop(from, kHostNode, platform_->raw_transfer_time(bytes, from, to), ready));
  } else {
    b.direction = TransferDirection::DeviceToDevice;
    if (platform_->peer_to_peer()) {
      b.hops.push_back(book_hop(to, from, platform_->raw_transfer_time(bytes, from, to), ready));
    } else {
      TransferHop up = book_hop(from, kHostNode, platform_->raw_transfer_time(bytes, from, kHostNode), ready);
      b.hops.push_back(up);
      b.hops.push_back(book_hop(to, kHostNode, platform_->raw_transfer_time(bytes, kHostNode, to), up.end));
    }
  }
  return b;
}

}  // namespace hetsched
