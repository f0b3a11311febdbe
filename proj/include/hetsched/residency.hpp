#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hetsched/graph.hpp"
#include "hetsched/platform.hpp"

namespace hetsched {

// Which memory nodes hold a valid copy of each block. Node sets are bitmasks
// so the simulated platform is limited to 63 GPUs.
class ResidencyMap {
 public:
  ResidencyMap() = default;
  // Every block starts valid on the host only.
  ResidencyMap(std::size_t data_count, std::size_t node_count);

  std::size_t data_count() const { return masks_.size(); }
  std::size_t node_count() const { return node_count_; }

  bool valid_on(DataId d, MemoryNodeId n) const { return (masks_[d.index] >> n.index) & 1u; }
  std::size_t holder_count(DataId d) const;
  std::vector<MemoryNodeId> holders(DataId d) const;

  void add(DataId d, MemoryNodeId n) { masks_[d.index] |= bit(n); }
  // Invalidate all other copies.
  void set_exclusive(DataId d, MemoryNodeId n) { masks_[d.index] = bit(n); }
  void set(DataId d, std::uint64_t mask) { masks_[d.index] = mask; }
  std::uint64_t mask(DataId d) const { return masks_[d.index]; }

  // Host if valid there, else the lowest-index GPU node; nullopt if no copy exists.
  std::optional<MemoryNodeId> preferred_source(DataId d) const;

  friend bool operator==(const ResidencyMap&, const ResidencyMap&) = default;

 private:
  static std::uint64_t bit(MemoryNodeId n) { return std::uint64_t{1} << n.index; }
  std::vector<std::uint64_t> masks_;
  std::size_t node_count_ = 0;
};

}  // namespace hetsched
