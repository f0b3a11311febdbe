#include "hetsched/residency.hpp"

#include <bit>
#include <stdexcept>

namespace hetsched {

ResidencyMap::ResidencyMap(std::size_t data_count, std::size_t node_count)
    : masks_(data_count, std::uint64_t{1}), node_count_(node_count) {
  if (node_count > 64) throw std::invalid_argument("residency map supports at most 63 GPUs");
}

std::size_t ResidencyMap::holder_count(DataId d) const {
  return static_cast<std::size_t>(std::popcount(masks_[d.index]));
}

std::vector<MemoryNodeId> ResidencyMap::holders(DataId d) const {
  std::vector<MemoryNodeId> out;
  for (std::uint32_t n = 0; n < node_count_; ++n) {
    if ((masks_[d.index] >> n) & 1u) out.push_back(MemoryNodeId{n});
  }
  return out;
}

std::optional<MemoryNodeId> ResidencyMap::preferred_source(DataId d) const {
  std::uint64_t m = masks_[d.index];
  if (m == 0) return std::nullopt;
  return MemoryNodeId{static_cast<std::uint32_t>(std::countr_zero(m))};
}

}  // namespace hetsched
