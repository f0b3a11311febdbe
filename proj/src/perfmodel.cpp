#include "hetsched/perfmodel.hpp"

#include <algorithm>
#include <cmath>

namespace hetsched {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double PerfModel::predict_exec(const std::string& kind, ResourceClass cls) const {
  TimingKey key{kind, cls};
  if (auto it = history_.find(key); it != history_.end() && it->second.samples >= threshold_) {
    return it->second.mean;
  }
  if (auto it = fallback_.find(key); it != fallback_.end()) return it->second;
  if (auto it = history_.find(key); it != history_.end() && it->second.samples > 0) {
    return it->second.mean;
  }
  throw PerfModelError("uncalibrated kind " + kind + " on " + std::string(to_string(cls)));
}

bool PerfModel::has_timing(const std::string& kind, ResourceClass cls) const {
  TimingKey key{kind, cls};
  if (fallback_.contains(key)) return true;
  auto it = history_.find(key);
  return it != history_.end() && it->second.samples > 0;
}

void PerfModel::record_sample(const std::string& kind, ResourceClass cls, double duration) {
  if (!(duration > 0.0)) throw PerfModelError("sample duration must be positive");
  HistoryEntry& e = history_[TimingKey{kind, cls}];
  e.samples += 1;
  e.mean += (duration - e.mean) / static_cast<double>(e.samples);
}

const HistoryEntry* PerfModel::history(const std::string& kind, ResourceClass cls) const {
  auto it = history_.find(TimingKey{kind, cls});
  return it == history_.end() ? nullptr : &it->second;
}

void PerfModel::set_fallback(const std::string& kind, ResourceClass cls, double seconds) {
  if (!(seconds > 0.0)) throw PerfModelError("timing for " + kind + " must be positive");
  fallback_[TimingKey{kind, cls}] = seconds;
}

TimingTable scale_timings(const TimingTable& table, double factor) {
  TimingTable out;
  for (const auto& [key, value] : table) out.emplace(key, value * factor);
  return out;
}

void LoadTimestamps::sync(double now) {
  for (double& r : ready_at_) r = std::max(r, now);
}

void LoadTimestamps::push(WorkerId w, double now, double cost) {
  ready_at_[w.index] = std::max(ready_at_[w.index], now) + cost;
}

void LoadTimestamps::resync(WorkerId w, double now, double pending) {
  last_completion_[w.index] = now;
  ready_at_[w.index] = now + pending;
}

double predict_transfer(const Platform& platform, const TaskGraph& graph, const Task& task,
                        const Worker& worker, const ResidencyMap& residency) {
  double total = 0.0;
  for (const Access& a : task.accesses) {
    if (!reads(a.mode) || residency.valid_on(a.data, worker.memory)) continue;
    auto src = residency.preferred_source(a.data);
    if (!src) {
      throw PerfModelError("data " + std::to_string(a.data.index) + " has no valid copy");
    }
    total += platform.raw_transfer_time(graph.data(a.data).size_bytes, *src, worker.memory);
  }
  return total;
}

double completion_time(const PerfModel& model, const LoadTimestamps& stamps, const Platform& platform,
                       const TaskGraph& graph, const ResidencyMap& residency, const Task& task,
                       WorkerId worker, bool with_cp) {
  const Worker& w = platform.worker(worker);
  double t = stamps.ready_at(worker);
  if (with_cp) t += predict_transfer(platform, graph, task, w, residency);
  return t + model.predict_exec(task, w.cls);
}

NoiseModel::NoiseModel(std::uint64_t seed, double relative_amplitude)
    : seed_(seed), amplitude_(relative_amplitude) {
  if (!(relative_amplitude >= 0.0 && relative_amplitude < 1.0)) {
    throw PerfModelError("noise amplitude must lie in [0, 1)");
  }
}

double NoiseModel::factor(TaskId task, WorkerId worker) const {
  if (amplitude_ == 0.0) return 1.0;
  std::uint64_t h = splitmix64(seed_);
  h = splitmix64(h ^ (std::uint64_t{task.index} << 20) ^ worker.index);
  // 53 random mantissa bits -> [0, 1)
  double u01 = static_cast<double>(h >> 11) * 0x1.0p-53;
  return 1.0 + amplitude_ * (2.0 * u01 - 1.0);
}

}  // namespace hetsched
