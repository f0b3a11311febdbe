#include "hetsched/graph.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

#include <json.hpp>

namespace hetsched {

DataId GraphBuilder::add_data(std::uint64_t size_bytes) {
  if (sealed_) throw GraphError("graph already sealed");
  if (size_bytes == 0) throw GraphError("data block size must be positive");
  DataId id{static_cast<std::uint32_t>(data_.size())};
  data_.push_back({id, size_bytes});
  return id;
}

TaskId GraphBuilder::add_task(std::string kind, std::vector<Access> accesses, double flops) {
  if (sealed_) throw GraphError("graph already sealed");
  if (!(flops >= 0.0)) throw GraphError("task flops must be non-negative");
  std::vector<std::uint32_t> seen;
  seen.reserve(accesses.size());
  for (const Access& a : accesses) {
    if (a.data.index >= data_.size()) {
      throw GraphError("task '" + kind + "' references undeclared data " +
                       std::to_string(a.data.index));
    }
    if (std::find(seen.begin(), seen.end(), a.data.index) != seen.end()) {
      throw GraphError("task '" + kind + "' accesses data " + std::to_string(a.data.index) +
                       " more than once");
    }
    seen.push_back(a.data.index);
  }
  TaskId id{static_cast<std::uint32_t>(tasks_.size())};
  tasks_.push_back({id, std::move(kind), std::move(accesses), flops});
  return id;
}

TaskGraph GraphBuilder::seal() && {
  sealed_ = true;
  TaskGraph g;
  const std::size_t n = tasks_.size();
  g.succ_.resize(n);
  g.pred_.resize(n);

  // Per block: last writer and the readers seen since that write.
  struct BlockState {
    std::int64_t last_writer = -1;
    std::vector<std::uint32_t> readers;
  };
  std::vector<BlockState> state(data_.size());

  for (const Task& t : tasks_) {
    std::vector<std::uint32_t> preds;
    for (const Access& a : t.accesses) {
      BlockState& b = state[a.data.index];
      if (b.last_writer >= 0) preds.push_back(static_cast<std::uint32_t>(b.last_writer));
      if (writes(a.mode)) {
        preds.insert(preds.end(), b.readers.begin(), b.readers.end());
      }
    }
    std::sort(preds.begin(), preds.end());
    preds.erase(std::unique(preds.begin(), preds.end()), preds.end());
    for (std::uint32_t p : preds) g.pred_[t.id.index].push_back(TaskId{p});

    for (const Access& a : t.accesses) {
      BlockState& b = state[a.data.index];
      if (writes(a.mode)) {
        b.last_writer = t.id.index;
        b.readers.clear();
      } else {
        b.readers.push_back(t.id.index);
      }
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    for (TaskId u : g.pred_[v]) g.succ_[u.index].push_back(TaskId{static_cast<std::uint32_t>(v)});
    g.edge_count_ += g.pred_[v].size();
  }
  g.tasks_ = std::move(tasks_);
  g.data_ = std::move(data_);
  return g;
}

void TaskGraph::check(TaskId id) const {
  if (id.index >= tasks_.size()) {
    throw GraphError("unknown task " + std::to_string(id.index));
  }
}

const Task& TaskGraph::task(TaskId id) const {
  check(id);
  return tasks_[id.index];
}

const DataBlock& TaskGraph::data(DataId id) const {
  if (id.index >= data_.size()) throw GraphError("unknown data " + std::to_string(id.index));
  return data_[id.index];
}

std::span<const TaskId> TaskGraph::successors(TaskId id) const {
  check(id);
  return succ_[id.index];
}

std::span<const TaskId> TaskGraph::predecessors(TaskId id) const {
  check(id);
  return pred_[id.index];
}

std::vector<TaskId> TaskGraph::sources() const {
  std::vector<TaskId> out;
  for (const Task& t : tasks_) {
    if (pred_[t.id.index].empty()) out.push_back(t.id);
  }
  return out;
}

double TaskGraph::total_flops() const {
  double sum = 0.0;
  for (const Task& t : tasks_) sum += t.flops;
  return sum;
}

std::vector<TaskId> TaskGraph::topological_order() const {
  std::vector<std::size_t> indeg(tasks_.size());
  std::queue<TaskId> ready;
  for (const Task& t : tasks_) {
    indeg[t.id.index] = pred_[t.id.index].size();
    if (indeg[t.id.index] == 0) ready.push(t.id);
  }
  std::vector<TaskId> order;
  order.reserve(tasks_.size());
  while (!ready.empty()) {
    TaskId u = ready.front();
    ready.pop();
    order.push_back(u);
    for (TaskId v : succ_[u.index]) {
      if (--indeg[v.index] == 0) ready.push(v);
    }
  }
  if (order.size() != tasks_.size()) throw GraphError("task graph has a cycle");
  return order;
}

std::string_view to_string(AccessMode m) {
  switch (m) {
    case AccessMode::Read: return "R";
    case AccessMode::Write: return "W";
    case AccessMode::ReadWrite: return "RW";
  }
  return "?";
}

std::string export_dot(const TaskGraph& graph) {
  std::ostringstream os;
  os << "digraph G {\n";
  for (const Task& t : graph.tasks()) {
    os << "  " << t.id.index << " [label=\"" << t.kind << '#' << t.id.index << "\"];\n";
  }
  for (const Task& t : graph.tasks()) {
    for (TaskId s : graph.successors(t.id)) {
      os << "  " << t.id.index << " -> " << s.index << ";\n";
    }
  }
  os << "}\n";
  return os.str();
}

std::string export_json(const TaskGraph& graph) {
  nlohmann::json j;
  j["data"] = nlohmann::json::array();
  for (const DataBlock& d : graph.data()) {
    j["data"].push_back({{"id", d.id.index}, {"size", d.size_bytes}});
  }
  j["tasks"] = nlohmann::json::array();
  for (const Task& t : graph.tasks()) {
    nlohmann::json acc = nlohmann::json::array();
    for (const Access& a : t.accesses) {
      acc.push_back({{"data", a.data.index}, {"mode", to_string(a.mode)}});
    }
    nlohmann::json succ = nlohmann::json::array();
    for (TaskId s : graph.successors(t.id)) succ.push_back(s.index);
    j["tasks"].push_back({{"id", t.id.index},
                          {"kind", t.kind},
                          {"flops", t.flops},
                          {"accesses", std::move(acc)},
                          {"successors", std::move(succ)}});
  }
  return j.dump(2);
}

}  // namespace hetsched
