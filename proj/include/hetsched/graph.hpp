#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hetsched {

struct TaskId {
  std::uint32_t index = 0;
  friend auto operator<=>(TaskId, TaskId) = default;
};

struct DataId {
  std::uint32_t index = 0;
  friend auto operator<=>(DataId, DataId) = default;
};

enum class AccessMode { Read, Write, ReadWrite };

inline bool reads(AccessMode m) { return m != AccessMode::Write; }
inline bool writes(AccessMode m) { return m != AccessMode::Read; }

struct Access {
  DataId data;
  AccessMode mode = AccessMode::Read;
};

struct Task {
  TaskId id;
  std::string kind;
  std::vector<Access> accesses;
  double flops = 0.0;
};

struct DataBlock {
  DataId id;
  std::uint64_t size_bytes = 0;
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TaskGraph;

// Collects tasks in program order. Dependencies are derived on seal().
class GraphBuilder {
 public:
  DataId add_data(std::uint64_t size_bytes);
  TaskId add_task(std::string kind, std::vector<Access> accesses, double flops = 0.0);

  std::size_t task_count() const { return tasks_.size(); }
  std::size_t data_count() const { return data_.size(); }

  // Consumes the builder.
  TaskGraph seal() &&;

 private:
  std::vector<Task> tasks_;
  std::vector<DataBlock> data_;
  bool sealed_ = false;
};

// Immutable data-flow DAG. Edges always go from a lower to a higher TaskId.
class TaskGraph {
 public:
  TaskGraph() = default;

  std::size_t task_count() const { return tasks_.size(); }
  std::size_t data_count() const { return data_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  const Task& task(TaskId id) const;
  const DataBlock& data(DataId id) const;
  std::span<const Task> tasks() const { return tasks_; }
  std::span<const DataBlock> data() const { return data_; }

  // Ascending TaskId order.
  std::span<const TaskId> successors(TaskId id) const;
  std::span<const TaskId> predecessors(TaskId id) const;
  std::size_t in_degree(TaskId id) const { return predecessors(id).size(); }

  std::vector<TaskId> sources() const;
  double total_flops() const;

  // Kahn order; throws GraphError if a cycle exists (never for sealed graphs).
  std::vector<TaskId> topological_order() const;

 private:
  friend class GraphBuilder;
  void check(TaskId id) const;

  std::vector<Task> tasks_;
  std::vector<DataBlock> data_;
  std::vector<std::vector<TaskId>> succ_;
  std::vector<std::vector<TaskId>> pred_;
  std::size_t edge_count_ = 0;
};

// Nodes labelled "kind#id"; byte-identical output for identical graphs.
std::string export_dot(const TaskGraph& graph);

// Debug dump: {"data":[{"id","size"}], "tasks":[{"id","kind","flops","accesses":[{"data","mode"}],"successors"}]}.
std::string export_json(const TaskGraph& graph);

std::string_view to_string(AccessMode m);

}  // namespace hetsched
