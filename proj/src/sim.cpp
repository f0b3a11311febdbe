#include "hetsched/sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>
#include <unordered_map>

#include "hetsched/work_stealing.hpp"

namespace hetsched {

std::string_view to_string(TraceKind k) {
  switch (k) {
    case TraceKind::Push: return "push";
    case TraceKind::Dispatch: return "dispatch";
    case TraceKind::Start: return "start";
    case TraceKind::End: return "end";
    case TraceKind::TransferStart: return "transfer_start";
    case TraceKind::TransferEnd: return "transfer_end";
    case TraceKind::Steal: return "steal";
    case TraceKind::StealFail: return "steal_fail";
  }
  return "?";
}

void write_trace(std::ostream& os, const std::vector<TraceRecord>& trace) {
  os << "time,kind,worker,task,data,bytes\n";
  char buf[64];
  for (const TraceRecord& r : trace) {
    auto res = std::to_chars(buf, buf + sizeof buf, r.time);
    os.write(buf, res.ptr - buf);
    os << ',' << to_string(r.kind) << ',' << r.worker << ',' << r.task << ',' << r.data << ',' << r.bytes << '\n';
  }
}

double flops_of(KernelFamily family, double n) {
  if (!(n > 0.0)) throw std::invalid_argument("matrix order must be positive");
  const double n3 = n * n * n;
  switch (family) {
    case KernelFamily::Cholesky: return n3 / 3.0;
    case KernelFamily::LU: return 2.0 * n3 / 3.0;
    case KernelFamily::QR: return 4.0 * n3 / 3.0;
  }
  throw std::invalid_argument("unknown kernel family");
}

namespace {

enum class EventKind { TaskEnd, TransferEnd, WorkerIdle };

struct Event {
  double time;
  std::uint64_t seq;
  EventKind kind;
  std::uint32_t worker;
  std::uint32_t task;      // TaskEnd
  std::size_t transfer;    // TransferEnd
};

struct EventOrder {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

enum class WorkerState { Idle, Fetching, Running, Stealing };

struct WorkerSlot {
  WorkerState state = WorkerState::Idle;
  WorkerQueue queue;
  double queued_cost = 0.0;
  std::uint32_t task = 0;
  std::uint32_t pending_inputs = 0;
  double exec_started = 0.0;
};

struct InFlight {
  DataId data;
  MemoryNodeId node;
  std::uint64_t bytes;
  TransferDirection direction;
  std::vector<std::uint32_t> waiters;  // workers
};

class Simulation {
 public:
  Simulation(const TaskGraph& g, const Platform& p, Scheduler& s, PerfModel model, const SimOptions& o)
      : graph_(g),
        platform_(p),
        scheduler_(s),
        model_(std::move(model)),
        truth_(model_.fallback()),
        options_(o),
        noise_(o.seed, o.noise),
        rng_(o.seed),
        stamps_(p.worker_count()),
        residency_(g.data_count(), p.memory_node_count()),
        engine_(p),
        workers_(p.worker_count()),
        remaining_(g.task_count()),
        done_(g.task_count(), false) {
    report_.busy.assign(p.worker_count(), 0.0);
    report_.tasks.resize(g.task_count());
    for (const Task& t : g.tasks()) remaining_[t.id.index] = g.in_degree(t.id);
  }

  SimReport execute() {
    if (graph_.task_count() > 0) {
      activate(graph_.sources(), std::nullopt);
      start_idle_workers();
    }
    while (!events_.empty()) {
      Event e = events_.top();
      events_.pop();
      if (e.time < clock_) throw SimError("event scheduled in the past");
      clock_ = e.time;
      switch (e.kind) {
        case EventKind::TaskEnd: on_task_end(e.worker, e.task); break;
        case EventKind::TransferEnd: on_transfer_end(e.transfer); break;
        case EventKind::WorkerIdle: on_steal_attempt(e.worker); break;
      }
    }
    if (completed_ != graph_.task_count()) deadlock();

    report_.flops = options_.nominal_flops.value_or(graph_.total_flops());
    report_.gflops = report_.makespan > 0.0 ? report_.flops / report_.makespan / 1e9 : 0.0;
    report_.bytes_total = report_.bytes_h2d + report_.bytes_d2h + report_.bytes_d2d;
    report_.final_model = std::move(model_);
    return std::move(report_);
  }

 private:
  void schedule(double time, EventKind kind, std::uint32_t worker, std::uint32_t task = 0,
                std::size_t transfer = 0) {
    events_.push(Event{time, seq_++, kind, worker, task, transfer});
  }

  void trace(TraceKind kind, std::int64_t worker, std::int64_t task = -1, std::int64_t data = -1,
             std::uint64_t bytes = 0) {
    trace_at(clock_, kind, worker, task, data, bytes);
  }
  void trace_at(double time, TraceKind kind, std::int64_t worker, std::int64_t task, std::int64_t data,
                std::uint64_t bytes) {
    if (options_.record_trace) report_.trace.push_back({time, kind, worker, task, data, bytes});
  }

  void activate(std::vector<TaskId> ready, std::optional<WorkerId> finisher) {
    if (ready.empty()) return;
    stamps_.sync(clock_);
    ActivationBatch batch{std::move(ready), clock_, finisher};
    PlanningContext ctx{graph_, platform_, model_, stamps_, residency_};
    Assignment a = scheduler_.activate(batch, ctx);
    if (a.placements.size() != batch.ready.size()) {
      throw SimError(scheduler_.name() + " placed " + std::to_string(a.placements.size()) + " of " +
                     std::to_string(batch.ready.size()) + " ready tasks");
    }
    for (const Placement& p : a.placements) {
      WorkerSlot& w = workers_.at(p.worker.index);
      w.queue.push({p.task, p.cost()});
      w.queued_cost += p.cost();
      stamps_.push(p.worker, clock_, p.cost());
      trace(TraceKind::Push, p.worker.index, p.task.index);
    }
  }

  bool steal_enabled() const { return scheduler_.steals() && workers_.size() > 1; }

  void start_idle_workers() {
    for (std::uint32_t w = 0; w < workers_.size(); ++w) {
      if (workers_[w].state != WorkerState::Idle) continue;
      if (!workers_[w].queue.empty()) {
        pop_and_dispatch(w);
      } else if (steal_enabled() && any_queue_nonempty()) {
        workers_[w].state = WorkerState::Stealing;
        schedule(clock_ + options_.steal_latency, EventKind::WorkerIdle, w);
      }
    }
  }

  bool any_queue_nonempty() const {
    return std::any_of(workers_.begin(), workers_.end(), [](const WorkerSlot& s) { return !s.queue.empty(); });
  }

  void pop_and_dispatch(std::uint32_t w) {
    WorkerSlot& slot = workers_[w];
    auto e = slot.queue.pop();
    slot.queued_cost = slot.queue.empty() ? 0.0 : slot.queued_cost - e->cost;
    dispatch(w, e->task);
  }

  void dispatch(std::uint32_t w, TaskId id) {
    WorkerSlot& slot = workers_[w];
    const Worker& worker = platform_.workers()[w];
    const Task& task = graph_.task(id);
    slot.task = id.index;
    slot.state = WorkerState::Fetching;
    slot.pending_inputs = 0;
    report_.tasks[id.index].worker = worker.id;
    report_.tasks[id.index].dispatch = clock_;
    trace(TraceKind::Dispatch, w, id.index);

    for (const Access& a : task.accesses) {
      if (!reads(a.mode) || residency_.valid_on(a.data, worker.memory)) continue;
      std::uint64_t key = std::uint64_t{a.data.index} * platform_.memory_node_count() + worker.memory.index;
      auto it = in_flight_index_.find(key);
      if (it == in_flight_index_.end()) {
        auto src = residency_.preferred_source(a.data);
        if (!src) throw SimError("data " + std::to_string(a.data.index) + " has no valid copy");
        std::uint64_t bytes = graph_.data(a.data).size_bytes;
        TransferBooking b = engine_.book(bytes, *src, worker.memory, clock_);
        std::size_t idx = transfers_.size();
        transfers_.push_back({a.data, worker.memory, bytes, b.direction, {}});
        it = in_flight_index_.emplace(key, idx).first;
        ++report_.transfers;
        trace_at(b.start(), TraceKind::TransferStart, w, id.index, a.data.index, bytes);
        schedule(b.end(), EventKind::TransferEnd, w, 0, idx);
      }
      transfers_[it->second].waiters.push_back(w);
      ++slot.pending_inputs;
    }
    if (slot.pending_inputs == 0) begin_execution(w);
  }

  void begin_execution(std::uint32_t w) {
    WorkerSlot& slot = workers_[w];
    const Worker& worker = platform_.workers()[w];
    const Task& task = graph_.tasks()[slot.task];
    auto truth = truth_.find(TimingKey{task.kind, worker.cls});
    if (truth == truth_.end()) {
      throw SimError("no ground-truth timing for " + task.kind + " on " + std::string(to_string(worker.cls)));
    }
    double duration = noise_.perturb(truth->second, task.id, worker.id);
    slot.state = WorkerState::Running;
    slot.exec_started = clock_;
    report_.tasks[slot.task].start = clock_;
    trace(TraceKind::Start, w, slot.task);
    schedule(clock_ + duration, EventKind::TaskEnd, w, slot.task);
  }

  void on_transfer_end(std::size_t idx) {
    InFlight& tr = transfers_[idx];
    residency_.add(tr.data, tr.node);
    in_flight_index_.erase(std::uint64_t{tr.data.index} * platform_.memory_node_count() + tr.node.index);
    switch (tr.direction) {
      case TransferDirection::HostToDevice: report_.bytes_h2d += tr.bytes; break;
      case TransferDirection::DeviceToHost: report_.bytes_d2h += tr.bytes; break;
      case TransferDirection::DeviceToDevice: report_.bytes_d2d += tr.bytes; break;
    }
    trace(TraceKind::TransferEnd, tr.waiters.front(), -1, tr.data.index, tr.bytes);
    for (std::uint32_t w : tr.waiters) {
      if (--workers_[w].pending_inputs == 0) begin_execution(w);
    }
  }

  void on_task_end(std::uint32_t w, std::uint32_t t) {
    WorkerSlot& slot = workers_[w];
    const Worker& worker = platform_.workers()[w];
    const Task& task = graph_.tasks()[t];
    const double duration = clock_ - slot.exec_started;
    report_.busy[w] += duration;
    report_.tasks[t].end = clock_;
    report_.makespan = std::max(report_.makespan, clock_);
    ++completed_;
    done_[t] = true;
    trace(TraceKind::End, w, t);

    for (const Access& a : task.accesses) {
      if (!writes(a.mode)) continue;
      residency_.set_exclusive(a.data, worker.memory);
      if (residency_.holder_count(a.data) != 1) throw SimError("written block has several valid copies");
    }
    if (duration > 0.0) model_.record_sample(task.kind, worker.cls, duration);
    stamps_.resync(worker.id, clock_, slot.queued_cost);
    slot.state = WorkerState::Idle;

    std::vector<TaskId> ready;
    for (TaskId s : graph_.successors(task.id)) {
      if (remaining_[s.index] == 0) throw SimError("predecessor count underflow");
      if (--remaining_[s.index] == 0) ready.push_back(s);
    }
    bool pushed = !ready.empty();
    activate(std::move(ready), worker.id);
    if (pushed && steal_enabled()) wake_sleepers();
    start_idle_workers();
  }

  void wake_sleepers() {
    for (std::uint32_t w = 0; w < workers_.size(); ++w) {
      if (workers_[w].state == WorkerState::Idle && workers_[w].queue.empty()) {
        workers_[w].state = WorkerState::Stealing;
        schedule(clock_ + options_.steal_latency, EventKind::WorkerIdle, w);
      }
    }
  }

  void on_steal_attempt(std::uint32_t w) {
    WorkerSlot& slot = workers_[w];
    if (slot.state != WorkerState::Stealing) return;
    slot.state = WorkerState::Idle;
    if (!slot.queue.empty()) {
      pop_and_dispatch(w);
      return;
    }
    WorkerId victim = pick_victim(WorkerId{w}, workers_.size(), rng_);
    WorkerSlot& v = workers_[victim.index];
    if (auto e = ws_steal(v.queue)) {
      v.queued_cost = v.queue.empty() ? 0.0 : v.queued_cost - e->cost;
      ++report_.steals_ok;
      trace(TraceKind::Steal, w, e->task.index, victim.index);
      dispatch(w, e->task);
      return;
    }
    ++report_.steals_failed;
    trace(TraceKind::StealFail, w, -1, victim.index);
    if (any_queue_nonempty()) {
      slot.state = WorkerState::Stealing;
      schedule(clock_ + options_.steal_latency, EventKind::WorkerIdle, w);
    }
  }

  [[noreturn]] void deadlock() const {
    std::ostringstream os;
    os << "simulation deadlocked with " << (graph_.task_count() - completed_) << " tasks left:";
    int listed = 0;
    for (const Task& t : graph_.tasks()) {
      if (!done_[t.id.index] && listed++ < 16) os << ' ' << t.kind << '#' << t.id.index;
    }
    throw SimError(os.str());
  }

  const TaskGraph& graph_;
  const Platform& platform_;
  Scheduler& scheduler_;
  PerfModel model_;
  TimingTable truth_;
  SimOptions options_;
  NoiseModel noise_;
  std::mt19937_64 rng_;
  LoadTimestamps stamps_;
  ResidencyMap residency_;
  TransferEngine engine_;
  std::vector<WorkerSlot> workers_;
  std::vector<std::size_t> remaining_;
  std::vector<bool> done_;
  std::vector<InFlight> transfers_;
  std::unordered_map<std::uint64_t, std::size_t> in_flight_index_;
  std::priority_queue<Event, std::vector<Event>, EventOrder> events_;
  std::uint64_t seq_ = 0;
  double clock_ = 0.0;
  std::size_t completed_ = 0;
  SimReport report_;
};

}  // namespace

SimReport run(const TaskGraph& graph, const Platform& platform, Scheduler& scheduler, PerfModel model,
              const SimOptions& options) {
  return Simulation(graph, platform, scheduler, std::move(model), options).execute();
}

}  // namespace hetsched
