#include <doctest.h>

#include <map>
#include <random>

#include "hetsched/work_stealing.hpp"
#include "support.hpp"

using namespace hetsched;
using hetsched::testing::Batch;
using hetsched::testing::free_platform;

TEST_CASE("queue pops the head and steals the tail") {
  WorkerQueue q;
  CHECK_FALSE(q.pop());
  CHECK_FALSE(q.steal());
  for (std::uint32_t i = 0; i < 3; ++i) q.push({TaskId{i}, 1.0});
  CHECK(q.pop()->task == TaskId{0});
  CHECK(q.steal()->task == TaskId{2});
  CHECK(q.size() == 1);
}

TEST_CASE("ready tasks go to the finisher") {
  Batch b(free_platform(2, 2), {{1.0, 2.0}, {3.0, 4.0}});
  Assignment a = ws_activate(b.batch, b.ctx());
  for (const Placement& p : a.placements) CHECK(p.worker == WorkerId{0});
  b.batch.finisher = WorkerId{3};
  a = ws_activate(b.batch, b.ctx());
  for (const Placement& p : a.placements) CHECK(p.worker == WorkerId{3});
  CHECK(a.placements[1].exec == 4.0);
}

TEST_CASE("victims are uniform over the other workers") {
  std::mt19937_64 rng(1);
  std::map<std::uint32_t, int> hits;
  for (int i = 0; i < 40000; ++i) {
    WorkerId v = pick_victim(WorkerId{2}, 5, rng);
    CHECK(v != WorkerId{2});
    ++hits[v.index];
  }
  CHECK(hits.size() == 4);
  for (auto [w, n] : hits) CHECK(n == doctest::Approx(10000).epsilon(0.05));
}

TEST_CASE("fixed seed gives the same victims") {
  std::mt19937_64 a(77), b(77);
  for (int i = 0; i < 100; ++i) CHECK(pick_victim(WorkerId{0}, 9, a) == pick_victim(WorkerId{0}, 9, b));
}

TEST_CASE("stealing from an empty queue fails gracefully") {
  WorkerQueue empty;
  CHECK_FALSE(ws_steal(empty));
}
