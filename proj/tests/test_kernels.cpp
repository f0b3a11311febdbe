#include <doctest.h>

#include <set>

#include "hetsched/kernels.hpp"

using namespace hetsched;

namespace {

std::size_t choose2(std::size_t n) { return n * (n - 1) / 2; }
std::size_t choose3(std::size_t n) { return n < 3 ? 0 : n * (n - 1) * (n - 2) / 6; }

std::size_t cholesky_count(std::size_t nt) { return nt + 2 * choose2(nt) + choose3(nt); }

std::size_t lu_count(std::size_t nt) {
  std::size_t total = 0;
  for (std::size_t k = 0; k < nt; ++k) {
    std::size_t r = nt - 1 - k;
    total += 1 + 2 * r + r * r;
  }
  return total;
}

std::set<std::pair<std::uint32_t, std::uint32_t>> edge_set(const TaskGraph& g) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> out;
  for (const Task& t : g.tasks()) {
    for (TaskId s : g.successors(t.id)) out.emplace(t.id.index, s.index);
  }
  return out;
}

}  // namespace

TEST_CASE("task counts") {
  CHECK(gen_cholesky(4).task_count() == 20);
  CHECK(gen_lu_incpiv(4).task_count() == 30);
  CHECK(gen_lu_incpiv(2).task_count() == 5);
  for (unsigned nt = 1; nt <= 10; ++nt) {
    CHECK(gen_cholesky(nt).task_count() == cholesky_count(nt));
    CHECK(gen_lu_incpiv(nt).task_count() == lu_count(nt));
    CHECK(gen_qr(nt).task_count() == lu_count(nt));
  }
}

TEST_CASE("one tile") {
  for (KernelFamily f : {KernelFamily::Cholesky, KernelFamily::LU, KernelFamily::QR}) {
    TaskGraph g = gen_kernel(f, {1, 64, 16});
    CHECK(g.task_count() == 1);
    CHECK(g.edge_count() == 0);
    CHECK(g.data_count() == 1);
  }
  CHECK(gen_cholesky(1).task(TaskId{0}).kind == "POTRF");
}

TEST_CASE("cholesky structure") {
  TaskGraph g = gen_cholesky(2);
  // POTRF(0), TRSM(1,0), SYRK(1,1), POTRF(1)
  REQUIRE(g.task_count() == 4);
  CHECK(g.task(TaskId{1}).kind == "TRSM");
  CHECK(g.predecessors(TaskId{1}).size() == 1);
  CHECK(g.predecessors(TaskId{1})[0] == TaskId{0});
  CHECK(g.task(TaskId{3}).kind == "POTRF");
  CHECK(g.predecessors(TaskId{3})[0] == TaskId{2});
  CHECK(g.data_count() == 3);
  CHECK(g.data(DataId{0}).size_bytes == 512u * 512u * 8u);
}

TEST_CASE("auxiliary blocks add data, not tasks") {
  TaskGraph plain = gen_qr(4), aux = gen_qr(4, 512, 128, true);
  CHECK(plain.task_count() == aux.task_count());
  CHECK(aux.data_count() > plain.data_count());
  CHECK(gen_lu_incpiv(4, 512, 128, true).data_count() > gen_lu_incpiv(4).data_count());
  // ib x b doubles
  CHECK(aux.data(DataId{static_cast<std::uint32_t>(plain.data_count())}).size_bytes == 128u * 512u * 8u);
}

TEST_CASE("total flops grow with the cube of the order") {
  double f4 = gen_cholesky(4).total_flops(), f8 = gen_cholesky(8).total_flops();
  CHECK(f8 / f4 == doctest::Approx(8.0).epsilon(0.3));
}

TEST_CASE("invalid shapes") {
  CHECK_THROWS(gen_cholesky(0));
  CHECK_THROWS(gen_qr(4, 64, 128));
  CHECK_THROWS(gen_lu_incpiv(4, 64, 0));
}

TEST_CASE("names round trip") {
  for (KernelKind k : kAllKernelKinds) CHECK(parse_kind(to_string(k)) == k);
  for (KernelFamily f : {KernelFamily::Cholesky, KernelFamily::LU, KernelFamily::QR}) CHECK(parse_family(to_string(f)) == f);
  CHECK_THROWS(parse_family("svd"));
  CHECK_THROWS(parse_kind("GEQRF"));
}

TEST_CASE("default timings cover every kind") {
  TimingTable t = default_timing_table(512, 128);
  CHECK(t.size() == 2 * std::size(kAllKernelKinds));
  for (KernelKind k : kAllKernelKinds) {
    double cpu = t.at({std::string(to_string(k)), ResourceClass::CPU});
    double gpu = t.at({std::string(to_string(k)), ResourceClass::GPU});
    CHECK(cpu > 0.0);
    CHECK(gpu > 0.0);
  }
  auto s = [&](KernelKind k) {
    return t.at({std::string(to_string(k)), ResourceClass::CPU}) / t.at({std::string(to_string(k)), ResourceClass::GPU});
  };
  for (KernelKind k : {KernelKind::GEMM, KernelKind::SYRK, KernelKind::SSSSM, KernelKind::TSMQR}) {
    CHECK(s(k) >= 5.0);
    CHECK(s(k) <= 10.0);
  }
  for (KernelKind k : {KernelKind::POTRF, KernelKind::GETRF_INC, KernelKind::GEQRT, KernelKind::TSQRT}) CHECK(s(k) <= 1.0);
  // Panel kernels pay the inner-block overhead.
  CHECK(default_timings(KernelKind::GEQRT, ResourceClass::CPU, 512, 256) >
        default_timings(KernelKind::GEQRT, ResourceClass::CPU, 512, 128));
  CHECK(default_timings(KernelKind::GEMM, ResourceClass::CPU, 512, 256) ==
        default_timings(KernelKind::GEMM, ResourceClass::CPU, 512, 128));
}

TEST_CASE("random layered graphs") {
  SUBCASE("one layer has no edges") {
    RandomInstance r = gen_random_layered({12, 12, 3});
    CHECK(r.graph.edge_count() == 0);
    CHECK(r.timings.size() == 24);
  }
  SUBCASE("width one is a chain") {
    RandomInstance r = gen_random_layered({10, 1, 3});
    CHECK(r.graph.edge_count() == 9);
    for (std::uint32_t i = 1; i < 10; ++i) {
      REQUIRE(r.graph.predecessors(TaskId{i}).size() == 1);
      CHECK(r.graph.predecessors(TaskId{i})[0] == TaskId{i - 1});
    }
  }
  SUBCASE("edges join adjacent layers only") {
    RandomLayeredParams p{40, 5, 8};
    RandomInstance r = gen_random_layered(p);
    for (auto [u, v] : edge_set(r.graph)) CHECK(v / p.width == u / p.width + 1);
    for (std::uint32_t t = p.width; t < p.n_tasks; ++t) CHECK(r.graph.in_degree(TaskId{t}) >= 1);
  }
  SUBCASE("seeded") {
    RandomInstance a = gen_random_layered({30, 4, 7}), b = gen_random_layered({30, 4, 7});
    CHECK(edge_set(a.graph) == edge_set(b.graph));
    CHECK(a.timings == b.timings);
    RandomInstance c = gen_random_layered({30, 4, 8});
    CHECK(a.timings != c.timings);
  }
  CHECK_THROWS(gen_random_layered({0, 1, 0}));
  CHECK_THROWS(gen_random_layered({4, 0, 0}));
}
