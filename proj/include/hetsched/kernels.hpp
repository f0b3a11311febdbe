#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include "hetsched/graph.hpp"
#include "hetsched/perfmodel.hpp"

namespace hetsched {

enum class KernelFamily { Cholesky, LU, QR };

KernelFamily parse_family(std::string_view name);
std::string_view to_string(KernelFamily f);

enum class KernelKind {
  POTRF, TRSM, SYRK, GEMM,            // Cholesky
  GETRF_INC, GESSM, TSTRF, SSSSM,     // LU, incremental pivoting
  GEQRT, UNMQR, TSQRT, TSMQR,         // QR
};

inline constexpr KernelKind kAllKernelKinds[] = {
    KernelKind::POTRF,     KernelKind::TRSM,  KernelKind::SYRK,  KernelKind::GEMM,
    KernelKind::GETRF_INC, KernelKind::GESSM, KernelKind::TSTRF, KernelKind::SSSSM,
    KernelKind::GEQRT,     KernelKind::UNMQR, KernelKind::TSQRT, KernelKind::TSMQR,
};

std::string_view to_string(KernelKind k);
KernelKind parse_kind(std::string_view name);

struct TileMatrix {
  unsigned nt = 1;      // tiles per dimension
  unsigned b = 512;     // tile order
  unsigned ib = 128;    // inner block
  static constexpr unsigned element_size = 8;
  std::uint64_t tile_bytes() const { return std::uint64_t{b} * b * element_size; }
};

// Per-task flop count of one tile kernel of order b.
double kernel_flops(KernelKind k, unsigned b);

// Right-looking tile Cholesky over the lower triangle.
TaskGraph gen_cholesky(unsigned nt, unsigned b = 512);

// Tile LU with incremental pivoting. With materialize_aux the ib x b L factors
// of TSTRF become their own blocks, read by the matching SSSSM.
TaskGraph gen_lu_incpiv(unsigned nt, unsigned b = 512, unsigned ib = 128, bool materialize_aux = false);

// Tile QR (flat tree). With materialize_aux the ib x b T factors are their own
// blocks instead of travelling with their V tiles.
TaskGraph gen_qr(unsigned nt, unsigned b = 512, unsigned ib = 128, bool materialize_aux = false);

TaskGraph gen_kernel(KernelFamily family, const TileMatrix& m, bool materialize_aux = false);

// Synthetic default durations in seconds. Throughput-bound kernels get a GPU
// speedup between 5 and 10, panel kernels at or below 1; panel kernels also
// pay an ib / b overhead.
double default_timings(KernelKind kind, ResourceClass cls, unsigned b, unsigned ib);
TimingTable default_timing_table(unsigned b, unsigned ib);

struct RandomLayeredParams {
  unsigned n_tasks = 16;
  unsigned width = 4;
  std::uint64_t seed = 0;
  std::pair<double, double> p_cpu{1e-3, 1e-2};
  std::pair<double, double> p_gpu{1e-4, 1e-2};
  std::pair<std::uint64_t, std::uint64_t> data_bytes{1u << 16, 1u << 22};
  unsigned max_inputs = 3;  // reads per task from the previous layer
};

struct RandomInstance {
  TaskGraph graph;
  TimingTable timings;  // one kind per task
};

// Layers of `width` tasks; every task writes one fresh block and reads
// 1..max_inputs blocks of the previous layer, so edges only join adjacent layers.
RandomInstance gen_random_layered(const RandomLayeredParams& params);

}  // namespace hetsched
