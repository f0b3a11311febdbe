#include "hetsched/kernels.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace hetsched {

namespace {

struct KindInfo {
  KernelKind kind;
  std::string_view name;
  double flops_per_b3;
  double cpu_gflops;   // one core
  double gpu_speedup;
  bool ib_panel;
};

constexpr KindInfo kKinds[] = {
    {KernelKind::POTRF, "POTRF", 1.0 / 3.0, 6.0, 0.8, false},
    {KernelKind::TRSM, "TRSM", 1.0, 8.0, 6.0, false},
    {KernelKind::SYRK, "SYRK", 1.0, 8.0, 8.0, false},
    {KernelKind::GEMM, "GEMM", 2.0, 9.0, 10.0, false},
    {KernelKind::GETRF_INC, "GETRF_INC", 2.0 / 3.0, 4.0, 0.5, true},
    {KernelKind::GESSM, "GESSM", 1.0, 7.0, 5.0, false},
    {KernelKind::TSTRF, "TSTRF", 1.0, 4.0, 0.6, true},
    {KernelKind::SSSSM, "SSSSM", 2.0, 8.0, 8.0, false},
    {KernelKind::GEQRT, "GEQRT", 4.0 / 3.0, 5.0, 0.7, true},
    {KernelKind::UNMQR, "UNMQR", 2.0, 7.0, 5.0, false},
    {KernelKind::TSQRT, "TSQRT", 2.0, 5.0, 0.8, true},
    {KernelKind::TSMQR, "TSMQR", 4.0, 8.0, 8.0, false},
};

const KindInfo& info(KernelKind k) {
  for (const KindInfo& i : kKinds) {
    if (i.kind == k) return i;
  }
  throw std::invalid_argument("unknown kernel kind");
}

std::string name_of(KernelKind k) { return std::string(to_string(k)); }

// Lower-triangular (Cholesky) or full square tile index.
class TileIndex {
 public:
  TileIndex(GraphBuilder& builder, unsigned nt, std::uint64_t bytes, bool lower)
      : nt_(nt), lower_(lower), ids_(std::size_t{nt} * nt, DataId{~0u}) {
    for (unsigned i = 0; i < nt; ++i) {
      for (unsigned j = 0; j < nt; ++j) {
        if (!lower || j <= i) ids_[i * nt + j] = builder.add_data(bytes);
      }
    }
  }
  DataId operator()(unsigned i, unsigned j) const {
    if (i >= nt_ || j >= nt_ || (lower_ && j > i)) throw std::out_of_range("tile outside the matrix");
    return ids_[i * nt_ + j];
  }

 private:
  unsigned nt_;
  bool lower_;
  std::vector<DataId> ids_;
};

void check_tiles(unsigned nt, unsigned b) {
  if (nt < 1) throw std::invalid_argument("nt must be at least 1");
  if (b < 1) throw std::invalid_argument("tile order must be at least 1");
}

void check_ib(unsigned b, unsigned ib) {
  if (ib < 1 || ib > b) throw std::invalid_argument("inner block must satisfy 1 <= ib <= b");
}

}  // namespace

KernelFamily parse_family(std::string_view name) {
  if (name == "cholesky" || name == "potrf" || name == "dpotrf") return KernelFamily::Cholesky;
  if (name == "lu" || name == "getrf" || name == "dgetrf") return KernelFamily::LU;
  if (name == "qr" || name == "geqrf" || name == "dgeqrf") return KernelFamily::QR;
  throw std::invalid_argument("unknown kernel family '" + std::string(name) + "'");
}

std::string_view to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::Cholesky: return "cholesky";
    case KernelFamily::LU: return "lu";
    case KernelFamily::QR: return "qr";
  }
  return "?";
}

std::string_view to_string(KernelKind k) { return info(k).name; }

KernelKind parse_kind(std::string_view name) {
  for (const KindInfo& i : kKinds) {
    if (i.name == name) return i.kind;
  }
  throw std::invalid_argument("unknown kernel kind '" + std::string(name) + "'");
}

double kernel_flops(KernelKind k, unsigned b) {
  const double b3 = static_cast<double>(b) * b * b;
  return info(k).flops_per_b3 * b3;
}

TaskGraph gen_cholesky(unsigned nt, unsigned b) {
  check_tiles(nt, b);
  GraphBuilder g;
  TileMatrix shape{nt, b, 1};
  TileIndex A(g, nt, shape.tile_bytes(), true);
  using M = AccessMode;
  auto task = [&](KernelKind k, std::vector<Access> acc) { g.add_task(name_of(k), std::move(acc), kernel_flops(k, b)); };

  for (unsigned k = 0; k < nt; ++k) {
    task(KernelKind::POTRF, {{A(k, k), M::ReadWrite}});
    for (unsigned i = k + 1; i < nt; ++i) task(KernelKind::TRSM, {{A(k, k), M::Read}, {A(i, k), M::ReadWrite}});
    for (unsigned i = k + 1; i < nt; ++i) {
      task(KernelKind::SYRK, {{A(i, k), M::Read}, {A(i, i), M::ReadWrite}});
      for (unsigned j = k + 1; j < i; ++j) {
        task(KernelKind::GEMM, {{A(i, k), M::Read}, {A(j, k), M::Read}, {A(i, j), M::ReadWrite}});
      }
    }
  }
  return std::move(g).seal();
}

TaskGraph gen_lu_incpiv(unsigned nt, unsigned b, unsigned ib, bool materialize_aux) {
  check_tiles(nt, b);
  check_ib(b, ib);
  GraphBuilder g;
  TileMatrix shape{nt, b, ib};
  TileIndex A(g, nt, shape.tile_bytes(), false);
  std::vector<DataId> L;
  if (materialize_aux) {
    for (unsigned t = 0; t < nt * nt; ++t) L.push_back(g.add_data(std::uint64_t{ib} * b * TileMatrix::element_size));
  }
  using M = AccessMode;
  auto task = [&](KernelKind k, std::vector<Access> acc) { g.add_task(name_of(k), std::move(acc), kernel_flops(k, b)); };

  for (unsigned k = 0; k < nt; ++k) {
    task(KernelKind::GETRF_INC, {{A(k, k), M::ReadWrite}});
    for (unsigned j = k + 1; j < nt; ++j) task(KernelKind::GESSM, {{A(k, k), M::Read}, {A(k, j), M::ReadWrite}});
    for (unsigned i = k + 1; i < nt; ++i) {
      std::vector<Access> panel{{A(k, k), M::ReadWrite}, {A(i, k), M::ReadWrite}};
      if (materialize_aux) panel.push_back({L[i * nt + k], M::Write});
      task(KernelKind::TSTRF, std::move(panel));
      for (unsigned j = k + 1; j < nt; ++j) {
        std::vector<Access> upd{{A(k, j), M::ReadWrite}, {A(i, j), M::ReadWrite}, {A(i, k), M::Read}};
        if (materialize_aux) upd.push_back({L[i * nt + k], M::Read});
        task(KernelKind::SSSSM, std::move(upd));
      }
    }
  }
  return std::move(g).seal();
}

TaskGraph gen_qr(unsigned nt, unsigned b, unsigned ib, bool materialize_aux) {
  check_tiles(nt, b);
  check_ib(b, ib);
  GraphBuilder g;
  TileMatrix shape{nt, b, ib};
  TileIndex A(g, nt, shape.tile_bytes(), false);
  std::vector<DataId> T;
  if (materialize_aux) {
    for (unsigned t = 0; t < nt * nt; ++t) T.push_back(g.add_data(std::uint64_t{ib} * b * TileMatrix::element_size));
  }
  using M = AccessMode;
  auto task = [&](KernelKind k, std::vector<Access> acc) { g.add_task(name_of(k), std::move(acc), kernel_flops(k, b)); };

  for (unsigned k = 0; k < nt; ++k) {
    std::vector<Access> geqrt{{A(k, k), M::ReadWrite}};
    if (materialize_aux) geqrt.push_back({T[k * nt + k], M::Write});
    task(KernelKind::GEQRT, std::move(geqrt));
    for (unsigned j = k + 1; j < nt; ++j) {
      std::vector<Access> unmqr{{A(k, k), M::Read}, {A(k, j), M::ReadWrite}};
      if (materialize_aux) unmqr.push_back({T[k * nt + k], M::Read});
      task(KernelKind::UNMQR, std::move(unmqr));
    }
    for (unsigned i = k + 1; i < nt; ++i) {
      std::vector<Access> tsqrt{{A(k, k), M::ReadWrite}, {A(i, k), M::ReadWrite}};
      if (materialize_aux) tsqrt.push_back({T[i * nt + k], M::Write});
      task(KernelKind::TSQRT, std::move(tsqrt));
      for (unsigned j = k + 1; j < nt; ++j) {
        std::vector<Access> tsmqr{{A(k, j), M::ReadWrite}, {A(i, j), M::ReadWrite}, {A(i, k), M::Read}};
        if (materialize_aux) tsmqr.push_back({T[i * nt + k], M::Read});
        task(KernelKind::TSMQR, std::move(tsmqr));
      }
    }
  }
  return std::move(g).seal();
}

TaskGraph gen_kernel(KernelFamily family, const TileMatrix& m, bool materialize_aux) {
  switch (family) {
    case KernelFamily::Cholesky: return gen_cholesky(m.nt, m.b);
    case KernelFamily::LU: return gen_lu_incpiv(m.nt, m.b, m.ib, materialize_aux);
    case KernelFamily::QR: return gen_qr(m.nt, m.b, m.ib, materialize_aux);
  }
  throw std::invalid_argument("unknown kernel family");
}

double default_timings(KernelKind kind, ResourceClass cls, unsigned b, unsigned ib) {
  check_tiles(1, b);
  check_ib(b, ib);
  const KindInfo& i = info(kind);
  double cpu = kernel_flops(kind, b) / (i.cpu_gflops * 1e9);
  if (i.ib_panel) cpu *= 1.0 + static_cast<double>(ib) / b;
  return cls == ResourceClass::CPU ? cpu : cpu / i.gpu_speedup;
}

TimingTable default_timing_table(unsigned b, unsigned ib) {
  TimingTable t;
  for (KernelKind k : kAllKernelKinds) {
    for (ResourceClass c : {ResourceClass::CPU, ResourceClass::GPU}) {
      t[TimingKey{name_of(k), c}] = default_timings(k, c, b, ib);
    }
  }
  return t;
}

RandomInstance gen_random_layered(const RandomLayeredParams& p) {
  if (p.n_tasks < 1) throw std::invalid_argument("n_tasks must be at least 1");
  if (p.width < 1) throw std::invalid_argument("width must be at least 1");
  if (p.max_inputs < 1) throw std::invalid_argument("max_inputs must be at least 1");

  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> cpu(p.p_cpu.first, p.p_cpu.second);
  std::uniform_real_distribution<double> gpu(p.p_gpu.first, p.p_gpu.second);
  std::uniform_int_distribution<std::uint64_t> bytes(p.data_bytes.first, p.data_bytes.second);

  GraphBuilder g;
  RandomInstance out;
  std::vector<DataId> previous, current;
  for (unsigned t = 0; t < p.n_tasks; ++t) {
    if (t % p.width == 0) {
      previous = std::move(current);
      current.clear();
    }
    DataId out_block = g.add_data(std::max<std::uint64_t>(8, bytes(rng) & ~std::uint64_t{7}));
    std::vector<Access> acc;
    if (!previous.empty()) {
      std::vector<DataId> pool = previous;
      std::shuffle(pool.begin(), pool.end(), rng);
      std::uniform_int_distribution<unsigned> count(1, std::min<unsigned>(p.max_inputs, static_cast<unsigned>(pool.size())));
      unsigned r = count(rng);
      std::sort(pool.begin(), pool.begin() + r);
      for (unsigned i = 0; i < r; ++i) acc.push_back({pool[i], AccessMode::Read});
    }
    acc.push_back({out_block, AccessMode::Write});
    current.push_back(out_block);

    std::string kind = "rnd" + std::to_string(t);
    double c = cpu(rng), gt = gpu(rng);
    out.timings[TimingKey{kind, ResourceClass::CPU}] = c;
    out.timings[TimingKey{kind, ResourceClass::GPU}] = gt;
    g.add_task(std::move(kind), std::move(acc), 0.0);
  }
  out.graph = std::move(g).seal();
  return out;
}

}  // namespace hetsched
