#include <benchmark/benchmark.h>

#include "omnipd/analysis.hpp"
#include "omnipd/fixtures.hpp"
#include "omnipd/flow.hpp"
#include "omnipd/sideplan.hpp"

using namespace omnipd;

namespace {

const CellLibrary& bench_library() {
  static CellLibrary lib = characterize_library(SurrogateCoefficients{},
                                                load_skeleton(read_file(OMNIPD_DATA_DIR
                                                                        "/skeleton.txt")));
  return lib;
}

Netlist bench_netlist(int cells) {
  Netlist nl = parse_netlist(make_crypto_round(cells / 14, 10, 7), bench_library(),
                             Arch::Omni3D, PinAccess::DO);
  auto clusters = cluster_cells(nl);
  assign_flavors(nl, clusters);
  return nl;
}

}  // namespace

static void BM_ParseNetlist(benchmark::State& state) {
  std::string text = make_crypto_round(static_cast<int>(state.range(0)) / 14, 10, 7);
  for (auto _ : state) {
    Netlist nl = parse_netlist(text, bench_library(), Arch::Omni3D, PinAccess::DO);
    benchmark::DoNotOptimize(nl.cells().size());
  }
}
BENCHMARK(BM_ParseNetlist)->Arg(1000)->Arg(4000);

static void BM_ClusterCells(benchmark::State& state) {
  Netlist nl = bench_netlist(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto clusters = cluster_cells(nl);
    benchmark::DoNotOptimize(clusters.size());
  }
}
BENCHMARK(BM_ClusterCells)->Arg(1000)->Arg(4000);

static void BM_DtcoSweep(benchmark::State& state) {
  SurrogateCoefficients c;
  for (auto _ : state) {
    auto pts = sweep(Arch::Omni3D, c);
    benchmark::DoNotOptimize(pts.size());
  }
}
BENCHMARK(BM_DtcoSweep);

static void BM_Place(benchmark::State& state) {
  Netlist nl = bench_netlist(static_cast<int>(state.range(0)));
  auto clusters = cluster_cells(nl);
  Floorplan fp = build_floorplan(nl, bench_library(), 0.85);
  for (auto _ : state) {
    Placement pl = place(nl, fp, to_cluster_refs(clusters), 1);
    benchmark::DoNotOptimize(pl.cells.size());
  }
}
BENCHMARK(BM_Place)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_GlobalRoute(benchmark::State& state) {
  Netlist nl = bench_netlist(static_cast<int>(state.range(0)));
  auto clusters = cluster_cells(nl);
  Floorplan fp = build_floorplan(nl, bench_library(), 0.85);
  Placement pl = place(nl, fp, to_cluster_refs(clusters), 1);
  LayerStack stack = LayerStack::shipped_default();
  for (auto _ : state) {
    RoutingState rs = global_route(nl, pl, stack, 1);
    benchmark::DoNotOptimize(rs.overflow_total());
  }
}
BENCHMARK(BM_GlobalRoute)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_Sta(benchmark::State& state) {
  Netlist nl = bench_netlist(static_cast<int>(state.range(0)));
  auto clusters = cluster_cells(nl);
  Floorplan fp = build_floorplan(nl, bench_library(), 0.85);
  Placement pl = place(nl, fp, to_cluster_refs(clusters), 1);
  ClockTree tree = cts(nl, pl, bench_library(), 1);
  RoutingState rs(fp, LayerStack::shipped_default(), PdnStyle::Split, {});
  route_clock(nl, pl, rs, 1);
  flip_clock_buffers(nl, rs, pl, 1);
  Router router(nl, pl, rs, 1);
  router.route(derive_physical_nets(nl));
  annotate_clock_delays(tree, nl, rs, pl);
  for (auto _ : state) {
    TimingResult t = sta(nl, rs, pl, tree, 300.0, {});
    benchmark::DoNotOptimize(t.avg_slack_top_ps);
  }
}
BENCHMARK(BM_Sta)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
