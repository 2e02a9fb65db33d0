// Acceptance suite: one self-contained check per shipped guarantee, one
// pass/fail line each. Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <vector>

#include "omnipd/analysis.hpp"
#include "omnipd/fixtures.hpp"
#include "omnipd/flow.hpp"
#include "omnipd/sideplan.hpp"
#include "test_support.hpp"

using namespace omnipd;
using namespace omnipd::test;

namespace {

struct Criterion {
  int id;
  std::string name;
  std::function<void(std::string&)> run;  // appends failure details
};

SurrogateCoefficients coeffs() {
  return SurrogateCoefficients::from_config(
      KeyValueConfig::from_file(data_path("coefficients.txt")));
}

void expect(bool ok, const std::string& what, std::string& fail) {
  if (!ok) fail += (fail.empty() ? "" : "; ") + what;
}

void expect_near(double got, double want, double tol, const std::string& what,
                 std::string& fail) {
  if (std::abs(got - want) > tol)
    fail += (fail.empty() ? "" : "; ") + what + " got " + std::to_string(got) + " want " +
            std::to_string(want) + " +-" + std::to_string(tol);
}

// ---------- 1: design-space cardinality and feasibility ----------
void c1(std::string& fail) {
  SurrogateCoefficients c = coeffs();
  for (Arch a : {Arch::CFET, Arch::Omni3D}) {
    auto pts = enumerate_design_space(a);
    expect(pts.size() == 288, to_string(a) + " cardinality", fail);
    int dropped = 0;
    for (const DeviceParams& p : pts) {
      bool short_contact = p.cgp_nm - p.lg_nm - 2.0 * p.sp_gs_nm < 10.0;  // formula oracle
      Feasibility f = check_feasibility(p, c);
      expect((f == Feasibility::ContactTooShort) == short_contact,
             "feasibility mismatch at lg=" + std::to_string(p.lg_nm), fail);
      if (f != Feasibility::Ok) ++dropped;
    }
    expect(dropped == 72, to_string(a) + " dropped count", fail);
  }
}

// ---------- 2: min-EDP corner and calibrated ratios ----------
void c2(std::string& fail) {
  SurrogateCoefficients c = coeffs();
  DeviceMetrics omni = min_edp(sweep(Arch::Omni3D, c));
  DeviceMetrics cfet = min_edp(sweep(Arch::CFET, c));
  for (const auto& [label, m] : {std::pair{"OMNI", omni}, std::pair{"CFET", cfet}}) {
    expect(m.params.lg_nm == 14 && m.params.sp_gs_nm == 9 && m.params.n_sheets == 1 &&
               m.params.vdd == 0.45,
           std::string(label) + " corner", fail);
  }
  expect_near(cfet.edp / omni.edp, 1.30, 0.05, "EDP ratio", fail);
  expect_near(1.0 - omni.energy_fj / cfet.energy_fj, 0.102, 0.02, "energy improvement", fail);
  expect_near(1.0 - omni.delay_ps / cfet.delay_ps, 0.156, 0.02, "delay improvement", fail);
}

// ---------- 3: variant ratios ----------
void c3(std::string& fail) {
  auto rows = variant_metrics(coeffs());
  auto get = [&](const std::string& label) -> const DeviceMetrics& {
    for (const VariantRow& r : rows)
      if (r.label == label) return r.metrics;
    throw Error("missing variant row " + label);
  };
  const DeviceMetrics& sio = get("SIO");
  expect_near(get("DO").c_eff_ff / sio.c_eff_ff, 1.056, 0.005, "Ceff DO", fail);
  expect_near(get("DI").c_eff_ff / sio.c_eff_ff, 1.112, 0.005, "Ceff DI", fail);
  expect_near(get("DIDO").c_eff_ff / sio.c_eff_ff, 1.169, 0.005, "Ceff DIDO", fail);
  expect_near(get("noIM").c_eff_ff / sio.c_eff_ff, 0.956, 0.005, "Ceff noIM", fail);
  for (const char* v : {"SIO", "DO", "DI", "DIDO", "noIM"})
    expect_near(get(v).r_eff_kohm / get("CFET").r_eff_kohm, 0.95, 0.02,
                std::string("Reff ") + v, fail);
}

// ---------- 4: cell area model ----------
void c4(std::string& fail) {
  const CellLibrary lib = load_library(read_file(data_path("library.lib")));
  auto area = [&](Arch a) {
    return cell_area_nm2(lib.get("MUX2D1", a, PinAccess::SIO, Flavor::TI), lib);
  };
  expect(area(Arch::CFET) == 336.0 * 72.0, "MUX CFET footprint", fail);
  expect(area(Arch::Omni3D) == 294.0 * 54.0, "MUX Omni footprint", fail);
  expect(area(Arch::Omni3DNoIM) == 336.0 * 54.0, "MUX noIM footprint", fail);
  for (const char* n : {"INVD1", "ND2D1", "NR2D1"})
    expect(area_ratio(lib, n, Arch::Omni3D, Arch::CFET) == 0.75,
           std::string(n) + " ratio 0.75", fail);
  expect_near(area_ratio(lib, "DFFD1", Arch::Omni3D, Arch::CFET), 1.0 / 1.8, 0.03,
              "DFF area ratio", fail);
}

// ---------- 5: clustering oracle ----------
void c5(std::string& fail) {
  Rng rng(20240);
  int trials = 200;
  for (int t = 0; t < trials; ++t) {
    Netlist nl = parse_omni(make_random_netlist(12, rng()));
    auto clusters = cluster_cells(nl);

    // independent union-find oracle over co-load sets
    std::map<std::string, std::string> parent;
    std::function<std::string(const std::string&)> find = [&](const std::string& x) {
      if (parent[x] == x) return x;
      return parent[x] = find(parent[x]);
    };
    for (const CellInstance& c : nl.cells()) parent[c.id] = c.id;
    for (const LogicalNet& n : nl.nets()) {
      if (n.kind != NetKind::Signal) continue;
      std::vector<std::string> loads;
      for (const Endpoint& e : n.loads)
        if (!e.is_port()) loads.push_back(e.name);
      for (std::size_t i = 1; i < loads.size(); ++i) parent[find(loads[0])] = find(loads[i]);
    }
    std::map<std::string, std::set<std::string>> oracle;
    for (const CellInstance& c : nl.cells()) oracle[find(c.id)].insert(c.id);
    std::set<std::set<std::string>> want;
    for (auto& [root, members] : oracle) want.insert(members);
    std::set<std::set<std::string>> got;
    for (const Cluster& c : clusters) got.insert({c.members.begin(), c.members.end()});
    expect(got == want, "partition mismatch trial " + std::to_string(t), fail);

    if (!nl.cells().empty()) {
      assign_flavors(nl, clusters);
      expect(split_net_count(nl) == 0, "split after assign trial " + std::to_string(t), fail);
    }
    if (!fail.empty()) return;
  }
}

// ---------- 6: balance bound ----------
void c6(std::string& fail) {
  Rng rng(616);
  for (int t = 0; t < 1000; ++t) {
    int n = 1 + static_cast<int>(rng() % 24);
    std::vector<int> sizes;
    long long total = 0;
    int max_size = 0;
    for (int i = 0; i < n; ++i) {
      int s = 1 + static_cast<int>(rng() % 50);
      sizes.push_back(s);
      total += s;
      max_size = std::max(max_size, s);
    }
    FlavorAssignment fa = assign_flavors_sizes(sizes);
    expect(std::abs(fa.n_ti - fa.n_bi) <= max_size, "bound trial " + std::to_string(t), fail);

    // hand-simulated stopping rule
    std::vector<std::pair<int, int>> order;
    for (std::size_t i = 0; i < sizes.size(); ++i) order.emplace_back(sizes[i], int(i));
    std::sort(order.begin(), order.end(), [](auto a, auto b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    long long ti = 0, bi = 0;
    bool balancing = true, ti_turn = true;
    for (auto& [s, id] : order) {
      if (balancing) {
        (ti_turn ? ti : bi) += s;
        ti_turn = !ti_turn;
        if (2 * ti > total) balancing = false;
      } else {
        bi += s;
      }
    }
    expect(fa.n_ti == ti && fa.n_bi == bi, "stopping rule trial " + std::to_string(t), fail);
    if (!fail.empty()) return;
  }
}

// ---------- 7: routing invariants over the fixture suite ----------
void c7(std::string& fail) {
  struct Fixture {
    std::string name;
    Arch arch;
    double util;
  };
  std::vector<Fixture> fixtures = {
      {"adder16.net", Arch::Omni3D, 0.85},  {"adder16.net", Arch::CFET, 0.85},
      {"mult8.net", Arch::Omni3D, 0.85},    {"crypto.net", Arch::Omni3D, 0.85},
      {"crypto.net", Arch::Omni3DNoIM, 0.85}, {"congested.net", Arch::Omni3D, 0.93},
  };
  for (const Fixture& f : fixtures) {
    auto build = [&](std::uint64_t seed) {
      Netlist nl = parse_netlist(read_file(data_path("fixtures/" + f.name)), shared_library(),
                                 f.arch, f.arch == Arch::CFET ? PinAccess::SIO : PinAccess::DO);
      auto clusters = cluster_cells(nl);
      if (f.arch == Arch::CFET)
        for (const CellInstance& c : nl.cells()) nl.cell(c.id).flavor = Flavor::TI;
      else
        assign_flavors(nl, clusters);
      Floorplan fp = build_floorplan(nl, shared_library(), f.util);
      Placement pl = place(nl, fp, to_cluster_refs(clusters), seed);
      cts(nl, pl, shared_library(), seed);
      RoutingState rs(fp, LayerStack::from_text(read_file(data_path("stack.txt"))),
                      ArchInfo::of(f.arch).pdn, {});
      route_clock(nl, pl, rs, seed);
      if (f.arch != Arch::CFET) flip_clock_buffers(nl, rs, pl, seed);
      Router router(nl, pl, rs, seed);
      router.route(derive_physical_nets(nl));
      return std::pair<Netlist, RoutingState>(std::move(nl), std::move(rs));
    };
    auto [nl, rs] = build(7);
    const std::string tag = f.name + "/" + to_string(f.arch);

    auto wl = rs.wirelength_by_layer();
    expect(wl["M8"] == 0.0, tag + ": M8 wirelength", fail);
    double per_layer = 0.0, per_net = 0.0;
    for (auto& [name, v] : wl) per_layer += v;
    for (const auto& [key, rn] : rs.nets()) {
      per_net += rn.length_um;
      expect(rn.m8_stubs.empty(), tag + ": M8 stub on " + key, fail);
      for (const RouteSegment& s : rn.segments) {
        const LayerSpec& l = rs.stack().layer(s.layer);
        expect(!l.is_m8() && l.allow == LayerUse::Signal, tag + ": bad layer on " + key, fail);
        expect(l.side() == rn.side, tag + ": cross-stack segment on " + key, fail);
      }
    }
    expect(std::abs(per_layer - per_net) < 1e-6, tag + ": conservation", fail);

    {
      auto [nl2, rs2] = build(7);
      expect(rs2.hash() == rs.hash(), tag + ": determinism", fail);
    }
    if (!fail.empty()) return;
  }

  // routed >= hpwl, checked on one omni fixture with router access
  Netlist nl = parse_omni(read_file(data_path("fixtures/crypto.net")));
  auto clusters = cluster_cells(nl);
  assign_flavors(nl, clusters);
  Floorplan fp = build_floorplan(nl, shared_library(), 0.85);
  Placement pl = place(nl, fp, to_cluster_refs(clusters), 7);
  cts(nl, pl, shared_library(), 7);
  RoutingState rs(fp, LayerStack::from_text(read_file(data_path("stack.txt"))),
                  PdnStyle::Split, {});
  route_clock(nl, pl, rs, 7);
  flip_clock_buffers(nl, rs, pl, 7);
  Router router(nl, pl, rs, 7);
  router.route(derive_physical_nets(nl));
  for (const PhysicalNet& pn : derive_physical_nets(nl)) {
    const RoutedNet* rn = rs.find(pn.key());
    expect(rn != nullptr, "unrouted " + pn.key(), fail);
    if (rn) expect(rn->length_um >= router.hpwl_um(pn) - 1e-9, "hpwl bound " + pn.key(), fail);
  }
}

// ---------- 8: congestion vs balance trend ----------
void c8(std::string& fail) {
  FlowConfig cfg;
  cfg.design_path = data_path("fixtures/congested.net");
  cfg.arch = Arch::Omni3D;
  cfg.pattern = PinAccess::DO;
  cfg.library_path = data_path("library.lib");
  cfg.stack_path = data_path("stack.txt");
  cfg.coefficients_path = data_path("coefficients.txt");
  cfg.utilization = 0.93;
  FlowInputs in = FlowInputs::load(cfg);

  auto overflow_run = [&](double ti_prob, bool clustered, std::uint64_t seed) {
    Netlist nl = parse_netlist(in.design_text, in.library, cfg.arch, cfg.pattern);
    auto clusters = cluster_cells(nl);
    if (clustered) {
      assign_flavors(nl, clusters);
    } else {
      Rng rng(seed * 7919 + 13);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (const CellInstance& c : nl.cells())
        nl.cell(c.id).flavor = u(rng) < ti_prob ? Flavor::TI : Flavor::BI;
    }
    Floorplan fp = build_floorplan(nl, in.library, cfg.utilization);
    Placement pl = place(nl, fp, to_cluster_refs(clusters), seed);
    cts(nl, pl, in.library, seed);
    RoutingState rs(fp, in.stack, PdnStyle::Split, cfg.route);
    route_clock(nl, pl, rs, seed);
    flip_clock_buffers(nl, rs, pl, seed);
    Router router(nl, pl, rs, seed);
    router.route(derive_physical_nets(nl));
    return rs.overflow_total();
  };
  auto median10 = [&](double p, bool clustered) {
    std::vector<long long> v;
    for (std::uint64_t s = 1; s <= 10; ++s) v.push_back(overflow_run(p, clustered, s));
    std::sort(v.begin(), v.end());
    return (v[4] + v[5]) / 2;
  };

  long long imbalanced = median10(1.0 / 9.0, false);  // the 1:8 synthesis ratio
  long long even_naive = median10(0.5, false);        // naive even balance
  long long clustered = median10(0.5, true);          // clustered assignment
  expect(imbalanced > even_naive,
         "1:8 (" + std::to_string(imbalanced) + ") !> even (" + std::to_string(even_naive) + ")",
         fail);
  expect(even_naive > clustered,
         "even (" + std::to_string(even_naive) + ") !> clustered (" +
             std::to_string(clustered) + ")",
         fail);
}

// ---------- 9: STA oracle ----------
void c9(std::string& fail) {
  Rng rng(909);
  std::uniform_real_distribution<double> u(0.05, 2.0);
  for (int t = 0; t < 100; ++t) {
    RcTree tree;
    tree.nodes.push_back({-1, 0.0, u(rng)});
    int n = 2 + static_cast<int>(rng() % 19);
    for (int i = 1; i < n; ++i)
      tree.add_node(static_cast<int>(rng() % tree.nodes.size()), u(rng), u(rng));

    auto fast = tree.elmore_ps();
    // first-moment oracle
    for (int sink = 0; sink < n; ++sink) {
      double want = 0.0;
      for (int j = 0; j < n; ++j) {
        double shared = 0.0;
        // resistance common to source->sink and source->j
        std::set<int> on_sink_path;
        for (int v = sink; v != -1; v = tree.nodes[v].parent) on_sink_path.insert(v);
        for (int v = j; v != -1; v = tree.nodes[v].parent)
          if (v != 0 && on_sink_path.count(v)) shared += tree.nodes[v].r_kohm;
        want += shared * tree.nodes[j].c_ff;
      }
      if (std::abs(fast[sink] - want) > 1e-9 * std::max(1.0, std::abs(want))) {
        fail += "elmore mismatch trial " + std::to_string(t);
        return;
      }
    }
  }

  // energy linearity in activity and quadratic in vdd to 1e-9 relative
  Netlist nl = parse_omni(make_ripple_adder(8));
  auto clusters = cluster_cells(nl);
  assign_flavors(nl, clusters);
  Floorplan fp = build_floorplan(nl, shared_library(), 0.85);
  Placement pl = place(nl, fp, to_cluster_refs(clusters), 2);
  cts(nl, pl, shared_library(), 2);
  RoutingState rs(fp, LayerStack::from_text(read_file(data_path("stack.txt"))),
                  PdnStyle::Split, {});
  route_clock(nl, pl, rs, 2);
  flip_clock_buffers(nl, rs, pl, 2);
  Router router(nl, pl, rs, 2);
  router.route(derive_physical_nets(nl));

  AnalysisParams p1;
  p1.activity = 0.1;
  p1.clock_activity = 0.5;
  AnalysisParams p2 = p1;
  p2.activity = 0.2;
  p2.clock_activity = 1.0;
  EnergyResult e1 = energy(nl, rs, 0.45, 300.0, p1);
  EnergyResult e2 = energy(nl, rs, 0.45, 300.0, p2);
  EnergyResult ev = energy(nl, rs, 0.90, 300.0, p1);
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1e-30, std::abs(b)); };
  expect(rel(e2.net_switching_fj, 2 * e1.net_switching_fj) < 1e-9, "activity linearity", fail);
  expect(rel(e2.pin_switching_fj, 2 * e1.pin_switching_fj) < 1e-9, "pin linearity", fail);
  expect(rel(e2.internal_fj, 2 * e1.internal_fj) < 1e-9, "internal linearity", fail);
  expect(rel(ev.net_switching_fj, 4 * e1.net_switching_fj) < 1e-9, "vdd quadratic", fail);
  expect(rel(ev.leakage_fj, 2 * e1.leakage_fj) < 1e-9, "leakage vdd linearity", fail);
}

// ---------- 10: end-to-end flow ----------
void c10(std::string& fail) {
  FlowConfig omni = FlowConfig::from_file(data_path("configs/adder16_omni.cfg"));
  FlowInputs in = FlowInputs::load(omni);
  FlowResult r = clock_sweep(omni, in);
  expect(r.rows.size() == 11, "sweep rows", fail);
  for (std::size_t i = 1; i < r.rows.size(); ++i)
    expect(r.rows[i].achieved_delay_ps <= r.rows[i - 1].achieved_delay_ps + 1e-9,
           "achieved-delay monotone at row " + std::to_string(i), fail);
  for (std::size_t i = 1; i < 3; ++i)
    expect(std::abs(r.rows[i].energy_fj - r.rows[0].energy_fj) / r.rows[0].energy_fj < 0.05,
           "relaxed-region energy variation", fail);
  expect(r.min_edp_row.has_value(), "valid min-EDP row", fail);
  if (r.min_edp_row) {
    for (const FlowRow& row : r.rows)
      if (row.valid)
        expect(r.rows[*r.min_edp_row].edp <= row.edp, "min-EDP is minimal", fail);
  }

  FlowConfig cfet = FlowConfig::from_file(data_path("configs/adder16_cfet.cfg"));
  ArchComparison cmp = compare_architectures({cfet, omni});
  expect(cmp.rows.size() == 2, "comparison rows", fail);
  expect(cmp.rows[1].edp_ratio > 1.0, "EDP ratio > 1, got " +
                                          std::to_string(cmp.rows[1].edp_ratio), fail);
  expect(cmp.rows[1].area_ratio > 1.0, "area ratio > 1, got " +
                                           std::to_string(cmp.rows[1].area_ratio), fail);
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "design-space cardinality and feasibility filter", c1},
      {2, "min-EDP corner and calibrated metric ratios", c2},
      {3, "variant Ceff/Reff ratios", c3},
      {4, "cell area model", c4},
      {5, "clustering equals the sibling-graph oracle; splits vanish", c5},
      {6, "flavor balance bound and stopping rule", c6},
      {7, "routing invariants across the fixture suite", c7},
      {8, "overflow decreases from imbalance to clustered balance", c8},
      {9, "Elmore and energy oracles", c9},
      {10, "end-to-end clock sweep and architecture comparison", c10},
  };
  // stated per-criterion runtime limits, seconds
  std::map<int, double> limits = {{1, 1.0}, {2, 5.0}, {3, 1.0}, {5, 10.0}, {10, 300.0}};

  int failures = 0;
  for (const Criterion& c : criteria) {
    std::string fail;
    auto start = std::chrono::steady_clock::now();
    try {
      c.run(fail);
    } catch (const std::exception& e) {
      fail += std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (limits.count(c.id) && secs > limits[c.id])
      fail += (fail.empty() ? "" : "; ") + std::string("runtime ") + std::to_string(secs) +
              "s exceeds " + std::to_string(limits[c.id]) + "s";
    if (fail.empty()) {
      std::printf("PASS  %2d  %s (%.2fs)\n", c.id, c.name.c_str(), secs);
    } else {
      std::printf("FAIL  %2d  %s (%.2fs): %s\n", c.id, c.name.c_str(), secs, fail.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
  return failures;
}
