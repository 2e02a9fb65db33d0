#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "omnipd/netlist.hpp"

namespace omnipd {

struct Floorplan {
  double core_w_nm = 0.0;
  double core_h_nm = 0.0;
  double row_h_nm = 0.0;
  double site_w_nm = 0.0;
  int rows = 0;
  int cols = 0;
  double utilization = 0.85;
};

/// Core sized to sum(cell areas)/utilization at aspect ratio ~1, rows per
/// architecture track height.
Floorplan build_floorplan(const Netlist& nl, const CellLibrary& lib, double utilization);

struct SiteLoc {
  int row = 0;
  int col = 0;
  bool operator==(const SiteLoc&) const = default;
};

/// Legalized site placement. Ports live on the core boundary.
class Placement {
 public:
  Floorplan fp;
  std::map<std::string, SiteLoc> cells;             // instance id -> site
  std::map<std::string, std::pair<double, double>> ports;  // port -> (x, y) nm

  double x_nm(const Netlist& nl, const Endpoint& e) const;  // pin center
  double y_nm(const Netlist& nl, const Endpoint& e) const;
  bool legal(const Netlist& nl) const;
  std::uint64_t hash() const;
};

struct AnnealParams {
  double t_start_factor = 0.6;   // initial T = factor * mean |delta|
  double cooling = 0.96;
  int moves_per_cell_per_stage = 8;
  int stages = 40;
  double min_accept_rate = 0.015;
};

/// Cluster-seeded simulated annealing over half-perimeter wirelength of the
/// physical nets. Deterministic for a fixed seed.
struct ClusterRef {
  int id;
  std::vector<std::string> members;
};
Placement place(const Netlist& nl, const Floorplan& fp,
                const std::vector<ClusterRef>& clusters, std::uint64_t seed,
                const AnnealParams& params = {});

/// Random placement at matching density; baseline for seed-quality checks.
Placement place_random(const Netlist& nl, const Floorplan& fp, std::uint64_t seed);

double total_hpwl_um(const Netlist& nl, const Placement& pl);

enum class LayerUse { Signal, Power, IoOnly };

struct LayerSpec {
  std::string name;
  double pitch_nm = 20.0;
  double width_nm = 10.0;
  double rsq_ohm = 6.0;
  double cap_ff_um = 0.19;
  char dir = 'H';
  LayerUse allow = LayerUse::Signal;

  bool is_m8() const { return name == "M8"; }
  Side side() const { return name[0] == 'B' ? Side::Bottom : Side::Top; }
  int level() const;  // 1..7 within its stack, 8 for M8
  double r_per_um() const { return rsq_ohm / (width_nm * 1e-3); }
};

/// Dual mirrored metal stack in extraction order (TM1..TM7, M8, BM7..BM1).
/// M8 admits block I/O only.
class LayerStack {
 public:
  std::vector<LayerSpec> layers;

  static LayerStack from_text(const std::string& text);
  static LayerStack shipped_default();
  std::string serialize() const;

  int index_of(const std::string& name) const;
  const LayerSpec& layer(int idx) const { return layers.at(idx); }
  int m8_index() const;
  /// Signal-routable layer indices on one side, level ascending (TM2..TM7).
  std::vector<int> signal_layers(Side s) const;
  /// PDN capacity derate on a signal layer: linear from 6% (lowest) to 15%
  /// (highest) per side for split-PDN architectures, zero for backside PDN.
  double pdn_derate(int layer_idx, PdnStyle pdn) const;

  void validate() const;
};

struct RouteParams {
  int gcell_sites = 10;        // sites per gcell edge
  int ripup_iters = 8;
  int maze_margin = 6;         // gcell halo around net bbox for maze search
  double pdn_cap_uplift_ff_um = 0.02;  // split-PDN ground-cap adder
  double coupling_factor = 0.35;       // cap uplift per unit layer density
  double via_r_ohm = 10.0;
  int short_net_gcells = 4;    // length tiers for layer assignment
  int mid_net_gcells = 20;
};

struct RouteSegment {
  int layer = 0;               // LayerStack index
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // gcell coords, one axis varies

  int len() const { return std::abs(x1 - x0) + std::abs(y1 - y0); }
};

struct RoutedNet {
  std::string key;             // PhysicalNet key
  std::string logical_id;
  Side side = Side::Top;
  NetKind kind = NetKind::Signal;
  std::vector<RouteSegment> segments;
  std::vector<std::array<int, 2>> m8_stubs;  // gcell coords of M8 crossings
  double length_um = 0.0;

  bool uses_m8() const { return !m8_stubs.empty(); }
};

/// Dual-stack gcell capacity grid plus routed trees. Usage is tracked per
/// directed gcell edge per layer; overflow is the DRV analog.
class RoutingState {
 public:
  RoutingState() = default;
  RoutingState(const Floorplan& fp, const LayerStack& stack, PdnStyle pdn,
               const RouteParams& params);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double gcell_um() const { return gcell_nm_ * 1e-3; }
  const LayerStack& stack() const { return stack_; }
  const RouteParams& params() const { return params_; }

  int capacity(int layer, int x, int y) const;
  int usage(int layer, int x, int y) const;

  const std::map<std::string, RoutedNet>& nets() const { return nets_; }
  const RoutedNet* find(const std::string& key) const;

  void commit(const RoutedNet& net);
  void rip_up(const std::string& key);

  long long overflow_total() const;
  /// Exact per-layer wirelength in um, by stack layer name.
  std::map<std::string, double> wirelength_by_layer() const;
  double total_wirelength_um() const;
  /// Fraction of a layer's routing capacity in use (for coupling uplift).
  double layer_density(int layer_idx) const;

  std::uint64_t hash() const;

  // grid helpers shared with the router
  int gcell_x(double x_nm) const;
  int gcell_y(double y_nm) const;

 private:
  friend class Router;
  int nx_ = 0, ny_ = 0;
  double gcell_nm_ = 420.0;
  LayerStack stack_;
  PdnStyle pdn_ = PdnStyle::Split;
  RouteParams params_;
  std::vector<std::vector<int>> usage_;     // [layer][x*ny+y]
  std::vector<std::vector<int>> capacity_;
  std::map<std::string, RoutedNet> nets_;
};

/// Pattern routing (L/Z) with maze fallback and bounded rip-up-and-reroute.
/// Monotone acceptance: a reroute that would raise total overflow is
/// discarded. Net order is fixed (key ascending) for determinism.
class Router {
 public:
  Router(const Netlist& nl, const Placement& pl, RoutingState& state, std::uint64_t seed);

  void route(const std::vector<PhysicalNet>& nets);
  void route_one(const PhysicalNet& net);
  void rip_up(const std::string& key) { state_.rip_up(key); }
  void ripup_reroute_pass();

  /// HPWL of a physical net in um over this grid's geometry.
  double hpwl_um(const PhysicalNet& net) const;

 private:
  struct Pin {
    int x, y;
    bool via_m8;
  };
  std::vector<Pin> net_pins(const PhysicalNet& net) const;
  RoutedNet build_route(const PhysicalNet& net, bool congestion_aware);

  const Netlist& nl_;
  const Placement& pl_;
  RoutingState& state_;
  Rng rng_;
  std::map<std::string, PhysicalNet> by_key_;
};

RoutingState global_route(const Netlist& nl, const Placement& pl, const LayerStack& stack,
                          std::uint64_t seed, const RouteParams& params = {});

struct ClockSink {
  Endpoint pin;
  double x_nm = 0.0, y_nm = 0.0;
  double insertion_ps = 0.0;
};

struct ClockTree {
  std::string root_net;                 // original clock net id (now root segment)
  std::vector<std::string> buffers;     // inserted instance ids, level order
  std::vector<ClockSink> sinks;
  double skew_ps = 0.0;                 // max-min insertion over all sinks

  bool empty() const { return sinks.empty(); }
};

struct CtsParams {
  int max_sinks_per_leaf = 8;
  std::string buffer_master = "CKBUFD1";
};

/// Recursive geometric-bisection buffer tree over the clock sinks. Inserted
/// buffer flavors are drawn from the seeded RNG: this reproduces the
/// arbitrary-flavor insertion that the post-CTS flip pass corrects.
ClockTree cts(Netlist& nl, Placement& pl, const CellLibrary& lib, std::uint64_t seed,
              const CtsParams& params = {});

/// Routes clock physical nets (single tree per net, M8 stubs for off-side
/// buffer inputs) into the grid. Signal nets are untouched.
void route_clock(const Netlist& nl, const Placement& pl, RoutingState& state,
                 std::uint64_t seed);

/// Elmore insertion delay per sink through the routed clock network; fills
/// tree.sinks[].insertion_ps and tree.skew_ps.
void annotate_clock_delays(ClockTree& tree, const Netlist& nl, const RoutingState& state,
                           const Placement& pl);

std::map<std::string, double> wirelength_by_layer(const RoutingState& rs);
/// Omni 3D reporting convention: combined M2..M7 rows (TMk+BMk) plus the
/// per-side rows.
std::map<std::string, double> wirelength_by_layer_combined(const RoutingState& rs);

std::string routing_dump(const RoutingState& rs);

}  // namespace omnipd
