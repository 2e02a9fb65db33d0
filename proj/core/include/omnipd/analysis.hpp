#pragma once

#include <map>
#include <string>
#include <vector>

#include "omnipd/layout.hpp"
#include "omnipd/netlist.hpp"

namespace omnipd {

/// Explicit RC tree for Elmore evaluation. Node 0 is the source; every
/// other node has one parent edge with resistance r (kohm) and carries a
/// grounded cap c (fF). Exposed so tests can drive it directly against a
/// brute-force moment oracle.
struct RcTree {
  struct Node {
    int parent = -1;
    double r_kohm = 0.0;
    double c_ff = 0.0;
  };
  std::vector<Node> nodes;

  int add_node(int parent, double r_kohm, double c_ff);
  void add_cap(int node, double c_ff) { nodes[node].c_ff += c_ff; }
  /// Elmore delay (ps) from the source to every node.
  std::vector<double> elmore_ps() const;
};

struct AnalysisParams {
  double activity = 0.1;        // data toggle rate per cycle
  double clock_activity = 1.0;  // clock net toggle rate
  int top_k = 100;
};

/// Wire RC of one logical net over its routed physical nets: total load the
/// driver sees and per-sink Elmore wire delay.
struct NetRc {
  double wire_cap_ff = 0.0;
  double pin_cap_ff = 0.0;
  std::map<std::string, double> sink_wire_ps;  // endpoint str -> delay

  double total_cap_ff() const { return wire_cap_ff + pin_cap_ff; }
};

NetRc net_rc(const Netlist& nl, const RoutingState& rs, const Placement& pl,
             const LogicalNet& net);

struct PathStage {
  std::string cell;       // empty for the endpoint stage
  double cell_delay_ps = 0.0;
  double wire_delay_ps = 0.0;
};

struct TimingPath {
  Endpoint endpoint;
  double arrival_ps = 0.0;
  double required_ps = 0.0;
  double slack_ps = 0.0;
  double cell_delay_ps = 0.0;   // per-path totals
  double wire_delay_ps = 0.0;
  double setup_ps = 0.0;
  double skew_ps = 0.0;         // launch minus capture insertion
  std::vector<PathStage> stages;
};

struct TimingResult {
  double period_ps = 0.0;
  std::vector<TimingPath> top_paths;  // slack ascending, at most top_k
  double worst_slack_ps = 0.0;
  double avg_slack_top_ps = 0.0;
  double clock_skew_ps = 0.0;         // max-min sink insertion over top paths
  double achieved_delay_ps = 0.0;     // period - avg_slack_top
  int endpoint_count = 0;
};

/// Elmore-based static timing over the routed design. Cell delay is
/// intrinsic + r_drive * (wire + load pin caps); wire delay is the routed
/// tree's Elmore from driver to sink. Cell data comes from the netlist's
/// bound library.
TimingResult sta(const Netlist& nl, const RoutingState& rs, const Placement& pl,
                 const ClockTree& tree, double period_ps, const AnalysisParams& params = {});

struct EnergyResult {
  double internal_fj = 0.0;
  double pin_switching_fj = 0.0;
  double net_switching_fj = 0.0;
  double leakage_fj = 0.0;
  double total_fj = 0.0;

  double fraction(double part) const { return total_fj > 0 ? part / total_fj : 0.0; }
};

EnergyResult energy(const Netlist& nl, const RoutingState& rs, double vdd, double period_ps,
                    const AnalysisParams& params = {});

struct AreaRow {
  std::string master;
  double area_frac = 0.0;        // of reference design total area
  double ref_area_frac = 0.0;
  double count_frac = 0.0;       // of reference design cell count
  double ref_count_frac = 0.0;
};

struct AreaReport {
  std::vector<AreaRow> rows;     // master name ascending
  double total_area_ratio = 0.0;  // design / reference
};

/// Per-master area and instance counts of a design, normalized by the
/// reference design's totals.
AreaReport area_report(const Netlist& design, const Netlist& reference);

struct DelayBreakdown {
  double cell = 0.0;
  double wire = 0.0;
  double setup = 0.0;
  double skew = 0.0;  // can be negative; components sum to 1
};

DelayBreakdown delay_breakdown(const TimingResult& t);

/// Net capacitance seen by STA/energy: routed wire cap with the
/// density-coupling uplift, plus the split-PDN ground adder.
double routed_net_cap_ff(const RoutingState& rs, const RoutedNet& rn, PdnStyle pdn);

}  // namespace omnipd
