#pragma once

#include <optional>
#include <string>
#include <vector>

#include "omnipd/analysis.hpp"
#include "omnipd/config.hpp"
#include "omnipd/dtco.hpp"
#include "omnipd/layout.hpp"
#include "omnipd/sideplan.hpp"

namespace omnipd {

struct ValidityGates {
  long long max_overflow = 300;
  double min_slack_ps = -50.0;
  double max_skew_ps = 10.0;
};

struct FlowConfig {
  std::string design_path;
  Arch arch = Arch::Omni3D;
  PinAccess pattern = PinAccess::DO;
  std::string library_path;
  std::string skeleton_path;
  std::string stack_path;
  std::string coefficients_path;
  double utilization = 0.85;
  double clock_start_ps = 300.0;  // sweep runs start -> stop, start > stop
  double clock_stop_ps = 100.0;
  double clock_step_ps = 20.0;
  ValidityGates gates;
  std::uint64_t seed = 1;
  AnalysisParams analysis;
  RouteParams route;
  AnnealParams anneal;
  DatapathFlipParams datapath_flip;
  ClusterParams cluster;
  std::string out_dir;
  bool disable_clustering = false;  // A/B knob: random flavors instead

  static FlowConfig from_file(const std::string& path);
  static FlowConfig from_config(const KeyValueConfig& kv, const std::string& base_dir);
  void validate() const;
};

/// Everything loaded once per flow: library, netlist text, stack, coeffs.
struct FlowInputs {
  CellLibrary library;
  LayerStack stack;
  SurrogateCoefficients coeffs;
  std::string design_text;
  double vdd = 0.45;  // of the characterized design point

  static FlowInputs load(const FlowConfig& cfg);
};

struct FlowRow {
  double target_period_ps = 0.0;
  double achieved_delay_ps = 0.0;
  double avg_slack_ps = 0.0;
  double worst_slack_ps = 0.0;
  double skew_ps = 0.0;
  long long overflow = 0;
  double energy_fj = 0.0;
  double edp = 0.0;  // energy * achieved delay
  bool valid = false;
  std::string invalid_reason;
};

/// Physical state shared by every period of a sweep: the layout stages do
/// not read the target period, so one placed-and-routed database serves all
/// rows of a sweep deterministically.
struct FlowPhysical {
  Netlist netlist;
  std::vector<Cluster> clusters;
  Placement placement;
  RoutingState routing;
  ClockTree clock_tree;
  int clock_flips = 0;
  int datapath_flips = 0;
  double core_area_um2 = 0.0;
  double cell_area_um2 = 0.0;
  double wirelength_um = 0.0;
};

struct FlowResult {
  std::vector<FlowRow> rows;                 // target period descending
  std::optional<std::size_t> min_edp_row;    // among valid rows
  FlowPhysical physical;                     // state of the (single) layout
};

/// One full run at a single target period: cluster, assign, place (cluster
/// seeded), CTS, clock-buffer flip, global route, data-buffer flip, then
/// timing/energy against the gates.
FlowResult run_flow(const FlowConfig& cfg, const FlowInputs& inputs, double period_ps);
FlowResult run_flow(const FlowConfig& cfg, double period_ps);

/// run_flow across the configured period range; emits one row per period
/// and the min-EDP valid selection. Invalid rows are retained.
FlowResult clock_sweep(const FlowConfig& cfg, const FlowInputs& inputs);
FlowResult clock_sweep(const FlowConfig& cfg);

std::string flow_csv(const FlowResult& r);

struct ArchComparison {
  struct Row {
    std::string label;
    double edp_ratio = 1.0;     // CFET-normalized (CFET row = 1.0)
    double energy_ratio = 1.0;
    double delay_ratio = 1.0;
    double area_ratio = 1.0;
    int cell_count = 0;
    std::string top_signal_layers;    // e.g. "TM2 - TM7"
    std::string top_power_layers;
    std::string bottom_signal_layers;
    std::string bottom_power_layers;
  };
  std::vector<Row> rows;
};

/// Sweeps each config (same design file required) and reports CFET-
/// normalized ratios plus per-side metal usage, one row per architecture.
ArchComparison compare_architectures(const std::vector<FlowConfig>& configs);
std::string comparison_csv(const ArchComparison& c);

}  // namespace omnipd
