#include "omnipd/flow.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <future>
#include <sstream>

namespace omnipd {

namespace {

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  if (base_dir.empty()) return path;
  return (std::filesystem::path(base_dir) / path).string();
}

}  // namespace

FlowConfig FlowConfig::from_config(const KeyValueConfig& kv, const std::string& base_dir) {
  FlowConfig c;
  c.design_path = resolve(base_dir, kv.get_str("design"));
  c.arch = arch_from_string(kv.get_str("arch", "OMNI"));
  c.pattern = pattern_from_string(kv.get_str("pattern", "DO"));
  c.library_path = resolve(base_dir, kv.get_str("library", ""));
  c.skeleton_path = resolve(base_dir, kv.get_str("skeleton", ""));
  c.stack_path = resolve(base_dir, kv.get_str("stack", ""));
  c.coefficients_path = resolve(base_dir, kv.get_str("coefficients", ""));
  c.utilization = kv.get_double("utilization", c.utilization);
  c.clock_start_ps = kv.get_double("clock_start_ps", c.clock_start_ps);
  c.clock_stop_ps = kv.get_double("clock_stop_ps", c.clock_stop_ps);
  c.clock_step_ps = kv.get_double("clock_step_ps", c.clock_step_ps);
  c.gates.max_overflow = kv.get_int("max_overflow", static_cast<int>(c.gates.max_overflow));
  c.gates.min_slack_ps = kv.get_double("min_slack_ps", c.gates.min_slack_ps);
  c.gates.max_skew_ps = kv.get_double("max_skew_ps", c.gates.max_skew_ps);
  c.seed = kv.get_u64("seed", c.seed);
  c.analysis.activity = kv.get_double("activity", c.analysis.activity);
  c.analysis.clock_activity = kv.get_double("clock_activity", c.analysis.clock_activity);
  c.analysis.top_k = kv.get_int("top_k", c.analysis.top_k);
  c.route.gcell_sites = kv.get_int("gcell_sites", c.route.gcell_sites);
  c.route.ripup_iters = kv.get_int("ripup_iters", c.route.ripup_iters);
  c.anneal.stages = kv.get_int("anneal_stages", c.anneal.stages);
  c.anneal.moves_per_cell_per_stage =
      kv.get_int("anneal_moves_per_cell", c.anneal.moves_per_cell_per_stage);
  c.datapath_flip.beta = kv.get_double("beta", c.datapath_flip.beta);
  c.datapath_flip.max_passes = kv.get_int("flip_max_passes", c.datapath_flip.max_passes);
  c.cluster.include_clock_nets = kv.get_int("cluster_clock_nets", 0) != 0;
  c.disable_clustering = kv.get_int("disable_clustering", 0) != 0;
  c.out_dir = kv.get_str("out", "");
  c.validate();
  return c;
}

FlowConfig FlowConfig::from_file(const std::string& path) {
  KeyValueConfig kv = KeyValueConfig::from_file(path);
  return from_config(kv, std::filesystem::path(path).parent_path().string());
}

void FlowConfig::validate() const {
  if (design_path.empty()) throw ValidationError("flow config: design is required");
  if (clock_step_ps <= 0) throw ValidationError("flow config: clock_step_ps must be > 0");
  if (clock_start_ps < clock_stop_ps)
    throw ValidationError("flow config: sweep runs start > stop (relaxed to tight)");
  if (!(utilization > 0.4 && utilization <= 0.95))
    throw ValidationError("flow config: utilization out of range");
  if (datapath_flip.beta <= 1.0) throw ValidationError("flow config: beta must be > 1");
}

FlowInputs FlowInputs::load(const FlowConfig& cfg) {
  FlowInputs in;
  SurrogateCoefficients coeffs;
  if (!cfg.coefficients_path.empty())
    coeffs = SurrogateCoefficients::from_config(KeyValueConfig::from_file(cfg.coefficients_path));
  in.coeffs = coeffs;

  if (!cfg.library_path.empty()) {
    in.library = load_library(read_file(cfg.library_path));
  } else if (!cfg.skeleton_path.empty()) {
    in.library = characterize_library(coeffs, load_skeleton(read_file(cfg.skeleton_path)));
  } else {
    throw ValidationError("flow config: need library or skeleton");
  }
  in.vdd = in.library.vdd;

  in.stack = cfg.stack_path.empty() ? LayerStack::shipped_default()
                                    : LayerStack::from_text(read_file(cfg.stack_path));
  in.design_text = read_file(cfg.design_path);
  return in;
}

namespace {

struct StageError : Error {
  StageError(const std::string& stage, const std::string& what)
      : Error("[" + stage + "] " + what) {}
};

FlowPhysical build_physical(const FlowConfig& cfg, const FlowInputs& inputs) {
  FlowPhysical ph;
  auto stage = [](const std::string& name, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      throw StageError(name, e.what());
    }
  };

  stage("parse", [&] {
    ph.netlist = parse_netlist(inputs.design_text, inputs.library, cfg.arch, cfg.pattern);
  });

  stage("sideplan", [&] {
    ph.clusters = cluster_cells(ph.netlist, cfg.cluster);
    if (cfg.arch == Arch::CFET) {
      // single-stack baseline: everything routes top-side
      for (const CellInstance& c : ph.netlist.cells())
        ph.netlist.cell(c.id).flavor = Flavor::TI;
    } else if (cfg.disable_clustering) {
      // A/B knob: arbitrary flavors, as synthesis would leave them
      Rng rng(cfg.seed ^ 0x5eedf1a5ull);
      for (const CellInstance& c : ph.netlist.cells())
        ph.netlist.cell(c.id).flavor = (rng() & 1) ? Flavor::TI : Flavor::BI;
    } else {
      assign_flavors(ph.netlist, ph.clusters);
    }
  });

  stage("floorplan", [&] {
    Floorplan fp = build_floorplan(ph.netlist, inputs.library, cfg.utilization);
    ph.placement = place(ph.netlist, fp, to_cluster_refs(ph.clusters), cfg.seed, cfg.anneal);
  });

  stage("cts", [&] {
    ph.clock_tree = cts(ph.netlist, ph.placement, inputs.library, cfg.seed);
  });

  stage("route", [&] {
    ph.routing = RoutingState(ph.placement.fp, inputs.stack, ArchInfo::of(cfg.arch).pdn,
                              cfg.route);
    route_clock(ph.netlist, ph.placement, ph.routing, cfg.seed);
    if (cfg.arch != Arch::CFET)
      ph.clock_flips = flip_clock_buffers(ph.netlist, ph.routing, ph.placement, cfg.seed);
    Router router(ph.netlist, ph.placement, ph.routing, cfg.seed);
    router.route(derive_physical_nets(ph.netlist));
    if (cfg.arch != Arch::CFET)
      ph.datapath_flips = flip_datapath_buffers(ph.netlist, ph.routing, ph.placement, cfg.seed,
                                                cfg.datapath_flip);
    annotate_clock_delays(ph.clock_tree, ph.netlist, ph.routing, ph.placement);
  });

  ph.core_area_um2 = ph.placement.fp.core_w_nm * ph.placement.fp.core_h_nm * 1e-6;
  double cell_area = 0.0;
  for (const CellInstance& c : ph.netlist.cells())
    cell_area += cell_area_nm2(ph.netlist.master_of(c), inputs.library);
  ph.cell_area_um2 = cell_area * 1e-6;
  ph.wirelength_um = ph.routing.total_wirelength_um();
  return ph;
}

FlowRow analyze_period(const FlowConfig& cfg, const FlowInputs& inputs,
                       const FlowPhysical& ph, double period_ps) {
  FlowRow row;
  row.target_period_ps = period_ps;
  TimingResult t =
      sta(ph.netlist, ph.routing, ph.placement, ph.clock_tree, period_ps, cfg.analysis);
  EnergyResult e = energy(ph.netlist, ph.routing, inputs.vdd, period_ps, cfg.analysis);
  row.achieved_delay_ps = t.achieved_delay_ps;
  row.avg_slack_ps = t.avg_slack_top_ps;
  row.worst_slack_ps = t.worst_slack_ps;
  row.skew_ps = t.clock_skew_ps;
  row.overflow = ph.routing.overflow_total();
  row.energy_fj = e.total_fj;
  row.edp = row.energy_fj * row.achieved_delay_ps;
  if (row.overflow > cfg.gates.max_overflow)
    row.invalid_reason = "overflow";
  else if (row.avg_slack_ps < cfg.gates.min_slack_ps)
    row.invalid_reason = "slack";
  else if (row.skew_ps > cfg.gates.max_skew_ps)
    row.invalid_reason = "skew";
  row.valid = row.invalid_reason.empty();
  return row;
}

}  // namespace

FlowResult run_flow(const FlowConfig& cfg, const FlowInputs& inputs, double period_ps) {
  FlowResult r;
  r.physical = build_physical(cfg, inputs);
  r.rows.push_back(analyze_period(cfg, inputs, r.physical, period_ps));
  if (r.rows[0].valid) r.min_edp_row = 0;
  return r;
}

FlowResult run_flow(const FlowConfig& cfg, double period_ps) {
  return run_flow(cfg, FlowInputs::load(cfg), period_ps);
}

FlowResult clock_sweep(const FlowConfig& cfg, const FlowInputs& inputs) {
  FlowResult r;
  // the layout stages never read the target period, so one deterministic
  // physical database serves every row of the sweep
  r.physical = build_physical(cfg, inputs);
  std::vector<double> periods;
  for (double p = cfg.clock_start_ps; p >= cfg.clock_stop_ps - 1e-9; p -= cfg.clock_step_ps)
    periods.push_back(p);

  std::vector<std::future<FlowRow>> jobs;
  for (double p : periods)
    jobs.push_back(std::async(std::launch::async, [&, p] {
      return analyze_period(cfg, inputs, r.physical, p);
    }));
  for (auto& j : jobs) r.rows.push_back(j.get());

  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    if (!r.rows[i].valid) continue;
    if (!r.min_edp_row || r.rows[i].edp < r.rows[*r.min_edp_row].edp) r.min_edp_row = i;
  }
  return r;
}

FlowResult clock_sweep(const FlowConfig& cfg) { return clock_sweep(cfg, FlowInputs::load(cfg)); }

std::string flow_csv(const FlowResult& r) {
  std::ostringstream out;
  out << "target_period_ps,achieved_delay_ps,avg_slack_ps,worst_slack_ps,skew_ps,overflow,"
         "energy_fj,edp,valid,invalid_reason,is_min_edp\n";
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const FlowRow& row = r.rows[i];
    out << fmt_double(row.target_period_ps, 3) << ',' << fmt_double(row.achieved_delay_ps, 3)
        << ',' << fmt_double(row.avg_slack_ps, 3) << ',' << fmt_double(row.worst_slack_ps, 3)
        << ',' << fmt_double(row.skew_ps, 3) << ',' << row.overflow << ','
        << fmt_double(row.energy_fj, 6) << ',' << fmt_double(row.edp, 6) << ','
        << (row.valid ? 1 : 0) << ',' << row.invalid_reason << ','
        << (r.min_edp_row && *r.min_edp_row == i ? 1 : 0) << "\n";
  }
  return out.str();
}

namespace {

std::pair<int, int> used_levels(const RoutingState& rs, Side side) {
  auto wl = rs.wirelength_by_layer();
  int lo = 99, hi = -1;
  for (int idx : rs.stack().signal_layers(side)) {
    const LayerSpec& l = rs.stack().layer(idx);
    if (wl[l.name] > 0) {
      lo = std::min(lo, l.level());
      hi = std::max(hi, l.level());
    }
  }
  return {lo, hi};
}

std::string layer_span(const RoutingState& rs, Side side, bool power) {
  auto [lo, hi] = used_levels(rs, side);
  // the PDN mirrors the signal span; a side with no signal usage (CFET
  // backside) mirrors the opposite side's span
  if (power && hi < 0) {
    auto [olo, ohi] = used_levels(rs, other_side(side));
    lo = olo;
    hi = ohi;
  }
  if (hi < 0) return "-";
  char prefix = side == Side::Top ? 'T' : 'B';
  std::ostringstream out;
  out << prefix << 'M' << lo << " - " << prefix << 'M' << hi;
  return out.str();
}

}  // namespace

ArchComparison compare_architectures(const std::vector<FlowConfig>& configs) {
  if (configs.empty()) throw ValidationError("compare: no configs");
  for (const FlowConfig& c : configs)
    if (std::filesystem::path(c.design_path).filename() !=
        std::filesystem::path(configs[0].design_path).filename())
      throw ValidationError("compare: mismatched design files");

  struct Run {
    std::string label;
    Arch arch;
    FlowRow best;
    double core_area;
    int cells;
    std::string tsig, tpwr, bsig, bpwr;
  };
  std::vector<Run> runs;
  for (const FlowConfig& cfg : configs) {
    FlowInputs inputs = FlowInputs::load(cfg);
    FlowResult r = clock_sweep(cfg, inputs);
    Run run;
    run.label = to_string(cfg.arch);
    run.arch = cfg.arch;
    // fall back to the lowest-EDP row if no row passed the gates
    std::size_t pick = 0;
    if (r.min_edp_row) {
      pick = *r.min_edp_row;
    } else {
      for (std::size_t i = 1; i < r.rows.size(); ++i)
        if (r.rows[i].edp < r.rows[pick].edp) pick = i;
    }
    run.best = r.rows.at(pick);
    run.core_area = r.physical.core_area_um2;
    run.cells = static_cast<int>(r.physical.netlist.cells().size());
    const RoutingState& rs = r.physical.routing;
    const PdnStyle pdn = ArchInfo::of(cfg.arch).pdn;
    run.tsig = layer_span(rs, Side::Top, false);
    run.bsig = cfg.arch == Arch::CFET ? "-" : layer_span(rs, Side::Bottom, false);
    run.tpwr = pdn == PdnStyle::Split ? layer_span(rs, Side::Top, true) + " (Vss)" : "-";
    run.bpwr = pdn == PdnStyle::Split ? layer_span(rs, Side::Bottom, true) + " (Vdd)"
                                      : layer_span(rs, Side::Bottom, true) + " (Vdd, Vss)";
    runs.push_back(std::move(run));
  }

  const Run* cfet = nullptr;
  for (const Run& r : runs)
    if (r.arch == Arch::CFET) cfet = &r;
  if (!cfet) cfet = &runs[0];

  ArchComparison cmp;
  for (const Run& r : runs) {
    ArchComparison::Row row;
    row.label = r.label;
    row.edp_ratio = r.best.edp > 0 ? cfet->best.edp / r.best.edp : 0.0;
    row.energy_ratio = r.best.energy_fj > 0 ? cfet->best.energy_fj / r.best.energy_fj : 0.0;
    row.delay_ratio =
        r.best.achieved_delay_ps > 0 ? cfet->best.achieved_delay_ps / r.best.achieved_delay_ps
                                     : 0.0;
    row.area_ratio = r.core_area > 0 ? cfet->core_area / r.core_area : 0.0;
    row.cell_count = r.cells;
    row.top_signal_layers = r.tsig;
    row.top_power_layers = r.tpwr;
    row.bottom_signal_layers = r.bsig;
    row.bottom_power_layers = r.bpwr;
    cmp.rows.push_back(std::move(row));
  }
  return cmp;
}

std::string comparison_csv(const ArchComparison& c) {
  std::ostringstream out;
  out << "arch,edp_ratio,energy_ratio,delay_ratio,area_ratio,cells,top_signal,top_power,"
         "bottom_signal,bottom_power\n";
  for (const auto& r : c.rows) {
    out << r.label << ',' << fmt_double(r.edp_ratio, 4) << ',' << fmt_double(r.energy_ratio, 4)
        << ',' << fmt_double(r.delay_ratio, 4) << ',' << fmt_double(r.area_ratio, 4) << ','
        << r.cell_count << ',' << r.top_signal_layers << ',' << r.top_power_layers << ','
        << r.bottom_signal_layers << ',' << r.bottom_power_layers << "\n";
  }
  return out.str();
}

}  // namespace omnipd
