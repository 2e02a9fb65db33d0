// omnipd: double-side-routing physical design and device design-space
// exploration toolkit. Subcommands: dtco, sideplan, pnr, flow, report,
// fixtures.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "omnipd/analysis.hpp"
#include "omnipd/fixtures.hpp"
#include "omnipd/flow.hpp"
#include "omnipd/report.hpp"

namespace fs = std::filesystem;
using namespace omnipd;

namespace {

struct CommonOpts {
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool svg = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool config_required = true) {
  auto* copt = cmd->add_option("--config", o.config, "key=value config file");
  if (config_required) copt->required();
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--seed", o.seed, "seed override")->each([&o](const std::string&) {
    o.seed_set = true;
  });
  cmd->add_flag("--svg", o.svg, "emit SVG plots");
}

void emit(const CommonOpts& o, const std::string& name, const std::string& content) {
  fs::create_directories(o.out);
  write_file((fs::path(o.out) / name).string(), content);
  std::cout << "wrote " << (fs::path(o.out) / name).string() << "\n";
}

FlowConfig load_flow_config(const CommonOpts& o) {
  FlowConfig cfg = FlowConfig::from_file(o.config);
  if (o.seed_set) cfg.seed = o.seed;
  if (!o.out.empty()) cfg.out_dir = o.out;
  return cfg;
}

SurrogateCoefficients load_coeffs(const std::string& path) {
  if (path.empty()) return SurrogateCoefficients{};
  return SurrogateCoefficients::from_config(KeyValueConfig::from_file(path));
}

// ---- dtco ----

int cmd_dtco_sweep(const CommonOpts& o, const std::string& arch_s, const std::string& pat_s) {
  SurrogateCoefficients c = load_coeffs(o.config);
  Arch arch = arch_from_string(arch_s);
  auto points = sweep(arch, c, {}, pattern_from_string(pat_s));
  emit(o, "dtco_sweep_" + arch_s + ".csv", sweep_report_csv(points));
  if (o.svg) {
    auto frontier = pareto_frontier(points);
    emit(o, "dtco_pareto_" + arch_s + ".svg", pareto_svg(points, frontier, min_edp(points)));
  }
  DeviceMetrics best = min_edp(points);
  std::cout << "min-EDP " << arch_s << ": lg=" << best.params.lg_nm
            << " sp=" << best.params.sp_gs_nm << " sheets=" << best.params.n_sheets
            << " vdd=" << best.params.vdd << " edp=" << fmt_double(best.edp, 6) << "\n";
  return 0;
}

int cmd_dtco_pareto(const CommonOpts& o, const std::string& arch_s, const std::string& pat_s) {
  SurrogateCoefficients c = load_coeffs(o.config);
  Arch arch = arch_from_string(arch_s);
  auto points = sweep(arch, c, {}, pattern_from_string(pat_s));
  auto frontier = pareto_frontier(points);
  emit(o, "dtco_pareto_" + arch_s + ".csv", sweep_report_csv(frontier));
  if (o.svg)
    emit(o, "dtco_pareto_" + arch_s + ".svg", pareto_svg(points, frontier, min_edp(points)));
  return 0;
}

int cmd_dtco_variants(const CommonOpts& o) {
  SurrogateCoefficients c = load_coeffs(o.config);
  auto rows = variant_metrics(c);
  std::ostringstream csv;
  csv << "variant,r_eff_kohm,c_eff_ff,energy_fj,delay_ps,edp\n";
  for (const VariantRow& r : rows)
    csv << r.label << ',' << fmt_double(r.metrics.r_eff_kohm, 6) << ','
        << fmt_double(r.metrics.c_eff_ff, 6) << ',' << fmt_double(r.metrics.energy_fj, 6)
        << ',' << fmt_double(r.metrics.delay_ps, 6) << ',' << fmt_double(r.metrics.edp, 6)
        << "\n";
  emit(o, "dtco_variants.csv", csv.str());
  return 0;
}

int cmd_dtco_characterize(const CommonOpts& o, const std::string& skeleton_path,
                          const std::string& out_file) {
  SurrogateCoefficients c = load_coeffs(o.config);
  LibrarySkeleton skel = load_skeleton(read_file(skeleton_path));
  CellLibrary lib = characterize_library(c, skel);
  fs::create_directories(fs::path(out_file).parent_path().empty()
                             ? "."
                             : fs::path(out_file).parent_path().string());
  write_file(out_file, serialize_library(lib));
  std::cout << "wrote " << out_file << " (" << lib.masters().size() << " masters)\n";
  return 0;
}

// ---- sideplan ----

int cmd_sideplan(const CommonOpts& o, const std::string& mode) {
  FlowConfig cfg = load_flow_config(o);
  FlowInputs in = FlowInputs::load(cfg);
  Netlist nl = parse_netlist(in.design_text, in.library, cfg.arch, cfg.pattern);
  auto clusters = cluster_cells(nl, cfg.cluster);
  if (mode == "cluster") {
    BalanceReport r = balance_report(nl, &clusters);
    emit(o, "clusters.json", balance_report_json(r));
    return 0;
  }
  if (mode == "assign") {
    if (cfg.arch == Arch::CFET) {
      for (const CellInstance& c : nl.cells()) nl.cell(c.id).flavor = Flavor::TI;
    } else {
      assign_flavors(nl, clusters);
    }
    emit(o, "flavored.net", serialize_netlist(nl));
    emit(o, "balance.json", balance_report_json(balance_report(nl, &clusters)));
    return 0;
  }
  if (mode == "report") {
    // report the design as loaded; flavors come from the netlist file
    emit(o, "balance.json", balance_report_json(balance_report(nl, &clusters)));
    return 0;
  }
  throw Error("unknown sideplan mode: " + mode);
}

// ---- pnr ----

int cmd_pnr(const CommonOpts& o, const std::string& mode) {
  FlowConfig cfg = load_flow_config(o);
  FlowInputs in = FlowInputs::load(cfg);
  FlowResult r = run_flow(cfg, in, cfg.clock_start_ps);
  const FlowPhysical& ph = r.physical;

  if (mode == "place") {
    std::ostringstream dump;
    dump << "core " << fmt_double(ph.placement.fp.core_w_nm, 1) << " x "
         << fmt_double(ph.placement.fp.core_h_nm, 1) << " nm, rows=" << ph.placement.fp.rows
         << " cols=" << ph.placement.fp.cols << "\n";
    for (const auto& [id, loc] : ph.placement.cells)
      dump << "place " << id << " " << loc.row << " " << loc.col << "\n";
    emit(o, "placement.txt", dump.str());
    std::cout << "hpwl_um=" << fmt_double(total_hpwl_um(ph.netlist, ph.placement), 3) << "\n";
    return 0;
  }
  if (mode == "cts") {
    std::ostringstream dump;
    dump << "buffers=" << ph.clock_tree.buffers.size() << " sinks="
         << ph.clock_tree.sinks.size() << " skew_ps=" << fmt_double(ph.clock_tree.skew_ps, 4)
         << " flips=" << ph.clock_flips << "\n";
    for (const ClockSink& s : ph.clock_tree.sinks)
      dump << "sink " << s.pin.str() << " insertion_ps=" << fmt_double(s.insertion_ps, 4)
           << "\n";
    emit(o, "cts.txt", dump.str());
    return 0;
  }
  if (mode == "route") {
    emit(o, "routes.txt", routing_dump(ph.routing));
    emit(o, "wirelength.csv", wirelength_csv(wirelength_by_layer_combined(ph.routing)));
    std::cout << "overflow=" << ph.routing.overflow_total()
              << " wirelength_um=" << fmt_double(ph.routing.total_wirelength_um(), 3)
              << " datapath_flips=" << ph.datapath_flips << "\n";
    if (o.svg) {
      for (const LayerSpec& l : ph.routing.stack().layers)
        if (l.allow == LayerUse::Signal)
          emit(o, "congestion_" + l.name + ".svg", congestion_svg(ph.routing, l.name));
      emit(o, "wirelength.svg", wirelength_svg(wirelength_by_layer_combined(ph.routing)));
    }
    return 0;
  }
  throw Error("unknown pnr mode: " + mode);
}

// ---- flow ----

int cmd_flow_run(const CommonOpts& o, double period) {
  FlowConfig cfg = load_flow_config(o);
  FlowInputs in = FlowInputs::load(cfg);
  double p = period > 0 ? period : cfg.clock_start_ps;
  FlowResult r = run_flow(cfg, in, p);
  emit(o, "flow_run.csv", flow_csv(r));
  emit(o, "final.net", serialize_netlist(r.physical.netlist));

  TimingResult t = sta(r.physical.netlist, r.physical.routing, r.physical.placement,
                       r.physical.clock_tree, p, cfg.analysis);
  EnergyResult e = energy(r.physical.netlist, r.physical.routing, in.vdd, p, cfg.analysis);
  emit(o, "timing.csv", timing_csv(t));
  emit(o, "timing.json", timing_json(t));
  emit(o, "energy.csv", energy_csv(e));
  emit(o, "energy.json", energy_json(e));
  if (o.svg) {
    emit(o, "breakdown.svg", breakdown_svg(delay_breakdown(t), e));
    emit(o, "wirelength.svg", wirelength_svg(wirelength_by_layer_combined(r.physical.routing)));
    emit(o, "area.svg", area_svg(area_report(r.physical.netlist, r.physical.netlist)));
  }
  const FlowRow& row = r.rows[0];
  std::cout << "period=" << p << " achieved=" << fmt_double(row.achieved_delay_ps, 3)
            << " energy_fj=" << fmt_double(row.energy_fj, 3) << " overflow=" << row.overflow
            << " valid=" << (row.valid ? "yes" : "no:" + row.invalid_reason) << "\n";
  return 0;
}

int cmd_flow_sweep(const CommonOpts& o) {
  FlowConfig cfg = load_flow_config(o);
  FlowInputs in = FlowInputs::load(cfg);
  FlowResult r = clock_sweep(cfg, in);
  emit(o, "sweep.csv", flow_csv(r));
  if (o.svg) emit(o, "sweep.svg", sweep_svg(r));
  if (r.min_edp_row) {
    const FlowRow& b = r.rows[*r.min_edp_row];
    std::cout << "min-EDP row: period=" << b.target_period_ps
              << " achieved=" << fmt_double(b.achieved_delay_ps, 3)
              << " edp=" << fmt_double(b.edp, 3) << "\n";
  } else {
    std::cout << "min-EDP row: none valid\n";
  }
  return 0;
}

int cmd_flow_compare(const CommonOpts& o, const std::vector<std::string>& config_paths) {
  std::vector<FlowConfig> cfgs;
  for (const std::string& p : config_paths) {
    FlowConfig c = FlowConfig::from_file(p);
    if (o.seed_set) c.seed = o.seed;
    cfgs.push_back(std::move(c));
  }
  ArchComparison cmp = compare_architectures(cfgs);
  emit(o, "compare.csv", comparison_csv(cmp));
  std::cout << comparison_csv(cmp);
  return 0;
}

// ---- report ----

int cmd_report_emit(const CommonOpts& o) {
  // regenerate plots from a sweep.csv produced by `flow sweep`
  std::string csv = read_file((fs::path(o.out) / "sweep.csv").string());
  FlowResult r;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    auto f = split_on(line, ',');
    if (f.size() < 11) continue;
    FlowRow row;
    row.target_period_ps = std::stod(f[0]);
    row.achieved_delay_ps = std::stod(f[1]);
    row.avg_slack_ps = std::stod(f[2]);
    row.worst_slack_ps = std::stod(f[3]);
    row.skew_ps = std::stod(f[4]);
    row.overflow = std::stoll(f[5]);
    row.energy_fj = std::stod(f[6]);
    row.edp = std::stod(f[7]);
    row.valid = f[8] == "1";
    row.invalid_reason = f[9];
    if (f[10] == "1") r.min_edp_row = r.rows.size();
    r.rows.push_back(row);
  }
  if (!r.min_edp_row) {
    for (std::size_t i = 0; i < r.rows.size(); ++i)
      if (r.rows[i].valid && (!r.min_edp_row || r.rows[i].edp < r.rows[*r.min_edp_row].edp))
        r.min_edp_row = i;
  }
  emit(o, "sweep.svg", sweep_svg(r));
  return 0;
}

// ---- fixtures ----

int cmd_fixtures(const CommonOpts& o) {
  fs::create_directories(o.out);
  emit(o, "adder16.net", make_ripple_adder(16));
  emit(o, "mult8.net", make_array_multiplier(8));
  emit(o, "crypto.net", make_crypto_round(48, 10, 7));
  emit(o, "congested.net", make_congested(3500, 11));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"double-side-routing physical design toolkit"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string arch_s = "OMNI", pat_s = "SIO", mode, skeleton_path, out_file;
  double period = 0.0;
  std::vector<std::string> compare_configs;

  auto* dtco = app.add_subcommand("dtco", "device design-space exploration");
  dtco->require_subcommand(1);
  auto* d_sweep = dtco->add_subcommand("sweep", "evaluate the full design space");
  add_common(d_sweep, o);
  d_sweep->add_option("--arch", arch_s, "CFET|OMNI|OMNI_NOIM");
  d_sweep->add_option("--pattern", pat_s, "SIO|DI|DO|DIDO");
  auto* d_pareto = dtco->add_subcommand("pareto", "emit the energy/delay frontier");
  add_common(d_pareto, o);
  d_pareto->add_option("--arch", arch_s, "CFET|OMNI|OMNI_NOIM");
  d_pareto->add_option("--pattern", pat_s, "SIO|DI|DO|DIDO");
  auto* d_var = dtco->add_subcommand("variants", "min-EDP variant table");
  add_common(d_var, o);
  auto* d_char = dtco->add_subcommand("characterize", "generate the cell library");
  add_common(d_char, o);
  d_char->add_option("--skeleton", skeleton_path, "skeleton file")->required();
  d_char->add_option("--lib-out", out_file, "library output path")->required();

  auto* sp = app.add_subcommand("sideplan", "clustering and flavor assignment");
  sp->require_subcommand(1);
  for (const char* m : {"cluster", "assign", "report"}) {
    auto* c = sp->add_subcommand(m);
    add_common(c, o);
  }

  auto* pnr = app.add_subcommand("pnr", "place, cts, route");
  pnr->require_subcommand(1);
  for (const char* m : {"place", "cts", "route"}) {
    auto* c = pnr->add_subcommand(m);
    add_common(c, o);
  }

  auto* flow = app.add_subcommand("flow", "end-to-end flow");
  flow->require_subcommand(1);
  auto* f_run = flow->add_subcommand("run", "single target period");
  add_common(f_run, o);
  f_run->add_option("--period", period, "target period ps (default: clock_start_ps)");
  auto* f_sweep = flow->add_subcommand("sweep", "clock period sweep");
  add_common(f_sweep, o);
  auto* f_cmp = flow->add_subcommand("compare", "architecture comparison");
  f_cmp->add_option("--config", compare_configs, "flow configs (repeat per arch)")->required();
  f_cmp->add_option("--out", o.out, "output directory");
  f_cmp->add_option("--seed", o.seed, "seed override")->each([&o](const std::string&) {
    o.seed_set = true;
  });

  auto* rep = app.add_subcommand("report", "re-emit reports from artifacts");
  auto* r_emit = rep->add_subcommand("emit");
  add_common(r_emit, o, false);

  auto* fix = app.add_subcommand("fixtures", "regenerate shipped fixture netlists");
  auto* fx_gen = fix->add_subcommand("gen");
  fx_gen->add_option("--out", o.out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (d_sweep->parsed()) return cmd_dtco_sweep(o, arch_s, pat_s);
    if (d_pareto->parsed()) return cmd_dtco_pareto(o, arch_s, pat_s);
    if (d_var->parsed()) return cmd_dtco_variants(o);
    if (d_char->parsed()) return cmd_dtco_characterize(o, skeleton_path, out_file);
    if (sp->parsed()) {
      mode = sp->get_subcommands().at(0)->get_name();
      return cmd_sideplan(o, mode);
    }
    if (pnr->parsed()) {
      mode = pnr->get_subcommands().at(0)->get_name();
      return cmd_pnr(o, mode);
    }
    if (f_run->parsed()) return cmd_flow_run(o, period);
    if (f_sweep->parsed()) return cmd_flow_sweep(o);
    if (f_cmp->parsed()) return cmd_flow_compare(o, compare_configs);
    if (r_emit->parsed()) return cmd_report_emit(o);
    if (fx_gen->parsed()) return cmd_fixtures(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
