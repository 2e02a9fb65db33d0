#include "omnipd/dtco.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace omnipd {

std::string to_string(Feasibility f) {
  switch (f) {
    case Feasibility::Ok: return "ok";
    case Feasibility::ContactTooShort: return "contact_too_short";
    case Feasibility::LeakageUnmeetable: return "leakage_unmeetable";
  }
  return "?";
}

bool DeviceParams::operator==(const DeviceParams& o) const {
  return lg_nm == o.lg_nm && sp_gs_nm == o.sp_gs_nm && n_sheets == o.n_sheets &&
         vdd == o.vdd && arch == o.arch && pattern == o.pattern;
}

bool DeviceParams::operator<(const DeviceParams& o) const {
  if (lg_nm != o.lg_nm) return lg_nm < o.lg_nm;
  if (sp_gs_nm != o.sp_gs_nm) return sp_gs_nm < o.sp_gs_nm;
  if (n_sheets != o.n_sheets) return n_sheets < o.n_sheets;
  return vdd < o.vdd;
}

SurrogateCoefficients SurrogateCoefficients::from_config(const KeyValueConfig& cfg) {
  SurrogateCoefficients c;
  c.r_contact_cfet = cfg.get_double("r_contact_cfet", c.r_contact_cfet);
  c.r_contact_omni = cfg.get_double("r_contact_omni", c.r_contact_omni);
  c.r_channel_per_lg = cfg.get_double("r_channel_per_lg", c.r_channel_per_lg);
  c.channel_thickness_nm = cfg.get_double("channel_thickness_nm", c.channel_thickness_nm);
  c.c_gate_aerial = cfg.get_double("c_gate_aerial", c.c_gate_aerial);
  c.c_par_gs = cfg.get_double("c_par_gs", c.c_par_gs);
  c.c_im_fixed = cfg.get_double("c_im_fixed", c.c_im_fixed);
  c.c_tallvia_fixed = cfg.get_double("c_tallvia_fixed", c.c_tallvia_fixed);
  c.c_wire_per_um = cfg.get_double("c_wire_per_um", c.c_wire_per_um);
  c.wire_load_um = cfg.get_double("wire_load_um", c.wire_load_um);
  c.fo3_factor = cfg.get_double("fo3_factor", c.fo3_factor);
  c.ceff_delta_do = cfg.get_double("ceff_delta_do", c.ceff_delta_do);
  c.ceff_delta_di = cfg.get_double("ceff_delta_di", c.ceff_delta_di);
  c.i0_leak = cfg.get_double("i0_leak", c.i0_leak);
  c.ss_v_dec = cfg.get_double("ss_v_dec", c.ss_v_dec);
  c.i_leak_target = cfg.get_double("i_leak_target", c.i_leak_target);
  c.od_ref_v = cfg.get_double("od_ref_v", c.od_ref_v);
  c.alpha = cfg.get_double("alpha", c.alpha);
  c.im_input_share = cfg.get_double("im_input_share", c.im_input_share);
  c.tallvia_input_share = cfg.get_double("tallvia_input_share", c.tallvia_input_share);
  c.internal_cap_share = cfg.get_double("internal_cap_share", c.internal_cap_share);
  c.validate();
  return c;
}

void SurrogateCoefficients::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0)) throw ValidationError(std::string("coefficient must be positive: ") + name);
  };
  positive(r_contact_cfet, "r_contact_cfet");
  positive(r_contact_omni, "r_contact_omni");
  positive(r_channel_per_lg, "r_channel_per_lg");
  positive(channel_thickness_nm, "channel_thickness_nm");
  positive(c_gate_aerial, "c_gate_aerial");
  positive(c_par_gs, "c_par_gs");
  positive(c_im_fixed, "c_im_fixed");
  positive(c_tallvia_fixed, "c_tallvia_fixed");
  positive(c_wire_per_um, "c_wire_per_um");
  positive(fo3_factor, "fo3_factor");
  positive(i0_leak, "i0_leak");
  positive(ss_v_dec, "ss_v_dec");
  positive(i_leak_target, "i_leak_target");
  positive(od_ref_v, "od_ref_v");
  if (wire_load_um < 0) throw ValidationError("wire_load_um must be >= 0");
  if (alpha <= 0) throw ValidationError("alpha must be positive");
}

double SurrogateCoefficients::ceff_pattern_delta(PinAccess p) const {
  switch (p) {
    case PinAccess::SIO: return 0.0;
    case PinAccess::DO: return ceff_delta_do;
    case PinAccess::DI: return ceff_delta_di;
    case PinAccess::DIDO: return ceff_delta_do + ceff_delta_di;
  }
  return 0.0;
}

std::vector<DeviceParams> enumerate_design_space(Arch arch, const DesignSpace& space,
                                                 PinAccess pattern) {
  const ArchInfo info = ArchInfo::of(arch);
  std::vector<DeviceParams> out;
  for (double lg : space.lg_nm)
    for (double sp : space.sp_gs_nm)
      for (int n : space.n_sheets)
        for (double v : space.vdd) {
          DeviceParams p;
          p.lg_nm = lg;
          p.sp_gs_nm = sp;
          p.n_sheets = n;
          p.vdd = v;
          p.arch = arch;
          p.pattern = pattern;
          p.w_ch_nm = info.w_ch_nm;
          if (arch == Arch::CFET) {
            p.sd_via_space_nm = 9.0;
            p.sd_bpr_space_nm = 3.0;
          }
          out.push_back(p);
        }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double retarget_vt(const DeviceParams& p, const SurrogateCoefficients& c) {
  if (c.i0_leak <= 0 || c.ss_v_dec <= 0 || c.i_leak_target <= 0)
    throw ValidationError("retarget_vt: non-positive coefficient");
  return c.ss_v_dec * std::log10(c.i0_leak * p.w_eff_nm() / c.i_leak_target);
}

Feasibility check_feasibility(const DeviceParams& p, const SurrogateCoefficients& c) {
  if (p.contact_len_nm() < 10.0) return Feasibility::ContactTooShort;
  if (retarget_vt(p, c) > p.vdd) return Feasibility::LeakageUnmeetable;
  return Feasibility::Ok;
}

DeviceMetrics ro_metrics(const DeviceParams& p, const SurrogateCoefficients& c) {
  Feasibility f = check_feasibility(p, c);
  if (f != Feasibility::Ok)
    throw ValidationError("ro_metrics on infeasible point: " + to_string(f));

  DeviceMetrics m;
  m.params = p;
  m.feasible = Feasibility::Ok;
  m.vt = retarget_vt(p, c);

  const double w_eff = p.w_eff_nm();
  const double overdrive = p.vdd - m.vt;
  const double penalty = std::pow(c.od_ref_v / overdrive, c.alpha);
  const double r_ohm = (c.r_contact(p.arch) / w_eff + c.r_channel_per_lg * p.lg_nm / w_eff) *
                       penalty;
  m.r_eff_kohm = r_ohm * 1e-3;

  const ArchInfo info = ArchInfo::of(p.arch);
  double c_sio = c.c_gate_aerial * p.lg_nm * w_eff * c.fo3_factor +
                 c.c_par_gs * w_eff / p.sp_gs_nm + c.c_wire_per_um * c.wire_load_um;
  if (info.has_im) c_sio += c.c_im_fixed;
  if (p.arch == Arch::CFET) c_sio += c.c_tallvia_fixed;
  m.c_eff_ff = c_sio * (1.0 + c.ceff_pattern_delta(p.pattern));

  m.energy_fj = m.c_eff_ff * p.vdd * p.vdd;
  m.delay_ps = 0.69 * m.r_eff_kohm * m.c_eff_ff;
  m.edp = m.energy_fj * m.delay_ps;
  return m;
}

std::vector<DeviceMetrics> sweep(Arch arch, const SurrogateCoefficients& c,
                                 const DesignSpace& space, PinAccess pattern) {
  std::vector<DeviceMetrics> out;
  for (const DeviceParams& p : enumerate_design_space(arch, space, pattern)) {
    Feasibility f = check_feasibility(p, c);
    if (f == Feasibility::Ok) {
      out.push_back(ro_metrics(p, c));
    } else {
      DeviceMetrics m;
      m.params = p;
      m.feasible = f;
      m.vt = retarget_vt(p, c);
      out.push_back(m);
    }
  }
  return out;
}

namespace {

bool dominates(const DeviceMetrics& a, const DeviceMetrics& b) {
  return a.energy_fj <= b.energy_fj && a.delay_ps <= b.delay_ps &&
         (a.energy_fj < b.energy_fj || a.delay_ps < b.delay_ps);
}

bool metric_order(const DeviceMetrics& a, const DeviceMetrics& b) {
  if (a.delay_ps != b.delay_ps) return a.delay_ps < b.delay_ps;
  if (a.energy_fj != b.energy_fj) return a.energy_fj < b.energy_fj;
  return a.params < b.params;
}

std::vector<DeviceMetrics> feasible_only(const std::vector<DeviceMetrics>& points) {
  std::vector<DeviceMetrics> out;
  for (const DeviceMetrics& m : points)
    if (m.feasible == Feasibility::Ok) out.push_back(m);
  return out;
}

}  // namespace

std::vector<DeviceMetrics> pareto_frontier(const std::vector<DeviceMetrics>& points) {
  std::vector<DeviceMetrics> feas = feasible_only(points);
  if (feas.empty()) throw ValidationError("pareto_frontier: no feasible points");
  std::vector<DeviceMetrics> out;
  for (const DeviceMetrics& m : feas) {
    bool dominated = false;
    for (const DeviceMetrics& o : feas) {
      if (dominates(o, m)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) out.push_back(m);
  }
  std::sort(out.begin(), out.end(), metric_order);
  return out;
}

DeviceMetrics min_edp(const std::vector<DeviceMetrics>& points) {
  std::vector<DeviceMetrics> feas = feasible_only(points);
  if (feas.empty()) throw ValidationError("min_edp: no feasible points");
  const DeviceMetrics* best = &feas[0];
  for (const DeviceMetrics& m : feas) {
    if (m.edp < best->edp || (m.edp == best->edp && metric_order(m, *best))) best = &m;
  }
  return *best;
}

std::vector<VariantRow> variant_metrics(const SurrogateCoefficients& c,
                                        const DesignSpace& space) {
  DeviceMetrics base = min_edp(sweep(Arch::Omni3D, c, space, PinAccess::SIO));
  std::vector<VariantRow> rows;
  auto at = [&](Arch arch, PinAccess pat) {
    DeviceParams p = base.params;
    p.arch = arch;
    p.pattern = pat;
    p.w_ch_nm = ArchInfo::of(arch).w_ch_nm;
    if (arch == Arch::CFET) {
      p.sd_via_space_nm = 9.0;
      p.sd_bpr_space_nm = 3.0;
      p.pattern = PinAccess::SIO;
    }
    return ro_metrics(p, c);
  };
  rows.push_back({"CFET", at(Arch::CFET, PinAccess::SIO)});
  rows.push_back({"SIO", base});
  rows.push_back({"DO", at(Arch::Omni3D, PinAccess::DO)});
  rows.push_back({"DI", at(Arch::Omni3D, PinAccess::DI)});
  rows.push_back({"DIDO", at(Arch::Omni3D, PinAccess::DIDO)});
  rows.push_back({"noIM", at(Arch::Omni3DNoIM, PinAccess::SIO)});
  return rows;
}

const SkeletonCell* LibrarySkeleton::find(const std::string& name) const {
  for (const SkeletonCell& c : cells)
    if (c.name == name) return &c;
  return nullptr;
}

LibrarySkeleton load_skeleton(const std::string& text) {
  LibrarySkeleton skel;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks[0] == "param") {
      for (std::size_t i = 1; i < toks.size(); ++i) {
        auto eq = toks[i].find('=');
        std::string k = toks[i].substr(0, eq), v = toks[i].substr(eq + 1);
        if (k == "cgp_nm") skel.cgp_nm = std::stod(v);
        if (k == "track_pitch_nm") skel.track_pitch_nm = std::stod(v);
      }
      continue;
    }
    if (toks[0] != "cell") throw ParseError(lineno, "unknown statement: " + toks[0]);
    SkeletonCell c;
    c.name = toks[1];
    for (std::size_t i = 2; i < toks.size(); ++i) {
      auto eq = toks[i].find('=');
      if (eq == std::string::npos) throw ParseError(lineno, "expected key=value: " + toks[i]);
      std::string k = toks[i].substr(0, eq), v = toks[i].substr(eq + 1);
      if (k == "widths") {
        auto w = split_on(v, ',');
        if (w.size() != 3) throw ParseError(lineno, "widths=<cfet,omni,noim>");
        c.width_cfet = std::stoi(w[0]);
        c.width_omni = std::stoi(w[1]);
        c.width_noim = std::stoi(w[2]);
      } else if (k == "pins") {
        for (const auto& group : split_on(v, ';')) {
          auto colon = group.find(':');
          auto pins = split_on(group.substr(colon + 1), ',');
          if (group.rfind("in:", 0) == 0)
            c.input_pins = pins;
          else
            c.output_pins = pins;
        }
      } else if (k == "rdrive_f")
        c.rdrive_factor = std::stod(v);
      else if (k == "cin_f")
        c.cin_factor = std::stod(v);
      else if (k == "cout_f")
        c.cout_factor = std::stod(v);
      else if (k == "eint_f")
        c.eint_factor = std::stod(v);
      else if (k == "tint_f")
        c.tint_factor = std::stod(v);
      else if (k == "setup_f")
        c.setup_factor = std::stod(v);
      else if (k == "leak_f")
        c.leak_factor = std::stod(v);
      else if (k == "seq")
        c.is_sequential = v == "1";
      else if (k == "ckbuf")
        c.is_clock_buffer = v == "1";
      else if (k == "imviaonly")
        c.im_via_only = v == "1";
      else if (k == "clk")
        c.clock_pin = v;
      else
        throw ParseError(lineno, "unknown skeleton field: " + k);
    }
    if (c.input_pins.empty() && c.output_pins.empty())
      throw ParseError(lineno, "cell " + c.name + " has no pins");
    skel.cells.push_back(std::move(c));
  }
  return skel;
}

namespace {

struct InvBase {
  double gate_ff;      // one gate's input capacitance (both FETs)
  double par_ff;       // drain-side gate-to-S/D parasitic
  double fixed_in_ff;  // IM or tall-via share on the input pin
  double fixed_out_ff;
  double r_drive_kohm;
  double tint_ps;
  double e_int_fj;
  double leak_na;

  double cap_in(bool with_fixed) const { return gate_ff + (with_fixed ? fixed_in_ff : 0.0); }
  double cap_out(bool with_fixed) const { return par_ff + (with_fixed ? fixed_out_ff : 0.0); }
};

InvBase inv_base(const DeviceMetrics& point, const SurrogateCoefficients& c) {
  const DeviceParams& p = point.params;
  const double w_eff = p.w_eff_nm();

  InvBase b;
  b.gate_ff = c.c_gate_aerial * p.lg_nm * w_eff;
  b.par_ff = c.c_par_gs * w_eff / p.sp_gs_nm;
  // noIM keeps the IM-share terms for cells that used IM for real routing
  // (the tracks move into M1); only via-stack users shed them.
  if (p.arch == Arch::CFET) {
    b.fixed_in_ff = c.tallvia_input_share * c.c_tallvia_fixed;
    b.fixed_out_ff = (1.0 - c.tallvia_input_share) * c.c_tallvia_fixed;
  } else {
    b.fixed_in_ff = c.im_input_share * c.c_im_fixed;
    b.fixed_out_ff = (1.0 - c.im_input_share) * c.c_im_fixed;
  }
  b.r_drive_kohm = point.r_eff_kohm;
  b.tint_ps = 0.69 * b.r_drive_kohm * (b.par_ff + b.fixed_out_ff);
  b.e_int_fj = c.internal_cap_share * (b.gate_ff + b.par_ff) * p.vdd * p.vdd;
  b.leak_na = 2.0 * c.i_leak_target * 1e9 / 2.0;  // one of the n/p pair leaks per state
  return b;
}

int width_for(const SkeletonCell& s, Arch a) {
  switch (a) {
    case Arch::CFET: return s.width_cfet;
    case Arch::Omni3D: return s.width_omni;
    case Arch::Omni3DNoIM: return s.width_noim;
  }
  return s.width_omni;
}

}  // namespace

void characterize_arch(CellLibrary& lib, const DeviceMetrics& point,
                       const SurrogateCoefficients& c, const LibrarySkeleton& skel) {
  const Arch arch = point.params.arch;
  const InvBase base = inv_base(point, c);
  std::vector<PinAccess> patterns =
      arch == Arch::CFET ? std::vector<PinAccess>{PinAccess::SIO}
                         : std::vector<PinAccess>{PinAccess::SIO, PinAccess::DO};

  for (const SkeletonCell& s : skel.cells) {
    if (s.rdrive_factor <= 0)
      throw ValidationError("skeleton cell " + s.name + ": missing scale factor");
    for (PinAccess pat : patterns) {
      for (Flavor fl : {Flavor::TI, Flavor::BI}) {
        CellMaster m;
        m.name = s.name;
        m.arch = arch;
        m.pattern = pat;
        m.flavor = fl;
        m.width_gp = width_for(s, arch);
        m.input_pins = s.input_pins;
        m.output_pins = s.output_pins;
        // via-stack-only cells shed the IM share in the noIM variant; the
        // resulting cap_in ratio is the documented 0.933
        bool with_fixed = !(arch == Arch::Omni3DNoIM && s.im_via_only);
        double cin = base.cap_in(with_fixed) * s.cin_factor * pattern_cap_in_mult(pat);
        m.cap_in_ff.assign(s.input_pins.size(), cin);
        m.cap_out_ff = base.cap_out(with_fixed) * s.cout_factor * pattern_cap_out_mult(pat);
        m.r_drive_kohm = base.r_drive_kohm * s.rdrive_factor;
        m.e_internal_fj = base.e_int_fj * s.eint_factor;
        m.intrinsic_delay_ps = base.tint_ps * s.tint_factor;
        m.setup_ps = s.setup_factor > 0 ? base.tint_ps * s.setup_factor : 0.0;
        m.leak_na = base.leak_na * s.leak_factor;
        m.is_sequential = s.is_sequential;
        m.is_clock_buffer = s.is_clock_buffer;
        m.clock_pin = s.clock_pin;
        lib.add(std::move(m));
      }
    }
  }
}

CellLibrary characterize_library(const SurrogateCoefficients& c, const LibrarySkeleton& skel,
                                 const DesignSpace& space) {
  CellLibrary lib;
  lib.cgp_nm = skel.cgp_nm;
  lib.track_pitch_nm = skel.track_pitch_nm;
  for (Arch arch : {Arch::CFET, Arch::Omni3D, Arch::Omni3DNoIM}) {
    DeviceMetrics point = min_edp(sweep(arch, c, space, PinAccess::SIO));
    lib.vdd = point.params.vdd;
    characterize_arch(lib, point, c, skel);
  }
  lib.validate();
  return lib;
}

std::string sweep_report_csv(const std::vector<DeviceMetrics>& points) {
  std::ostringstream out;
  out << "arch,pattern,cgp_nm,w_ch_nm,lg_nm,sp_gs_nm,n_sheets,vdd,contact_len_nm,vt,"
         "feasible,r_eff_kohm,c_eff_ff,energy_fj,delay_ps,edp\n";
  for (const DeviceMetrics& m : points) {
    const DeviceParams& p = m.params;
    out << to_string(p.arch) << ',' << to_string(p.pattern) << ',' << fmt_double(p.cgp_nm, 1)
        << ',' << fmt_double(p.w_ch_nm, 1) << ',' << fmt_double(p.lg_nm, 1) << ','
        << fmt_double(p.sp_gs_nm, 1) << ',' << p.n_sheets << ',' << fmt_double(p.vdd, 2)
        << ',' << fmt_double(p.contact_len_nm(), 1) << ',' << fmt_double(m.vt, 6) << ','
        << to_string(m.feasible) << ',' << fmt_double(m.r_eff_kohm, 6) << ','
        << fmt_double(m.c_eff_ff, 6) << ',' << fmt_double(m.energy_fj, 6) << ','
        << fmt_double(m.delay_ps, 6) << ',' << fmt_double(m.edp, 6) << "\n";
  }
  return out.str();
}

}  // namespace omnipd
