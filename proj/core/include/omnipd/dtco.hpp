#pragma once

#include <optional>
#include <string>
#include <vector>

#include "omnipd/celllib.hpp"
#include "omnipd/config.hpp"

namespace omnipd {

/// One point of the device design space. Fixed geometry (cgp, gate cut,
/// extensions, M1 pitch) ships with defaults; the swept axes are lg,
/// sp_gs, n_sheets and vdd.
struct DeviceParams {
  double cgp_nm = 42.0;
  double lg_nm = 14.0;
  double sp_gs_nm = 9.0;
  double gate_cut_nm = 9.0;
  double gate_ext_nm = 8.5;
  double sd_ext_nm = 0.0;
  double m1_pitch_nm = 18.0;
  double m1_width_nm = 9.0;
  int n_sheets = 1;
  double vdd = 0.45;
  Arch arch = Arch::Omni3D;
  PinAccess pattern = PinAccess::SIO;
  double w_ch_nm = 28.0;
  // CFET-only geometry (absent otherwise)
  std::optional<double> sd_via_space_nm;
  std::optional<double> sd_bpr_space_nm;

  double w_eff_nm() const { return n_sheets * w_ch_nm; }
  double contact_len_nm() const { return cgp_nm - lg_nm - 2.0 * sp_gs_nm; }

  bool operator==(const DeviceParams& o) const;
  /// Lexicographic over (lg, sp_gs, n_sheets, vdd); used for tie-breaks.
  bool operator<(const DeviceParams& o) const;
};

enum class Feasibility { Ok, ContactTooShort, LeakageUnmeetable };
std::string to_string(Feasibility f);

struct DeviceMetrics {
  DeviceParams params;
  double r_eff_kohm = 0.0;
  double c_eff_ff = 0.0;
  double energy_fj = 0.0;   // c_eff * vdd^2
  double delay_ps = 0.0;    // 0.69 * r_eff * c_eff
  double edp = 0.0;         // energy * delay, fJ*ps
  double vt = 0.0;
  Feasibility feasible = Feasibility::Ok;
};

/// Parametric stand-in for the compact transistor model: two-term
/// resistance (contact + channel) with an overdrive penalty, additive
/// capacitance terms, exponential subthreshold leakage. Defaults ship in a
/// provenance-annotated config; they are fitted to reported ratio targets,
/// not absolute claims.
struct SurrogateCoefficients {
  double r_contact_cfet = 62963.3865;  // ohm*nm
  double r_contact_omni = 60000.0;     // ohm*nm
  double r_channel_per_lg = 2500.0;    // ohm*nm per nm of gate length
  double channel_thickness_nm = 1.0;   // thin BEOL channel (Si would be ~5)
  double c_gate_aerial = 6.0e-4;       // fF/nm^2
  double c_par_gs = 0.05;              // fF at W_eff == sp_gs
  double c_im_fixed = 0.0596649;       // fF, removed in noIM
  double c_tallvia_fixed = 0.2528451;  // fF, CFET only
  double c_wire_per_um = 0.20;         // fF/um
  double wire_load_um = 1.0;
  double fo3_factor = 4.0;             // driver gate + 3 fanout gates
  double ceff_delta_do = 0.056;        // RO-level Ceff penalty vs SIO
  double ceff_delta_di = 0.112;
  double i0_leak = 2.3424278964e-8;    // A per nm width at vt = 0
  double ss_v_dec = 0.080;             // subthreshold swing, V/decade
  double i_leak_target = 2.0e-9;       // A per FET
  double od_ref_v = 0.25;              // overdrive normalization
  double alpha = 1.0;                  // r ~ 1/(vdd-vt)^alpha
  // cell characterization shares (see characterize_library)
  double im_input_share = 0.28305;
  double tallvia_input_share = 0.30;
  double internal_cap_share = 0.35;

  static SurrogateCoefficients from_config(const KeyValueConfig& cfg);
  void validate() const;  // all positive where required

  double r_contact(Arch a) const {
    return a == Arch::CFET ? r_contact_cfet : r_contact_omni;
  }
  double ceff_pattern_delta(PinAccess p) const;
};

/// Swept axis domains. Defaults are the shipped design space.
struct DesignSpace {
  std::vector<double> lg_nm = {14, 15, 16, 17};
  std::vector<double> sp_gs_nm = {5, 7, 9};
  std::vector<int> n_sheets = {1, 2, 3, 4};
  std::vector<double> vdd = {0.45, 0.5, 0.55, 0.6, 0.65, 0.7};
};

/// Full Cartesian product for one architecture, sorted, deduplicated.
std::vector<DeviceParams> enumerate_design_space(Arch arch, const DesignSpace& space = {},
                                                 PinAccess pattern = PinAccess::SIO);

/// Contact-length and leakage-retarget gates.
Feasibility check_feasibility(const DeviceParams& p, const SurrogateCoefficients& c);

/// Closed-form threshold retarget: vt = ss * log10(i0 * W_eff / i_target).
double retarget_vt(const DeviceParams& p, const SurrogateCoefficients& c);

/// Wire-loaded FO3 ring-oscillator stage metrics at a feasible point.
DeviceMetrics ro_metrics(const DeviceParams& p, const SurrogateCoefficients& c);

/// Evaluates every point; infeasible points carry their reason and no metrics.
std::vector<DeviceMetrics> sweep(Arch arch, const SurrogateCoefficients& c,
                                 const DesignSpace& space = {},
                                 PinAccess pattern = PinAccess::SIO);

/// Non-dominated subset in (energy, delay), delay ascending, ties by lower
/// energy then lexicographic params. Throws on empty input.
std::vector<DeviceMetrics> pareto_frontier(const std::vector<DeviceMetrics>& points);

/// Argmin of EDP among feasible points, pareto tie-break.
DeviceMetrics min_edp(const std::vector<DeviceMetrics>& points);

struct VariantRow {
  std::string label;  // SIO, DO, DI, DIDO, noIM, CFET
  DeviceMetrics metrics;
};

/// Metric table of the min-EDP Omni 3D point across pin-access patterns and
/// the noIM option, plus the CFET reference row.
std::vector<VariantRow> variant_metrics(const SurrogateCoefficients& c,
                                        const DesignSpace& space = {});

/// Structural library description used to generate electrical data: cell
/// widths per architecture and per-cell scale factors relative to INV.
struct SkeletonCell {
  std::string name;
  int width_cfet = 1, width_omni = 1, width_noim = 1;
  std::vector<std::string> input_pins, output_pins;
  double rdrive_factor = 1.0;
  double cin_factor = 1.0;
  double cout_factor = 1.0;
  double eint_factor = 1.0;
  double tint_factor = 1.0;
  double setup_factor = 0.0;   // sequential only, relative to INV tint
  double leak_factor = 1.0;    // FET stacks relative to INV
  bool is_sequential = false;
  bool is_clock_buffer = false;
  bool im_via_only = false;    // IM used only as a via stack (INV/BUF family)
  std::string clock_pin;
};

struct LibrarySkeleton {
  double cgp_nm = 42.0;
  double track_pitch_nm = 18.0;
  std::vector<SkeletonCell> cells;

  const SkeletonCell* find(const std::string& name) const;
};

LibrarySkeleton load_skeleton(const std::string& text);

/// Fills every master's electrical data from the min-EDP points of each
/// architecture, applying pattern and IM deltas. Patterns emitted: SIO + DO
/// for the Omni variants, SIO for CFET; both flavors everywhere.
CellLibrary characterize_library(const SurrogateCoefficients& c, const LibrarySkeleton& skel,
                                 const DesignSpace& space = {});

/// Same, for one architecture at an explicit design point.
void characterize_arch(CellLibrary& lib, const DeviceMetrics& point,
                       const SurrogateCoefficients& c, const LibrarySkeleton& skel);

std::string sweep_report_csv(const std::vector<DeviceMetrics>& points);

}  // namespace omnipd
