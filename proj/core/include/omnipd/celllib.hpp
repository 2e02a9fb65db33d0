#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "omnipd/common.hpp"

namespace omnipd {

enum class Arch { CFET, Omni3D, Omni3DNoIM };
enum class PinAccess { SIO, DI, DO, DIDO };
enum class Flavor { TI, BI, Unassigned };
enum class Side { Top, Bottom };
enum class PdnStyle { Backside, Split };

std::string to_string(Arch a);
std::string to_string(PinAccess p);
std::string to_string(Flavor f);
std::string to_string(Side s);
Arch arch_from_string(const std::string& s);
PinAccess pattern_from_string(const std::string& s);
Flavor flavor_from_string(const std::string& s);

inline Flavor opposite(Flavor f) {
  return f == Flavor::TI ? Flavor::BI : Flavor::TI;
}
inline Side flavor_side(Flavor f) {
  return f == Flavor::TI ? Side::Top : Side::Bottom;
}
inline Side other_side(Side s) {
  return s == Side::Top ? Side::Bottom : Side::Top;
}

/// Per-architecture constants. CFET is the 4-track single-side baseline with
/// backside power; the Omni variants are 3-track with a split mirrored PDN.
struct ArchInfo {
  int track_height;
  bool has_im;
  PdnStyle pdn;
  double w_ch_nm;  // channel width: via-space-limited for CFET, gate-extension-defined otherwise

  static ArchInfo of(Arch a);
};

/// Which sides a cell's pins land on, per pin-access pattern.
/// SIO: in and out on the flavor side. DI duplicates inputs, DO duplicates
/// outputs, DIDO duplicates both.
bool input_on_side(PinAccess p, Flavor f, Side s);
bool output_on_side(PinAccess p, Flavor f, Side s);

/// Pin-capacitance multipliers of a pattern relative to the SIO baseline of
/// the same cell. DIDO composes the DO and DI deltas additively.
double pattern_cap_in_mult(PinAccess p);
double pattern_cap_out_mult(PinAccess p);

/// Input-cap ratio of a noIM cell to its IM sibling, for cells that use the
/// interleaved metal only as a via stack (INV/BUF family).
constexpr double kNoImViaOnlyCapInRatio = 0.933;

struct CellMaster {
  std::string name;
  Arch arch = Arch::Omni3D;
  PinAccess pattern = PinAccess::SIO;
  Flavor flavor = Flavor::TI;
  int width_gp = 1;
  int height_tracks = 3;
  std::vector<std::string> input_pins;
  std::vector<std::string> output_pins;
  std::vector<double> cap_in_ff;  // one entry per input pin
  double cap_out_ff = 0.0;
  double r_drive_kohm = 0.0;
  double e_internal_fj = 0.0;
  double intrinsic_delay_ps = 0.0;
  double setup_ps = 0.0;         // sequential cells only
  double leak_na = 0.0;          // total cell leakage current
  std::string clock_pin;         // sequential cells only
  bool is_sequential = false;
  bool is_clock_buffer = false;

  bool has_input(const std::string& pin) const;
  bool has_output(const std::string& pin) const;
  double cap_in(const std::string& pin) const;
  double cap_in_total() const;
  double cap_total() const { return cap_in_total() + cap_out_ff; }
};

class CellLibrary {
 public:
  double cgp_nm = 42.0;
  double track_pitch_nm = 18.0;
  double vdd = 0.45;  // supply of the characterized design point
  std::string version = "1";

  void add(CellMaster m);

  const CellMaster* find(const std::string& name, Arch arch, PinAccess pattern,
                         Flavor flavor) const;
  const CellMaster& get(const std::string& name, Arch arch, PinAccess pattern,
                        Flavor flavor) const;

  /// All masters, sorted by (name, arch, pattern, flavor).
  std::vector<const CellMaster*> masters() const;
  std::vector<std::string> cell_names() const;
  bool has_cell(const std::string& name, Arch arch) const;

  /// Load-time checks: flavor counterparts, non-negative caps, pattern
  /// deltas of non-SIO rows against their SIO siblings (0.5% tolerance).
  void validate() const;

 private:
  using Key = std::tuple<std::string, int, int, int>;
  std::map<Key, CellMaster> masters_;
};

CellLibrary load_library(const std::string& text);
std::string serialize_library(const CellLibrary& lib);

/// Footprint in nm^2: width_gp * CGP x height_tracks * track pitch.
double cell_area_nm2(const CellMaster& m, const CellLibrary& lib);

/// cell_area(name@archA) / cell_area(name@archB), pattern-independent.
double area_ratio(const CellLibrary& lib, const std::string& name, Arch a, Arch b);

}  // namespace omnipd
