#include <algorithm>
#include <cmath>
#include <set>

#include "omnipd/layout.hpp"

namespace omnipd {

Floorplan build_floorplan(const Netlist& nl, const CellLibrary& lib, double utilization) {
  if (utilization <= 0.4 || utilization > 0.95)
    throw ValidationError("utilization out of range (0.4, 0.95]");
  if (nl.cells().empty()) throw ValidationError("build_floorplan: empty netlist");

  double cell_area = 0.0;
  for (const CellInstance& c : nl.cells()) cell_area += cell_area_nm2(nl.master_of(c), lib);

  Floorplan fp;
  fp.utilization = utilization;
  fp.site_w_nm = lib.cgp_nm;
  fp.row_h_nm = ArchInfo::of(nl.arch()).track_height * lib.track_pitch_nm;

  const double target = cell_area / utilization;

  // columns snap to a multiple of the widest master so rows pack without
  // structural fragmentation (a 14-GP flop would otherwise strand the tail
  // of every row)
  int widest = 1;
  long long width_sites = 0;
  for (const CellInstance& c : nl.cells()) {
    widest = std::max(widest, nl.master_of(c).width_gp);
    width_sites += nl.master_of(c).width_gp;
  }
  int cols_raw = std::max(1, static_cast<int>(std::lround(std::sqrt(target) / fp.site_w_nm)));
  fp.cols = std::max(widest,
                     static_cast<int>(std::lround(double(cols_raw) / widest)) * widest);
  if (fp.cols < widest) fp.cols = widest;
  fp.rows = std::max(1, static_cast<int>(std::ceil(target / (fp.cols * fp.site_w_nm) /
                                                   fp.row_h_nm)));
  while (static_cast<long long>(fp.rows) * fp.cols < width_sites)
    ++fp.rows;
  fp.core_w_nm = fp.cols * fp.site_w_nm;
  fp.core_h_nm = fp.rows * fp.row_h_nm;
  return fp;
}

double Placement::x_nm(const Netlist& nl, const Endpoint& e) const {
  if (e.is_port()) {
    auto it = ports.find(e.name);
    if (it == ports.end()) throw ValidationError("unplaced port: " + e.name);
    return it->second.first;
  }
  auto it = cells.find(e.name);
  if (it == cells.end()) throw ValidationError("unplaced cell: " + e.name);
  const CellMaster& m = nl.master_of(e.name);
  return (it->second.col + m.width_gp * 0.5) * fp.site_w_nm;
}

double Placement::y_nm(const Netlist&, const Endpoint& e) const {
  if (e.is_port()) {
    auto it = ports.find(e.name);
    if (it == ports.end()) throw ValidationError("unplaced port: " + e.name);
    return it->second.second;
  }
  auto it = cells.find(e.name);
  if (it == cells.end()) throw ValidationError("unplaced cell: " + e.name);
  return (it->second.row + 0.5) * fp.row_h_nm;
}

bool Placement::legal(const Netlist& nl) const {
  std::set<std::pair<int, int>> occupied;
  for (const auto& [id, loc] : cells) {
    const CellMaster& m = nl.master_of(id);
    if (loc.row < 0 || loc.row >= fp.rows) return false;
    if (loc.col < 0 || loc.col + m.width_gp > fp.cols) return false;
    for (int s = 0; s < m.width_gp; ++s)
      if (!occupied.insert({loc.row, loc.col + s}).second) return false;
  }
  return true;
}

std::uint64_t Placement::hash() const {
  std::uint64_t h = kFnvSeed;
  for (const auto& [id, loc] : cells) {
    h = fnv1a(h, id);
    h = fnv1a(h, static_cast<std::uint64_t>(loc.row));
    h = fnv1a(h, static_cast<std::uint64_t>(loc.col));
  }
  return h;
}

}  // namespace omnipd
