#include <algorithm>
#include <cmath>
#include <numeric>

#include "omnipd/layout.hpp"

namespace omnipd {

namespace {

struct CellDim {
  std::string id;
  int width;
};

// Row-major occupancy at site granularity; cells keyed by index.
struct Grid {
  int rows, cols;
  std::vector<int> owner;  // -1 free

  Grid(int r, int c) : rows(r), cols(c), owner(static_cast<std::size_t>(r) * c, -1) {}
  int& at(int r, int c) { return owner[static_cast<std::size_t>(r) * cols + c]; }
  bool fits(int r, int c, int w, int self) const {
    if (r < 0 || r >= rows || c < 0 || c + w > cols) return false;
    for (int s = 0; s < w; ++s) {
      int o = owner[static_cast<std::size_t>(r) * cols + c + s];
      if (o != -1 && o != self) return false;
    }
    return true;
  }
  void put(int r, int c, int w, int idx) {
    for (int s = 0; s < w; ++s) at(r, c + s) = idx;
  }
  void clear(int r, int c, int w) {
    for (int s = 0; s < w; ++s) at(r, c + s) = -1;
  }
};

void place_ports(const Netlist& nl, Placement& pl) {
  // ports spread along the left/right core edges, name order
  std::vector<std::string> names;
  for (const Port& p : nl.ports()) names.push_back(p.name);
  std::sort(names.begin(), names.end());
  const double h = pl.fp.core_h_nm;
  int left = 0, right = 0;
  int n_left = (static_cast<int>(names.size()) + 1) / 2;
  int n_right = static_cast<int>(names.size()) - n_left;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i % 2 == 0) {
      pl.ports[names[i]] = {0.0, h * (left + 1) / (n_left + 1)};
      ++left;
    } else {
      pl.ports[names[i]] = {pl.fp.core_w_nm, h * (right + 1) / (n_right + 1)};
      ++right;
    }
  }
}

struct NetView {
  std::vector<int> cell_pins;                  // indices into cells
  std::vector<std::pair<double, double>> fixed;  // port positions (nm)
};

// HPWL in um of one net given current cell centers.
double net_hpwl(const NetView& net, const std::vector<double>& cx,
                const std::vector<double>& cy) {
  double x0 = 1e18, x1 = -1e18, y0 = 1e18, y1 = -1e18;
  for (int i : net.cell_pins) {
    x0 = std::min(x0, cx[i]);
    x1 = std::max(x1, cx[i]);
    y0 = std::min(y0, cy[i]);
    y1 = std::max(y1, cy[i]);
  }
  for (auto& [px, py] : net.fixed) {
    x0 = std::min(x0, px);
    x1 = std::max(x1, px);
    y0 = std::min(y0, py);
    y1 = std::max(y1, py);
  }
  if (x1 < x0) return 0.0;
  return ((x1 - x0) + (y1 - y0)) * 1e-3;
}

struct PlaceModel {
  std::vector<CellDim> cells;
  std::map<std::string, int> index;
  std::vector<NetView> nets;
  std::vector<std::vector<int>> nets_of_cell;

  PlaceModel(const Netlist& nl, const Placement& pl) {
    for (const CellInstance& c : nl.cells()) {
      index[c.id] = static_cast<int>(cells.size());
      cells.push_back({c.id, nl.master_of(c).width_gp});
    }
    nets_of_cell.resize(cells.size());
    // cost over physical nets so the two sides' boxes are independent
    for (const PhysicalNet& pn : derive_physical_nets(nl)) {
      NetView v;
      auto add_endpoint = [&](const Endpoint& e) {
        if (e.is_port()) {
          auto it = pl.ports.find(e.name);
          if (it != pl.ports.end()) v.fixed.push_back(it->second);
        } else {
          v.cell_pins.push_back(index.at(e.name));
        }
      };
      if (!pn.driver.is_port() || pl.ports.count(pn.driver.name)) add_endpoint(pn.driver);
      for (const Endpoint& e : pn.pins) add_endpoint(e);
      for (const Endpoint& e : pn.m8_pins) add_endpoint(e);
      std::sort(v.cell_pins.begin(), v.cell_pins.end());
      v.cell_pins.erase(std::unique(v.cell_pins.begin(), v.cell_pins.end()),
                        v.cell_pins.end());
      if (v.cell_pins.size() + v.fixed.size() < 2) continue;
      int ni = static_cast<int>(nets.size());
      for (int ci : v.cell_pins) nets_of_cell[ci].push_back(ni);
      nets.push_back(std::move(v));
    }
  }
};

double cell_cx(const Placement& pl, const SiteLoc& loc, int width) {
  return (loc.col + width * 0.5) * pl.fp.site_w_nm;
}
double cell_cy(const Placement& pl, const SiteLoc& loc) {
  return (loc.row + 0.5) * pl.fp.row_h_nm;
}

}  // namespace

double total_hpwl_um(const Netlist& nl, const Placement& pl) {
  double t = 0.0;
  PlaceModel model(nl, pl);
  std::vector<double> cx(model.cells.size()), cy(model.cells.size());
  for (std::size_t i = 0; i < model.cells.size(); ++i) {
    const SiteLoc& loc = pl.cells.at(model.cells[i].id);
    cx[i] = cell_cx(pl, loc, model.cells[i].width);
    cy[i] = cell_cy(pl, loc);
  }
  for (const NetView& n : model.nets) t += net_hpwl(n, cx, cy);
  return t;
}

namespace {

// Packs cells row-major in the given order. The cursor keeps clusters
// contiguous; when a wide cell no longer fits ahead of the cursor the scan
// restarts from the origin so row-end fragments still get used.
void pack_in_order(const std::vector<int>& order, const PlaceModel& model, Grid& grid,
                   std::vector<SiteLoc>& locs) {
  int r = 0, c = 0;
  for (int idx : order) {
    int w = model.cells[idx].width;
    int rr = r, cc = c;
    bool restarted = false;
    while (!grid.fits(rr, cc, w, -1)) {
      ++cc;
      if (cc + w > grid.cols) {
        cc = 0;
        ++rr;
        if (rr >= grid.rows) {
          if (restarted) throw ValidationError("placement does not fit core");
          restarted = true;
          rr = 0;
        }
      }
    }
    grid.put(rr, cc, w, idx);
    locs[idx] = {rr, cc};
    if (!restarted) {
      r = rr;
      c = cc + w;
      if (c >= grid.cols) {
        c = 0;
        ++r;
      }
      if (r >= grid.rows) {
        r = 0;
      }
    }
  }
}

}  // namespace

Placement place_random(const Netlist& nl, const Floorplan& fp, std::uint64_t seed) {
  Placement pl;
  pl.fp = fp;
  place_ports(nl, pl);
  PlaceModel model(nl, pl);
  std::vector<int> order(model.cells.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  Grid grid(fp.rows, fp.cols);
  std::vector<SiteLoc> locs(model.cells.size());
  pack_in_order(order, model, grid, locs);
  for (std::size_t i = 0; i < locs.size(); ++i) pl.cells[model.cells[i].id] = locs[i];
  return pl;
}

Placement place(const Netlist& nl, const Floorplan& fp, const std::vector<ClusterRef>& clusters,
                std::uint64_t seed, const AnnealParams& params) {
  Placement pl;
  pl.fp = fp;
  place_ports(nl, pl);
  PlaceModel model(nl, pl);
  const int n = static_cast<int>(model.cells.size());
  if (n == 0) throw ValidationError("place: empty netlist");

  // seed order: clusters by size descending packed contiguously, then the
  // unclustered remainder (CTS buffers arrive later and are not clustered)
  std::vector<std::vector<std::string>> sorted;
  for (const ClusterRef& c : clusters) sorted.push_back(c.members);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
  std::vector<int> order;
  std::vector<bool> seen(model.cells.size(), false);
  for (const auto& members : sorted)
    for (const std::string& id : members) {
      auto it = model.index.find(id);
      if (it == model.index.end()) continue;
      order.push_back(it->second);
      seen[it->second] = true;
    }
  for (int i = 0; i < n; ++i)
    if (!seen[i]) order.push_back(i);

  Grid grid(fp.rows, fp.cols);
  std::vector<SiteLoc> locs(model.cells.size());
  pack_in_order(order, model, grid, locs);

  std::vector<double> cx(n), cy(n);
  auto sync_pos = [&](int i) {
    cx[i] = (locs[i].col + model.cells[i].width * 0.5) * fp.site_w_nm;
    cy[i] = (locs[i].row + 0.5) * fp.row_h_nm;
  };
  for (int i = 0; i < n; ++i) sync_pos(i);

  auto cell_cost = [&](int i) {
    double s = 0.0;
    for (int ni : model.nets_of_cell[i]) s += net_hpwl(model.nets[ni], cx, cy);
    return s;
  };

  Rng rng(seed);
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::uniform_int_distribution<int> pick_row(0, fp.rows - 1);
  std::uniform_int_distribution<int> pick_col(0, fp.cols - 1);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  // warm-up: estimate move magnitude for the initial temperature
  double mean_delta = 0.0;
  {
    int samples = std::min(200, 4 * n);
    for (int s = 0; s < samples; ++s) {
      int a = pick(rng);
      mean_delta += cell_cost(a) / std::max(1.0, double(model.nets_of_cell[a].size()));
    }
    mean_delta = std::max(1e-3, mean_delta / std::max(1, std::min(200, 4 * n)));
  }
  double temp = params.t_start_factor * mean_delta;

  auto try_relocate = [&](int a) -> double {
    int w = model.cells[a].width;
    int r = pick_row(rng), c = pick_col(rng);
    if (c + w > fp.cols) c = fp.cols - w;
    if (!grid.fits(r, c, w, a)) return 0.0;
    SiteLoc old = locs[a];
    double before = cell_cost(a);
    grid.clear(old.row, old.col, w);
    grid.put(r, c, w, a);
    locs[a] = {r, c};
    sync_pos(a);
    double after = cell_cost(a);
    double delta = after - before;
    if (delta <= 0 || uni(rng) < std::exp(-delta / temp)) return delta;
    grid.clear(r, c, w);
    grid.put(old.row, old.col, w, a);
    locs[a] = old;
    sync_pos(a);
    return 0.0;
  };

  auto try_swap = [&](int a, int b) -> double {
    if (a == b) return 0.0;
    if (model.cells[a].width != model.cells[b].width) return 0.0;
    double before = cell_cost(a) + cell_cost(b);
    std::swap(locs[a], locs[b]);
    int w = model.cells[a].width;
    grid.put(locs[a].row, locs[a].col, w, a);
    grid.put(locs[b].row, locs[b].col, w, b);
    sync_pos(a);
    sync_pos(b);
    double after = cell_cost(a) + cell_cost(b);
    double delta = after - before;
    if (delta <= 0 || uni(rng) < std::exp(-delta / temp)) return delta;
    std::swap(locs[a], locs[b]);
    grid.put(locs[a].row, locs[a].col, w, a);
    grid.put(locs[b].row, locs[b].col, w, b);
    sync_pos(a);
    sync_pos(b);
    return 0.0;
  };

  // cluster-window shift: translate a whole cluster by a small offset
  std::vector<std::vector<int>> cluster_idx;
  for (const ClusterRef& c : clusters) {
    if (c.members.size() < 2) continue;
    std::vector<int> ids;
    for (const std::string& id : c.members) {
      auto it = model.index.find(id);
      if (it != model.index.end()) ids.push_back(it->second);
    }
    if (ids.size() >= 2) cluster_idx.push_back(std::move(ids));
  }
  std::uniform_int_distribution<int> pick_shift(-3, 3);
  auto try_cluster_shift = [&]() -> double {
    if (cluster_idx.empty()) return 0.0;
    std::uniform_int_distribution<int> pick_cluster(0, static_cast<int>(cluster_idx.size()) - 1);
    const std::vector<int>& ids = cluster_idx[pick_cluster(rng)];
    int dr = pick_shift(rng), dc = pick_shift(rng) * 2;
    if (dr == 0 && dc == 0) return 0.0;
    for (int i : ids) grid.clear(locs[i].row, locs[i].col, model.cells[i].width);
    bool ok = true;
    for (int i : ids)
      if (!grid.fits(locs[i].row + dr, locs[i].col + dc, model.cells[i].width, -1)) {
        ok = false;
        break;
      }
    if (!ok) {
      for (int i : ids) grid.put(locs[i].row, locs[i].col, model.cells[i].width, i);
      return 0.0;
    }
    double before = 0.0;
    for (int i : ids) before += cell_cost(i);
    for (int i : ids) {
      locs[i].row += dr;
      locs[i].col += dc;
      grid.put(locs[i].row, locs[i].col, model.cells[i].width, i);
      sync_pos(i);
    }
    double after = 0.0;
    for (int i : ids) after += cell_cost(i);
    double delta = after - before;
    if (delta <= 0 || uni(rng) < std::exp(-delta / temp)) return delta;
    for (int i : ids) {
      grid.clear(locs[i].row, locs[i].col, model.cells[i].width);
      locs[i].row -= dr;
      locs[i].col -= dc;
    }
    for (int i : ids) {
      grid.put(locs[i].row, locs[i].col, model.cells[i].width, i);
      sync_pos(i);
    }
    return 0.0;
  };

  const int moves_per_stage = std::max(200, params.moves_per_cell_per_stage * n);
  for (int stage = 0; stage < params.stages; ++stage) {
    int accepted = 0;
    for (int m = 0; m < moves_per_stage; ++m) {
      double roll = uni(rng);
      double delta;
      if (roll < 0.45)
        delta = try_swap(pick(rng), pick(rng));
      else if (roll < 0.9)
        delta = try_relocate(pick(rng));
      else
        delta = try_cluster_shift();
      if (delta != 0.0) ++accepted;
    }
    temp *= params.cooling;
    if (accepted < moves_per_stage * params.min_accept_rate && stage > params.stages / 4)
      break;
  }

  for (int i = 0; i < n; ++i) pl.cells[model.cells[i].id] = locs[i];
  return pl;
}

}  // namespace omnipd
