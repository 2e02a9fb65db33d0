#include <algorithm>
#include <cmath>
#include <functional>

#include "omnipd/analysis.hpp"
#include "omnipd/layout.hpp"

namespace omnipd {

namespace {

struct SinkPt {
  Endpoint pin;
  double x, y;
};

// Nearest free site wide enough for the master, spiral search from the
// desired position.
SiteLoc find_free_site(const Netlist& nl, const Placement& pl, int width, double x_nm,
                       double y_nm) {
  const Floorplan& fp = pl.fp;
  std::vector<std::vector<bool>> occ(fp.rows, std::vector<bool>(fp.cols, false));
  for (const auto& [id, loc] : pl.cells) {
    int w = nl.master_of(id).width_gp;
    for (int s = 0; s < w && loc.col + s < fp.cols; ++s) occ[loc.row][loc.col + s] = true;
  }
  auto fits = [&](int r, int c) {
    if (r < 0 || r >= fp.rows || c < 0 || c + width > fp.cols) return false;
    for (int s = 0; s < width; ++s)
      if (occ[r][c + s]) return false;
    return true;
  };
  int r0 = std::clamp(static_cast<int>(y_nm / fp.row_h_nm), 0, fp.rows - 1);
  int c0 = std::clamp(static_cast<int>(x_nm / fp.site_w_nm), 0, fp.cols - 1);
  for (int radius = 0; radius < fp.rows + fp.cols; ++radius) {
    for (int dr = -radius; dr <= radius; ++dr) {
      int rem = radius - std::abs(dr);
      for (int dc : rem == 0 ? std::vector<int>{0} : std::vector<int>{-rem, rem}) {
        if (fits(r0 + dr, c0 + dc)) return {r0 + dr, c0 + dc};
      }
    }
  }
  throw ValidationError("cts: no free site for clock buffer");
}

}  // namespace

ClockTree cts(Netlist& nl, Placement& pl, const CellLibrary& lib, std::uint64_t seed,
              const CtsParams& params) {
  ClockTree tree;
  Rng rng(seed);

  // root clock nets: kind clock, port-driven
  std::vector<std::string> roots;
  for (const LogicalNet& n : nl.nets())
    if (n.kind == NetKind::Clock && n.driver.is_port()) roots.push_back(n.id);

  int next_buf = 0, next_net = 0;
  for (const std::string& root_id : roots) {
    LogicalNet root = nl.net(root_id);
    std::vector<SinkPt> sinks;
    for (const Endpoint& e : root.loads)
      sinks.push_back({e, pl.x_nm(nl, e), pl.y_nm(nl, e)});
    for (const SinkPt& s : sinks) tree.sinks.push_back({s.pin, s.x, s.y, 0.0});
    tree.root_net = root_id;
    if (sinks.size() <= 1) continue;  // port drives the sink directly

    std::uniform_int_distribution<int> coin(0, 1);

    // recursive bisection; returns the endpoint the parent should drive
    // (a buffer input) plus buffer placement
    std::function<Endpoint(std::vector<SinkPt>&, int)> build =
        [&](std::vector<SinkPt>& group, int depth) -> Endpoint {
      double cx = 0, cy = 0;
      for (const SinkPt& s : group) {
        cx += s.x;
        cy += s.y;
      }
      cx /= group.size();
      cy /= group.size();

      // insert a buffer at the group's center; CTS picks flavors blindly
      CellInstance buf;
      buf.id = "ckbuf_" + std::to_string(next_buf++);
      buf.master_name = params.buffer_master;
      buf.flavor = coin(rng) ? Flavor::TI : Flavor::BI;
      buf.is_clock_buffer = true;
      const CellMaster& master =
          lib.get(params.buffer_master, nl.arch(), nl.pattern(), buf.flavor);
      nl.add_cell(buf);
      pl.cells[buf.id] = find_free_site(nl, pl, master.width_gp, cx, cy);
      tree.buffers.push_back(buf.id);

      LogicalNet out;
      out.id = "cknet_" + std::to_string(next_net++);
      out.kind = NetKind::Clock;
      out.driver = Endpoint{buf.id, master.output_pins.at(0)};

      if (static_cast<int>(group.size()) <= params.max_sinks_per_leaf) {
        for (const SinkPt& s : group) out.loads.push_back(s.pin);
      } else {
        bool split_x = depth % 2 == 0;
        std::sort(group.begin(), group.end(), [&](const SinkPt& a, const SinkPt& b) {
          return split_x ? a.x < b.x : a.y < b.y;
        });
        std::vector<SinkPt> lo(group.begin(), group.begin() + group.size() / 2);
        std::vector<SinkPt> hi(group.begin() + group.size() / 2, group.end());
        out.loads.push_back(build(lo, depth + 1));
        out.loads.push_back(build(hi, depth + 1));
      }
      nl.add_net(std::move(out));
      return Endpoint{buf.id, master.input_pins.at(0)};
    };

    Endpoint top = build(sinks, 0);
    nl.remove_net(root_id);
    LogicalNet trunk;
    trunk.id = root_id;
    trunk.kind = NetKind::Clock;
    trunk.driver = root.driver;
    trunk.loads.push_back(top);
    nl.add_net(std::move(trunk));
  }
  return tree;
}

void annotate_clock_delays(ClockTree& tree, const Netlist& nl, const RoutingState& state,
                           const Placement& pl) {
  if (tree.sinks.empty()) {
    tree.skew_ps = 0.0;
    return;
  }
  // propagate arrival from the clock port down the buffer tree
  std::map<std::string, double> arrival;  // at net driver output
  std::function<void(const LogicalNet&, double)> walk = [&](const LogicalNet& n,
                                                            double at_driver) {
    NetRc rc = net_rc(nl, state, pl, n);
    for (const Endpoint& e : n.loads) {
      auto w = rc.sink_wire_ps.find(e.str());
      double t = at_driver + (w == rc.sink_wire_ps.end() ? 0.0 : w->second);
      if (e.is_port()) continue;
      const CellInstance& c = nl.cell(e.name);
      const CellMaster& m = nl.master_of(c);
      if (c.is_clock_buffer) {
        const LogicalNet* out = nl.net_driven_by(c.id, m.output_pins.at(0));
        if (!out) continue;
        NetRc out_rc = net_rc(nl, state, pl, *out);
        double cell_delay = m.intrinsic_delay_ps + m.r_drive_kohm * out_rc.total_cap_ff();
        walk(*out, t + cell_delay);
      } else {
        arrival[e.str()] = t;
      }
    }
  };
  const LogicalNet* root = nl.find_net(tree.root_net);
  if (root) walk(*root, 0.0);

  double lo = 1e18, hi = -1e18;
  for (ClockSink& s : tree.sinks) {
    auto it = arrival.find(s.pin.str());
    s.insertion_ps = it == arrival.end() ? 0.0 : it->second;
    lo = std::min(lo, s.insertion_ps);
    hi = std::max(hi, s.insertion_ps);
  }
  tree.skew_ps = tree.sinks.empty() ? 0.0 : hi - lo;
}

}  // namespace omnipd
