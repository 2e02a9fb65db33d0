#include "omnipd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <set>

namespace omnipd {

int RcTree::add_node(int parent, double r_kohm, double c_ff) {
  if (parent >= static_cast<int>(nodes.size()))
    throw ValidationError("RcTree: bad parent");
  nodes.push_back({parent, r_kohm, c_ff});
  return static_cast<int>(nodes.size()) - 1;
}

std::vector<double> RcTree::elmore_ps() const {
  // downstream cap per node, then delay(n) = delay(parent) + r * cdown(n)
  const int n = static_cast<int>(nodes.size());
  std::vector<double> cdown(n, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    cdown[i] += nodes[i].c_ff;
    if (nodes[i].parent >= 0) cdown[nodes[i].parent] += cdown[i];
  }
  std::vector<double> delay(n, 0.0);
  for (int i = 1; i < n; ++i)
    delay[i] = delay[nodes[i].parent] + nodes[i].r_kohm * cdown[i];
  return delay;
}

namespace {

double wire_cap_per_um(const RoutingState& rs, int layer, PdnStyle pdn) {
  const LayerSpec& l = rs.stack().layer(layer);
  double cap = l.cap_ff_um * (1.0 + rs.params().coupling_factor * rs.layer_density(layer));
  if (pdn == PdnStyle::Split) cap += rs.params().pdn_cap_uplift_ff_um;
  return cap;
}

struct GEdge {
  int to;
  double r_kohm;
  double c_ff;
};

// Elmore over one routed physical net. The gcell graph is collapsed across
// layers; each unit step carries its layer's RC.
void physical_net_rc(const Netlist& nl, const RoutingState& rs, const Placement& pl,
                     const PhysicalNet& pn, NetRc& acc) {
  const PdnStyle pdn = ArchInfo::of(nl.arch()).pdn;
  const RoutedNet* rn = rs.find(pn.key());

  auto node_of = [&](const Endpoint& e) {
    return std::pair<int, int>{rs.gcell_x(pl.x_nm(nl, e)), rs.gcell_y(pl.y_nm(nl, e))};
  };

  // pin caps
  auto pin_cap = [&](const Endpoint& e) -> double {
    if (e.is_port()) return 0.0;
    const CellMaster& m = nl.master_of(e.name);
    return m.has_input(e.pin) ? m.cap_in(e.pin) : 0.0;
  };

  std::vector<Endpoint> sinks = pn.pins;
  for (const Endpoint& e : pn.m8_pins) sinks.push_back(e);

  if (!rn || rn->segments.empty()) {
    for (const Endpoint& e : sinks) {
      acc.pin_cap_ff += pin_cap(e);
      acc.sink_wire_ps[e.str()] = 0.0;
    }
    return;
  }

  // build unit-step adjacency
  std::map<std::pair<int, int>, int> node_id;
  std::vector<std::vector<GEdge>> adj;
  auto get_node = [&](std::pair<int, int> p) {
    auto it = node_id.find(p);
    if (it != node_id.end()) return it->second;
    int id = static_cast<int>(adj.size());
    node_id.emplace(p, id);
    adj.emplace_back();
    return id;
  };
  const double step_um = rs.gcell_um();
  for (const RouteSegment& s : rn->segments) {
    const LayerSpec& l = rs.stack().layer(s.layer);
    double r = l.r_per_um() * step_um * 1e-3;  // kohm per step
    double c = wire_cap_per_um(rs, s.layer, pdn) * step_um;
    int x = s.x0, y = s.y0;
    int sx = (s.x1 > s.x0) - (s.x1 < s.x0), sy = (s.y1 > s.y0) - (s.y1 < s.y0);
    while (x != s.x1 || y != s.y1) {
      int a = get_node({x, y});
      int b = get_node({x + sx, y + sy});
      adj[a].push_back({b, r, c});
      adj[b].push_back({a, r, c});
      x += sx;
      y += sy;
      acc.wire_cap_ff += c;
    }
    if (s.len() == 0) get_node({s.x0, s.y0});  // pin stub
  }

  // source = driver pin gcell
  int src;
  {
    auto p = node_of(pn.driver);
    auto it = node_id.find(p);
    src = it == node_id.end() ? get_node(p) : it->second;
  }

  // spanning tree by BFS, then RcTree
  RcTree tree;
  std::vector<int> tree_node(adj.size(), -1);
  tree.nodes.push_back({-1, 0.0, 0.0});
  tree_node[src] = 0;
  std::queue<int> q;
  q.push(src);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (const GEdge& e : adj[u]) {
      if (tree_node[e.to] != -1) continue;
      // half the step cap lumps at each end
      tree.nodes[tree_node[u]].c_ff += e.c_ff * 0.5;
      tree_node[e.to] = tree.add_node(tree_node[u], e.r_kohm, e.c_ff * 0.5);
      q.push(e.to);
    }
  }

  // attach pin caps and read off sink delays
  std::vector<std::pair<std::string, int>> sink_nodes;
  for (const Endpoint& e : sinks) {
    auto it = node_id.find(node_of(e));
    int tn = (it == node_id.end()) ? -1 : tree_node[it->second];
    acc.pin_cap_ff += pin_cap(e);
    if (tn >= 0)
      tree.add_cap(tn, pin_cap(e));
    sink_nodes.emplace_back(e.str(), tn);
  }
  std::vector<double> delays = tree.elmore_ps();
  for (auto& [name, tn] : sink_nodes) acc.sink_wire_ps[name] = tn >= 0 ? delays[tn] : 0.0;
}

}  // namespace

NetRc net_rc(const Netlist& nl, const RoutingState& rs, const Placement& pl,
             const LogicalNet& net) {
  NetRc acc;
  for (const PhysicalNet& pn : derive_physical_for(nl, net))
    physical_net_rc(nl, rs, pl, pn, acc);
  return acc;
}

double routed_net_cap_ff(const RoutingState& rs, const RoutedNet& rn, PdnStyle pdn) {
  double c = 0.0;
  for (const RouteSegment& s : rn.segments)
    c += wire_cap_per_um(rs, s.layer, pdn) * s.len() * rs.gcell_um();
  return c;
}

namespace {

struct StaNode {
  double arrival = 0.0;
  std::string pred_net;     // net feeding the max input, for path recovery
  double cell_delay = 0.0;  // delay of the driving cell stage
  double wire_delay = 0.0;  // wire delay into the critical input pin
};

std::map<std::string, double> insertion_map(const ClockTree& tree) {
  std::map<std::string, double> ins;
  for (const ClockSink& s : tree.sinks) ins[s.pin.name] = s.insertion_ps;
  return ins;
}

}  // namespace

TimingResult sta(const Netlist& nl, const RoutingState& rs, const Placement& pl,
                 const ClockTree& tree, double period_ps, const AnalysisParams& params) {
  TimingResult result;
  result.period_ps = period_ps;

  std::map<std::string, NetRc> rc;
  for (const LogicalNet& n : nl.nets())
    if (n.kind != NetKind::Power) rc.emplace(n.id, net_rc(nl, rs, pl, n));

  std::map<std::string, double> insertion = insertion_map(tree);
  auto ins_of = [&](const std::string& cell_id) {
    auto it = insertion.find(cell_id);
    return it == insertion.end() ? 0.0 : it->second;
  };

  // topological order over combinational cells
  std::map<std::string, int> indeg;
  std::map<std::string, std::vector<std::string>> adj;
  for (const CellInstance& c : nl.cells())
    if (!c.is_sequential) indeg[c.id] = 0;
  for (const LogicalNet& n : nl.nets()) {
    if (n.kind != NetKind::Signal || n.driver.is_port()) continue;
    const CellInstance& d = nl.cell(n.driver.name);
    if (d.is_sequential) continue;
    for (const Endpoint& e : n.loads) {
      if (e.is_port()) continue;
      const CellInstance& l = nl.cell(e.name);
      if (l.is_sequential) continue;
      adj[d.id].push_back(l.id);
      ++indeg[l.id];
    }
  }
  std::vector<std::string> topo;
  {
    std::priority_queue<std::string, std::vector<std::string>, std::greater<>> q;
    for (auto& [id, deg] : indeg)
      if (deg == 0) q.push(id);
    while (!q.empty()) {
      std::string u = q.top();
      q.pop();
      topo.push_back(u);
      for (const std::string& v : adj[u])
        if (--indeg[v] == 0) q.push(v);
    }
    if (topo.size() != indeg.size()) throw ValidationError("sta: combinational loop");
  }

  // arrival at each net's driver output
  std::map<std::string, StaNode> at_net;
  auto net_load = [&](const std::string& net_id) {
    auto it = rc.find(net_id);
    return it == rc.end() ? 0.0 : it->second.total_cap_ff();
  };
  auto wire_to = [&](const std::string& net_id, const Endpoint& pin) {
    auto it = rc.find(net_id);
    if (it == rc.end()) return 0.0;
    auto w = it->second.sink_wire_ps.find(pin.str());
    return w == it->second.sink_wire_ps.end() ? 0.0 : w->second;
  };

  // sources: port-driven nets and sequential outputs
  for (const LogicalNet& n : nl.nets()) {
    if (n.kind != NetKind::Signal) continue;
    if (n.driver.is_port()) {
      at_net[n.id] = StaNode{0.0, "", 0.0, 0.0};
    } else {
      const CellInstance& d = nl.cell(n.driver.name);
      if (!d.is_sequential) continue;
      const CellMaster& m = nl.master_of(d);
      double cd = m.intrinsic_delay_ps + m.r_drive_kohm * net_load(n.id);
      at_net[n.id] = StaNode{ins_of(d.id) + cd, "", cd, 0.0};
    }
  }

  // combinational propagation
  for (const std::string& cid : topo) {
    const CellInstance& c = nl.cell(cid);
    const CellMaster& m = nl.master_of(c);
    double in_arr = 0.0;
    std::string best_net;
    double best_wire = 0.0;
    for (const std::string& pin : m.input_pins) {
      const LogicalNet* fn = nl.net_loading(cid, pin);
      if (!fn || fn->kind != NetKind::Signal) continue;
      auto it = at_net.find(fn->id);
      double base = it == at_net.end() ? 0.0 : it->second.arrival;
      double w = wire_to(fn->id, Endpoint{cid, pin});
      if (base + w >= in_arr) {
        in_arr = base + w;
        best_net = fn->id;
        best_wire = w;
      }
    }
    for (const std::string& opin : m.output_pins) {
      const LogicalNet* on = nl.net_driven_by(cid, opin);
      if (!on) continue;
      double cd = m.intrinsic_delay_ps + m.r_drive_kohm * net_load(on->id);
      at_net[on->id] = StaNode{in_arr + cd, best_net, cd, best_wire};
    }
  }

  // endpoints
  struct Ep {
    Endpoint pin;
    double arrival, required, setup, skew, ins_capture;
    std::string from_net;
    double wire_delay;
  };
  std::vector<Ep> endpoints;
  for (const LogicalNet& n : nl.nets()) {
    if (n.kind != NetKind::Signal) continue;
    auto it = at_net.find(n.id);
    if (it == at_net.end()) continue;
    for (const Endpoint& e : n.loads) {
      if (e.is_port()) {
        double arr = it->second.arrival + wire_to(n.id, e);
        endpoints.push_back({e, arr, period_ps, 0.0, 0.0, 0.0, n.id, wire_to(n.id, e)});
      } else {
        const CellInstance& l = nl.cell(e.name);
        if (!l.is_sequential) continue;
        const CellMaster& m = nl.master_of(l);
        if (e.pin == m.clock_pin) continue;
        double arr = it->second.arrival + wire_to(n.id, e);
        double ins_cap = ins_of(l.id);
        double req = period_ps + ins_cap - m.setup_ps;
        endpoints.push_back({e, arr, req, m.setup_ps, 0.0, ins_cap, n.id, wire_to(n.id, e)});
      }
    }
  }
  result.endpoint_count = static_cast<int>(endpoints.size());
  if (endpoints.empty()) {
    result.achieved_delay_ps = 0.0;
    return result;
  }

  std::sort(endpoints.begin(), endpoints.end(), [](const Ep& a, const Ep& b) {
    double sa = a.required - a.arrival, sb = b.required - b.arrival;
    if (sa != sb) return sa < sb;
    return a.pin < b.pin;
  });

  const int k = std::min<int>(params.top_k, static_cast<int>(endpoints.size()));
  double slack_sum = 0.0;
  for (int i = 0; i < k; ++i) {
    const Ep& ep = endpoints[i];
    TimingPath path;
    path.endpoint = ep.pin;
    path.arrival_ps = ep.arrival;
    path.required_ps = ep.required;
    path.slack_ps = ep.required - ep.arrival;
    path.setup_ps = ep.setup;

    // walk predecessors to the startpoint
    path.wire_delay_ps = ep.wire_delay;
    path.stages.push_back({"", 0.0, ep.wire_delay});
    std::string cur = ep.from_net;
    double launch_ins = 0.0;
    while (!cur.empty()) {
      const StaNode& node = at_net.at(cur);
      const LogicalNet& n = nl.net(cur);
      if (!n.driver.is_port()) {
        path.cell_delay_ps += node.cell_delay;
        path.stages.push_back({n.driver.name, node.cell_delay, node.wire_delay});
        const CellInstance& d = nl.cell(n.driver.name);
        if (d.is_sequential) {
          launch_ins = ins_of(d.id);
          break;
        }
      }
      path.wire_delay_ps += node.wire_delay;
      cur = node.pred_net;
    }
    std::reverse(path.stages.begin(), path.stages.end());
    path.skew_ps = launch_ins - ep.ins_capture;
    result.top_paths.push_back(std::move(path));
    slack_sum += ep.required - ep.arrival;
  }
  result.worst_slack_ps = result.top_paths.front().slack_ps;
  result.avg_slack_top_ps = slack_sum / k;
  result.achieved_delay_ps = period_ps - result.avg_slack_top_ps;

  double lo = 1e18, hi = -1e18;
  bool any = false;
  for (int i = 0; i < k; ++i) {
    if (endpoints[i].pin.is_port()) continue;
    lo = std::min(lo, endpoints[i].ins_capture);
    hi = std::max(hi, endpoints[i].ins_capture);
    any = true;
  }
  result.clock_skew_ps = any ? hi - lo : 0.0;
  return result;
}

EnergyResult energy(const Netlist& nl, const RoutingState& rs, double vdd, double period_ps,
                    const AnalysisParams& params) {
  if (params.activity < 0 || params.activity > 1)
    throw ValidationError("energy: activity out of [0, 1]");
  EnergyResult e;
  const PdnStyle pdn = ArchInfo::of(nl.arch()).pdn;
  const double v2 = vdd * vdd;

  // wire cap per logical net from its routed physical nets
  std::map<std::string, double> wire_cap;
  for (const auto& [key, rn] : rs.nets())
    wire_cap[rn.logical_id] += routed_net_cap_ff(rs, rn, pdn);

  for (const LogicalNet& n : nl.nets()) {
    if (n.kind == NetKind::Power) continue;
    double act = n.kind == NetKind::Clock ? params.clock_activity : params.activity;
    auto wc = wire_cap.find(n.id);
    if (wc != wire_cap.end()) e.net_switching_fj += act * wc->second * v2;

    double pins = 0.0;
    for (const Endpoint& ep : n.loads) {
      if (ep.is_port()) continue;
      const CellMaster& m = nl.master_of(ep.name);
      if (m.has_input(ep.pin)) pins += m.cap_in(ep.pin);
    }
    if (!n.driver.is_port()) pins += nl.master_of(n.driver.name).cap_out_ff;
    e.pin_switching_fj += act * pins * v2;
  }

  double leak_na = 0.0;
  for (const CellInstance& c : nl.cells()) {
    const CellMaster& m = nl.master_of(c);
    const LogicalNet* out =
        m.output_pins.empty() ? nullptr : nl.net_driven_by(c.id, m.output_pins[0]);
    double act = out && out->kind == NetKind::Clock ? params.clock_activity : params.activity;
    e.internal_fj += act * m.e_internal_fj;
    leak_na += m.leak_na;
  }
  // nA * V * ps = 1e-9 A * 1e-12 s * V = 1e-21 J = 1e-6 fJ
  e.leakage_fj = leak_na * vdd * period_ps * 1e-6;
  e.total_fj = e.internal_fj + e.pin_switching_fj + e.net_switching_fj + e.leakage_fj;
  return e;
}

AreaReport area_report(const Netlist& design, const Netlist& reference) {
  auto tally = [](const Netlist& nl) {
    std::map<std::string, std::pair<double, int>> per;  // name -> (area, count)
    double total = 0.0;
    for (const CellInstance& c : nl.cells()) {
      double a = cell_area_nm2(nl.master_of(c), nl.library());
      per[c.master_name].first += a;
      per[c.master_name].second += 1;
      total += a;
    }
    return std::pair{per, total};
  };
  auto [da, dtotal] = tally(design);
  auto [ra, rtotal] = tally(reference);

  bool overlap = false;
  for (auto& [name, v] : da)
    if (ra.count(name)) overlap = true;
  if (!overlap) throw ValidationError("area_report: disjoint cell universes");

  AreaReport rep;
  rep.total_area_ratio = rtotal > 0 ? dtotal / rtotal : 0.0;
  std::set<std::string> names;
  for (auto& [name, v] : da) names.insert(name);
  for (auto& [name, v] : ra) names.insert(name);
  long long rcount = static_cast<long long>(reference.cells().size());
  for (const std::string& name : names) {
    AreaRow row;
    row.master = name;
    if (da.count(name)) {
      row.area_frac = da[name].first / rtotal;
      row.count_frac = rcount ? double(da[name].second) / double(rcount) : 0.0;
    }
    if (ra.count(name)) {
      row.ref_area_frac = ra[name].first / rtotal;
      row.ref_count_frac = rcount ? double(ra[name].second) / double(rcount) : 0.0;
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

DelayBreakdown delay_breakdown(const TimingResult& t) {
  DelayBreakdown b;
  if (t.top_paths.empty()) return b;
  double cell = 0, wire = 0, setup = 0, skew = 0, achieved = 0;
  for (const TimingPath& p : t.top_paths) {
    cell += p.cell_delay_ps;
    wire += p.wire_delay_ps;
    setup += p.setup_ps;
    skew += p.skew_ps;
    achieved += t.period_ps - p.slack_ps;
  }
  if (achieved == 0) return b;
  b.cell = cell / achieved;
  b.wire = wire / achieved;
  b.setup = setup / achieved;
  b.skew = skew / achieved;
  return b;
}

}  // namespace omnipd
