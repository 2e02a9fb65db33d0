#include "omnipd/sideplan.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace omnipd {

namespace {

bool net_clusterable(const LogicalNet& n, const ClusterParams& params) {
  if (n.kind == NetKind::Power) return false;
  if (n.kind == NetKind::Clock && !params.include_clock_nets) return false;
  return true;
}

// Fan-out cells of the cell's fan-in nets. The driver of a fan-in net is
// not a sibling: duplicated outputs drive either side.
std::vector<std::string> sibling_cells(const Netlist& nl, const std::string& cell_id,
                                       const ClusterParams& params) {
  std::vector<std::string> out;
  for (const LogicalNet* n : nl.fanin_nets(cell_id)) {
    if (!net_clusterable(*n, params)) continue;
    for (const CellInstance* c : nl.fanout_cells(n->id)) out.push_back(c->id);
  }
  return out;
}

}  // namespace

std::vector<Cluster> cluster_cells(const Netlist& nl, const ClusterParams& params) {
  std::set<std::string> clustered;
  std::vector<Cluster> clusters;

  for (const CellInstance& seed : nl.cells()) {
    if (clustered.count(seed.id)) continue;
    Cluster cluster;
    cluster.id = static_cast<int>(clusters.size());
    // worklist DFS standing in for the recursive formulation
    std::vector<std::string> work{seed.id};
    while (!work.empty()) {
      std::string cur = work.back();
      work.pop_back();
      if (!clustered.insert(cur).second) continue;
      cluster.members.push_back(cur);
      for (const std::string& sib : sibling_cells(nl, cur, params))
        if (!clustered.count(sib)) work.push_back(sib);
    }
    std::sort(cluster.members.begin(), cluster.members.end());
    clusters.push_back(std::move(cluster));
  }
  // canonical order: by first member id; sizes may tie arbitrarily otherwise
  std::sort(clusters.begin(), clusters.end(),
            [](const Cluster& a, const Cluster& b) { return a.members[0] < b.members[0]; });
  for (std::size_t i = 0; i < clusters.size(); ++i) clusters[i].id = static_cast<int>(i);
  return clusters;
}

FlavorAssignment assign_flavors_sizes(const std::vector<int>& sizes) {
  if (sizes.empty()) throw ValidationError("assign_flavors: no clusters");
  std::vector<std::pair<int, int>> order;  // (size, id)
  long long total = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    order.emplace_back(sizes[i], static_cast<int>(i));
    total += sizes[i];
  }
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });

  FlavorAssignment fa;
  bool ti_turn = true;
  bool balancing = true;
  for (const auto& [size, id] : order) {
    Flavor f;
    if (balancing) {
      f = ti_turn ? Flavor::TI : Flavor::BI;
      ti_turn = !ti_turn;
    } else {
      f = Flavor::BI;  // remaining clusters once TI passed half
    }
    fa.by_cluster.emplace_back(id, f);
    (f == Flavor::TI ? fa.n_ti : fa.n_bi) += size;
    if (balancing && 2LL * fa.n_ti > total) balancing = false;
  }
  return fa;
}

FlavorAssignment assign_flavors(Netlist& nl, const std::vector<Cluster>& clusters) {
  std::vector<int> sizes;
  sizes.reserve(clusters.size());
  for (const Cluster& c : clusters) sizes.push_back(c.size());
  FlavorAssignment fa = assign_flavors_sizes(sizes);
  for (const auto& [id, flavor] : fa.by_cluster)
    for (const std::string& member : clusters[id].members) nl.cell(member).flavor = flavor;
  return fa;
}

int flip_clock_buffers(Netlist& nl, RoutingState& state, const Placement& pl,
                       std::uint64_t seed) {
  // Offenders: clock buffers whose fan-in net's route crosses M8 at their
  // own pin (they sit on the minority side of that net).
  std::vector<std::string> offenders;
  auto physical = derive_physical_nets(nl);
  for (const PhysicalNet& pn : physical) {
    const LogicalNet& n = nl.net(pn.logical_id);
    if (n.kind != NetKind::Clock) continue;
    const RoutedNet* rn = state.find(pn.key());
    if (!rn || !rn->uses_m8()) continue;
    for (const Endpoint& e : pn.m8_pins) {
      if (e.is_port()) continue;
      const CellInstance& c = nl.cell(e.name);
      if (c.is_clock_buffer) offenders.push_back(c.id);
    }
  }
  std::sort(offenders.begin(), offenders.end());
  offenders.erase(std::unique(offenders.begin(), offenders.end()), offenders.end());

  for (const std::string& id : offenders) {
    CellInstance& c = nl.cell(id);
    c.flavor = opposite(c.flavor);
  }

  // rederive and reroute every clock net against the updated flavors
  for (const PhysicalNet& pn : physical) {
    if (nl.net(pn.logical_id).kind != NetKind::Clock) continue;
    if (state.find(pn.key())) state.rip_up(pn.key());
    // a flip can move the majority to the other stack
    std::string other = pn.logical_id + (pn.side == Side::Top ? "@B" : "@T");
    if (state.find(other)) state.rip_up(other);
  }
  route_clock(nl, pl, state, seed);
  return static_cast<int>(offenders.size());
}

int flip_datapath_buffers(Netlist& nl, RoutingState& state, const Placement& pl,
                          std::uint64_t seed, const DatapathFlipParams& params) {
  if (params.beta <= 1.0) throw ValidationError("flip_datapath_buffers: beta must be > 1");

  Router router(nl, pl, state, seed);
  auto route_len = [&](const std::string& key) {
    const RoutedNet* rn = state.find(key);
    return rn ? rn->length_um : 0.0;
  };

  int flips = 0;
  for (int pass = 0; pass < params.max_passes; ++pass) {
    int pass_flips = 0;
    for (const CellInstance& cref : nl.cells()) {
      const std::string id = cref.id;
      {
        const CellInstance& c = nl.cell(id);
        if (c.is_sequential || c.is_clock_buffer) continue;
        if (c.flavor == Flavor::Unassigned) continue;
        const CellMaster& m = nl.master_of(c);
        if (m.input_pins.size() != 1 || m.output_pins.size() != 1) continue;  // INV/BUF only
      }
      const LogicalNet* fanin = nullptr;
      for (const LogicalNet* n : nl.fanin_nets(id))
        if (n->kind == NetKind::Signal) fanin = n;
      if (!fanin) continue;

      // locate this buffer's side of the fan-in net
      auto before = derive_physical_for(nl, *fanin);
      const PhysicalNet* mine = nullptr;
      for (const PhysicalNet& pn : before)
        for (const Endpoint& e : pn.pins)
          if (e.name == id) mine = &pn;
      if (!mine) continue;
      double len = route_len(mine->key());
      double hp = router.hpwl_um(*mine);
      if (len <= params.beta * std::max(hp, state.gcell_um())) continue;

      double total_before = 0.0;
      for (const PhysicalNet& pn : before) total_before += route_len(pn.key());

      // tentative flip; keep only if the logical net's total routed length
      // shrinks and the flip does not split the net further
      nl.cell(id).flavor = opposite(nl.cell(id).flavor);
      for (const PhysicalNet& pn : before)
        if (state.find(pn.key())) state.rip_up(pn.key());
      auto after = derive_physical_for(nl, *fanin);
      for (const PhysicalNet& pn : after) router.route_one(pn);
      double total_after = 0.0;
      for (const PhysicalNet& pn : after) total_after += route_len(pn.key());

      if (total_after < total_before && after.size() <= before.size()) {
        ++pass_flips;
      } else {
        nl.cell(id).flavor = opposite(nl.cell(id).flavor);
        for (const PhysicalNet& pn : after)
          if (state.find(pn.key())) state.rip_up(pn.key());
        for (const PhysicalNet& pn : before) router.route_one(pn);
      }
    }
    flips += pass_flips;
    if (pass_flips == 0) break;
  }
  return flips;
}

BalanceReport balance_report(const Netlist& nl, const std::vector<Cluster>* clusters) {
  BalanceReport r;
  for (const CellInstance& c : nl.cells()) {
    if (c.flavor == Flavor::TI) ++r.n_ti;
    if (c.flavor == Flavor::BI) ++r.n_bi;
  }
  r.split_nets = split_net_count(nl);
  if (clusters) {
    for (const Cluster& c : *clusters) r.cluster_sizes.push_back(c.size());
    std::sort(r.cluster_sizes.rbegin(), r.cluster_sizes.rend());
  }
  return r;
}

std::string balance_report_json(const BalanceReport& r) {
  std::ostringstream out;
  out << "{\"n_ti\": " << r.n_ti << ", \"n_bi\": " << r.n_bi << ", \"clusters\": [";
  for (std::size_t i = 0; i < r.cluster_sizes.size(); ++i)
    out << (i ? ", " : "") << r.cluster_sizes[i];
  out << "], \"split_nets\": " << r.split_nets << "}";
  return out.str();
}

std::vector<ClusterRef> to_cluster_refs(const std::vector<Cluster>& clusters) {
  std::vector<ClusterRef> refs;
  refs.reserve(clusters.size());
  for (const Cluster& c : clusters) refs.push_back({c.id, c.members});
  return refs;
}

}  // namespace omnipd
