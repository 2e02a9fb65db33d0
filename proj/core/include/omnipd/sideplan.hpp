#pragma once

#include <string>
#include <vector>

#include "omnipd/layout.hpp"
#include "omnipd/netlist.hpp"

namespace omnipd {

/// A set of cells forced to share one flavor. Clusters partition the
/// clusterable cells and are closed under the sibling relation: every
/// fan-out cell of every member's fan-in nets is a member.
struct Cluster {
  int id = 0;
  std::vector<std::string> members;  // sorted instance ids

  int size() const { return static_cast<int>(members.size()); }
};

struct ClusterParams {
  /// Whether clock nets contribute sibling edges. Off by default: the
  /// post-CTS flip pass owns clock flavors, so DFFs are clustered through
  /// their data connectivity only.
  bool include_clock_nets = false;
};

/// Connected components of the sibling graph (cells sharing a fan-in net),
/// found by worklist DFS. Deterministic: clusters ordered by first member,
/// members sorted.
std::vector<Cluster> cluster_cells(const Netlist& nl, const ClusterParams& params = {});

struct FlavorAssignment {
  std::vector<std::pair<int, Flavor>> by_cluster;  // in assignment order
  int n_ti = 0;
  int n_bi = 0;
};

/// Sorts clusters by size descending (ties by id) and alternates TI/BI
/// starting with TI until the TI count exceeds half the total; all
/// remaining clusters get BI. Applies the flavors to the netlist.
FlavorAssignment assign_flavors(Netlist& nl, const std::vector<Cluster>& clusters);

/// Assignment rule only, no netlist: used by the balance-bound property
/// tests on raw size multisets.
FlavorAssignment assign_flavors_sizes(const std::vector<int>& sizes);

/// Flips clock buffers whose fan-in net crosses M8, then rederives physical
/// nets and reroutes the affected clock nets. Returns flips performed.
int flip_clock_buffers(Netlist& nl, RoutingState& state, const Placement& pl,
                       std::uint64_t seed);

struct DatapathFlipParams {
  double beta = 2.0;  // detour threshold: routed length > beta * HPWL
  int max_passes = 3;
};

/// Flips data-path buffers (INV/BUF masters) whose fan-in physical net is
/// detoured beyond beta x HPWL, keeping a flip only if rerouting shortens
/// the net. Iterates to fixpoint or max_passes. Throws on beta <= 1.
int flip_datapath_buffers(Netlist& nl, RoutingState& state, const Placement& pl,
                          std::uint64_t seed, const DatapathFlipParams& params = {});

struct BalanceReport {
  int n_ti = 0;
  int n_bi = 0;
  int split_nets = 0;
  std::vector<int> cluster_sizes;  // descending
};

BalanceReport balance_report(const Netlist& nl, const std::vector<Cluster>* clusters = nullptr);
std::string balance_report_json(const BalanceReport& r);

std::vector<ClusterRef> to_cluster_refs(const std::vector<Cluster>& clusters);

}  // namespace omnipd
