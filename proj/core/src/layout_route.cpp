#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include "omnipd/layout.hpp"

namespace omnipd {

RoutingState::RoutingState(const Floorplan& fp, const LayerStack& stack, PdnStyle pdn,
                           const RouteParams& params)
    : stack_(stack), pdn_(pdn), params_(params) {
  gcell_nm_ = params.gcell_sites * fp.site_w_nm;
  nx_ = std::max(1, static_cast<int>(std::ceil(fp.core_w_nm / gcell_nm_)));
  ny_ = std::max(1, static_cast<int>(std::ceil(fp.core_h_nm / gcell_nm_)));
  usage_.assign(stack.layers.size(), std::vector<int>(std::size_t(nx_) * ny_, 0));
  capacity_.assign(stack.layers.size(), std::vector<int>(std::size_t(nx_) * ny_, 0));
  for (std::size_t li = 0; li < stack.layers.size(); ++li) {
    const LayerSpec& l = stack.layers[li];
    if (l.allow != LayerUse::Signal) continue;
    double tracks = gcell_nm_ / l.pitch_nm;
    int cap = std::max(1, static_cast<int>(std::floor(tracks * (1.0 - stack.pdn_derate(
                                                                    static_cast<int>(li), pdn_)))));
    for (auto& c : capacity_[li]) c = cap;
  }
}

int RoutingState::gcell_x(double x_nm) const {
  int g = static_cast<int>(x_nm / gcell_nm_);
  return std::clamp(g, 0, nx_ - 1);
}

int RoutingState::gcell_y(double y_nm) const {
  int g = static_cast<int>(y_nm / gcell_nm_);
  return std::clamp(g, 0, ny_ - 1);
}

int RoutingState::capacity(int layer, int x, int y) const {
  return capacity_[layer][std::size_t(x) * ny_ + y];
}

int RoutingState::usage(int layer, int x, int y) const {
  return usage_[layer][std::size_t(x) * ny_ + y];
}

const RoutedNet* RoutingState::find(const std::string& key) const {
  auto it = nets_.find(key);
  return it == nets_.end() ? nullptr : &it->second;
}

namespace {

// A horizontal segment x0..x1 at row y occupies edges min..max-1; vertical
// likewise. Zero-length segments are pin stubs and occupy nothing.
template <typename F>
void for_each_edge(const RouteSegment& s, F&& f) {
  if (s.y0 == s.y1) {
    for (int x = std::min(s.x0, s.x1); x < std::max(s.x0, s.x1); ++x) f(x, s.y0);
  } else {
    for (int y = std::min(s.y0, s.y1); y < std::max(s.y0, s.y1); ++y) f(s.x0, y);
  }
}

}  // namespace

void RoutingState::commit(const RoutedNet& net) {
  if (nets_.count(net.key)) throw ValidationError("net already routed: " + net.key);
  for (const RouteSegment& s : net.segments) {
    const LayerSpec& l = stack_.layers.at(s.layer);
    if (l.allow != LayerUse::Signal)
      throw ValidationError(net.key + ": segment on non-signal layer " + l.name);
    if (l.side() != net.side)
      throw ValidationError(net.key + ": segment crosses stacks on " + l.name);
    for_each_edge(s, [&](int x, int y) { ++usage_[s.layer][std::size_t(x) * ny_ + y]; });
  }
  nets_.emplace(net.key, net);
}

void RoutingState::rip_up(const std::string& key) {
  auto it = nets_.find(key);
  if (it == nets_.end()) throw ValidationError("rip_up: no such net: " + key);
  for (const RouteSegment& s : it->second.segments)
    for_each_edge(s, [&](int x, int y) { --usage_[s.layer][std::size_t(x) * ny_ + y]; });
  nets_.erase(it);
}

long long RoutingState::overflow_total() const {
  long long t = 0;
  for (std::size_t li = 0; li < usage_.size(); ++li)
    for (std::size_t i = 0; i < usage_[li].size(); ++i)
      t += std::max(0, usage_[li][i] - capacity_[li][i]);
  return t;
}

std::map<std::string, double> RoutingState::wirelength_by_layer() const {
  std::map<std::string, double> out;
  for (const LayerSpec& l : stack_.layers) out[l.name] = 0.0;
  for (const auto& [key, net] : nets_)
    for (const RouteSegment& s : net.segments)
      out[stack_.layers[s.layer].name] += s.len() * gcell_um();
  return out;
}

double RoutingState::total_wirelength_um() const {
  double t = 0.0;
  for (const auto& [key, net] : nets_) t += net.length_um;
  return t;
}

double RoutingState::layer_density(int layer_idx) const {
  const auto& use = usage_[layer_idx];
  const auto& cap = capacity_[layer_idx];
  long long u = 0, c = 0;
  for (std::size_t i = 0; i < use.size(); ++i) {
    u += use[i];
    c += cap[i];
  }
  return c > 0 ? double(u) / double(c) : 0.0;
}

std::uint64_t RoutingState::hash() const {
  std::uint64_t h = kFnvSeed;
  for (const auto& [key, net] : nets_) {
    h = fnv1a(h, key);
    for (const RouteSegment& s : net.segments) {
      h = fnv1a(h, std::uint64_t(s.layer));
      h = fnv1a(h, std::uint64_t(s.x0) << 32 | std::uint32_t(s.y0));
      h = fnv1a(h, std::uint64_t(s.x1) << 32 | std::uint32_t(s.y1));
    }
    for (const auto& m8 : net.m8_stubs)
      h = fnv1a(h, std::uint64_t(m8[0]) << 32 | std::uint32_t(m8[1]));
  }
  return h;
}

Router::Router(const Netlist& nl, const Placement& pl, RoutingState& state, std::uint64_t seed)
    : nl_(nl), pl_(pl), state_(state), rng_(seed) {}

std::vector<Router::Pin> Router::net_pins(const PhysicalNet& net) const {
  std::vector<Pin> pins;
  auto add = [&](const Endpoint& e, bool via_m8) {
    double x = pl_.x_nm(nl_, e), y = pl_.y_nm(nl_, e);
    pins.push_back({state_.gcell_x(x), state_.gcell_y(y), via_m8});
  };
  add(net.driver, false);
  for (const Endpoint& e : net.pins) add(e, false);
  for (const Endpoint& e : net.m8_pins) add(e, true);
  return pins;
}

double Router::hpwl_um(const PhysicalNet& net) const {
  auto pins = net_pins(net);
  int x0 = pins[0].x, x1 = pins[0].x, y0 = pins[0].y, y1 = pins[0].y;
  for (const Pin& p : pins) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  return ((x1 - x0) + (y1 - y0)) * state_.gcell_um();
}

namespace {

struct TierLayers {
  int h_layer;
  int v_layer;
};

TierLayers tier_layers(const RoutingState& state, Side side, int tier) {
  auto sig = state.stack().signal_layers(side);
  tier = std::min<int>(tier, static_cast<int>(sig.size()) / 2 - 1);
  int a = sig[std::size_t(tier) * 2], b = sig[std::size_t(tier) * 2 + 1];
  if (state.stack().layer(a).dir == 'H') return {a, b};
  return {b, a};
}

int tier_count(const RoutingState& state, Side side) {
  return static_cast<int>(state.stack().signal_layers(side).size()) / 2;
}

// Longer nets prefer upper tiers: (M2,M3), (M4,M5), (M6,M7) per side. The
// preference is soft; congested tiers spill into the others.
int natural_tier(const RoutingState& state, int hpwl_gcells) {
  const RouteParams& rp = state.params();
  if (hpwl_gcells <= rp.short_net_gcells) return 0;
  if (hpwl_gcells <= rp.mid_net_gcells) return 1;
  return 2;
}

// Cost of adding one more wire over an edge. Overfull edges are strongly
// discouraged but not forbidden; the acceptance rule in the rip-up pass
// keeps total overflow monotone.
double edge_cost(const RoutingState& st, int layer, int x, int y) {
  int use = st.usage(layer, x, y);
  int cap = st.capacity(layer, x, y);
  if (use >= cap) return 1.0 + 6.0 + 2.0 * (use - cap + 1);
  return 1.0 + 0.4 * double(use) / double(cap);
}

double path_cost(const RoutingState& st, const TierLayers& tl,
                 const std::vector<RouteSegment>& segs) {
  double c = 0.0;
  for (const RouteSegment& s : segs)
    for_each_edge(s, [&](int x, int y) { c += edge_cost(st, s.layer, x, y); });
  (void)tl;
  return c;
}

std::vector<RouteSegment> l_route(const TierLayers& tl, int x0, int y0, int x1, int y1,
                                  bool h_first) {
  std::vector<RouteSegment> segs;
  if (h_first) {
    if (x0 != x1) segs.push_back({tl.h_layer, x0, y0, x1, y0});
    if (y0 != y1) segs.push_back({tl.v_layer, x1, y0, x1, y1});
  } else {
    if (y0 != y1) segs.push_back({tl.v_layer, x0, y0, x0, y1});
    if (x0 != x1) segs.push_back({tl.h_layer, x0, y1, x1, y1});
  }
  return segs;
}

std::vector<RouteSegment> z_route_h(const TierLayers& tl, int x0, int y0, int x1, int y1,
                                    int xm) {
  std::vector<RouteSegment> segs;
  if (x0 != xm) segs.push_back({tl.h_layer, x0, y0, xm, y0});
  if (y0 != y1) segs.push_back({tl.v_layer, xm, y0, xm, y1});
  if (xm != x1) segs.push_back({tl.h_layer, xm, y1, x1, y1});
  return segs;
}

std::vector<RouteSegment> z_route_v(const TierLayers& tl, int x0, int y0, int x1, int y1,
                                    int ym) {
  std::vector<RouteSegment> segs;
  if (y0 != ym) segs.push_back({tl.v_layer, x0, y0, x0, ym});
  if (x0 != x1) segs.push_back({tl.h_layer, x0, ym, x1, ym});
  if (ym != y1) segs.push_back({tl.v_layer, x1, ym, x1, y1});
  return segs;
}

// Dijkstra within a bounding window; direction changes switch between the
// tier's H and V layers.
std::vector<RouteSegment> maze_route(const RoutingState& st, const TierLayers& tl, int x0,
                                     int y0, int x1, int y1, int margin) {
  int lox = std::max(0, std::min(x0, x1) - margin);
  int hix = std::min(st.nx() - 1, std::max(x0, x1) + margin);
  int loy = std::max(0, std::min(y0, y1) - margin);
  int hiy = std::min(st.ny() - 1, std::max(y0, y1) + margin);
  int w = hix - lox + 1, h = hiy - loy + 1;
  auto idx = [&](int x, int y) { return (x - lox) * h + (y - loy); };

  const double inf = 1e18;
  std::vector<double> dist(std::size_t(w) * h, inf);
  std::vector<int> prev(std::size_t(w) * h, -1);
  using QE = std::pair<double, int>;
  std::priority_queue<QE, std::vector<QE>, std::greater<>> q;
  dist[idx(x0, y0)] = 0.0;
  q.push({0.0, idx(x0, y0)});
  const int dx[4] = {1, -1, 0, 0};
  const int dy[4] = {0, 0, 1, -1};
  while (!q.empty()) {
    auto [d, u] = q.top();
    q.pop();
    if (d > dist[u]) continue;
    int ux = lox + u / h, uy = loy + u % h;
    if (ux == x1 && uy == y1) break;
    for (int k = 0; k < 4; ++k) {
      int vx = ux + dx[k], vy = uy + dy[k];
      if (vx < lox || vx > hix || vy < loy || vy > hiy) continue;
      int layer = (k < 2) ? tl.h_layer : tl.v_layer;
      int ex = std::min(ux, vx), ey = std::min(uy, vy);
      double nd = d + edge_cost(st, layer, ex, ey);
      int v = idx(vx, vy);
      if (nd < dist[v] - 1e-12) {
        dist[v] = nd;
        prev[v] = u;
        q.push({nd, v});
      }
    }
  }
  std::vector<RouteSegment> segs;
  if (dist[idx(x1, y1)] >= inf) return segs;
  // walk back and merge runs into segments
  std::vector<std::pair<int, int>> path;
  for (int v = idx(x1, y1); v != -1; v = prev[v]) path.push_back({lox + v / h, loy + v % h});
  std::reverse(path.begin(), path.end());
  std::size_t i = 0;
  while (i + 1 < path.size()) {
    std::size_t j = i + 1;
    bool horiz = path[j].second == path[i].second;
    while (j + 1 < path.size() &&
           (horiz ? path[j + 1].second == path[i].second : path[j + 1].first == path[i].first))
      ++j;
    segs.push_back({horiz ? tl.h_layer : tl.v_layer, path[i].first, path[i].second,
                    path[j].first, path[j].second});
    i = j;
  }
  return segs;
}

std::vector<RouteSegment> route_two_pin(const RoutingState& st, const TierLayers& tl, int x0,
                                        int y0, int x1, int y1, bool congestion_aware) {
  if (x0 == x1 && y0 == y1) return {};
  std::vector<std::vector<RouteSegment>> candidates;
  candidates.push_back(l_route(tl, x0, y0, x1, y1, true));
  candidates.push_back(l_route(tl, x0, y0, x1, y1, false));
  if (x0 != x1 && y0 != y1) {
    int xm = (x0 + x1) / 2, ym = (y0 + y1) / 2;
    if (xm != x0 && xm != x1) candidates.push_back(z_route_h(tl, x0, y0, x1, y1, xm));
    if (ym != y0 && ym != y1) candidates.push_back(z_route_v(tl, x0, y0, x1, y1, ym));
  }
  double best_cost = 1e18;
  std::size_t best = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    double c = path_cost(st, tl, candidates[i]);
    if (c < best_cost - 1e-12) {
      best_cost = c;
      best = i;
    }
  }
  if (!congestion_aware) return candidates[best];
  int manhattan = std::abs(x1 - x0) + std::abs(y1 - y0);
  // an overfull edge costs >= 7; a clean path costs <= 1.4 per step
  bool clean = best_cost <= 1.4 * manhattan + 1e-9;
  if (clean) return candidates[best];
  auto maze = maze_route(st, tl, x0, y0, x1, y1, st.params().maze_margin);
  if (maze.empty()) return candidates[best];
  double maze_cost = path_cost(st, tl, maze);
  return maze_cost < best_cost ? maze : candidates[best];
}

}  // namespace

RoutedNet Router::build_route(const PhysicalNet& net, bool congestion_aware) {
  RoutedNet rn;
  rn.key = net.key();
  rn.logical_id = net.logical_id;
  rn.side = net.side;
  rn.kind = nl_.net(net.logical_id).kind;

  auto pins = net_pins(net);
  for (const Pin& p : pins)
    if (p.via_m8) rn.m8_stubs.push_back({p.x, p.y});

  // unique terminals
  std::vector<std::pair<int, int>> terms;
  for (const Pin& p : pins) terms.push_back({p.x, p.y});
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());

  int bx0 = terms[0].first, bx1 = terms[0].first, by0 = terms[0].second, by1 = terms[0].second;
  for (auto& [x, y] : terms) {
    bx0 = std::min(bx0, x);
    bx1 = std::max(bx1, x);
    by0 = std::min(by0, y);
    by1 = std::max(by1, y);
  }
  const int preferred = natural_tier(state_, (bx1 - bx0) + (by1 - by0));
  const int tiers = tier_count(state_, net.side);

  if (terms.size() == 1) {
    // all pins in one gcell: a pin-stub segment, zero length
    TierLayers tl = tier_layers(state_, net.side, preferred);
    rn.segments.push_back({tl.h_layer, terms[0].first, terms[0].second, terms[0].first,
                           terms[0].second});
    rn.length_um = 0.0;
    return rn;
  }

  // Prim MST over L1 distance, then route each tree edge
  std::vector<int> in_tree{0};
  std::vector<bool> used(terms.size(), false);
  used[0] = true;
  std::vector<std::pair<int, int>> edges;
  while (in_tree.size() < terms.size()) {
    int best_u = -1, best_v = -1, best_d = 1 << 30;
    for (int u : in_tree)
      for (std::size_t v = 0; v < terms.size(); ++v) {
        if (used[v]) continue;
        int d = std::abs(terms[u].first - terms[v].first) +
                std::abs(terms[u].second - terms[v].second);
        if (d < best_d) {
          best_d = d;
          best_u = u;
          best_v = static_cast<int>(v);
        }
      }
    used[best_v] = true;
    in_tree.push_back(best_v);
    edges.push_back({best_u, best_v});
  }

  for (auto& [u, v] : edges) {
    // per-connection tier choice, preferred tier first; overfull tiers
    // spill into the neighbors
    std::vector<int> order;
    order.push_back(std::min(preferred, tiers - 1));
    for (int d = 1; d < tiers; ++d) {
      if (preferred - d >= 0) order.push_back(preferred - d);
      if (preferred + d < tiers) order.push_back(preferred + d);
    }
    std::vector<RouteSegment> best;
    double best_cost = 1e18;
    for (int t : order) {
      TierLayers tl = tier_layers(state_, net.side, t);
      auto segs = route_two_pin(state_, tl, terms[u].first, terms[u].second, terms[v].first,
                                terms[v].second, congestion_aware);
      double cost = path_cost(state_, tl, segs) + 0.3 * std::abs(t - preferred);
      if (cost < best_cost - 1e-12) {
        best_cost = cost;
        best = std::move(segs);
      }
      if (!congestion_aware) break;  // first-choice tier only
    }
    for (RouteSegment& s : best) rn.segments.push_back(s);
  }
  double steps = 0;
  for (const RouteSegment& s : rn.segments) steps += s.len();
  rn.length_um = steps * state_.gcell_um();
  return rn;
}

void Router::route_one(const PhysicalNet& net) {
  state_.commit(build_route(net, true));
}

void Router::route(const std::vector<PhysicalNet>& nets) {
  std::vector<const PhysicalNet*> order;
  for (const PhysicalNet& n : nets) order.push_back(&n);
  std::sort(order.begin(), order.end(),
            [](const PhysicalNet* a, const PhysicalNet* b) { return a->key() < b->key(); });
  by_key_.clear();
  for (const PhysicalNet& n : nets) by_key_.emplace(n.key(), n);
  for (const PhysicalNet* n : order) {
    if (state_.find(n->key())) continue;
    route_one(*n);
  }
  for (int i = 0; i < state_.params().ripup_iters; ++i) {
    if (state_.overflow_total() == 0) break;
    ripup_reroute_pass();
  }
}

void Router::ripup_reroute_pass() {
  // nets crossing overfull edges, largest contribution first
  std::vector<std::pair<long long, std::string>> victims;
  for (const auto& [key, rn] : state_.nets()) {
    long long over = 0;
    for (const RouteSegment& s : rn.segments)
      for_each_edge(s, [&](int x, int y) {
        if (state_.usage(s.layer, x, y) > state_.capacity(s.layer, x, y)) ++over;
      });
    if (over > 0) victims.push_back({-over, key});
  }
  std::sort(victims.begin(), victims.end());

  for (const auto& victim : victims) {
    const std::string& key = victim.second;
    auto it = by_key_.find(key);
    if (it == by_key_.end()) continue;
    long long before = state_.overflow_total();
    RoutedNet old = *state_.find(key);
    state_.rip_up(key);
    RoutedNet fresh = build_route(it->second, true);
    state_.commit(fresh);
    if (state_.overflow_total() > before) {
      state_.rip_up(key);
      state_.commit(old);
    }
  }
}

RoutingState global_route(const Netlist& nl, const Placement& pl, const LayerStack& stack,
                          std::uint64_t seed, const RouteParams& params) {
  RoutingState state(pl.fp, stack, ArchInfo::of(nl.arch()).pdn, params);
  Router router(nl, pl, state, seed);
  router.route(derive_physical_nets(nl));
  return state;
}

void route_clock(const Netlist& nl, const Placement& pl, RoutingState& state,
                 std::uint64_t seed) {
  Router router(nl, pl, state, seed);
  std::vector<PhysicalNet> clock_nets;
  for (const PhysicalNet& pn : derive_physical_nets(nl))
    if (nl.net(pn.logical_id).kind == NetKind::Clock && !state.find(pn.key()))
      clock_nets.push_back(pn);
  std::sort(clock_nets.begin(), clock_nets.end(),
            [](const PhysicalNet& a, const PhysicalNet& b) { return a.key() < b.key(); });
  for (const PhysicalNet& pn : clock_nets) router.route_one(pn);
}

std::map<std::string, double> wirelength_by_layer(const RoutingState& rs) {
  return rs.wirelength_by_layer();
}

std::map<std::string, double> wirelength_by_layer_combined(const RoutingState& rs) {
  auto per = rs.wirelength_by_layer();
  std::map<std::string, double> out = per;
  for (const auto& [name, len] : per) {
    if (name[0] == 'T' || name[0] == 'B') {
      std::string combined = "M" + name.substr(2);
      out[combined] += len;
    }
  }
  return out;
}

std::string routing_dump(const RoutingState& rs) {
  std::ostringstream out;
  for (const auto& [key, rn] : rs.nets()) {
    out << "route " << key << " len_um=" << fmt_double(rn.length_um, 3) << "\n";
    for (const RouteSegment& s : rn.segments)
      out << "  seg " << rs.stack().layer(s.layer).name << " " << s.x0 << " " << s.y0 << " "
          << s.x1 << " " << s.y1 << "\n";
    for (const auto& m8 : rn.m8_stubs) out << "  m8stub " << m8[0] << " " << m8[1] << "\n";
  }
  return out.str();
}

}  // namespace omnipd
