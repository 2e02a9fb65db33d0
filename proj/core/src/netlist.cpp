#include "omnipd/netlist.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>

namespace omnipd {

std::string to_string(PortSide s) {
  switch (s) {
    case PortSide::Top: return "top";
    case PortSide::Bottom: return "bottom";
    case PortSide::Either: return "either";
  }
  return "?";
}

PortSide port_side_from_string(const std::string& s) {
  if (s == "top") return PortSide::Top;
  if (s == "bottom") return PortSide::Bottom;
  if (s == "either") return PortSide::Either;
  throw ValidationError("unknown port side: " + s);
}

void Netlist::add_port(Port p) {
  if (port_idx_.count(p.name) || cell_idx_.count(p.name))
    throw ValidationError("duplicate id: " + p.name);
  port_idx_[p.name] = ports_.size();
  ports_.push_back(std::move(p));
}

void Netlist::add_cell(CellInstance c) {
  if (cell_idx_.count(c.id) || port_idx_.count(c.id))
    throw ValidationError("duplicate id: " + c.id);
  cell_idx_[c.id] = cells_.size();
  cells_.push_back(std::move(c));
}

void Netlist::add_net(LogicalNet n) {
  if (net_idx_.count(n.id)) throw ValidationError("duplicate net: " + n.id);
  if (!n.driver.is_port())
    driver_net_of_pin_[n.driver.str()] = n.id;
  for (const Endpoint& e : n.loads)
    if (!e.is_port()) load_net_of_pin_[e.str()] = n.id;
  net_idx_[n.id] = nets_.size();
  nets_.push_back(std::move(n));
}

void Netlist::remove_net(const std::string& id) {
  auto it = net_idx_.find(id);
  if (it == net_idx_.end()) throw ValidationError("no such net: " + id);
  const LogicalNet& n = nets_[it->second];
  if (!n.driver.is_port()) driver_net_of_pin_.erase(n.driver.str());
  for (const Endpoint& e : n.loads)
    if (!e.is_port()) load_net_of_pin_.erase(e.str());
  nets_.erase(nets_.begin() + static_cast<long>(it->second));
  reindex();
}

void Netlist::remove_load(const std::string& net_id, const Endpoint& load) {
  LogicalNet& n = net_mut(net_id);
  auto it = std::find(n.loads.begin(), n.loads.end(), load);
  if (it == n.loads.end()) throw ValidationError("remove_load: no such load on " + net_id);
  if (!load.is_port()) load_net_of_pin_.erase(load.str());
  n.loads.erase(it);
}

void Netlist::reindex() {
  net_idx_.clear();
  for (std::size_t i = 0; i < nets_.size(); ++i) net_idx_[nets_[i].id] = i;
  cell_idx_.clear();
  for (std::size_t i = 0; i < cells_.size(); ++i) cell_idx_[cells_[i].id] = i;
  port_idx_.clear();
  for (std::size_t i = 0; i < ports_.size(); ++i) port_idx_[ports_[i].name] = i;
}

const Port* Netlist::find_port(const std::string& name) const {
  auto it = port_idx_.find(name);
  return it == port_idx_.end() ? nullptr : &ports_[it->second];
}

const CellInstance* Netlist::find_cell(const std::string& id) const {
  auto it = cell_idx_.find(id);
  return it == cell_idx_.end() ? nullptr : &cells_[it->second];
}

const LogicalNet* Netlist::find_net(const std::string& id) const {
  auto it = net_idx_.find(id);
  return it == net_idx_.end() ? nullptr : &nets_[it->second];
}

CellInstance& Netlist::cell(const std::string& id) {
  auto it = cell_idx_.find(id);
  if (it == cell_idx_.end()) throw ValidationError("no such cell: " + id);
  return cells_[it->second];
}

const CellInstance& Netlist::cell(const std::string& id) const {
  return const_cast<Netlist*>(this)->cell(id);
}

const LogicalNet& Netlist::net(const std::string& id) const {
  auto it = net_idx_.find(id);
  if (it == net_idx_.end()) throw ValidationError("no such net: " + id);
  return nets_[it->second];
}

LogicalNet& Netlist::net_mut(const std::string& id) {
  auto it = net_idx_.find(id);
  if (it == net_idx_.end()) throw ValidationError("no such net: " + id);
  return nets_[it->second];
}

const CellMaster& Netlist::master_of(const CellInstance& c) const {
  Flavor f = c.flavor == Flavor::Unassigned ? Flavor::TI : c.flavor;
  return lib_->get(c.master_name, arch_, pattern_, f);
}

const CellMaster& Netlist::master_of(const std::string& cell_id) const {
  return master_of(cell(cell_id));
}

std::vector<const LogicalNet*> Netlist::fanin_nets(const std::string& cell_id) const {
  const CellInstance* cell = find_cell(cell_id);
  if (!cell) throw ValidationError("no such cell: " + cell_id);
  std::vector<const LogicalNet*> out;
  for (const std::string& pin : master_of(*cell).input_pins) {
    const LogicalNet* n = net_loading(cell_id, pin);
    if (!n || n->kind == NetKind::Power) continue;
    out.push_back(n);
  }
  std::sort(out.begin(), out.end(),
            [](const LogicalNet* a, const LogicalNet* b) { return a->id < b->id; });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<const CellInstance*> Netlist::fanout_cells(const std::string& net_id) const {
  const LogicalNet& n = net(net_id);
  std::set<std::string> seen;
  std::vector<const CellInstance*> out;
  for (const Endpoint& e : n.loads) {
    if (e.is_port()) continue;
    if (seen.insert(e.name).second) out.push_back(find_cell(e.name));
  }
  std::sort(out.begin(), out.end(),
            [](const CellInstance* a, const CellInstance* b) { return a->id < b->id; });
  return out;
}

const LogicalNet* Netlist::net_driven_by(const std::string& cell_id,
                                         const std::string& pin) const {
  auto it = driver_net_of_pin_.find(cell_id + "." + pin);
  return it == driver_net_of_pin_.end() ? nullptr : find_net(it->second);
}

const LogicalNet* Netlist::net_loading(const std::string& cell_id,
                                       const std::string& pin) const {
  auto it = load_net_of_pin_.find(cell_id + "." + pin);
  return it == load_net_of_pin_.end() ? nullptr : find_net(it->second);
}

bool Netlist::all_flavors_assigned() const {
  for (const CellInstance& c : cells_)
    if (c.flavor == Flavor::Unassigned) return false;
  return true;
}

void Netlist::validate() const {
  std::set<std::string> seen_pins;
  for (const LogicalNet& n : nets_) {
    auto check_endpoint = [&](const Endpoint& e, bool as_driver) {
      if (e.is_port()) {
        const Port* p = find_port(e.name);
        if (!p) throw ValidationError("net " + n.id + ": unknown port " + e.name);
        if (as_driver && !p->is_input)
          throw ValidationError("net " + n.id + ": output port " + e.name + " cannot drive");
        if (!as_driver && p->is_input)
          throw ValidationError("net " + n.id + ": input port " + e.name + " cannot load");
      } else {
        const CellInstance* c = find_cell(e.name);
        if (!c) throw ValidationError("net " + n.id + ": dangling pin " + e.str());
        const CellMaster& m = master_of(*c);
        if (as_driver && !m.has_output(e.pin))
          throw ValidationError("net " + n.id + ": " + e.str() + " is not an output of " +
                                m.name);
        if (!as_driver && !m.has_input(e.pin))
          throw ValidationError("net " + n.id + ": " + e.str() + " is not an input of " +
                                m.name);
      }
      if (!e.is_port() && !seen_pins.insert(e.str() + (as_driver ? "/d" : "/l")).second)
        throw ValidationError("net " + n.id + ": pin " + e.str() + " connected twice");
    };
    check_endpoint(n.driver, true);
    for (const Endpoint& e : n.loads) check_endpoint(e, false);
    if (n.kind == NetKind::Power && !n.loads.empty())
      throw ValidationError("power net " + n.id + " must not carry signal loads");
  }

  // combinational loop check: Kahn over cell->cell edges, sequential
  // outputs cut
  std::map<std::string, int> indeg;
  std::map<std::string, std::vector<std::string>> adj;
  for (const CellInstance& c : cells_) indeg[c.id] = 0;
  for (const LogicalNet& n : nets_) {
    if (n.kind != NetKind::Signal) continue;
    if (n.driver.is_port()) continue;
    const CellInstance& d = cell(n.driver.name);
    if (d.is_sequential) continue;
    for (const Endpoint& e : n.loads) {
      if (e.is_port()) continue;
      const CellInstance& l = cell(e.name);
      if (l.is_sequential) continue;
      adj[d.id].push_back(l.id);
      ++indeg[l.id];
    }
  }
  std::queue<std::string> q;
  for (auto& [id, deg] : indeg)
    if (deg == 0) q.push(id);
  std::size_t visited = 0;
  while (!q.empty()) {
    std::string u = q.front();
    q.pop();
    ++visited;
    for (const std::string& v : adj[u])
      if (--indeg[v] == 0) q.push(v);
  }
  if (visited != cells_.size())
    throw ValidationError("combinational loop detected");
}

namespace {

Endpoint parse_endpoint(const std::string& tok) {
  auto dot = tok.find('.');
  if (dot == std::string::npos) return Endpoint{tok, ""};
  return Endpoint{tok.substr(0, dot), tok.substr(dot + 1)};
}

}  // namespace

Netlist parse_netlist(const std::string& text, const CellLibrary& lib, Arch arch,
                      PinAccess pattern) {
  Netlist nl(&lib, arch, pattern);
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    try {
      if (toks[0] == "port") {
        if (toks.size() != 4) throw ParseError(lineno, "port <name> <in|out> <side>");
        Port p;
        p.name = toks[1];
        if (toks[2] == "in")
          p.is_input = true;
        else if (toks[2] == "out")
          p.is_input = false;
        else
          throw ParseError(lineno, "port direction must be in|out: " + toks[2]);
        p.side = port_side_from_string(toks[3]);
        nl.add_port(std::move(p));
      } else if (toks[0] == "cell") {
        if (toks.size() < 3) throw ParseError(lineno, "cell <instance> <master> [flavor=..]");
        CellInstance c;
        c.id = toks[1];
        c.master_name = toks[2];
        for (std::size_t i = 3; i < toks.size(); ++i) {
          if (toks[i].rfind("flavor=", 0) == 0)
            c.flavor = flavor_from_string(toks[i].substr(7));
          else
            throw ParseError(lineno, "unknown cell attribute: " + toks[i]);
        }
        const CellMaster* m =
            lib.find(c.master_name, arch, pattern,
                     c.flavor == Flavor::Unassigned ? Flavor::TI : c.flavor);
        if (!m) throw ParseError(lineno, "undeclared master: " + c.master_name);
        c.is_sequential = m->is_sequential;
        c.is_clock_buffer = m->is_clock_buffer;
        nl.add_cell(std::move(c));
      } else if (toks[0] == "net") {
        if (toks.size() < 3) throw ParseError(lineno, "net <name> [clock] <driver> <loads...>");
        LogicalNet n;
        n.id = toks[1];
        std::size_t at = 2;
        if (toks[at] == "clock") {
          n.kind = NetKind::Clock;
          ++at;
        }
        if (at >= toks.size()) throw ParseError(lineno, "net " + n.id + " has no driver");
        n.driver = parse_endpoint(toks[at++]);
        for (; at < toks.size(); ++at) n.loads.push_back(parse_endpoint(toks[at]));
        nl.add_net(std::move(n));
      } else {
        throw ParseError(lineno, "unknown statement: " + toks[0]);
      }
    } catch (const ValidationError& e) {
      throw ParseError(lineno, e.what());
    }
  }
  try {
    nl.validate();
  } catch (const ValidationError& e) {
    throw ParseError(lineno, e.what());
  }
  return nl;
}

std::string serialize_netlist(const Netlist& nl) {
  std::ostringstream out;
  std::vector<Port> ports = nl.ports();
  std::sort(ports.begin(), ports.end(), [](const Port& a, const Port& b) { return a.name < b.name; });
  for (const Port& p : ports)
    out << "port " << p.name << ' ' << (p.is_input ? "in" : "out") << ' ' << to_string(p.side)
        << "\n";
  std::vector<CellInstance> cells = nl.cells();
  std::sort(cells.begin(), cells.end(),
            [](const CellInstance& a, const CellInstance& b) { return a.id < b.id; });
  for (const CellInstance& c : cells) {
    out << "cell " << c.id << ' ' << c.master_name;
    if (c.flavor != Flavor::Unassigned) out << " flavor=" << to_string(c.flavor);
    out << "\n";
  }
  std::vector<LogicalNet> nets = nl.nets();
  std::sort(nets.begin(), nets.end(),
            [](const LogicalNet& a, const LogicalNet& b) { return a.id < b.id; });
  for (const LogicalNet& n : nets) {
    out << "net " << n.id;
    if (n.kind == NetKind::Clock) out << " clock";
    out << ' ' << n.driver.str();
    std::vector<Endpoint> loads = n.loads;
    std::sort(loads.begin(), loads.end());
    for (const Endpoint& e : loads) out << ' ' << e.str();
    out << "\n";
  }
  return out.str();
}

namespace {

Side load_side(const Netlist& nl, const Endpoint& e) {
  const CellInstance& c = nl.cell(e.name);
  if (c.flavor == Flavor::Unassigned)
    throw ValidationError("unassigned flavor on cell " + c.id);
  return flavor_side(c.flavor);
}

Side port_attach_side(const Port& p, bool has_top, bool has_bottom) {
  switch (p.side) {
    case PortSide::Top: return Side::Top;
    case PortSide::Bottom: return Side::Bottom;
    case PortSide::Either:
      if (has_bottom && !has_top) return Side::Bottom;
      return Side::Top;
  }
  return Side::Top;
}

}  // namespace

std::vector<PhysicalNet> derive_physical_for(const Netlist& nl, const LogicalNet& n) {
  std::vector<PhysicalNet> out;
  if (n.kind == NetKind::Power) return out;

  if (nl.arch() == Arch::CFET) {
    PhysicalNet pn;
    pn.logical_id = n.id;
    pn.side = Side::Top;
    pn.driver = n.driver;
    pn.pins = n.loads;
    if (!pn.pins.empty()) out.push_back(std::move(pn));
    return out;
  }

  if (n.kind == NetKind::Clock) {
    // Clock nets stay whole: one tree on the majority side, off-side
    // buffer inputs marked as M8 crossings. Sequential clock pins are
    // reachable from either stack and never need M8.
    PhysicalNet pn;
    pn.logical_id = n.id;
    pn.driver = n.driver;
    int top = 0, bottom = 0;
    std::vector<std::pair<Endpoint, Side>> sided;
    std::vector<Endpoint> agnostic;
    for (const Endpoint& e : n.loads) {
      if (e.is_port()) {
        agnostic.push_back(e);
        continue;
      }
      const CellInstance& c = nl.cell(e.name);
      const CellMaster& m = nl.master_of(c);
      if (c.is_sequential && e.pin == m.clock_pin) {
        agnostic.push_back(e);
        continue;
      }
      Side s = load_side(nl, e);
      sided.emplace_back(e, s);
      (s == Side::Top ? top : bottom)++;
    }
    pn.side = bottom > top ? Side::Bottom : Side::Top;
    for (auto& [e, s] : sided) {
      if (s == pn.side)
        pn.pins.push_back(e);
      else
        pn.m8_pins.push_back(e);
    }
    for (const Endpoint& e : agnostic) pn.pins.push_back(e);
    if (!pn.pins.empty() || !pn.m8_pins.empty()) out.push_back(std::move(pn));
    return out;
  }

  bool has_top = false, has_bottom = false;
  std::vector<Endpoint> top_pins, bottom_pins;
  for (const Endpoint& e : n.loads) {
    if (e.is_port()) continue;
    Side s = load_side(nl, e);
    (s == Side::Top ? top_pins : bottom_pins).push_back(e);
    (s == Side::Top ? has_top : has_bottom) = true;
  }
  // output ports attach on their declared side
  for (const Endpoint& e : n.loads) {
    if (!e.is_port()) continue;
    const Port* p = nl.find_port(e.name);
    Side s = port_attach_side(*p, has_top, has_bottom);
    (s == Side::Top ? top_pins : bottom_pins).push_back(e);
  }
  // splitting needs the driver's output pin on both sides (ports reach
  // either stack through M8)
  if (!top_pins.empty() && !bottom_pins.empty() && !n.driver.is_port()) {
    const CellInstance& d = nl.cell(n.driver.name);
    for (Side s : {Side::Top, Side::Bottom})
      if (!output_on_side(nl.pattern(), d.flavor, s))
        throw ValidationError("net " + n.id +
                              " splits across stacks but the driver's pattern lacks a " +
                              to_string(s) + "-side output");
  }
  if (!top_pins.empty()) {
    PhysicalNet pn;
    pn.logical_id = n.id;
    pn.side = Side::Top;
    pn.driver = n.driver;
    pn.pins = std::move(top_pins);
    out.push_back(std::move(pn));
  }
  if (!bottom_pins.empty()) {
    PhysicalNet pn;
    pn.logical_id = n.id;
    pn.side = Side::Bottom;
    pn.driver = n.driver;
    pn.pins = std::move(bottom_pins);
    out.push_back(std::move(pn));
  }
  return out;
}

std::vector<PhysicalNet> derive_physical_nets(const Netlist& nl) {
  std::vector<PhysicalNet> out;
  for (const LogicalNet& n : nl.nets())
    for (PhysicalNet& pn : derive_physical_for(nl, n)) out.push_back(std::move(pn));
  return out;
}

int split_net_count(const Netlist& nl) {
  if (nl.arch() == Arch::CFET) return 0;
  int count = 0;
  for (const LogicalNet& n : nl.nets()) {
    if (n.kind != NetKind::Signal) continue;
    bool top = false, bottom = false;
    for (const Endpoint& e : n.loads) {
      if (e.is_port()) continue;
      const CellInstance& c = nl.cell(e.name);
      if (c.flavor == Flavor::Unassigned) continue;
      (flavor_side(c.flavor) == Side::Top ? top : bottom) = true;
    }
    if (top && bottom) ++count;
  }
  return count;
}

}  // namespace omnipd
