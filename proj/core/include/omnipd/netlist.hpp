#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "omnipd/celllib.hpp"

namespace omnipd {

enum class NetKind { Signal, Clock, Power };
enum class PortSide { Top, Bottom, Either };

std::string to_string(PortSide s);
PortSide port_side_from_string(const std::string& s);

struct Port {
  std::string name;
  bool is_input = true;
  PortSide side = PortSide::Either;
};

/// A net endpoint: either a block port (pin empty) or an instance pin.
struct Endpoint {
  std::string name;  // instance id or port name
  std::string pin;   // empty for ports

  bool is_port() const { return pin.empty(); }
  bool operator==(const Endpoint&) const = default;
  bool operator<(const Endpoint& o) const {
    return name != o.name ? name < o.name : pin < o.pin;
  }
  std::string str() const { return is_port() ? name : name + "." + pin; }
};

struct CellInstance {
  std::string id;
  std::string master_name;
  Flavor flavor = Flavor::Unassigned;
  bool is_sequential = false;
  bool is_clock_buffer = false;
};

struct LogicalNet {
  std::string id;
  NetKind kind = NetKind::Signal;
  Endpoint driver;
  std::vector<Endpoint> loads;
};

/// One side's share of a logical net. Signal nets with loads on both sides
/// split into two physical nets fed by the driver's duplicated (DO) output.
/// Clock nets stay whole: they route on one stack and reach off-side buffer
/// inputs through M8 crossings until the post-CTS flip pass removes those.
struct PhysicalNet {
  std::string logical_id;
  Side side = Side::Top;
  Endpoint driver;
  std::vector<Endpoint> pins;      // loads (and output ports) on this side
  std::vector<Endpoint> m8_pins;   // off-side pins reached via an M8 crossing

  std::string key() const { return logical_id + (side == Side::Top ? "@T" : "@B"); }
};

/// Flat gate-level netlist bound to a (library, architecture, pattern)
/// context. Immutable after parse except for the explicit mutation phases
/// (flavor assignment, CTS insertion, buffer flipping).
class Netlist {
 public:
  Netlist() = default;
  Netlist(const CellLibrary* lib, Arch arch, PinAccess pattern)
      : lib_(lib), arch_(arch), pattern_(pattern) {}

  const CellLibrary& library() const { return *lib_; }
  Arch arch() const { return arch_; }
  PinAccess pattern() const { return pattern_; }

  void add_port(Port p);
  void add_cell(CellInstance c);
  void add_net(LogicalNet n);
  void remove_net(const std::string& id);
  void remove_load(const std::string& net_id, const Endpoint& load);

  const std::vector<Port>& ports() const { return ports_; }
  const std::vector<CellInstance>& cells() const { return cells_; }
  const std::vector<LogicalNet>& nets() const { return nets_; }

  const Port* find_port(const std::string& name) const;
  const CellInstance* find_cell(const std::string& id) const;
  const LogicalNet* find_net(const std::string& id) const;
  CellInstance& cell(const std::string& id);
  const CellInstance& cell(const std::string& id) const;
  const LogicalNet& net(const std::string& id) const;
  LogicalNet& net_mut(const std::string& id);

  /// Master of a cell at its current flavor (TI pin data when unassigned).
  const CellMaster& master_of(const CellInstance& c) const;
  const CellMaster& master_of(const std::string& cell_id) const;

  /// Signal+clock nets with a load pin on the cell, net id ascending.
  std::vector<const LogicalNet*> fanin_nets(const std::string& cell_id) const;
  /// Load instances of a net, deduplicated, id ascending.
  std::vector<const CellInstance*> fanout_cells(const std::string& net_id) const;

  /// The net driven by (cell, output pin), if any.
  const LogicalNet* net_driven_by(const std::string& cell_id, const std::string& pin) const;
  /// The net loading (cell, input pin), if any.
  const LogicalNet* net_loading(const std::string& cell_id, const std::string& pin) const;

  /// Checks pin resolution, duplicate ids, driver/load sanity, and absence
  /// of combinational loops. Throws ValidationError.
  void validate() const;

  bool all_flavors_assigned() const;

 private:
  friend Netlist parse_netlist(const std::string&, const CellLibrary&, Arch, PinAccess);
  void reindex();

  const CellLibrary* lib_ = nullptr;
  Arch arch_ = Arch::Omni3D;
  PinAccess pattern_ = PinAccess::DO;
  std::vector<Port> ports_;
  std::vector<CellInstance> cells_;
  std::vector<LogicalNet> nets_;
  std::map<std::string, std::size_t> port_idx_, cell_idx_, net_idx_;
  std::map<std::string, std::string> driver_net_of_pin_;  // "inst.pin" -> net id
  std::map<std::string, std::string> load_net_of_pin_;
};

Netlist parse_netlist(const std::string& text, const CellLibrary& lib, Arch arch,
                      PinAccess pattern);
std::string serialize_netlist(const Netlist& nl);

/// Splits every signal/clock net into per-side physical nets. Requires all
/// flavors assigned and a duplicated-output pattern.
std::vector<PhysicalNet> derive_physical_nets(const Netlist& nl);

/// Physical nets of one logical net (0, 1 or 2 entries).
std::vector<PhysicalNet> derive_physical_for(const Netlist& nl, const LogicalNet& n);

/// Number of signal nets whose loads sit on both sides (= nets mapped to
/// two physical nets). Clock nets are not counted; they stay whole.
int split_net_count(const Netlist& nl);

}  // namespace omnipd
