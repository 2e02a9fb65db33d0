#include "omnipd/celllib.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace omnipd {

std::string to_string(Arch a) {
  switch (a) {
    case Arch::CFET: return "CFET";
    case Arch::Omni3D: return "OMNI";
    case Arch::Omni3DNoIM: return "OMNI_NOIM";
  }
  return "?";
}

std::string to_string(PinAccess p) {
  switch (p) {
    case PinAccess::SIO: return "SIO";
    case PinAccess::DI: return "DI";
    case PinAccess::DO: return "DO";
    case PinAccess::DIDO: return "DIDO";
  }
  return "?";
}

std::string to_string(Flavor f) {
  switch (f) {
    case Flavor::TI: return "TI";
    case Flavor::BI: return "BI";
    case Flavor::Unassigned: return "UNASSIGNED";
  }
  return "?";
}

std::string to_string(Side s) { return s == Side::Top ? "top" : "bottom"; }

Arch arch_from_string(const std::string& s) {
  if (s == "CFET") return Arch::CFET;
  if (s == "OMNI") return Arch::Omni3D;
  if (s == "OMNI_NOIM") return Arch::Omni3DNoIM;
  throw ValidationError("unknown architecture: " + s);
}

PinAccess pattern_from_string(const std::string& s) {
  if (s == "SIO") return PinAccess::SIO;
  if (s == "DI") return PinAccess::DI;
  if (s == "DO") return PinAccess::DO;
  if (s == "DIDO") return PinAccess::DIDO;
  throw ValidationError("unknown pin-access pattern: " + s);
}

Flavor flavor_from_string(const std::string& s) {
  if (s == "TI") return Flavor::TI;
  if (s == "BI") return Flavor::BI;
  throw ValidationError("unknown flavor: " + s);
}

ArchInfo ArchInfo::of(Arch a) {
  switch (a) {
    case Arch::CFET: return {4, false, PdnStyle::Backside, 27.0};
    case Arch::Omni3D: return {3, true, PdnStyle::Split, 28.0};
    case Arch::Omni3DNoIM: return {3, false, PdnStyle::Split, 28.0};
  }
  throw ValidationError("bad arch");
}

bool input_on_side(PinAccess p, Flavor f, Side s) {
  if (p == PinAccess::DI || p == PinAccess::DIDO) return true;
  return flavor_side(f) == s;
}

bool output_on_side(PinAccess p, Flavor f, Side s) {
  if (p == PinAccess::DO || p == PinAccess::DIDO) return true;
  return flavor_side(f) == s;
}

double pattern_cap_in_mult(PinAccess p) {
  switch (p) {
    case PinAccess::SIO: return 1.0;
    case PinAccess::DO: return 1.042;
    case PinAccess::DI: return 1.218;
    case PinAccess::DIDO: return 1.0 + 0.042 + 0.218;
  }
  return 1.0;
}

double pattern_cap_out_mult(PinAccess p) {
  switch (p) {
    case PinAccess::SIO: return 1.0;
    case PinAccess::DO: return 1.158;
    case PinAccess::DI: return 1.058;
    case PinAccess::DIDO: return 1.0 + 0.158 + 0.058;
  }
  return 1.0;
}

bool CellMaster::has_input(const std::string& pin) const {
  return std::find(input_pins.begin(), input_pins.end(), pin) != input_pins.end();
}

bool CellMaster::has_output(const std::string& pin) const {
  return std::find(output_pins.begin(), output_pins.end(), pin) != output_pins.end();
}

double CellMaster::cap_in(const std::string& pin) const {
  for (std::size_t i = 0; i < input_pins.size(); ++i)
    if (input_pins[i] == pin) return cap_in_ff.at(i);
  throw ValidationError(name + ": no input pin " + pin);
}

double CellMaster::cap_in_total() const {
  double t = 0;
  for (double c : cap_in_ff) t += c;
  return t;
}

void CellLibrary::add(CellMaster m) {
  m.height_tracks = ArchInfo::of(m.arch).track_height;
  Key k{m.name, static_cast<int>(m.arch), static_cast<int>(m.pattern),
        static_cast<int>(m.flavor)};
  if (masters_.count(k))
    throw ValidationError("duplicate master: " + m.name + " " + to_string(m.arch) + " " +
                          to_string(m.pattern) + " " + to_string(m.flavor));
  masters_.emplace(std::move(k), std::move(m));
}

const CellMaster* CellLibrary::find(const std::string& name, Arch arch, PinAccess pattern,
                                    Flavor flavor) const {
  Key k{name, static_cast<int>(arch), static_cast<int>(pattern), static_cast<int>(flavor)};
  auto it = masters_.find(k);
  return it == masters_.end() ? nullptr : &it->second;
}

const CellMaster& CellLibrary::get(const std::string& name, Arch arch, PinAccess pattern,
                                   Flavor flavor) const {
  const CellMaster* m = find(name, arch, pattern, flavor);
  if (!m)
    throw ValidationError("no such master: " + name + " " + to_string(arch) + " " +
                          to_string(pattern) + " " + to_string(flavor));
  return *m;
}

std::vector<const CellMaster*> CellLibrary::masters() const {
  std::vector<const CellMaster*> out;
  out.reserve(masters_.size());
  for (const auto& [k, m] : masters_) out.push_back(&m);
  return out;
}

std::vector<std::string> CellLibrary::cell_names() const {
  std::vector<std::string> names;
  for (const auto& [k, m] : masters_)
    if (names.empty() || names.back() != m.name) names.push_back(m.name);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

bool CellLibrary::has_cell(const std::string& name, Arch arch) const {
  for (const auto& [k, m] : masters_)
    if (m.name == name && m.arch == arch) return true;
  return false;
}

void CellLibrary::validate() const {
  for (const auto& [k, m] : masters_) {
    for (double c : m.cap_in_ff)
      if (c < 0) throw ValidationError(m.name + ": negative input capacitance");
    if (m.cap_out_ff < 0) throw ValidationError(m.name + ": negative output capacitance");
    if (m.cap_in_ff.size() != m.input_pins.size())
      throw ValidationError(m.name + ": cin count != input pin count");
    if (m.width_gp < 1) throw ValidationError(m.name + ": width_gp must be >= 1");

    // flavor counterpart
    Flavor twin = opposite(m.flavor);
    if (!find(m.name, m.arch, m.pattern, twin))
      throw ValidationError("missing " + to_string(twin) + " counterpart of " + m.name +
                            " " + to_string(m.arch) + " " + to_string(m.pattern));

    // non-SIO rows must match the SIO sibling's caps scaled by the pattern
    // deltas, within 0.5%
    if (m.pattern != PinAccess::SIO) {
      const CellMaster* sio = find(m.name, m.arch, PinAccess::SIO, m.flavor);
      if (sio) {
        double in_mult = pattern_cap_in_mult(m.pattern);
        double out_mult = pattern_cap_out_mult(m.pattern);
        for (std::size_t i = 0; i < m.cap_in_ff.size(); ++i) {
          double want = sio->cap_in_ff[i] * in_mult;
          if (want > 0 && std::abs(m.cap_in_ff[i] - want) / want > 0.005)
            throw ValidationError(m.name + " " + to_string(m.arch) + " " +
                                  to_string(m.pattern) +
                                  ": cap_in deviates >0.5% from SIO x pattern delta");
        }
        double want_out = sio->cap_out_ff * out_mult;
        if (want_out > 0 && std::abs(m.cap_out_ff - want_out) / want_out > 0.005)
          throw ValidationError(m.name + " " + to_string(m.arch) + " " + to_string(m.pattern) +
                                ": cap_out deviates >0.5% from SIO x pattern delta");
      }
    }
  }
}

namespace {

std::map<std::string, std::string> parse_kv_tokens(const std::vector<std::string>& toks,
                                                   std::size_t from, int lineno) {
  std::map<std::string, std::string> kv;
  for (std::size_t i = from; i < toks.size(); ++i) {
    auto eq = toks[i].find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected key=value: " + toks[i]);
    kv[toks[i].substr(0, eq)] = toks[i].substr(eq + 1);
  }
  return kv;
}

void parse_pins(const std::string& spec, CellMaster& m, int lineno) {
  // in:a,b;out:z
  for (const auto& group : split_on(spec, ';')) {
    auto colon = group.find(':');
    if (colon == std::string::npos) throw ParseError(lineno, "bad pins spec: " + spec);
    std::string kind = group.substr(0, colon);
    auto pins = split_on(group.substr(colon + 1), ',');
    if (pins.size() == 1 && pins[0].empty()) pins.clear();
    if (kind == "in")
      m.input_pins = pins;
    else if (kind == "out")
      m.output_pins = pins;
    else
      throw ParseError(lineno, "bad pin group: " + kind);
  }
}

}  // namespace

CellLibrary load_library(const std::string& text) {
  CellLibrary lib;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks[0] == "param") {
      auto kv = parse_kv_tokens(toks, 1, lineno);
      if (kv.count("cgp_nm")) lib.cgp_nm = std::stod(kv["cgp_nm"]);
      if (kv.count("track_pitch_nm")) lib.track_pitch_nm = std::stod(kv["track_pitch_nm"]);
      if (kv.count("vdd")) lib.vdd = std::stod(kv["vdd"]);
      if (kv.count("version")) lib.version = kv["version"];
      continue;
    }
    if (toks[0] != "cellmaster") throw ParseError(lineno, "unknown statement: " + toks[0]);
    if (toks.size() < 2) throw ParseError(lineno, "cellmaster needs a name");
    CellMaster m;
    m.name = toks[1];
    auto kv = parse_kv_tokens(toks, 2, lineno);
    try {
      m.arch = arch_from_string(kv.at("arch"));
      m.pattern = pattern_from_string(kv.at("pattern"));
      m.flavor = flavor_from_string(kv.at("flavor"));
      m.width_gp = std::stoi(kv.at("width_gp"));
      for (const auto& c : split_on(kv.at("cin"), ','))
        if (!c.empty()) m.cap_in_ff.push_back(std::stod(c));
      m.cap_out_ff = std::stod(kv.at("cout"));
      m.r_drive_kohm = std::stod(kv.at("rdrive"));
      m.e_internal_fj = std::stod(kv.at("eint"));
      m.intrinsic_delay_ps = std::stod(kv.at("tint"));
      parse_pins(kv.at("pins"), m, lineno);
    } catch (const std::out_of_range&) {
      throw ParseError(lineno, "cellmaster " + m.name + ": missing required field");
    } catch (const ValidationError& e) {
      throw ParseError(lineno, e.what());
    }
    if (kv.count("setup")) m.setup_ps = std::stod(kv["setup"]);
    if (kv.count("leak")) m.leak_na = std::stod(kv["leak"]);
    if (kv.count("clk")) m.clock_pin = kv["clk"];
    if (kv.count("seq")) m.is_sequential = kv["seq"] == "1";
    if (kv.count("ckbuf")) m.is_clock_buffer = kv["ckbuf"] == "1";
    lib.add(std::move(m));
  }
  lib.validate();
  return lib;
}

std::string serialize_library(const CellLibrary& lib) {
  std::ostringstream out;
  out << "param cgp_nm=" << fmt_double(lib.cgp_nm, 1)
      << "\nparam track_pitch_nm=" << fmt_double(lib.track_pitch_nm, 1)
      << "\nparam vdd=" << fmt_double(lib.vdd, 3) << "\nparam version=" << lib.version
      << "\n";
  for (const CellMaster* m : lib.masters()) {
    out << "cellmaster " << m->name << " arch=" << to_string(m->arch)
        << " pattern=" << to_string(m->pattern) << " flavor=" << to_string(m->flavor)
        << " width_gp=" << m->width_gp << " cin=";
    for (std::size_t i = 0; i < m->cap_in_ff.size(); ++i)
      out << (i ? "," : "") << fmt_double(m->cap_in_ff[i], 6);
    out << " cout=" << fmt_double(m->cap_out_ff, 6) << " rdrive="
        << fmt_double(m->r_drive_kohm, 6) << " eint=" << fmt_double(m->e_internal_fj, 6)
        << " tint=" << fmt_double(m->intrinsic_delay_ps, 6) << " pins=in:";
    for (std::size_t i = 0; i < m->input_pins.size(); ++i)
      out << (i ? "," : "") << m->input_pins[i];
    out << ";out:";
    for (std::size_t i = 0; i < m->output_pins.size(); ++i)
      out << (i ? "," : "") << m->output_pins[i];
    if (m->setup_ps > 0) out << " setup=" << fmt_double(m->setup_ps, 6);
    if (m->leak_na > 0) out << " leak=" << fmt_double(m->leak_na, 6);
    if (!m->clock_pin.empty()) out << " clk=" << m->clock_pin;
    if (m->is_sequential) out << " seq=1";
    if (m->is_clock_buffer) out << " ckbuf=1";
    out << "\n";
  }
  return out.str();
}

double cell_area_nm2(const CellMaster& m, const CellLibrary& lib) {
  return m.width_gp * lib.cgp_nm * m.height_tracks * lib.track_pitch_nm;
}

double area_ratio(const CellLibrary& lib, const std::string& name, Arch a, Arch b) {
  auto pick = [&](Arch arch) -> const CellMaster& {
    for (PinAccess p : {PinAccess::SIO, PinAccess::DO, PinAccess::DI, PinAccess::DIDO})
      if (const CellMaster* m = lib.find(name, arch, p, Flavor::TI)) return *m;
    throw ValidationError("cell " + name + " missing in " + to_string(arch));
  };
  return cell_area_nm2(pick(a), lib) / cell_area_nm2(pick(b), lib);
}

}  // namespace omnipd
