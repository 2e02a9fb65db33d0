#include <algorithm>
#include <sstream>

#include "omnipd/layout.hpp"

namespace omnipd {

int LayerSpec::level() const {
  if (is_m8()) return 8;
  return name.back() - '0';
}

LayerStack LayerStack::from_text(const std::string& text) {
  LayerStack st;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks[0] != "layer") throw ParseError(lineno, "unknown statement: " + toks[0]);
    if (toks.size() < 2) throw ParseError(lineno, "layer needs a name");
    LayerSpec ls;
    ls.name = toks[1];
    for (std::size_t i = 2; i < toks.size(); ++i) {
      auto eq = toks[i].find('=');
      if (eq == std::string::npos) throw ParseError(lineno, "expected key=value: " + toks[i]);
      std::string k = toks[i].substr(0, eq), v = toks[i].substr(eq + 1);
      if (k == "pitch")
        ls.pitch_nm = std::stod(v);
      else if (k == "width")
        ls.width_nm = std::stod(v);
      else if (k == "rsq")
        ls.rsq_ohm = std::stod(v);
      else if (k == "cap")
        ls.cap_ff_um = std::stod(v);
      else if (k == "dir")
        ls.dir = v.empty() ? 'H' : v[0];
      else if (k == "allow")
        ls.allow = v == "sig" ? LayerUse::Signal : v == "pwr" ? LayerUse::Power : LayerUse::IoOnly;
      else
        throw ParseError(lineno, "unknown layer field: " + k);
    }
    st.layers.push_back(std::move(ls));
  }
  st.validate();
  return st;
}

std::string LayerStack::serialize() const {
  std::ostringstream out;
  for (const LayerSpec& l : layers) {
    out << "layer " << l.name << " pitch=" << fmt_double(l.pitch_nm, 1)
        << " width=" << fmt_double(l.width_nm, 1) << " rsq=" << fmt_double(l.rsq_ohm, 3)
        << " cap=" << fmt_double(l.cap_ff_um, 3) << " dir=" << l.dir << " allow="
        << (l.allow == LayerUse::Signal ? "sig" : l.allow == LayerUse::Power ? "pwr" : "io")
        << "\n";
  }
  return out.str();
}

LayerStack LayerStack::shipped_default() {
  // Extraction-order stack: TM1..TM7, then the intermediate M8, then
  // BM7..BM1 mirroring the top side. Representative sub-2nm-class RC.
  auto mk = [](std::string name, double pitch, double width, double rsq, double cap, char dir,
               LayerUse use) {
    LayerSpec l;
    l.name = std::move(name);
    l.pitch_nm = pitch;
    l.width_nm = width;
    l.rsq_ohm = rsq;
    l.cap_ff_um = cap;
    l.dir = dir;
    l.allow = use;
    return l;
  };
  LayerStack st;
  st.layers.push_back(mk("TM1", 18, 9, 8.0, 0.21, 'H', LayerUse::Power));
  st.layers.push_back(mk("TM2", 20, 10, 20.0, 0.20, 'H', LayerUse::Signal));
  st.layers.push_back(mk("TM3", 20, 10, 20.0, 0.20, 'V', LayerUse::Signal));
  st.layers.push_back(mk("TM4", 28, 14, 11.0, 0.21, 'H', LayerUse::Signal));
  st.layers.push_back(mk("TM5", 28, 14, 11.0, 0.21, 'V', LayerUse::Signal));
  st.layers.push_back(mk("TM6", 40, 20, 5.0, 0.22, 'H', LayerUse::Signal));
  st.layers.push_back(mk("TM7", 40, 20, 5.0, 0.22, 'V', LayerUse::Signal));
  st.layers.push_back(mk("M8", 80, 40, 0.5, 0.24, 'H', LayerUse::IoOnly));
  st.layers.push_back(mk("BM7", 40, 20, 5.0, 0.22, 'V', LayerUse::Signal));
  st.layers.push_back(mk("BM6", 40, 20, 5.0, 0.22, 'H', LayerUse::Signal));
  st.layers.push_back(mk("BM5", 28, 14, 11.0, 0.21, 'V', LayerUse::Signal));
  st.layers.push_back(mk("BM4", 28, 14, 11.0, 0.21, 'H', LayerUse::Signal));
  st.layers.push_back(mk("BM3", 20, 10, 20.0, 0.20, 'V', LayerUse::Signal));
  st.layers.push_back(mk("BM2", 20, 10, 20.0, 0.20, 'H', LayerUse::Signal));
  st.layers.push_back(mk("BM1", 18, 9, 8.0, 0.21, 'H', LayerUse::Power));
  return st;
}

int LayerStack::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < layers.size(); ++i)
    if (layers[i].name == name) return static_cast<int>(i);
  throw ValidationError("no such layer: " + name);
}

int LayerStack::m8_index() const { return index_of("M8"); }

std::vector<int> LayerStack::signal_layers(Side s) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& l = layers[i];
    if (l.allow != LayerUse::Signal) continue;
    if (l.is_m8()) continue;
    if (l.side() != s) continue;
    out.push_back(static_cast<int>(i));
  }
  std::sort(out.begin(), out.end(),
            [&](int a, int b) { return layers[a].level() < layers[b].level(); });
  return out;
}

double LayerStack::pdn_derate(int layer_idx, PdnStyle pdn) const {
  if (pdn == PdnStyle::Backside) return 0.0;
  const LayerSpec& l = layers[layer_idx];
  if (l.allow != LayerUse::Signal || l.is_m8()) return 0.0;
  // 6% on the lowest routing layer rising linearly to 15% on the highest
  auto sig = signal_layers(l.side());
  int lo = layers[sig.front()].level(), hi = layers[sig.back()].level();
  if (hi == lo) return 0.06;
  double t = double(l.level() - lo) / double(hi - lo);
  return 0.06 + t * (0.15 - 0.06);
}

void LayerStack::validate() const {
  bool has_m8 = false;
  for (const LayerSpec& l : layers) {
    if (l.pitch_nm <= 0 || l.width_nm <= 0 || l.rsq_ohm <= 0 || l.cap_ff_um < 0)
      throw ValidationError("layer " + l.name + ": non-positive geometry/RC");
    if (l.is_m8()) {
      has_m8 = true;
      if (l.allow != LayerUse::IoOnly)
        throw ValidationError("M8 must be io-only (signal and clock prohibited)");
    }
  }
  if (!has_m8) throw ValidationError("stack must include the intermediate M8 layer");
  // the BM stack mirrors TM parameters
  for (const LayerSpec& l : layers) {
    if (l.name[0] != 'B') continue;
    std::string twin = "T" + l.name.substr(1);
    for (const LayerSpec& t : layers) {
      if (t.name != twin) continue;
      if (t.pitch_nm != l.pitch_nm || t.width_nm != l.width_nm || t.rsq_ohm != l.rsq_ohm ||
          t.cap_ff_um != l.cap_ff_um)
        throw ValidationError("mirrored stack mismatch: " + l.name + " vs " + twin);
    }
  }
}

}  // namespace omnipd
