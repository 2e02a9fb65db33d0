#include "omnipd/fixtures.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <vector>

namespace omnipd {

namespace {

// Accumulates connections per driver, then emits one net per driver.
struct NetlistWriter {
  std::ostringstream head;
  std::map<std::string, std::vector<std::string>> loads_of;  // driver -> loads
  std::vector<std::string> driver_order;
  std::vector<std::string> clk_loads;

  void port(const std::string& name, bool in, const std::string& side) {
    head << "port " << name << ' ' << (in ? "in" : "out") << ' ' << side << "\n";
  }
  void cell(const std::string& id, const std::string& master) {
    head << "cell " << id << ' ' << master << "\n";
  }
  void connect(const std::string& driver, const std::string& load) {
    auto it = loads_of.find(driver);
    if (it == loads_of.end()) {
      driver_order.push_back(driver);
      loads_of[driver] = {load};
    } else {
      it->second.push_back(load);
    }
  }
  void clock_sink(const std::string& pin) { clk_loads.push_back(pin); }

  std::string str() const {
    std::ostringstream out;
    out << head.str();
    int next = 0;
    for (const std::string& d : driver_order) {
      out << "net n" << next++ << ' ' << d;
      for (const std::string& l : loads_of.at(d)) out << ' ' << l;
      out << "\n";
    }
    if (!clk_loads.empty()) {
      out << "net clk_net clock clk";
      for (const std::string& l : clk_loads) out << ' ' << l;
      out << "\n";
    }
    return out.str();
  }
};

std::string side_of(int i) { return i % 2 == 0 ? "top" : "bottom"; }

}  // namespace

std::string make_ripple_adder(int bits) {
  NetlistWriter w;
  w.port("clk", true, "top");
  for (int i = 0; i < bits; ++i) {
    w.port("a" + std::to_string(i), true, side_of(i));
    w.port("b" + std::to_string(i), true, side_of(i + 1));
    w.port("s" + std::to_string(i), false, side_of(i));
  }
  w.port("cout", false, "top");

  auto dff = [&](const std::string& id) {
    w.cell(id, "DFFD1");
    w.clock_sink(id + ".CK");
  };

  for (int i = 0; i < bits; ++i) {
    dff("ra" + std::to_string(i));
    dff("rb" + std::to_string(i));
    w.connect("a" + std::to_string(i), "ra" + std::to_string(i) + ".D");
    w.connect("b" + std::to_string(i), "rb" + std::to_string(i) + ".D");
  }
  w.cell("tie0", "TIELO");
  std::string carry = "tie0.Z";
  for (int i = 0; i < bits; ++i) {
    std::string fa = "fa" + std::to_string(i);
    w.cell(fa, "FAD1");
    w.connect("ra" + std::to_string(i) + ".Q", fa + ".A");
    w.connect("rb" + std::to_string(i) + ".Q", fa + ".B");
    w.connect(carry, fa + ".CI");
    carry = fa + ".CO";
    dff("rs" + std::to_string(i));
    w.connect(fa + ".S", "rs" + std::to_string(i) + ".D");
    w.connect("rs" + std::to_string(i) + ".Q", "s" + std::to_string(i));
  }
  dff("rc");
  w.connect(carry, "rc.D");
  w.connect("rc.Q", "cout");
  return w.str();
}

std::string make_array_multiplier(int n) {
  NetlistWriter w;
  w.port("clk", true, "top");
  for (int i = 0; i < n; ++i) {
    w.port("x" + std::to_string(i), true, side_of(i));
    w.port("y" + std::to_string(i), true, side_of(i + 1));
  }
  for (int i = 0; i < 2 * n; ++i) w.port("p" + std::to_string(i), false, side_of(i));

  auto dff = [&](const std::string& id) {
    w.cell(id, "DFFD1");
    w.clock_sink(id + ".CK");
  };

  for (int i = 0; i < n; ++i) {
    dff("rx" + std::to_string(i));
    dff("ry" + std::to_string(i));
    w.connect("x" + std::to_string(i), "rx" + std::to_string(i) + ".D");
    w.connect("y" + std::to_string(i), "ry" + std::to_string(i) + ".D");
  }

  std::vector<std::vector<std::string>> col(2 * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::string g = "pp_" + std::to_string(i) + "_" + std::to_string(j);
      w.cell(g, "AN2D1");
      w.connect("rx" + std::to_string(i) + ".Q", g + ".A1");
      w.connect("ry" + std::to_string(j) + ".Q", g + ".A2");
      col[i + j].push_back(g + ".Z");
    }

  // carry-save reduction to two operands, then ripple through FAs
  int fa_id = 0;
  for (int c = 0; c < 2 * n; ++c) {
    while (col[c].size() > 2) {
      std::string fa = "cs" + std::to_string(fa_id++);
      w.cell(fa, "FAD1");
      w.connect(col[c][0], fa + ".A");
      w.connect(col[c][1], fa + ".B");
      w.connect(col[c][2], fa + ".CI");
      col[c].erase(col[c].begin(), col[c].begin() + 3);
      col[c].push_back(fa + ".S");
      if (c + 1 < 2 * n) col[c + 1].push_back(fa + ".CO");
    }
  }
  w.cell("tiec", "TIELO");
  std::string carry = "tiec.Z";
  int tie_id = 0;
  for (int c = 0; c < 2 * n; ++c) {
    std::string sum;
    if (col[c].empty()) {
      sum = carry;  // propagate whatever carry is left
      carry = "";
    } else if (col[c].size() == 1 && carry.empty()) {
      sum = col[c][0];
    } else {
      std::string fa = "rp" + std::to_string(fa_id++);
      w.cell(fa, "FAD1");
      w.connect(col[c][0], fa + ".A");
      if (col[c].size() > 1) {
        w.connect(col[c][1], fa + ".B");
      } else {
        std::string t = "tz" + std::to_string(tie_id++);
        w.cell(t, "TIELO");
        w.connect(t + ".Z", fa + ".B");
      }
      if (!carry.empty()) {
        w.connect(carry, fa + ".CI");
      } else {
        std::string t = "tz" + std::to_string(tie_id++);
        w.cell(t, "TIELO");
        w.connect(t + ".Z", fa + ".CI");
      }
      carry = fa + ".CO";
      sum = fa + ".S";
    }
    dff("rpp" + std::to_string(c));
    w.connect(sum, "rpp" + std::to_string(c) + ".D");
    w.connect("rpp" + std::to_string(c) + ".Q", "p" + std::to_string(c));
  }
  return w.str();
}

std::string make_crypto_round(int width, int layers, std::uint64_t seed) {
  Rng rng(seed);
  NetlistWriter w;
  w.port("clk", true, "top");
  for (int i = 0; i < width; ++i) w.port("din" + std::to_string(i), true, side_of(i));
  for (int i = 0; i < width; ++i) w.port("dout" + std::to_string(i), false, side_of(i + 1));

  auto dff = [&](const std::string& id) {
    w.cell(id, "DFFD1");
    w.clock_sink(id + ".CK");
  };

  std::vector<std::string> bus(width);
  for (int i = 0; i < width; ++i) {
    dff("rin" + std::to_string(i));
    w.connect("din" + std::to_string(i), "rin" + std::to_string(i) + ".D");
    bus[i] = "rin" + std::to_string(i) + ".Q";
  }

  const char* two_in[] = {"XOR2D1", "XNR2D1", "ND2D1", "NR2D1", "AN2D1", "OR2D1"};
  int cid = 0;
  for (int layer = 0; layer < layers; ++layer) {
    std::vector<std::string> next(width);
    std::vector<int> perm(width);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int i = 0; i < width; ++i) {
      std::string id = "g" + std::to_string(cid++);
      int a = perm[i], b = perm[(i + 1) % width];
      if (rng() % 7 == 0) {
        int s = perm[(i + 2) % width];
        w.cell(id, "MUX2D1");
        w.connect(bus[a], id + ".I0");
        w.connect(bus[b], id + ".I1");
        w.connect(bus[s], id + ".S");
      } else {
        w.cell(id, two_in[rng() % 6]);
        w.connect(bus[a], id + ".A1");
        w.connect(bus[b], id + ".A2");
      }
      next[i] = id + ".Z";
    }
    // buffer/inverter sprinkles, the datapath flip pass's subject
    for (int i = 0; i < width; ++i) {
      if (rng() % 5 == 0) {
        std::string id = "g" + std::to_string(cid++);
        w.cell(id, rng() % 2 ? "INVD1" : "BUFD1");
        w.connect(next[i], id + ".A");
        next[i] = id + ".Z";
      }
    }
    bus = next;
  }
  for (int i = 0; i < width; ++i) {
    dff("rout" + std::to_string(i));
    w.connect(bus[i], "rout" + std::to_string(i) + ".D");
    w.connect("rout" + std::to_string(i) + ".Q", "dout" + std::to_string(i));
  }
  return w.str();
}

std::string make_congested(int cells, std::uint64_t seed) {
  // Broadcast gadgets over a free-signal pool: each gadget pulls three
  // far-away signals and fans one of them out to a co-located load triple.
  // Every signal is consumed exactly once, so clusters are exactly the load
  // triples while the broadcast trunks run across the whole core. This is
  // the shape on which a mixed-flavor triple doubles its trunk metal.
  Rng rng(seed);
  NetlistWriter w;
  w.port("clk", true, "top");
  const int width = std::max(12, cells / 15);
  for (int i = 0; i < width; ++i) w.port("i" + std::to_string(i), true, side_of(i));
  for (int i = 0; i < width; ++i) w.port("o" + std::to_string(i), false, side_of(i + 1));

  std::vector<std::string> pool;
  for (int i = 0; i < width; ++i) {
    w.cell("r" + std::to_string(i), "DFFD1");
    w.clock_sink("r" + std::to_string(i) + ".CK");
    w.connect("i" + std::to_string(i), "r" + std::to_string(i) + ".D");
    pool.push_back("r" + std::to_string(i) + ".Q");
  }
  auto draw = [&](std::vector<std::string>& from) {
    std::uniform_int_distribution<std::size_t> d(0, from.size() - 1);
    std::size_t k = d(rng);
    std::string s = from[k];
    from.erase(from.begin() + static_cast<long>(k));
    return s;
  };

  const char* masters[] = {"XOR2D1", "XNR2D1", "ND2D1", "NR2D1", "AN2D1", "OR2D1"};
  int gadgets = std::max(1, (cells - 2 * width) / 3);
  for (int g = 0; g < gadgets; ++g) {
    std::string sa = draw(pool), sb = draw(pool), sc = draw(pool);
    std::string l1 = "g" + std::to_string(g) + "a";
    std::string l2 = "g" + std::to_string(g) + "b";
    std::string l3 = "g" + std::to_string(g) + "c";
    w.cell(l1, rng() % 2 ? "INVD1" : "BUFD1");
    w.cell(l2, masters[rng() % 6]);
    w.cell(l3, masters[rng() % 6]);
    w.connect(sa, l1 + ".A");
    w.connect(sa, l2 + ".A1");
    w.connect(sa, l3 + ".A1");
    w.connect(sb, l2 + ".A2");
    w.connect(sc, l3 + ".A2");
    pool.push_back(l1 + ".Z");
    pool.push_back(l2 + ".Z");
    pool.push_back(l3 + ".Z");
  }

  for (int i = 0; i < width; ++i) {
    w.cell("ro" + std::to_string(i), "DFFD1");
    w.clock_sink("ro" + std::to_string(i) + ".CK");
    w.connect(draw(pool), "ro" + std::to_string(i) + ".D");
    w.connect("ro" + std::to_string(i) + ".Q", "o" + std::to_string(i));
  }
  return w.str();
}

std::string make_random_netlist(int max_cells, std::uint64_t seed) {
  Rng rng(seed);
  NetlistWriter w;
  std::uniform_int_distribution<int> ncells_d(1, std::max(1, max_cells));
  int ncells = ncells_d(rng);

  w.port("clk", true, "top");
  int nports = 1 + static_cast<int>(rng() % 3);
  std::vector<std::string> signals;
  for (int i = 0; i < nports; ++i) {
    w.port("in" + std::to_string(i), true, side_of(static_cast<int>(rng() % 2)));
    signals.push_back("in" + std::to_string(i));
  }

  const char* combs[] = {"INVD1", "BUFD1", "ND2D1", "NR2D1", "XOR2D1", "AN2D1"};
  bool any_seq = false;
  for (int i = 0; i < ncells; ++i) {
    std::string id = "u" + std::to_string(i);
    if (rng() % 5 == 0) {
      w.cell(id, "DFFD1");
      w.clock_sink(id + ".CK");
      any_seq = true;
      w.connect(signals[rng() % signals.size()], id + ".D");
      signals.push_back(id + ".Q");
    } else {
      std::string m = combs[rng() % 6];
      w.cell(id, m);
      int nin = (m == "INVD1" || m == "BUFD1") ? 1 : 2;
      for (int k = 0; k < nin; ++k)
        w.connect(signals[rng() % signals.size()], id + "." + (nin == 1 ? "A" : (k == 0 ? "A1" : "A2")));
      signals.push_back(id + ".Z");
    }
  }
  w.port("out0", false, "bottom");
  w.connect(signals.back(), "out0");
  (void)any_seq;
  return w.str();
}

}  // namespace omnipd
