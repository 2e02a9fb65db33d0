#include "omnipd/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace omnipd {

using json = nlohmann::json;

std::string timing_csv(const TimingResult& t) {
  std::ostringstream out;
  out << "endpoint,slack_ps,arrival_ps,required_ps,cell_ps,wire_ps,setup_ps,skew_ps\n";
  for (const TimingPath& p : t.top_paths) {
    out << p.endpoint.str() << ',' << fmt_double(p.slack_ps, 4) << ','
        << fmt_double(p.arrival_ps, 4) << ',' << fmt_double(p.required_ps, 4) << ','
        << fmt_double(p.cell_delay_ps, 4) << ',' << fmt_double(p.wire_delay_ps, 4) << ','
        << fmt_double(p.setup_ps, 4) << ',' << fmt_double(p.skew_ps, 4) << "\n";
  }
  return out.str();
}

std::string energy_csv(const EnergyResult& e) {
  std::ostringstream out;
  out << "category,energy_fj,fraction\n";
  out << "internal," << fmt_double(e.internal_fj, 6) << ','
      << fmt_double(e.fraction(e.internal_fj), 6) << "\n";
  out << "pin_switching," << fmt_double(e.pin_switching_fj, 6) << ','
      << fmt_double(e.fraction(e.pin_switching_fj), 6) << "\n";
  out << "net_switching," << fmt_double(e.net_switching_fj, 6) << ','
      << fmt_double(e.fraction(e.net_switching_fj), 6) << "\n";
  out << "leakage," << fmt_double(e.leakage_fj, 6) << ','
      << fmt_double(e.fraction(e.leakage_fj), 6) << "\n";
  out << "total," << fmt_double(e.total_fj, 6) << ",1.000000\n";
  return out.str();
}

std::string area_csv(const AreaReport& a) {
  std::ostringstream out;
  out << "master,area_frac,ref_area_frac,count_frac,ref_count_frac\n";
  for (const AreaRow& r : a.rows)
    out << r.master << ',' << fmt_double(r.area_frac, 6) << ','
        << fmt_double(r.ref_area_frac, 6) << ',' << fmt_double(r.count_frac, 6) << ','
        << fmt_double(r.ref_count_frac, 6) << "\n";
  return out.str();
}

std::string wirelength_csv(const std::map<std::string, double>& by_layer) {
  std::ostringstream out;
  out << "layer,wirelength_um\n";
  for (const auto& [name, len] : by_layer) out << name << ',' << fmt_double(len, 3) << "\n";
  return out.str();
}

std::string timing_json(const TimingResult& t) {
  json j;
  j["period_ps"] = t.period_ps;
  j["worst_slack_ps"] = t.worst_slack_ps;
  j["avg_slack_top_ps"] = t.avg_slack_top_ps;
  j["clock_skew_ps"] = t.clock_skew_ps;
  j["achieved_delay_ps"] = t.achieved_delay_ps;
  j["endpoints"] = t.endpoint_count;
  return j.dump(2);
}

std::string energy_json(const EnergyResult& e) {
  json j;
  j["internal_fj"] = e.internal_fj;
  j["pin_switching_fj"] = e.pin_switching_fj;
  j["net_switching_fj"] = e.net_switching_fj;
  j["leakage_fj"] = e.leakage_fj;
  j["total_fj"] = e.total_fj;
  return j.dump(2);
}

namespace {

struct SvgCanvas {
  std::ostringstream body;
  double w, h;

  SvgCanvas(double w_, double h_) : w(w_), h(h_) {}

  std::string finish() {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << " " << h << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body.str() << "</svg>\n";
    return out.str();
  }

  void circle(double x, double y, double r, const std::string& fill,
              const std::string& stroke = "none") {
    body << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"" << r << "\" fill=\"" << fill
         << "\" stroke=\"" << stroke << "\"/>\n";
  }
  void line(double x0, double y0, double x1, double y1, const std::string& color,
            double width = 1.0) {
    body << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y1
         << "\" stroke=\"" << color << "\" stroke-width=\"" << width << "\"/>\n";
  }
  void rect(double x, double y, double w_, double h_, const std::string& fill) {
    body << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w_ << "\" height=\"" << h_
         << "\" fill=\"" << fill << "\"/>\n";
  }
  void text(double x, double y, const std::string& s, int size = 11) {
    body << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"" << size
         << "\" font-family=\"sans-serif\">" << s << "</text>\n";
  }
};

struct Scale {
  double lo, hi, a, b;  // maps [lo,hi] -> [a,b]
  double operator()(double v) const {
    if (hi == lo) return (a + b) / 2;
    return a + (v - lo) / (hi - lo) * (b - a);
  }
};

}  // namespace

std::string pareto_svg(const std::vector<DeviceMetrics>& all,
                       const std::vector<DeviceMetrics>& frontier, const DeviceMetrics& best) {
  SvgCanvas svg(520, 400);
  double dlo = 1e18, dhi = -1e18, elo = 1e18, ehi = -1e18;
  for (const DeviceMetrics& m : all) {
    if (m.feasible != Feasibility::Ok) continue;
    dlo = std::min(dlo, m.delay_ps);
    dhi = std::max(dhi, m.delay_ps);
    elo = std::min(elo, m.energy_fj);
    ehi = std::max(ehi, m.energy_fj);
  }
  Scale sx{dlo, dhi, 60, 500};
  Scale sy{elo, ehi, 370, 20};
  svg.line(60, 370, 500, 370, "black");
  svg.line(60, 370, 60, 20, "black");
  svg.text(220, 395, "delay (ps/stage)");
  svg.text(5, 15, "energy (fJ/stage)");
  for (const DeviceMetrics& m : all)
    if (m.feasible == Feasibility::Ok)
      svg.circle(sx(m.delay_ps), sy(m.energy_fj), 2.5, "#9ecae1");
  for (std::size_t i = 0; i + 1 < frontier.size(); ++i)
    svg.line(sx(frontier[i].delay_ps), sy(frontier[i].energy_fj),
             sx(frontier[i + 1].delay_ps), sy(frontier[i + 1].energy_fj), "#3182bd", 1.5);
  for (const DeviceMetrics& m : frontier)
    svg.circle(sx(m.delay_ps), sy(m.energy_fj), 3.5, "#3182bd");
  svg.circle(sx(best.delay_ps), sy(best.energy_fj), 5.5, "none", "#d62728");
  svg.text(sx(best.delay_ps) + 8, sy(best.energy_fj) - 8, "min EDP");
  return svg.finish();
}

std::string sweep_svg(const FlowResult& r) {
  SvgCanvas svg(520, 400);
  if (r.rows.empty()) return svg.finish();
  double plo = 1e18, phi = -1e18, elo = 1e18, ehi = -1e18;
  for (const FlowRow& row : r.rows) {
    plo = std::min(plo, row.target_period_ps);
    phi = std::max(phi, row.target_period_ps);
    elo = std::min(elo, row.edp);
    ehi = std::max(ehi, row.edp);
  }
  Scale sx{plo, phi, 60, 500};
  Scale sy{elo, ehi, 370, 20};
  svg.line(60, 370, 500, 370, "black");
  svg.line(60, 370, 60, 20, "black");
  svg.text(200, 395, "target clock period (ps)");
  svg.text(5, 15, "EDP (fJ*ps)");
  for (std::size_t i = 0; i + 1 < r.rows.size(); ++i)
    svg.line(sx(r.rows[i].target_period_ps), sy(r.rows[i].edp),
             sx(r.rows[i + 1].target_period_ps), sy(r.rows[i + 1].edp), "#888", 1.0);
  for (const FlowRow& row : r.rows) {
    // hollow symbols mark rows that failed a validity gate
    if (row.valid)
      svg.circle(sx(row.target_period_ps), sy(row.edp), 4, "#3182bd");
    else
      svg.circle(sx(row.target_period_ps), sy(row.edp), 4, "white", "#3182bd");
  }
  if (r.min_edp_row) {
    const FlowRow& b = r.rows[*r.min_edp_row];
    svg.circle(sx(b.target_period_ps), sy(b.edp), 7, "none", "#d62728");
  }
  return svg.finish();
}

std::string area_svg(const AreaReport& a) {
  const double bar_w = 14, gap = 6, x0 = 50;
  double width = x0 + a.rows.size() * (2 * bar_w + gap) + 40;
  SvgCanvas svg(width, 320);
  double maxv = 1e-12;
  for (const AreaRow& r : a.rows) maxv = std::max({maxv, r.area_frac, r.ref_area_frac});
  Scale sy{0, maxv, 280, 30};
  svg.line(x0 - 10, 280, width - 20, 280, "black");
  double x = x0;
  for (const AreaRow& r : a.rows) {
    svg.rect(x, sy(r.ref_area_frac), bar_w, 280 - sy(r.ref_area_frac), "#bbb");
    svg.rect(x + bar_w, sy(r.area_frac), bar_w, 280 - sy(r.area_frac), "#3182bd");
    svg.body << "<text x=\"" << x << "\" y=\"296\" font-size=\"8\" font-family=\"sans-serif\" "
             << "transform=\"rotate(45 " << x << " 296)\">" << r.master << "</text>\n";
    x += 2 * bar_w + gap;
  }
  svg.text(x0, 20, "per-master area, reference (grey) vs design (blue)");
  return svg.finish();
}

std::string breakdown_svg(const DelayBreakdown& d, const EnergyResult& e) {
  SvgCanvas svg(520, 190);
  const char* colors[] = {"#3182bd", "#9ecae1", "#fd8d3c", "#bdbdbd"};
  auto stacked = [&](double y, const std::vector<std::pair<std::string, double>>& parts) {
    double x = 110;
    int ci = 0;
    for (const auto& [label, frac] : parts) {
      double w = std::max(0.0, frac) * 380.0;
      svg.rect(x, y, w, 26, colors[ci % 4]);
      if (w > 36) svg.text(x + 3, y + 17, label + " " + fmt_double(frac * 100, 1) + "%", 10);
      x += w;
      ++ci;
    }
  };
  svg.text(12, 52, "delay");
  stacked(34, {{"cell", d.cell}, {"wire", d.wire}, {"setup", d.setup}, {"skew", d.skew}});
  svg.text(12, 122, "energy");
  stacked(104, {{"internal", e.fraction(e.internal_fj)},
                {"pins", e.fraction(e.pin_switching_fj)},
                {"nets", e.fraction(e.net_switching_fj)},
                {"leak", e.fraction(e.leakage_fj)}});
  svg.text(110, 160, "fractions of achieved delay (top) and total energy (bottom)", 10);
  return svg.finish();
}

std::string wirelength_svg(const std::map<std::string, double>& by_layer) {
  const double bar_w = 26, gap = 10, x0 = 60;
  double width = x0 + by_layer.size() * (bar_w + gap) + 30;
  SvgCanvas svg(width, 320);
  double maxv = 1e-12;
  for (auto& [k, v] : by_layer) maxv = std::max(maxv, v);
  Scale sy{0, maxv, 280, 30};
  svg.line(x0 - 10, 280, width - 10, 280, "black");
  double x = x0;
  for (auto& [k, v] : by_layer) {
    svg.rect(x, sy(v), bar_w, 280 - sy(v), "#3182bd");
    svg.text(x, 296, k, 9);
    x += bar_w + gap;
  }
  svg.text(x0, 20, "wirelength per layer (um)");
  return svg.finish();
}

std::string congestion_svg(const RoutingState& rs, const std::string& layer_name) {
  int li = rs.stack().index_of(layer_name);
  const double cell = std::max(2.0, 560.0 / std::max(rs.nx(), rs.ny()));
  SvgCanvas svg(rs.nx() * cell + 20, rs.ny() * cell + 40);
  for (int x = 0; x < rs.nx(); ++x)
    for (int y = 0; y < rs.ny(); ++y) {
      int cap = rs.capacity(li, x, y);
      double u = cap > 0 ? double(rs.usage(li, x, y)) / cap : 0.0;
      u = std::min(1.5, u);
      int red = static_cast<int>(std::min(255.0, 90 + 110 * u));
      int green = static_cast<int>(std::max(0.0, 220 - 140 * u));
      std::ostringstream color;
      color << "rgb(" << red << "," << green << ",120)";
      svg.rect(10 + x * cell, 10 + (rs.ny() - 1 - y) * cell, cell, cell, color.str());
    }
  svg.text(10, rs.ny() * cell + 32, layer_name + " usage/capacity");
  return svg.finish();
}

}  // namespace omnipd
