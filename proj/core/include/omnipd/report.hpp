#pragma once

#include <map>
#include <string>
#include <vector>

#include "omnipd/analysis.hpp"
#include "omnipd/dtco.hpp"
#include "omnipd/flow.hpp"

namespace omnipd {

std::string timing_csv(const TimingResult& t);
std::string energy_csv(const EnergyResult& e);
std::string area_csv(const AreaReport& a);
std::string wirelength_csv(const std::map<std::string, double>& by_layer);

std::string timing_json(const TimingResult& t);
std::string energy_json(const EnergyResult& e);

/// Energy-vs-delay scatter with the pareto frontier polyline and the
/// min-EDP point marked.
std::string pareto_svg(const std::vector<DeviceMetrics>& all,
                       const std::vector<DeviceMetrics>& frontier,
                       const DeviceMetrics& best);

/// EDP vs target clock period; invalid rows drawn hollow.
std::string sweep_svg(const FlowResult& r);

/// Stacked per-master area bars (design vs reference).
std::string area_svg(const AreaReport& a);

/// Stacked delay and energy composition bars for one run.
std::string breakdown_svg(const DelayBreakdown& d, const EnergyResult& e);

/// Per-layer wirelength histogram.
std::string wirelength_svg(const std::map<std::string, double>& by_layer);

/// Per-layer congestion heatmap (usage/capacity per gcell).
std::string congestion_svg(const RoutingState& rs, const std::string& layer_name);

}  // namespace omnipd
