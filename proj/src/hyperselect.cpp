#include "coast/hyperselect.hpp"

#include "coast/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace coast::hyperselect {
namespace {

bool near(double a, double b) { return std::abs(a - b) < 1e-9; }

double band_distance(double overlap) {
  if (overlap >= kOverlapBandLow && overlap <= kOverlapBandHigh) return 0.0;
  return overlap < kOverlapBandLow ? kOverlapBandLow - overlap : overlap - kOverlapBandHigh;
}

}  // namespace

std::optional<SweepGrid> preset(const std::string& name) {
  using s = steering_strategy;
  if (name == "pi05-metaworld" || name == "pi05-libero")
    return SweepGrid{{0, 5, 11, 17},
                     {0.1, 0.5, 1.0, 2.0, 10.0},
                     {0.1, 0.3, 0.5},
                     {s::global, s::per_step, s::positive_only}};
  if (name == "pi05-robocasa")
    return SweepGrid{{0, 5, 11, 17},
                     {0.1, 0.5, 1.0, 2.0, 10.0},
                     {0.1, 0.3, 0.5},
                     {s::global, s::per_step}};
  if (name == "gr00t-robocasa")
    return SweepGrid{{0, 5, 10, 15},
                     {0.1, 0.3, 0.5, 0.8, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0},
                     {0.1, 0.3, 0.5},
                     {s::global, s::per_step, s::positive_only}};
  return std::nullopt;
}

std::vector<std::string> preset_names() {
  return {"pi05-metaworld", "pi05-libero", "pi05-robocasa", "gr00t-robocasa"};
}

Stage1Result stage1_layer(const std::map<int, std::vector<Conceptor>>& per_layer_contrastive) {
  require(!per_layer_contrastive.empty(), errc::empty_input, "stage 1 needs at least one layer");
  Stage1Result out;
  bool first = true;
  for (const auto& [layer, tasks] : per_layer_contrastive) {
    require(!tasks.empty(), errc::empty_input,
            "stage 1: layer " + std::to_string(layer) + " has no tasks");
    double acc = 0.0;
    for (const auto& c : tasks) acc += diagnostics::quota(c);
    const double mean = acc / static_cast<double>(tasks.size());
    out.mean_quota[layer] = mean;
    // strict > keeps the smallest layer on ties (map iterates ascending)
    if (first || mean > out.mean_quota[out.layer]) {
      out.layer = layer;
      first = false;
    }
  }
  return out;
}

Stage2Result stage2_apertures(
    const std::map<double, std::vector<std::pair<Conceptor, Conceptor>>>& per_aperture_pairs) {
  require(!per_aperture_pairs.empty(), errc::empty_input, "stage 2 needs at least one aperture");
  Stage2Result out;
  for (const auto& [alpha, pairs] : per_aperture_pairs) {
    require(!pairs.empty(), errc::empty_input, "stage 2: aperture has no task pairs");
    double acc = 0.0;
    for (const auto& [c_s, c_f] : pairs) acc += diagnostics::overlap(c_s, c_f);
    out.mean_overlap[alpha] = acc / static_cast<double>(pairs.size());
  }
  for (const auto& [alpha, ov] : out.mean_overlap)
    if (ov >= kOverlapBandLow && ov <= kOverlapBandHigh) out.kept.push_back(alpha);
  if (out.kept.empty()) {
    // fallback: single closest aperture, ties toward the larger alpha
    double best_alpha = 0.0, best_dist = 0.0;
    bool first = true;
    for (const auto& [alpha, ov] : out.mean_overlap) {
      const double dist = band_distance(ov);
      if (first || dist < best_dist - 1e-15 || (std::abs(dist - best_dist) <= 1e-15 &&
                                                alpha > best_alpha)) {
        best_alpha = alpha;
        best_dist = dist;
        first = false;
      }
    }
    out.kept.push_back(best_alpha);
  }
  return out;
}

std::vector<double> stage3_betas(const SweepGrid& grid) {
  require(!grid.betas.empty(), errc::empty_input, "stage 3 needs a beta grid");
  std::vector<double> kept;
  for (double b : grid.betas)
    if (near(b, 0.1) || near(b, 0.3)) kept.push_back(b);
  if (kept.empty()) kept.push_back(*std::min_element(grid.betas.begin(), grid.betas.end()));
  std::sort(kept.begin(), kept.end());
  return kept;
}

SelectionResult assemble(const SweepGrid& grid, const Stage1Result& s1, const Stage2Result& s2) {
  SelectionResult out;
  out.layer = s1.layer;
  out.apertures = s2.kept;
  out.betas = stage3_betas(grid);
  out.layer_quotas = s1.mean_quota;
  out.aperture_overlaps = s2.mean_overlap;
  const double full = static_cast<double>(grid.layers.size()) * grid.apertures.size() *
                      grid.betas.size() * std::max<size_t>(grid.strategies.size(), 1);
  const double selected = 1.0 * out.apertures.size() * out.betas.size() *
                          std::max<size_t>(grid.strategies.size(), 1);
  out.grid_fraction = selected / full;
  return out;
}

OracleGap oracle_gap(const SweepGrid& grid, const SelectionResult& selected,
                     const std::map<GridConfig, double>& full_eval) {
  OracleGap gap;
  gap.grid_fraction = selected.grid_fraction;
  bool any = false, any_sel = false;
  for (int layer : grid.layers)
    for (double alpha : grid.apertures)
      for (double beta : grid.betas)
        for (auto strat : grid.strategies) {
          const GridConfig cfg{layer, alpha, beta, strat};
          auto it = full_eval.find(cfg);
          require(it != full_eval.end(), errc::missing_configs,
                  "full evaluation is missing a grid configuration");
          if (!any || it->second > gap.oracle_sr) {
            gap.oracle_sr = it->second;
            gap.oracle_best = cfg;
            any = true;
          }
          const bool in_sel =
              layer == selected.layer &&
              std::any_of(selected.apertures.begin(), selected.apertures.end(),
                          [&](double a) { return near(a, alpha); }) &&
              std::any_of(selected.betas.begin(), selected.betas.end(),
                          [&](double b) { return near(b, beta); });
          if (in_sel && (!any_sel || it->second > gap.selected_best_sr)) {
            gap.selected_best_sr = it->second;
            gap.selected_best = cfg;
            any_sel = true;
          }
        }
  require(any, errc::empty_input, "oracle_gap over an empty grid");
  require(any_sel, errc::missing_configs, "selection does not intersect the grid");
  gap.ratio = gap.oracle_sr > 0.0 ? gap.selected_best_sr / gap.oracle_sr : 1.0;
  return gap;
}

}  // namespace coast::hyperselect
