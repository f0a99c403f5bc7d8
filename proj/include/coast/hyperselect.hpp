#pragma once

#include "coast/conceptor.hpp"
#include "coast/steering.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace coast::hyperselect {

struct SweepGrid {
  std::vector<int> layers;
  std::vector<double> apertures;
  std::vector<double> betas;
  std::vector<steering_strategy> strategies;
};

// Named grids from the paper's model-benchmark pairs; data, not behavior.
std::optional<SweepGrid> preset(const std::string& name);
std::vector<std::string> preset_names();

inline constexpr double kStage1Aperture = 10.0;
inline constexpr double kOverlapBandLow = 0.85;
inline constexpr double kOverlapBandHigh = 0.95;

struct Stage1Result {
  int layer = 0;
  std::map<int, double> mean_quota;  // per layer
};

struct Stage2Result {
  std::vector<double> kept;
  std::map<double, double> mean_overlap;  // per aperture
};

struct SelectionResult {
  int layer = 0;
  std::vector<double> apertures;
  std::vector<double> betas;
  double grid_fraction = 1.0;
  std::map<int, double> layer_quotas;
  std::map<double, double> aperture_overlaps;
};

// Stage 1: highest mean contrastive quota across tasks, computed at the
// largest aperture; ties break toward the smaller layer index.
Stage1Result stage1_layer(const std::map<int, std::vector<Conceptor>>& per_layer_contrastive);

// Stage 2: keep apertures whose mean success/failure overlap lies in
// [0.85, 0.95]; if none does, keep the single closest one (ties toward the
// larger aperture).
Stage2Result stage2_apertures(
    const std::map<double, std::vector<std::pair<Conceptor, Conceptor>>>& per_aperture_pairs);

// Stage 3: intersect with {0.1, 0.3}; if empty, keep the smallest beta.
std::vector<double> stage3_betas(const SweepGrid& grid);

SelectionResult assemble(const SweepGrid& grid, const Stage1Result& s1, const Stage2Result& s2);

struct GridConfig {
  int layer = 0;
  double alpha = 1.0;
  double beta = 0.1;
  steering_strategy strategy = steering_strategy::global;

  auto operator<=>(const GridConfig&) const = default;
};

struct OracleGap {
  double selected_best_sr = 0.0;
  double oracle_sr = 0.0;
  double ratio = 1.0;
  double grid_fraction = 1.0;
  GridConfig selected_best;
  GridConfig oracle_best;
};

// Compares the best selected configuration against the best of the full
// grid. `full_eval` must cover every grid configuration.
OracleGap oracle_gap(const SweepGrid& grid, const SelectionResult& selected,
                     const std::map<GridConfig, double>& full_eval);

}  // namespace coast::hyperselect
