#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coast/activation.hpp"
#include "coast/hyperselect.hpp"
#include "coast/rng.hpp"
#include "coast/stats.hpp"
#include "coast/steering.hpp"

namespace coast::sim {

// A point-mass agent in an m-dimensional box seeks the origin. Its
// activations live in d dimensions: a goal-direction component on the
// success basis A, a proximity channel, a bias channel, and a distractor
// component on the failure basis B that leaks into the readout and is the
// mechanistic cause of failures. Steering that suppresses span(B) causally
// raises the success rate.
struct SimConfig {
  int d = 32;             // activation dim
  int m = 2;              // task-state dim
  int r = 4;              // distractor dim
  int horizon = 40;       // control steps per episode
  int denoise_steps = 4;  // K pseudo-steps per control step
  int tokens = 2;         // S token emissions per pseudo-step
  double goal_radius = 0.1;
  double kappa = 0.8;  // distractor coupling in [0,1]
  double sigma = 0.05;
  double omega = 0.3;  // success/failure basis coherence in [0,1]
  std::vector<int> layers{0, 1, 2, 3};
  int signal_layer = 2;  // layer whose activations drive the readout
  std::uint64_t seed = 0;

  void validate() const;
};

struct SimWorld {
  SimConfig cfg;
  MatrixXd A;  // d x m, success basis
  MatrixXd B;  // d x r, failure basis, tilted toward span(A) by omega
  MatrixXd U_L;           // m x r distractor-to-action leak mixing
  MatrixXd W;             // m x d readout
  VectorXd u_bias;        // constant emission channel
  MatrixXd mom_basis;     // d x (m+1), approach-momentum emission channel
  MatrixXd bg_basis;      // class-independent background activity
  VectorXd action_bias;   // readout offset calibrated to the unsteered bias
};

SimWorld make_world(const SimConfig& cfg);

// Additive steering baseline: h' = h + strength * direction at one layer.
struct CaaPolicy {
  int layer = 0;
  double strength = 0.0;
  VectorXd direction;  // unit
};

struct EpisodeOutcome {
  std::string id;
  outcome label = outcome::unlabeled;
  double final_distance = 0.0;
  int first_hit = -1;  // earliest step with distance inside the goal ball
};

struct RolloutSummary {
  int episodes = 0;
  int successes = 0;
  std::vector<EpisodeOutcome> results;
  std::filesystem::path container;  // empty unless a container was written

  double success_rate() const { return episodes ? double(successes) / episodes : 0.0; }
};

struct RolloutOptions {
  const SteeringPolicy* policy = nullptr;  // at most one of policy / caa
  const CaaPolicy* caa = nullptr;
  std::uint64_t stream = rng_stream::test_episodes;
  std::uint64_t episode_offset = 0;        // shifts per-episode seed indices
  std::vector<int> keep_layers;            // layers whose pooled rows are retained
  std::filesystem::path out;               // container root; empty = in-memory only
  std::string task = "sim";                // manifest task name when writing
};

struct RolloutData {
  RolloutSummary summary;
  std::map<int, ActivationMatrix> by_layer;  // token-pooled rows, episode order
};

RolloutData rollout(const SimWorld& world, int episodes, const RolloutOptions& opts = {});

struct StrategyEval {
  steering_strategy strategy = steering_strategy::global;
  double alpha = 0.0;
  double beta = 0.0;
  int layer = 0;
  int successes = 0;
  int episodes = 0;
  double sr = 0.0;
  double delta_sr = 0.0;
  stats::TestResult vs_baseline{};
};

struct GeometryClouds {
  ActivationMatrix steered;       // all rows of the best contrastive run
  ActivationMatrix base_success;  // unsteered rows by outcome
  ActivationMatrix base_failure;
  Conceptor c_steer;
};

struct SelfSteerReport {
  hyperselect::SelectionResult selection;
  int test_episodes = 0;
  int baseline_successes = 0;
  double baseline_sr = 0.0;
  int fit_success_episodes = 0;
  int fit_failure_episodes = 0;
  std::vector<StrategyEval> evals;    // every kept (strategy, alpha, beta)
  std::vector<std::string> skipped;   // "strategy: reason" annotations
  std::optional<StrategyEval> random_control;
  std::optional<StrategyEval> caa_control;  // best over the scale grid
  double caa_strength = 0.0;
  std::optional<GeometryClouds> geometry;
};

struct SelfSteerOptions {
  int fit_n = 15;
  int test_n = 30;
  bool with_controls = false;
  bool keep_geometry = false;
};

// Fits on a fit-stream rollout, selects hyperparameters on fit data only,
// and evaluates every kept configuration per strategy on a fresh test
// stream shared across arms.
SelfSteerReport experiment_self_steer(const SimConfig& cfg, const hyperselect::SweepGrid& grid,
                                      const std::vector<steering_strategy>& strategies,
                                      const SelfSteerOptions& opts = {});

struct TransferConfig {
  SimConfig base;
  int tasks = 6;
  // Per-task blend of the shared failure basis into the task's own, in
  // [0,1]; empty means 1 (identical failure basis) for every task.
  std::vector<double> coherence;
  double alpha = 1.0;
  double beta = 0.3;
  int fit_n = 15;
  int test_n = 200;
};

struct TransferPair {
  int source = 0;
  int target = 0;
  double failure_containment = 0.0;
  double success_containment = 0.0;
  double delta_sr = 0.0;
};

struct TransferReport {
  std::vector<TransferPair> pairs;  // every ordered pair, diagonal included
  stats::TestResult failure_corr{};  // pearson over off-diagonal pairs
  stats::TestResult success_corr{};  // the control correlation
  std::vector<double> baseline_sr;
  std::vector<std::string> skipped;  // tasks without both outcome classes
};

TransferReport experiment_transfer(const TransferConfig& cfg);

struct OverlapPoint {
  double omega = 0.0;
  double overlap = 0.0;
  double baseline_sr = 0.0;
  double steered_sr = 0.0;
  double delta_sr = 0.0;
};

struct OverlapReport {
  std::vector<OverlapPoint> points;
  stats::TestResult rho{};  // spearman(overlap, delta_sr)
  std::vector<std::string> skipped;
};

OverlapReport experiment_overlap_efficacy(const SimConfig& base, const std::vector<double>& omegas,
                                          double alpha, double beta, int fit_n, int test_n);

struct OracleGapReport {
  hyperselect::SelectionResult selection;
  hyperselect::OracleGap gap;
  std::vector<std::pair<hyperselect::GridConfig, double>> table;  // grid order
};

// Evaluates the full grid on a shared test stream (the oracle) and compares
// the geometrically selected sub-grid against it.
OracleGapReport experiment_oracle_gap(const SimConfig& cfg, const hyperselect::SweepGrid& grid,
                                      int fit_n, int test_n);

}  // namespace coast::sim
