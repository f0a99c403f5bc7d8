#pragma once

#include "coast/conceptor.hpp"

#include <cstdint>
#include <map>
#include <optional>

namespace coast {

// Minimum episodes per outcome class before a contrastive conceptor may be
// fitted (positive-only steering stays legal below it).
inline constexpr int kMinPerClass = 3;

enum class steering_strategy : std::uint8_t { global, per_step, positive_only, failure_only };

const char* strategy_name(steering_strategy s);
std::optional<steering_strategy> strategy_from_name(const std::string& name);

// M = (1 - beta) I + beta C, applied as h' = h M^T.
struct GateMatrix {
  MatrixXd matrix;
  double beta = 0.0;
  steering_strategy strategy = steering_strategy::global;
  std::optional<int> denoise_step;  // set iff strategy == per_step
  int layer = 0;

  Eigen::Index dim() const { return matrix.rows(); }
};

// Key used for the single gate of non-per-step strategies.
inline constexpr int kAllSteps = -1;

struct SteeringPolicy {
  std::map<int, GateMatrix> gates;  // denoise step -> gate, or kAllSteps
  steering_strategy strategy = steering_strategy::global;
  int layer = 0;

  const GateMatrix& gate_for_step(int denoise_step) const;
};

struct SteeringVector {
  VectorXd v;             // unit direction
  double strength = 1.0;  // additive alpha
};

GateMatrix make_gate(const Conceptor& c, double beta, steering_strategy strategy, int layer,
                     std::optional<int> denoise_step = std::nullopt);

VectorXd apply_gate(const VectorXd& h, const GateMatrix& g);
MatrixXd apply_gate(const MatrixXd& h, const GateMatrix& g);

// Fit conceptors from the labeled activations and assemble the gates for
// one strategy. Contrastive strategies (global, per_step) need both classes
// with >= kMinPerClass episodes; positive_only needs only `succ`;
// failure_only needs only `fail`. K is the denoise-step count (per_step
// fits one contrastive conceptor per step bucket).
SteeringPolicy build_policy(const ActivationMatrix& succ, const ActivationMatrix* fail,
                            double alpha, double beta, steering_strategy strategy, int k_steps);

// Unit mean-difference direction between classes (the additive baseline).
SteeringVector caa_vector(const ActivationMatrix& succ, const ActivationMatrix& fail,
                          double strength = 1.0);

VectorXd apply_caa(const VectorXd& h, const SteeringVector& sv);

// Same eigenvalue spectrum, Haar-random eigenvectors (QR of a seeded
// Gaussian matrix with the R-diagonal sign fix).
Conceptor random_control(const Conceptor& c, std::uint64_t seed);

}  // namespace coast
