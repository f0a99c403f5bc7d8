#include "coast/steering.hpp"

#include "coast/algebra.hpp"
#include "coast/kernels.hpp"
#include "coast/linalg.hpp"

#include <random>
#include <set>
#include <string>

namespace coast {
namespace {

int unique_episodes(const ActivationMatrix& x) {
  std::set<std::string> ids;
  for (const auto& r : x.rows) ids.insert(r.episode);
  return static_cast<int>(ids.size());
}

ActivationMatrix select_step(const ActivationMatrix& x, int denoise_step) {
  ActivationMatrix out;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < x.count(); ++i)
    if (x.rows[static_cast<size_t>(i)].denoise_step == denoise_step) keep.push_back(i);
  out.data.resize(static_cast<Eigen::Index>(keep.size()), x.dim());
  out.rows.reserve(keep.size());
  for (size_t i = 0; i < keep.size(); ++i) {
    out.data.row(static_cast<Eigen::Index>(i)) = x.data.row(keep[i]);
    out.rows.push_back(x.rows[static_cast<size_t>(keep[i])]);
  }
  return out;
}

int layer_of(const ActivationMatrix& x) {
  return x.rows.empty() ? 0 : x.rows.front().layer;
}

}  // namespace

const char* strategy_name(steering_strategy s) {
  switch (s) {
    case steering_strategy::global: return "global";
    case steering_strategy::per_step: return "per_step";
    case steering_strategy::positive_only: return "positive_only";
    case steering_strategy::failure_only: return "failure_only";
  }
  return "unknown";
}

std::optional<steering_strategy> strategy_from_name(const std::string& name) {
  if (name == "global") return steering_strategy::global;
  if (name == "per_step") return steering_strategy::per_step;
  if (name == "positive_only") return steering_strategy::positive_only;
  if (name == "failure_only") return steering_strategy::failure_only;
  return std::nullopt;
}

const GateMatrix& SteeringPolicy::gate_for_step(int denoise_step) const {
  if (strategy == steering_strategy::per_step) {
    auto it = gates.find(denoise_step);
    require(it != gates.end(), errc::empty_step_bucket,
            "no gate for denoise step " + std::to_string(denoise_step));
    return it->second;
  }
  return gates.at(kAllSteps);
}

GateMatrix make_gate(const Conceptor& c, double beta, steering_strategy strategy, int layer,
                     std::optional<int> denoise_step) {
  require(beta >= 0.0 && beta <= 1.0, errc::beta_out_of_range,
          "beta must lie in [0,1], got " + std::to_string(beta));
  require(strategy != steering_strategy::per_step || denoise_step.has_value(),
          errc::missing_denoise_step, "per_step gates must be bound to a denoise step");
  GateMatrix g;
  g.matrix = (1.0 - beta) * MatrixXd::Identity(c.dim(), c.dim()) + beta * c.matrix;
  g.beta = beta;
  g.strategy = strategy;
  g.denoise_step = strategy == steering_strategy::per_step ? denoise_step : std::nullopt;
  g.layer = layer;
  return g;
}

VectorXd apply_gate(const VectorXd& h, const GateMatrix& g) {
  require(h.size() == g.dim(), errc::dim_mismatch, "gate/vector dimension mismatch");
  return g.matrix * h;  // h' = h M^T, as a column vector
}

MatrixXd apply_gate(const MatrixXd& h, const GateMatrix& g) {
  require(h.cols() == g.dim(), errc::dim_mismatch, "gate/matrix dimension mismatch");
  return kernels::apply_rows(h, g.matrix);
}

SteeringPolicy build_policy(const ActivationMatrix& succ, const ActivationMatrix* fail,
                            double alpha, double beta, steering_strategy strategy, int k_steps) {
  SteeringPolicy policy;
  policy.strategy = strategy;
  policy.layer = layer_of(succ);
  const int n_succ = unique_episodes(succ);
  const int n_fail = fail ? unique_episodes(*fail) : 0;

  switch (strategy) {
    case steering_strategy::positive_only: {
      require(succ.count() > 0, errc::insufficient_class, "positive_only needs success rows");
      Conceptor c_s = fit_conceptor(succ, alpha);
      policy.gates.emplace(kAllSteps, make_gate(c_s, beta, strategy, policy.layer));
      return policy;
    }
    case steering_strategy::failure_only: {
      require(fail && fail->count() > 0, errc::insufficient_class,
              "failure_only needs failure rows");
      policy.layer = layer_of(*fail);
      Conceptor c_f = fit_conceptor(*fail, alpha);
      policy.gates.emplace(kAllSteps,
                           make_gate(algebra::negated_failure(c_f), beta, strategy, policy.layer));
      return policy;
    }
    case steering_strategy::global:
    case steering_strategy::per_step:
      break;
  }

  require(n_succ >= kMinPerClass && n_fail >= kMinPerClass, errc::insufficient_class,
          "contrastive fit needs " + std::to_string(kMinPerClass) +
              " episodes per class, got success=" + std::to_string(n_succ) +
              " failure=" + std::to_string(n_fail));

  if (strategy == steering_strategy::global) {
    Conceptor c_steer = algebra::contrastive(fit_conceptor(succ, alpha),
                                             fit_conceptor(*fail, alpha));
    policy.gates.emplace(kAllSteps, make_gate(c_steer, beta, strategy, policy.layer));
    return policy;
  }

  for (int k = 0; k < k_steps; ++k) {
    ActivationMatrix s_k = select_step(succ, k);
    ActivationMatrix f_k = select_step(*fail, k);
    require(s_k.count() > 0 && f_k.count() > 0, errc::empty_step_bucket,
            "denoise step " + std::to_string(k) + " has an empty class bucket");
    Conceptor c_steer =
        algebra::contrastive(fit_conceptor(s_k, alpha), fit_conceptor(f_k, alpha));
    policy.gates.emplace(k, make_gate(c_steer, beta, strategy, policy.layer, k));
  }
  return policy;
}

SteeringVector caa_vector(const ActivationMatrix& succ, const ActivationMatrix& fail,
                          double strength) {
  require(succ.count() > 0 && fail.count() > 0, errc::empty_matrix,
          "caa_vector needs both classes non-empty");
  VectorXd diff = succ.data.colwise().mean() - fail.data.colwise().mean();
  const double norm = diff.norm();
  require(norm >= 1e-12, errc::degenerate_direction, "class means are identical");
  return SteeringVector{diff / norm, strength};
}

VectorXd apply_caa(const VectorXd& h, const SteeringVector& sv) {
  require(h.size() == sv.v.size(), errc::dim_mismatch, "steering vector dimension mismatch");
  return h + sv.strength * sv.v;
}

Conceptor random_control(const Conceptor& c, std::uint64_t seed) {
  const Eigen::Index d = c.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  MatrixXd g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ();
  MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < d; ++i)
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  // pair the descending spectrum with the random basis
  Conceptor out = conceptor_from_eig(q, c.spectrum.reverse(), c.aperture, c.samples,
                                     conceptor_source::random_control);
  return out;
}

}  // namespace coast
