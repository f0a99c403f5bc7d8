#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "coast/activation.hpp"
#include "coast/tensor_file.hpp"

namespace coast::container {

struct EpisodeEntry {
  std::string id;
  outcome label = outcome::unlabeled;
  double total_reward = 0.0;
  int steps = 0;  // inference steps recorded
};

struct Manifest {
  std::string task;
  int dim = 0;
  int denoise_steps = 0;  // K
  int tokens = 0;         // S
  std::vector<int> layers;
  std::string dtype = "f32";
  std::vector<EpisodeEntry> episodes;
};

struct ActivationContainer {
  std::filesystem::path root;
  Manifest manifest;
};

// Streams one container to disk: tensors are written as they arrive, the
// manifest once at finalize(). Layout: root/<episode>/<step>/layer_<l>.cact.
class Writer {
 public:
  Writer(std::filesystem::path root, std::string task, int dim, int denoise_steps, int tokens,
         std::vector<int> layers);

  // data is one inference step's activations for one layer, K x S x d row-major.
  void add(const std::string& episode, int step, int layer, const std::vector<float>& data);
  void finish_episode(const std::string& episode, outcome label, double total_reward);
  ActivationContainer finalize();

 private:
  std::filesystem::path root_;
  Manifest manifest_;
  std::map<std::string, std::map<int, std::vector<int>>> pending_;  // episode -> step -> layers
  bool finalized_ = false;
};

ActivationContainer open(const std::filesystem::path& root);

std::filesystem::path tensor_path(const ActivationContainer& c, const std::string& episode,
                                  int step, int layer);

// Mean over the token axis of a K x S x d tensor, computed in f64.
Eigen::MatrixXd pool_tokens(const tensor_file::Tensor& t);

inline constexpr int kAllSteps = -1;

struct Partition {
  ActivationMatrix succ;
  ActivationMatrix fail;
  bool contrastive_eligible = false;
  int n_succ_episodes = 0;
  int n_fail_episodes = 0;
  int n_unlabeled_episodes = 0;
};

// Pools every labeled episode's rows for one layer and routes them by outcome.
// step_filter selects a single denoise step, or kAllSteps for all of them.
Partition partition(const ActivationContainer& c, const std::string& task, int layer,
                    int step_filter = kAllSteps);

struct ValidationReport {
  int episodes = 0;
  int tensors = 0;
};

// Reads every tensor and checks it against the manifest: shape K x S x d,
// declared dtype, finite values, unique episode ids, contiguous step indices.
ValidationReport validate(const ActivationContainer& c);

}  // namespace coast::container
