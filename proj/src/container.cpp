#include "coast/container.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "coast/steering.hpp"

namespace coast::container {
namespace {

using nlohmann::json;

const char* outcome_name(outcome o) {
  switch (o) {
    case outcome::success: return "success";
    case outcome::failure: return "failure";
    default: return "unlabeled";
  }
}

outcome outcome_from_name(const std::string& s) {
  if (s == "success") return outcome::success;
  if (s == "failure") return outcome::failure;
  return outcome::unlabeled;
}

template <typename T>
T field(const json& j, const char* key) {
  require(j.contains(key), errc::bad_header, std::string("manifest missing field ") + key);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(errc::bad_header, std::string("manifest field has wrong type: ") + key);
  }
}

}  // namespace

Writer::Writer(std::filesystem::path root, std::string task, int dim, int denoise_steps,
               int tokens, std::vector<int> layers)
    : root_(std::move(root)) {
  require(dim > 0 && denoise_steps > 0 && tokens > 0, errc::bad_header,
          "container dimensions must be positive");
  require(!layers.empty(), errc::bad_header, "container needs at least one layer");
  manifest_.task = std::move(task);
  manifest_.dim = dim;
  manifest_.denoise_steps = denoise_steps;
  manifest_.tokens = tokens;
  manifest_.layers = std::move(layers);
  std::sort(manifest_.layers.begin(), manifest_.layers.end());
  std::filesystem::create_directories(root_);
}

void Writer::add(const std::string& episode, int step, int layer,
                 const std::vector<float>& data) {
  require(!finalized_, errc::io_error, "writer already finalized");
  require(std::binary_search(manifest_.layers.begin(), manifest_.layers.end(), layer),
          errc::unknown_layer, "layer " + std::to_string(layer) + " not in the manifest");
  const auto expected = static_cast<std::size_t>(manifest_.denoise_steps) * manifest_.tokens *
                        manifest_.dim;
  require(data.size() == expected, errc::dim_mismatch,
          "step tensor is not K x S x d for this container");
  const auto dir = root_ / episode / std::to_string(step);
  std::filesystem::create_directories(dir);
  tensor_file::write_tensor(dir / ("layer_" + std::to_string(layer) + ".cact"),
                            {static_cast<std::size_t>(manifest_.denoise_steps),
                             static_cast<std::size_t>(manifest_.tokens),
                             static_cast<std::size_t>(manifest_.dim)},
                            data);
  pending_[episode][step].push_back(layer);
}

void Writer::finish_episode(const std::string& episode, outcome label, double total_reward) {
  require(!finalized_, errc::io_error, "writer already finalized");
  auto it = pending_.find(episode);
  require(it != pending_.end(), errc::empty_input, "episode has no recorded steps: " + episode);
  for (const auto& e : manifest_.episodes)
    require(e.id != episode, errc::io_error, "episode finished twice: " + episode);
  const auto& steps = it->second;
  int expect = 0;
  for (const auto& [step, layers] : steps) {
    require(step == expect++, errc::bad_header,
            "episode " + episode + " has non-contiguous step indices");
    require(layers.size() == manifest_.layers.size(), errc::bad_header,
            "episode " + episode + " step " + std::to_string(step) + " is missing layers");
  }
  manifest_.episodes.push_back(
      {episode, label, total_reward, static_cast<int>(steps.size())});
  pending_.erase(it);
}

ActivationContainer Writer::finalize() {
  require(!finalized_, errc::io_error, "writer already finalized");
  require(pending_.empty(), errc::io_error, "unfinished episodes remain");
  finalized_ = true;

  json eps = json::array();
  for (const auto& e : manifest_.episodes)
    eps.push_back({{"id", e.id},
                   {"outcome", outcome_name(e.label)},
                   {"total_reward", e.total_reward},
                   {"steps", e.steps}});
  const json doc = {{"task", manifest_.task},
                    {"dim", manifest_.dim},
                    {"denoise_steps", manifest_.denoise_steps},
                    {"tokens", manifest_.tokens},
                    {"layers", manifest_.layers},
                    {"dtype", manifest_.dtype},
                    {"episodes", eps}};
  std::ofstream os(root_ / "manifest.json");
  require(os.good(), errc::io_error, "cannot write manifest.json");
  os << doc.dump(2) << "\n";
  os.flush();
  require(os.good(), errc::io_error, "manifest write failed");
  return {root_, manifest_};
}

ActivationContainer open(const std::filesystem::path& root) {
  std::ifstream in(root / "manifest.json");
  require(in.good(), errc::io_error, "cannot open " + (root / "manifest.json").string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(errc::bad_header, std::string("manifest is not valid JSON: ") + e.what());
  }

  Manifest m;
  m.task = field<std::string>(doc, "task");
  m.dim = field<int>(doc, "dim");
  m.denoise_steps = field<int>(doc, "denoise_steps");
  m.tokens = field<int>(doc, "tokens");
  m.layers = field<std::vector<int>>(doc, "layers");
  m.dtype = field<std::string>(doc, "dtype");
  require(m.dtype == "f32" || m.dtype == "f64", errc::dtype_unsupported,
          "manifest dtype must be f32 or f64");
  require(m.dim > 0 && m.denoise_steps > 0 && m.tokens > 0, errc::bad_header,
          "manifest dimensions must be positive");
  require(!m.layers.empty(), errc::bad_header, "manifest has no layers");

  require(doc.contains("episodes") && doc["episodes"].is_array(), errc::bad_header,
          "manifest missing episodes array");
  std::set<std::string> seen;
  for (const auto& e : doc["episodes"]) {
    EpisodeEntry entry;
    entry.id = field<std::string>(e, "id");
    entry.label = outcome_from_name(field<std::string>(e, "outcome"));
    entry.total_reward = field<double>(e, "total_reward");
    entry.steps = field<int>(e, "steps");
    require(entry.steps >= 0, errc::bad_header, "negative step count for " + entry.id);
    require(seen.insert(entry.id).second, errc::bad_header,
            "duplicate episode id " + entry.id);
    m.episodes.push_back(std::move(entry));
  }
  return {root, std::move(m)};
}

std::filesystem::path tensor_path(const ActivationContainer& c, const std::string& episode,
                                  int step, int layer) {
  return c.root / episode / std::to_string(step) / ("layer_" + std::to_string(layer) + ".cact");
}

Eigen::MatrixXd pool_tokens(const tensor_file::Tensor& t) {
  require(t.dims.size() == 3, errc::bad_header, "pool_tokens expects a K x S x d tensor");
  const auto K = static_cast<Eigen::Index>(t.dims[0]);
  const auto S = static_cast<Eigen::Index>(t.dims[1]);
  const auto d = static_cast<Eigen::Index>(t.dims[2]);
  require(S >= 1, errc::empty_token_axis, "token axis is empty");
  const std::vector<double> v = t.to_f64();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(K, d);
  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index s = 0; s < S; ++s) {
      const double* row = v.data() + (k * S + s) * d;
      for (Eigen::Index j = 0; j < d; ++j) out(k, j) += row[j];
    }
  }
  out /= static_cast<double>(S);
  return out;
}

Partition partition(const ActivationContainer& c, const std::string& task, int layer,
                    int step_filter) {
  require(task == c.manifest.task, errc::unknown_task,
          "container holds task '" + c.manifest.task + "', not '" + task + "'");
  require(std::find(c.manifest.layers.begin(), c.manifest.layers.end(), layer) !=
              c.manifest.layers.end(),
          errc::unknown_layer, "layer " + std::to_string(layer) + " not in this container");
  const int K = c.manifest.denoise_steps;
  require(step_filter == kAllSteps || (step_filter >= 0 && step_filter < K),
          errc::missing_denoise_step,
          "denoise step " + std::to_string(step_filter) + " outside [0, " + std::to_string(K) +
              ")");

  Partition out;
  std::vector<Eigen::RowVectorXd> succ_rows, fail_rows;
  std::vector<RowMeta> succ_meta, fail_meta;
  for (const auto& ep : c.manifest.episodes) {
    if (ep.label == outcome::unlabeled) {
      ++out.n_unlabeled_episodes;
      continue;
    }
    (ep.label == outcome::success ? out.n_succ_episodes : out.n_fail_episodes)++;
    auto& rows = ep.label == outcome::success ? succ_rows : fail_rows;
    auto& meta = ep.label == outcome::success ? succ_meta : fail_meta;
    for (int step = 0; step < ep.steps; ++step) {
      const auto t = tensor_file::read_tensor(tensor_path(c, ep.id, step, layer));
      const Eigen::MatrixXd pooled = pool_tokens(t);
      require(pooled.rows() == K && pooled.cols() == c.manifest.dim, errc::dim_mismatch,
              "tensor shape disagrees with the manifest for episode " + ep.id);
      for (int k = 0; k < K; ++k) {
        if (step_filter != kAllSteps && k != step_filter) continue;
        rows.push_back(pooled.row(k));
        meta.push_back({ep.id, step, k, layer, ep.label});
      }
    }
  }

  auto pack = [&](std::vector<Eigen::RowVectorXd>& rows, std::vector<RowMeta>& meta) {
    ActivationMatrix m;
    m.data.resize(static_cast<Eigen::Index>(rows.size()), c.manifest.dim);
    for (std::size_t i = 0; i < rows.size(); ++i) m.data.row(static_cast<Eigen::Index>(i)) = rows[i];
    m.rows = std::move(meta);
    return m;
  };
  out.succ = pack(succ_rows, succ_meta);
  out.fail = pack(fail_rows, fail_meta);
  out.contrastive_eligible =
      out.n_succ_episodes >= kMinPerClass && out.n_fail_episodes >= kMinPerClass;
  return out;
}

ValidationReport validate(const ActivationContainer& c) {
  ValidationReport report;
  std::set<std::string> ids;
  for (const auto& ep : c.manifest.episodes) {
    require(ids.insert(ep.id).second, errc::bad_header, "duplicate episode id " + ep.id);
    for (int step = 0; step < ep.steps; ++step) {
      for (int layer : c.manifest.layers) {
        const auto t = tensor_file::read_tensor(tensor_path(c, ep.id, step, layer));
        require(t.dims.size() == 3, errc::bad_header, "tensor is not rank 3 in " + ep.id);
        require(t.dims[0] == static_cast<std::size_t>(c.manifest.denoise_steps) &&
                    t.dims[1] == static_cast<std::size_t>(c.manifest.tokens) &&
                    t.dims[2] == static_cast<std::size_t>(c.manifest.dim),
                errc::dim_mismatch, "tensor shape disagrees with the manifest in " + ep.id);
        const bool want_f32 = c.manifest.dtype == "f32";
        require(t.type == (want_f32 ? tensor_file::dtype::f32 : tensor_file::dtype::f64),
                errc::dtype_unsupported, "tensor dtype disagrees with the manifest in " + ep.id);
        for (double v : t.to_f64())
          require(std::isfinite(v), errc::bad_header, "non-finite activation in " + ep.id);
        ++report.tensors;
      }
    }
    ++report.episodes;
  }
  return report;
}

}  // namespace coast::container
