#include "coast/simulator.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdio>
#include <set>

#include "coast/algebra.hpp"
#include "coast/container.hpp"
#include "coast/diagnostics.hpp"
#include "coast/kernels.hpp"

namespace coast::sim {
namespace {

// World mechanics. The goal pull has unit magnitude and the distractor's
// action-space drift competes with it directly; the gains below put the
// default-kappa baseline in the mid-band with enough headroom for steering
// to matter. Treat them as part of the packaged experiment configs.
constexpr double kGoalGain = 1.0;
constexpr double kStepScale = 0.10;
constexpr double kLeakGain = 0.34;
// Lognormal distractor intensity with a tight spread: most episodes sit near
// the contested threshold instead of being decided outright either way.
constexpr double kDistractorScale = 1.75;
constexpr double kDistractorCv = 0.22;
constexpr double kDistractorJitter = 1.0;
constexpr double kBiasMag = 1.0;
constexpr double kBiasKnee = 1.65;
// The distractor only engages outside the goal basin; between the two radii
// its emission (and therefore its readout pressure) ramps in linearly. This
// makes the outcome bistable around the ramp edge, so episode results are
// sensitive to modest readout rebalancing.
constexpr double kRampLo = 0.35;
constexpr double kRampHi = 1.0;
// Approach-momentum channel: emitted while the state moves inward, but only
// once the episode has covered half its starting distance, and read back as
// an assist force. Episodes that lose the tug-of-war never get halfway, so
// the channel is effectively success-exclusive. Loop gain stays below 1.
constexpr double kMomMag = 2.0;
constexpr double kAssistGain = 0.8;
// P-control saturation: the emitted goal command is unit far out and
// proportional to the remaining error inside this radius, otherwise the
// fixed step size orbits the goal ball instead of settling into it.
constexpr double kBrakeRadius = 0.25;
// The goal command also fades out beyond kFarLo and is gone by kFarHi:
// once an episode has drifted that far the policy has lost the target, and
// its emissions stop tracking the distractor direction.
constexpr double kFarLo = 1.8;
constexpr double kFarHi = 3.0;
// Sticky target lock: the command drops out for good once the state has been
// carried this far beyond its starting distance. Episodes that lose the
// tug-of-war stop emitting goal-directed content early; episodes whose drift
// is held below the slack keep the command for the whole horizon.
constexpr double kUnlockSlack = 0.25;
// Terminal-guidance acquisition: the goal command starts at a floor and
// strengthens once the episode has covered a real fraction of its inbound
// distance (credit starts at kAcquireStart, full command at kAcquireFull).
// Episodes making headway lock in; episodes pinned near their start never
// leave the floor, so their goal-channel variance stays low.
constexpr double kPhiFloor = 0.2;
constexpr double kAcquireStart = 0.2;
constexpr double kAcquireFull = 0.5;
// Class-independent background activity, identical across layers. Gives the
// two class conceptors a common subspace whose overlap grows with aperture.
constexpr int kBgDims = 12;
constexpr double kBgMag = 0.4;
constexpr double kParasiticGain = 0.25;
constexpr double kLayerDecay = 0.1;
constexpr double kCaaScales[] = {0.25, 0.5, 1.0};

// Keeps per-episode seed indices of different tasks / sweep points apart.
constexpr std::uint64_t kTaskStride = 1ull << 20;

MatrixXd gaussian(std::mt19937_64& eng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> g;
  MatrixXd out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = g(eng);
  return out;
}

// Thin QR with the R-diagonal sign fix so the basis is a deterministic
// function of the input matrix.
MatrixXd orthonormal(std::mt19937_64& eng, Eigen::Index d, Eigen::Index n) {
  MatrixXd g = gaussian(eng, d, n);
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(d, n);
  MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

SimWorld build_world(const SimConfig& cfg, std::mt19937_64& eng, const MatrixXd* b_shared,
                     double coherence, const MatrixXd* u_l_shared, const VectorXd* v_a_shared) {
  SimWorld w;
  w.cfg = cfg;
  const int want = 2 * cfg.m + cfg.r + 2 + kBgDims;
  const int got = std::min(want, cfg.d);
  MatrixXd q = orthonormal(eng, cfg.d, got);
  w.A = q.leftCols(cfg.m);
  MatrixXd b_perp = q.middleCols(cfg.m, cfg.r);
  auto extra_unit = [&](int col) -> VectorXd {
    if (col < got) return q.col(col);
    VectorXd v = gaussian(eng, cfg.d, 1);
    return v / v.norm();
  };
  w.u_bias = extra_unit(cfg.m + cfg.r);
  w.mom_basis.resize(cfg.d, cfg.m + 1);
  for (int j = 0; j <= cfg.m; ++j) w.mom_basis.col(j) = extra_unit(cfg.m + cfg.r + 1 + j);
  w.bg_basis.resize(cfg.d, kBgDims);
  for (int j = 0; j < kBgDims; ++j) w.bg_basis.col(j) = extra_unit(2 * cfg.m + cfg.r + 2 + j);

  MatrixXd raw = b_perp;
  if (b_shared) {
    for (int j = 0; j < cfg.r; ++j) {
      VectorXd b0 = b_shared->col(j) - w.A * (w.A.transpose() * b_shared->col(j));
      const double n0 = b0.norm();
      require(n0 > 1e-9, errc::degenerate_direction, "shared failure basis lies in span(A)");
      b0 /= n0;
      raw.col(j) = coherence * b0 +
                   std::sqrt(std::max(0.0, 1.0 - coherence * coherence)) * b_perp.col(j);
      raw.col(j).normalize();
    }
  }
  w.B.resize(cfg.d, cfg.r);
  const double mix = std::sqrt(std::max(0.0, 1.0 - cfg.omega * cfg.omega));
  for (int j = 0; j < cfg.r; ++j)
    w.B.col(j) = cfg.omega * w.A.col(j % cfg.m) + mix * raw.col(j);

  w.U_L = u_l_shared ? *u_l_shared
                     : MatrixXd(gaussian(eng, cfg.m, cfg.r) / std::sqrt(double(cfg.r)));
  VectorXd v_a;
  if (v_a_shared) {
    v_a = *v_a_shared;
  } else {
    v_a = gaussian(eng, cfg.m, 1);
    v_a.normalize();
  }
  w.W = kGoalGain * w.A.transpose() + cfg.kappa * kLeakGain * w.U_L * w.B.transpose() +
        kParasiticGain * v_a * w.u_bias.transpose() +
        kAssistGain * w.mom_basis.rightCols(cfg.m).transpose();
  w.action_bias = -kParasiticGain * kBiasMag * v_a;
  return w;
}

std::string episode_id(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "ep%04d", index);
  return buf;
}

struct EpisodeBuffers {
  EpisodeOutcome result;
  std::map<int, MatrixXd> pooled;  // kept layers, (T*K) x d
  std::vector<std::map<int, std::vector<float>>> tokens;  // [t][layer], K*S*d
};

EpisodeBuffers run_episode(const SimWorld& w, std::uint64_t stream, std::uint64_t seed_index,
                           int local_index, const SteeringPolicy* pol, const CaaPolicy* caa,
                           const std::vector<int>& keep, bool want_tokens) {
  const SimConfig& cfg = w.cfg;
  const int d = cfg.d, K = cfg.denoise_steps, S = cfg.tokens;
  auto eng = make_engine(cfg.seed, stream, seed_index);
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> gauss;

  VectorXd x(cfg.m);
  for (int i = 0; i < cfg.m; ++i) x(i) = box(eng);
  const double sign = u01(eng) < 0.5 ? -1.0 : 1.0;
  VectorXd eta(cfg.r);
  for (int j = 0; j < cfg.r; ++j)
    eta(j) = sign * kDistractorScale *
             std::exp(kDistractorCv * gauss(eng) - 0.5 * kDistractorCv * kDistractorCv);
  const VectorXd b_eta = w.B * eta;

  std::vector<double> layer_gain(cfg.layers.size());
  for (std::size_t li = 0; li < cfg.layers.size(); ++li)
    layer_gain[li] = std::pow(kLayerDecay, std::abs(cfg.layers[li] - cfg.signal_layer));

  EpisodeBuffers out;
  for (int l : keep) out.pooled[l] = MatrixXd(cfg.horizon * K, d);
  if (want_tokens) out.tokens.resize(cfg.horizon);

  const int steer_layer = pol ? pol->layer : (caa ? caa->layer : INT_MIN);
  VectorXd core(d), mom_vec(d), base(d), h(d), gated(d), pool(d), zeta(kBgDims);
  VectorXd jit(cfg.r), b_step(d);
  MatrixXd bg(d, K);
  VectorXd act_input = VectorXd::Zero(d);
  const double start_dist = x.norm();
  const double acquire_span =
      std::max((kAcquireFull - kAcquireStart) * start_dist, 0.03);
  double prev_dist = start_dist;
  bool locked = true;

  int first_hit = -1;
  for (int t = 0; t < cfg.horizon; ++t) {
    const double dist = x.norm();
    if (first_hit < 0 && dist < cfg.goal_radius) first_hit = t;
    if (dist > start_dist + kUnlockSlack) locked = false;
    const double fade =
        std::clamp((kFarHi - dist) / (kFarHi - kFarLo), 0.0, 1.0);
    const double progress = std::clamp(
        (start_dist - dist - kAcquireStart * start_dist) / acquire_span, 0.0, 1.0);
    VectorXd phi = VectorXd::Zero(cfg.m);
    if (locked && dist > 1e-12)
      phi = -x * ((kPhiFloor + (1.0 - kPhiFloor) * progress) * fade *
                  std::min(1.0, dist / kBrakeRadius) / dist);
    const double mom =
        progress * std::clamp((prev_dist - dist) / kStepScale, 0.0, 1.0);
    const double ramp =
        std::clamp((dist - kRampLo) / (kRampHi - kRampLo), 0.0, 1.0);
    // Actuator bias swells in the fine-control regime; the policy learned a
    // state-matched cancellation, so unsteered runs never feel it.
    const double bias_mod = 1.0 + kBiasKnee * (1.0 - std::min(dist, 1.0));
    prev_dist = dist;
    core.noalias() = w.A * phi;
    core += (kBiasMag * bias_mod) * w.u_bias;
    mom_vec = w.mom_basis.col(0);
    mom_vec.noalias() += w.mom_basis.rightCols(cfg.m) * phi;
    // Fast chatter rides the distractor channel: it populates every direction
    // of the subspace without adding net drive at the episode scale.
    for (int j = 0; j < cfg.r; ++j) jit(j) = kDistractorJitter * gauss(eng);
    b_step = b_eta;
    b_step.noalias() += w.B * jit;
    for (int k = 0; k < K; ++k) {
      for (int j = 0; j < kBgDims; ++j) zeta(j) = gauss(eng);
      bg.col(k).noalias() = kBgMag * (w.bg_basis * zeta);
    }

    if (want_tokens)
      for (int l : cfg.layers) out.tokens[t][l].resize(std::size_t(K) * S * d);

    for (int k = 0; k < K; ++k) {
      const double step_scale = double(k + 1) / K;
      for (std::size_t li = 0; li < cfg.layers.size(); ++li) {
        const int layer = cfg.layers[li];
        const double g = layer_gain[li];
        base = core;
        base += bg.col(k);
        base += (g * kMomMag * mom) * mom_vec;
        base += (g * step_scale * cfg.kappa * ramp) * b_step;

        float* tok = want_tokens ? out.tokens[t][layer].data() + std::size_t(k) * S * d : nullptr;
        pool.setZero();
        for (int s = 0; s < S; ++s) {
          for (int i = 0; i < d; ++i) h(i) = base(i) + cfg.sigma * gauss(eng);
          if (layer == steer_layer) {
            if (pol) {
              gated.noalias() = pol->gate_for_step(k).matrix * h;
              h.swap(gated);
            } else {
              h += caa->strength * caa->direction;
            }
          }
          pool += h;
          if (tok)
            for (int i = 0; i < d; ++i) tok[std::size_t(s) * d + i] = float(h(i));
        }
        pool /= double(S);
        auto it = out.pooled.find(layer);
        if (it != out.pooled.end()) it->second.row(t * K + k) = pool;
        if (layer == cfg.signal_layer && k == K - 1) act_input = pool;
      }
    }

    x += kStepScale * (w.W * act_input + bias_mod * w.action_bias);
  }

  const double final_dist = x.norm();
  if (first_hit < 0 && final_dist < cfg.goal_radius) first_hit = cfg.horizon;
  out.result.id = episode_id(local_index);
  out.result.label = final_dist < cfg.goal_radius ? outcome::success : outcome::failure;
  out.result.final_distance = final_dist;
  out.result.first_hit = first_hit;
  return out;
}

std::pair<ActivationMatrix, ActivationMatrix> split_by_label(const ActivationMatrix& rows) {
  std::vector<Eigen::Index> s_idx, f_idx;
  for (Eigen::Index i = 0; i < rows.count(); ++i)
    (rows.rows[std::size_t(i)].label == outcome::success ? s_idx : f_idx).push_back(i);
  auto take = [&](const std::vector<Eigen::Index>& idx) {
    ActivationMatrix m;
    m.data.resize(Eigen::Index(idx.size()), rows.dim());
    m.rows.reserve(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      m.data.row(Eigen::Index(i)) = rows.data.row(idx[i]);
      m.rows.push_back(rows.rows[std::size_t(idx[i])]);
    }
    return m;
  };
  return {take(s_idx), take(f_idx)};
}

struct FitData {
  std::map<int, ActivationMatrix> succ, fail;
  int n_succ = 0, n_fail = 0;  // episode counts

  bool eligible() const { return n_succ >= kMinPerClass && n_fail >= kMinPerClass; }
};

FitData split_fit(const RolloutData& roll) {
  FitData f;
  for (const auto& r : roll.summary.results)
    (r.label == outcome::success ? f.n_succ : f.n_fail)++;
  for (const auto& [layer, rows] : roll.by_layer) {
    auto [s, fl] = split_by_label(rows);
    f.succ.emplace(layer, std::move(s));
    f.fail.emplace(layer, std::move(fl));
  }
  return f;
}

// Success/failure conceptors per (layer, aperture), fitted once.
struct ConceptorCache {
  const FitData* fit = nullptr;
  std::map<std::pair<int, double>, std::pair<Conceptor, Conceptor>> pairs;

  const std::pair<Conceptor, Conceptor>& at(int layer, double alpha) {
    const auto key = std::make_pair(layer, alpha);
    auto it = pairs.find(key);
    if (it == pairs.end())
      it = pairs
               .emplace(key, std::make_pair(fit_conceptor(fit->succ.at(layer), alpha),
                                            fit_conceptor(fit->fail.at(layer), alpha)))
               .first;
    return it->second;
  }
};

hyperselect::SelectionResult run_selection(ConceptorCache& cache,
                                           const hyperselect::SweepGrid& grid, bool eligible) {
  std::map<int, std::vector<Conceptor>> s1in;
  for (int l : grid.layers) {
    if (eligible) {
      const auto& [cs, cf] = cache.at(l, hyperselect::kStage1Aperture);
      s1in[l].push_back(algebra::contrastive(cs, cf));
    } else {
      // no failure class: rank layers by the positive conceptor instead
      s1in[l].push_back(fit_conceptor(cache.fit->succ.at(l), hyperselect::kStage1Aperture));
    }
  }
  const auto s1 = hyperselect::stage1_layer(s1in);

  hyperselect::Stage2Result s2;
  if (eligible) {
    std::map<double, std::vector<std::pair<Conceptor, Conceptor>>> s2in;
    for (double a : grid.apertures) s2in[a].push_back(cache.at(s1.layer, a));
    s2 = hyperselect::stage2_apertures(s2in);
  } else {
    // overlap needs both classes; keep the whole aperture set
    s2.kept = grid.apertures;
    for (double a : grid.apertures) s2.mean_overlap[a] = 0.0;
  }
  return hyperselect::assemble(grid, s1, s2);
}

SteeringPolicy single_gate_policy(const Conceptor& c, double beta, int layer) {
  SteeringPolicy p;
  p.strategy = steering_strategy::global;
  p.layer = layer;
  p.gates.emplace(kAllSteps, make_gate(c, beta, steering_strategy::global, layer));
  return p;
}

}  // namespace

void SimConfig::validate() const {
  require(d >= 1 && m >= 1 && r >= 1, errc::invalid_config, "dimensions must be positive");
  require(m + r <= d, errc::dim_budget,
          "m + r = " + std::to_string(m + r) + " exceeds d = " + std::to_string(d));
  require(horizon >= 1 && denoise_steps >= 1 && tokens >= 1, errc::invalid_config,
          "horizon, denoise steps and tokens must be positive");
  require(goal_radius > 0.0 && sigma >= 0.0, errc::invalid_config,
          "goal radius must be positive and sigma non-negative");
  require(kappa >= 0.0 && kappa <= 1.0, errc::invalid_config, "kappa must lie in [0,1]");
  require(omega >= 0.0 && omega <= 1.0, errc::invalid_config, "omega must lie in [0,1]");
  require(!layers.empty(), errc::invalid_config, "at least one layer");
  require(std::set<int>(layers.begin(), layers.end()).size() == layers.size(),
          errc::invalid_config, "duplicate layer index");
  require(std::find(layers.begin(), layers.end(), signal_layer) != layers.end(),
          errc::invalid_config, "signal layer missing from the layer list");
}

SimWorld make_world(const SimConfig& cfg) {
  cfg.validate();
  auto eng = make_engine(cfg.seed, rng_stream::world, 0);
  return build_world(cfg, eng, nullptr, 1.0, nullptr, nullptr);
}

RolloutData rollout(const SimWorld& world, int episodes, const RolloutOptions& opts) {
  const SimConfig& cfg = world.cfg;
  require(episodes >= 1, errc::empty_input, "rollout needs at least one episode");
  require(!(opts.policy && opts.caa), errc::invalid_config,
          "a rollout steers with a gate policy or an additive vector, not both");
  auto has_layer = [&](int l) {
    return std::find(cfg.layers.begin(), cfg.layers.end(), l) != cfg.layers.end();
  };
  if (opts.policy) {
    require(has_layer(opts.policy->layer), errc::unknown_layer,
            "policy layer " + std::to_string(opts.policy->layer) + " not emitted");
    for (const auto& [step, gate] : opts.policy->gates)
      require(gate.dim() == cfg.d, errc::dim_mismatch, "gate dimension != activation dim");
    for (int k = 0; k < cfg.denoise_steps; ++k) opts.policy->gate_for_step(k);
  }
  if (opts.caa) {
    require(has_layer(opts.caa->layer), errc::unknown_layer,
            "steering vector layer " + std::to_string(opts.caa->layer) + " not emitted");
    require(opts.caa->direction.size() == cfg.d, errc::dim_mismatch,
            "steering vector dimension != activation dim");
  }
  for (int l : opts.keep_layers)
    require(has_layer(l), errc::unknown_layer, "kept layer " + std::to_string(l) + " not emitted");
  const bool want_tokens = !opts.out.empty();

  std::vector<EpisodeBuffers> buf(static_cast<std::size_t>(episodes));
  const int threads = kernels::worker_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int e = 0; e < episodes; ++e)
    buf[std::size_t(e)] = run_episode(world, opts.stream, opts.episode_offset + std::uint64_t(e),
                                      e, opts.policy, opts.caa, opts.keep_layers, want_tokens);

  RolloutData out;
  out.summary.episodes = episodes;
  for (const auto& b : buf) {
    out.summary.results.push_back(b.result);
    if (b.result.label == outcome::success) ++out.summary.successes;
  }

  const int rows_per_episode = cfg.horizon * cfg.denoise_steps;
  for (int l : opts.keep_layers) {
    ActivationMatrix m;
    m.data.resize(Eigen::Index(episodes) * rows_per_episode, cfg.d);
    m.rows.reserve(std::size_t(episodes) * std::size_t(rows_per_episode));
    for (int e = 0; e < episodes; ++e) {
      const auto& b = buf[std::size_t(e)];
      m.data.middleRows(Eigen::Index(e) * rows_per_episode, rows_per_episode) = b.pooled.at(l);
      for (int t = 0; t < cfg.horizon; ++t)
        for (int k = 0; k < cfg.denoise_steps; ++k)
          m.rows.push_back({b.result.id, t, k, l, b.result.label});
    }
    out.by_layer.emplace(l, std::move(m));
  }

  if (want_tokens) {
    container::Writer writer(opts.out, opts.task, cfg.d, cfg.denoise_steps, cfg.tokens,
                             cfg.layers);
    for (const auto& b : buf) {
      for (int t = 0; t < cfg.horizon; ++t)
        for (int l : cfg.layers) writer.add(b.result.id, t, l, b.tokens[std::size_t(t)].at(l));
      writer.finish_episode(b.result.id, b.result.label, -b.result.final_distance);
    }
    writer.finalize();
    out.summary.container = opts.out;
  }
  return out;
}

SelfSteerReport experiment_self_steer(const SimConfig& cfg, const hyperselect::SweepGrid& grid,
                                      const std::vector<steering_strategy>& strategies,
                                      const SelfSteerOptions& opts) {
  SimWorld world = make_world(cfg);
  require(!strategies.empty(), errc::empty_input, "no strategies to evaluate");
  require(opts.fit_n >= 1 && opts.test_n >= 1, errc::empty_input, "need fit and test episodes");
  for (int l : grid.layers)
    require(std::find(cfg.layers.begin(), cfg.layers.end(), l) != cfg.layers.end(),
            errc::unknown_layer, "grid layer " + std::to_string(l) + " not emitted");

  SelfSteerReport rep;

  RolloutOptions fit_opts;
  fit_opts.stream = rng_stream::fit_episodes;
  fit_opts.keep_layers = grid.layers;
  FitData fit = split_fit(rollout(world, opts.fit_n, fit_opts));
  rep.fit_success_episodes = fit.n_succ;
  rep.fit_failure_episodes = fit.n_fail;

  ConceptorCache cache{&fit, {}};
  rep.selection = run_selection(cache, grid, fit.eligible());
  const int L = rep.selection.layer;

  RolloutOptions base_opts;
  if (opts.keep_geometry) base_opts.keep_layers = {L};
  RolloutData base = rollout(world, opts.test_n, base_opts);
  rep.test_episodes = opts.test_n;
  rep.baseline_successes = base.summary.successes;
  rep.baseline_sr = base.summary.success_rate();

  auto evaluate = [&](const RolloutOptions& o) { return rollout(world, opts.test_n, o).summary; };
  auto make_eval = [&](steering_strategy st, double a, double b, const RolloutSummary& s) {
    StrategyEval ev;
    ev.strategy = st;
    ev.alpha = a;
    ev.beta = b;
    ev.layer = L;
    ev.successes = s.successes;
    ev.episodes = s.episodes;
    ev.sr = s.success_rate();
    ev.delta_sr = ev.sr - rep.baseline_sr;
    ev.vs_baseline =
        stats::two_prop_z(rep.baseline_successes, opts.test_n, s.successes, opts.test_n);
    return ev;
  };

  for (auto st : strategies) {
    try {
      for (double a : rep.selection.apertures)
        for (double b : rep.selection.betas) {
          SteeringPolicy pol = build_policy(fit.succ.at(L), &fit.fail.at(L), a, b, st,
                                            cfg.denoise_steps);
          RolloutOptions o;
          o.policy = &pol;
          rep.evals.push_back(make_eval(st, a, b, evaluate(o)));
        }
    } catch (const error& e) {
      if (e.code() != errc::insufficient_class && e.code() != errc::empty_matrix &&
          e.code() != errc::empty_step_bucket)
        throw;
      rep.skipped.push_back(std::string(strategy_name(st)) + ": " + e.what());
    }
  }

  const StrategyEval* best = nullptr;
  for (const auto& ev : rep.evals)
    if (ev.strategy == steering_strategy::global && (!best || ev.sr > best->sr)) best = &ev;

  if (opts.with_controls) {
    if (best) {
      const auto& [cs, cf] = cache.at(L, best->alpha);
      const Conceptor steer = algebra::contrastive(cs, cf);
      const Conceptor rnd =
          random_control(steer, derive_seed(cfg.seed, rng_stream::controls, 0));
      SteeringPolicy rp = single_gate_policy(rnd, best->beta, L);
      RolloutOptions ro;
      ro.policy = &rp;
      rep.random_control = make_eval(best->strategy, best->alpha, best->beta, evaluate(ro));

      VectorXd diff =
          fit.succ.at(L).data.colwise().mean() - fit.fail.at(L).data.colwise().mean();
      const double span = diff.norm();
      if (span >= 1e-12) {
        diff /= span;
        for (double scale : kCaaScales) {
          CaaPolicy cp{L, scale * span, diff};
          RolloutOptions co;
          co.caa = &cp;
          StrategyEval ev = make_eval(best->strategy, best->alpha, best->beta, evaluate(co));
          if (!rep.caa_control || ev.sr > rep.caa_control->sr) {
            rep.caa_control = ev;
            rep.caa_strength = cp.strength;
          }
        }
      } else {
        rep.skipped.push_back("caa: DegenerateDirection: class means are identical");
      }
    } else {
      rep.skipped.push_back("controls: no contrastive global arm to anchor on");
    }
  }

  if (opts.keep_geometry && best) {
    const auto& [cs, cf] = cache.at(L, best->alpha);
    GeometryClouds g;
    g.c_steer = algebra::contrastive(cs, cf);
    SteeringPolicy pol = build_policy(fit.succ.at(L), &fit.fail.at(L), best->alpha, best->beta,
                                      steering_strategy::global, cfg.denoise_steps);
    RolloutOptions o;
    o.policy = &pol;
    o.keep_layers = {L};
    RolloutData steered = rollout(world, opts.test_n, o);
    g.steered = std::move(steered.by_layer.at(L));
    auto [bs, bf] = split_by_label(base.by_layer.at(L));
    g.base_success = std::move(bs);
    g.base_failure = std::move(bf);
    rep.geometry = std::move(g);
  }
  return rep;
}

TransferReport experiment_transfer(const TransferConfig& tc) {
  tc.base.validate();
  require(tc.tasks >= 4, errc::too_few_tasks, "transfer family needs at least 4 tasks");
  std::vector<double> coh =
      tc.coherence.empty() ? std::vector<double>(std::size_t(tc.tasks), 1.0) : tc.coherence;
  require(int(coh.size()) == tc.tasks, errc::dim_mismatch,
          "coherence list length must match the task count");
  for (double c : coh)
    require(c >= 0.0 && c <= 1.0, errc::invalid_config, "coherence must lie in [0,1]");
  require(tc.fit_n >= 1 && tc.test_n >= 1, errc::empty_input, "need fit and test episodes");

  const SimConfig& cfg = tc.base;
  auto feng = make_engine(cfg.seed, rng_stream::world, 0);
  const MatrixXd b_shared = orthonormal(feng, cfg.d, cfg.r);
  const MatrixXd u_l = gaussian(feng, cfg.m, cfg.r) / std::sqrt(double(cfg.r));
  VectorXd v_a = gaussian(feng, cfg.m, 1);
  v_a.normalize();

  struct Task {
    SimWorld world;
    Conceptor c_s, c_f;
    double base_sr = 0.0;
    bool ok = false;
  };
  std::vector<Task> tasks(std::size_t(tc.tasks));
  TransferReport rep;

  for (int t = 0; t < tc.tasks; ++t) {
    auto& task = tasks[std::size_t(t)];
    auto eng = make_engine(cfg.seed, rng_stream::world, 1 + std::uint64_t(t));
    task.world = build_world(cfg, eng, &b_shared, coh[std::size_t(t)], &u_l, &v_a);

    RolloutOptions fo;
    fo.stream = rng_stream::fit_episodes;
    fo.episode_offset = std::uint64_t(t) * kTaskStride;
    fo.keep_layers = {cfg.signal_layer};
    FitData fit = split_fit(rollout(task.world, tc.fit_n, fo));
    if (!fit.eligible()) {
      rep.skipped.push_back("task " + std::to_string(t) + ": InsufficientClass: success=" +
                            std::to_string(fit.n_succ) + " failure=" +
                            std::to_string(fit.n_fail));
    } else {
      task.c_s = fit_conceptor(fit.succ.at(cfg.signal_layer), tc.alpha);
      task.c_f = fit_conceptor(fit.fail.at(cfg.signal_layer), tc.alpha);
      task.ok = true;
    }

    RolloutOptions bo;
    bo.episode_offset = std::uint64_t(t) * kTaskStride;
    task.base_sr = rollout(task.world, tc.test_n, bo).summary.success_rate();
    rep.baseline_sr.push_back(task.base_sr);
  }

  std::vector<double> fail_cont, succ_cont, gains;
  for (int s = 0; s < tc.tasks; ++s) {
    if (!tasks[std::size_t(s)].ok) continue;
    const Conceptor steer =
        algebra::contrastive(tasks[std::size_t(s)].c_s, tasks[std::size_t(s)].c_f);
    SteeringPolicy pol = single_gate_policy(steer, tc.beta, cfg.signal_layer);
    for (int t = 0; t < tc.tasks; ++t) {
      if (!tasks[std::size_t(t)].ok) continue;
      RolloutOptions so;
      so.policy = &pol;
      so.episode_offset = std::uint64_t(t) * kTaskStride;
      const double sr = rollout(tasks[std::size_t(t)].world, tc.test_n, so).summary.success_rate();
      TransferPair pair;
      pair.source = s;
      pair.target = t;
      pair.failure_containment =
          diagnostics::containment(tasks[std::size_t(s)].c_f, tasks[std::size_t(t)].c_f);
      pair.success_containment =
          diagnostics::containment(tasks[std::size_t(s)].c_s, tasks[std::size_t(t)].c_s);
      pair.delta_sr = sr - tasks[std::size_t(t)].base_sr;
      rep.pairs.push_back(pair);
      if (s != t) {
        fail_cont.push_back(pair.failure_containment);
        succ_cont.push_back(pair.success_containment);
        gains.push_back(pair.delta_sr);
      }
    }
  }
  rep.failure_corr = stats::pearson(fail_cont, gains);
  rep.success_corr = stats::pearson(succ_cont, gains);
  return rep;
}

OverlapReport experiment_overlap_efficacy(const SimConfig& base, const std::vector<double>& omegas,
                                          double alpha, double beta, int fit_n, int test_n) {
  base.validate();
  require(omegas.size() >= 8, errc::empty_input, "the omega grid needs at least 8 points");
  require(fit_n >= 1 && test_n >= 1, errc::empty_input, "need fit and test episodes");

  OverlapReport rep;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    require(omegas[i] >= 0.0 && omegas[i] <= 1.0, errc::invalid_config,
            "omega must lie in [0,1]");
    SimConfig cfg = base;
    cfg.omega = omegas[i];
    SimWorld world = make_world(cfg);

    RolloutOptions fo;
    fo.stream = rng_stream::fit_episodes;
    fo.episode_offset = i * kTaskStride;
    fo.keep_layers = {cfg.signal_layer};
    FitData fit = split_fit(rollout(world, fit_n, fo));
    if (!fit.eligible()) {
      rep.skipped.push_back("omega " + std::to_string(omegas[i]) + ": InsufficientClass");
      continue;
    }
    const Conceptor c_s = fit_conceptor(fit.succ.at(cfg.signal_layer), alpha);
    const Conceptor c_f = fit_conceptor(fit.fail.at(cfg.signal_layer), alpha);

    OverlapPoint p;
    p.omega = omegas[i];
    p.overlap = diagnostics::overlap(c_s, c_f);

    RolloutOptions bo;
    bo.episode_offset = i * kTaskStride;
    p.baseline_sr = rollout(world, test_n, bo).summary.success_rate();

    SteeringPolicy pol =
        single_gate_policy(algebra::contrastive(c_s, c_f), beta, cfg.signal_layer);
    RolloutOptions so = bo;
    so.policy = &pol;
    p.steered_sr = rollout(world, test_n, so).summary.success_rate();
    p.delta_sr = p.steered_sr - p.baseline_sr;

    rep.points.push_back(p);
    xs.push_back(p.overlap);
    ys.push_back(p.delta_sr);
  }
  rep.rho = stats::spearman(xs, ys);
  return rep;
}

OracleGapReport experiment_oracle_gap(const SimConfig& cfg, const hyperselect::SweepGrid& grid,
                                      int fit_n, int test_n) {
  SimWorld world = make_world(cfg);
  require(!grid.layers.empty() && !grid.apertures.empty() && !grid.betas.empty() &&
              !grid.strategies.empty(),
          errc::empty_input, "sweep grid has an empty axis");
  require(fit_n >= 1 && test_n >= 1, errc::empty_input, "need fit and test episodes");
  for (int l : grid.layers)
    require(std::find(cfg.layers.begin(), cfg.layers.end(), l) != cfg.layers.end(),
            errc::unknown_layer, "grid layer " + std::to_string(l) + " not emitted");

  RolloutOptions fo;
  fo.stream = rng_stream::fit_episodes;
  fo.keep_layers = grid.layers;
  FitData fit = split_fit(rollout(world, fit_n, fo));
  require(fit.eligible(), errc::insufficient_class,
          "oracle sweep needs both outcome classes in the fit rollouts, got success=" +
              std::to_string(fit.n_succ) + " failure=" + std::to_string(fit.n_fail));

  ConceptorCache cache{&fit, {}};
  OracleGapReport rep;
  rep.selection = run_selection(cache, grid, true);

  std::map<hyperselect::GridConfig, double> table;
  for (int layer : grid.layers)
    for (double a : grid.apertures)
      for (double b : grid.betas)
        for (auto st : grid.strategies) {
          SteeringPolicy pol =
              build_policy(fit.succ.at(layer), &fit.fail.at(layer), a, b, st, cfg.denoise_steps);
          RolloutOptions o;
          o.policy = &pol;
          const double sr = rollout(world, test_n, o).summary.success_rate();
          const hyperselect::GridConfig gc{layer, a, b, st};
          table.emplace(gc, sr);
          rep.table.emplace_back(gc, sr);
        }
  rep.gap = hyperselect::oracle_gap(grid, rep.selection, table);
  return rep;
}

}  // namespace coast::sim
