// Copyright (c) 2026 The corpusforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <concepts>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "corpusforge/error.hpp"
#include "corpusforge/util.hpp"

namespace corpusforge {

using State = std::vector<double>;

/// Fixed-step Euler settings. Defaults are 10 steps at guidance scale 1 on
/// t in [0, 1].
struct SamplerConfig {
  int steps = 10;
  double guidance_scale = 1.0;
  double t_start = 0.0;
  double t_end = 1.0;
};

inline void validate(const SamplerConfig& cfg) {
  if (cfg.steps < 1) throw Error(ErrorKind::ConfigInvalid, "sampler.steps must be >= 1");
  if (!(cfg.t_end > cfg.t_start)) {
    throw Error(ErrorKind::ConfigInvalid, "sampler.t_end must exceed sampler.t_start");
  }
  if (!std::isfinite(cfg.guidance_scale)) {
    throw Error(ErrorKind::ConfigInvalid, "sampler.guidance_scale must be finite");
  }
}

/// A velocity field v(t, x) with a conditional and an unconditional branch.
template <typename F>
concept VectorField = requires(const F& f, double t, std::span<const double> x, bool c) {
  { f.evaluate(t, x, c) } -> std::convertible_to<State>;
};

/// Fields opt into concurrent evaluation by declaring
/// `static constexpr bool concurrent_safe = true;`. Anything else is treated
/// as exclusive and evaluated under a lock.
template <typename F>
inline constexpr bool is_concurrent_safe_v = [] {
  if constexpr (requires { F::concurrent_safe; }) {
    return static_cast<bool>(F::concurrent_safe);
  } else {
    return false;
  }
}();

/// v_uncond + scale * (v_cond - v_uncond). Scales 1 and 0 return the
/// respective branch exactly.
inline State cfg_combine(std::span<const double> v_cond, std::span<const double> v_uncond,
                         double scale) {
  if (v_cond.size() != v_uncond.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "conditional and unconditional velocities differ in dimension");
  }
  if (scale == 1.0) return State(v_cond.begin(), v_cond.end());
  if (scale == 0.0) return State(v_uncond.begin(), v_uncond.end());
  State out(v_cond.size());
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = v_uncond[i] + scale * (v_cond[i] - v_uncond[i]);
  }
  return out;
}

struct TrajectoryPoint {
  int step = 0;
  double t = 0.0;
  State values;
};

using Trajectory = std::vector<TrajectoryPoint>;

namespace detail {

template <VectorField F>
State guided_velocity(const F& field, double t, const State& x, double scale) {
  auto check = [&](const State& v) {
    if (v.size() != x.size()) {
      throw Error(ErrorKind::DimensionMismatch, "field output dimension differs from state");
    }
    return v;
  };
  // A branch with zero weight is not evaluated.
  if (scale == 1.0) return check(field.evaluate(t, x, true));
  if (scale == 0.0) return check(field.evaluate(t, x, false));
  const State vc = check(field.evaluate(t, x, true));
  const State vu = check(field.evaluate(t, x, false));
  return cfg_combine(vc, vu, scale);
}

inline bool all_finite(const State& x) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace detail

/// Integrates dx/dt = v(t, x) from t_start to t_end with `steps` uniform
/// Euler steps. When `trajectory` is given it receives x_0 .. x_steps.
template <VectorField F>
State euler_integrate(const F& field, const State& x0, const SamplerConfig& cfg = {},
                      Trajectory* trajectory = nullptr) {
  validate(cfg);
  if (!detail::all_finite(x0)) {
    throw Error(ErrorKind::NonFiniteState, "initial state is not finite (step 0)");
  }
  const double dt = (cfg.t_end - cfg.t_start) / cfg.steps;
  State x = x0;
  if (trajectory) {
    trajectory->clear();
    trajectory->push_back({0, cfg.t_start, x});
  }
  for (int k = 0; k < cfg.steps; ++k) {
    const double t = cfg.t_start + k * dt;
    const State v = detail::guided_velocity(field, t, x, cfg.guidance_scale);
    for (size_t i = 0; i < x.size(); ++i) x[i] += dt * v[i];
    if (!detail::all_finite(x)) {
      throw Error(ErrorKind::NonFiniteState,
                  "state became non-finite at step " + std::to_string(k + 1));
    }
    if (trajectory) trajectory->push_back({k + 1, cfg.t_start + (k + 1) * dt, x});
  }
  return x;
}

/// Independent integrations of many initial states. Runs them on `workers`
/// threads when the field is concurrent-safe; otherwise each field call is
/// serialized.
template <VectorField F>
std::vector<State> euler_integrate_batch(const F& field, std::span<const State> x0s,
                                         const SamplerConfig& cfg = {},
                                         unsigned workers = default_workers()) {
  std::vector<State> out(x0s.size());
  if constexpr (is_concurrent_safe_v<F>) {
    parallel_for(x0s.size(), workers,
                 [&](size_t i) { out[i] = euler_integrate(field, x0s[i], cfg); });
  } else {
    struct Locked {
      const F& inner;
      std::mutex& mu;
      State evaluate(double t, std::span<const double> x, bool c) const {
        std::lock_guard<std::mutex> lock(mu);
        return inner.evaluate(t, x, c);
      }
    };
    std::mutex mu;
    const Locked locked{field, mu};
    parallel_for(x0s.size(), workers,
                 [&](size_t i) { out[i] = euler_integrate(locked, x0s[i], cfg); });
  }
  return out;
}

inline std::string serialize_trajectory(const Trajectory& traj) {
  std::string out;
  for (const auto& p : traj) {
    nlohmann::ordered_json j;
    j["step"] = p.step;
    j["t"] = p.t;
    j["state"] = p.values;
    out += j.dump() + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Analytic fields

/// v = rate * x on both branches (rate = -1 gives exponential decay).
struct LinearField {
  static constexpr bool concurrent_safe = true;
  double rate = -1.0;

  State evaluate(double, std::span<const double> x, bool) const {
    State v(x.begin(), x.end());
    for (double& e : v) e *= rate;
    return v;
  }
};

/// v = value everywhere, both branches.
struct ConstantField {
  static constexpr bool concurrent_safe = true;
  double value = 1.0;

  State evaluate(double, std::span<const double> x, bool) const {
    return State(x.size(), value);
  }
};

/// Conditional branch pulls toward `target` (v = target - x); the
/// unconditional branch pulls toward the origin (v = -x).
struct TargetPullField {
  static constexpr bool concurrent_safe = true;
  State target;

  State evaluate(double, std::span<const double> x, bool conditioned) const {
    State v(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
      const double goal = conditioned && i < target.size() ? target[i] : 0.0;
      v[i] = goal - x[i];
    }
    return v;
  }
};

}  // namespace corpusforge
