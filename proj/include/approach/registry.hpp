#pragma once

// Name-keyed strategy construction from JSON specs, shared by the CLI and
// the golden tests. A spec is either a bare name ("blackwell") or an object
// {"name": "...", ...params}.

#include <cstdint>
#include <memory>
#include <string>
#include <utility>

#include "approach/conditions.hpp"
#include "approach/convex.hpp"
#include "approach/game.hpp"
#include "approach/json_io.hpp"
#include "approach/strategies.hpp"

namespace approach::io {

struct StrategySpec {
  std::string name;
  json params = json::object();
};

inline StrategySpec strategy_spec_from_json(const json& j,
                                            const std::string& path) {
  StrategySpec spec;
  if (j.is_string()) {
    spec.name = j.get<std::string>();
    return spec;
  }
  const json& jn = detail::member(j, "name", path);
  if (!jn.is_string()) detail::fail(path + ".name", "expected a string");
  spec.name = jn.get<std::string>();
  spec.params = j;
  spec.params.erase("name");
  return spec;
}

namespace detail {

inline double param_d(const json& p, const char* key, double fallback) {
  if (!p.contains(key)) return fallback;
  if (!p[key].is_number()) fail(std::string("params.") + key, "expected a number");
  return p[key].get<double>();
}

inline std::size_t param_u(const json& p, const char* key, std::size_t fallback) {
  if (!p.contains(key)) return fallback;
  const json& v = p[key];
  if (!v.is_number_integer() ||
      (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    fail(std::string("params.") + key, "expected a non-negative integer");
  return v.get<std::size_t>();
}

inline Vec param_vec(const json& p, const char* key) {
  if (!p.contains(key))
    fail(std::string("params.") + key, "missing required field");
  return vec_at(p[key], std::string("params.") + key);
}

}  // namespace detail

// Player 1 (approacher) registry. `target` may be null for target-free
// strategies; `seed` feeds construction-time randomness only (the simulator
// reseeds play).
inline std::unique_ptr<Player1Strategy> make_p1(const StrategySpec& spec,
                                                const GameSpec& game,
                                                const ConvexTarget* target,
                                                std::uint64_t seed = 0) {
  const json& p = spec.params;
  auto need_target = [&]() -> const ConvexTarget& {
    require(target != nullptr, "strategy '" + spec.name + "' needs a target");
    return *target;
  };
  if (spec.name == "blackwell")
    return std::make_unique<BlackwellStrategy>(game, need_target());
  if (spec.name == "blackwell_naive")
    return std::make_unique<BlackwellNaive>(game, need_target());
  if (spec.name == "calibrated")
    return std::make_unique<CalibratedStrategy>(
        game, need_target(), detail::param_d(p, "epsilon", 0.05), seed);
  if (spec.name == "doubling") {
    const ConvexTarget& t = need_target();
    DoublingWrap::Factory factory = [game, t](double eps) {
      return std::make_unique<CalibratedStrategy>(game, t, eps, 0);
    };
    return std::make_unique<DoublingWrap>(
        std::move(factory), detail::param_d(p, "epsilon_floor", 1.0 / 64.0),
        detail::param_u(p, "base_block", 64));
  }
  if (spec.name == "stationary")
    return std::make_unique<StationaryP1>(detail::param_vec(p, "x"));
  if (spec.name == "block")
    return std::make_unique<BlockStrategy>(
        static_cast<int>(detail::param_u(p, "max_p", 4)));
  if (spec.name == "weak")
    return std::make_unique<WeakApproachStrategy>(
        static_cast<int>(detail::param_u(p, "k", 2)),
        static_cast<int>(detail::param_u(p, "M", 4)),
        detail::param_u(p, "block", 10000), seed);
  require(false, "unknown player-1 strategy '" + spec.name + "'");
  return nullptr;
}

// Player 2 (opponent) registry. Excluders probe `opponent` during
// construction; `cert` is required by best_response only.
inline std::unique_ptr<Player2Strategy> make_p2(const StrategySpec& spec,
                                                const GameSpec& game,
                                                const ConvexTarget* target,
                                                const P1Factory& opponent,
                                                const Certificate* cert,
                                                std::uint64_t seed = 0) {
  const json& p = spec.params;
  if (spec.name == "uniform")
    return std::make_unique<StationaryP2>(uniform_mixed(game.num_cols()));
  if (spec.name == "stationary")
    return std::make_unique<StationaryP2>(detail::param_vec(p, "y"));
  if (spec.name == "threshold_excluder") {
    require(static_cast<bool>(opponent),
            "threshold_excluder needs an opponent to probe");
    return std::make_unique<ThresholdExcluder>(
        game, opponent, detail::param_u(p, "probe_horizon", 1000),
        detail::param_d(p, "threshold", 0.25),
        static_cast<int>(detail::param_u(p, "probe_runs", 200)), seed);
  }
  if (spec.name == "best_response") {
    require(static_cast<bool>(opponent),
            "best_response needs an opponent to probe");
    require(target != nullptr && cert != nullptr,
            "best_response needs a target and its certificate");
    return std::make_unique<BestResponseExcluder>(
        game, *target, *cert, opponent,
        detail::param_u(p, "probe_horizon", 1000),
        static_cast<int>(detail::param_u(p, "probe_runs", 200)), seed);
  }
  require(false, "unknown player-2 strategy '" + spec.name + "'");
  return nullptr;
}

}  // namespace approach::io
