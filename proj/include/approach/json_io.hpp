#pragma once

// JSON (de)serialization for games, targets, certificates, and reports, plus
// CSV export of simulation traces. Parse errors carry the path of the
// offending field ("game.payoffs[1][0]") so CLI users can fix inputs without
// reading stack traces.

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "approach/common.hpp"
#include "approach/conditions.hpp"
#include "approach/convex.hpp"
#include "approach/counterexample.hpp"
#include "approach/game.hpp"
#include "approach/incomplete_info.hpp"
#include "approach/polytope.hpp"
#include "approach/simulator.hpp"

namespace approach::io {

using json = nlohmann::json;

namespace detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("invalid input at " + path + ": " + what);
}

inline const json& member(const json& j, const char* key,
                          const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing field");
  return *it;
}

inline double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

inline Vec vec_at(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  Vec out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(number_at(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline std::vector<Vec> matrix_at(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of rows");
  std::vector<Vec> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(vec_at(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline json vec_to_json(const Vec& v) { return json(v); }

inline json flag_to_json(const Flag& f) {
  json rows = json::array();
  for (std::size_t r = 0; r < f.rows; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < f.cols; ++c) row.push_back(f.at(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

// --------------------------- games and targets ----------------------------

// {"payoffs": [[[f64 x d] x J] x I], "signals": [[[f64 x S] x J] x I]}
inline GameSpec game_from_json(const json& j, const std::string& path = "game") {
  const json& jp = detail::member(j, "payoffs", path);
  const json& js = detail::member(j, "signals", path);
  if (!jp.is_array()) detail::fail(path + ".payoffs", "expected an array");
  if (!js.is_array()) detail::fail(path + ".signals", "expected an array");
  std::vector<std::vector<Vec>> payoffs, signals;
  for (std::size_t i = 0; i < jp.size(); ++i)
    payoffs.push_back(
        detail::matrix_at(jp[i], path + ".payoffs[" + std::to_string(i) + "]"));
  for (std::size_t i = 0; i < js.size(); ++i)
    signals.push_back(
        detail::matrix_at(js[i], path + ".signals[" + std::to_string(i) + "]"));
  try {
    return GameSpec(std::move(payoffs), std::move(signals));
  } catch (const std::exception& e) {
    detail::fail(path, e.what());
  }
}

inline json game_to_json(const GameSpec& g) {
  json jp = json::array(), js = json::array();
  for (std::size_t i = 0; i < g.num_rows(); ++i) {
    json prow = json::array(), srow = json::array();
    for (std::size_t j = 0; j < g.num_cols(); ++j) {
      prow.push_back(json(g.payoff_vec(i, j)));
      const double* s = g.signal_row(i, j);
      srow.push_back(json(Vec(s, s + g.num_signals())));
    }
    jp.push_back(std::move(prow));
    js.push_back(std::move(srow));
  }
  return json{{"payoffs", std::move(jp)}, {"signals", std::move(js)}};
}

// {"type":"box","lo":[...],"hi":[...]} | {"type":"half_space","a":[...],"b":f}
// | {"type":"ball","center":[...],"radius":f}
// | {"type":"polytope","a_ineq":[[...]],"b_ineq":[...],"a_eq":...,"b_eq":...}
inline ConvexTarget target_from_json(const json& j,
                                     const std::string& path = "target") {
  const json& jt = detail::member(j, "type", path);
  if (!jt.is_string()) detail::fail(path + ".type", "expected a string");
  const std::string type = jt.get<std::string>();
  try {
    if (type == "box")
      return ConvexTarget::box(
          detail::vec_at(detail::member(j, "lo", path), path + ".lo"),
          detail::vec_at(detail::member(j, "hi", path), path + ".hi"));
    if (type == "half_space")
      return ConvexTarget::half_space(
          detail::vec_at(detail::member(j, "a", path), path + ".a"),
          detail::number_at(detail::member(j, "b", path), path + ".b"));
    if (type == "ball")
      return ConvexTarget::ball(
          detail::vec_at(detail::member(j, "center", path), path + ".center"),
          detail::number_at(detail::member(j, "radius", path),
                            path + ".radius"));
    if (type == "polytope") {
      const std::vector<Vec> a_ineq = detail::matrix_at(
          detail::member(j, "a_ineq", path), path + ".a_ineq");
      const Vec b_ineq =
          detail::vec_at(detail::member(j, "b_ineq", path), path + ".b_ineq");
      if (a_ineq.size() != b_ineq.size())
        detail::fail(path, "a_ineq and b_ineq row counts differ");
      if (a_ineq.empty()) detail::fail(path + ".a_ineq", "needs >= 1 row");
      HPolytope h = HPolytope::empty_like(a_ineq[0].size());
      for (std::size_t r = 0; r < a_ineq.size(); ++r)
        h.add_inequality(a_ineq[r], b_ineq[r]);
      if (j.contains("a_eq")) {
        const std::vector<Vec> a_eq =
            detail::matrix_at(j["a_eq"], path + ".a_eq");
        const Vec b_eq =
            detail::vec_at(detail::member(j, "b_eq", path), path + ".b_eq");
        if (a_eq.size() != b_eq.size())
          detail::fail(path, "a_eq and b_eq row counts differ");
        for (std::size_t r = 0; r < a_eq.size(); ++r)
          h.add_equality(a_eq[r], b_eq[r]);
      }
      return ConvexTarget::polytope(std::move(h));
    }
  } catch (const std::exception& e) {
    detail::fail(path, e.what());
  }
  detail::fail(path + ".type", "unknown target type '" + type + "'");
}

inline json target_to_json(const ConvexTarget& t) {
  switch (t.kind()) {
    case ConvexTarget::Kind::kHalfSpace:
      return json{{"type", "half_space"},
                  {"a", t.halfspace_normal()},
                  {"b", t.halfspace_offset()}};
    case ConvexTarget::Kind::kBox:
      return json{{"type", "box"}, {"lo", t.box_lo()}, {"hi", t.box_hi()}};
    case ConvexTarget::Kind::kBall:
      return json{{"type", "ball"},
                  {"center", t.ball_center()},
                  {"radius", t.ball_radius()}};
    case ConvexTarget::Kind::kPolytope: {
      const HPolytope& h = t.hrep();
      json a_ineq = json::array(), a_eq = json::array();
      for (std::size_t r = 0; r < h.a_ineq.rows; ++r) {
        Vec row(h.dim);
        for (std::size_t c = 0; c < h.dim; ++c) row[c] = h.a_ineq.at(r, c);
        a_ineq.push_back(json(row));
      }
      for (std::size_t r = 0; r < h.a_eq.rows; ++r) {
        Vec row(h.dim);
        for (std::size_t c = 0; c < h.dim; ++c) row[c] = h.a_eq.at(r, c);
        a_eq.push_back(json(row));
      }
      json out{{"type", "polytope"},
               {"a_ineq", std::move(a_ineq)},
               {"b_ineq", h.b_ineq}};
      if (h.a_eq.rows > 0) {
        out["a_eq"] = std::move(a_eq);
        out["b_eq"] = h.b_eq;
      }
      return out;
    }
  }
  throw std::logic_error("target_to_json: unreachable");
}

// {"prior":[...], "states":[{"payoffs":[[f64 x J] x I],
//                            "signals":[[[f64 x S] x J] x I]}, ...]}
inline IIGame ii_from_json(const json& j, const std::string& path = "iigame") {
  Vec prior = detail::vec_at(detail::member(j, "prior", path), path + ".prior");
  const json& js = detail::member(j, "states", path);
  if (!js.is_array() || js.empty())
    detail::fail(path + ".states", "expected a non-empty array");
  std::vector<std::vector<Vec>> payoffs;
  std::vector<std::vector<std::vector<Vec>>> signals;
  for (std::size_t k = 0; k < js.size(); ++k) {
    const std::string sp = path + ".states[" + std::to_string(k) + "]";
    payoffs.push_back(
        detail::matrix_at(detail::member(js[k], "payoffs", sp), sp + ".payoffs"));
    const json& sig = detail::member(js[k], "signals", sp);
    if (!sig.is_array()) detail::fail(sp + ".signals", "expected an array");
    std::vector<std::vector<Vec>> tab;
    for (std::size_t i = 0; i < sig.size(); ++i)
      tab.push_back(detail::matrix_at(
          sig[i], sp + ".signals[" + std::to_string(i) + "]"));
    signals.push_back(std::move(tab));
  }
  try {
    return IIGame(std::move(prior), std::move(payoffs), std::move(signals));
  } catch (const std::exception& e) {
    detail::fail(path, e.what());
  }
}

inline json ii_to_json(const IIGame& g) {
  json states = json::array();
  for (std::size_t k = 0; k < g.num_states(); ++k) {
    json jp = json::array(), js = json::array();
    for (std::size_t i = 0; i < g.num_rows(); ++i) {
      json prow = json::array(), srow = json::array();
      for (std::size_t jj = 0; jj < g.num_cols(); ++jj) {
        prow.push_back(g.payoff(k, i, jj));
        const double* s = g.transposed(k).signal_row(jj, i);
        srow.push_back(json(Vec(s, s + g.num_signals())));
      }
      jp.push_back(std::move(prow));
      js.push_back(std::move(srow));
    }
    states.push_back(json{{"payoffs", std::move(jp)}, {"signals", std::move(js)}});
  }
  return json{{"prior", g.prior()}, {"states", std::move(states)}};
}

// ------------------------------ certificates ------------------------------

inline json certificate_to_json(const Certificate& c) {
  json out;
  out["verdict"] =
      c.approachable() ? "approachable" : "not_approachable";
  out["monitoring"] =
      c.monitoring == MonitoringKind::kFull ? "full" : "partial";
  out["deficit"] = c.deficit;
  out["mesh"] = c.mesh;
  out["mesh_stable"] = c.mesh_stable;
  out["tolerance"] = c.tolerance;
  if (c.failing_flag) out["failing_flag"] = detail::flag_to_json(*c.failing_flag);
  json wit = json::array();
  for (const auto& [flag, x] : c.witness_map)
    wit.push_back(json{{"flag", detail::flag_to_json(flag)}, {"x", x}});
  out["witnesses"] = std::move(wit);
  return out;
}

// --------------------------- traces and sweeps -----------------------------

// One row per checkpoint: n, d_C, then (when the trace carries per-stage
// type data) one cumulative count column per type.
inline void write_trace_csv(std::ostream& os, const Trace& trace,
                            const ConvexTarget& target,
                            std::size_t num_types = 0) {
  std::size_t types = num_types;
  if (types == 0 && trace.has_stage_records)
    for (int t : trace.types)
      if (t >= 0) types = std::max<std::size_t>(types, static_cast<std::size_t>(t) + 1);

  os << "n,d";
  for (std::size_t t = 0; t < types; ++t) os << ",type_" << t;
  os << "\n";
  os.precision(12);

  auto emit = [&](std::uint64_t n, const Vec& avg,
                  const std::vector<std::uint64_t>& counts) {
    os << n << "," << target.distance(avg);
    for (std::size_t t = 0; t < types; ++t)
      os << "," << (t < counts.size() ? counts[t] : 0);
    os << "\n";
  };

  std::vector<std::uint64_t> counts(types, 0);
  if (!trace.checkpoint_avg.empty()) {
    std::size_t stage = 0;
    for (const auto& [n, avg] : trace.checkpoint_avg) {
      if (trace.has_stage_records)
        for (; stage < n && stage < trace.types.size(); ++stage)
          if (trace.types[stage] >= 0)
            ++counts[static_cast<std::size_t>(trace.types[stage])];
      emit(n, avg, counts);
    }
    return;
  }
  require(trace.has_stage_records,
          "write_trace_csv: trace has neither checkpoints nor stage records");
  for (std::size_t n = 0; n < trace.running_avg.size(); ++n) {
    if (trace.types[n] >= 0)
      ++counts[static_cast<std::size_t>(trace.types[n])];
    emit(n + 1, trace.running_avg[n], counts);
  }
}

inline json trace_to_json(const Trace& trace, const ConvexTarget& target) {
  json out;
  out["seed"] = trace.seed;
  out["horizon"] = trace.horizon;
  if (!trace.game_id.empty()) out["game"] = trace.game_id;
  if (!trace.target_id.empty()) out["target"] = trace.target_id;
  out["final_avg"] = trace.final_avg;
  out["final_distance"] = target.distance(trace.final_avg);
  json cps = json::array();
  for (const auto& [n, avg] : trace.checkpoint_avg)
    cps.push_back(json{{"n", n},
                       {"avg", avg},
                       {"distance", target.distance(avg)}});
  out["checkpoints"] = std::move(cps);
  return out;
}

inline json run_stats_to_json(const RunStats& stats, bool include_raw = false) {
  auto stat_row = [](const CheckpointStat& s) {
    return json{{"n", s.n},         {"mean_d", s.mean_d},
                {"mean_dsq", s.mean_dsq}, {"q10", s.q10},
                {"q50", s.q50},     {"q90", s.q90}};
  };
  json out;
  out["checkpoints"] = stats.checkpoints;
  out["loglog_slope_dsq"] = stats.loglog_slope_dsq;
  json per = json::object();
  for (std::size_t a = 0; a < stats.adversary_names.size(); ++a) {
    json rows = json::array();
    for (const CheckpointStat& s : stats.per_adversary[a])
      rows.push_back(stat_row(s));
    per[stats.adversary_names[a]] = std::move(rows);
  }
  out["per_adversary"] = std::move(per);
  json pooled = json::array();
  for (const CheckpointStat& s : stats.pooled) pooled.push_back(stat_row(s));
  out["pooled"] = std::move(pooled);
  if (include_raw) {
    json raw = json::object();
    for (std::size_t a = 0; a < stats.adversary_names.size(); ++a)
      raw[stats.adversary_names[a]] = stats.distances[a];
    out["distances"] = std::move(raw);
  }
  return out;
}

// ------------------------- counterexample reports --------------------------

inline json example_report_to_json(const ExampleReport& r) {
  json out;
  out["full_monitoring"] = certificate_to_json(r.full_certificate);
  out["no_signal"] = certificate_to_json(r.partial_certificate);
  out["excluder"] = json{{"mean_distance", r.excluder.mean_distance},
                         {"seeds", r.excluder.seeds},
                         {"horizon", r.excluder.horizon},
                         {"pass", r.excluder.pass}};
  json eps = json::array();
  for (const BlockEndpoint& e : r.blocks.endpoints)
    eps.push_back(json{{"p", e.p},
                       {"n", e.n},
                       {"avg", e.avg},
                       {"bound", e.bound},
                       {"within", e.within}});
  out["blocks"] = json{{"endpoints", std::move(eps)},
                       {"closest_to_zero", r.blocks.closest_to_zero},
                       {"pass", r.blocks.pass}};
  out["weak"] = json{{"k", r.weak.k},
                     {"M", r.weak.M},
                     {"runs", r.weak.runs},
                     {"horizon", r.weak.horizon},
                     {"success_frequency", r.weak.success_frequency},
                     {"required", r.weak.required},
                     {"pass", r.weak.pass}};
  out["pass"] = r.pass;
  return out;
}

// ------------------------------ file helpers -------------------------------

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

inline void save_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

}  // namespace approach::io
