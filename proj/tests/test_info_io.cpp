// Incomplete-information layer (restricted value u, concavification,
// auxiliary game, end-to-end play) and the JSON/CSV interfaces.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "approach/incomplete_info.hpp"
#include "approach/json_io.hpp"
#include "approach/registry.hpp"
#include "support/corpus.hpp"

using namespace approach;
namespace io = approach::io;

TEST_CASE("state games are stored transposed for the uninformed player") {
  const IIGame g = testsupport::ii_revealing_diag();
  CHECK(g.num_states() == 2);
  CHECK(g.num_rows() == 2);
  CHECK(g.num_cols() == 2);
  CHECK(g.num_signals() == 2);
  CHECK(g.payoff_bound() == 1.0);
  CHECK(g.prior() == Vec{0.5, 0.5});
  CHECK(g.payoff(0, 0, 0) == 1.0);
  CHECK(g.payoff(1, 1, 1) == 1.0);
  CHECK(g.payoff(0, 1, 1) == 0.0);

  const GameSpec& t0 = g.transposed(0);
  CHECK(t0.num_rows() == 2);  // uninformed actions
  CHECK(t0.num_cols() == 2);  // informed actions
  CHECK(t0.payoff_vec(0, 0)[0] == 1.0);  // rho^1(i=0, j=0)

  // Action-revealing signals: the flag of x has every row equal to x.
  const Flag f = g.state_flag(0, MixedAction{0.25, 0.75});
  CHECK(f.at(0, 0) == Catch::Approx(0.25));
  CHECK(f.at(1, 1) == Catch::Approx(0.75));
}

TEST_CASE("single-state restriction polytope matches the inverse flag set") {
  const IIGame g = testsupport::ii_identical_states();
  const Flag mu = g.state_flag(0, MixedAction{0.5, 0.5});
  const std::vector<Vec> b =
      enumerate_vertices(inverse_flag_polytope(g.transposed(0), mu));
  REQUIRE(b.size() == 1);  // action-revealing signals pin the mixture

  // Zero-prior states are exempt from the flag constraint, so under (1, 0)
  // the profile polytope is {x^0} x Delta(2): two vertices whose state-0
  // block equals the inverse-flag vertex.
  const std::vector<Vec> a =
      enumerate_vertices(nr_polytope(g, Vec{1.0, 0.0}, mu));
  REQUIRE(a.size() == 2);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(norm_inf(sub(Vec(a[i].begin(), a[i].begin() + 2), b[0])) <= 1e-9);

  // A full-support prior pins both state blocks to the same mixture.
  const std::vector<Vec> c =
      enumerate_vertices(nr_polytope(g, Vec{0.5, 0.5}, mu));
  REQUIRE(c.size() == 1);
  CHECK(norm_inf(sub(Vec(c[0].begin(), c[0].begin() + 2), b[0])) <= 1e-9);
  CHECK(norm_inf(sub(Vec(c[0].begin() + 2, c[0].end()), b[0])) <= 1e-9);

  CHECK_THROWS_AS(nr_polytope(g, Vec{1.0}, mu), invalid_input);
}

TEST_CASE("restricted value on hand-solved flags") {
  const Vec p{0.5, 0.5};

  // Identical matching-pennies states: forcing both states onto the uniform
  // flag pins x^k = (1/2, 1/2), whose payoff is 0 against either column.
  const IIGame pennies = testsupport::ii_identical_states();
  const Flag mu_half = pennies.state_flag(0, MixedAction{0.5, 0.5});
  CHECK(u_value(pennies, p, mu_half) == Catch::Approx(0.0).margin(1e-9));

  // Diagonal-reward game with revealing signals: the flag of x = (1/2, 1/2)
  // pays p/2 on the first column and (1-p)/2 on the second.
  const IIGame diag = testsupport::ii_revealing_diag();
  const Flag mu_d = diag.state_flag(0, MixedAction{0.5, 0.5});
  CHECK(u_value(diag, p, mu_d) == Catch::Approx(0.25).margin(1e-9));

  // A flag outside the other state's range is infeasible only if the states
  // disagree; here signals are state-independent, so pure flags stay valid.
  const Flag mu_pure = diag.state_flag(0, MixedAction{1.0, 0.0});
  CHECK(u_value(diag, p, mu_pure) == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("u and its concavification on the three reference games") {
  // Blind diagonal game: no signal constraint means any state-dependent
  // profile is non-revealing, and the informed player dodges both traps.
  const IIGame blind = testsupport::ii_no_signal_diag();
  for (double q : {0.25, 0.5, 0.9}) {
    const UValueAtP u = u_of_p(blind, Vec{q, 1.0 - q});
    REQUIRE(u.feasible);
    CHECK(u.value == Catch::Approx(0.0).margin(1e-9));
  }
  const CavResult cb = cav_u(blind, Vec{0.5, 0.5});
  CHECK(cb.value == Catch::Approx(0.0).margin(1e-9));
  CHECK(cb.u_at_p == Catch::Approx(0.0).margin(1e-9));
  CHECK(norm_inf(cb.m) <= 1e-9);

  // Revealing diagonal game: u(q) = q(1-q) (concave, so Cav = u); the
  // common-mixture candidate makes the grid value exact at every prior.
  const IIGame diag = testsupport::ii_revealing_diag();
  for (double q : {0.125, 0.3, 0.5}) {
    const UValueAtP u = u_of_p(diag, Vec{q, 1.0 - q});
    REQUIRE(u.feasible);
    CHECK(u.value == Catch::Approx(q * (1.0 - q)).margin(1e-7));
  }
  const CavResult cd = cav_u(diag, Vec{0.5, 0.5});
  CHECK(cd.value == Catch::Approx(0.25).margin(1e-6));
  CHECK(cd.u_at_p == Catch::Approx(0.25).margin(1e-6));
  // The hyperplane supports u on the whole grid and touches at p.
  CHECK(0.5 * (cd.m[0] + cd.m[1]) == Catch::Approx(0.25).margin(1e-6));
  for (const auto& [q, uq] : cd.grid)
    CHECK(dot(cd.m, q) >= uq - 1e-6);
  // Refining both grids does not move the value.
  const CavResult cd2 = cav_u(diag, Vec{0.5, 0.5}, 32, 0.0625);
  CHECK(std::abs(cd2.value - cd.value) <= 1e-3);

  // Identical states: u is the matrix value at every prior.
  const IIGame pennies = testsupport::ii_identical_states();
  const CavResult cp = cav_u(pennies, Vec{0.3, 0.7});
  CHECK(cp.value == Catch::Approx(0.0).margin(1e-6));

  CHECK_THROWS_AS(cav_u(pennies, Vec{0.4, 0.7}), invalid_input);  // not a prior
}

TEST_CASE("auxiliary game wiring: profiles, payoffs, signals, target") {
  const IIGame diag = testsupport::ii_revealing_diag();
  const Vec m{0.25, 0.25};
  const AuxiliaryGame aux = auxiliary_game(diag, m);

  CHECK(aux.A == 1.0);
  CHECK(aux.composite.num_rows() == 2);   // uninformed actions
  CHECK(aux.composite.num_cols() == 4);   // informed profiles
  CHECK(aux.composite.payoff_dim() == 2);
  REQUIRE(aux.profiles.size() == 4);
  CHECK(aux.profiles[1] == std::vector<std::size_t>{0, 1});
  CHECK(aux.profiles[2] == std::vector<std::size_t>{1, 0});

  // Column 0 plays row 0 in both states: against uninformed action 0 the
  // payoff vector is (rho^1(0,0), rho^2(0,0)) = (1, 0).
  CHECK(aux.composite.payoff_vec(0, 0) == Vec{1.0, 0.0});
  CHECK(aux.composite.payoff_vec(1, 3) == Vec{0.0, 1.0});

  // Signals are prior-averaged over the per-state laws.
  const double* s = aux.composite.signal_row(0, 1);  // profile (0, 1)
  CHECK(s[0] == Catch::Approx(0.5));
  CHECK(s[1] == Catch::Approx(0.5));

  CHECK(aux.target.kind() == ConvexTarget::Kind::kBox);
  CHECK(aux.target.box_lo() == Vec{-2.0, -2.0});
  CHECK(aux.target.box_hi() == Vec{0.25, 0.25});

  CHECK_THROWS_AS(auxiliary_game(diag, Vec{0.25}), invalid_input);
}

TEST_CASE("per-state orthant check accepts the corner and rejects below") {
  const IIGame pennies = testsupport::ii_identical_states();
  const AuxCheck at_corner = check_auxiliary(pennies, Vec{0.0, 0.0});
  CHECK(at_corner.deficit <= 1e-6);
  CHECK(!at_corner.types->empty());

  const AuxCheck above = check_auxiliary(pennies, Vec{1.0, 1.0});
  CHECK(above.deficit <= 1e-6);

  const AuxCheck below = check_auxiliary(pennies, Vec{-1.5, -1.5});
  CHECK(below.deficit >= 1.0);

  const IIGame diag = testsupport::ii_revealing_diag();
  const AuxCheck dc = check_auxiliary(diag, Vec{0.25, 0.25});
  CHECK(dc.deficit <= 1e-6);

  CHECK_THROWS_AS(check_auxiliary(diag, Vec{0.25}), invalid_input);
}

TEST_CASE("composite auxiliary game passes the signal-structure checker") {
  // With identical states the composite game's orthant is approachable even
  // through the prior-averaged signals: the uniform column zeroes the payoff
  // against every compatible profile mixture.
  const IIGame pennies = testsupport::ii_identical_states();
  const CavResult cav = cav_u(pennies, Vec{0.5, 0.5});
  const AuxiliaryGame aux = auxiliary_game(pennies, cav.m);
  CheckOptions co;
  co.min_mesh = 0.125;
  const Certificate cert =
      check_convex_partial(aux.composite, aux.target, 0.25, co);
  CHECK(cert.approachable());
}

TEST_CASE("incomplete-information runs are deterministic and bounded") {
  const IIGame diag = testsupport::ii_revealing_diag();
  const AuxCheck chk = check_auxiliary(diag, Vec{0.25, 0.25});

  const std::vector<MixedAction> profile{MixedAction{1.0, 0.0},
                                         MixedAction{0.0, 1.0}};
  const IIRunResult a = ii_run(diag, profile, chk.types, 500, 3);
  const IIRunResult b = ii_run(diag, profile, chk.types, 500, 3);
  CHECK(a.state_drawn == b.state_drawn);
  CHECK(a.per_state_avg == b.per_state_avg);
  CHECK(a.weighted == b.weighted);

  double w = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(std::abs(a.per_state_avg[k]) <= 1.0);
    w += 0.5 * a.per_state_avg[k];
  }
  CHECK(a.weighted == Catch::Approx(w));

  CHECK_THROWS_AS(ii_run(diag, {MixedAction{1.0, 0.0}}, chk.types, 10, 0),
                  invalid_input);
  CHECK_THROWS_AS(ii_run(diag, profile, chk.types, 0, 0), invalid_input);
}

TEST_CASE("game and target JSON round trips") {
  const GameSpec g = example_game(true);
  const GameSpec g2 = io::game_from_json(io::game_to_json(g));
  REQUIRE(g2.num_rows() == g.num_rows());
  REQUIRE(g2.num_cols() == g.num_cols());
  REQUIRE(g2.num_signals() == g.num_signals());
  for (std::size_t i = 0; i < g.num_rows(); ++i)
    for (std::size_t j = 0; j < g.num_cols(); ++j) {
      CHECK(g2.payoff_vec(i, j) == g.payoff_vec(i, j));
      for (std::size_t s = 0; s < g.num_signals(); ++s)
        CHECK(g2.signal_row(i, j)[s] == g.signal_row(i, j)[s]);
    }

  const ConvexTarget box = example_target();
  const ConvexTarget box2 = io::target_from_json(io::target_to_json(box));
  CHECK(box2.box_lo() == box.box_lo());
  CHECK(box2.box_hi() == box.box_hi());

  const ConvexTarget hs = ConvexTarget::half_space(Vec{1.0, -2.0}, 0.25);
  const ConvexTarget hs2 = io::target_from_json(io::target_to_json(hs));
  CHECK(hs2.halfspace_normal() == hs.halfspace_normal());
  CHECK(hs2.halfspace_offset() == hs.halfspace_offset());

  const ConvexTarget ball = ConvexTarget::ball(Vec{1.0, 2.0}, 0.5);
  const ConvexTarget ball2 = io::target_from_json(io::target_to_json(ball));
  CHECK(ball2.ball_center() == ball.ball_center());
  CHECK(ball2.ball_radius() == ball.ball_radius());

  HPolytope seg = HPolytope::empty_like(2);
  seg.add_equality(Vec{1.0, 1.0}, 1.0);
  seg.add_inequality(Vec{-1.0, 0.0}, 0.0);
  seg.add_inequality(Vec{0.0, -1.0}, 0.0);
  seg.known_bounded = true;
  const ConvexTarget poly = ConvexTarget::polytope(std::move(seg));
  const ConvexTarget poly2 = io::target_from_json(io::target_to_json(poly));
  CHECK(poly2.vertices().size() == poly.vertices().size());
  CHECK(poly2.hrep().a_eq.rows == 1);

  const IIGame ii = testsupport::ii_revealing_diag();
  const IIGame ii2 = io::ii_from_json(io::ii_to_json(ii));
  CHECK(ii2.prior() == ii.prior());
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        CHECK(ii2.payoff(k, i, j) == ii.payoff(k, i, j));
}

TEST_CASE("parse errors carry the offending path") {
  using Catch::Matchers::ContainsSubstring;
  const io::json no_signals{{"payoffs", io::json::array()}};
  CHECK_THROWS_WITH(io::game_from_json(no_signals),
                    ContainsSubstring("game.signals") &&
                        ContainsSubstring("missing field"));

  io::json bad = io::game_to_json(example_game(false));
  bad["payoffs"][0][0][0] = "x";
  CHECK_THROWS_WITH(io::game_from_json(bad),
                    ContainsSubstring("game.payoffs[0][0][0]"));

  CHECK_THROWS_WITH(io::target_from_json(io::json{{"type", "frisbee"}}),
                    ContainsSubstring("unknown target type 'frisbee'"));

  CHECK_THROWS_WITH(io::ii_from_json(io::json{{"prior", Vec{1.0}}}),
                    ContainsSubstring("iigame.states"));

  CHECK_THROWS_WITH(io::load_json_file("/nonexistent/zzz.json"),
                    ContainsSubstring("cannot open"));
  {
    std::ofstream out("/tmp/approach_bad.json");
    out << "{oops";
  }
  CHECK_THROWS_WITH(io::load_json_file("/tmp/approach_bad.json"),
                    ContainsSubstring("malformed JSON in"));
  std::remove("/tmp/approach_bad.json");
}

TEST_CASE("json files round trip on disk") {
  const std::string path = "/tmp/approach_roundtrip.json";
  io::save_json_file(path, io::game_to_json(example_game(true)));
  const io::json j = io::load_json_file(path);
  const GameSpec g = io::game_from_json(j);
  CHECK(g.num_signals() == 2);
  std::remove(path.c_str());
}

TEST_CASE("certificates serialize with witnesses or failing flag") {
  const Certificate ok = check_convex_full(example_game(true), example_target());
  const io::json jok = io::certificate_to_json(ok);
  CHECK(jok["verdict"] == "approachable");
  CHECK(jok["monitoring"] == "full");
  CHECK(jok["witnesses"].size() == ok.witness_map.size());
  CHECK(!jok.contains("failing_flag"));

  const Certificate miss =
      check_convex_partial(example_game(false), example_target());
  const io::json jmiss = io::certificate_to_json(miss);
  CHECK(jmiss["verdict"] == "not_approachable");
  CHECK(jmiss["monitoring"] == "partial");
  CHECK(jmiss["deficit"].get<double>() == Catch::Approx(0.25).margin(1e-3));
  CHECK(jmiss.contains("failing_flag"));
}

TEST_CASE("trace export as CSV and JSON") {
  const GameSpec g = example_game(true);
  const ConvexTarget c = example_target();
  CalibratedStrategy sigma(g, c, 0.25, 1);
  StationaryP2 tau(uniform_mixed(2));
  RunOptions opts;
  opts.horizon = 50;
  opts.seed = 4;
  opts.checkpoints = {10, 50};
  const Trace tr = run(g, sigma, tau, opts);

  std::ostringstream csv;
  io::write_trace_csv(csv, tr, c);
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header.rfind("n,d,type_0", 0) == 0);
  std::size_t rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == 2);  // one row per checkpoint

  // Without checkpoints the export is per-stage.
  opts.checkpoints.clear();
  CalibratedStrategy sigma2(g, c, 0.25, 1);
  const Trace tr2 = run(g, sigma2, tau, opts);
  std::ostringstream csv2;
  io::write_trace_csv(csv2, tr2, c);
  std::istringstream lines2(csv2.str());
  std::getline(lines2, header);
  rows = 0;
  for (std::string line; std::getline(lines2, line);) ++rows;
  CHECK(rows == 50);

  Trace hollow;
  std::ostringstream sink;
  CHECK_THROWS_AS(io::write_trace_csv(sink, hollow, c), invalid_input);

  const io::json jt = io::trace_to_json(tr, c);
  CHECK(jt["horizon"] == 50);
  CHECK(jt["checkpoints"].size() == 2);
  CHECK(jt["final_distance"].get<double>() >= 0.0);
}

TEST_CASE("sweep statistics serialize with optional raw distances") {
  const GameSpec g = example_game(true);
  const ConvexTarget c = example_target();
  const SigmaFactory sf = [&]() {
    return std::make_unique<BlackwellStrategy>(g, c);
  };
  std::vector<NamedAdversary> advs;
  advs.push_back({"uniform", []() {
                    return std::make_unique<StationaryP2>(uniform_mixed(2));
                  }});
  const RunStats st = sweep(g, c, sf, advs, {100, 200}, 3, 1);
  const io::json lean = io::run_stats_to_json(st);
  CHECK(lean["pooled"].size() == 2);
  CHECK(lean["per_adversary"].contains("uniform"));
  CHECK(!lean.contains("distances"));
  const io::json raw = io::run_stats_to_json(st, true);
  CHECK(raw["distances"]["uniform"].size() == 3);
}

TEST_CASE("strategy specs parse from bare names or objects") {
  const io::StrategySpec bare =
      io::strategy_spec_from_json(io::json("blackwell"), "s");
  CHECK(bare.name == "blackwell");
  CHECK(bare.params.empty());

  const io::StrategySpec obj = io::strategy_spec_from_json(
      io::json{{"name", "calibrated"}, {"epsilon", 0.1}}, "s");
  CHECK(obj.name == "calibrated");
  CHECK(obj.params.at("epsilon") == 0.1);
  CHECK(!obj.params.contains("name"));

  CHECK_THROWS_WITH(
      io::strategy_spec_from_json(io::json{{"epsilon", 0.1}}, "s"),
      Catch::Matchers::ContainsSubstring("s.name"));
}

TEST_CASE("registry builds every named strategy") {
  const GameSpec g = example_game(true);
  const ConvexTarget c = example_target();
  auto p1 = [&](const io::json& j) {
    return io::make_p1(io::strategy_spec_from_json(j, "s"), g, &c, 7);
  };

  CHECK(dynamic_cast<BlackwellStrategy*>(p1(io::json("blackwell")).get()));
  CHECK(dynamic_cast<BlackwellNaive*>(p1(io::json("blackwell_naive")).get()));
  CHECK(dynamic_cast<CalibratedStrategy*>(
      p1(io::json{{"name", "calibrated"}, {"epsilon", 0.25}}).get()));
  CHECK(dynamic_cast<DoublingWrap*>(p1(io::json("doubling")).get()));
  CHECK(dynamic_cast<StationaryP1*>(
      p1(io::json{{"name", "stationary"}, {"x", Vec{0.3, 0.7}}}).get()));
  CHECK(dynamic_cast<BlockStrategy*>(
      p1(io::json{{"name", "block"}, {"max_p", 3}}).get()));
  CHECK(dynamic_cast<WeakApproachStrategy*>(p1(io::json("weak")).get()));

  // Target-free strategies accept a null target; the others refuse it.
  const io::StrategySpec stat = io::strategy_spec_from_json(
      io::json{{"name", "stationary"}, {"x", Vec{1.0, 0.0}}}, "s");
  CHECK(io::make_p1(stat, g, nullptr) != nullptr);
  CHECK_THROWS_WITH(
      io::make_p1(io::strategy_spec_from_json(io::json("blackwell"), "s"), g,
                  nullptr),
      Catch::Matchers::ContainsSubstring("needs a target"));
  CHECK_THROWS_WITH(
      io::make_p1(io::strategy_spec_from_json(io::json("zzz"), "s"), g, &c),
      Catch::Matchers::ContainsSubstring("unknown player-1 strategy 'zzz'"));

  const P1Factory opp = []() {
    return std::make_unique<StationaryP1>(MixedAction{1.0, 0.0});
  };
  auto p2 = [&](const io::json& j, const Certificate* cert) {
    return io::make_p2(io::strategy_spec_from_json(j, "s"), g, &c, opp, cert, 1);
  };
  CHECK(dynamic_cast<StationaryP2*>(p2(io::json("uniform"), nullptr).get()));
  CHECK(dynamic_cast<StationaryP2*>(
      p2(io::json{{"name", "stationary"}, {"y", Vec{0.0, 1.0}}}, nullptr)
          .get()));
  CHECK(dynamic_cast<ThresholdExcluder*>(
      p2(io::json{{"name", "threshold_excluder"},
                  {"probe_horizon", 100},
                  {"probe_runs", 10}},
         nullptr)
          .get()));

  const testsupport::CheckerCase miss = testsupport::checker_corpus()[5];
  const Certificate cert = check_convex_full(miss.game, miss.target);
  const io::json br{{"name", "best_response"},
                    {"probe_horizon", 100},
                    {"probe_runs", 10}};
  CHECK(dynamic_cast<BestResponseExcluder*>(
      io::make_p2(io::strategy_spec_from_json(br, "s"), miss.game,
                  &miss.target, opp, &cert, 1)
          .get()));
  CHECK_THROWS_WITH(p2(br, nullptr),
                    Catch::Matchers::ContainsSubstring("certificate"));
  CHECK_THROWS_WITH(p2(io::json("nope"), nullptr),
                    Catch::Matchers::ContainsSubstring("unknown player-2"));
}
