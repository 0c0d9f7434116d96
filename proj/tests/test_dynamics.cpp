// Repeated-play engine, strategies, excluders, and the example-game report.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>
#include <stdexcept>

#include "approach/counterexample.hpp"
#include "approach/simulator.hpp"
#include "approach/strategies.hpp"
#include "support/corpus.hpp"

using namespace approach;
using testsupport::CheckerCase;

namespace {

// Player-1 stub that fails at a fixed stage, for exception-wrapping tests.
class ThrowAtStage final : public Player1Strategy {
 public:
  explicit ThrowAtStage(std::size_t when) : when_(when), x_{0.5, 0.5} {}
  const MixedAction& next_mixed() override {
    if (++calls_ == when_) throw std::runtime_error("boom");
    return x_;
  }
  void observe(std::size_t, std::size_t, const Vec&) override {}
  void reset(std::uint64_t) override { calls_ = 0; }

 private:
  std::size_t when_;
  std::size_t calls_ = 0;
  MixedAction x_;
};

SigmaFactory blackwell_factory(const GameSpec& g, const ConvexTarget& c) {
  return [&g, &c]() { return std::make_unique<BlackwellStrategy>(g, c); };
}

}  // namespace

TEST_CASE("sorted quantiles interpolate linearly") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  CHECK(detail::quantile_sorted(v, 0.0) == 1.0);
  CHECK(detail::quantile_sorted(v, 1.0) == 4.0);
  CHECK(detail::quantile_sorted(v, 0.5) == Catch::Approx(2.5));
  CHECK(detail::quantile_sorted({}, 0.5) == 0.0);

  const CheckpointStat st = detail::summarize(100, {0.1, 0.2, 0.3});
  CHECK(st.mean_d == Catch::Approx(0.2));
  CHECK(st.mean_dsq == Catch::Approx((0.01 + 0.04 + 0.09) / 3.0));
  CHECK(st.q50 == Catch::Approx(0.2));

  std::vector<CheckpointStat> pts(3);
  pts[0].n = 10;  // below the n >= 100 cut, must be ignored
  pts[0].mean_dsq = 1.0;
  pts[1].n = 100;
  pts[1].mean_dsq = 1e-2;
  pts[2].n = 10000;
  pts[2].mean_dsq = 1e-4;
  CHECK(detail::fit_loglog_slope(pts) == Catch::Approx(-1.0).margin(1e-12));
}

TEST_CASE("run is deterministic and snapshots checkpoints") {
  const GameSpec g = example_game(true);
  StationaryP2 tau(uniform_mixed(2));

  RunOptions opts;
  opts.horizon = 100;
  opts.seed = 42;
  opts.checkpoints = {1, 50, 100};

  BlackwellStrategy s1(g, example_target());
  const Trace a = run(g, s1, tau, opts);
  BlackwellStrategy s2(g, example_target());
  const Trace b = run(g, s2, tau, opts);
  CHECK(a.final_avg == b.final_avg);
  CHECK(a.p1_actions == b.p1_actions);
  CHECK(a.p2_actions == b.p2_actions);

  REQUIRE(a.checkpoint_avg.size() == 3);
  CHECK(a.checkpoint_avg[0].first == 1);
  CHECK(a.checkpoint_avg[2].first == 100);
  // Checkpoint snapshots agree with the per-stage records bit for bit.
  CHECK(a.checkpoint_avg[1].second == a.running_avg[49]);
  CHECK(a.final_avg == a.running_avg[99]);

  opts.seed = 43;
  BlackwellStrategy s3(g, example_target());
  const Trace c = run(g, s3, tau, opts);
  CHECK(a.p1_actions != c.p1_actions);

  opts.record_stages = false;
  BlackwellStrategy s4(g, example_target());
  const Trace lean = run(g, s4, tau, opts);
  CHECK_FALSE(lean.has_stage_records);
  CHECK(lean.running_avg.empty());
  CHECK(lean.checkpoint_avg.size() == 3);
  CHECK(!lean.final_avg.empty());
}

TEST_CASE("run validates options and wraps stage errors") {
  const GameSpec g = example_game(false);
  StationaryP2 tau(uniform_mixed(2));
  ThrowAtStage bad(3);

  RunOptions opts;
  opts.horizon = 0;
  CHECK_THROWS_AS(run(g, bad, tau, opts), invalid_input);

  opts.horizon = 10;
  opts.checkpoints = {5, 2};
  CHECK_THROWS_AS(run(g, bad, tau, opts), invalid_input);

  opts.checkpoints.clear();
  CHECK_THROWS_WITH(run(g, bad, tau, opts),
                    Catch::Matchers::ContainsSubstring("run: stage 3: boom"));
}

TEST_CASE("metrics tracks stages or checkpoints") {
  const GameSpec g = example_game(false);
  const ConvexTarget c = example_target();
  StationaryP1 sigma(MixedAction{1.0, 0.0});
  StationaryP2 tau(MixedAction{1.0, 0.0});

  RunOptions opts;
  opts.horizon = 10;
  opts.checkpoints = {5, 10};
  const Trace full = run(g, sigma, tau, opts);
  const auto per_stage = metrics(full, c);
  REQUIRE(per_stage.size() == 10);
  CHECK(per_stage.front().first == 1);
  CHECK(per_stage.back().second == Catch::Approx(0.0));  // payoff 0 in [0,1/2]

  opts.record_stages = false;
  const Trace lean = run(g, sigma, tau, opts);
  const auto per_ckpt = metrics(lean, c);
  REQUIRE(per_ckpt.size() == 2);
  CHECK(per_ckpt[0].first == 5);
  CHECK(per_ckpt[1].first == 10);
}

TEST_CASE("projection strategy converges at the expected scale") {
  // Payoffs [[0,1],[-1,0]] vs [0,1/2] under full monitoring: the average
  // must approach the interval at the 1/sqrt(n) scale.
  const CheckerCase g1 = testsupport::rate_corpus()[0];
  BlackwellStrategy sigma(g1.game, g1.target);
  StationaryP2 tau(uniform_mixed(2));
  RunOptions opts;
  opts.horizon = 4000;
  opts.seed = 7;
  opts.record_stages = false;
  const Trace tr = run(g1.game, sigma, tau, opts);
  CHECK(g1.target.distance(tr.final_avg) <= 0.1);

  // Two-dimensional variant with a box target.
  const CheckerCase g2 = testsupport::rate_corpus()[1];
  BlackwellStrategy sigma2(g2.game, g2.target);
  StationaryP2 tau2(MixedAction{0.8, 0.2});
  opts.seed = 11;
  const Trace tr2 = run(g2.game, sigma2, tau2, opts);
  CHECK(g2.target.distance(tr2.final_avg) <= 0.1);
}

TEST_CASE("payoff-blind probe target ignores the opponent") {
  // BlackwellNaive's action stream may depend on its own realized actions
  // only, so two runs with the same seed against different opponents play
  // identically; this is what makes probing it legitimate.
  const GameSpec g = example_game(false);
  const ConvexTarget c = example_target();
  RunOptions opts;
  opts.horizon = 200;
  opts.seed = 5;

  BlackwellNaive n1(g, c);
  StationaryP2 left(MixedAction{1.0, 0.0});
  const Trace a = run(g, n1, left, opts);
  BlackwellNaive n2(g, c);
  StationaryP2 right(MixedAction{0.0, 1.0});
  const Trace b = run(g, n2, right, opts);
  CHECK(a.p1_actions == b.p1_actions);
}

TEST_CASE("calibrated core with a single type") {
  auto types = std::make_shared<std::vector<CalType>>();
  CalType t;
  t.mu = Flag(2, 1);
  t.mu.at(0, 0) = 1.0;
  t.mu.at(1, 0) = 1.0;
  t.mu_sq = 2.0;
  t.action = {1.0, 0.0};
  types->push_back(t);

  CalibratedCore core(2, types, 99);
  const MixedAction& first = core.next_mixed();
  // Stage 1 explores fully: gamma = 1 gives the uniform mixture.
  CHECK(first[0] == Catch::Approx(0.5));
  CHECK(core.current_type() == 0);
  core.observe_signal(0, 0);
  for (int n = 2; n <= 1000; ++n) {
    const MixedAction& x = core.next_mixed();
    core.observe_signal(x[0] > 0.5 ? 0 : 1, 0);
  }
  // Exploration has decayed to n^{-1/3}: the played mixture is close to the
  // type's pure response.
  const double gamma = std::pow(1001.0, -1.0 / 3.0);
  CHECK(core.next_mixed()[0] == Catch::Approx(1.0 - gamma / 2.0).margin(1e-9));
  CHECK(core.type_counts()[0] == 1000);
  CHECK(core.worst_construction_deficit() == 0.0);
}

TEST_CASE("calibrated type sets cover the obstacle-free corpus") {
  for (const testsupport::PartialCase& pc : testsupport::calibration_corpus()) {
    INFO("calibration case: " << pc.name);
    CalibratedStrategy sigma(pc.game, pc.target, 0.1, 3);
    CHECK_FALSE(sigma.no_guarantee());
    CHECK(!sigma.types().empty());
  }

  // The signalless game has a single flag, whose best response splits the
  // difference between both columns; the interval [-1/2, 1/2] is wide
  // enough for that to be an exact guarantee.
  const testsupport::PartialCase blind = testsupport::calibration_corpus()[1];
  CalibratedStrategy sigma(blind.game, blind.target, 0.05, 3);
  REQUIRE(sigma.types().size() == 1);
  CHECK(sigma.types()[0].action[0] == Catch::Approx(0.5).margin(1e-6));
  CHECK(sigma.types()[0].deficit <= 1e-6);
}

TEST_CASE("calibrated play keeps low internal regret and approaches") {
  const testsupport::PartialCase pc = testsupport::calibration_corpus()[0];
  CalibratedStrategy sigma(pc.game, pc.target, 0.1, 0);
  StationaryP2 tau(MixedAction{0.3, 0.7});
  RunOptions opts;
  opts.horizon = 3000;
  opts.seed = 21;
  const Trace tr = run(pc.game, sigma, tau, opts);

  CHECK(pc.target.distance(tr.final_avg) <= 0.15);

  const std::vector<TypeRegret> reg =
      per_type_regret(pc.game, pc.target, tr, sigma.types());
  double weight_sum = 0.0, worst_weighted = 0.0;
  for (const TypeRegret& r : reg) {
    weight_sum += r.weight;
    CHECK(r.regret >= -1e-6);
    worst_weighted = std::max(worst_weighted, r.weight * r.regret);
  }
  CHECK(weight_sum == Catch::Approx(1.0).margin(1e-12));
  CHECK(worst_weighted <= 0.2);

  // Omniscient evaluation needs the per-stage records.
  opts.record_stages = false;
  CalibratedStrategy sigma2(pc.game, pc.target, 0.1, 0);
  const Trace lean = run(pc.game, sigma2, tau, opts);
  CHECK_THROWS_AS(per_type_regret(pc.game, pc.target, lean, sigma2.types()),
                  invalid_input);
}

TEST_CASE("doubling wrapper schedules blocks and epsilons") {
  std::vector<double> eps_seen;
  DoublingWrap dw(
      [&eps_seen](double eps) -> std::unique_ptr<Player1Strategy> {
        eps_seen.push_back(eps);
        return std::make_unique<StationaryP1>(MixedAction{0.5, 0.5});
      },
      0.25, 4);

  CHECK(dw.current_block() == 0);
  CHECK(dw.current_epsilon() == 1.0);
  CHECK(dw.current_type() == -1);

  const Vec payoff{0.0};
  auto drive = [&](std::size_t stages) {
    for (std::size_t t = 0; t < stages; ++t) {
      dw.next_mixed();
      dw.observe(0, 0, payoff);
    }
  };
  drive(4);  // block 0 has length 4
  CHECK(dw.current_block() == 1);
  CHECK(dw.current_epsilon() == 0.5);
  drive(16);  // block 1 has length 4 * 4
  CHECK(dw.current_block() == 2);
  CHECK(dw.current_epsilon() == 0.25);
  drive(64);
  CHECK(dw.current_block() == 3);
  CHECK(dw.current_epsilon() == 0.25);  // epsilon floor reached
  CHECK(eps_seen == std::vector<double>{1.0, 0.5, 0.25, 0.25});

  CHECK_THROWS_AS(DoublingWrap(DoublingWrap::Factory{}), invalid_input);
}

TEST_CASE("block schedule lengths and parity") {
  BlockStrategy b(4);
  CHECK(b.block_ends() ==
        std::vector<std::uint64_t>{1, 33, 2220, 264364});
  CHECK(b.horizon_hint() == 264364);

  // Block 1 (odd) plays the second row, block 2 the first.
  CHECK(b.next_mixed()[1] == 1.0);
  b.observe(1, 0, Vec{0.0});
  CHECK(b.next_mixed()[0] == 1.0);

  CHECK_THROWS_AS(BlockStrategy(0), invalid_input);
  CHECK_THROWS_AS(BlockStrategy(6), invalid_input);
}

TEST_CASE("finite-horizon construction guards and first phase") {
  CHECK_THROWS_AS(WeakApproachStrategy(4, 4, 1000, 0), invalid_input);
  CHECK_THROWS_AS(WeakApproachStrategy(2, 1, 1000, 0), invalid_input);
  CHECK_THROWS_AS(WeakApproachStrategy(2, 4, 999, 0), invalid_input);

  WeakApproachStrategy w(3, 4, 1000, 12);
  CHECK(w.horizon_hint() == 3000);
  CHECK(w.next_mixed() == MixedAction{1.0, 0.0});
}

TEST_CASE("probing recovers a stationary opponent's frequencies") {
  const GameSpec g = example_game(false);
  P1Factory factory = []() {
    return std::make_unique<StationaryP1>(MixedAction{0.3, 0.7});
  };
  const Vec freq = probe_action_frequency(g, factory, MixedAction{1.0, 0.0},
                                          200, 100, 123);
  CHECK(freq[0] == Catch::Approx(0.3).margin(0.02));
  CHECK(freq[0] + freq[1] == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("threshold excluder picks the punishing column") {
  const GameSpec g = example_game(false);
  P1Factory always_top = []() {
    return std::make_unique<StationaryP1>(MixedAction{1.0, 0.0});
  };
  P1Factory always_bottom = []() {
    return std::make_unique<StationaryP1>(MixedAction{0.0, 1.0});
  };
  // Too little second-row mass: the right column keeps the payoff near 1.
  ThresholdExcluder vs_top(g, always_top, 500);
  CHECK(vs_top.chosen_column() == MixedAction{0.0, 1.0});
  // Heavy second-row mass: the left column drives the payoff to -1.
  ThresholdExcluder vs_bottom(g, always_bottom, 500);
  CHECK(vs_bottom.chosen_column() == MixedAction{1.0, 0.0});

  const GameSpec g3 = testsupport::checker_corpus()[7].game;  // 3x3
  CHECK_THROWS_AS(ThresholdExcluder(g3, always_top, 10), invalid_input);
}

TEST_CASE("best-response excluder punishes a certified miss") {
  const CheckerCase cs = testsupport::checker_corpus()[5];
  REQUIRE(cs.name == "shifted_interval_miss");
  const Certificate cert = check_convex_full(cs.game, cs.target);
  REQUIRE_FALSE(cert.approachable());

  P1Factory opponent = [&cs]() {
    return std::make_unique<BlackwellStrategy>(cs.game, cs.target);
  };
  BestResponseExcluder ex(cs.game, cs.target, cert, opponent, 1000, 50, 3);
  // The certified worst mixture is the pure first column.
  CHECK(ex.chosen_column()[0] == Catch::Approx(1.0).margin(1e-9));

  double mean = 0.0;
  const std::size_t seeds = 10;
  for (std::size_t s = 0; s < seeds; ++s) {
    BlackwellStrategy sigma(cs.game, cs.target);
    RunOptions opts;
    opts.horizon = 2000;
    opts.seed = 100 + s;
    opts.record_stages = false;
    const Trace tr = run(cs.game, sigma, ex, opts);
    mean += cs.target.distance(tr.final_avg);
  }
  mean /= static_cast<double>(seeds);
  CHECK(mean >= 0.55);

  // An approachable certificate is rejected outright.
  const CheckerCase ok = testsupport::rate_corpus()[0];
  const Certificate good = check_convex_full(ok.game, ok.target);
  CHECK_THROWS_AS(
      BestResponseExcluder(ok.game, ok.target, good, opponent, 100),
      invalid_input);
}

TEST_CASE("sweeps aggregate deterministically with a 1/n decay") {
  const CheckerCase g1 = testsupport::rate_corpus()[0];
  std::vector<NamedAdversary> advs;
  advs.push_back({"uniform", []() {
                    return std::make_unique<StationaryP2>(uniform_mixed(2));
                  }});
  advs.push_back({"left", []() {
                    return std::make_unique<StationaryP2>(
                        MixedAction{1.0, 0.0});
                  }});
  const SigmaFactory sf = blackwell_factory(g1.game, g1.target);
  const std::vector<std::uint64_t> horizons{100, 1000, 10000};

  const RunStats st = sweep(g1.game, g1.target, sf, advs, horizons, 30, 5);
  REQUIRE(st.adversary_names.size() == 2);
  REQUIRE(st.distances.size() == 2);
  REQUIRE(st.distances[0].size() == 30);
  REQUIRE(st.distances[0][0].size() == 3);
  REQUIRE(st.per_adversary.size() == 2);
  CHECK(st.per_adversary[0].size() == 3);
  REQUIRE(st.pooled.size() == 3);
  CHECK(st.pooled.front().n == 100);

  // Mean squared distance decays like 1/n.
  CHECK(st.pooled.front().mean_dsq > st.pooled.back().mean_dsq);
  CHECK(st.loglog_slope_dsq <= -0.8);

  const RunStats again = sweep(g1.game, g1.target, sf, advs, horizons, 30, 5);
  CHECK(st.distances == again.distances);

  CHECK_THROWS_AS(sweep(g1.game, g1.target, sf, {}, horizons, 30), invalid_input);
}

TEST_CASE("excursion events past a safe start are rare") {
  const CheckerCase g1 = testsupport::rate_corpus()[0];
  const SigmaFactory sf = blackwell_factory(g1.game, g1.target);
  const TauFactory tf = []() {
    return std::make_unique<StationaryP2>(uniform_mixed(2));
  };
  const double freq =
      excursion_frequency(g1.game, g1.target, sf, tf, 50, 100, 0.5, 400, 9);
  CHECK(freq <= 0.1);
  CHECK_THROWS_AS(
      excursion_frequency(g1.game, g1.target, sf, tf, 5, 100, 0.5, 50),
      invalid_input);
}

TEST_CASE("example-game report holds all four demonstrations") {
  ExampleReportOptions o;
  o.excluder_seeds = 30;
  o.excluder_horizon = 4000;
  o.max_p = 3;
  o.weak_block = 1000;
  o.weak_runs = 400;
  const ExampleReport rep = run_example_report(o);

  CHECK(rep.full_certificate.approachable());
  CHECK_FALSE(rep.partial_certificate.approachable());
  CHECK(rep.partial_certificate.deficit == Catch::Approx(0.25).margin(1e-3));
  CHECK(rep.excluder.mean_distance >= 0.2);
  CHECK(rep.excluder.mean_distance <= 0.3);
  CHECK(rep.blocks.pass);
  REQUIRE(rep.blocks.endpoints.size() == 3);
  CHECK(rep.blocks.endpoints[2].n == 2220);
  CHECK(rep.weak.success_frequency >= rep.weak.required);
  CHECK(rep.pass);
}
