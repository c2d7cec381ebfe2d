#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <random>
#include <vector>

#include "spotscale/control.hpp"

using namespace spotscale;

namespace {

InstanceRecord rec(int id, Seconds remaining, InstanceState state) {
  InstanceRecord r;
  r.id = id;
  r.billing_remaining = remaining;
  r.state = state;
  return r;
}

double ols_next(const std::vector<double>& y) {
  // centered form: x in {-2.5, ..., 2.5}, predict at x = 3.5
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= 6.0;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < 6; ++i) {
    const double x = i - 2.5;
    num += x * (y[static_cast<std::size_t>(i)] - mean);
    den += x * x;
  }
  return mean + num / den * 3.5;
}

}  // namespace

TEST_CASE("aimd step") {
  const AimdParams p;
  CHECK(aimd_step(20, 30, p) == 25);
  CHECK(aimd_step(100, 200, p) == 100);
  CHECK(aimd_step(50, 10, p) == doctest::Approx(45));
  CHECK(aimd_step(10, 3, p) == 10);
  CHECK(aimd_step(30, 30, p) == 35);  // equality counts as under-provisioned
}

TEST_CASE("reactive step clamps demand") {
  const AimdParams p;
  CHECK(reactive_step(37, p) == 37);
  CHECK(reactive_step(0, p) == 10);
  CHECK(reactive_step(150, p) == 100);
}

TEST_CASE("moving average over six padded values") {
  const AimdParams p{5, 0.9, 0, 100};
  const std::vector<double> flat(6, 12.0);
  CHECK(mwa_step(flat, p) == doctest::Approx(12));
  const std::vector<double> jump{10, 10, 10, 10, 10, 40};
  CHECK(mwa_step(jump, p) == doctest::Approx(15));
  const std::vector<double> two{8, 12};
  CHECK(mwa_step(two, p) == doctest::Approx((5 * 8.0 + 12) / 6));
  const std::vector<double> long_tail{1000, 1000, 6, 6, 6, 6, 6, 6};
  CHECK(mwa_step(long_tail, p) == doctest::Approx(6));
}

TEST_CASE("linear regression extrapolates one step") {
  const AimdParams p{5, 0.9, 0, 100};
  const std::vector<double> flat(6, 9.0);
  CHECK(lr_step(flat, p) == doctest::Approx(9));
  const std::vector<double> line{0, 2, 4, 6, 8, 10};
  CHECK(lr_step(line, p) == doctest::Approx(12));
  const std::vector<double> falling{60, 48, 36, 24, 12, 0};
  CHECK(lr_step(falling, AimdParams{}) == 10);
}

TEST_CASE("moving average and regression agree with brute-force oracles") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> d(0.0, 200.0);
  const AimdParams wide{5, 0.9, -1e9, 1e9};
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> h(6);
    for (auto& x : h) x = d(rng);
    double mean = 0.0;
    for (double x : h) mean += x / 6.0;
    CHECK(mwa_step(h, wide) == doctest::Approx(mean).epsilon(1e-9));
    CHECK(lr_step(h, wide) == doctest::Approx(ols_next(h)).epsilon(1e-9));
  }
}

TEST_CASE("utilization autoscaler uses a strict threshold") {
  CHECK(utilization_as_step(0.5, 1) == 1);
  CHECK(utilization_as_step(0.05, 10) == -10);
  CHECK(utilization_as_step(0.20, 1) == -1);
  CHECK_THROWS_AS(utilization_as_step(1.5, 1), std::invalid_argument);
}

TEST_CASE("terminations prefer soonest renewal and defer busy instances") {
  const std::vector<InstanceRecord> idle{rec(0, 3000, InstanceState::idle), rec(1, 100, InstanceState::idle),
                                         rec(2, 1800, InstanceState::idle)};
  auto plan = select_terminations(idle, 1);
  CHECK(plan.immediate == std::vector<InstanceId>{1});
  CHECK(plan.after_chunk.empty());
  CHECK(select_terminations(idle, 0).immediate.empty());

  const std::vector<InstanceRecord> busy{rec(0, 900, InstanceState::busy), rec(1, 300, InstanceState::busy),
                                         rec(2, 2000, InstanceState::busy)};
  plan = select_terminations(busy, 2);
  CHECK(plan.immediate.empty());
  CHECK(plan.after_chunk == std::vector<InstanceId>{1, 0});

  const std::vector<InstanceRecord> mixed{rec(0, 50, InstanceState::busy), rec(1, 700, InstanceState::launching),
                                          rec(2, 700, InstanceState::idle), rec(3, 10, InstanceState::terminating)};
  plan = select_terminations(mixed, 3);
  CHECK(plan.immediate == std::vector<InstanceId>{1, 2});
  CHECK(plan.after_chunk == std::vector<InstanceId>{0});
}

TEST_CASE("immediate terminations are a prefix of the sorted idle list") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> a(0.0, 3600.0);
  std::uniform_int_distribution<int> st(0, 2);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<InstanceRecord> fleet;
    for (int i = 0; i < 20; ++i)
      fleet.push_back(rec(i, std::floor(a(rng) / 600) * 600,
                          st(rng) == 0 ? InstanceState::busy : InstanceState::idle));
    std::vector<InstanceRecord> idle;
    for (const auto& r : fleet)
      if (r.state != InstanceState::busy) idle.push_back(r);
    std::stable_sort(idle.begin(), idle.end(), [](const auto& x, const auto& y) {
      return x.billing_remaining < y.billing_remaining;
    });
    const std::size_t count = static_cast<std::size_t>(trial % 21);
    const auto plan = select_terminations(fleet, count);
    CHECK(plan.immediate.size() + plan.after_chunk.size() == count);
    for (std::size_t i = 0; i < plan.immediate.size(); ++i) CHECK(plan.immediate[i] == idle[i].id);
  }
}

TEST_CASE("aimd trajectories stay inside the fleet bounds") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> demand(0.0, 300.0);
  const AimdParams p;
  double n = 10;
  for (int t = 0; t < 5000; ++t) {
    n = aimd_step(n, demand(rng), p);
    REQUIRE(n >= p.n_min);
    REQUIRE(n <= p.n_max);
  }
}

TEST_CASE("aimd under constant demand settles into a sawtooth") {
  std::mt19937_64 rng(8);
  const AimdParams p;
  std::uniform_real_distribution<double> demand(p.n_min + 1e-6, p.n_max), start(p.n_min, p.n_max);
  for (int trial = 0; trial < 200; ++trial) {
    const double d = demand(rng);
    double n = start(rng);
    int entered = -1;
    for (int t = 1; t <= 1000; ++t) {
      n = aimd_step(n, d, p);
      if (entered < 0 && n >= p.beta * (d + p.alpha) && n <= d + p.alpha) entered = t;
      // peaks never pass n* + alpha and troughs stay above beta n*
      if (t > 200) {
        CHECK(n <= d + p.alpha + 1e-12);
        CHECK(n > p.beta * d - 1e-12);
      }
    }
    CHECK(entered > 0);
    CHECK(entered <= 200);
  }
}

TEST_CASE("fleet controller turns targets into launches and terminations") {
  FleetController c(ControllerKind::aimd, AimdParams{});
  std::vector<InstanceRecord> fleet;
  for (int i = 0; i < 10; ++i) fleet.push_back(rec(i, 3600 - i * 10, InstanceState::idle));
  auto d = c.decide({0.0, 10.0, 40.0, 0.0}, fleet);
  CHECK(d.target == 15);
  CHECK(d.launches == 5);
  for (int i = 10; i < 20; ++i) fleet.push_back(rec(i, 3600, InstanceState::idle));
  d = c.decide({300.0, 20.0, 1.0, 0.0}, fleet);
  CHECK(d.target == 18);
  CHECK(d.terminations.immediate.size() == 2);
}

TEST_CASE("utilization controllers act on their own period") {
  FleetController as(ControllerKind::as10, AimdParams{}, 300.0);
  CHECK_FALSE(as.acts_at(0.0));
  CHECK_FALSE(as.acts_at(60.0));
  CHECK(as.acts_at(300.0));
  CHECK(as.target({60.0, 12.0, 0.0, 0.9}) == 12);
  CHECK(as.target({300.0, 12.0, 0.0, 0.9}) == 22);
  CHECK(as.target({600.0, 5.0, 0.0, 0.0}) == 1);  // floor of one instance
}

TEST_CASE("controller names round-trip") {
  for (auto k : {ControllerKind::aimd, ControllerKind::reactive, ControllerKind::mwa, ControllerKind::lr,
                 ControllerKind::as1, ControllerKind::as10})
    CHECK(controller_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(controller_from_string("pid"), std::invalid_argument);
  CHECK_THROWS_AS(AimdParams({0, 0.9, 10, 100}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(AimdParams({5, 1.2, 10, 100}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(AimdParams({5, 0.9, 20, 10}).validate(), std::invalid_argument);
}
