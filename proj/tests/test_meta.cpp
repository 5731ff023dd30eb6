#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mofw/instrumentation.hpp"
#include "mofw/meta.hpp"
#include "mofw/metrics.hpp"
#include "test_support.hpp"

using namespace mofw;
using namespace mofw::testing;

namespace {

Vec make_vec(std::initializer_list<double> xs) {
  Vec v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("step pool size follows the variation budget") {
  // T c / alpha = 5000: ceil(log2(5001)/2) + 1 = 8 learners
  const StepPool pool = build_step_pool(10000, 0.0, 1.0, 2.0, 2.0);
  CHECK(pool.size() == 8);
  for (int i = 0; i + 1 < pool.size(); ++i) {
    CHECK(pool.etas[i + 1] == doctest::Approx(2.0 * pool.etas[i]).epsilon(1e-15));
    CHECK(pool.etas[i] < pool.etas[i + 1]);
  }
  CHECK(pool.etas.back() <= 1.0);
  CHECK(pool.etas.front() == doctest::Approx(std::sqrt(2.0 / 40000.0)).epsilon(1e-15));
}

TEST_CASE("step pool clamps and deduplicates at one") {
  // eta_1 = sqrt(2/4) and eta_2 doubles past one, so it clamps
  const StepPool pool = build_step_pool(1, 0.0, 1.0, 4.0, 1.0);
  CHECK(pool.size() == 2);
  CHECK(pool.etas[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(pool.etas[1] == 1.0);

  // base already at one collapses to a single learner
  const StepPool tiny = geometric_step_pool(5, 2.0);
  CHECK(tiny.size() == 1);
  CHECK(tiny.etas[0] == 1.0);

  CHECK_THROWS_AS(build_step_pool(0, 0.0, 1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_step_pool(10, 0.0, 0.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_step_pool(10, 0.0, 1.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("initial weights sum to exactly one") {
  CHECK(init_weights(1)[0] == 1.0);

  const Eigen::VectorXd two = init_weights(2);
  CHECK(two[0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(two[1] == doctest::Approx(0.25).epsilon(1e-15));

  for (int n = 1; n <= 64; ++n) {
    const Eigen::VectorXd p = init_weights(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      CHECK(p[i] > 0.0);
      sum += p[i];
    }
    CHECK(sum == 1.0);
    // entries stay within an ulp of the closed form
    const double scale = static_cast<double>(n + 1) / n;
    for (int i = 1; i <= n; ++i)
      CHECK(p[i - 1] ==
            doctest::Approx(scale / (static_cast<double>(i) * (i + 1))).epsilon(1e-12));
  }
  CHECK_THROWS_AS(init_weights(0), std::invalid_argument);
}

TEST_CASE("meta rate closed form") {
  CHECK(meta_rate(0.0, 1.0, 1.0, 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(meta_rate(1.0, 1.0, 1.0, 2) == doctest::Approx(std::sqrt(2.0 / 12.0)).epsilon(1e-12));
  CHECK(meta_rate(0.5, 2.0, 1.5, 100) ==
        doctest::Approx(meta_rate(0.5, 2.0, 1.5, 10000) * 10.0).epsilon(1e-12));
  CHECK_THROWS_AS(meta_rate(0.0, 0.0, 1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(meta_rate(1.0, 1.0, -1.0, 10), std::invalid_argument);
}

TEST_CASE("linearized loss is the inner product") {
  CHECK(linearized_loss(make_vec({1, 2}), make_vec({3, -1})) == 1.0);
  CHECK(linearized_loss(make_vec({1, 2}), Vec::Zero(2)) == 0.0);
  // linearity
  const Vec g = make_vec({0.5, -2, 1});
  const Vec x = make_vec({1, 2, 3});
  const Vec y = make_vec({-1, 0, 2});
  const double a = 0.3;
  CHECK(linearized_loss(g, a * x + (1 - a) * y) ==
        doctest::Approx(a * linearized_loss(g, x) + (1 - a) * linearized_loss(g, y))
            .epsilon(1e-12));
  CHECK_THROWS_AS(linearized_loss(make_vec({1}), make_vec({1, 2})), std::invalid_argument);
}

TEST_CASE("surrogate losses add the switching penalty") {
  std::vector<Vec> xs{make_vec({2, 0})};
  std::vector<Vec> prev{make_vec({0, 0})};
  const Eigen::VectorXd with = surrogate_losses(make_vec({1, 0}), xs, prev, 1.0);
  CHECK(with[0] == doctest::Approx(4.0).epsilon(1e-15));
  const Eigen::VectorXd without = surrogate_losses(make_vec({1, 0}), xs, prev, 0.0);
  CHECK(without[0] == doctest::Approx(2.0).epsilon(1e-15));
  const Eigen::VectorXd still = surrogate_losses(make_vec({1, 0}), xs, xs, 5.0);
  CHECK(still[0] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("hedge update reweights by exponentiated losses") {
  const Eigen::VectorXd uniform = make_vec({0.5, 0.5});

  // equal losses leave the weights alone
  const Eigen::VectorXd same = hedge_update(uniform, make_vec({3, 3}), 1.0);
  CHECK(same[0] == doctest::Approx(0.5).epsilon(1e-15));

  const Eigen::VectorXd p = hedge_update(uniform, make_vec({0, 1}), 1.0);
  const double z = 1.0 + std::exp(-1.0);
  CHECK(p[0] == doctest::Approx(1.0 / z).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(std::exp(-1.0) / z).epsilon(1e-12));

  // vanishing rate changes weights only at O(epsilon)
  const Eigen::VectorXd nudge = hedge_update(uniform, make_vec({0, 1}), 1e-9);
  CHECK(std::abs(nudge[0] - 0.5) < 1e-9);

  CHECK_THROWS_AS(hedge_update(uniform, make_vec({0, 1}), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(
      hedge_update(uniform, make_vec({0, std::numeric_limits<double>::infinity()}), 1.0),
      std::invalid_argument);
  CHECK_THROWS_AS(hedge_update(make_vec({0.9, 0.3}), make_vec({0, 1}), 1.0),
                  std::invalid_argument);
}

TEST_CASE("hedge weights stay on the simplex over many rounds") {
  std::mt19937_64 rng(47);
  Eigen::VectorXd p = init_weights(6);
  for (int t = 0; t < 2000; ++t) {
    const Eigen::VectorXd losses = random_vec(rng, 6, 3.0);
    p = hedge_update(p, losses, 0.3);
    CHECK(std::abs(p.sum() - 1.0) <= 1e-12);
    CHECK((p.array() > 0.0).all());
  }
}

TEST_CASE("a strictly dominant learner gains weight every round") {
  std::mt19937_64 rng(53);
  Eigen::VectorXd p = init_weights(4);
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd losses = random_vec(rng, 4, 1.0);
    losses[2] = losses.minCoeff() - 0.05;  // learner 2 strictly wins
    const Eigen::VectorXd next = hedge_update(p, losses, 0.5);
    CHECK(next[2] > p[2]);
    p = next;
  }
}

TEST_CASE("combine forms the weighted decision") {
  std::vector<Vec> xs{make_vec({0, 0}), make_vec({4, 0})};
  CHECK(combine(make_vec({0.25, 0.75}), xs) == make_vec({3, 0}));
  CHECK(combine(make_vec({0, 1}), xs) == make_vec({4, 0}));
  std::vector<Vec> same{make_vec({1, 2}), make_vec({1, 2})};
  CHECK(combine(make_vec({0.5, 0.5}), same) == make_vec({1, 2}));
}

TEST_CASE("one-learner pool reproduces the plain conditional-gradient path") {
  const FeasibleSet box = Box{make_vec({-1, -1}), make_vec({1, 1})};
  const QuadraticMemoryLoss loss(box, 0, make_vec({1.0}), make_vec({0.4, -0.6}));

  MetaOfwState state = make_meta_state(box, StepPool{{0.3}}, 0.5, 0.0);
  RollingWindow window(0, 2);
  OfwState plain{initial_point(box), 0.3};
  for (long t = 1; t <= 30; ++t) {
    const auto round = meta_ofw_round(state, box, loss, t, window);
    CHECK((round.decision - plain.x).norm() <= 1e-14);
    plain = ofw_step(plain, box, loss.unary_gradient(t, plain.x));
  }
}

TEST_CASE("two-round trace matches hand arithmetic") {
  const FeasibleSet box = Box{make_vec({-1}), make_vec({1})};
  const QuadraticMemoryLoss loss(box, 0, make_vec({1.0}), make_vec({0.5}));

  MetaOfwState state = make_meta_state(box, StepPool{{0.25, 0.5}}, 0.5, 0.0);
  RollingWindow window(0, 1);

  const auto r1 = meta_ofw_round(state, box, loss, 1, window);
  CHECK(r1.decision[0] == 0.0);
  CHECK(r1.incurred_loss == doctest::Approx(0.25).epsilon(1e-15));
  // equal surrogates leave p at (0.75, 0.25); both learners blend toward +1
  CHECK(state.p[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(state.base_x[0][0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(state.base_x[1][0] == doctest::Approx(0.5).epsilon(1e-15));

  const auto r2 = meta_ofw_round(state, box, loss, 2, window);
  CHECK(r2.decision[0] == doctest::Approx(0.3125).epsilon(1e-15));
  CHECK(r2.incurred_loss == doctest::Approx(0.03515625).epsilon(1e-12));
  // grad = -0.375, surrogates (-0.09375, -0.1875), shifted exponents (1, e^0)
  const double w0 = 0.75 * std::exp(-0.5 * 0.09375);
  const double w1 = 0.25;
  CHECK(state.p[0] == doctest::Approx(w0 / (w0 + w1)).epsilon(1e-12));
  CHECK(state.base_x[0][0] == doctest::Approx(0.4375).epsilon(1e-15));
  CHECK(state.base_x[1][0] == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("projected-gradient pool trace matches hand arithmetic") {
  const FeasibleSet box = Box{make_vec({0}), make_vec({1})};
  const QuadraticMemoryLoss loss(box, 0, make_vec({1.0}), make_vec({0.9}));

  MetaOfwState state = make_meta_state(box, StepPool{{0.5, 1.0}}, 1.0, 0.2);
  RollingWindow window(0, 1);

  const auto r1 = scream_round(state, box, loss, 1, window);
  CHECK(r1.decision[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(state.base_x[0][0] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(state.base_x[1][0] == doctest::Approx(1.0).epsilon(1e-15));

  const auto r2 = scream_round(state, box, loss, 2, window);
  CHECK(r2.decision[0] == doctest::Approx(0.925).epsilon(1e-15));
  // surrogates: 0.05*0.9 + 0.2*0.4 = 0.125 and 0.05*1 + 0.2*0.5 = 0.15
  const double w0 = 0.75;
  const double w1 = 0.25 * std::exp(-0.025);
  CHECK(state.p[0] == doctest::Approx(w0 / (w0 + w1)).epsilon(1e-12));
  CHECK(state.base_x[0][0] == doctest::Approx(0.875).epsilon(1e-15));
  CHECK(state.base_x[1][0] == doctest::Approx(0.95).epsilon(1e-15));
}

TEST_CASE("single projected-gradient learner reproduces plain ogd") {
  const FeasibleSet ball = Ball{Vec::Zero(2), 1.0};
  const QuadraticMemoryLoss loss(ball, 0, make_vec({1.0}), make_vec({0.9, 0.9}));
  MetaOfwState state = make_meta_state(ball, StepPool{{0.4}}, 0.5, 0.1);
  RollingWindow window(0, 2);
  OgdState plain{initial_point(ball), 0.4};
  for (long t = 1; t <= 25; ++t) {
    const auto round = scream_round(state, ball, loss, t, window);
    CHECK((round.decision - plain.x).norm() <= 1e-14);
    plain = ogd_step(plain, ball, loss.unary_gradient(t, plain.x));
  }
}

TEST_CASE("without memory or regularization the two ogd pools coincide") {
  const FeasibleSet box = Box{make_vec({-1, -1}), make_vec({1, 1})};
  const QuadraticMemoryLoss loss(box, 0, make_vec({1.0}), make_vec({0.3, 0.7}));
  MetaOfwState scream_state = make_meta_state(box, StepPool{{0.25, 0.5, 1.0}}, 0.7, 0.0);
  MetaOfwState ader_state = scream_state;
  RollingWindow wa(0, 2), wb(0, 2);
  for (long t = 1; t <= 40; ++t) {
    const auto a = scream_round(scream_state, box, loss, t, wa);
    const auto b = ader_round(ader_state, box, loss, t, wb);
    CHECK((a.decision - b.decision).norm() == 0.0);
  }
}

TEST_CASE("round emits one gradient evaluation and one oracle call per learner") {
  const FeasibleSet box = Box{make_vec({-1, -1, -1}), make_vec({1, 1, 1})};
  const QuadraticMemoryLoss loss(box, 0, make_vec({1.0}), make_vec({0.1, 0.2, 0.3}));
  MetaOfwState state = make_meta_state(box, StepPool{{0.125, 0.25, 0.5, 1.0}}, 0.5, 0.0);
  RollingWindow window(0, 3);
  stats::reset_counters();
  for (long t = 1; t <= 10; ++t) meta_ofw_round(state, box, loss, t, window);
  CHECK(stats::counters().gradient_evals == 10);
  CHECK(stats::counters().lmo_calls == 40);
  CHECK(stats::counters().projections == 0);

  stats::reset_counters();
  for (long t = 1; t <= 10; ++t) scream_round(state, box, loss, t, window);
  CHECK(stats::counters().gradient_evals == 10);
  CHECK(stats::counters().projections == 40);
  CHECK(stats::counters().lmo_calls == 0);
}

namespace {

struct RoundLog {
  Eigen::VectorXd p;            // p_t
  std::vector<Vec> base;        // x_{t,i}
  std::vector<Vec> prev_base;   // x_{t-1,i}
  Vec decision;                 // x_t
  Vec grad;                     // unary gradient at x_t
  Eigen::VectorXd ell;          // surrogate losses
};

std::vector<RoundLog> drive_meta_ofw(MetaOfwState& state, const FeasibleSet& set,
                                     const LossOracle& oracle, long rounds,
                                     RollingWindow& window) {
  std::vector<RoundLog> logs;
  for (long t = 1; t <= rounds; ++t) {
    RoundLog log;
    log.p = state.p;
    log.base = state.base_x;
    log.prev_base = state.prev_base_x;
    const auto r = meta_ofw_round(state, set, oracle, t, window);
    log.decision = r.decision;
    log.grad = oracle.unary_gradient(t, r.decision);
    log.ell = surrogate_losses(log.grad, log.base, log.prev_base, state.lambda);
    logs.push_back(std::move(log));
  }
  return logs;
}

}  // namespace

TEST_CASE("switching cost decomposes into weight motion and base motion") {
  std::mt19937_64 rng(59);
  const FeasibleSet box = Box{make_vec({-1, -1, -1}), make_vec({1, 1, 1})};
  auto q = [](long t) { return 0.5 + 0.5 * std::sin(0.37 * t); };
  const QuadraticMemoryLoss loss(box, 1, make_vec({0.4, 0.6}), make_vec({0.3, -0.4, 0.2}), q,
                                 1.0);
  const double lambda = 1.0 * loss.lipschitz();  // m^2 L with m = 1
  const double D = diameter(box);
  MetaOfwState state =
      make_meta_state(box, build_step_pool(50, loss.value_floor(), loss.value_range(), lambda, D),
                      meta_rate(lambda, loss.gradient_bound(), D, 50), lambda);
  RollingWindow window(1, 3);
  const auto logs = drive_meta_ofw(state, box, loss, 50, window);

  for (size_t t = 1; t < logs.size(); ++t) {
    const double lhs = (logs[t].decision - logs[t - 1].decision).norm();
    double base_motion = 0.0;
    for (size_t i = 0; i < logs[t].base.size(); ++i)
      base_motion += logs[t].p[i] * (logs[t].base[i] - logs[t - 1].base[i]).norm();
    const double weight_motion = D * (logs[t].p - logs[t - 1].p).lpNorm<1>();
    CHECK(lhs <= weight_motion + base_motion + 1e-9);
  }
}

TEST_CASE("unary regret plus switching cost is covered by meta plus base regret") {
  std::mt19937_64 rng(61);
  const FeasibleSet box = Box{make_vec({-1, -1}), make_vec({1, 1})};
  auto q = [](long t) { return 0.6 + 0.4 * std::cos(0.21 * t); };
  const QuadraticMemoryLoss loss(box, 2, make_vec({0.2, 0.3, 0.5}), make_vec({0.25, -0.5}), q,
                                 1.0);
  const double lambda = 4.0 * loss.lipschitz();
  const double D = diameter(box);
  const long T = 50;
  MetaOfwState state =
      make_meta_state(box, build_step_pool(T, loss.value_floor(), loss.value_range(), lambda, D),
                      meta_rate(lambda, loss.gradient_bound(), D, T), lambda);
  RollingWindow window(2, 2);
  const auto logs = drive_meta_ofw(state, box, loss, T, window);
  const int n = state.pool.size();

  for (int trial = 0; trial < 5; ++trial) {
    // random comparator sequence
    std::vector<Vec> comparators;
    for (long t = 0; t < T; ++t) comparators.push_back(random_feasible(rng, box));

    double unary_regret = 0.0;
    double switching = 0.0;
    for (long t = 0; t < T; ++t) {
      unary_regret += loss.unary_value(t + 1, logs[t].decision) -
                      loss.unary_value(t + 1, comparators[t]);
      if (t > 0) switching += (logs[t].decision - logs[t - 1].decision).norm();
    }
    const double lhs = unary_regret + lambda * switching;

    for (int i = 0; i < n; ++i) {
      double meta_regret = 0.0;
      double base_regret = 0.0;
      for (long t = 0; t < T; ++t) {
        meta_regret += logs[t].p.dot(logs[t].ell) - logs[t].ell[i];
        base_regret += logs[t].grad.dot(logs[t].base[i]) - logs[t].grad.dot(comparators[t]);
        if (t > 0) {
          meta_regret += lambda * D * (logs[t].p - logs[t - 1].p).lpNorm<1>();
          base_regret += lambda * (logs[t].base[i] - logs[t - 1].base[i]).norm();
        }
      }
      CHECK(lhs <= meta_regret + base_regret + 1e-6);
    }
  }
}

TEST_CASE("combined decisions stay feasible") {
  std::mt19937_64 rng(67);
  const FeasibleSet sets[] = {FeasibleSet{Box{make_vec({-1, 2}), make_vec({1, 3})}},
                              FeasibleSet{Simplex{4}},
                              FeasibleSet{Ball{make_vec({0.5, 0.5, 0.5}), 1.0}}};
  for (const FeasibleSet& set : sets) {
    const int d = dim(set);
    const QuadraticMemoryLoss loss(set, 0, make_vec({1.0}),
                                   project(set, random_vec(rng, d, 1.0)));
    MetaOfwState state = make_meta_state(set, StepPool{{0.2, 0.4, 0.8, 1.0}}, 0.4, 0.0);
    RollingWindow window(0, d);
    for (long t = 1; t <= 60; ++t) {
      const auto r = meta_ofw_round(state, set, loss, t, window);
      CHECK(contains(set, r.decision, 1e-9));
      CHECK(std::abs(state.p.sum() - 1.0) <= 1e-12);
    }
  }
}
