#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mofw/experiment.hpp"
#include "test_support.hpp"

using namespace mofw;
using namespace mofw::testing;

TEST_CASE("noise draws are centered and deterministic per seed") {
  for (const NoiseDistribution dist :
       {NoiseDistribution::gaussian, NoiseDistribution::uniform, NoiseDistribution::gamma,
        NoiseDistribution::beta, NoiseDistribution::exponential, NoiseDistribution::weibull}) {
    NoiseSpec spec;
    spec.distribution = dist;

    std::mt19937_64 a(42), b(42);
    for (int t = 0; t < 20; ++t) {
      const NoiseSample sa = sample_noise(spec, t, 3, 2, a);
      const NoiseSample sb = sample_noise(spec, t, 3, 2, b);
      CHECK(sa.w_tilde == sb.w_tilde);
      CHECK(sa.delta_a == sb.delta_a);
      CHECK(sa.delta_b == sb.delta_b);
    }

    // law of large numbers on the centered scalar draws
    std::mt19937_64 rng(7);
    double sum = 0.0, sum_sq = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const double x = sample_noise(spec, 0, 1, 1, rng).w_tilde[0];
      sum += x;
      sum_sq += x * x;
    }
    const double mean = sum / n;
    const double stddev = std::sqrt(sum_sq / n - mean * mean);
    CHECK(std::abs(mean) <= 4.0 * stddev / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("small uniform noise never trips the clip") {
  NoiseSpec spec;
  spec.distribution = NoiseDistribution::uniform;
  spec.uniform_halfwidth = spec.W / (2.0 * std::sqrt(3.0));  // well inside W/sqrt(d_x)
  spec.delta_a_scale = 0.0;
  spec.delta_b_scale = 0.0;
  auto stats = std::make_shared<ClipStats>();
  const NoiseSource source = make_perturbed_noise_source(spec, 3, 1, 5, stats);
  for (int t = 0; t < 2000; ++t) {
    const Vec w = source(t, Vec::Zero(3), Vec::Zero(1));
    CHECK(w.norm() <= spec.W);
  }
  CHECK(stats->clipped == 0);
  CHECK(stats->total == 2000);
}

TEST_CASE("composite disturbance always respects the W ball") {
  NoiseSpec spec;
  spec.distribution = NoiseDistribution::exponential;
  spec.delta_a_scale = 0.5;
  spec.delta_b_scale = 0.5;
  spec.W = 0.3;
  auto stats = std::make_shared<ClipStats>();
  const NoiseSource source = make_perturbed_noise_source(spec, 2, 2, 11, stats);
  std::mt19937_64 rng(13);
  for (int t = 0; t < 2000; ++t) {
    const Vec w = source(t, random_vec(rng, 2, 5.0), random_vec(rng, 2, 5.0));
    CHECK(w.norm() <= spec.W + 1e-15);
  }
  CHECK(stats->clipped > 0);  // the large states force clipping
}

TEST_CASE("invalid noise parameters are rejected") {
  NoiseSpec spec;
  spec.gamma_shape = -1.0;
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(sample_noise(spec, 0, 2, 1, rng), std::invalid_argument);
}

TEST_CASE("weight schedules reproduce their closed forms") {
  WeightSchedule sinusoidal;
  CHECK(weights_at(sinusoidal, 0, 100) == std::pair{0.0, 0.0});
  const auto [q5, r5] = weights_at(sinusoidal, 5, 100);
  CHECK(q5 == doctest::Approx(std::sin(5.0 / (10.0 * std::numbers::pi))).epsilon(1e-15));
  CHECK(r5 == doctest::Approx(std::sin(5.0 / (20.0 * std::numbers::pi))).epsilon(1e-15));

  // the raw sinusoid goes negative within one period; the shifted variant never does
  bool negative = false;
  WeightSchedule shifted;
  shifted.nonnegative_shift = true;
  for (long t = 0; t <= 400; ++t) {
    negative = negative || weights_at(sinusoidal, t, 400).first < 0.0;
    CHECK(weights_at(shifted, t, 400).first >= 0.0);
  }
  CHECK(negative);

  WeightSchedule step;
  step.kind = ScheduleKind::step;
  const double half_log2 = 0.5 * std::numbers::ln2;
  const long T = 1000;
  CHECK(weights_at(step, T, T) == std::pair{half_log2, 1.0});
  CHECK(weights_at(step, T / 5, T) == std::pair{half_log2, 1.0});      // boundary stays left
  CHECK(weights_at(step, T / 5 + 1, T) == std::pair{1.0, 1.0});
  CHECK(weights_at(step, 3 * T / 5, T) == std::pair{half_log2, half_log2});
  CHECK(weights_at(step, 4 * T / 5 + 1, T) == std::pair{half_log2, 1.0});

  CHECK_THROWS_AS(weights_at(step, -1, T), std::out_of_range);
  CHECK_THROWS_AS(weights_at(step, T + 1, T), std::out_of_range);
}

TEST_CASE("config text drives the experiment setup") {
  const std::string text = R"(
# comment
[experiment]
algorithms = meta_ofw, ogd
dx = 4
du = 2
T = 64
H = 3
trials = 2
seed = 9
out = /tmp/out.csv

[noise]
distribution = uniform
W = 0.4

[weights]
kind = step
)";
  const ExperimentConfig cfg = load_experiment_config(ConfigFile::parse_string(text));
  CHECK(cfg.algorithms.size() == 2);
  CHECK(cfg.algorithms[0] == ControllerKind::meta_ofw);
  CHECK(cfg.algorithms[1] == ControllerKind::ogd);
  CHECK(cfg.d_x == 4);
  CHECK(cfg.d_u == 2);
  CHECK(cfg.T == 64);
  CHECK(cfg.H == 3);
  CHECK(cfg.trials == 2);
  CHECK(cfg.seed == 9);
  CHECK(cfg.out == "/tmp/out.csv");
  CHECK(cfg.noise.distribution == NoiseDistribution::uniform);
  CHECK(cfg.noise.W == 0.4);
  CHECK(cfg.schedule.kind == ScheduleKind::step);
}

TEST_CASE("malformed configs fail with a reason") {
  CHECK_THROWS_AS(ConfigFile::parse_string("[experiment\nT = 3\n"), std::runtime_error);
  CHECK_THROWS_AS(ConfigFile::parse_string("[a]\nkey value\n"), std::runtime_error);
  CHECK_THROWS_AS(
      load_experiment_config(ConfigFile::parse_string("[experiment]\nalgorithms = nope\n")),
      std::runtime_error);
  CHECK_THROWS_AS(
      load_experiment_config(ConfigFile::parse_string("[experiment]\nT = -5\n")),
      std::runtime_error);
  CHECK_THROWS_AS(
      load_experiment_config(ConfigFile::parse_string("[experiment]\ndx = 1\ndu = 2\n")),
      std::runtime_error);
  CHECK_THROWS_AS(
      load_experiment_config(ConfigFile::parse_string("[noise]\ndistribution = cauchy\n")),
      std::runtime_error);
}

namespace {

ExperimentConfig quick_config() {
  ExperimentConfig cfg;
  cfg.algorithms = {ControllerKind::meta_ofw};
  cfg.d_x = 2;
  cfg.d_u = 1;
  cfg.T = 40;
  cfg.H = 3;
  cfg.trials = 1;
  cfg.seed = 21;
  cfg.schedule.nonnegative_shift = true;
  return cfg;
}

}  // namespace

TEST_CASE("a single algorithm and seed produce one result") {
  const auto results = run_experiment(quick_config());
  REQUIRE(results.size() == 1);
  const TrialResult& r = results[0];
  CHECK_FALSE(r.failed());
  CHECK(r.algorithm == "meta_ofw");
  CHECK(r.step_loss.size() == 41);
  for (double v : {r.cum_loss, r.regret, r.vt, r.dt, r.ct, r.switch_cost})
    CHECK(std::isfinite(v));
  CHECK(r.wall_ms >= 0.0);
  // total wall time covers the summed learner time
  CHECK(r.wall_ms * 1000.0 >= r.per_step_us * r.step_loss.size() * 0.999);
}

TEST_CASE("identical configs reproduce every non-timing field") {
  ExperimentConfig cfg = quick_config();
  cfg.algorithms = {ControllerKind::meta_ofw, ControllerKind::scream};
  cfg.trials = 2;
  const auto a = run_experiment(cfg);
  const auto b = run_experiment(cfg);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].algorithm == b[i].algorithm);
    CHECK(a[i].seed == b[i].seed);
    CHECK(a[i].cum_loss == b[i].cum_loss);
    CHECK(a[i].regret == b[i].regret);
    CHECK(a[i].vt == b[i].vt);
    CHECK(a[i].dt == b[i].dt);
    CHECK(a[i].ct == b[i].ct);
    CHECK(a[i].switch_cost == b[i].switch_cost);
    CHECK(a[i].step_loss == b[i].step_loss);
  }
  // csv bytes agree outside the two timing columns
  std::istringstream ca(results_to_csv(a)), cb(results_to_csv(b));
  std::string la, lb;
  while (std::getline(ca, la) && std::getline(cb, lb)) {
    const auto strip = [](const std::string& line) {
      size_t pos = line.size();
      for (int cut = 0; cut < 2; ++cut) pos = line.rfind(',', pos - 1);
      return line.substr(0, pos);
    };
    CHECK(strip(la) == strip(lb));
  }
}

TEST_CASE("csv writing round-trips all numeric fields at full precision") {
  ExperimentConfig cfg = quick_config();
  cfg.algorithms = {ControllerKind::meta_ofw, ControllerKind::ader};
  const auto results = run_experiment(cfg);
  const std::string path = "/tmp/mofw_test_roundtrip.csv";
  write_csv(results, path);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "algorithm,seed,dx,du,T,H,noise,schedule,cum_loss,regret,VT,DT,CT,switch_cost,"
        "wall_ms,per_step_us");
  size_t row = 0;
  std::string line;
  while (std::getline(in, line)) {
    REQUIRE(row < results.size());
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    REQUIRE(fields.size() == 16);
    const TrialResult& r = results[row];
    CHECK(fields[0] == r.algorithm);
    CHECK(std::stoull(fields[1]) == r.seed);
    CHECK(std::stod(fields[8]) == r.cum_loss);
    CHECK(std::stod(fields[9]) == r.regret);
    CHECK(std::stod(fields[10]) == r.vt);
    CHECK(std::stod(fields[11]) == r.dt);
    CHECK(std::stod(fields[12]) == r.ct);
    CHECK(std::stod(fields[13]) == r.switch_cost);
    ++row;
  }
  CHECK(row == results.size());
  std::filesystem::remove(path);
}

TEST_CASE("one result yields a header plus one row") {
  const auto results = run_experiment(quick_config());
  const std::string csv = results_to_csv(results);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

TEST_CASE("csv writing refuses empty result sets and bad paths") {
  CHECK_THROWS_AS(write_csv({}, "/tmp/never.csv"), std::invalid_argument);
  CHECK_FALSE(std::filesystem::exists("/tmp/never.csv"));
  const auto results = run_experiment(quick_config());
  CHECK_THROWS_AS(write_csv(results, "/nonexistent-dir/x.csv"), std::runtime_error);
}

TEST_CASE("summary reports per-algorithm medians") {
  ExperimentConfig cfg = quick_config();
  cfg.algorithms = {ControllerKind::meta_ofw, ControllerKind::scream};
  cfg.trials = 3;
  const auto results = run_experiment(cfg);
  const std::string text = summarize(results);
  CHECK(text.find("meta_ofw") != std::string::npos);
  CHECK(text.find("scream") != std::string::npos);
  CHECK(text.find("per-step time ratio") != std::string::npos);
}

TEST_CASE("realized disturbances never exceed the declared bound") {
  ExperimentConfig cfg = quick_config();
  cfg.T = 200;
  const BenchInstance bench = make_bench_instance(cfg);
  const NoiseSource noise =
      make_perturbed_noise_source(cfg.noise, cfg.d_x, cfg.d_u, 77, nullptr);
  ControlRunConfig run;
  run.kind = ControllerKind::meta_ofw;
  run.T = cfg.T;
  run.constants = bench.constants;
  const ControlTrace trace = run_controller(run, bench.sys, *bench.cost, bench.gains, noise);
  for (const Vec& w : trace.noises) CHECK(w.norm() <= cfg.noise.W + 1e-12);
}
