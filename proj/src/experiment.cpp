#include "mofw/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace mofw {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

TrialResult run_cell(const ExperimentConfig& cfg, const BenchInstance& bench,
                     ControllerKind kind, std::size_t cell_index) {
  TrialResult r;
  r.algorithm = controller_name(kind);
  r.seed = splitmix64(cfg.seed + 0x100000001ULL * cell_index);
  r.d_x = cfg.d_x;
  r.d_u = cfg.d_u;
  r.T = cfg.T;
  r.H = cfg.H;
  r.noise = noise_name(cfg.noise.distribution);
  r.schedule = schedule_name(cfg.schedule);

  try {
    auto clip_stats = std::make_shared<ClipStats>();
    const NoiseSource noise =
        make_perturbed_noise_source(cfg.noise, cfg.d_x, cfg.d_u, r.seed, clip_stats);

    ControlRunConfig run_cfg;
    run_cfg.kind = kind;
    run_cfg.T = cfg.T;
    run_cfg.constants = bench.constants;

    const auto tick = std::chrono::steady_clock::now();
    const ControlTrace trace =
        run_controller(run_cfg, bench.sys, *bench.cost, bench.gains, noise);
    const auto tock = std::chrono::steady_clock::now();

    const ComparatorEval comparator =
        evaluate_gain_comparator(bench.sys, *bench.cost, bench.gains, bench.gains, cfg.H,
                                 trace.noises, bench.kappa, bench.gamma);

    r.cum_loss = trace.cumulative_loss;
    r.regret = trace.cumulative_loss - comparator.cumulative_cost;
    r.vt = trace.loss_variation;
    r.dt = trace.gradient_variation;
    r.ct = comparator.path_length;
    r.switch_cost = trace.switching;
    r.wall_ms = std::chrono::duration<double, std::milli>(tock - tick).count();
    double total_us = 0.0;
    for (double us : trace.learner_us) total_us += us;
    r.per_step_us = trace.learner_us.empty() ? 0.0 : total_us / trace.learner_us.size();
    r.step_loss = trace.step_loss;
    r.clip_rate = clip_stats->rate();

    if (r.step_loss.size() != static_cast<size_t>(cfg.T + 1))
      throw std::runtime_error("trial produced a short loss series");
    for (double v : {r.cum_loss, r.regret, r.vt, r.dt, r.ct, r.switch_cost})
      if (!std::isfinite(v)) throw std::runtime_error("trial produced non-finite metrics");
    for (double v : r.step_loss)
      if (!std::isfinite(v)) throw std::runtime_error("trial produced non-finite losses");
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

}  // namespace

std::vector<TrialResult> run_experiment(const ExperimentConfig& cfg) {
  const BenchInstance bench = make_bench_instance(cfg);

  std::vector<ControllerKind> cells;
  for (const ControllerKind kind : cfg.algorithms)
    for (int trial = 0; trial < cfg.trials; ++trial) cells.push_back(kind);

  std::vector<TrialResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  const unsigned workers =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                      static_cast<unsigned>(cells.size())));
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1))
      results[i] = run_cell(cfg, bench, cells[i], i);
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
  }
  return results;
}

namespace {

void append_field(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

std::string results_to_csv(const std::vector<TrialResult>& results) {
  if (results.empty()) throw std::invalid_argument("write_csv: no results");
  std::string out =
      "algorithm,seed,dx,du,T,H,noise,schedule,cum_loss,regret,VT,DT,CT,"
      "switch_cost,wall_ms,per_step_us\n";
  for (const TrialResult& r : results) {
    if (r.failed()) continue;
    out += r.algorithm;
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += std::to_string(r.d_x);
    out += ',';
    out += std::to_string(r.d_u);
    out += ',';
    out += std::to_string(r.T);
    out += ',';
    out += std::to_string(r.H);
    out += ',';
    out += r.noise;
    out += ',';
    out += r.schedule;
    for (double v : {r.cum_loss, r.regret, r.vt, r.dt, r.ct, r.switch_cost, r.wall_ms,
                     r.per_step_us}) {
      out += ',';
      append_field(out, v);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::vector<TrialResult>& results, const std::string& path) {
  const std::string body = results_to_csv(results);  // throws before touching the file
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  out << body;
  if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string summarize(const std::vector<TrialResult>& results) {
  std::map<std::string, std::vector<const TrialResult*>> by_algo;
  for (const TrialResult& r : results)
    if (!r.failed()) by_algo[r.algorithm].push_back(&r);

  std::ostringstream out;
  out << "algorithm        trials  median_cum_loss  median_regret  median_step_us\n";
  std::map<std::string, double> median_step_us;
  for (const auto& [name, rs] : by_algo) {
    std::vector<double> losses, regrets, step_us;
    for (const TrialResult* r : rs) {
      losses.push_back(r->cum_loss);
      regrets.push_back(r->regret);
      step_us.push_back(r->per_step_us);
    }
    median_step_us[name] = median(step_us);
    char line[160];
    std::snprintf(line, sizeof(line), "%-16s %6zu  %15.4f  %13.4f  %14.3f\n", name.c_str(),
                  rs.size(), median(losses), median(regrets), median(step_us));
    out << line;
  }
  if (median_step_us.count("meta_ofw") && median_step_us.count("scream") &&
      median_step_us["meta_ofw"] > 0.0) {
    char line[120];
    std::snprintf(line, sizeof(line), "scream/meta_ofw per-step time ratio: %.3f\n",
                  median_step_us["scream"] / median_step_us["meta_ofw"]);
    out << line;
  }
  long failures = 0;
  for (const TrialResult& r : results)
    if (r.failed()) ++failures;
  if (failures > 0) {
    out << failures << " cell(s) failed:\n";
    for (const TrialResult& r : results)
      if (r.failed())
        out << "  " << r.algorithm << " seed " << r.seed << ": " << r.error << "\n";
  }
  return out.str();
}

}  // namespace mofw
