#include "mofw/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace mofw {

namespace {

std::string trim(std::string s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

ConfigFile ConfigFile::parse_string(const std::string& text) {
  ConfigFile cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error("config line " + std::to_string(lineno) +
                                 ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw std::runtime_error("config line " + std::to_string(lineno) + ": empty section");
      cfg.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
    cfg.sections_[section][key] = value;
  }
  return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

std::optional<std::string> ConfigFile::get(const std::string& section,
                                           const std::string& key) const {
  const auto sec = sections_.find(section);
  if (sec == sections_.end()) return std::nullopt;
  const auto kv = sec->second.find(key);
  if (kv == sec->second.end()) return std::nullopt;
  return kv->second;
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
  const auto v = get(section, key);
  if (!v) return fallback;
  try {
    size_t used = 0;
    const double parsed = std::stod(*v, &used);
    if (used != v->size()) throw std::invalid_argument("");
    return parsed;
  } catch (...) {
    throw std::runtime_error("config [" + section + "] " + key + ": not a number: " + *v);
  }
}

long ConfigFile::get_long(const std::string& section, const std::string& key,
                          long fallback) const {
  const auto v = get(section, key);
  if (!v) return fallback;
  long parsed = 0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), parsed);
  if (ec != std::errc{} || ptr != v->data() + v->size())
    throw std::runtime_error("config [" + section + "] " + key + ": not an integer: " + *v);
  return parsed;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
  return get(section, key).value_or(fallback);
}

namespace {

std::vector<ControllerKind> parse_algorithms(const std::string& list) {
  std::vector<ControllerKind> algos;
  std::istringstream in(list);
  std::string token;
  while (std::getline(in, token, ',')) {
    token = trim(token);
    if (token.empty()) continue;
    const auto kind = controller_from_name(token);
    if (!kind) throw std::runtime_error("unknown algorithm: " + token);
    algos.push_back(*kind);
  }
  if (algos.empty()) throw std::runtime_error("algorithm list is empty");
  return algos;
}

}  // namespace

ExperimentConfig load_experiment_config(const ConfigFile& file) {
  ExperimentConfig cfg;

  if (const auto algos = file.get("experiment", "algorithms"))
    cfg.algorithms = parse_algorithms(*algos);
  cfg.d_x = static_cast<int>(file.get_long("experiment", "dx", cfg.d_x));
  cfg.d_u = static_cast<int>(file.get_long("experiment", "du", cfg.d_u));
  cfg.T = file.get_long("experiment", "T", cfg.T);
  cfg.H = static_cast<int>(file.get_long("experiment", "H", cfg.H));
  cfg.trials = static_cast<int>(file.get_long("experiment", "trials", cfg.trials));
  cfg.seed = static_cast<std::uint64_t>(file.get_long("experiment", "seed", 1));
  cfg.out = file.get_string("experiment", "out", cfg.out);

  if (const auto dist = file.get("noise", "distribution")) {
    const auto parsed = noise_from_name(*dist);
    if (!parsed) throw std::runtime_error("unknown noise distribution: " + *dist);
    cfg.noise.distribution = *parsed;
  }
  cfg.noise.gaussian_stddev =
      file.get_double("noise", "gaussian_stddev", cfg.noise.gaussian_stddev);
  cfg.noise.uniform_halfwidth =
      file.get_double("noise", "uniform_halfwidth", cfg.noise.uniform_halfwidth);
  cfg.noise.gamma_shape = file.get_double("noise", "gamma_shape", cfg.noise.gamma_shape);
  cfg.noise.gamma_scale = file.get_double("noise", "gamma_scale", cfg.noise.gamma_scale);
  cfg.noise.beta_a = file.get_double("noise", "beta_a", cfg.noise.beta_a);
  cfg.noise.beta_b = file.get_double("noise", "beta_b", cfg.noise.beta_b);
  cfg.noise.exponential_rate =
      file.get_double("noise", "exponential_rate", cfg.noise.exponential_rate);
  cfg.noise.weibull_shape = file.get_double("noise", "weibull_shape", cfg.noise.weibull_shape);
  cfg.noise.weibull_scale = file.get_double("noise", "weibull_scale", cfg.noise.weibull_scale);
  cfg.noise.delta_a_scale = file.get_double("noise", "delta_a_scale", cfg.noise.delta_a_scale);
  cfg.noise.delta_b_scale = file.get_double("noise", "delta_b_scale", cfg.noise.delta_b_scale);
  cfg.noise.W = file.get_double("noise", "W", cfg.noise.W);

  if (const auto kind = file.get("weights", "kind")) {
    const auto parsed = schedule_from_name(*kind);
    if (!parsed) throw std::runtime_error("unknown weight schedule: " + *kind);
    cfg.schedule = *parsed;
  }
  cfg.schedule.q_const = file.get_double("weights", "q", cfg.schedule.q_const);
  cfg.schedule.r_const = file.get_double("weights", "r", cfg.schedule.r_const);

  cfg.open_loop_radius = file.get_double("system", "open_loop_radius", cfg.open_loop_radius);
  cfg.free_radius = file.get_double("system", "free_radius", cfg.free_radius);
  cfg.closed_loop_radius =
      file.get_double("system", "closed_loop_radius", cfg.closed_loop_radius);
  cfg.input_gain = file.get_double("system", "input_gain", cfg.input_gain);

  // validate against the module preconditions before any run
  if (cfg.d_x < 1 || cfg.d_u < 1 || cfg.d_u > cfg.d_x)
    throw std::runtime_error("config: need 1 <= du <= dx");
  if (cfg.T < 1) throw std::runtime_error("config: T must be positive");
  if (cfg.H < 1) throw std::runtime_error("config: H must be positive");
  if (cfg.trials < 1) throw std::runtime_error("config: trials must be positive");
  if (!(cfg.free_radius > 0.0 && cfg.free_radius < 1.0))
    throw std::runtime_error("config: free_radius must lie in (0, 1)");
  if (!(cfg.closed_loop_radius > 0.0 && cfg.closed_loop_radius < 1.0))
    throw std::runtime_error("config: closed_loop_radius must lie in (0, 1)");
  if (!(cfg.input_gain > 0.0)) throw std::runtime_error("config: input_gain must be positive");
  return cfg;
}

BenchInstance make_bench_instance(const ExperimentConfig& cfg) {
  const int d_x = cfg.d_x;
  const int d_u = cfg.d_u;

  // Diagonal plant: the first d_u modes are actuated (possibly unstable),
  // the rest must already contract.  B routes input i to state i.
  Vec a_diag(d_x);
  for (int i = 0; i < d_x; ++i)
    a_diag[i] = i < d_u ? cfg.open_loop_radius : cfg.free_radius;
  Mat A = a_diag.asDiagonal();
  Mat B = Mat::Zero(d_x, d_u);
  for (int i = 0; i < d_u; ++i) B(i, i) = cfg.input_gain;

  // Gain cancelling the actuated modes down to the target radius, leaving
  // A - BK diagonal with entries of magnitude below one.
  Mat K = Mat::Zero(d_u, d_x);
  for (int i = 0; i < d_u; ++i)
    K(i, i) = (cfg.open_loop_radius - cfg.closed_loop_radius) / cfg.input_gain;

  const double contraction = std::max(cfg.closed_loop_radius, cfg.free_radius);
  const double gamma = 1.0 - contraction;
  const double kappa_A = std::max(cfg.open_loop_radius, cfg.free_radius);
  const double kappa_B = cfg.input_gain;
  double kappa = std::max(1.0, std::abs(K(0, 0)));

  const auto witness = strong_stability_check(A, B, K, kappa, gamma);
  if (!witness.stable)
    throw std::runtime_error("make_bench_instance: derived gain failed the stability check");

  LtvSystem sys(cfg.T, MatSchedule(A), MatSchedule(B), kappa_A, kappa_B, cfg.noise.W);

  const double weight_bound = schedule_weight_bound(cfg.schedule);
  auto cost = std::make_shared<QuadraticCost>(
      [schedule = cfg.schedule, T = cfg.T](long t) { return weights_at(schedule, t, T); },
      weight_bound);

  const ControlConstants constants =
      control_constants(kappa, gamma, kappa_B, cfg.H, d_u, d_x, cfg.noise.W,
                        cost->gradient_scale(), cost->beta());

  return BenchInstance{std::move(sys), MatSchedule(K), constants, std::move(cost), kappa,
                       gamma};
}

}  // namespace mofw
