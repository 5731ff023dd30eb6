#include "mofw/schedule.hpp"

#include <cmath>
#include <numbers>

namespace mofw {

std::pair<double, double> weights_at(const WeightSchedule& schedule, long t, long T) {
  if (t < 0 || t > T) throw std::out_of_range("weights_at: t outside [0, T]");
  switch (schedule.kind) {
    case ScheduleKind::sinusoidal: {
      const double q = std::sin(t / (10.0 * std::numbers::pi));
      const double r = std::sin(t / (20.0 * std::numbers::pi));
      if (schedule.nonnegative_shift) return {0.5 * (1.0 + q), 0.5 * (1.0 + r)};
      return {q, r};
    }
    case ScheduleKind::step: {
      const double half_log2 = 0.5 * std::numbers::ln2;
      // integer comparisons keep the boundaries exact: t <= kT/5 <=> 5t <= kT
      if (5 * t <= T) return {half_log2, 1.0};
      if (5 * t <= 2 * T) return {1.0, 1.0};
      if (5 * t <= 3 * T) return {half_log2, half_log2};
      if (5 * t <= 4 * T) return {1.0, half_log2};
      return {half_log2, 1.0};
    }
    case ScheduleKind::constant:
      return {schedule.q_const, schedule.r_const};
  }
  throw std::logic_error("weights_at: unknown schedule kind");
}

double schedule_weight_bound(const WeightSchedule& schedule) {
  switch (schedule.kind) {
    case ScheduleKind::sinusoidal: return 1.0;
    case ScheduleKind::step: return 1.0;
    case ScheduleKind::constant:
      return std::max(std::abs(schedule.q_const), std::abs(schedule.r_const));
  }
  return 1.0;
}

const char* schedule_name(const WeightSchedule& schedule) {
  switch (schedule.kind) {
    case ScheduleKind::sinusoidal:
      return schedule.nonnegative_shift ? "sinusoidal_shifted" : "sinusoidal";
    case ScheduleKind::step: return "step";
    case ScheduleKind::constant: return "constant";
  }
  return "unknown";
}

std::optional<WeightSchedule> schedule_from_name(std::string_view name) {
  WeightSchedule s;
  if (name == "sinusoidal") {
    s.kind = ScheduleKind::sinusoidal;
    return s;
  }
  if (name == "sinusoidal_shifted") {
    s.kind = ScheduleKind::sinusoidal;
    s.nonnegative_shift = true;
    return s;
  }
  if (name == "step") {
    s.kind = ScheduleKind::step;
    return s;
  }
  if (name == "constant") {
    s.kind = ScheduleKind::constant;
    return s;
  }
  return std::nullopt;
}

}  // namespace mofw
