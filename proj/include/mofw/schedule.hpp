#pragma once

#include <optional>
#include <string_view>
#include <utility>

#include "mofw/types.hpp"

namespace mofw {

enum class ScheduleKind { sinusoidal, step, constant };

// Time-varying cost weights (q_t, r_t).  The sinusoidal schedule is
// q_t = sin(t / 10pi), r_t = sin(t / 20pi) and takes negative values;
// `nonnegative_shift` replaces both by (1 + sin)/2 for runs that need
// convex costs throughout.  The step schedule walks five plateaus switching
// between log(2)/2 and 1 at t = T/5, 2T/5, 3T/5, 4T/5 (each boundary belongs
// to the earlier plateau).
struct WeightSchedule {
  ScheduleKind kind = ScheduleKind::sinusoidal;
  bool nonnegative_shift = false;
  double q_const = 1.0;
  double r_const = 1.0;
};

std::pair<double, double> weights_at(const WeightSchedule& schedule, long t, long T);

// max over t of max(|q_t|, |r_t|); scales the cost bounds.
double schedule_weight_bound(const WeightSchedule& schedule);

const char* schedule_name(const WeightSchedule& schedule);
std::optional<WeightSchedule> schedule_from_name(std::string_view name);

}  // namespace mofw
