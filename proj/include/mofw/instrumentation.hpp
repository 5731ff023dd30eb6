#pragma once

namespace mofw::stats {

// Per-thread oracle-call tallies. Each trial runs on one thread, so these
// double as per-trial counters in the bench.
struct Counters {
  long lmo_calls = 0;
  long projections = 0;
  long gradient_evals = 0;
};

Counters& counters();
void reset_counters();

}  // namespace mofw::stats
