#include "mofw/instrumentation.hpp"

namespace mofw::stats {

namespace {
thread_local Counters tls_counters;
}

Counters& counters() { return tls_counters; }

void reset_counters() { tls_counters = Counters{}; }

}  // namespace mofw::stats
