#pragma once

#include <mutex>

namespace hotel::detail {

/// FFTW's planner is not re-entrant; plan creation and destruction take this
/// lock. Executing an existing plan is thread-safe.
std::mutex& fftw_planner_mutex();

}  // namespace hotel::detail
