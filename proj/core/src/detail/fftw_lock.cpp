#include "fftw_lock.hpp"

namespace hotel::detail {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace hotel::detail
