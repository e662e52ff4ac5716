#pragma once

#include <cstddef>
#include <functional>

namespace eulerlab {

/// Worker count from EULERLAB_THREADS (default 1).
unsigned thread_count();

/// Runs body(begin, end) over disjoint contiguous chunks of [0, n). Each index
/// is visited exactly once; callers write only to per-index slots, so results do
/// not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double v);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace eulerlab
