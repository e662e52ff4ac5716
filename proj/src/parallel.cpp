#include "eulerlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace eulerlab {

unsigned thread_count() {
  static const unsigned count = [] {
    const char* env = std::getenv("EULERLAB_THREADS");
    if (env == nullptr) return 1u;
    try {
      const long v = std::stol(env);
      return v > 0 ? static_cast<unsigned>(std::min(v, 256L)) : 1u;
    } catch (...) {
      return 1u;
    }
  }();
  return count;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  const unsigned workers = thread_count();
  if (workers <= 1 || n < 4096) {
    body(0, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  for (auto& t : pool) t.join();
}

void CompensatedSum::add(double v) {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v)) {
    comp_ += (sum_ - t) + v;
  } else {
    comp_ += (v - t) + sum_;
  }
  sum_ = t;
}

}  // namespace eulerlab
