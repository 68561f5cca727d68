#include "frameforge/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace frameforge {

int thread_count() {
  const char* env = std::getenv("FRAMEFORGE_THREADS");
  if (!env) return 1;
  int n = std::atoi(env);
  return std::clamp(n, 1, 256);
}

void parallel_for(long long n, const std::function<void(long long)>& body) {
  int workers = static_cast<int>(std::min<long long>(thread_count(), n));
  if (workers <= 1) {
    for (long long i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(workers);
  long long chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        long long lo = w * chunk, hi = std::min(n, lo + chunk);
        for (long long i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace frameforge
