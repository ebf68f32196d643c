#pragma once
#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace bgreen {

inline int default_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

/// Run f(block) for block = 0..n_blocks-1 on `threads` workers.  Blocks are
/// claimed through an atomic counter; callers store per-block results and
/// reduce them in block order afterwards, so results do not depend on the
/// thread count.
inline void parallel_blocks(long long n_blocks, int threads,
                            const std::function<void(long long)>& f) {
  if (threads <= 1 || n_blocks <= 1) {
    for (long long b = 0; b < n_blocks; ++b) f(b);
    return;
  }
  std::atomic<long long> next{0};
  auto worker = [&] {
    for (;;) {
      const long long b = next.fetch_add(1);
      if (b >= n_blocks) return;
      f(b);
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min<long long>(threads, n_blocks);
  pool.reserve(n);
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

} // namespace bgreen
