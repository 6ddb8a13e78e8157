#ifndef RRS_PARALLEL_HPP
#define RRS_PARALLEL_HPP

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace rrs {

inline int resolve_workers(int workers) {
  if (workers > 0) return workers;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

//! Run fn(replicate_index) for indices [0, n) on a worker pool.
//!
//! Work is split into fixed chunks independent of the worker count and each
//! replicate owns its random stream, so results depend only on the replicate
//! index.  Callers reduce per-replicate results in index order, which keeps
//! outputs byte-identical for any --workers value.
template <class Fn>
void parallel_replicates(std::int64_t n, int workers, Fn&& fn) {
  workers = resolve_workers(workers);
  if (workers <= 1 || n < 2) {
    for (std::int64_t r = 0; r < n; ++r) fn(r);
    return;
  }
  const std::int64_t n_chunks = std::min<std::int64_t>(n, 512);
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::int64_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      const std::int64_t lo = c * n / n_chunks;
      const std::int64_t hi = (c + 1) * n / n_chunks;
      for (std::int64_t r = lo; r < hi; ++r) fn(r);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace rrs

#endif
