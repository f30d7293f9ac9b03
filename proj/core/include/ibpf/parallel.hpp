#pragma once
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ibpf {

// Mean/variance accumulator; merge() is Chan's pairwise update, so merging
// chunk results in a fixed order gives the same bits regardless of threads.
struct RunningStats {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    n += 1.0;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  void merge(const RunningStats& o) {
    if (o.n == 0.0) return;
    if (n == 0.0) {
      *this = o;
      return;
    }
    const double tot = n + o.n, d = o.mean - mean;
    mean += d * o.n / tot;
    m2 += o.m2 + d * d * n * o.n / tot;
    n = tot;
  }
  double variance() const { return n > 1.0 ? m2 / (n - 1.0) : 0.0; }
  double standard_error() const { return n > 1.0 ? std::sqrt(variance() / n) : 0.0; }
};

// Runs fn(chunk) for chunk = 0..n_chunks-1 on up to `threads` workers and
// returns results indexed by chunk. The chunk layout, not the thread count,
// fixes the random streams and the reduction order.
template <class Result, class Fn>
std::vector<Result> run_chunks(std::size_t n_chunks, unsigned threads, Fn&& fn) {
  std::vector<Result> out(n_chunks);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n_chunks, 1))));
  if (threads == 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) out[c] = fn(c);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex m;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t c = next.fetch_add(1);
        if (c >= n_chunks) return;
        try {
          out[c] = fn(c);
        } catch (...) {
          std::lock_guard<std::mutex> lk(m);
          if (!err) err = std::current_exception();
          next = n_chunks;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace ibpf
