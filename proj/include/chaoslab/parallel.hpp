#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

#include "chaoslab/rng.hpp"

namespace chaoslab {

// Worker threads: hardware concurrency, capped by CHAOSLAB_THREADS.
std::size_t worker_count();

// Monte Carlo layout: `chains` independent streams (seed, stream_id(part, c)).
struct ChainPlan {
  std::uint64_t seed = 1;
  std::uint64_t part = 0;
  int chains = 8;
};

// Number of samples chain c draws out of `total`.
inline std::int64_t chain_share(std::int64_t total, int chains, int c) {
  return total / chains + (c < total % chains ? 1 : 0);
}

// Runs body(rng, count) for every chain on a worker pool and returns the
// per-chain results in chain order. The first exception (in chain order) is
// rethrown after all workers finish.
template <class T, class Body>
std::vector<T> run_chains(const ChainPlan& plan, std::int64_t total, Body&& body) {
  const int chains = plan.chains;
  std::vector<T> results(static_cast<std::size_t>(chains));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(chains));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int c = next++; c < chains; c = next++) {
      try {
        RngStream rng(plan.seed, stream_id(plan.part, static_cast<std::uint64_t>(c)));
        results[static_cast<std::size_t>(c)] = body(rng, chain_share(total, chains, c));
      } catch (...) {
        errors[static_cast<std::size_t>(c)] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::min<std::size_t>(worker_count(), static_cast<std::size_t>(chains));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

// Concatenation of per-chain sample vectors in chain order.
template <class T>
std::vector<T> concat(std::vector<std::vector<T>> parts) {
  std::vector<T> out;
  std::size_t n = 0;
  for (const auto& p : parts) n += p.size();
  out.reserve(n);
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace chaoslab
