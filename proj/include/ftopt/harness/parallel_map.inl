#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace ftopt::harness {

template <class Result, class Job>
std::vector<Result> parallel_map(int count, unsigned workers, Job job) {
  std::vector<Result> results(static_cast<std::size_t>(std::max(count, 0)));
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max(count, 1)));
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(workers);
  auto worker = [&](unsigned w) {
    try {
      for (int i = next++; i < count; i = next++) results[i] = job(i);
    } catch (...) {
      errors[w] = std::current_exception();
      next = count;
    }
  };
  if (workers == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(worker, w);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

}  // namespace ftopt::harness
