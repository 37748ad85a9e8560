#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "qvir/verify/report.hpp"

namespace qvir::verify {

// Thread budget: QVIR_THREADS if set, else the hardware count.
inline unsigned default_threads() {
  if (const char* env = std::getenv("QVIR_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs independent tasks on up to `threads` workers. Results come back in
// task order regardless of scheduling; the first failing task's exception
// (by index) is rethrown.
template <class T>
std::vector<T> run_tasks(const std::vector<std::function<T()>>& tasks, unsigned threads) {
  std::vector<T> out(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        out[i] = tasks[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(tasks.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

inline bool all_pass(const std::vector<RelationReport>& reps) {
  bool any = false;
  for (const auto& r : reps) {
    if (r.status == Status::Fail) return false;
    any = any || r.status == Status::Pass;
  }
  return any;
}

}  // namespace qvir::verify
