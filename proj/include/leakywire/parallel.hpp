#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace leakywire {

// Runs body(i, worker) for i in [0, n).  Worker w handles i = w, w + workers, ...
// so the assignment of indices to workers depends only on the worker count.
template <class Body>
void parallel_for(int n, int workers, Body&& body) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) body(i, 0);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += workers) body(i, w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace leakywire
