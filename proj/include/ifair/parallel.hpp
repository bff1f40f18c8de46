/*
 * Copyright 2026 The ifair Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef IFAIR_PARALLEL_HPP_
#define IFAIR_PARALLEL_HPP_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ifair {

// Runs f(i) for i in [0, n). Work is split into contiguous chunks, one per
// worker; callers write results into index-addressed slots so output order
// is independent of scheduling. The first exception (lowest index) wins.
template <typename F>
void parallel_for(std::size_t n, F&& f) {
  if (n == 0) return;
  std::size_t workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }

  std::atomic<std::size_t> first_error_index{n};
  std::vector<std::exception_ptr> errors(workers, nullptr);
  std::vector<std::size_t> error_index(workers, n);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    threads.emplace_back([&, w, begin, end] {
      for (std::size_t i = begin; i < end; ++i) {
        if (first_error_index.load(std::memory_order_relaxed) < i) break;
        try {
          f(i);
        } catch (...) {
          errors[w] = std::current_exception();
          error_index[w] = i;
          std::size_t prev = first_error_index.load();
          while (i < prev && !first_error_index.compare_exchange_weak(prev, i)) {
          }
          break;
        }
      }
    });
  }
  for (auto& t : threads) t.join();

  std::size_t best = n;
  std::exception_ptr to_throw = nullptr;
  for (std::size_t w = 0; w < workers; ++w) {
    if (errors[w] && error_index[w] < best) {
      best = error_index[w];
      to_throw = errors[w];
    }
  }
  if (to_throw) std::rethrow_exception(to_throw);
}

}  // namespace ifair

#endif  // IFAIR_PARALLEL_HPP_
