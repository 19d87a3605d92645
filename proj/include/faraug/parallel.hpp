// faraug/parallel.hpp

// Copyright 2026  The faraug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Index-parallel loop over a fixed thread count.  Work items are claimed
// from an atomic counter, so results must be written to per-index slots.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "faraug/error.hpp"

namespace faraug {

/// Runs fn(i) for i in [0, n). If any call throws, the exception of the
/// lowest failing index is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto nw = static_cast<unsigned>(
      std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < nw; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Flag value if positive, else $FARAUG_WORKERS, else `fallback`.
inline unsigned resolve_workers(int flag, unsigned fallback = 1) {
  if (flag > 0) return static_cast<unsigned>(flag);
  if (const char* env = std::getenv("FARAUG_WORKERS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    require(end && *end == '\0' && v > 0, ErrorCode::kConfig,
            std::string("FARAUG_WORKERS must be a positive integer, got '") + env + "'");
    return static_cast<unsigned>(v);
  }
  return std::max(1u, fallback);
}

}  // namespace faraug
