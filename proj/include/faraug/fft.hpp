// faraug/fft.hpp

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

// Thin RAII wrapper over FFTW's real transforms. Plans are built once per
// size under a lock (FFTW planning is not thread-safe) with
// FFTW_ESTIMATE | FFTW_UNALIGNED, so execution is re-entrant and produces
// the same bits regardless of buffer alignment.

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "faraug/error.hpp"

namespace faraug {

class RealFft {
 public:
  explicit RealFft(std::size_t size) : size_(size) {
    require(size >= 2, ErrorCode::kInvalidArgument, "fft size must be >= 2");
    std::lock_guard lock(planner_mutex());
    std::vector<double> re(size);
    std::vector<std::complex<double>> cx(size / 2 + 1);
    auto* c = reinterpret_cast<fftw_complex*>(cx.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(size), re.data(), c,
                                    flags);
    inverse_ = fftw_plan_dft_c2r_1d(static_cast<int>(size), c, re.data(),
                                    flags);
    require(forward_ && inverse_, ErrorCode::kInvalidArgument,
            "fftw planning failed");
  }

  ~RealFft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
  }

  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const noexcept { return size_; }
  std::size_t bins() const noexcept { return size_ / 2 + 1; }

  /// `in` has size() samples, `out` has bins() values.
  void forward(std::span<const double> in,
               std::span<std::complex<double>> out) const {
    std::vector<double> buf(in.begin(), in.end());
    fftw_execute_dft_r2c(forward_, buf.data(),
                         reinterpret_cast<fftw_complex*>(out.data()));
  }

  /// Unnormalized inverse; divide by size() to undo forward().
  void inverse(std::span<const std::complex<double>> in,
               std::span<double> out) const {
    // c2r destroys its input.
    std::vector<std::complex<double>> buf(in.begin(), in.end());
    fftw_execute_dft_c2r(inverse_,
                         reinterpret_cast<fftw_complex*>(buf.data()),
                         out.data());
  }

  /// Shared instance per size.
  static const RealFft& get(std::size_t size) {
    static std::mutex cache_mutex;
    static std::map<std::size_t, std::unique_ptr<RealFft>> cache;
    std::lock_guard lock(cache_mutex);
    auto& slot = cache[size];
    if (!slot) slot = std::make_unique<RealFft>(size);
    return *slot;
  }

 private:
  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }

  std::size_t size_;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

}  // namespace faraug
