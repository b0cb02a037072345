// Copyright 2026 The miqm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Compares the serial reference kernels against the OpenMP paths and
// reports wall times plus the worst relative deviation between the two.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "core/kernels.h"
#include "core/parallel.h"
#include "core/rng.h"

namespace {

using miqm::Rng;
using miqm::Scalar;
using miqm::Tensor;

Tensor random_tensor(std::vector<int> shape, Rng& rng) {
  Tensor t(std::move(shape));
  for (std::int64_t i = 0; i < t.numel(); ++i) t[i] = rng.uniform(-1, 1);
  return t;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

Scalar max_rel_diff(const Tensor& a, const Tensor& b) {
  Scalar worst = 0;
  for (std::int64_t i = 0; i < a.numel(); ++i) {
    const Scalar denom = std::max({std::abs(a[i]), std::abs(b[i]), Scalar(1)});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  int size = 256;
  int reps = 5;
  if (argc > 1) size = std::atoi(argv[1]);
  if (argc > 2) reps = std::atoi(argv[2]);

  Rng rng(7);
  Tensor x = random_tensor({size, size, 16}, rng);
  Tensor w = random_tensor({3, 3, 16, 32}, rng);
  Tensor b = random_tensor({32}, rng);
  std::vector<Scalar> gauss = {0.0625, 0.25, 0.375, 0.25, 0.0625};

  std::printf("kernel benchmark: %dx%dx16 input, %d reps\n", size, size, reps);
  std::printf("%-14s %12s %12s %10s %12s\n", "kernel", "serial_ms", "omp_ms",
              "speedup", "max_rel");

  {
    miqm::set_compute_mode(miqm::ComputeMode::kSerial);
    Tensor ys = miqm::conv2d(x, w, b);
    auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) ys = miqm::conv2d(x, w, b);
    const double ts = seconds_since(t0) / reps;

    miqm::set_compute_mode(miqm::ComputeMode::kParallel);
    Tensor yp = miqm::conv2d(x, w, b);
    t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) yp = miqm::conv2d(x, w, b);
    const double tp = seconds_since(t0) / reps;

    std::printf("%-14s %12.2f %12.2f %9.2fx %12.3e\n", "conv2d_3x3",
                ts * 1e3, tp * 1e3, ts / tp, max_rel_diff(ys, yp));
  }

  {
    miqm::set_compute_mode(miqm::ComputeMode::kSerial);
    Tensor ys = miqm::filter1d(x, gauss, 0);
    auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) ys = miqm::filter1d(x, gauss, 0);
    const double ts = seconds_since(t0) / reps;

    miqm::set_compute_mode(miqm::ComputeMode::kParallel);
    Tensor yp = miqm::filter1d(x, gauss, 0);
    t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) yp = miqm::filter1d(x, gauss, 0);
    const double tp = seconds_since(t0) / reps;

    std::printf("%-14s %12.2f %12.2f %9.2fx %12.3e\n", "filter1d_y",
                ts * 1e3, tp * 1e3, ts / tp, max_rel_diff(ys, yp));
  }

  {
    miqm::set_compute_mode(miqm::ComputeMode::kSerial);
    Tensor ys = miqm::maxpool2(x);
    auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) ys = miqm::maxpool2(x);
    const double ts = seconds_since(t0) / reps;

    miqm::set_compute_mode(miqm::ComputeMode::kParallel);
    Tensor yp = miqm::maxpool2(x);
    t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) yp = miqm::maxpool2(x);
    const double tp = seconds_since(t0) / reps;

    std::printf("%-14s %12.2f %12.2f %9.2fx %12.3e\n", "maxpool2",
                ts * 1e3, tp * 1e3, ts / tp, max_rel_diff(ys, yp));
  }

  miqm::set_compute_mode(miqm::ComputeMode::kParallel);
  return 0;
}
