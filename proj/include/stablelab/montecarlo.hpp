#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "stablelab/parallel.hpp"
#include "stablelab/stats.hpp"

namespace stablelab {

/// Replicates are split into `groups` contiguous blocks; each block is run
/// start to finish by one worker, which accumulates the feature vectors of
/// its replicates in replicate order. The sums therefore do not depend on
/// the worker count, and nothing per replicate is stored.
///
/// `make_worker()` is called once per block and must return a callable
/// `fn(std::size_t replicate, std::span<double> features)` that overwrites
/// all features; per-block scratch lives inside it.
template <class MakeWorker>
GroupedSums grouped_monte_carlo(std::size_t reps, std::size_t features, std::size_t groups, unsigned workers,
                                MakeWorker&& make_worker) {
  groups = std::clamp<std::size_t>(groups, 1, std::max<std::size_t>(reps, 1));
  GroupedSums out(groups, features);
  parallel_for(groups, workers, [&](std::size_t g) {
    auto fn = make_worker();
    std::vector<double> row(features);
    auto& sums = out.sums[g];
    const std::size_t begin = g * reps / groups;
    const std::size_t end = (g + 1) * reps / groups;
    for (std::size_t i = begin; i < end; ++i) {
      fn(i, std::span<double>(row));
      for (std::size_t k = 0; k < features; ++k) sums[k] += row[k];
    }
    out.counts[g] = end - begin;
  });
  return out;
}

}  // namespace stablelab
