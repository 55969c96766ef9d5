#pragma once

#include <algorithm>
#include <thread>
#include <vector>

#include "lamof/motion.hpp"

namespace lamof::detail {

/// Runs body(chunk_begin, chunk_end) over [begin, end) in chunks of `grain`.
/// Chunks write disjoint outputs, so results do not depend on thread count.
template <typename Body>
void parallel_chunks(Index begin, Index end, Index grain, Body&& body) {
  const Index total = end - begin;
  if (total <= 0) return;
  const Index chunks = (total + grain - 1) / grain;
  const auto hw = static_cast<Index>(std::max(1u, std::thread::hardware_concurrency()));
  const Index workers = std::min(hw, chunks);
  if (workers <= 1) {
    for (Index c = 0; c < chunks; ++c) body(begin + c * grain, std::min(end, begin + (c + 1) * grain));
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (Index w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (Index c = w; c < chunks; c += workers) {
        body(begin + c * grain, std::min(end, begin + (c + 1) * grain));
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace lamof::detail
