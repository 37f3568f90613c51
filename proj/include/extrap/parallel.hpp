#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace extrap {

/// Worker-pool size used when a caller passes threads == 0.
int default_threads();
void set_default_threads(int n);  // 0 restores auto (hardware concurrency)

/// Tiled map-reduce with a reduction order that depends only on the tile
/// count, never on scheduling: each tile's partial result is stored in a
/// slot indexed by tile, then partials are combined pairwise in a fixed
/// tree. Results are therefore bit-identical for any thread count.
template <class T, class MapFn, class CombineFn>
T parallel_reduce(std::size_t tiles, T init, MapFn&& map, CombineFn&& combine,
                  int threads = 0) {
  if (tiles == 0) return init;
  std::vector<T> partial(tiles, init);
  int n = threads > 0 ? threads : default_threads();
  if (n <= 1 || tiles == 1) {
    for (std::size_t i = 0; i < tiles; ++i) partial[i] = map(i);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= tiles) return;
        partial[i] = map(i);
      }
    };
    std::vector<std::thread> pool;
    std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(n), tiles);
    pool.reserve(count);
    for (std::size_t i = 0; i < count; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  // fixed-order pairwise tree
  while (partial.size() > 1) {
    std::vector<T> next_level;
    next_level.reserve((partial.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < partial.size(); i += 2)
      next_level.push_back(combine(partial[i], partial[i + 1]));
    if (partial.size() % 2 == 1) next_level.push_back(partial.back());
    partial = std::move(next_level);
  }
  return partial.front();
}

}  // namespace extrap
