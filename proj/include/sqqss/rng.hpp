#pragma once

#include <atomic>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

namespace sqqss {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for stream `stream` of a master seed. Streams are decorrelated so
/// that per-block generators can be handed out to any number of workers
/// without changing the aggregate result.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t s = master ^ (0xd1342543de82ef95ULL * (stream + 1));
  (void)splitmix64(s);
  return splitmix64(s);
}

inline std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t stream) {
  return std::mt19937_64(derive_seed(master, stream));
}

inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  return static_cast<int>(hw > 8 ? 8 : hw);
}

/// Runs fn(block_index, begin, end) over [0, total) split into fixed-size
/// blocks. Block boundaries depend only on block_size, never on the worker
/// count, so per-block seeded streams give worker-count-independent results
/// as long as fn writes only block-indexed state.
template <typename Fn>
void for_each_block(std::uint64_t total, std::uint64_t block_size, int workers,
                    Fn&& fn) {
  const std::uint64_t blocks = (total + block_size - 1) / block_size;
  const int n_workers = resolve_workers(workers);
  if (n_workers <= 1 || blocks <= 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) {
      const std::uint64_t begin = b * block_size;
      const std::uint64_t end = std::min(total, begin + block_size);
      fn(b, begin, end);
    }
    return;
  }
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::uint64_t b = next.fetch_add(1);
      if (b >= blocks) return;
      const std::uint64_t begin = b * block_size;
      const std::uint64_t end = std::min(total, begin + block_size);
      fn(b, begin, end);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_workers));
  for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

}  // namespace sqqss
