#include "blab/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

namespace blab
{
std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter)
{
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ (counter * 0xD1B54A32D192ED03ULL));
}

void parallel_chunks(std::uint64_t n_chunks, const std::function<void(std::uint64_t)>& body,
                     unsigned workers)
{
  if (workers == 0)
  {
    workers = std::max(1u, std::thread::hardware_concurrency());
  }
  const auto n_threads = static_cast<unsigned>(std::min<std::uint64_t>(workers, n_chunks));
  if (n_threads <= 1)
  {
    for (std::uint64_t c = 0; c < n_chunks; ++c)
    {
      body(c);
    }
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(n_threads);
  for (unsigned w = 0; w < n_threads; ++w)
  {
    pool.emplace_back([&] {
      for (std::uint64_t c = next++; c < n_chunks; c = next++)
      {
        body(c);
      }
    });
  }
}

double MomentAccumulator::std_error() const
{
  if (count < 2)
  {
    return 0.0;
  }
  const double n = static_cast<double>(count);
  const double m = sum / n;
  const double var = std::max(0.0, (sum_sq - n * m * m) / (n - 1.0));
  return std::sqrt(var / n);
}

}  // namespace blab
