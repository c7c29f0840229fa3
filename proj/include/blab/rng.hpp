#pragma once

// Seeded, splittable randomness. Monte-Carlo work is cut into fixed-size
// chunks; chunk c draws from a generator seeded by (seed, stream, c), so a
// result depends only on the inputs and the seed, never on worker count.

#include <cstdint>
#include <functional>
#include <random>

namespace blab
{
inline constexpr std::uint64_t kChunkSamples = 8192;

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for an independent substream. Counter-based: derive(seed, a, b) is a
/// pure function of its arguments.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter = 0);

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter = 0)
{
  return Rng(derive_seed(seed, stream, counter));
}

/// Runs body(chunk) for chunk in [0, n_chunks), spread over up to `workers`
/// threads (0 picks hardware concurrency). Callers write into per-chunk slots
/// and reduce in chunk order afterwards.
void parallel_chunks(std::uint64_t n_chunks, const std::function<void(std::uint64_t)>& body,
                     unsigned workers = 0);

/// Running sums of (x - shift) and its square, merged in a fixed order. A
/// constant sample equal to the shift yields exactly that mean and zero error.
struct MomentAccumulator
{
  double shift = 0.0;
  double sum = 0.0;
  double sum_sq = 0.0;
  std::uint64_t count = 0;

  void add(double x)
  {
    const double d = x - shift;
    sum += d;
    sum_sq += d * d;
    ++count;
  }
  void merge(const MomentAccumulator& o)
  {
    sum += o.sum;
    sum_sq += o.sum_sq;
    count += o.count;
  }
  double mean() const { return count ? shift + sum / static_cast<double>(count) : shift; }
  /// Standard error of the mean (unbiased variance).
  double std_error() const;
};

}  // namespace blab
