#include "blab/suprema.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <vector>

#include "blab/rng.hpp"

namespace blab
{
namespace
{
constexpr std::uint64_t kStreamBernoulliSup = 0x62737570ULL;
constexpr std::uint64_t kStreamGaussianSup = 0x67737570ULL;

// Row-major table: sums[mask * n_points + j] = sum_i s_i t_ji for the given
// coordinate range.
std::vector<double> partial_sum_table(const PointSet& T, Index first, Index count)
{
  const Index n = T.size();
  const std::size_t rows = std::size_t{1} << count;
  std::vector<double> table(rows * static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j)
  {
    const auto sums = detail::signed_partial_sums(T.point(j).segment(first, count));
    for (std::size_t mask = 0; mask < rows; ++mask)
    {
      table[mask * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)] = sums[mask];
    }
  }
  return table;
}

void require_samples(std::uint64_t samples)
{
  if (samples < 100)
  {
    throw std::invalid_argument("Monte-Carlo estimates need at least 100 samples");
  }
}

template <typename Draw>
SupEstimate mc_supremum(const PointSet& T, std::uint64_t samples, std::uint64_t seed,
                        std::uint64_t stream, double shift, unsigned workers, Draw draw)
{
  require_samples(samples);
  const std::uint64_t n_chunks = (samples + kChunkSamples - 1) / kChunkSamples;
  std::vector<MomentAccumulator> parts(n_chunks);
  const Eigen::MatrixXd& points = T.matrix();

  parallel_chunks(
      n_chunks,
      [&](std::uint64_t c) {
        Rng rng = make_rng(seed, stream, c);
        std::normal_distribution<double> normal;
        Eigen::RowVectorXd xi(points.rows());
        Eigen::RowVectorXd values(points.cols());
        MomentAccumulator acc;
        acc.shift = shift;
        const std::uint64_t count = std::min(kChunkSamples, samples - c * kChunkSamples);
        for (std::uint64_t s = 0; s < count; ++s)
        {
          draw(rng, normal, xi);
          values.noalias() = xi * points;
          acc.add(values.maxCoeff());
        }
        parts[c] = acc;
      },
      workers);

  MomentAccumulator total;
  total.shift = shift;
  for (const auto& part : parts)
  {
    total.merge(part);
  }
  return {total.mean(), total.std_error(), Method::monte_carlo};
}

}  // namespace

SupEstimate b_exact(const PointSet& T, int cap)
{
  const Index d = T.dim();
  detail::require_cap(d, cap);
  const Index n = T.size();
  const Index h = (d + 1) / 2;
  const Index rest = d - h;
  const auto head = partial_sum_table(T, 0, h);
  const auto tail = partial_sum_table(T, h, rest);
  const std::size_t full_head = (std::size_t{1} << h) - 1;
  const std::size_t full_tail = (std::size_t{1} << rest) - 1;
  const std::size_t un = static_cast<std::size_t>(n);

  const auto max_at = [&](std::size_t a, std::size_t b) {
    const double* ha = head.data() + a * un;
    const double* tb = tail.data() + b * un;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < un; ++j)
    {
      best = std::max(best, ha[j] + tb[j]);
    }
    return best;
  };

  // Patterns with the top head bit clear, each paired with its complement.
  double total = 0.0;
  const std::size_t half_head = std::size_t{1} << (h - 1);
  for (std::size_t a = 0; a < half_head; ++a)
  {
    const std::size_t ac = full_head ^ a;
    double row = 0.0;
    for (std::size_t b = 0; b <= full_tail; ++b)
    {
      row += max_at(a, b) + max_at(ac, full_tail ^ b);
    }
    total += row;
  }
  return {std::ldexp(total, -static_cast<int>(d)), 0.0, Method::exact_enum};
}

SupEstimate b_mc(const PointSet& T, std::uint64_t samples, std::uint64_t seed, unsigned workers)
{
  // The all-plus outcome; a constant supremum is then recovered exactly.
  const double shift = T.matrix().colwise().sum().maxCoeff();
  return mc_supremum(T, samples, seed, kStreamBernoulliSup, shift, workers,
                     [](Rng& rng, std::normal_distribution<double>&, Eigen::RowVectorXd& xi) {
                       std::uint64_t bits = 0;
                       for (Index i = 0; i < xi.size(); ++i)
                       {
                         if (i % 64 == 0)
                         {
                           bits = rng();
                         }
                         xi(i) = (bits & 1u) ? -1.0 : 1.0;
                         bits >>= 1u;
                       }
                     });
}

SupEstimate g_mc(const PointSet& T, std::uint64_t samples, std::uint64_t seed, unsigned workers)
{
  return mc_supremum(T, samples, seed, kStreamGaussianSup, 0.0, workers,
                     [](Rng& rng, std::normal_distribution<double>& normal,
                        Eigen::RowVectorXd& xi) {
                       for (Index i = 0; i < xi.size(); ++i)
                       {
                         xi(i) = normal(rng);
                       }
                     });
}

SupEstimate sup_estimate(const PointSet& T, DistKind kind, std::uint64_t samples,
                         std::uint64_t seed, int cap)
{
  if (kind == DistKind::bernoulli)
  {
    if (T.dim() <= cap)
    {
      return b_exact(T, cap);
    }
    return b_mc(T, samples, seed);
  }
  return g_mc(T, samples, seed);
}

}  // namespace blab
