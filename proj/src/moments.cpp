#include "blab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "blab/rng.hpp"

namespace blab
{
namespace
{
constexpr std::uint64_t kStreamPnorm = 0x706e6f726dULL;

struct HalfSplit
{
  std::vector<double> head;  // first coordinate's sign fixed to +
  std::vector<double> tail;
};

// |X_t| is symmetric, so one sign is fixed and half the cube is enumerated.
HalfSplit split_sign_cube(const VecRef& t)
{
  const Index d = t.size();
  const Index rest = d - 1;
  const Index h = rest / 2;
  HalfSplit s;
  s.head = detail::signed_partial_sums(t.segment(1, h), t(0));
  s.tail = detail::signed_partial_sums(t.tail(rest - h));
  return s;
}

}  // namespace

std::string_view to_string(DistKind kind)
{
  return kind == DistKind::bernoulli ? "bernoulli" : "gaussian";
}

std::string_view to_string(Method method)
{
  switch (method)
  {
    case Method::exact_enum:
      return "exact-enum";
    case Method::closed_form:
      return "closed-form";
    case Method::monte_carlo:
      return "monte-carlo";
    case Method::hitczenko_surrogate:
      return "hitczenko-surrogate";
  }
  return "unknown";
}

DistKind parse_dist_kind(std::string_view text)
{
  if (text == "bernoulli")
  {
    return DistKind::bernoulli;
  }
  if (text == "gaussian")
  {
    return DistKind::gaussian;
  }
  throw std::invalid_argument("unknown distribution kind: " + std::string(text));
}

Method parse_method(std::string_view text)
{
  for (const Method m : {Method::exact_enum, Method::closed_form, Method::monte_carlo,
                         Method::hitczenko_surrogate})
  {
    if (to_string(m) == text)
    {
      return m;
    }
  }
  throw std::invalid_argument("unknown method tag: " + std::string(text));
}

bool is_positive_integer(double p)
{
  return std::isfinite(p) && p >= 1.0 && std::floor(p) == p;
}

std::vector<double> dyadic_p_grid(double max_p)
{
  std::vector<double> grid;
  for (double p = 1.0; p <= max_p; p *= 2.0)
  {
    grid.push_back(p);
  }
  return grid;
}

namespace detail
{
std::vector<double> signed_partial_sums(const VecRef& v, double init)
{
  const Index k = v.size();
  std::vector<double> sums(std::size_t{1} << k);
  sums[0] = init;
  for (Index i = 0; i < k; ++i)
  {
    const std::size_t half = std::size_t{1} << i;
    for (std::size_t mask = 0; mask < half; ++mask)
    {
      const double base = sums[mask];
      sums[mask | half] = base - v(i);
      sums[mask] = base + v(i);
    }
  }
  return sums;
}

double power(double x, double p)
{
  if (p == 1.0)
  {
    return x;
  }
  if (p == 2.0)
  {
    return x * x;
  }
  if (p <= 1024.0 && std::floor(p) == p)
  {
    auto n = static_cast<unsigned>(p);
    double result = 1.0;
    double base = x;
    while (n)
    {
      if (n & 1u)
      {
        result *= base;
      }
      base *= base;
      n >>= 1u;
    }
    return result;
  }
  return std::pow(x, p);
}

void require_cap(Index dim, int cap)
{
  if (cap < 1 || cap > kMaxEnumCap)
  {
    throw std::invalid_argument("enumeration cap must lie in [1, " + std::to_string(kMaxEnumCap) +
                                "]");
  }
  if (dim > cap)
  {
    throw CapExceeded(dim, cap);
  }
}
}  // namespace detail

double gaussian_abs_moment_norm(double p)
{
  if (!(p >= 1.0))
  {
    throw std::invalid_argument("p must be >= 1");
  }
  if (p == 2.0)
  {
    return 1.0;
  }
  const double log_moment = std::lgamma((p + 1.0) / 2.0) - 0.5 * std::log(std::numbers::pi);
  return std::sqrt(2.0) * std::exp(log_moment / p);
}

MomentEstimate exact_pnorm(const VecRef& t, double p, DistKind kind, int cap)
{
  require_valid_point(t);
  if (!(p >= 1.0) || !std::isfinite(p))
  {
    throw std::invalid_argument("p must be finite and >= 1");
  }
  if (kind == DistKind::gaussian)
  {
    return {t.norm() * gaussian_abs_moment_norm(p), 0.0, Method::closed_form};
  }
  detail::require_cap(t.size(), cap);

  const HalfSplit cube = split_sign_cube(t);
  const auto [min_tail, max_tail] = std::minmax_element(cube.tail.begin(), cube.tail.end());
  // Largest atom, factored out of the power sum so large p cannot overflow.
  double top = 0.0;
  for (const double a : cube.head)
  {
    top = std::max({top, std::abs(a + *max_tail), std::abs(a + *min_tail)});
  }
  if (top == 0.0)
  {
    return {0.0, 0.0, Method::exact_enum};
  }
  double acc = 0.0;
  for (const double a : cube.head)
  {
    double inner = 0.0;
    for (const double b : cube.tail)
    {
      inner += detail::power(std::abs(a + b) / top, p);
    }
    acc += inner;
  }
  const double atoms = static_cast<double>(cube.head.size()) * static_cast<double>(cube.tail.size());
  return {top * std::pow(acc / atoms, 1.0 / p), 0.0, Method::exact_enum};
}

MomentEstimate mc_pnorm(const VecRef& t, double p, DistKind kind, std::uint64_t samples,
                        std::uint64_t seed, unsigned workers)
{
  require_valid_point(t);
  if (!(p >= 1.0) || !std::isfinite(p))
  {
    throw std::invalid_argument("p must be finite and >= 1");
  }
  if (samples < 100)
  {
    throw std::invalid_argument("Monte-Carlo estimates need at least 100 samples");
  }
  const double scale = kind == DistKind::bernoulli ? t.lpNorm<1>() : t.norm();
  if (scale == 0.0)
  {
    return {0.0, 0.0, Method::monte_carlo};
  }
  const Index d = t.size();
  const double shift = detail::power(std::abs(t.sum()) / scale, p);
  const std::uint64_t n_chunks = (samples + kChunkSamples - 1) / kChunkSamples;
  std::vector<MomentAccumulator> parts(n_chunks);
  const std::uint64_t stream = kStreamPnorm ^ static_cast<std::uint64_t>(kind);

  parallel_chunks(
      n_chunks,
      [&](std::uint64_t c) {
        Rng rng = make_rng(seed, stream, c);
        std::normal_distribution<double> normal;
        MomentAccumulator acc;
        acc.shift = shift;
        const std::uint64_t count = std::min(kChunkSamples, samples - c * kChunkSamples);
        for (std::uint64_t s = 0; s < count; ++s)
        {
          double x = 0.0;
          if (kind == DistKind::bernoulli)
          {
            std::uint64_t bits = 0;
            for (Index i = 0; i < d; ++i)
            {
              if (i % 64 == 0)
              {
                bits = rng();
              }
              x += (bits & 1u) ? -t(i) : t(i);
              bits >>= 1u;
            }
          }
          else
          {
            for (Index i = 0; i < d; ++i)
            {
              x += normal(rng) * t(i);
            }
          }
          acc.add(detail::power(std::abs(x) / scale, p));
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
  const double mean = total.mean();
  if (mean <= 0.0)
  {
    return {0.0, 0.0, Method::monte_carlo};
  }
  const double value = scale * std::pow(mean, 1.0 / p);
  const double se = scale * std::pow(mean, 1.0 / p - 1.0) / p * total.std_error();
  return {value, se, Method::monte_carlo};
}

double hitczenko(const VecRef& t, double p)
{
  require_valid_point(t);
  if (!is_positive_integer(p))
  {
    throw std::invalid_argument("the rearrangement surrogate needs an integer p >= 1");
  }
  const Index d = t.size();
  const Index k = p >= static_cast<double>(d) ? d : static_cast<Index>(p);
  const Eigen::VectorXd sorted = rearrange_abs(t);
  const double head = sorted.head(k).sum();
  const double tail = k < d ? sorted.tail(d - k).norm() : 0.0;
  return head + std::sqrt(p) * tail;
}

double hitczenko_trunc(const VecRef& t, double r, double p)
{
  return hitczenko(truncate_abs(t, r), p);
}

TailCheck tail_prob_check(const VecRef& t, double p, int cap)
{
  const double norm = exact_pnorm(t, p, DistKind::bernoulli, cap).value;
  TailCheck out;
  out.threshold = std::numbers::e * norm;
  out.bound = std::exp(-p);
  const HalfSplit cube = split_sign_cube(t);
  std::uint64_t hits = 0;
  for (const double a : cube.head)
  {
    for (const double b : cube.tail)
    {
      hits += std::abs(a + b) >= out.threshold ? 1u : 0u;
    }
  }
  const double atoms = static_cast<double>(cube.head.size()) * static_cast<double>(cube.tail.size());
  out.prob = static_cast<double>(hits) / atoms;
  out.pass = out.prob <= out.bound;
  return out;
}

double reverse_tail_kappa(const VecRef& t, double p, int cap)
{
  const double norm = exact_pnorm(t, p, DistKind::bernoulli, cap).value;
  const HalfSplit cube = split_sign_cube(t);
  std::vector<double> atoms;
  atoms.reserve(cube.head.size() * cube.tail.size());
  for (const double a : cube.head)
  {
    for (const double b : cube.tail)
    {
      atoms.push_back(std::abs(a + b));
    }
  }
  std::sort(atoms.begin(), atoms.end());
  const double n = static_cast<double>(atoms.size());
  const double floor_prob = std::exp(-p);
  // lhs(kappa) grows and min(1/kappa, e^-p) shrinks in kappa, so the set of
  // admissible kappa is an up-ray.
  const auto holds = [&](double kappa) {
    const double level = norm / kappa;
    const auto first = std::lower_bound(atoms.begin(), atoms.end(), level);
    const double lhs = static_cast<double>(atoms.end() - first) / n;
    return lhs >= std::min(1.0 / kappa, floor_prob);
  };
  if (holds(1.0))
  {
    return 1.0;
  }
  double lo = 1.0;
  double hi = 2.0;
  while (!holds(hi))
  {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e15)
    {
      return std::numeric_limits<double>::infinity();
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it)
  {
    const double mid = 0.5 * (lo + hi);
    (holds(mid) ? hi : lo) = mid;
  }
  return hi;
}

MomentEstimate level_pnorm(const VecRef& t, double p, DistKind kind, int cap)
{
  if (kind == DistKind::bernoulli && t.size() > cap)
  {
    return {hitczenko(t, p), 0.0, Method::hitczenko_surrogate};
  }
  return exact_pnorm(t, p, kind, cap);
}

}  // namespace blab
