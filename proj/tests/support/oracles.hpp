#pragma once

// Independent reference computations: plain sign-cube loops in long double
// and one-dimensional quadrature. Nothing here calls into the library.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle
{
inline long double signed_sum(const Eigen::VectorXd& t, std::uint64_t mask)
{
  long double s = 0.0L;
  for (Eigen::Index i = 0; i < t.size(); ++i)
  {
    s += ((mask >> i) & 1U) ? -static_cast<long double>(t(i)) : static_cast<long double>(t(i));
  }
  return s;
}

/// (2^-d sum_sigma |<sigma, t>|^p)^(1/p).
inline double bernoulli_pnorm(const Eigen::VectorXd& t, double p)
{
  const std::uint64_t atoms = std::uint64_t{1} << t.size();
  long double acc = 0.0L;
  for (std::uint64_t m = 0; m < atoms; ++m)
  {
    acc += std::pow(std::fabs(signed_sum(t, m)), static_cast<long double>(p));
  }
  return static_cast<double>(std::pow(acc / atoms, 1.0L / p));
}

/// P(|<sigma, t>| >= level).
inline double bernoulli_tail(const Eigen::VectorXd& t, double level)
{
  const std::uint64_t atoms = std::uint64_t{1} << t.size();
  std::uint64_t hits = 0;
  for (std::uint64_t m = 0; m < atoms; ++m)
  {
    hits += std::fabs(signed_sum(t, m)) >= level ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(atoms);
}

/// 2^-d sum_sigma max_t <sigma, t>, points as columns.
inline double bernoulli_sup(const Eigen::MatrixXd& points)
{
  const std::uint64_t atoms = std::uint64_t{1} << points.rows();
  long double acc = 0.0L;
  for (std::uint64_t m = 0; m < atoms; ++m)
  {
    long double best = -INFINITY;
    for (Eigen::Index k = 0; k < points.cols(); ++k)
    {
      best = std::max(best, signed_sum(points.col(k), m));
    }
    acc += best;
  }
  return static_cast<double>(acc / atoms);
}

/// Composite Simpson rule on [a, b] with n (even) panels.
template <typename F>
double simpson(F f, double a, double b, int n = 20000)
{
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k)
  {
    s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  }
  return s * h / 3.0;
}

inline double normal_pdf(double x)
{
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

inline double normal_cdf(double x)
{
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

/// (E|g|^p)^(1/p) by quadrature.
inline double gaussian_pnorm_quadrature(double p)
{
  const double m = 2.0 * simpson([p](double x) { return std::pow(x, p) * normal_pdf(x); }, 0.0,
                                 40.0, 200000);
  return std::pow(m, 1.0 / p);
}

/// E max(g1, g2) = int x 2 phi(x) Phi(x) dx by quadrature.
inline double expected_max_two_gaussians()
{
  return simpson([](double x) { return 2.0 * x * normal_pdf(x) * normal_cdf(x); }, -12.0, 12.0);
}

inline Eigen::VectorXd gaussian_vector(Eigen::Index d, std::mt19937_64& rng)
{
  std::normal_distribution<double> normal;
  Eigen::VectorXd t(d);
  for (Eigen::Index i = 0; i < d; ++i)
  {
    t(i) = normal(rng);
  }
  return t;
}

}  // namespace oracle
