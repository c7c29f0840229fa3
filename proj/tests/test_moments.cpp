#include <cmath>
#include <random>

#include <doctest.h>

#include "blab/moments.hpp"
#include "support/oracles.hpp"

using namespace blab;

namespace
{
Eigen::VectorXd vec(std::initializer_list<double> xs)
{
  Eigen::VectorXd v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (const double x : xs)
  {
    v(i++) = x;
  }
  return v;
}
}  // namespace

TEST_SUITE("moments")
{
  TEST_CASE("exact p-norms: small cases")
  {
    CHECK(exact_pnorm(vec({1, 1}), 2, DistKind::bernoulli).value ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(exact_pnorm(vec({1, 1}), 4, DistKind::bernoulli).value ==
          doctest::Approx(std::pow(8.0, 0.25)).epsilon(1e-15));
    const MomentEstimate g = exact_pnorm(vec({3, 4}), 2, DistKind::gaussian);
    CHECK(g.value == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(g.method == Method::closed_form);
    CHECK(exact_pnorm(vec({1}), 1, DistKind::gaussian).value ==
          doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-14));
    CHECK(exact_pnorm(vec({0, 0, 0}), 3, DistKind::bernoulli).value == 0.0);
  }

  TEST_CASE("exact p-norms: errors")
  {
    CHECK_THROWS_AS(exact_pnorm(Eigen::VectorXd::Ones(21), 2, DistKind::bernoulli),
                    CapExceeded);
    CHECK_NOTHROW(exact_pnorm(Eigen::VectorXd::Ones(21), 2, DistKind::gaussian));
    CHECK_THROWS_AS(exact_pnorm(vec({1}), 0.9, DistKind::bernoulli), std::invalid_argument);
    CHECK_NOTHROW(exact_pnorm(Eigen::VectorXd::Ones(8), 2, DistKind::bernoulli, 8));
    CHECK_THROWS_AS(exact_pnorm(Eigen::VectorXd::Ones(9), 2, DistKind::bernoulli, 8),
                    CapExceeded);
  }

  TEST_CASE("oracle: enumeration matches a long-double sign loop")
  {
    std::mt19937_64 rng(21);
    for (int k = 0; k < 60; ++k)
    {
      const Eigen::VectorXd t = oracle::gaussian_vector(1 + k % 12, rng);
      for (const double p : {1.0, 1.5, 2.0, 3.0, 8.0})
      {
        CHECK(exact_pnorm(t, p, DistKind::bernoulli).value ==
              doctest::Approx(oracle::bernoulli_pnorm(t, p)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("oracle: Gaussian moment constant matches quadrature")
  {
    for (const double p : {1.0, 2.0, 3.0, 4.5, 8.0, 16.0})
    {
      CHECK(gaussian_abs_moment_norm(p) ==
            doctest::Approx(oracle::gaussian_pnorm_quadrature(p)).epsilon(1e-9));
    }
    CHECK(gaussian_abs_moment_norm(2.0) == 1.0);
  }

  TEST_CASE("large p does not overflow")
  {
    const Eigen::VectorXd t = Eigen::VectorXd::Constant(16, 100.0);
    const double v = exact_pnorm(t, 1024, DistKind::bernoulli).value;
    CHECK(std::isfinite(v));
    // The extreme atoms +-1600 carry mass 2^-15.
    CHECK(v == doctest::Approx(1600.0 * std::pow(2.0, -15.0 / 1024.0)).epsilon(1e-3));
  }

  TEST_CASE("Monte-Carlo moments")
  {
    const MomentEstimate one = mc_pnorm(vec({1, 0}), 2, DistKind::bernoulli, 1000, 3);
    CHECK(one.value == 1.0);
    CHECK(one.std_error == 0.0);

    const MomentEstimate b = mc_pnorm(vec({1, 1}), 2, DistKind::bernoulli, 100000, 5);
    CHECK(b.method == Method::monte_carlo);
    CHECK(std::abs(b.value - std::sqrt(2.0)) <= 4 * b.std_error);

    const MomentEstimate g = mc_pnorm(vec({2, 1}), 6, DistKind::gaussian, 100000, 6);
    const double closed = exact_pnorm(vec({2, 1}), 6, DistKind::gaussian).value;
    CHECK(std::abs(g.value - closed) <= 4 * g.std_error);

    CHECK_THROWS_AS(mc_pnorm(vec({1}), 2, DistKind::bernoulli, 99, 1), std::invalid_argument);
  }

  TEST_CASE("Monte-Carlo is reproducible and independent of worker count")
  {
    const Eigen::VectorXd t = vec({0.3, -1.2, 2.0, 0.7});
    const MomentEstimate a = mc_pnorm(t, 3, DistKind::gaussian, 50000, 9, 1);
    const MomentEstimate b = mc_pnorm(t, 3, DistKind::gaussian, 50000, 9, 4);
    const MomentEstimate c = mc_pnorm(t, 3, DistKind::gaussian, 50000, 9, 0);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
    CHECK(a.value == c.value);
    CHECK(mc_pnorm(t, 3, DistKind::gaussian, 50000, 10).value != a.value);
  }

  TEST_CASE("property: doubling samples shrinks the error by about 1/sqrt(2)")
  {
    const Eigen::VectorXd t = vec({1.0, 0.5, -0.25, 2.0});
    const double se1 = mc_pnorm(t, 2, DistKind::gaussian, 200000, 1).std_error;
    const double se2 = mc_pnorm(t, 2, DistKind::gaussian, 400000, 1).std_error;
    CHECK(se2 / se1 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.1));
  }

  TEST_CASE("rearrangement surrogate")
  {
    CHECK(hitczenko(vec({1, 0, 0}), 3) == 1.0);
    CHECK(hitczenko(vec({1, 1, 1, 1}), 2) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(hitczenko(vec({5, 3, 1}), 1) == doctest::Approx(5 + std::sqrt(10.0)).epsilon(1e-15));
    CHECK_THROWS_AS(hitczenko(vec({1}), 1.5), std::invalid_argument);
    CHECK_THROWS_AS(hitczenko(vec({1}), 0), std::invalid_argument);
    CHECK(hitczenko_trunc(vec({3, -1}), 2, 1) == 3.0);
    CHECK(hitczenko_trunc(vec({1, 1}), 10, 2) == 2.0);
    CHECK(hitczenko_trunc(vec({4}), 1, 5) == 1.0);
    CHECK_THROWS_AS(hitczenko_trunc(vec({4}), 0, 1), std::invalid_argument);
  }

  TEST_CASE("tail check")
  {
    const TailCheck one = tail_prob_check(vec({1}), 1);
    CHECK(one.prob == 0.0);
    CHECK(one.bound == doctest::Approx(std::exp(-1.0)));
    CHECK(one.pass);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(4);
    const TailCheck four = tail_prob_check(ones, 2);
    CHECK(four.pass);
    CHECK(four.prob == oracle::bernoulli_tail(ones, std::exp(1.0) * 2.0));
    std::mt19937_64 rng(31);
    for (int k = 0; k < 50; ++k)
    {
      const Eigen::VectorXd t = oracle::gaussian_vector(12, rng);
      for (const double p : {1.0, 2.0, 4.0})
      {
        const TailCheck c = tail_prob_check(t, p);
        CHECK(c.pass);
        CHECK(c.prob ==
              oracle::bernoulli_tail(t, std::exp(1.0) * oracle::bernoulli_pnorm(t, p)));
      }
    }
    CHECK_THROWS_AS(tail_prob_check(Eigen::VectorXd::Ones(21), 2), CapExceeded);
  }

  TEST_CASE("reverse tail candidate is reported, not asserted")
  {
    const double kappa = reverse_tail_kappa(vec({1, 2, 3}), 2);
    CHECK(kappa >= 1.0);
    CHECK(std::isfinite(kappa));
  }

  TEST_CASE("property: second moment, monotonicity in p, homogeneity")
  {
    std::mt19937_64 rng(41);
    for (int k = 0; k < 80; ++k)
    {
      const Eigen::VectorXd t = oracle::gaussian_vector(1 + k % 14, rng);
      CHECK(std::abs(exact_pnorm(t, 2, DistKind::bernoulli).value - t.norm()) <= 1e-10);
      double prev_b = 0.0;
      double prev_g = 0.0;
      for (const double p : {1.0, 2.0, 3.0, 4.0, 8.0, 16.0})
      {
        const double b = exact_pnorm(t, p, DistKind::bernoulli).value;
        const double g = exact_pnorm(t, p, DistKind::gaussian).value;
        const double h = hitczenko(t, p);
        CHECK(b >= prev_b * (1 - 1e-12));
        CHECK(g >= prev_g * (1 - 1e-12));
        prev_b = b;
        prev_g = g;
        const double ratio = b / h;
        CHECK(ratio >= 0.2);
        CHECK(ratio <= 5.0);
      }
      const double lambda = 3.7;
      const Eigen::VectorXd s = lambda * t;
      CHECK(exact_pnorm(s, 3, DistKind::bernoulli).value ==
            doctest::Approx(lambda * exact_pnorm(t, 3, DistKind::bernoulli).value)
                .epsilon(1e-12));
      CHECK(hitczenko(s, 2) == doctest::Approx(lambda * hitczenko(t, 2)).epsilon(1e-12));
      CHECK(hitczenko_trunc(s, lambda * 0.5, 2) ==
            doctest::Approx(lambda * hitczenko_trunc(t, 0.5, 2)).epsilon(1e-12));
      const TailCheck a = tail_prob_check(t, 2);
      const TailCheck c = tail_prob_check(s, 2);
      CHECK(a.pass == c.pass);
      CHECK(a.prob == doctest::Approx(c.prob));
    }
  }

  TEST_CASE("the surrogate is not monotone in p")
  {
    // Moving a coordinate into the head swaps sqrt(p) * tail for a plain sum.
    const Eigen::VectorXd t = vec({1.2, -0.3, 0.7});
    CHECK(hitczenko(t, 2) == doctest::Approx(1.9 + std::sqrt(2.0) * 0.3).epsilon(1e-15));
    CHECK(hitczenko(t, 3) == doctest::Approx(2.2).epsilon(1e-15));
    CHECK(hitczenko(t, 3) < hitczenko(t, 2));
    // Both sides still track the exact norm, which is monotone.
    CHECK(exact_pnorm(t, 3, DistKind::bernoulli).value >= exact_pnorm(t, 2, DistKind::bernoulli).value);
  }

  TEST_CASE("level norms switch to the surrogate above the cap")
  {
    const Eigen::VectorXd t = Eigen::VectorXd::Ones(6);
    CHECK(level_pnorm(t, 4, DistKind::bernoulli, 8).method == Method::exact_enum);
    const MomentEstimate s = level_pnorm(t, 4, DistKind::bernoulli, 4);
    CHECK(s.method == Method::hitczenko_surrogate);
    CHECK(s.value == hitczenko(t, 4));
    CHECK(level_pnorm(t, 4, DistKind::gaussian, 4).method == Method::closed_form);
  }

  TEST_CASE("tags round-trip")
  {
    for (const Method m : {Method::exact_enum, Method::closed_form, Method::monte_carlo,
                           Method::hitczenko_surrogate})
    {
      CHECK(parse_method(to_string(m)) == m);
    }
    CHECK(parse_dist_kind("gaussian") == DistKind::gaussian);
    CHECK_THROWS_AS(parse_dist_kind("cauchy"), std::invalid_argument);
    CHECK(dyadic_p_grid(8) == std::vector<double>{1, 2, 4, 8});
  }
}
