#include <cmath>

#include <doctest.h>

#include "blab/comparison.hpp"
#include "blab/instances.hpp"
#include "support/oracles.hpp"

using namespace blab;

namespace
{
const std::vector<double> kGrid = dyadic_p_grid(256);

PointSet square()
{
  Eigen::MatrixXd m(2, 2);
  m << 1, 1, 1, -1;
  return PointSet(m);
}

// |a|-weighted Bernoulli norm ratio for one pair, straight from the oracle.
double ole1_pair(const Eigen::VectorXd& fs, const Eigen::VectorXd& ft, const Eigen::VectorXd& s,
                 const Eigen::VectorXd& t, double p)
{
  return oracle::bernoulli_pnorm((ft - fs).cwiseAbs(), p) /
         oracle::bernoulli_pnorm((t - s).cwiseAbs(), p);
}
}  // namespace

TEST_SUITE("comparison")
{
  TEST_CASE("Lipschitz constants")
  {
    const PointSet T = random_set(4, 6, 1);
    CHECK(lipschitz_constant(identity_map(T)).constant == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(lipschitz_constant(scaled_map(T, 2.0)).constant == doctest::Approx(2.0).epsilon(1e-15));
    const PointMap project(square(), Eigen::MatrixXd::Ones(1, 2));
    CHECK(lipschitz_constant(project).constant == 0.0);
    CHECK(lipschitz_constant(lipschitz_map(T, 3)).constant <= 1.0 + 1e-12);
  }

  TEST_CASE("ole1 constants")
  {
    const PointSet T = random_set(5, 6, 2);
    CHECK(ole1_constant(identity_map(T), kGrid).constant == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ole1_constant(permutation_map(T, 4), kGrid).constant ==
          doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ole1_constant(scaled_map(T, 0.5), kGrid).constant ==
          doctest::Approx(0.5).epsilon(1e-15));
    const ComparisonReport r = ole1_constant(identity_map(T), kGrid);
    CHECK(r.method == Method::exact_enum);
    CHECK(r.p.has_value());
    CHECK(ole1_constant(identity_map(T), kGrid, 3).method == Method::hitczenko_surrogate);
  }

  TEST_CASE("oracle: ole1 witness value")
  {
    const PointSet T = random_set(4, 4, 5);
    const PointMap f = contraction_map(T, 6);
    const std::vector<double> grid{1, 2, 4};
    const ComparisonReport r = ole1_constant(f, grid);
    double best = 0.0;
    for (Index s = 0; s < T.size(); ++s)
    {
      for (Index t = s + 1; t < T.size(); ++t)
      {
        for (const double p : grid)
        {
          best = std::max(best, ole1_pair(f.image_of(s), f.image_of(t), T.point(s), T.point(t), p));
        }
      }
    }
    CHECK(r.constant == doctest::Approx(best).epsilon(1e-12));
    CHECK(r.constant <= 1.0 + 1e-12);
  }

  TEST_CASE("ole2 constants")
  {
    const PointSet T = random_set(4, 5, 7);
    const ComparisonReport id = ole2_constant(identity_map(T), kGrid);
    CHECK(id.constant <= 1.0);
    CHECK(id.constant > 0.0);
    CHECK(id.r_grid.size() == 8);
    const ComparisonReport big = ole2_constant(scaled_map(T, 1e3), {1, 2}, {1e6});
    CHECK(std::isfinite(big.constant));
    const std::vector<double> rg = default_r_grid(identity_map(T));
    CHECK(rg.size() == 8);
    CHECK(std::is_sorted(rg.begin(), rg.end()));
  }

  TEST_CASE("mela checks")
  {
    const PointSet T = random_set(6, 5, 8);
    CHECK(mela_check(identity_map(T), 1.0, 8).pass);
    CHECK(mela_check(scaled_map(T, 3.0), 3.0, 8).pass);
    CHECK_FALSE(mela_check(scaled_map(T, 3.0), 1.0, 8).pass);
    for (std::uint64_t seed = 1; seed <= 20; ++seed)
    {
      const PointSet S = random_set(1 + static_cast<Index>(seed % 8), 2 + static_cast<Index>(seed % 5), seed);
      CHECK(mela_check(contraction_map(S, seed), 1.0, 8).pass);
    }
    CHECK_THROWS_AS(mela_check(identity_map(random_set(2, 1, 1)), 1.0, 4), std::invalid_argument);
  }

  TEST_CASE("property: mela is monotone in C")
  {
    for (std::uint64_t seed = 1; seed <= 15; ++seed)
    {
      const PointSet T = random_set(5, 4, seed);
      const PointMap f = lipschitz_map(T, seed);
      bool passed = false;
      for (const double C : {1.0, 1.25, 1.5, 2.0, 3.0, 5.0, 10.0})
      {
        const bool now = mela_check(f, C, 8).pass;
        CHECK((!passed || now));
        passed = passed || now;
      }
    }
  }

  TEST_CASE("property: homogeneity of Lipschitz and ole1 constants")
  {
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
    {
      const PointSet T = random_set(4, 4, seed);
      const PointMap f = lipschitz_map(T, seed);
      const PointMap g(T, 2.5 * f.image());
      CHECK(lipschitz_constant(g).constant ==
            doctest::Approx(2.5 * lipschitz_constant(f).constant).epsilon(1e-12));
      CHECK(ole1_constant(g, kGrid).constant ==
            doctest::Approx(2.5 * ole1_constant(f, kGrid).constant).epsilon(1e-12));
    }
  }

  TEST_CASE("property: signed permutations are invisible")
  {
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
    {
      const PointSet T = random_set(6, 2 + static_cast<Index>(seed % 5), seed);
      const PointMap f = permutation_map(T, seed);
      CHECK(std::abs(lipschitz_constant(f).constant - 1.0) <= 1e-12);
      CHECK(std::abs(ole1_constant(f, kGrid).constant - 1.0) <= 1e-12);
      CHECK(mela_check(f, 1.0, 8).pass);
      const EmpiricalComparison e = empirical_comparison(f, DistKind::bernoulli, 1000, seed);
      CHECK(e.domain.method == Method::exact_enum);
      CHECK(std::abs(e.ratio - 1.0) <= 1e-12);
      CHECK(e.std_error == 0.0);
    }
  }

  TEST_CASE("empirical comparison")
  {
    const PointSet T = random_set(5, 6, 9);
    const EmpiricalComparison id = empirical_comparison(identity_map(T), DistKind::bernoulli, 1000, 1);
    CHECK(id.ratio == 1.0);
    CHECK(id.applicable);

    const PointSet lone = random_set(3, 1, 2);
    const EmpiricalComparison na = empirical_comparison(identity_map(lone), DistKind::bernoulli, 1000, 1);
    CHECK_FALSE(na.applicable);

    for (std::uint64_t seed = 1; seed <= 5; ++seed)
    {
      const PointSet S = random_set(4, 8, seed);
      const EmpiricalComparison g =
          empirical_comparison(lipschitz_map(S, seed), DistKind::gaussian, 200000, seed);
      CHECK(g.image.method == Method::monte_carlo);
      CHECK(g.ratio <= 1.0 + 4 * g.std_error);
    }
  }

  TEST_CASE("splits")
  {
    const PointSet T = random_set(4, 5, 10);
    CHECK(identity_split(T).image() == T.matrix());
    CHECK(zero_split(T).image().isZero());
    const double theta = median_abs_coordinate(T);
    const PointMap soft = soft_threshold_split(T, theta);
    CHECK(soft.image().cwiseAbs().maxCoeff() <= theta);
    CHECK(soft.image().cwiseProduct(T.matrix()).minCoeff() >= 0.0);
    CHECK_THROWS_AS(soft_threshold_split(T, -1.0), std::invalid_argument);

    Eigen::MatrixXd m(1, 3);
    m << 1, -3, 2;
    CHECK(median_abs_coordinate(PointSet(m)) == 2.0);
  }

  TEST_CASE("decomposition sandwich")
  {
    const PointSet T = random_set(5, 6, 11);
    const SupEstimate b = b_exact(T);

    const DecompositionReport id = decomposition_eval(identity_split(T), b);
    CHECK(id.residual.size() == 1);
    CHECK(id.residual_gamma.value == 0.0);
    CHECK(id.total == id.kept_gamma.value);
    CHECK(id.lower_ratio <= 10.0);

    const DecompositionReport zero = decomposition_eval(zero_split(T), b);
    CHECK(zero.kept.size() == 1);
    CHECK(zero.kept_gamma.value == 0.0);
    CHECK(zero.residual_gamma.value <= 2 * zero.l1_radius * (1 + 1e-12));
    CHECK(zero.lower_ratio <= 10.0);

    const DecompositionReport soft = decomposition_eval(soft_threshold_split(T, median_abs_coordinate(T)), b);
    CHECK(soft.total == doctest::Approx(soft.residual_gamma.value + soft.kept_gamma.value));
    CHECK(soft.lower_ratio * soft.upper_ratio == doctest::Approx(1.0));
    CHECK(soft.lower_ratio <= 10.0);
  }

  TEST_CASE("condition tags round-trip")
  {
    for (const auto c : {ComparisonCondition::lipschitz, ComparisonCondition::ole1,
                         ComparisonCondition::ole2, ComparisonCondition::mela})
    {
      CHECK(parse_comparison_condition(to_string(c)) == c);
    }
    CHECK_THROWS_AS(parse_comparison_condition("nope"), std::invalid_argument);
  }
}
