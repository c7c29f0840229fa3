#include <algorithm>
#include <random>

#include <doctest.h>

#include "blab/seq_core.hpp"
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

TEST_SUITE("seq_core")
{
  TEST_CASE("rearrange_abs sorts magnitudes")
  {
    CHECK(rearrange_abs(vec({3, -4, 0, 1})) == vec({4, 3, 1, 0}));
    CHECK(rearrange_abs(vec({0, 0})) == vec({0, 0}));
    CHECK(rearrange_abs(vec({1, 1, 1})) == vec({1, 1, 1}));
  }

  TEST_CASE("truncate_abs")
  {
    CHECK(truncate_abs(vec({3, -1}), 2.0) == vec({2, 1}));
    CHECK(truncate_abs(vec({0.5}), 1.0) == vec({0.5}));
    CHECK(truncate_abs(vec({-5, 5}), 5.0) == vec({5, 5}));
    CHECK_THROWS_AS(truncate_abs(vec({1}), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(truncate_abs(vec({1}), -1.0), std::invalid_argument);
  }

  TEST_CASE("lp_norm")
  {
    CHECK(lp_norm(vec({3, 4}), 2) == 5.0);
    CHECK(lp_norm(vec({1, -1, 1}), 1) == 3.0);
    CHECK(lp_norm(vec({2}), 7) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS(lp_norm(vec({1}), 0.5), std::invalid_argument);
  }

  TEST_CASE("tail_l2_after_removal")
  {
    CHECK(tail_l2_after_removal(vec({3, 4}), 1) == 3.0);
    CHECK(tail_l2_after_removal(vec({1, 1, 1, 1}), 0) == 2.0);
    CHECK(tail_l2_after_removal(vec({5, 2, 1}), 3) == 0.0);
    CHECK_THROWS_AS(tail_l2_after_removal(vec({1}), -1), std::invalid_argument);
  }

  TEST_CASE("point validation")
  {
    CHECK_THROWS_AS(require_valid_point(Eigen::VectorXd()), std::invalid_argument);
    CHECK_THROWS_AS(require_valid_point(vec({1, NAN})), std::invalid_argument);
    CHECK_THROWS_AS(require_valid_point(vec({INFINITY})), std::invalid_argument);
    CHECK_NOTHROW(require_valid_point(vec({0})));
  }

  TEST_CASE("point sets reject duplicates and bad shapes")
  {
    Eigen::MatrixXd m(2, 3);
    m << 1, 2, 1, 0, 0, 0;
    CHECK_THROWS_AS(PointSet{m}, std::invalid_argument);
    CHECK_THROWS_AS(PointSet{Eigen::MatrixXd(2, 0)}, std::invalid_argument);
    CHECK_THROWS_AS(PointSet::from_points({vec({1}), vec({1, 2})}), std::invalid_argument);
    const PointSet dedup = PointSet::deduplicated(m);
    CHECK(dedup.size() == 2);
    CHECK(dedup.point(1) == vec({2, 0}));
  }

  TEST_CASE("point maps may change dimension and merge points")
  {
    const PointSet T = PointSet::from_points({vec({1, 1}), vec({1, -1})});
    Eigen::MatrixXd image(1, 2);
    image << 1, 1;
    const PointMap f(T, image);
    CHECK(f.image_dim() == 1);
    CHECK(f.image_set().size() == 1);
    CHECK_THROWS_AS(PointMap(T, Eigen::MatrixXd(1, 3)), std::invalid_argument);
  }

  TEST_CASE("property: rearrangement is idempotent and permutation invariant")
  {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 200; ++k)
    {
      const Eigen::VectorXd t = oracle::gaussian_vector(1 + k % 9, rng);
      const Eigen::VectorXd r = rearrange_abs(t);
      CHECK(rearrange_abs(r) == r);
      Eigen::VectorXd shuffled = t;
      std::shuffle(shuffled.data(), shuffled.data() + shuffled.size(), rng);
      CHECK(rearrange_abs(shuffled) == r);
      CHECK(std::is_sorted(r.data(), r.data() + r.size(), std::greater<>()));
    }
  }

  TEST_CASE("property: tails, truncation and norm ordering")
  {
    std::mt19937_64 rng(12);
    for (int k = 0; k < 200; ++k)
    {
      const Index d = 1 + k % 10;
      const Eigen::VectorXd t = oracle::gaussian_vector(d, rng);
      double previous = INFINITY;
      for (Index m = 0; m <= d + 1; ++m)
      {
        const double tail = tail_l2_after_removal(t, m);
        CHECK(tail <= previous);
        previous = tail;
        Eigen::VectorXd zeroed = rearrange_abs(t);
        zeroed.head(std::min(m, d)).setZero();
        CHECK(tail == doctest::Approx(lp_norm(zeroed, 2)).epsilon(1e-14));
      }
      CHECK(truncate_abs(t, t.cwiseAbs().maxCoeff()) == t.cwiseAbs());
      double last = INFINITY;
      for (const double p : {1.0, 1.5, 2.0, 3.0, 7.0, 20.0})
      {
        const double n = lp_norm(t, p);
        CHECK(n <= last * (1 + 1e-14));
        last = n;
      }
    }
  }
}
