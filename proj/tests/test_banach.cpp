#include <cmath>

#include <doctest.h>

#include "blab/banach.hpp"
#include "blab/instances.hpp"
#include "support/oracles.hpp"

using namespace blab;

namespace
{
const std::vector<double> kGrid = dyadic_p_grid(64);

BanachModel sup_norm_model(Index d, Eigen::MatrixXd xs, Eigen::MatrixXd ys)
{
  return BanachModel(Eigen::MatrixXd::Identity(d, d), std::move(xs), std::move(ys));
}

// E max over +-F of <phi, sum eps_i v_i>, by looping over signs.
double strong_oracle(const Eigen::MatrixXd& F, const Eigen::MatrixXd& vs)
{
  const Index n = vs.rows();
  const std::uint64_t atoms = std::uint64_t{1} << n;
  long double acc = 0.0L;
  for (std::uint64_t m = 0; m < atoms; ++m)
  {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(vs.cols());
    for (Index i = 0; i < n; ++i)
    {
      sum += ((m >> i) & 1U ? -1.0 : 1.0) * vs.row(i).transpose();
    }
    acc += (F * sum).cwiseAbs().maxCoeff();
  }
  return static_cast<double>(acc / atoms);
}
}  // namespace

TEST_SUITE("banach")
{
  TEST_CASE("model construction")
  {
    CHECK_THROWS_AS(BanachModel(Eigen::MatrixXd::Ones(1, 2), Eigen::MatrixXd::Ones(1, 2),
                                Eigen::MatrixXd::Ones(1, 2)),
                    std::invalid_argument);
    CHECK_THROWS_AS(sup_norm_model(2, Eigen::MatrixXd::Ones(2, 2), Eigen::MatrixXd::Ones(3, 2)),
                    std::invalid_argument);
    CHECK_THROWS_AS(sup_norm_model(2, Eigen::MatrixXd::Ones(2, 3), Eigen::MatrixXd::Ones(2, 3)),
                    std::invalid_argument);
    const BanachModel m = sup_norm_model(2, Eigen::MatrixXd::Ones(1, 2), Eigen::MatrixXd::Ones(1, 2));
    Eigen::Vector2d v(3, -4);
    CHECK(m.norm(v) == 4.0);
  }

  TEST_CASE("weak constants: exact cases")
  {
    const BanachModel base = random_banach_model(3, 6, 2, 1);
    const WeakReport same = weak_constant(base.with_xs(base.ys()), kGrid, 8, 2);
    CHECK(same.constant == 1.0);
    CHECK_FALSE(same.infinite);
    CHECK(same.method == Method::exact_enum);
    CHECK(same.directions_tested == base.functionals().rows() + 8);
    const WeakReport half = weak_constant(base.with_xs(0.5 * base.ys()), kGrid, 8, 2);
    CHECK(half.constant == 0.5);
  }

  TEST_CASE("weak constants: zero denominators")
  {
    Eigen::MatrixXd ys = Eigen::MatrixXd::Zero(2, 2);
    ys(0, 0) = 1;
    ys(1, 0) = 1;
    const Eigen::MatrixXd xs = Eigen::MatrixXd::Identity(2, 2);
    const WeakReport w = weak_constant(sup_norm_model(2, xs, ys), kGrid, 0, 1);
    CHECK(w.infinite);
    CHECK(std::isinf(w.constant));
  }

  TEST_CASE("oracle: orthogonal images")
  {
    // ys = basis, xs = rotated basis: per direction both sides are Bernoulli
    // sums, so the ratio is the oracle's moment ratio.
    const double a = 0.6;
    const double b = 0.8;
    Eigen::Matrix2d Q;
    Q << a, -b, b, a;
    const BanachModel m = sup_norm_model(2, Q, Eigen::Matrix2d::Identity());
    const WeakReport w = weak_constant(m, {1, 2, 4}, 0, 1);
    double best = 0.0;
    for (Index k = 0; k < 2; ++k)
    {
      const Eigen::Vector2d phi = Eigen::Matrix2d::Identity().row(k).transpose();
      for (const double p : {1.0, 2.0, 4.0})
      {
        best = std::max(best, oracle::bernoulli_pnorm(Q * phi, p) /
                                  oracle::bernoulli_pnorm(phi, p));
      }
    }
    CHECK(w.constant == doctest::Approx(best).epsilon(1e-12));
    // Atoms +-1.4 and +-0.2 at p = 4.
    CHECK(w.constant == doctest::Approx(std::pow((std::pow(1.4, 4) + std::pow(0.2, 4)) / 2, 0.25)).epsilon(1e-12));
  }

  TEST_CASE("strong ratios")
  {
    const BanachModel base = random_banach_model(3, 6, 2, 3);
    const StrongRatio same = strong_ratio(base.with_xs(base.ys()), 1000, 1);
    CHECK(same.ratio == 1.0);
    CHECK(same.std_error == 0.0);
    CHECK(same.x_side.method == Method::exact_enum);
    CHECK(strong_ratio(base.with_xs(0.5 * base.ys()), 1000, 1).ratio == 0.5);

    const BanachModel cube = sup_norm_model(2, Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Identity());
    CHECK(strong_ratio(cube, 1000, 1).y_side.value == 1.0);

    CHECK(base.ys().rows() == 6);
    CHECK(strong_ratio(base, 1000, 1).x_side.value ==
          doctest::Approx(strong_oracle(base.functionals(), base.xs())).epsilon(1e-12));

    const StrongRatio mc = strong_ratio(base, 100000, 4, 3);
    CHECK(mc.x_side.method == Method::monte_carlo);
    CHECK(std::abs(mc.x_side.value - strong_oracle(base.functionals(), base.xs())) <=
          4 * mc.x_side.std_error);

    const BanachModel zero_y = base.with_xs(base.xs());
    const BanachModel flat(base.functionals(), base.xs(), Eigen::MatrixXd::Zero(6, 3));
    CHECK_FALSE(strong_ratio(flat, 1000, 1).applicable);
    CHECK(zero_y == base);
  }

  TEST_CASE("onto checks")
  {
    Eigen::MatrixXd ys = Eigen::MatrixXd::Zero(2, 3);
    ys(0, 0) = 1;
    ys(1, 1) = 1;
    const BanachModel e12(Eigen::MatrixXd::Identity(3, 3), ys, ys);
    CHECK(q_onto_check(e12).onto);
    CHECK(q_onto_check(e12).rank == 2);

    Eigen::MatrixXd collinear = Eigen::MatrixXd::Zero(2, 2);
    collinear(0, 0) = 1;
    collinear(1, 0) = 2;
    const OntoCheck c = q_onto_check(sup_norm_model(2, collinear, collinear));
    CHECK_FALSE(c.onto);
    CHECK(c.rank == 1);

    for (std::uint64_t seed = 1; seed <= 20; ++seed)
    {
      const Index d = 2 + static_cast<Index>(seed % 5);
      const BanachModel m = random_banach_model(d, 1 + static_cast<Index>(seed % d), 3, seed);
      CHECK(q_onto_check(m).onto);
    }
    CHECK(numerical_rank(Eigen::MatrixXd::Zero(3, 3)) == 0);
  }

  TEST_CASE("ole6 constants")
  {
    const BanachModel base = random_banach_model(3, 6, 2, 5);
    CHECK(ole6_constant(base.with_xs(base.ys()), kGrid, 8, 1).constant <= 1.0);
    CHECK(ole6_constant(base, kGrid, 8, 1, true).constant <= 1.0);

    // Tiny xs against vanishing ys: the cushion p dominates.
    const BanachModel tiny(base.functionals(), 1e-3 * base.xs(), Eigen::MatrixXd::Zero(6, 3));
    const Ole6Report r = ole6_constant(tiny, kGrid, 8, 1);
    CHECK(std::isfinite(r.constant));
    CHECK(r.constant > 0.0);
    CHECK(r.constant < 1e-2);
  }

  TEST_CASE("tail domination")
  {
    const BanachModel base = random_banach_model(3, 8, 2, 6);
    const std::vector<double> u{0.25, 0.5, 1.0, 1.5};
    const TailDomination same = tail_domination_constant(base.with_xs(base.ys()), u, 4, 1);
    CHECK(same.constant == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_FALSE(same.infinite);
    const TailDomination half = tail_domination_constant(base.with_xs(0.5 * base.ys()), u, 4, 1);
    CHECK(half.constant == doctest::Approx(1.0).epsilon(1e-6));
    const TailDomination twice = tail_domination_constant(base.with_xs(2.0 * base.ys()), u, 4, 1);
    CHECK(twice.constant > 1.0);
    CHECK(twice.constant <= 2.0 * (1 + 1e-6));
  }

  TEST_CASE("domination report")
  {
    const BanachModel base = random_banach_model(3, 6, 2, 7);
    const DominationReport same = domination_report(base.with_xs(base.ys()), kGrid, 8, 1000, 1);
    CHECK(same.weak.constant == 1.0);
    CHECK(same.strong.ratio == 1.0);
    CHECK(same.k_ratio == 1.0);
    CHECK_FALSE(same.k_ratio_flagged);

    Eigen::MatrixXd ys = Eigen::MatrixXd::Zero(2, 2);
    ys.col(0).setOnes();
    const DominationReport inf =
        domination_report(sup_norm_model(2, Eigen::Matrix2d::Identity(), ys), kGrid, 0, 1000, 1);
    CHECK(inf.weak.infinite);
    CHECK(inf.k_ratio == 0.0);
    CHECK(inf.k_ratio_flagged);
  }

  TEST_CASE("property: scaling, sign flips and permutations of the terms")
  {
    for (std::uint64_t seed = 1; seed <= 8; ++seed)
    {
      const BanachModel m = random_banach_model(3, 5, 2, seed);
      const DominationReport r = domination_report(m, kGrid, 6, 1000, seed);

      const double lambda = 1.75;
      const DominationReport s = domination_report(m.with_xs(lambda * m.xs()), kGrid, 6, 1000, seed);
      CHECK(s.weak.constant == doctest::Approx(lambda * r.weak.constant).epsilon(1e-12));
      CHECK(s.strong.ratio == doctest::Approx(lambda * r.strong.ratio).epsilon(1e-12));
      CHECK(s.k_ratio == doctest::Approx(r.k_ratio).epsilon(1e-12));

      const DominationReport neg = domination_report(m.with_xs(-m.xs()), kGrid, 6, 1000, seed);
      CHECK(neg.weak.constant == doctest::Approx(r.weak.constant).epsilon(1e-12));
      CHECK(neg.strong.ratio == doctest::Approx(r.strong.ratio).epsilon(1e-12));

      Eigen::PermutationMatrix<Eigen::Dynamic> perm(5);
      perm.setIdentity();
      std::swap(perm.indices()(0), perm.indices()(3));
      std::swap(perm.indices()(1), perm.indices()(4));
      const BanachModel shuffled(m.functionals(), perm * m.xs(), perm * m.ys());
      const DominationReport p = domination_report(shuffled, kGrid, 6, 1000, seed);
      CHECK(p.weak.constant == doctest::Approx(r.weak.constant).epsilon(1e-12));
      CHECK(p.strong.ratio == doctest::Approx(r.strong.ratio).epsilon(1e-12));
      CHECK(p.k_ratio == doctest::Approx(r.k_ratio).epsilon(1e-12));
    }
  }

  TEST_CASE("test directions")
  {
    const BanachModel m = random_banach_model(4, 3, 2, 9);
    const Eigen::MatrixXd dirs = test_directions(m, 5, 1);
    CHECK(dirs.rows() == m.functionals().rows() + 5);
    CHECK(dirs.topRows(m.functionals().rows()) == m.functionals());
    for (Index k = m.functionals().rows(); k < dirs.rows(); ++k)
    {
      CHECK(dirs.row(k).norm() == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(test_directions(m, 5, 1) == dirs);
    CHECK(test_directions(m, 5, 2) != dirs);
  }
}
