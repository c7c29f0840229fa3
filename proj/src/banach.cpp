#include "blab/banach.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "blab/rng.hpp"

namespace blab
{
namespace
{
constexpr std::uint64_t kStreamDirections = 0x64697273ULL;

// Scalar Bernoulli sum norm on the path fixed for the whole report.
MomentEstimate series_norm(const Eigen::VectorXd& coeffs, double p, int cap)
{
  return level_pnorm(coeffs, p, DistKind::bernoulli, cap);
}

Method path_method(Index terms, int cap)
{
  return terms <= cap ? Method::exact_enum : Method::hitczenko_surrogate;
}

// {+-(<phi, v_i>)_i : phi in F} as points of R^n.
PointSet dual_image(const Eigen::MatrixXd& functionals, const Eigen::MatrixXd& vs)
{
  const Eigen::MatrixXd images = vs * functionals.transpose();  // n x |F|
  Eigen::MatrixXd both(images.rows(), 2 * images.cols());
  both << images, -images;
  return PointSet::deduplicated(both);
}

// Sorted |sum c_i eps_i| over the whole sign cube.
std::vector<double> sorted_abs_atoms(const Eigen::VectorXd& c)
{
  auto atoms = detail::signed_partial_sums(c);
  for (auto& a : atoms)
  {
    a = std::abs(a);
  }
  std::sort(atoms.begin(), atoms.end());
  return atoms;
}

double prob_greater(const std::vector<double>& sorted, double u)
{
  const auto first = std::upper_bound(sorted.begin(), sorted.end(), u);
  return static_cast<double>(sorted.end() - first) / static_cast<double>(sorted.size());
}

}  // namespace

BanachModel::BanachModel(Eigen::MatrixXd functionals, Eigen::MatrixXd xs, Eigen::MatrixXd ys)
    : functionals_(std::move(functionals)), xs_(std::move(xs)), ys_(std::move(ys))
{
  const Index d = functionals_.cols();
  if (d < 1 || functionals_.rows() < 1)
  {
    throw std::invalid_argument("model needs d >= 1 and at least one functional");
  }
  if (xs_.rows() < 1 || xs_.rows() != ys_.rows())
  {
    throw std::invalid_argument("xs and ys must have the same positive length");
  }
  if (xs_.cols() != d || ys_.cols() != d)
  {
    throw std::invalid_argument("xs and ys must live in the model dimension");
  }
  if (!functionals_.allFinite() || !xs_.allFinite() || !ys_.allFinite())
  {
    throw std::invalid_argument("model has a non-finite entry");
  }
  if (numerical_rank(functionals_) != d)
  {
    throw std::invalid_argument("functionals must span the dual (rank d) for a genuine norm");
  }
}

double BanachModel::norm(const Eigen::Ref<const Eigen::VectorXd>& v) const
{
  return (functionals_ * v).cwiseAbs().maxCoeff();
}

bool BanachModel::operator==(const BanachModel& o) const
{
  const auto same = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
  };
  return same(functionals_, o.functionals_) && same(xs_, o.xs_) && same(ys_, o.ys_);
}

Index numerical_rank(const Eigen::MatrixXd& m, double rel_tol)
{
  if (m.size() == 0)
  {
    return 0;
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0)
  {
    return 0;
  }
  return (sv.array() > rel_tol * sv(0)).count();
}

Eigen::MatrixXd test_directions(const BanachModel& model, Index n_dirs, std::uint64_t seed)
{
  if (n_dirs < 0)
  {
    throw std::invalid_argument("n_dirs must be >= 0");
  }
  const Index d = model.dim();
  Eigen::MatrixXd dirs(model.functionals().rows() + n_dirs, d);
  dirs.topRows(model.functionals().rows()) = model.functionals();
  Rng rng = make_rng(seed, kStreamDirections);
  std::normal_distribution<double> normal;
  for (Index k = 0; k < n_dirs; ++k)
  {
    Eigen::VectorXd u(d);
    do
    {
      for (Index i = 0; i < d; ++i)
      {
        u(i) = normal(rng);
      }
    } while (u.norm() == 0.0);
    dirs.row(model.functionals().rows() + k) = u.normalized().transpose();
  }
  return dirs;
}

WeakReport weak_constant(const BanachModel& model, const std::vector<double>& p_grid,
                         Index n_dirs, std::uint64_t seed, int cap)
{
  if (p_grid.empty())
  {
    throw std::invalid_argument("p grid must be nonempty");
  }
  const Eigen::MatrixXd dirs = test_directions(model, n_dirs, seed);
  WeakReport out;
  out.method = path_method(model.terms(), cap);
  out.directions_tested = dirs.rows();
  out.p = p_grid.front();
  for (Index k = 0; k < dirs.rows(); ++k)
  {
    const Eigen::VectorXd a = model.xs() * dirs.row(k).transpose();
    const Eigen::VectorXd b = model.ys() * dirs.row(k).transpose();
    const bool b_zero = b.cwiseAbs().maxCoeff() == 0.0;
    const bool a_zero = a.cwiseAbs().maxCoeff() == 0.0;
    if (b_zero)
    {
      if (!a_zero && !out.infinite)
      {
        out.infinite = true;
        out.constant = std::numeric_limits<double>::infinity();
        out.direction = k;
        out.p = p_grid.front();
      }
      continue;
    }
    for (const double p : p_grid)
    {
      const double ratio = series_norm(a, p, cap).value / series_norm(b, p, cap).value;
      if (!out.infinite && ratio > out.constant)
      {
        out.constant = ratio;
        out.direction = k;
        out.p = p;
      }
    }
  }
  return out;
}

StrongRatio strong_ratio(const BanachModel& model, std::uint64_t samples, std::uint64_t seed,
                         int cap)
{
  const PointSet tx = dual_image(model.functionals(), model.xs());
  const PointSet ty = dual_image(model.functionals(), model.ys());
  StrongRatio out;
  if (model.terms() <= cap)
  {
    out.x_side = b_exact(tx, cap);
    out.y_side = b_exact(ty, cap);
  }
  else
  {
    out.x_side = b_mc(tx, samples, derive_seed(seed, 1));
    out.y_side = b_mc(ty, samples, derive_seed(seed, 2));
  }
  if (!(out.y_side.value > 0.0))
  {
    out.applicable = false;
    out.ratio = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.ratio = out.x_side.value / out.y_side.value;
  const double rx = out.x_side.value > 0.0 ? out.x_side.std_error / out.x_side.value : 0.0;
  const double ry = out.y_side.std_error / out.y_side.value;
  out.std_error = std::abs(out.ratio) * std::sqrt(rx * rx + ry * ry);
  return out;
}

OntoCheck q_onto_check(const BanachModel& model)
{
  OntoCheck out;
  out.rank = numerical_rank(model.ys());
  out.onto = out.rank == model.terms();
  return out;
}

Ole6Report ole6_constant(const BanachModel& model, const std::vector<double>& p_grid,
                         Index n_dirs, std::uint64_t seed, bool as_printed, int cap)
{
  if (p_grid.empty())
  {
    throw std::invalid_argument("p grid must be nonempty");
  }
  const Eigen::MatrixXd dirs = test_directions(model, n_dirs, seed);
  const Eigen::MatrixXd& rhs_vectors = as_printed ? model.xs() : model.ys();
  Ole6Report out;
  out.method = path_method(model.terms(), cap);
  out.p = p_grid.front();
  for (Index k = 0; k < dirs.rows(); ++k)
  {
    const Eigen::VectorXd a = truncate_abs(model.xs() * dirs.row(k).transpose(), 1.0);
    const Eigen::VectorXd b = truncate_abs(rhs_vectors * dirs.row(k).transpose(), 1.0);
    for (const double p : p_grid)
    {
      const double ratio = series_norm(a, p, cap).value / (p + series_norm(b, p, cap).value);
      if (ratio > out.constant)
      {
        out.constant = ratio;
        out.direction = k;
        out.p = p;
      }
    }
  }
  return out;
}

TailDomination tail_domination_constant(const BanachModel& model, const std::vector<double>& u_grid,
                                        Index n_dirs, std::uint64_t seed, int cap, double c_max)
{
  detail::require_cap(model.terms(), cap);
  const Eigen::MatrixXd dirs = test_directions(model, n_dirs, seed);
  TailDomination out;
  for (Index k = 0; k < dirs.rows() && !out.infinite; ++k)
  {
    const Eigen::VectorXd a = model.xs() * dirs.row(k).transpose();
    const Eigen::VectorXd b = model.ys() * dirs.row(k).transpose();
    const auto xa = sorted_abs_atoms(a);
    const auto yb = sorted_abs_atoms(b);
    const double unit = a.norm();
    for (const double rho : u_grid)
    {
      const double u = rho * unit;
      const double lhs = prob_greater(xa, u);
      // C * P(|Y| > u / C) is nondecreasing in C.
      const auto holds = [&](double c) { return lhs <= c * prob_greater(yb, u / c); };
      double need = 1.0;
      if (!holds(1.0))
      {
        if (!holds(c_max))
        {
          out.infinite = true;
          out.constant = std::numeric_limits<double>::infinity();
          out.direction = k;
          out.u = u;
          break;
        }
        double lo = 1.0;
        double hi = c_max;
        for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it)
        {
          const double mid = std::sqrt(lo * hi);
          (holds(mid) ? hi : lo) = mid;
        }
        need = hi;
      }
      if (need > out.constant)
      {
        out.constant = need;
        out.direction = k;
        out.u = u;
      }
    }
  }
  return out;
}

DominationReport domination_report(const BanachModel& model, const std::vector<double>& p_grid,
                                   Index n_dirs, std::uint64_t samples, std::uint64_t seed,
                                   int cap)
{
  DominationReport out;
  out.weak = weak_constant(model, p_grid, n_dirs, seed, cap);
  out.strong = strong_ratio(model, samples, seed, cap);
  if (out.weak.infinite || !(out.weak.constant > 0.0) || !out.strong.applicable)
  {
    out.k_ratio = 0.0;
    out.k_ratio_flagged = true;
  }
  else
  {
    out.k_ratio = out.strong.ratio / out.weak.constant;
  }
  return out;
}

}  // namespace blab
