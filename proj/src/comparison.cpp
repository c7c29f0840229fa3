#include "blab/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "blab/rng.hpp"

namespace blab
{
namespace
{
constexpr double kRelTol = 1e-12;

void require_pairs(const PointMap& f)
{
  if (f.domain().size() < 2)
  {
    throw std::invalid_argument("comparison needs |T| >= 2");
  }
}

void require_p_grid(const std::vector<double>& p_grid)
{
  if (p_grid.empty())
  {
    throw std::invalid_argument("p grid must be nonempty");
  }
  for (const double p : p_grid)
  {
    if (!is_positive_integer(p))
    {
      throw std::invalid_argument("p grid entries must be integers >= 1");
    }
  }
}

bool exact_fits(const PointMap& f, int cap)
{
  return f.domain().dim() <= cap && f.image_dim() <= cap;
}

double coeff_norm(const Eigen::VectorXd& coeffs, double p, bool exact, int cap)
{
  return exact ? exact_pnorm(coeffs, p, DistKind::bernoulli, cap).value : hitczenko(coeffs, p);
}

template <typename Visit>
void for_each_pair(Index n, Visit visit)
{
  for (Index s = 0; s < n; ++s)
  {
    for (Index t = s + 1; t < n; ++t)
    {
      visit(s, t);
    }
  }
}

}  // namespace

std::string_view to_string(ComparisonCondition c)
{
  switch (c)
  {
    case ComparisonCondition::lipschitz: return "lipschitz";
    case ComparisonCondition::ole1: return "ole1";
    case ComparisonCondition::ole2: return "ole2";
    case ComparisonCondition::mela: return "mela";
  }
  return "unknown";
}

ComparisonCondition parse_comparison_condition(std::string_view text)
{
  for (const auto c : {ComparisonCondition::lipschitz, ComparisonCondition::ole1,
                       ComparisonCondition::ole2, ComparisonCondition::mela})
  {
    if (text == to_string(c))
    {
      return c;
    }
  }
  throw std::invalid_argument("unknown comparison condition: " + std::string(text));
}

ComparisonReport lipschitz_constant(const PointMap& f)
{
  require_pairs(f);
  const Eigen::MatrixXd& x = f.domain().matrix();
  const Eigen::MatrixXd& y = f.image();
  ComparisonReport out;
  out.condition = ComparisonCondition::lipschitz;
  out.constant = -1.0;
  for_each_pair(x.cols(), [&](Index s, Index t) {
    const double ratio = (y.col(t) - y.col(s)).norm() / (x.col(t) - x.col(s)).norm();
    if (ratio > out.constant)
    {
      out.constant = ratio;
      out.s = s;
      out.t = t;
    }
  });
  return out;
}

ComparisonReport ole1_constant(const PointMap& f, const std::vector<double>& p_grid, int cap)
{
  require_pairs(f);
  require_p_grid(p_grid);
  const bool exact = exact_fits(f, cap);
  const Eigen::MatrixXd& x = f.domain().matrix();
  const Eigen::MatrixXd& y = f.image();
  ComparisonReport out;
  out.condition = ComparisonCondition::ole1;
  out.constant = -1.0;
  out.p_grid = p_grid;
  out.method = exact ? Method::exact_enum : Method::hitczenko_surrogate;
  for_each_pair(x.cols(), [&](Index s, Index t) {
    const Eigen::VectorXd dx = (x.col(t) - x.col(s)).cwiseAbs();
    const Eigen::VectorXd dy = (y.col(t) - y.col(s)).cwiseAbs();
    for (const double p : p_grid)
    {
      const double ratio = coeff_norm(dy, p, exact, cap) / coeff_norm(dx, p, exact, cap);
      if (ratio > out.constant)
      {
        out.constant = ratio;
        out.s = s;
        out.t = t;
        out.p = p;
      }
    }
  });
  return out;
}

std::vector<double> default_r_grid(const PointMap& f, int points)
{
  if (points < 1)
  {
    throw std::invalid_argument("r grid needs at least one point");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  const auto scan = [&](const Eigen::MatrixXd& m) {
    for_each_pair(m.cols(), [&](Index s, Index t) {
      for (Index i = 0; i < m.rows(); ++i)
      {
        const double a = std::abs(m(i, t) - m(i, s));
        if (a > 0.0)
        {
          lo = std::min(lo, a);
          hi = std::max(hi, a);
        }
      }
    });
  };
  scan(f.domain().matrix());
  scan(f.image());
  if (!(hi > 0.0))
  {
    return {1.0};
  }
  if (points == 1 || lo == hi)
  {
    return {hi};
  }
  std::vector<double> grid;
  const double step = std::log(hi / lo) / (points - 1);
  for (int k = 0; k < points; ++k)
  {
    grid.push_back(k == points - 1 ? hi : lo * std::exp(step * k));
  }
  return grid;
}

ComparisonReport ole2_constant(const PointMap& f, const std::vector<double>& p_grid,
                               std::vector<double> r_grid, int cap)
{
  require_pairs(f);
  require_p_grid(p_grid);
  if (r_grid.empty())
  {
    r_grid = default_r_grid(f);
  }
  for (const double r : r_grid)
  {
    if (!(r > 0.0) || !std::isfinite(r))
    {
      throw std::invalid_argument("r grid entries must be positive and finite");
    }
  }
  const bool exact = exact_fits(f, cap);
  const Eigen::MatrixXd& x = f.domain().matrix();
  const Eigen::MatrixXd& y = f.image();
  ComparisonReport out;
  out.condition = ComparisonCondition::ole2;
  out.constant = -1.0;
  out.p_grid = p_grid;
  out.r_grid = r_grid;
  out.method = exact ? Method::exact_enum : Method::hitczenko_surrogate;
  for_each_pair(x.cols(), [&](Index s, Index t) {
    const Eigen::VectorXd dx = x.col(t) - x.col(s);
    const Eigen::VectorXd dy = y.col(t) - y.col(s);
    for (const double r : r_grid)
    {
      const Eigen::VectorXd tx = truncate_abs(dx, r);
      const Eigen::VectorXd ty = truncate_abs(dy, r);
      for (const double p : p_grid)
      {
        const double ratio =
            coeff_norm(ty, p, exact, cap) / (r * p + coeff_norm(tx, p, exact, cap));
        if (ratio > out.constant)
        {
          out.constant = ratio;
          out.s = s;
          out.t = t;
          out.p = p;
          out.r = r;
        }
      }
    }
  });
  return out;
}

MelaResult mela_check(const PointMap& f, double C, int p_max)
{
  require_pairs(f);
  if (!(C >= 1.0) || !std::isfinite(C))
  {
    throw std::invalid_argument("mela check needs finite C >= 1");
  }
  if (p_max < 1)
  {
    throw std::invalid_argument("mela check needs p_max >= 1");
  }
  const Eigen::MatrixXd& x = f.domain().matrix();
  const Eigen::MatrixXd& y = f.image();
  MelaResult out;
  out.C = C;
  out.report.condition = ComparisonCondition::mela;
  out.report.constant = -1.0;
  for (int p = 1; p <= p_max; ++p)
  {
    out.report.p_grid.push_back(p);
  }
  for_each_pair(x.cols(), [&](Index s, Index t) {
    const Eigen::VectorXd dx = x.col(t) - x.col(s);
    const Eigen::VectorXd dy = y.col(t) - y.col(s);
    for (int p = 1; p <= p_max; ++p)
    {
      const auto removed = static_cast<Index>(std::floor(C * p));
      const double lhs = tail_l2_after_removal(dy, removed);
      const double rhs = tail_l2_after_removal(dx, p);
      const bool ok = lhs <= C * rhs * (1.0 + kRelTol);
      double ratio = 0.0;
      if (rhs > 0.0)
      {
        ratio = lhs / rhs;
      }
      else if (lhs > 0.0)
      {
        ratio = std::numeric_limits<double>::infinity();
      }
      out.pass = out.pass && ok;
      if (ratio > out.report.constant)
      {
        out.report.constant = ratio;
        out.report.s = s;
        out.report.t = t;
        out.report.p = p;
      }
    }
  });
  return out;
}

EmpiricalComparison empirical_comparison(const PointMap& f, DistKind kind, std::uint64_t samples,
                                         std::uint64_t seed, int cap)
{
  const PointSet& T = f.domain();
  const PointSet image = f.image_set();
  EmpiricalComparison out;
  if (kind == DistKind::bernoulli && exact_fits(f, cap))
  {
    out.domain = b_exact(T, cap);
    out.image = b_exact(image, cap);
  }
  else if (kind == DistKind::bernoulli)
  {
    out.domain = b_mc(T, samples, derive_seed(seed, 1));
    out.image = b_mc(image, samples, derive_seed(seed, 2));
  }
  else
  {
    out.domain = g_mc(T, samples, derive_seed(seed, 1));
    out.image = g_mc(image, samples, derive_seed(seed, 2));
  }
  if (!(out.domain.value > 0.0))
  {
    out.applicable = false;
    out.ratio = std::numeric_limits<double>::quiet_NaN();
    out.std_error = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.ratio = out.image.value / out.domain.value;
  const double a = out.image.std_error / out.domain.value;
  const double b = out.ratio * out.domain.std_error / out.domain.value;
  out.std_error = std::sqrt(a * a + b * b);
  return out;
}

PointMap identity_split(const PointSet& T)
{
  return {T, T.matrix()};
}

PointMap zero_split(const PointSet& T)
{
  return {T, Eigen::MatrixXd::Zero(T.dim(), T.size())};
}

PointMap soft_threshold_split(const PointSet& T, double theta)
{
  if (!(theta >= 0.0) || !std::isfinite(theta))
  {
    throw std::invalid_argument("threshold must be finite and >= 0");
  }
  const Eigen::MatrixXd& m = T.matrix();
  return {T, m.cwiseMin(theta).cwiseMax(-theta)};
}

double median_abs_coordinate(const PointSet& T)
{
  std::vector<double> a(T.matrix().data(), T.matrix().data() + T.matrix().size());
  for (auto& v : a)
  {
    v = std::abs(v);
  }
  std::sort(a.begin(), a.end());
  const std::size_t n = a.size();
  return n % 2 ? a[n / 2] : 0.5 * (a[n / 2 - 1] + a[n / 2]);
}

DecompositionReport decomposition_eval(const PointMap& pi, const SupEstimate& b_ref, int cap)
{
  const PointSet& T = pi.domain();
  if (pi.image_dim() != T.dim())
  {
    throw std::invalid_argument("decomposition map must keep the dimension");
  }
  DecompositionReport out{PointSet::deduplicated(T.matrix() - pi.image()),
                          PointSet::deduplicated(pi.image()),
                          {}, {}, 0.0, 0.0, 0.0, 0.0};

  const AdmissibleChain l1 = build_l1_chain(out.residual);
  out.residual_gamma = gamma_of_chain(out.residual, l1, DistKind::bernoulli, cap);
  const Index root = l1.levels[0].reps[0];
  for (Index t = 0; t < out.residual.size(); ++t)
  {
    out.l1_radius = std::max(
        out.l1_radius, (out.residual.point(t) - out.residual.point(root)).lpNorm<1>());
  }

  int depth = 1;
  while (level_capacity(depth) < static_cast<std::uint64_t>(out.kept.size()))
  {
    ++depth;
  }
  const AdmissibleChain greedy = build_greedy_chain(out.kept, DistKind::bernoulli, depth, cap);
  out.kept_gamma = gamma_of_chain(out.kept, greedy, DistKind::bernoulli, cap);

  out.total = out.residual_gamma.value + out.kept_gamma.value;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.lower_ratio = out.total > 0.0 ? b_ref.value / out.total : nan;
  out.upper_ratio = b_ref.value > 0.0 ? out.total / b_ref.value : nan;
  return out;
}

}  // namespace blab
