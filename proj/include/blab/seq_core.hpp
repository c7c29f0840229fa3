#pragma once

// Coordinate-vector primitives for canonical processes indexed by finite
// subsets of l2. Points are column vectors; a PointSet stores one point per
// column of a dense matrix. Coordinates beyond a point's dimension are zero.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace blab
{
using Index = Eigen::Index;
using Point = Eigen::VectorXd;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Derived>
bool is_finite_point(const Eigen::MatrixBase<Derived>& t)
{
  return t.size() >= 1 && t.allFinite();
}

template <typename Derived>
void require_valid_point(const Eigen::MatrixBase<Derived>& t)
{
  if (t.size() < 1)
  {
    throw std::invalid_argument("point must have dimension >= 1");
  }
  if (!t.allFinite())
  {
    throw std::invalid_argument("point has a non-finite coordinate");
  }
}

/// Absolute values of t sorted non-increasingly. Ties keep their original
/// index order.
template <typename Derived>
Vector<typename Derived::Scalar> rearrange_abs(const Eigen::MatrixBase<Derived>& t)
{
  using Scalar = typename Derived::Scalar;
  const Index d = t.size();
  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::abs(t(a)) > std::abs(t(b));
  });
  Vector<Scalar> out(d);
  for (Index i = 0; i < d; ++i)
  {
    out(i) = std::abs(t(order[static_cast<std::size_t>(i)]));
  }
  return out;
}

/// Componentwise min(|t_i|, r).
template <typename Derived>
Vector<typename Derived::Scalar> truncate_abs(const Eigen::MatrixBase<Derived>& t,
                                              typename Derived::Scalar r)
{
  if (!(r > 0))
  {
    throw std::invalid_argument("truncation level must be positive");
  }
  return t.cwiseAbs().cwiseMin(r);
}

template <typename Derived>
typename Derived::Scalar lp_norm(const Eigen::MatrixBase<Derived>& t, double p)
{
  using Scalar = typename Derived::Scalar;
  if (!(p >= 1.0))
  {
    throw std::invalid_argument("lp_norm requires p >= 1");
  }
  if (p == 1.0)
  {
    return t.cwiseAbs().sum();
  }
  if (p == 2.0)
  {
    return t.norm();
  }
  const Scalar scale = t.cwiseAbs().maxCoeff();
  if (scale == Scalar(0))
  {
    return Scalar(0);
  }
  Scalar acc(0);
  for (Index i = 0; i < t.size(); ++i)
  {
    acc += std::pow(std::abs(t(i)) / scale, Scalar(p));
  }
  return scale * std::pow(acc, Scalar(1.0 / p));
}

/// inf over |I| <= k of the l2 norm of t restricted to the complement of I.
/// Removing the k largest absolute coordinates attains the infimum.
template <typename Derived>
typename Derived::Scalar tail_l2_after_removal(const Eigen::MatrixBase<Derived>& t,
                                               Index k)
{
  using Scalar = typename Derived::Scalar;
  if (k < 0)
  {
    throw std::invalid_argument("removal count must be nonnegative");
  }
  const Index d = t.size();
  if (k >= d)
  {
    return Scalar(0);
  }
  const auto sorted = rearrange_abs(t);
  return sorted.tail(d - k).norm();
}

/// A finite index set T: distinct points of a common dimension, stored as the
/// columns of a matrix.
class PointSet
{
public:
  PointSet() = default;

  /// Takes points as columns. Throws on duplicates, empty input, or
  /// non-finite entries.
  explicit PointSet(Eigen::MatrixXd columns) : points_(std::move(columns))
  {
    if (points_.cols() < 1)
    {
      throw std::invalid_argument("point set must be nonempty");
    }
    if (points_.rows() < 1)
    {
      throw std::invalid_argument("point dimension must be >= 1");
    }
    if (!points_.allFinite())
    {
      throw std::invalid_argument("point set has a non-finite coordinate");
    }
    if (const auto dup = first_duplicate(points_); dup.first >= 0)
    {
      throw std::invalid_argument("duplicate points at indices " + std::to_string(dup.first) +
                                  " and " + std::to_string(dup.second));
    }
  }

  static PointSet from_points(const std::vector<Point>& pts)
  {
    if (pts.empty())
    {
      throw std::invalid_argument("point set must be nonempty");
    }
    const Index d = pts.front().size();
    Eigen::MatrixXd m(d, static_cast<Index>(pts.size()));
    for (std::size_t j = 0; j < pts.size(); ++j)
    {
      if (pts[j].size() != d)
      {
        throw std::invalid_argument("points do not share one dimension");
      }
      m.col(static_cast<Index>(j)) = pts[j];
    }
    return PointSet(std::move(m));
  }

  /// Drops repeated columns, keeping first occurrences in order.
  static PointSet deduplicated(const Eigen::MatrixXd& columns)
  {
    std::vector<Index> keep;
    for (Index j = 0; j < columns.cols(); ++j)
    {
      bool seen = false;
      for (const Index k : keep)
      {
        if (columns.col(k) == columns.col(j))
        {
          seen = true;
          break;
        }
      }
      if (!seen)
      {
        keep.push_back(j);
      }
    }
    Eigen::MatrixXd m(columns.rows(), static_cast<Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
    {
      m.col(static_cast<Index>(j)) = columns.col(keep[j]);
    }
    return PointSet(std::move(m));
  }

  Index size() const { return points_.cols(); }
  Index dim() const { return points_.rows(); }
  auto point(Index i) const { return points_.col(i); }
  const Eigen::MatrixXd& matrix() const { return points_; }

  bool operator==(const PointSet& other) const
  {
    return points_.rows() == other.points_.rows() && points_.cols() == other.points_.cols() &&
           points_ == other.points_;
  }

private:
  static std::pair<Index, Index> first_duplicate(const Eigen::MatrixXd& m)
  {
    for (Index a = 0; a < m.cols(); ++a)
    {
      for (Index b = a + 1; b < m.cols(); ++b)
      {
        if (m.col(a) == m.col(b))
        {
          return {a, b};
        }
      }
    }
    return {-1, -1};
  }

  Eigen::MatrixXd points_;
};

/// Pointwise pairing t -> f(t). image.col(i) is the image of domain.point(i).
/// The image need not be injective and may live in another dimension.
class PointMap
{
public:
  PointMap() = default;

  PointMap(PointSet domain, Eigen::MatrixXd image)
      : domain_(std::move(domain)), image_(std::move(image))
  {
    if (image_.cols() != domain_.size())
    {
      throw std::invalid_argument("image length must equal domain size");
    }
    if (image_.rows() < 1)
    {
      throw std::invalid_argument("image dimension must be >= 1");
    }
    if (!image_.allFinite())
    {
      throw std::invalid_argument("image has a non-finite coordinate");
    }
  }

  const PointSet& domain() const { return domain_; }
  const Eigen::MatrixXd& image() const { return image_; }
  auto image_of(Index i) const { return image_.col(i); }
  Index image_dim() const { return image_.rows(); }

  /// f(T) as a set; coinciding images collapse to one point.
  PointSet image_set() const { return PointSet::deduplicated(image_); }

  bool operator==(const PointMap& other) const
  {
    return domain_ == other.domain_ && image_.rows() == other.image_.rows() &&
           image_.cols() == other.image_.cols() && image_ == other.image_;
  }

private:
  PointSet domain_;
  Eigen::MatrixXd image_;
};

}  // namespace blab
