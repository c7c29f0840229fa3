#include "blab/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "blab/rng.hpp"

namespace blab
{
namespace
{
enum Stream : std::uint64_t
{
  kStreamSet = 0x5e7,
  kStreamLipschitz = 0x11b,
  kStreamContraction = 0xc07,
  kStreamPermutation = 0x9e5,
  kStreamModel = 0xba5,
  kStreamFixture = 0xf1c,
  kStreamMutation = 0x307,
};

Eigen::MatrixXd gaussian_matrix(Index rows, Index cols, Rng& rng)
{
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(rows, cols);
  // Column-major fill order is part of the seed contract.
  for (Index j = 0; j < cols; ++j)
  {
    for (Index i = 0; i < rows; ++i)
    {
      m(i, j) = normal(rng);
    }
  }
  return m;
}

Eigen::VectorXd unit_vector(Index dim, Rng& rng)
{
  Eigen::VectorXd u;
  do
  {
    u = gaussian_matrix(dim, 1, rng).col(0);
  } while (u.norm() == 0.0);
  return u / u.norm();
}

double uniform(Rng& rng, double lo, double hi)
{
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

PointSet random_set(Index dim, Index size, std::uint64_t seed)
{
  if (dim < 1 || size < 1)
  {
    throw std::invalid_argument("random_set needs dim >= 1 and size >= 1");
  }
  Rng rng = make_rng(seed, kStreamSet);
  return PointSet(gaussian_matrix(dim, size, rng));
}

PointMap identity_map(const PointSet& T)
{
  return {T, T.matrix()};
}

PointMap scaled_map(const PointSet& T, double factor)
{
  if (!std::isfinite(factor))
  {
    throw std::invalid_argument("scale factor must be finite");
  }
  return {T, factor * T.matrix()};
}

PointMap lipschitz_map(const PointSet& T, std::uint64_t seed)
{
  Rng rng = make_rng(seed, kStreamLipschitz);
  const Index d = T.dim();
  Eigen::MatrixXd A = gaussian_matrix(d, d, rng);
  const double op = Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues()(0);
  A *= uniform(rng, 0.5, 1.0) / op;
  Eigen::MatrixXd image = A * T.matrix();
  std::bernoulli_distribution bend(0.5);
  for (Index i = 0; i < d; ++i)
  {
    if (bend(rng))
    {
      image.row(i) = image.row(i).array().tanh().matrix();
    }
  }
  return {T, std::move(image)};
}

PointMap contraction_map(const PointSet& T, std::uint64_t seed)
{
  Rng rng = make_rng(seed, kStreamContraction);
  const Index d = T.dim();
  std::uniform_int_distribution<int> pick(0, 4);
  Eigen::MatrixXd image(d, T.size());
  for (Index i = 0; i < d; ++i)
  {
    const int shape = pick(rng);
    const double lambda = uniform(rng, -1.0, 1.0);
    for (Index t = 0; t < T.size(); ++t)
    {
      const double x = T.matrix()(i, t);
      double y = x;
      switch (shape)
      {
        case 1: y = std::tanh(x); break;
        case 2: y = std::clamp(x, -1.0, 1.0); break;
        case 3: y = std::abs(x); break;
        case 4: y = std::sin(x); break;
        default: break;
      }
      image(i, t) = lambda * y;
    }
  }
  return {T, std::move(image)};
}

PointMap permutation_map(const PointSet& T, std::uint64_t seed, bool sign_flips)
{
  Rng rng = make_rng(seed, kStreamPermutation);
  const Index d = T.dim();
  std::vector<Index> perm(static_cast<std::size_t>(d));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  std::bernoulli_distribution flip(0.5);
  Eigen::MatrixXd image(d, T.size());
  for (Index i = 0; i < d; ++i)
  {
    const double sign = sign_flips && flip(rng) ? -1.0 : 1.0;
    image.row(i) = sign * T.matrix().row(perm[static_cast<std::size_t>(i)]);
  }
  return {T, std::move(image)};
}

BanachModel random_banach_model(Index d, Index n, Index extra_functionals, std::uint64_t seed)
{
  if (d < 1 || n < 1 || extra_functionals < 0)
  {
    throw std::invalid_argument("banach model needs d >= 1, n >= 1, extra >= 0");
  }
  Rng rng = make_rng(seed, kStreamModel);
  Eigen::MatrixXd F(d + extra_functionals, d);
  F.topRows(d).setIdentity();
  F.bottomRows(extra_functionals) = gaussian_matrix(extra_functionals, d, rng);
  Eigen::MatrixXd xs = gaussian_matrix(n, d, rng);
  Eigen::MatrixXd ys = gaussian_matrix(n, d, rng);
  return {std::move(F), std::move(xs), std::move(ys)};
}

CertificateFixture certificate_fixture(int depth, Index dim, std::uint64_t seed, double r,
                                       double M)
{
  if (depth < 1 || dim < 1 || !(r > 1.0) || !(M >= 1.0))
  {
    throw std::invalid_argument("certificate fixture needs depth >= 1, dim >= 1, r > 1, M >= 1");
  }
  Rng rng = make_rng(seed, kStreamFixture);
  const auto radius = [&](int j) { return 0.5 * std::sqrt(M) * std::pow(r, -j); };

  struct Node
  {
    Index rep;
    int scale;
    Index parent;
  };
  std::vector<Eigen::VectorXd> pts{gaussian_matrix(dim, 1, rng).col(0)};
  std::vector<std::vector<Node>> tree(1);
  tree[0].push_back({0, std::uniform_int_distribution<int>(-1, 1)(rng), -1});

  std::bernoulli_distribution split(0.75);
  std::uniform_int_distribution<int> jump(1, 2);
  for (int n = 1; n <= depth; ++n)
  {
    std::vector<Node> next;
    const auto& up = tree[static_cast<std::size_t>(n - 1)];
    for (std::size_t a = 0; a < up.size(); ++a)
    {
      const Node& node = up[a];
      next.push_back({node.rep, node.scale, static_cast<Index>(a)});
      if ((n == 1 && a == 0) || split(rng))
      {
        const int j = node.scale + jump(rng);
        const double reach = uniform(rng, 0.3, 1.0) * (radius(node.scale) - radius(j));
        pts.push_back(pts[static_cast<std::size_t>(node.rep)] + reach * unit_vector(dim, rng));
        next.push_back({static_cast<Index>(pts.size()) - 1, j, static_cast<Index>(a)});
      }
    }
    tree.push_back(std::move(next));
  }

  // Each leaf owns exactly its own point; a node's cell collects its leaves.
  AdmissibleChain chain;
  chain.r = r;
  chain.M = M;
  chain.levels.resize(tree.size());
  const auto& leaves = tree.back();
  for (std::size_t n = 0; n < tree.size(); ++n)
  {
    ChainLevel& level = chain.levels[n];
    level.cells.resize(tree[n].size());
    for (const Node& node : tree[n])
    {
      level.reps.push_back(node.rep);
      level.scales.push_back(node.scale);
    }
    for (std::size_t leaf = 0; leaf < leaves.size(); ++leaf)
    {
      Index a = static_cast<Index>(leaf);
      for (std::size_t m = tree.size() - 1; m > n; --m)
      {
        a = tree[m][static_cast<std::size_t>(a)].parent;
      }
      level.cells[static_cast<std::size_t>(a)].push_back(leaves[leaf].rep);
    }
    for (auto& cell : level.cells)
    {
      std::sort(cell.begin(), cell.end());
    }
  }

  Eigen::MatrixXd m(dim, static_cast<Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i)
  {
    m.col(static_cast<Index>(i)) = pts[i];
  }
  return {PointSet(std::move(m)), std::move(chain)};
}

std::string_view to_string(CertificateCondition c)
{
  switch (c)
  {
    case CertificateCondition::diameter: return "diameter";
    case CertificateCondition::increments: return "increments";
    case CertificateCondition::budget: return "budget";
    case CertificateCondition::complement: return "complement";
  }
  return "unknown";
}

CertificateCondition parse_certificate_condition(std::string_view text)
{
  for (const auto c : {CertificateCondition::diameter, CertificateCondition::increments,
                       CertificateCondition::budget, CertificateCondition::complement})
  {
    if (text == to_string(c))
    {
      return c;
    }
  }
  throw std::invalid_argument("unknown certificate condition: " + std::string(text));
}

CertificateFixture mutate_certificate(const CertificateFixture& fixture, CertificateCondition cond,
                                      std::uint64_t seed)
{
  Rng rng = make_rng(seed, kStreamMutation);
  AdmissibleChain chain = fixture.chain;
  Eigen::MatrixXd pts = fixture.points.matrix();
  const Index dim = pts.rows();
  const ChainLevel& root = chain.levels[0];
  const Index root_rep = root.reps[0];
  const int j0 = root.scales[0];
  const double unit0 = std::pow(chain.r, -j0);

  switch (cond)
  {
    case CertificateCondition::diameter:
    {
      // An outlier riding along with the root's representative and scale.
      const Index outlier = pts.cols();
      pts.conservativeResize(Eigen::NoChange, outlier + 1);
      pts.col(outlier) =
          pts.col(root_rep) + 3.0 * std::sqrt(chain.M) * unit0 * unit_vector(dim, rng);
      chain.levels[0].cells[0].push_back(outlier);
      for (std::size_t n = 1; n < chain.levels.size(); ++n)
      {
        chain.levels[n].cells.push_back({outlier});
        chain.levels[n].reps.push_back(root_rep);
        chain.levels[n].scales.push_back(j0);
      }
      break;
    }
    case CertificateCondition::increments:
    {
      std::vector<std::pair<std::size_t, std::size_t>> kept;
      const auto member = cell_membership(chain, pts.cols());
      for (std::size_t n = 1; n < chain.levels.size(); ++n)
      {
        const ChainLevel& level = chain.levels[n];
        for (std::size_t c = 0; c < level.cells.size(); ++c)
        {
          const auto up = static_cast<std::size_t>(
              member[n - 1][static_cast<std::size_t>(level.cells[c].front())]);
          if (level.scales[c] == chain.levels[n - 1].scales[up] &&
              level.reps[c] == chain.levels[n - 1].reps[up])
          {
            kept.emplace_back(n, c);
          }
        }
      }
      if (kept.empty())
      {
        throw std::invalid_argument("certificate has no inherited cell to mutate");
      }
      const auto [n, c] =
          kept[std::uniform_int_distribution<std::size_t>(0, kept.size() - 1)(rng)];
      chain.levels[n].scales[c] -= 1;
      break;
    }
    case CertificateCondition::budget:
    {
      // r^{2000} overflows; only the root lineage carries j_0.
      for (auto& level : chain.levels)
      {
        for (auto& j : level.scales)
        {
          if (j == j0)
          {
            j = -2000;
          }
        }
      }
      break;
    }
    case CertificateCondition::complement:
    {
      const auto moved = static_cast<Index>(std::floor(4.0 * chain.M)) + 1;
      if (dim < moved)
      {
        throw std::invalid_argument("complement mutation needs dim > 4M");
      }
      const ChainLevel& first = chain.levels.at(1);
      std::size_t target = first.cells.size();
      for (std::size_t c = 0; c < first.cells.size(); ++c)
      {
        if (first.scales[c] != j0)
        {
          target = c;
          break;
        }
      }
      if (target == first.cells.size())
      {
        throw std::invalid_argument("certificate has no split at level 1");
      }
      const double shift = (1.0 + std::sqrt(chain.M)) * unit0;
      for (const Index t : first.cells[target])
      {
        pts.col(t).head(moved).array() += shift;
      }
      break;
    }
  }
  return {PointSet(std::move(pts)), std::move(chain)};
}

}  // namespace blab
