#include "blab/chaining.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace blab
{
namespace
{
constexpr double kRelTol = 1e-12;

double scale_of(const AdmissibleChain& chain, int j)
{
  return std::pow(chain.r, -static_cast<double>(j));
}

void fail(const std::string& what)
{
  throw std::invalid_argument("invalid chain: " + what);
}

std::vector<Index> all_indices(Index n)
{
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  return idx;
}

// pi_n(t) for every level, and j_n(t) when present.
struct PointPath
{
  std::vector<Index> reps;
  std::vector<int> scales;
};

PointPath path_of(const AdmissibleChain& chain, const std::vector<std::vector<Index>>& member,
                  Index t)
{
  PointPath path;
  for (std::size_t n = 0; n < chain.levels.size(); ++n)
  {
    const auto cell = static_cast<std::size_t>(member[n][static_cast<std::size_t>(t)]);
    path.reps.push_back(chain.levels[n].reps[cell]);
    if (!chain.levels[n].scales.empty())
    {
      path.scales.push_back(chain.levels[n].scales[cell]);
    }
  }
  return path;
}

std::vector<Index> in_set(const Eigen::MatrixXd& points, const AdmissibleChain& chain,
                          const PointPath& path, Index n)
{
  std::vector<Index> out;
  for (Index i = 0; i < points.rows(); ++i)
  {
    bool keep = true;
    for (Index k = 0; k < n && keep; ++k)
    {
      const auto uk = static_cast<std::size_t>(k);
      const double step = std::abs(points(i, path.reps[uk + 1]) - points(i, path.reps[uk]));
      keep = step <= scale_of(chain, path.scales[uk]);
    }
    if (keep)
    {
      out.push_back(i);
    }
  }
  return out;
}

double truncated_sum(const Eigen::MatrixXd& points, Index t, Index rep,
                     const std::vector<Index>& coords, double cut_sq)
{
  double s = 0.0;
  for (const Index i : coords)
  {
    const double diff = points(i, t) - points(i, rep);
    s += std::min(diff * diff, cut_sq);
  }
  return s;
}

Index parent_cell(const std::vector<std::vector<Index>>& member, std::size_t n,
                  const std::vector<Index>& cell)
{
  return member[n - 1][static_cast<std::size_t>(cell.front())];
}

// Restricted-growth enumeration of set partitions of {0, ..., n-1}.
template <typename Visit>
void for_each_partition(Index n, Index max_blocks, Visit visit)
{
  std::vector<Index> label(static_cast<std::size_t>(n), 0);
  const auto recurse = [&](auto&& self, Index pos, Index blocks) -> void {
    if (pos == n)
    {
      std::vector<std::vector<Index>> cells(static_cast<std::size_t>(blocks));
      for (Index i = 0; i < n; ++i)
      {
        cells[static_cast<std::size_t>(label[static_cast<std::size_t>(i)])].push_back(i);
      }
      visit(cells);
      return;
    }
    for (Index b = 0; b <= blocks && b < max_blocks; ++b)
    {
      label[static_cast<std::size_t>(pos)] = b;
      self(self, pos + 1, std::max(blocks, b + 1));
    }
  };
  recurse(recurse, 0, 0);
}

}  // namespace

bool AdmissibleChain::has_scales() const
{
  return !levels.empty() && !levels.front().scales.empty();
}

std::uint64_t level_capacity(Index n)
{
  if (n <= 0)
  {
    return 1;
  }
  if (n >= 6)
  {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return std::uint64_t{1} << (std::uint64_t{1} << n);
}

void validate_chain(Index n_points, const AdmissibleChain& chain)
{
  if (!(chain.r > 1.0))
  {
    fail("r must exceed 1");
  }
  if (!(chain.M >= 1.0))
  {
    fail("M must be at least 1");
  }
  if (chain.levels.empty())
  {
    fail("no levels");
  }
  const bool scaled = chain.has_scales();
  std::vector<Index> previous_owner;
  for (std::size_t n = 0; n < chain.levels.size(); ++n)
  {
    const ChainLevel& level = chain.levels[n];
    const std::string at = "level " + std::to_string(n) + ": ";
    if (level.cells.empty())
    {
      fail(at + "no cells");
    }
    if (level.reps.size() != level.cells.size())
    {
      fail(at + "one representative per cell required");
    }
    if (scaled != !level.scales.empty() ||
        (scaled && level.scales.size() != level.cells.size()))
    {
      fail(at + "scales must be given for every cell of every level or not at all");
    }
    if (n == 0 && level.cells.size() != 1)
    {
      fail("level 0 must be the single cell T");
    }
    if (level.cells.size() > level_capacity(static_cast<Index>(n)))
    {
      fail(at + "more cells than 2^(2^n)");
    }
    std::vector<Index> owner(static_cast<std::size_t>(n_points), -1);
    for (std::size_t c = 0; c < level.cells.size(); ++c)
    {
      const auto& cell = level.cells[c];
      if (cell.empty())
      {
        fail(at + "empty cell");
      }
      for (const Index t : cell)
      {
        if (t < 0 || t >= n_points)
        {
          fail(at + "point index out of range");
        }
        if (owner[static_cast<std::size_t>(t)] != -1)
        {
          fail(at + "point " + std::to_string(t) + " appears in two cells");
        }
        owner[static_cast<std::size_t>(t)] = static_cast<Index>(c);
      }
      const Index rep = level.reps[c];
      if (rep < 0 || rep >= n_points)
      {
        fail(at + "representative out of range");
      }
      if (!scaled && std::find(cell.begin(), cell.end(), rep) == cell.end())
      {
        fail(at + "representative outside its cell");
      }
      if (n > 0)
      {
        const Index parent = previous_owner[static_cast<std::size_t>(cell.front())];
        for (const Index t : cell)
        {
          if (previous_owner[static_cast<std::size_t>(t)] != parent)
          {
            fail(at + "cell " + std::to_string(c) + " is not nested in one parent");
          }
        }
      }
    }
    if (std::find(owner.begin(), owner.end(), -1) != owner.end())
    {
      fail(at + "cells do not cover T");
    }
    previous_owner = std::move(owner);
  }
}

bool resolves_points(const AdmissibleChain& chain)
{
  const ChainLevel& last = chain.levels.back();
  for (std::size_t c = 0; c < last.cells.size(); ++c)
  {
    if (last.cells[c].size() != 1 || last.reps[c] != last.cells[c].front())
    {
      return false;
    }
  }
  return true;
}

std::vector<std::vector<Index>> cell_membership(const AdmissibleChain& chain, Index n_points)
{
  std::vector<std::vector<Index>> member(chain.levels.size(),
                                         std::vector<Index>(static_cast<std::size_t>(n_points)));
  for (std::size_t n = 0; n < chain.levels.size(); ++n)
  {
    const auto& cells = chain.levels[n].cells;
    for (std::size_t c = 0; c < cells.size(); ++c)
    {
      for (const Index t : cells[c])
      {
        member[n][static_cast<std::size_t>(t)] = static_cast<Index>(c);
      }
    }
  }
  return member;
}

IncrementNorms::IncrementNorms(const Eigen::MatrixXd& points, DistKind kind, int cap)
    : points_(points), kind_(kind), cap_(cap)
{
}

double IncrementNorms::operator()(Index level, Index to, Index from)
{
  if (to == from)
  {
    return 0.0;
  }
  const auto key = std::make_tuple(level, to, from);
  if (const auto it = memo_.find(key); it != memo_.end())
  {
    return it->second;
  }
  const Eigen::VectorXd diff = points_.col(to) - points_.col(from);
  const MomentEstimate est = level_pnorm(diff, std::ldexp(1.0, static_cast<int>(level)), kind_, cap_);
  used_surrogate_ = used_surrogate_ || est.method == Method::hitczenko_surrogate;
  memo_.emplace(key, est.value);
  return est.value;
}

Method IncrementNorms::method() const
{
  if (kind_ == DistKind::gaussian)
  {
    return Method::closed_form;
  }
  return used_surrogate_ ? Method::hitczenko_surrogate : Method::exact_enum;
}

GammaValue gamma_of_chain(const PointSet& T, const AdmissibleChain& chain, DistKind kind, int cap)
{
  validate_chain(T.size(), chain);
  if (!resolves_points(chain))
  {
    fail("the last level must consist of singletons represented by themselves");
  }
  const auto member = cell_membership(chain, T.size());
  IncrementNorms norms(T.matrix(), kind, cap);
  GammaValue out;
  out.value = -1.0;
  for (Index t = 0; t < T.size(); ++t)
  {
    const PointPath path = path_of(chain, member, t);
    double sum = 0.0;
    for (std::size_t n = 1; n < path.reps.size(); ++n)
    {
      sum += norms(static_cast<Index>(n), path.reps[n], path.reps[n - 1]);
    }
    if (sum > out.value)
    {
      out.value = sum;
      out.argmax = t;
    }
  }
  out.method = norms.method();
  return out;
}

AdmissibleChain build_greedy_chain(const PointSet& T, DistKind kind, int depth, int cap)
{
  if (depth < 1)
  {
    throw std::invalid_argument("greedy chain depth must be >= 1");
  }
  const Index N = T.size();
  IncrementNorms norms(T.matrix(), kind, cap);

  // Root: l2 1-center, lowest index on ties.
  Index root = 0;
  double best_radius = std::numeric_limits<double>::infinity();
  for (Index a = 0; a < N; ++a)
  {
    double radius = 0.0;
    for (Index b = 0; b < N; ++b)
    {
      radius = std::max(radius, (T.point(a) - T.point(b)).norm());
    }
    if (radius < best_radius)
    {
      best_radius = radius;
      root = a;
    }
  }

  AdmissibleChain chain;
  chain.levels.push_back({{all_indices(N)}, {root}, {}});

  for (Index n = 1;; ++n)
  {
    const ChainLevel& parent_level = chain.levels.back();
    const bool singletons = static_cast<Index>(parent_level.cells.size()) == N;
    if (n > depth && singletons)
    {
      break;
    }
    const std::uint64_t capacity =
        std::min<std::uint64_t>(static_cast<std::uint64_t>(N), level_capacity(n));

    // Seeds per parent cell, in creation order; every point tracks its seed.
    std::vector<std::vector<Index>> seeds(parent_level.cells.size());
    std::vector<Index> parent_of(static_cast<std::size_t>(N));
    std::vector<Index> seed_of(static_cast<std::size_t>(N));
    std::vector<double> gap(static_cast<std::size_t>(N));
    for (std::size_t c = 0; c < parent_level.cells.size(); ++c)
    {
      const Index rep = parent_level.reps[c];
      seeds[c].push_back(rep);
      for (const Index t : parent_level.cells[c])
      {
        parent_of[static_cast<std::size_t>(t)] = static_cast<Index>(c);
        seed_of[static_cast<std::size_t>(t)] = rep;
        gap[static_cast<std::size_t>(t)] = norms(n, t, rep);
      }
    }
    std::uint64_t count = parent_level.cells.size();
    while (count < capacity)
    {
      const auto far = std::max_element(gap.begin(), gap.end());
      if (*far <= 0.0)
      {
        break;
      }
      const Index fresh = static_cast<Index>(far - gap.begin());
      const auto c = static_cast<std::size_t>(parent_of[static_cast<std::size_t>(fresh)]);
      seeds[c].push_back(fresh);
      for (const Index t : parent_level.cells[c])
      {
        const double d = norms(n, t, fresh);
        if (d < gap[static_cast<std::size_t>(t)])
        {
          gap[static_cast<std::size_t>(t)] = d;
          seed_of[static_cast<std::size_t>(t)] = fresh;
        }
      }
      ++count;
    }

    ChainLevel level;
    for (std::size_t c = 0; c < parent_level.cells.size(); ++c)
    {
      for (const Index s : seeds[c])
      {
        std::vector<Index> cell;
        for (const Index t : parent_level.cells[c])
        {
          if (seed_of[static_cast<std::size_t>(t)] == s)
          {
            cell.push_back(t);
          }
        }
        level.cells.push_back(std::move(cell));
        level.reps.push_back(s);
      }
    }
    chain.levels.push_back(std::move(level));
  }
  return chain;
}

ExhaustiveGamma gamma_exhaustive(const PointSet& T, DistKind kind, int cap)
{
  const Index N = T.size();
  if (N > kExhaustiveMaxPoints)
  {
    throw std::invalid_argument("exhaustive gamma search supports at most " +
                                std::to_string(kExhaustiveMaxPoints) + " points");
  }
  ExhaustiveGamma out;
  if (N == 1)
  {
    out.best.levels.push_back({{{0}}, {0}, {}});
    return out;
  }
  IncrementNorms norms(T.matrix(), kind, cap);
  const auto singles = [&] {
    ChainLevel level;
    for (Index t = 0; t < N; ++t)
    {
      level.cells.push_back({t});
      level.reps.push_back(t);
    }
    return level;
  }();
  const auto cap1 = static_cast<Index>(level_capacity(1));

  out.value = std::numeric_limits<double>::infinity();
  for (Index root = 0; root < N; ++root)
  {
    for_each_partition(N, cap1, [&](const std::vector<std::vector<Index>>& cells) {
      // Odometer over one representative per cell.
      std::vector<std::size_t> pick(cells.size(), 0);
      while (true)
      {
        std::vector<Index> rep_of(static_cast<std::size_t>(N));
        for (std::size_t c = 0; c < cells.size(); ++c)
        {
          for (const Index t : cells[c])
          {
            rep_of[static_cast<std::size_t>(t)] = cells[c][pick[c]];
          }
        }
        double value = -1.0;
        for (Index t = 0; t < N; ++t)
        {
          const Index mid = rep_of[static_cast<std::size_t>(t)];
          double sum = 0.0;
          sum += norms(1, mid, root);
          sum += norms(2, t, mid);
          value = std::max(value, sum);
        }
        if (value < out.value)
        {
          out.value = value;
          ChainLevel level1;
          level1.cells = cells;
          for (std::size_t c = 0; c < cells.size(); ++c)
          {
            level1.reps.push_back(cells[c][pick[c]]);
          }
          out.best.levels = {{{all_indices(N)}, {root}, {}}, std::move(level1), singles};
        }
        std::size_t c = 0;
        while (c < cells.size() && ++pick[c] == cells[c].size())
        {
          pick[c++] = 0;
        }
        if (c == cells.size())
        {
          break;
        }
      }
    });
  }
  return out;
}

AdmissibleChain build_l1_chain(const PointSet& T)
{
  const Index N = T.size();
  Index m = 0;
  while (level_capacity(m) < static_cast<std::uint64_t>(N))
  {
    ++m;
  }
  AdmissibleChain chain;
  for (Index n = 0; n < m; ++n)
  {
    chain.levels.push_back({{all_indices(N)}, {0}, {}});
  }
  ChainLevel last;
  for (Index t = 0; t < N; ++t)
  {
    last.cells.push_back({t});
    last.reps.push_back(t);
  }
  chain.levels.push_back(std::move(last));
  return chain;
}

std::vector<Index> compute_In(const Eigen::MatrixXd& points, const AdmissibleChain& chain,
                              Index t, Index n)
{
  if (!chain.has_scales())
  {
    throw std::invalid_argument("I_n needs a chain with scales");
  }
  if (n < 1 || n > chain.depth())
  {
    throw std::invalid_argument("I_n needs 1 <= n <= depth");
  }
  if (t < 0 || t >= points.cols())
  {
    throw std::invalid_argument("point index out of range");
  }
  const auto member = cell_membership(chain, points.cols());
  return in_set(points, chain, path_of(chain, member, t), n);
}

CertificateReport verify_certificate(const PointSet& T, const AdmissibleChain& chain,
                                     const SupEstimate& b_ref)
{
  return verify_certificate(T.matrix(), chain, b_ref);
}

CertificateReport verify_certificate(const Eigen::MatrixXd& points, const AdmissibleChain& chain,
                                     const SupEstimate& b_ref)
{
  const Index N = points.cols();
  validate_chain(N, chain);
  if (!chain.has_scales())
  {
    throw std::invalid_argument("certificate verification needs scales");
  }
  const auto member = cell_membership(chain, N);
  const double M = chain.M;
  CertificateReport report;

  // ||t - s||_2 <= sqrt(M) r^{-j_0(T)}
  auto& diam = report.diameter;
  diam.bound = std::sqrt(M) * scale_of(chain, chain.levels[0].scales[0]);
  for (Index s = 0; s < N; ++s)
  {
    for (Index t = s + 1; t < N; ++t)
    {
      const double dist = (points.col(t) - points.col(s)).norm();
      if (dist > diam.distance)
      {
        diam.distance = dist;
        diam.s = s;
        diam.t = t;
      }
    }
  }
  diam.pass = diam.distance <= diam.bound * (1.0 + kRelTol);

  // Either (j, pi) inherited from the parent, or j increased, pi_n(A) in the
  // parent, and the truncated sum over I_n(A) stays below M 2^n r^{-2j}.
  auto& inc = report.increments;
  const auto flag = [&](std::size_t n, std::size_t c, Index parent, Index point,
                        std::string reason) {
    if (inc.pass)
    {
      inc.pass = false;
      inc.level = static_cast<Index>(n);
      inc.cell = static_cast<Index>(c);
      inc.parent = parent;
      inc.point = point;
      inc.reason = std::move(reason);
    }
  };
  for (std::size_t n = 1; n < chain.levels.size(); ++n)
  {
    const ChainLevel& level = chain.levels[n];
    const ChainLevel& up = chain.levels[n - 1];
    for (std::size_t c = 0; c < level.cells.size(); ++c)
    {
      const auto& cell = level.cells[c];
      const Index parent = parent_cell(member, n, cell);
      const auto up_c = static_cast<std::size_t>(parent);
      const int j = level.scales[c];
      const int j_up = up.scales[up_c];
      const Index rep = level.reps[c];
      if (j == j_up && rep == up.reps[up_c])
      {
        continue;
      }
      if (j <= j_up)
      {
        flag(n, c, parent, cell.front(),
             j == j_up ? "scale kept but representative changed" : "scale decreased");
        continue;
      }
      const auto& parent_cells = up.cells[up_c];
      if (std::find(parent_cells.begin(), parent_cells.end(), rep) == parent_cells.end())
      {
        flag(n, c, parent, rep, "representative outside parent cell");
        continue;
      }
      const double cut = scale_of(chain, j);
      const double cut_sq = cut * cut;
      const double allowance = M * std::ldexp(1.0, static_cast<int>(n)) * cut_sq;
      const auto coords = in_set(points, chain, path_of(chain, member, cell.front()),
                                 static_cast<Index>(n));
      for (const Index t : cell)
      {
        const double lhs = truncated_sum(points, t, rep, coords, cut_sq);
        inc.max_ratio = std::max(inc.max_ratio, lhs / (std::ldexp(1.0, static_cast<int>(n)) * cut_sq));
        if (lhs > allowance * (1.0 + kRelTol))
        {
          flag(n, c, parent, t, "truncated increment sum exceeds M 2^n r^{-2j}");
        }
      }
    }
  }

  // sup_t sum_n 2^n r^{-j_n(t)}, finite; L-hat = that / b_ref.
  auto& budget = report.budget;
  budget.sup_sum = -1.0;
  for (Index t = 0; t < N; ++t)
  {
    const PointPath path = path_of(chain, member, t);
    double sum = 0.0;
    for (std::size_t n = 0; n < path.scales.size(); ++n)
    {
      sum += std::ldexp(1.0, static_cast<int>(n)) * scale_of(chain, path.scales[n]);
    }
    if (!(sum <= budget.sup_sum))
    {
      budget.sup_sum = sum;
      budget.point = t;
    }
  }
  budget.pass = std::isfinite(budget.sup_sum);
  budget.applicable = b_ref.value > 0.0;
  budget.L_hat = budget.applicable ? budget.sup_sum / b_ref.value
                                   : std::numeric_limits<double>::quiet_NaN();

  // |I_n(t)^c| <= M 2^{n+1}; the witness is the first violation, else the
  // largest ratio.
  auto& comp = report.complement;
  bool witness_fails = false;
  for (Index t = 0; t < N; ++t)
  {
    const PointPath path = path_of(chain, member, t);
    for (Index n = 1; n <= chain.depth(); ++n)
    {
      const auto size = points.rows() - static_cast<Index>(in_set(points, chain, path, n).size());
      const double ratio = std::ldexp(static_cast<double>(size), -static_cast<int>(n));
      const double bound = M * std::ldexp(1.0, static_cast<int>(n + 1));
      const bool ok = static_cast<double>(size) <= bound;
      if (!witness_fails && (!ok || ratio > comp.max_ratio))
      {
        comp.level = n;
        comp.point = t;
        comp.size = size;
        comp.bound = bound;
        witness_fails = !ok;
      }
      comp.max_ratio = std::max(comp.max_ratio, ratio);
      comp.pass = comp.pass && ok;
    }
  }
  return report;
}

IncrementRatios certificate_increment_ratios(const Eigen::MatrixXd& points,
                                             const AdmissibleChain& chain)
{
  validate_chain(points.cols(), chain);
  if (!chain.has_scales())
  {
    throw std::invalid_argument("increment ratios need a chain with scales");
  }
  const auto member = cell_membership(chain, points.cols());
  IncrementRatios out;
  for (std::size_t n = 1; n < chain.levels.size(); ++n)
  {
    const ChainLevel& level = chain.levels[n];
    for (std::size_t c = 0; c < level.cells.size(); ++c)
    {
      const auto& cell = level.cells[c];
      const auto up_c = static_cast<std::size_t>(parent_cell(member, n, cell));
      const int j = level.scales[c];
      if (j <= chain.levels[n - 1].scales[up_c])
      {
        continue;
      }
      const double cut = scale_of(chain, j);
      const double cut_sq = cut * cut;
      const double unit = std::ldexp(1.0, static_cast<int>(n)) * cut_sq;
      const auto coords = in_set(points, chain, path_of(chain, member, cell.front()),
                                 static_cast<Index>(n));
      SplitCellRatio entry{static_cast<Index>(n), static_cast<Index>(c), cell.front(), -1.0};
      for (const Index t : cell)
      {
        const double ratio = truncated_sum(points, t, level.reps[c], coords, cut_sq) / unit;
        if (ratio > entry.ratio)
        {
          entry.ratio = ratio;
          entry.point = t;
        }
      }
      out.max_ratio = std::max(out.max_ratio, entry.ratio);
      out.cells.push_back(entry);
    }
  }
  return out;
}

PushForward push_forward_chain(const PointSet& T, const AdmissibleChain& chain, const PointMap& f)
{
  if (f.domain().size() != T.size() || !(f.domain() == T))
  {
    throw std::invalid_argument("map domain must be the chain's point set");
  }
  validate_chain(T.size(), chain);
  if (!chain.has_scales())
  {
    throw std::invalid_argument("push-forward needs a chain with scales");
  }
  PushForward out;
  out.chain = chain;
  out.image_points = f.image();
  const auto member = cell_membership(chain, T.size());
  for (Index s = 0; s < T.size(); ++s)
  {
    for (Index t = s + 1; t < T.size(); ++t)
    {
      if (out.image_points.col(s) == out.image_points.col(t))
      {
        out.coinciding.emplace_back(s, t);
        const auto last = member.size() - 1;
        out.cells_merged = out.cells_merged || member[last][static_cast<std::size_t>(s)] !=
                                                   member[last][static_cast<std::size_t>(t)];
      }
    }
  }
  out.ratios = certificate_increment_ratios(out.image_points, out.chain);
  return out;
}

}  // namespace blab
