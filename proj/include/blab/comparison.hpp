#pragma once

// Comparison conditions for a map f on T, empirical comparison of suprema,
// and the two-part decomposition sandwich.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "blab/chaining.hpp"
#include "blab/moments.hpp"
#include "blab/seq_core.hpp"
#include "blab/suprema.hpp"

namespace blab
{
enum class ComparisonCondition
{
  lipschitz,
  ole1,
  ole2,
  mela
};

std::string_view to_string(ComparisonCondition c);
ComparisonCondition parse_comparison_condition(std::string_view text);

struct ComparisonReport
{
  ComparisonCondition condition = ComparisonCondition::lipschitz;
  double constant = 0.0;  // smallest C that works on the grid
  Index s = 0;            // witness pair
  Index t = 1;
  std::optional<double> p;  // grid point of the witness, when there is a grid
  std::optional<double> r;
  std::vector<double> p_grid;
  std::vector<double> r_grid;
  std::optional<Method> method;  // norm path; one path per report
};

/// max over pairs of ||f(t) - f(s)||_2 / ||t - s||_2.
ComparisonReport lipschitz_constant(const PointMap& f);

/// max over pairs and p of ||sum |f(t)_i - f(s)_i| eps_i||_p / ||sum |t_i - s_i| eps_i||_p.
/// Exact enumeration when both dimensions fit the cap, the rearrangement
/// surrogate otherwise.
ComparisonReport ole1_constant(const PointMap& f, const std::vector<double>& p_grid,
                               int cap = kDefaultEnumCap);

/// max over pairs, p, r of ||sum (|f(t)_i - f(s)_i| ^ r) eps_i||_p /
/// (r p + ||sum (|t_i - s_i| ^ r) eps_i||_p). An empty r_grid picks
/// default_r_grid(f).
ComparisonReport ole2_constant(const PointMap& f, const std::vector<double>& p_grid,
                               std::vector<double> r_grid = {}, int cap = kDefaultEnumCap);

/// 8 log-spaced levels between the smallest positive and the largest
/// |coordinate difference| over pairs of T and of f(T).
std::vector<double> default_r_grid(const PointMap& f, int points = 8);

struct MelaResult
{
  bool pass = true;
  double C = 1.0;
  ComparisonReport report;  // constant = worst tail ratio; p = its p
};

/// For all pairs and integer 1 <= p <= p_max:
/// tail_l2_after_removal(f-diff, floor(C p)) <= C tail_l2_after_removal(diff, p).
MelaResult mela_check(const PointMap& f, double C, int p_max);

struct EmpiricalComparison
{
  SupEstimate domain;  // sup estimate on T
  SupEstimate image;   // on f(T), coinciding images merged
  double ratio = 0.0;
  double std_error = 0.0;
  bool applicable = true;  // false when the domain estimate is <= 0
};

/// image / domain with a delta-method standard error. Bernoulli uses b_exact
/// when both dimensions fit the cap and b_mc otherwise; Gaussian uses g_mc.
EmpiricalComparison empirical_comparison(const PointMap& f, DistKind kind, std::uint64_t samples,
                                         std::uint64_t seed, int cap = kDefaultEnumCap);

/// pi(t) = t, pi(t) = 0, and pi(t)_i = sign(t_i) min(|t_i|, theta).
PointMap identity_split(const PointSet& T);
PointMap zero_split(const PointSet& T);
PointMap soft_threshold_split(const PointSet& T, double theta);
/// Median of |t_i| over every coordinate of every point.
double median_abs_coordinate(const PointSet& T);

struct DecompositionReport
{
  PointSet residual;  // {t - pi(t)}
  PointSet kept;      // {pi(t)}
  GammaValue residual_gamma;  // l1 chain
  GammaValue kept_gamma;      // greedy chain
  double l1_radius = 0.0;     // sup ||t - t0||_1 over the residual set
  double total = 0.0;         // residual_gamma + kept_gamma
  double lower_ratio = 0.0;   // b_ref / total
  double upper_ratio = 0.0;   // total / b_ref
};

DecompositionReport decomposition_eval(const PointMap& pi, const SupEstimate& b_ref,
                                       int cap = kDefaultEnumCap);

}  // namespace blab
