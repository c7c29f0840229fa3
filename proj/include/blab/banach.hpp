#pragma once

// Finite-dimensional models for weak versus strong moments of Bernoulli
// series sum x_i eps_i and sum y_i eps_i in (R^d, ||.||), with
// ||v|| = max_{phi in F} |<phi, v>| so the dual unit ball is conv(+-F).

#include <cstdint>
#include <vector>

#include "blab/moments.hpp"
#include "blab/suprema.hpp"

namespace blab
{
/// Rows of `functionals` are the phi in F; rows of xs and ys are the x_i, y_i.
class BanachModel
{
public:
  BanachModel() = default;
  BanachModel(Eigen::MatrixXd functionals, Eigen::MatrixXd xs, Eigen::MatrixXd ys);

  Index dim() const { return functionals_.cols(); }
  Index terms() const { return xs_.rows(); }
  const Eigen::MatrixXd& functionals() const { return functionals_; }
  const Eigen::MatrixXd& xs() const { return xs_; }
  const Eigen::MatrixXd& ys() const { return ys_; }

  double norm(const Eigen::Ref<const Eigen::VectorXd>& v) const;

  BanachModel with_xs(Eigen::MatrixXd xs) const { return {functionals_, std::move(xs), ys_}; }

  bool operator==(const BanachModel& o) const;

private:
  Eigen::MatrixXd functionals_;
  Eigen::MatrixXd xs_;
  Eigen::MatrixXd ys_;
};

/// Singular values below this fraction of the largest count as zero.
inline constexpr double kRankTolerance = 1e-9;

Index numerical_rank(const Eigen::MatrixXd& m, double rel_tol = kRankTolerance);

/// Tested functionals: every phi in F (the sign of x* does not change any
/// symmetric norm) followed by n_dirs seeded random unit vectors.
Eigen::MatrixXd test_directions(const BanachModel& model, Index n_dirs, std::uint64_t seed);

struct WeakReport
{
  double constant = 0.0;  // lower bound on the weak-moment constant; may be +inf
  bool infinite = false;
  Index direction = 0;    // row of test_directions attaining it
  double p = 1.0;
  Method method = Method::exact_enum;
  Index directions_tested = 0;
};

/// max over tested x* and p of ||sum x*(x_i) eps_i||_p / ||sum x*(y_i) eps_i||_p.
WeakReport weak_constant(const BanachModel& model, const std::vector<double>& p_grid,
                         Index n_dirs, std::uint64_t seed, int cap = kDefaultEnumCap);

struct StrongRatio
{
  SupEstimate x_side;  // E||sum x_i eps_i||
  SupEstimate y_side;  // E||sum y_i eps_i||
  double ratio = 0.0;
  double std_error = 0.0;
  bool applicable = true;  // false when the y side vanishes
};

/// E||sum eps_i v_i|| = E max_{phi in +-F} <phi, sum eps_i v_i>, exactly when
/// n <= cap, else by Monte-Carlo.
StrongRatio strong_ratio(const BanachModel& model, std::uint64_t samples, std::uint64_t seed,
                         int cap = kDefaultEnumCap);

struct OntoCheck
{
  bool onto = false;
  Index rank = 0;
};

/// Q(x*) = (<x*, y_i>)_i is onto R^n iff the n x d matrix of y rows has rank n.
OntoCheck q_onto_check(const BanachModel& model);

struct Ole6Report
{
  double constant = 0.0;
  Index direction = 0;
  double p = 1.0;
  Method method = Method::exact_enum;
};

/// Minimal C with ||sum min(|x*(x_i)|,1) eps_i||_p <= C (p + ||sum min(|x*(y_i)|,1) eps_i||_p)
/// over tested directions and p. `as_printed` puts x_i on both sides.
Ole6Report ole6_constant(const BanachModel& model, const std::vector<double>& p_grid,
                         Index n_dirs, std::uint64_t seed, bool as_printed = false,
                         int cap = kDefaultEnumCap);

struct TailDomination
{
  double constant = 1.0;  // minimal single C over the u-grid; +inf if none <= c_max
  bool infinite = false;
  Index direction = 0;
  double u = 0.0;
};

/// Reporting-only weak tail domination: minimal C >= 1 such that
/// P(|sum x*(x_i) eps_i| > u) <= C P(|sum x*(y_i) eps_i| > u / C) on the grid.
/// Grid entries are relative: u = rho * ||(x*(x_i))_i||_2 per direction.
/// Exact enumeration; n <= cap.
TailDomination tail_domination_constant(const BanachModel& model, const std::vector<double>& u_grid,
                                        Index n_dirs, std::uint64_t seed,
                                        int cap = kDefaultEnumCap, double c_max = 1e6);

struct DominationReport
{
  WeakReport weak;
  StrongRatio strong;
  double k_ratio = 0.0;  // strong / weak; 0 and flagged when weak is infinite
  bool k_ratio_flagged = false;
};

DominationReport domination_report(const BanachModel& model, const std::vector<double>& p_grid,
                                   Index n_dirs, std::uint64_t samples, std::uint64_t seed,
                                   int cap = kDefaultEnumCap);

}  // namespace blab
