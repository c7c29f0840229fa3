#pragma once

// Admissible partition chains over the point indices of a finite T:
// construction, gamma-functional evaluation, and verification of
// scale/representative certificates and their push-forward under a map.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "blab/moments.hpp"
#include "blab/seq_core.hpp"
#include "blab/suprema.hpp"

namespace blab
{
struct ChainLevel
{
  std::vector<std::vector<Index>> cells;
  std::vector<Index> reps;  // one point index per cell
  std::vector<int> scales;  // j_n per cell; empty unless the chain is a certificate

  bool operator==(const ChainLevel&) const = default;
};

/// Nested partitions A_0 = {T}, A_1, ..., A_D with |A_n| <= 2^(2^n).
struct AdmissibleChain
{
  std::vector<ChainLevel> levels;
  double r = 4.0;
  double M = 1.0;

  Index depth() const { return static_cast<Index>(levels.size()) - 1; }
  bool has_scales() const;

  bool operator==(const AdmissibleChain&) const = default;
};

/// N_0 = 1, N_n = 2^(2^n); saturates at UINT64_MAX.
std::uint64_t level_capacity(Index n);

/// Structural checks: level 0 is {T}, every level partitions the indices,
/// capacities hold, levels are nested, reps index T and (without scales) lie
/// in their own cells, r > 1, M >= 1. Throws std::invalid_argument.
void validate_chain(Index n_points, const AdmissibleChain& chain);

/// True when the last level is all singletons represented by themselves, so
/// pi_D(t) = t for every t.
bool resolves_points(const AdmissibleChain& chain);

/// membership[n][t] = index of the cell of level n that contains t.
std::vector<std::vector<Index>> cell_membership(const AdmissibleChain& chain, Index n_points);

/// Memoized ||Z_{to} - Z_{from}||_{2^n} for points of one set.
class IncrementNorms
{
public:
  IncrementNorms(const Eigen::MatrixXd& points, DistKind kind, int cap = kDefaultEnumCap);

  double operator()(Index level, Index to, Index from);
  /// Exact enumeration or closed form everywhere so far.
  bool exact_path() const { return !used_surrogate_; }
  Method method() const;

private:
  const Eigen::MatrixXd& points_;
  DistKind kind_;
  int cap_;
  bool used_surrogate_ = false;
  std::map<std::tuple<Index, Index, Index>, double> memo_;
};

struct GammaValue
{
  double value = 0.0;
  Method method = Method::exact_enum;
  Index argmax = 0;  // point attaining the supremum
};

/// sup_t sum_{n>=1} ||Z_{pi_n(t)} - Z_{pi_{n-1}(t)}||_{2^n}. The chain must
/// resolve every point (see resolves_points).
GammaValue gamma_of_chain(const PointSet& T, const AdmissibleChain& chain, DistKind kind,
                          int cap = kDefaultEnumCap);

/// Farthest-point splitting under d_n(s, t) = ||Z_t - Z_s||_{2^n}, rooted at
/// the l2 1-center. Levels beyond `depth` are appended until the last level
/// is all singletons.
AdmissibleChain build_greedy_chain(const PointSet& T, DistKind kind, int depth,
                                   int cap = kDefaultEnumCap);

struct ExhaustiveGamma
{
  double value = 0.0;
  AdmissibleChain best;
};

inline constexpr Index kExhaustiveMaxPoints = 5;

/// Minimum of gamma_of_chain over every nested chain of depth <= 2 ending in
/// singletons, with every representative assignment. |T| <= 5.
ExhaustiveGamma gamma_exhaustive(const PointSet& T, DistKind kind, int cap = kDefaultEnumCap);

/// {T} = A_0 = ... = A_{m-1}, A_m = singletons, with N_m >= |T| > N_{m-1}.
/// The root representative is the first point.
AdmissibleChain build_l1_chain(const PointSet& T);

/// I_n(t): coordinates i with |pi_{k+1}(t)_i - pi_k(t)_i| <= r^{-j_k(t)} for
/// all 0 <= k < n. Requires scales and 1 <= n <= depth.
std::vector<Index> compute_In(const Eigen::MatrixXd& points, const AdmissibleChain& chain,
                              Index t, Index n);
inline std::vector<Index> compute_In(const PointSet& T, const AdmissibleChain& chain, Index t,
                                     Index n)
{
  return compute_In(T.matrix(), chain, t, n);
}

struct CertificateReport
{
  struct Diameter
  {
    bool pass = true;
    Index s = 0;
    Index t = 0;
    double distance = 0.0;
    double bound = 0.0;
  };
  struct Increments
  {
    bool pass = true;
    Index level = 0;
    Index cell = 0;
    Index parent = 0;
    Index point = 0;
    std::string reason;
    double max_ratio = 0.0;  // max over split cells of lhs / (2^n r^{-2j})
  };
  struct Budget
  {
    bool pass = true;
    bool applicable = true;  // false when b_ref <= 0
    double sup_sum = 0.0;    // sup_t sum_n 2^n r^{-j_n(t)}
    double L_hat = 0.0;
    Index point = 0;
  };
  struct Complement
  {
    bool pass = true;
    double max_ratio = 0.0;  // max |I_n^c| / 2^n
    Index level = 0;
    Index point = 0;
    Index size = 0;
    double bound = 0.0;
  };

  Diameter diameter;
  Increments increments;
  Budget budget;
  Complement complement;

  bool all_pass() const
  {
    return diameter.pass && increments.pass && budget.pass && complement.pass;
  }
};

CertificateReport verify_certificate(const PointSet& T, const AdmissibleChain& chain,
                                     const SupEstimate& b_ref);
CertificateReport verify_certificate(const Eigen::MatrixXd& points, const AdmissibleChain& chain,
                                     const SupEstimate& b_ref);

struct SplitCellRatio
{
  Index level = 0;
  Index cell = 0;
  Index point = 0;
  double ratio = 0.0;
};

/// For every cell whose scale increased over its parent, the largest
/// sum_{i in I_n} min{|t_i - pi_n(A)_i|^2, r^{-2j}} / (2^n r^{-2j}) over t in A.
struct IncrementRatios
{
  std::vector<SplitCellRatio> cells;
  double max_ratio = 0.0;
};

IncrementRatios certificate_increment_ratios(const Eigen::MatrixXd& points,
                                             const AdmissibleChain& chain);

struct PushForward
{
  AdmissibleChain chain;          // same cells, reps and scales, read on f(T)
  Eigen::MatrixXd image_points;   // column t is f(t)
  IncrementRatios ratios;
  std::vector<std::pair<Index, Index>> coinciding;  // s < t with f(s) == f(t)
  bool cells_merged = false;  // some coinciding pair is separated by the chain
};

PushForward push_forward_chain(const PointSet& T, const AdmissibleChain& chain, const PointMap& f);

}  // namespace blab
