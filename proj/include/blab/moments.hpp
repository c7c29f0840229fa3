#pragma once

// p-norms of X_t = sum t_i eps_i (random signs) and G_t = sum t_i g_i
// (standard normals): exact enumeration, Gaussian closed form, seeded
// Monte-Carlo, and the two-sided rearrangement surrogate.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "blab/seq_core.hpp"

namespace blab
{
enum class DistKind
{
  bernoulli,
  gaussian
};

enum class Method
{
  exact_enum,
  closed_form,
  monte_carlo,
  hitczenko_surrogate
};

std::string_view to_string(DistKind kind);
std::string_view to_string(Method method);
DistKind parse_dist_kind(std::string_view text);
Method parse_method(std::string_view text);

/// Sign-enumeration cap: 2^cap atoms at most.
inline constexpr int kDefaultEnumCap = 20;
inline constexpr int kMaxEnumCap = 26;

/// Thrown when exact enumeration is requested above the cap.
class CapExceeded : public std::invalid_argument
{
public:
  CapExceeded(Index dim, int cap)
      : std::invalid_argument("dimension " + std::to_string(dim) +
                              " exceeds enumeration cap " + std::to_string(cap))
  {
  }
};

struct MomentEstimate
{
  double value = 0.0;
  double std_error = 0.0;
  Method method = Method::exact_enum;
};

using VecRef = Eigen::Ref<const Eigen::VectorXd>;

/// ||g||_p for a standard normal g: sqrt(2) (Gamma((p+1)/2) / Gamma(1/2))^(1/p).
double gaussian_abs_moment_norm(double p);

/// Bernoulli: full enumeration of the sign cube. Gaussian: ||t||_2 * m_p.
MomentEstimate exact_pnorm(const VecRef& t, double p, DistKind kind,
                           int cap = kDefaultEnumCap);

/// (mean |<xi, t>|^p)^(1/p) over `samples` draws, with a delta-method standard
/// error. Bitwise reproducible for a fixed seed, independent of `workers`.
MomentEstimate mc_pnorm(const VecRef& t, double p, DistKind kind, std::uint64_t samples,
                        std::uint64_t seed, unsigned workers = 0);

/// sum of the p largest |t_i| plus sqrt(p) times the l2 norm of the rest.
/// p must be an integer >= 1.
double hitczenko(const VecRef& t, double p);

/// hitczenko(truncate_abs(t, r), p).
double hitczenko_trunc(const VecRef& t, double r, double p);

struct TailCheck
{
  double prob = 0.0;
  double bound = 0.0;
  double threshold = 0.0;  // e * ||X_t||_p
  bool pass = false;
};

/// P(|X_t| >= e ||X_t||_p) by enumeration against the bound e^-p.
TailCheck tail_prob_check(const VecRef& t, double p, int cap = kDefaultEnumCap);

/// Smallest kappa >= 1 with P(|X_t| >= ||X_t||_p / kappa) >= min(1/kappa, e^-p),
/// by enumeration. Reported as an empirical candidate only.
double reverse_tail_kappa(const VecRef& t, double p, int cap = kDefaultEnumCap);

/// The norm used for chaining increments: Gaussian closed form; Bernoulli
/// enumeration within the cap and the rearrangement surrogate above it.
MomentEstimate level_pnorm(const VecRef& t, double p, DistKind kind, int cap = kDefaultEnumCap);

bool is_positive_integer(double p);

/// {1, 2, 4, ..., max_p}.
std::vector<double> dyadic_p_grid(double max_p = 256.0);

namespace detail
{
/// Partial sums init + sum_i s_i v_i over all sign patterns, accumulated left
/// to right; bit i of the index set means s_i = -1. Complementary patterns
/// give exactly negated sums when init == 0.
std::vector<double> signed_partial_sums(const VecRef& v, double init = 0.0);

/// x^p, by repeated squaring for small integer p.
double power(double x, double p);

void require_cap(Index dim, int cap);
}  // namespace detail

}  // namespace blab
