#pragma once

// Expected suprema b(T) = E sup_t X_t and g(T) = E sup_t G_t.

#include <cstdint>

#include "blab/moments.hpp"
#include "blab/seq_core.hpp"

namespace blab
{
struct SupEstimate
{
  double value = 0.0;
  double std_error = 0.0;
  Method method = Method::exact_enum;
};

/// 2^-d sum over the sign cube of max_t <sigma, t>. Complementary sign
/// patterns are summed in pairs, so b_exact(-T) == b_exact(T) bitwise.
SupEstimate b_exact(const PointSet& T, int cap = kDefaultEnumCap);

SupEstimate b_mc(const PointSet& T, std::uint64_t samples, std::uint64_t seed,
                 unsigned workers = 0);

SupEstimate g_mc(const PointSet& T, std::uint64_t samples, std::uint64_t seed,
                 unsigned workers = 0);

/// b_exact within the cap, b_mc otherwise (Bernoulli); g_mc for Gaussian.
SupEstimate sup_estimate(const PointSet& T, DistKind kind, std::uint64_t samples,
                         std::uint64_t seed, int cap = kDefaultEnumCap);

}  // namespace blab
