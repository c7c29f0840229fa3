#pragma once

// Seeded instance generators: random point sets, maps on them, Banach
// models, and certificate chains with single-condition mutations.

#include <cstdint>
#include <string_view>

#include "blab/banach.hpp"
#include "blab/chaining.hpp"
#include "blab/seq_core.hpp"

namespace blab
{
/// size points with i.i.d. N(0, 1) coordinates in R^dim.
PointSet random_set(Index dim, Index size, std::uint64_t seed);

PointMap identity_map(const PointSet& T);
PointMap scaled_map(const PointSet& T, double factor);

/// t -> h(A t) with ||A||_op <= 1 and h applying tanh to a random subset of
/// coordinates, so ||f(t) - f(s)||_2 <= ||t - s||_2.
PointMap lipschitz_map(const PointSet& T, std::uint64_t seed);

/// f(t)_i = lambda_i psi_i(t_i) with |lambda_i| <= 1 and psi_i one of
/// id, tanh, clip to [-1, 1], abs, sin; every coordinate increment contracts.
PointMap contraction_map(const PointSet& T, std::uint64_t seed);

/// A random coordinate permutation, optionally with random sign flips.
PointMap permutation_map(const PointSet& T, std::uint64_t seed, bool sign_flips = true);

/// F = identity rows plus `extra_functionals` Gaussian rows; xs and ys are
/// n Gaussian vectors in R^d.
BanachModel random_banach_model(Index d, Index n, Index extra_functionals, std::uint64_t seed);

struct CertificateFixture
{
  PointSet points;
  AdmissibleChain chain;
};

/// A tree-built certificate satisfying every condition checked by
/// verify_certificate. Each node keeps its (rep, scale) in one child and may
/// open a second child at a new point q close to the rep with a larger scale;
/// all descendants of a node with scale j stay within (sqrt(M)/2) r^{-j} of its
/// rep. The last level is singletons.
CertificateFixture certificate_fixture(int depth, Index dim, std::uint64_t seed, double r = 4.0,
                                       double M = 1.0);

enum class CertificateCondition
{
  diameter,
  increments,
  budget,
  complement
};

std::string_view to_string(CertificateCondition c);
CertificateCondition parse_certificate_condition(std::string_view text);

/// Breaks the named condition and leaves the others intact, except that the
/// complement mutation also moves points past the diameter bound. complement
/// needs dim > 4M.
CertificateFixture mutate_certificate(const CertificateFixture& fixture, CertificateCondition cond,
                                      std::uint64_t seed);

}  // namespace blab
