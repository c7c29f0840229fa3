#pragma once

// The acceptance battery: one seeded check per criterion, each returning a
// deterministic JSON body. Wall-clock time is kept outside the body.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "blab/io.hpp"

namespace blab
{
struct SuiteConfig
{
  std::uint64_t seed = 20261016;
  /// Where k-ratio envelope violators are archived; empty disables archiving.
  std::filesystem::path findings_dir = "findings";
};

struct CriterionInfo
{
  int id;
  std::string name;
  double time_limit;  // seconds
};

/// Criteria 1..13 in order.
const std::vector<CriterionInfo>& criteria();

struct CriterionResult
{
  int id = 0;
  std::string name;
  bool pass = false;
  std::string summary;
  json details;
  double seconds = 0.0;  // not part of body()

  json body() const;
};

/// Runs criterion 1..12.
CriterionResult run_criterion(int id, const SuiteConfig& config);

/// Runs every criterion in `ids` (1..12) in order.
std::vector<CriterionResult> run_suite(const SuiteConfig& config, const std::vector<int>& ids);

json suite_body(const std::vector<CriterionResult>& results);

/// Criterion 13: reruns criteria 1..12 and compares the dumped body with
/// `first_body` byte for byte.
CriterionResult run_determinism(const SuiteConfig& config, const json& first_body);

}  // namespace blab
