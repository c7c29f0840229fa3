#pragma once

// JSON shapes for instances and reports (see docs/schemas.md), plus small
// file and CSV helpers. Non-finite numbers are written as null.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "blab/banach.hpp"
#include "blab/chaining.hpp"
#include "blab/comparison.hpp"
#include "blab/moments.hpp"
#include "blab/seq_core.hpp"
#include "blab/suprema.hpp"

namespace blab
{
using json = nlohmann::json;

/// A number, or null when not finite.
json number(double x);

void to_json(json& j, const PointSet& T);
void from_json(const json& j, PointSet& T);
void to_json(json& j, const PointMap& f);
void from_json(const json& j, PointMap& f);
void to_json(json& j, const AdmissibleChain& chain);
void from_json(const json& j, AdmissibleChain& chain);
void to_json(json& j, const BanachModel& model);
void from_json(const json& j, BanachModel& model);

void to_json(json& j, const MomentEstimate& e);
void to_json(json& j, const SupEstimate& e);
void to_json(json& j, const TailCheck& c);
void to_json(json& j, const GammaValue& g);
void to_json(json& j, const CertificateReport& r);
void to_json(json& j, const IncrementRatios& r);
void to_json(json& j, const PushForward& p);
void to_json(json& j, const ComparisonReport& r);
void to_json(json& j, const MelaResult& r);
void to_json(json& j, const EmpiricalComparison& r);
void to_json(json& j, const DecompositionReport& r);
void to_json(json& j, const WeakReport& r);
void to_json(json& j, const StrongRatio& r);
void to_json(json& j, const OntoCheck& r);
void to_json(json& j, const Ole6Report& r);
void to_json(json& j, const TailDomination& r);
void to_json(json& j, const DominationReport& r);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

/// Header row then data rows; cells are written as given.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Shortest round-trip decimal, "nan"/"inf" for non-finite.
std::string format_number(double x);

/// "1,2.5,-3" -> {1, 2.5, -3}. Throws std::invalid_argument.
std::vector<double> parse_number_list(std::string_view text);

}  // namespace blab
