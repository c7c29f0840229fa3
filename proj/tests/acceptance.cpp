// Acceptance battery: criteria 1-12 once, then criterion 13 reruns them and
// compares bodies. One PASS/FAIL line per criterion; a criterion also fails
// when it runs past its time limit.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "blab/suite.hpp"

using namespace blab;

namespace
{
bool report(const CriterionResult& r, double limit)
{
  const bool in_time = r.seconds <= limit;
  const bool pass = r.pass && in_time;
  std::printf("[%s] %2d %-34s %7.2fs / %5.0fs  %s%s\n", pass ? "PASS" : "FAIL", r.id,
              r.name.c_str(), r.seconds, limit, r.summary.c_str(),
              in_time ? "" : "  (over time limit)");
  std::fflush(stdout);
  return pass;
}
}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"acceptance battery"};
  SuiteConfig config;
  std::string findings = "findings";
  app.add_option("--seed", config.seed, "Suite seed");
  app.add_option("--findings", findings, "Directory for archived findings");
  CLI11_PARSE(app, argc, argv);
  config.findings_dir = findings;

  const auto& info = criteria();
  bool all = true;
  std::vector<CriterionResult> results;
  double first_pass_limit = 0.0;
  for (int id = 1; id <= 12; ++id)
  {
    const CriterionInfo& c = info.at(static_cast<std::size_t>(id - 1));
    first_pass_limit += c.time_limit;
    results.push_back(run_criterion(id, config));
    all = report(results.back(), c.time_limit) && all;
  }

  // Criterion 13 is allowed one more pass of the battery.
  const CriterionResult det = run_determinism(config, suite_body(results));
  all = report(det, first_pass_limit) && all;

  std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return all ? 0 : 1;
}
