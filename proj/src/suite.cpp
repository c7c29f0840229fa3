#include "blab/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

#include "blab/banach.hpp"
#include "blab/chaining.hpp"
#include "blab/comparison.hpp"
#include "blab/instances.hpp"
#include "blab/moments.hpp"
#include "blab/rng.hpp"
#include "blab/suprema.hpp"

namespace blab
{
namespace
{
constexpr double kEnvelope = 10.0;

std::uint64_t instance_seed(const SuiteConfig& config, int id, std::uint64_t k)
{
  return derive_seed(config.seed, static_cast<std::uint64_t>(id), k);
}

int uniform_int(Rng& rng, int lo, int hi)
{
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

Eigen::VectorXd gaussian_vector(Index d, Rng& rng)
{
  std::normal_distribution<double> normal;
  Eigen::VectorXd t(d);
  for (Index i = 0; i < d; ++i)
  {
    t(i) = normal(rng);
  }
  return t;
}

json spread(std::vector<double> xs)
{
  if (xs.empty())
  {
    return json{{"count", 0}};
  }
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  const double median = n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
  return json{{"count", n}, {"min", number(xs.front())}, {"median", number(median)},
              {"max", number(xs.back())}};
}

std::string fmt(double x)
{
  return format_number(x);
}

// Random T of the suite shape used by the chaining criteria.
PointSet chaining_instance(const SuiteConfig& config, int id, std::uint64_t k, int max_dim,
                           int max_size, int min_size = 1)
{
  Rng rng = make_rng(config.seed, static_cast<std::uint64_t>(id), k);
  const int d = uniform_int(rng, 2, max_dim);
  const int size = uniform_int(rng, min_size, max_size);
  return random_set(d, size, instance_seed(config, id, k));
}

CriterionResult second_moment(const SuiteConfig& config)
{
  CriterionResult out;
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 500; ++k)
  {
    Rng rng = make_rng(config.seed, 1, k);
    const Eigen::VectorXd t = gaussian_vector(uniform_int(rng, 1, 16), rng);
    worst = std::max(worst,
                     std::abs(exact_pnorm(t, 2.0, DistKind::bernoulli).value - t.norm()));
  }
  out.pass = worst <= 1e-10;
  out.summary = "max |exact - l2| = " + fmt(worst) + " (tol 1e-10)";
  out.details = {{"instances", 500}, {"max_abs_error", worst}, {"tolerance", 1e-10}};
  return out;
}

CriterionResult hitczenko_equivalence(const SuiteConfig& config)
{
  CriterionResult out;
  std::vector<double> ratios;
  json per_p = json::object();
  for (const double p : {1.0, 2.0, 4.0, 8.0})
  {
    double lo = INFINITY;
    double hi = 0.0;
    for (std::uint64_t k = 0; k < 200; ++k)
    {
      Rng rng = make_rng(config.seed, 2, k);
      Eigen::VectorXd t = gaussian_vector(uniform_int(rng, 1, 16), rng);
      if (k % 4 == 3)
      {
        t = t.cwiseSign();  // flat coefficient profiles
      }
      const double ratio = exact_pnorm(t, p, DistKind::bernoulli).value / hitczenko(t, p);
      ratios.push_back(ratio);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    per_p[fmt(p)] = {{"min", lo}, {"max", hi}};
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  out.pass = *lo >= 0.2 && *hi <= 5.0;
  out.summary = "exact/surrogate in [" + fmt(*lo) + ", " + fmt(*hi) + "], envelope [0.2, 5]";
  out.details = {{"instances", 200}, {"p", {1, 2, 4, 8}}, {"min", *lo}, {"max", *hi},
                 {"by_p", per_p}};
  return out;
}

CriterionResult tail_bound(const SuiteConfig& config)
{
  CriterionResult out;
  out.pass = true;
  double worst_slack = INFINITY;  // bound - prob
  int failures = 0;
  for (std::uint64_t k = 0; k < 100; ++k)
  {
    Rng rng = make_rng(config.seed, 3, k);
    const Eigen::VectorXd t = gaussian_vector(12, rng);
    for (const double p : {1.0, 2.0, 4.0})
    {
      const TailCheck c = tail_prob_check(t, p);
      worst_slack = std::min(worst_slack, c.bound - c.prob);
      if (!c.pass)
      {
        ++failures;
      }
    }
  }
  out.pass = failures == 0;
  out.summary = std::to_string(failures) + " failures of 300; min slack " + fmt(worst_slack);
  out.details = {{"instances", 100}, {"dim", 12}, {"failures", failures},
                 {"min_slack", worst_slack}};
  return out;
}

CriterionResult chaining_upper(const SuiteConfig& config)
{
  CriterionResult out;
  std::vector<double> ks;
  double worst = 0.0;
  std::uint64_t worst_k = 0;
  for (std::uint64_t k = 0; k < 50; ++k)
  {
    const PointSet T = chaining_instance(config, 4, k, 12, 16);
    const double b = b_exact(T).value;
    const double gamma =
        gamma_of_chain(T, build_greedy_chain(T, DistKind::bernoulli, 2), DistKind::bernoulli)
            .value;
    double ratio = 0.0;
    if (gamma > 0.0)
    {
      ratio = b / gamma;
    }
    else if (b > 0.0)
    {
      ratio = INFINITY;
    }
    ks.push_back(ratio);
    if (ratio > worst)
    {
      worst = ratio;
      worst_k = k;
    }
  }
  out.pass = worst <= kEnvelope;
  out.summary = "K-hat max " + fmt(worst) + " (envelope 10)";
  out.details = {{"instances", 50}, {"K_hat", spread(ks)}, {"worst_instance", worst_k}};
  return out;
}

CriterionResult gamma_oracle(const SuiteConfig& config)
{
  CriterionResult out;
  out.pass = true;
  std::vector<double> ratios;
  json failures = json::array();
  for (std::uint64_t k = 0; k < 30; ++k)
  {
    const PointSet T = chaining_instance(config, 5, k, 6, 5);
    for (const DistKind kind : {DistKind::bernoulli, DistKind::gaussian})
    {
      const double exhaustive = gamma_exhaustive(T, kind).value;
      const double greedy = gamma_of_chain(T, build_greedy_chain(T, kind, 2), kind).value;
      const bool ok = exhaustive <= greedy * (1.0 + 1e-12) && greedy <= 3.0 * exhaustive;
      if (exhaustive > 0.0)
      {
        ratios.push_back(greedy / exhaustive);
      }
      if (!ok)
      {
        out.pass = false;
        failures.push_back({{"instance", k}, {"kind", to_string(kind)},
                            {"exhaustive", exhaustive}, {"greedy", greedy}});
      }
    }
  }
  out.summary = "greedy/exhaustive max " + fmt(ratios.empty() ? 1.0 :
                *std::max_element(ratios.begin(), ratios.end())) + " (bound 3)";
  out.details = {{"instances", 30}, {"greedy_over_exhaustive", spread(ratios)},
                 {"failures", failures}};
  return out;
}

CriterionResult l1_chain_bound(const SuiteConfig& config)
{
  CriterionResult out;
  out.pass = true;
  double worst = 0.0;
  int checked = 0;
  const auto check = [&](const PointSet& T) {
    const AdmissibleChain chain = build_l1_chain(T);
    const GammaValue g = gamma_of_chain(T, chain, DistKind::bernoulli);
    const Index root = chain.levels[0].reps[0];
    double radius = 0.0;
    for (Index t = 0; t < T.size(); ++t)
    {
      radius = std::max(radius, (T.point(t) - T.point(root)).lpNorm<1>());
    }
    ++checked;
    out.pass = out.pass && g.method == Method::exact_enum && g.value <= 2.0 * radius;
    if (radius > 0.0)
    {
      worst = std::max(worst, g.value / (2.0 * radius));
    }
  };
  for (std::uint64_t k = 0; k < 50; ++k)
  {
    check(chaining_instance(config, 4, k, 12, 16));
  }
  for (std::uint64_t k = 0; k < 30; ++k)
  {
    check(chaining_instance(config, 5, k, 6, 5));
  }
  out.summary = "max gamma / (2 sup l1) = " + fmt(worst) + " over " + std::to_string(checked);
  out.details = {{"instances", checked}, {"max_ratio", worst}};
  return out;
}

CriterionResult gaussian_contraction(const SuiteConfig& config)
{
  CriterionResult out;
  out.pass = true;
  double worst_z = -INFINITY;  // (image - domain) / combined SE
  double max_lipschitz = 0.0;
  json rows = json::array();
  for (std::uint64_t k = 0; k < 20; ++k)
  {
    Rng rng = make_rng(config.seed, 7, k);
    const int d = uniform_int(rng, 1, 8);
    const int size = uniform_int(rng, 2, 32);
    const PointSet T = random_set(d, size, instance_seed(config, 7, k));
    const PointMap f = lipschitz_map(T, instance_seed(config, 7, 1000 + k));
    max_lipschitz = std::max(max_lipschitz, lipschitz_constant(f).constant);
    const EmpiricalComparison c =
        empirical_comparison(f, DistKind::gaussian, 1000000, instance_seed(config, 7, 2000 + k));
    const double se = std::hypot(c.domain.std_error, c.image.std_error);
    const bool ok = c.image.value <= c.domain.value + 4.0 * se;
    out.pass = out.pass && ok;
    if (se > 0.0)
    {
      worst_z = std::max(worst_z, (c.image.value - c.domain.value) / se);
    }
    rows.push_back({{"g_T", c.domain.value}, {"g_fT", c.image.value}, {"se", se}, {"ok", ok}});
  }
  out.pass = out.pass && max_lipschitz <= 1.0 + 1e-12;
  out.summary = "worst (g(fT) - g(T)) / SE = " + fmt(worst_z) + " (bound 4); max Lipschitz " +
                fmt(max_lipschitz);
  out.details = {{"maps", 20}, {"samples", 1000000}, {"worst_z", number(worst_z)},
                 {"max_lipschitz", max_lipschitz}, {"instances", rows}};
  return out;
}

CriterionResult invariance(const SuiteConfig& config)
{
  CriterionResult out;
  out.pass = true;
  double worst = 0.0;
  int mela_failures = 0;
  for (std::uint64_t k = 0; k < 20; ++k)
  {
    const PointSet T = chaining_instance(config, 8, k, 12, 16, 2);
    const PointMap f = permutation_map(T, instance_seed(config, 8, 1000 + k), true);
    const EmpiricalComparison c = empirical_comparison(f, DistKind::bernoulli, 0, 0);
    const double err = c.applicable ? std::abs(c.ratio - 1.0) : 0.0;
    const bool exact = c.domain.method == Method::exact_enum;
    worst = std::max(worst, err);
    const bool mela = mela_check(f, 1.0, static_cast<int>(T.dim())).pass;
    if (!mela)
    {
      ++mela_failures;
    }
    out.pass = out.pass && exact && err <= 1e-12 && mela;
  }
  out.summary = "max |ratio - 1| = " + fmt(worst) + "; mela failures " +
                std::to_string(mela_failures);
  out.details = {{"instances", 20}, {"max_ratio_error", worst}, {"mela_failures", mela_failures}};
  return out;
}

CriterionResult corollary_envelope(const SuiteConfig& config)
{
  CriterionResult out;
  out.pass = true;
  std::vector<double> ratios;
  int mela_failures = 0;
  for (std::uint64_t k = 0; k < 50; ++k)
  {
    Rng rng = make_rng(config.seed, 9, k);
    const int d = uniform_int(rng, 2, 12);
    const int size = uniform_int(rng, 2, 16);
    const PointSet T = random_set(d, size, instance_seed(config, 9, k));
    const PointMap f = contraction_map(T, instance_seed(config, 9, 1000 + k));
    if (!mela_check(f, 1.0, d).pass)
    {
      ++mela_failures;
    }
    const double ratio = b_exact(f.image_set()).value / b_exact(T).value;
    ratios.push_back(ratio);
  }
  const double worst = *std::max_element(ratios.begin(), ratios.end());
  out.pass = mela_failures == 0 && worst <= kEnvelope;
  out.summary = "max b(fT)/b(T) = " + fmt(worst) + " (envelope 10); mela failures " +
                std::to_string(mela_failures);
  out.details = {{"maps", 50}, {"ratio", spread(ratios)}, {"mela_failures", mela_failures}};
  return out;
}

CertificateFixture suite_fixture(const SuiteConfig& config, int id, std::uint64_t k)
{
  return certificate_fixture(3, 8, instance_seed(config, id, k));
}

bool field_fails(const CertificateReport& r, CertificateCondition c)
{
  switch (c)
  {
    case CertificateCondition::diameter: return !r.diameter.pass;
    case CertificateCondition::increments: return !r.increments.pass;
    case CertificateCondition::budget: return !r.budget.pass;
    case CertificateCondition::complement: return !r.complement.pass;
  }
  return false;
}

CriterionResult certificate_soundness(const SuiteConfig& config)
{
  CriterionResult out;
  int accepted = 0;
  json rejected = json::object();
  json collateral = json::object();  // other fields failing alongside
  bool all_rejected = true;
  const std::vector<CertificateCondition> conditions{
      CertificateCondition::diameter, CertificateCondition::increments,
      CertificateCondition::budget, CertificateCondition::complement};
  std::vector<int> hits(conditions.size(), 0);
  std::vector<json> also(conditions.size(), json::object());
  for (std::uint64_t k = 0; k < 25; ++k)
  {
    const CertificateFixture fx = suite_fixture(config, 10, k);
    const SupEstimate b = b_exact(fx.points);
    if (verify_certificate(fx.points, fx.chain, b).all_pass())
    {
      ++accepted;
    }
    for (std::size_t c = 0; c < conditions.size(); ++c)
    {
      const CertificateFixture bad =
          mutate_certificate(fx, conditions[c], instance_seed(config, 10, 1000 + k));
      const CertificateReport r = verify_certificate(bad.points, bad.chain, b_exact(bad.points));
      if (field_fails(r, conditions[c]))
      {
        ++hits[c];
      }
      for (const auto other : conditions)
      {
        if (other != conditions[c] && field_fails(r, other))
        {
          auto& slot = also[c][std::string(to_string(other))];
          slot = slot.is_null() ? 1 : slot.get<int>() + 1;
        }
      }
    }
  }
  for (std::size_t c = 0; c < conditions.size(); ++c)
  {
    rejected[std::string(to_string(conditions[c]))] = hits[c];
    collateral[std::string(to_string(conditions[c]))] = also[c];
    all_rejected = all_rejected && hits[c] == 25;
  }
  out.pass = accepted == 25 && all_rejected;
  out.summary = std::to_string(accepted) + "/25 accepted; mutations rejected " + rejected.dump();
  out.details = {{"fixtures", 25}, {"accepted", accepted}, {"rejected_by_matching_field", rejected},
                 {"other_fields_failing", collateral}};
  return out;
}

CriterionResult push_forward_constant(const SuiteConfig& config)
{
  CriterionResult out;
  out.pass = true;
  double identity_err = 0.0;
  double permutation_err = 0.0;
  double halving_excess = -INFINITY;  // max image - input over split cells
  std::vector<double> input_max;
  const auto compare = [](const IncrementRatios& a, const IncrementRatios& b, auto&& each) {
    if (a.cells.size() != b.cells.size())
    {
      return false;
    }
    for (std::size_t c = 0; c < a.cells.size(); ++c)
    {
      each(a.cells[c].ratio, b.cells[c].ratio);
    }
    each(a.max_ratio, b.max_ratio);
    return true;
  };
  for (std::uint64_t k = 0; k < 25; ++k)
  {
    const CertificateFixture fx = suite_fixture(config, 11, k);
    const IncrementRatios input = certificate_increment_ratios(fx.points.matrix(), fx.chain);
    input_max.push_back(input.max_ratio);
    const auto id = push_forward_chain(fx.points, fx.chain, identity_map(fx.points));
    const auto perm = push_forward_chain(
        fx.points, fx.chain, permutation_map(fx.points, instance_seed(config, 11, 1000 + k)));
    const auto half = push_forward_chain(fx.points, fx.chain, scaled_map(fx.points, 0.5));
    bool shaped = compare(input, id.ratios, [&](double a, double b) {
      identity_err = std::max(identity_err, std::abs(a - b));
    });
    shaped = compare(input, perm.ratios, [&](double a, double b) {
      permutation_err = std::max(permutation_err, std::abs(a - b));
    }) && shaped;
    shaped = compare(input, half.ratios, [&](double a, double b) {
      halving_excess = std::max(halving_excess, b - a);
    }) && shaped;
    out.pass = out.pass && shaped && id.chain == fx.chain;
  }
  out.pass = out.pass && identity_err <= 1e-12 && permutation_err <= 1e-12 &&
             halving_excess <= 1e-12;
  out.summary = "identity err " + fmt(identity_err) + ", permutation err " +
                fmt(permutation_err) + ", halving max excess " + fmt(halving_excess);
  out.details = {{"fixtures", 25}, {"identity_max_error", identity_err},
                 {"permutation_max_error", permutation_err},
                 {"halving_max_excess", halving_excess}, {"input_max_ratio", spread(input_max)}};
  return out;
}

CriterionResult oleszkiewicz(const SuiteConfig& config)
{
  CriterionResult out;
  bool exact_ok = true;
  const std::vector<double> p_grid = dyadic_p_grid(256.0);
  json exact_cases = json::array();
  for (std::uint64_t k = 0; k < 10; ++k)
  {
    Rng rng = make_rng(config.seed, 12, k);
    const int d = uniform_int(rng, 1, 6);
    const int n = uniform_int(rng, 1, 12);
    const BanachModel base = random_banach_model(d, n, 2, instance_seed(config, 12, k));
    const BanachModel same = base.with_xs(base.ys());
    const BanachModel half = base.with_xs(0.5 * base.ys());
    const std::uint64_t dirs_seed = instance_seed(config, 12, 100 + k);
    const auto same_r = domination_report(same, p_grid, 8, 0, dirs_seed);
    const auto half_r = domination_report(half, p_grid, 8, 0, dirs_seed);
    const bool ok = same_r.weak.method == Method::exact_enum && same_r.weak.constant == 1.0 &&
                    same_r.strong.ratio == 1.0 && half_r.weak.constant == 0.5 &&
                    half_r.strong.ratio == 0.5 && same_r.strong.x_side.method == Method::exact_enum;
    exact_ok = exact_ok && ok;
    exact_cases.push_back({{"d", d}, {"n", n}, {"same_weak", same_r.weak.constant},
                           {"same_strong", same_r.strong.ratio},
                           {"half_weak", half_r.weak.constant},
                           {"half_strong", half_r.strong.ratio}});
  }

  bool onto_ok = true;
  bool reproducible_violation = false;
  std::vector<double> ks;
  std::vector<double> ole6s;
  std::vector<double> tails;
  json violators = json::array();
  for (std::uint64_t k = 0; k < 20; ++k)
  {
    Rng rng = make_rng(config.seed, 12, 500 + k);
    const int d = uniform_int(rng, 2, 6);
    const int n = uniform_int(rng, 1, d);
    const BanachModel model = random_banach_model(d, n, 3, instance_seed(config, 12, 500 + k));
    onto_ok = onto_ok && q_onto_check(model).onto;
    const std::uint64_t dirs_seed = instance_seed(config, 12, 600 + k);
    const DominationReport r = domination_report(model, p_grid, 32, 0, dirs_seed);
    ole6s.push_back(ole6_constant(model, p_grid, 32, dirs_seed).constant);
    tails.push_back(tail_domination_constant(model, {0.25, 0.5, 1.0, 1.5}, 32, dirs_seed)
                        .constant);
    if (r.k_ratio_flagged)
    {
      continue;
    }
    ks.push_back(r.k_ratio);
    const double se = r.strong.std_error / r.weak.constant;
    if (r.k_ratio > kEnvelope)
    {
      violators.push_back({{"instance", k}, {"model", model}, {"report", r}});
      reproducible_violation = reproducible_violation || r.k_ratio - 4.0 * se > kEnvelope;
    }
  }
  if (!violators.empty() && !config.findings_dir.empty())
  {
    write_json_file(config.findings_dir / "k_ratio_violations.json",
                    {{"seed", config.seed}, {"envelope", kEnvelope}, {"violators", violators}});
  }
  out.pass = exact_ok && onto_ok && !reproducible_violation;
  out.summary = std::string("exact cases ") + (exact_ok ? "ok" : "FAILED") + "; k-ratio max " +
                fmt(ks.empty() ? 0.0 : *std::max_element(ks.begin(), ks.end())) +
                " (envelope 10), violators " + std::to_string(violators.size());
  out.details = {{"exact_cases", exact_cases}, {"onto_models", 20}, {"all_onto", onto_ok},
                 {"k_ratio", spread(ks)}, {"violators", violators.size()},
                 {"ole6_constant", spread(ole6s)}, {"tail_domination_constant", spread(tails)}};
  return out;
}

}  // namespace

const std::vector<CriterionInfo>& criteria()
{
  static const std::vector<CriterionInfo> all{
      {1, "second-moment identity", 10.0},
      {2, "rearrangement surrogate equivalence", 30.0},
      {3, "moment tail bound", 30.0},
      {4, "chaining upper bound", 120.0},
      {5, "gamma oracle consistency", 60.0},
      {6, "l1 chain bound", 10.0},
      {7, "gaussian contraction", 180.0},
      {8, "distribution invariance", 30.0},
      {9, "contraction envelope", 60.0},
      {10, "certificate verifier soundness", 30.0},
      {11, "push-forward ratios", 30.0},
      {12, "weak vs strong moments", 120.0},
      {13, "determinism", 0.0},
  };
  return all;
}

json CriterionResult::body() const
{
  return json{{"id", id}, {"name", name}, {"pass", pass}, {"summary", summary},
              {"details", details}};
}

CriterionResult run_criterion(int id, const SuiteConfig& config)
{
  using Runner = CriterionResult (*)(const SuiteConfig&);
  static const Runner runners[] = {
      second_moment,       hitczenko_equivalence, tail_bound,           chaining_upper,
      gamma_oracle,        l1_chain_bound,        gaussian_contraction, invariance,
      corollary_envelope,  certificate_soundness, push_forward_constant, oleszkiewicz,
  };
  if (id < 1 || id > 12)
  {
    throw std::invalid_argument("criterion id must be in 1..12");
  }
  const auto start = std::chrono::steady_clock::now();
  CriterionResult out = runners[id - 1](config);
  out.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.id = id;
  out.name = criteria()[static_cast<std::size_t>(id - 1)].name;
  return out;
}

std::vector<CriterionResult> run_suite(const SuiteConfig& config, const std::vector<int>& ids)
{
  std::vector<CriterionResult> out;
  for (const int id : ids)
  {
    out.push_back(run_criterion(id, config));
  }
  return out;
}

json suite_body(const std::vector<CriterionResult>& results)
{
  json body = json::array();
  for (const auto& r : results)
  {
    body.push_back(r.body());
  }
  return body;
}

CriterionResult run_determinism(const SuiteConfig& config, const json& first_body)
{
  const auto start = std::chrono::steady_clock::now();
  std::vector<int> ids(12);
  for (int i = 0; i < 12; ++i)
  {
    ids[static_cast<std::size_t>(i)] = i + 1;
  }
  const std::string first = first_body.dump();
  const std::string second = suite_body(run_suite(config, ids)).dump();
  CriterionResult out;
  out.id = 13;
  out.name = criteria().back().name;
  out.pass = first == second;
  std::size_t at = 0;
  while (at < first.size() && at < second.size() && first[at] == second[at])
  {
    ++at;
  }
  out.summary = out.pass ? "second pass byte-identical (" + std::to_string(first.size()) + " bytes)"
                         : "bodies differ at byte " + std::to_string(at);
  out.details = {{"bytes", first.size()}, {"identical", out.pass}};
  out.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace blab
