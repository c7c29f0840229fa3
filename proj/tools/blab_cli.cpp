// blab: command-line runner for the process laboratory.
//
// Every command prints (or writes with --out) a JSON report
//   {command, config, result, version, timestamp}
// and optionally a CSV table with --csv. Exit codes: 0 ok, 2 invalid input
// (bad flags, bad files, cap violations), 3 runtime failure.

#include <cstdlib>
#include <ctime>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blab/banach.hpp"
#include "blab/chaining.hpp"
#include "blab/comparison.hpp"
#include "blab/instances.hpp"
#include "blab/io.hpp"
#include "blab/moments.hpp"
#include "blab/rng.hpp"
#include "blab/suite.hpp"
#include "blab/suprema.hpp"

using namespace blab;

namespace
{
struct Invalid : std::invalid_argument
{
  using std::invalid_argument::invalid_argument;
};

using Table = std::vector<std::vector<std::string>>;

struct Output
{
  json config = json::object();
  json result;
  std::vector<std::string> csv_header;
  Table csv_rows;
};

struct Common
{
  std::string out;
  std::string csv;
  int cap = kDefaultEnumCap;
  std::optional<std::uint64_t> seed;
  std::uint64_t samples = 100000;
};

int default_cap()
{
  const char* env = std::getenv("BLAB_ENUM_CAP");
  if (env == nullptr || *env == '\0')
  {
    return kDefaultEnumCap;
  }
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > kMaxEnumCap)
  {
    throw Invalid("BLAB_ENUM_CAP must be an integer in 1.." + std::to_string(kMaxEnumCap));
  }
  return static_cast<int>(v);
}

std::uint64_t need_seed(const Common& c, const std::string& why)
{
  if (!c.seed)
  {
    throw Invalid("--seed is required: " + why);
  }
  return *c.seed;
}

std::string timestamp()
{
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

PointSet load_set(const std::string& path)
{
  return read_json_file(path).get<PointSet>();
}

// identity | scale:L | permutation:SEED | contraction:SEED | lipschitz:SEED | PATH
PointMap resolve_map(const std::string& spec, const PointSet& T)
{
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  const auto seed_arg = [&] {
    if (arg.empty())
    {
      throw Invalid("map '" + head + "' needs a seed, e.g. " + head + ":7");
    }
    return static_cast<std::uint64_t>(std::stoull(arg));
  };
  if (spec == "identity")
  {
    return identity_map(T);
  }
  if (head == "scale")
  {
    return scaled_map(T, parse_number_list(arg).at(0));
  }
  if (head == "permutation")
  {
    return permutation_map(T, seed_arg());
  }
  if (head == "contraction")
  {
    return contraction_map(T, seed_arg());
  }
  if (head == "lipschitz")
  {
    return lipschitz_map(T, seed_arg());
  }
  PointMap f = read_json_file(spec).get<PointMap>();
  if (!(f.domain() == T))
  {
    throw Invalid("map file domain differs from --set");
  }
  return f;
}

std::vector<std::string> row(std::initializer_list<std::string> cells)
{
  return cells;
}

std::string num(double x)
{
  return format_number(x);
}

std::vector<double> grid_or(const std::string& text, std::vector<double> fallback)
{
  return text.empty() ? fallback : parse_number_list(text);
}

// ---------------------------------------------------------------------------

Output cmd_moments(const Common& c, const std::string& t_text, double p, const std::string& kind_text,
                   const std::string& method, bool tail)
{
  const std::vector<double> coeffs = parse_number_list(t_text);
  const Eigen::VectorXd t =
      Eigen::Map<const Eigen::VectorXd>(coeffs.data(), static_cast<Index>(coeffs.size()));
  require_valid_point(t);
  const DistKind kind = parse_dist_kind(kind_text);
  Output o;
  o.config = {{"t", coeffs}, {"p", p}, {"kind", kind_text}, {"method", method},
              {"cap", c.cap}};
  o.result = json::object();
  o.csv_header = {"method", "value", "std_error"};
  const auto add = [&](const std::string& key, const MomentEstimate& e) {
    o.result[key] = e;
    o.csv_rows.push_back(row({std::string(to_string(e.method)), num(e.value), num(e.std_error)}));
  };
  if (method == "exact" || method == "all")
  {
    add("exact", exact_pnorm(t, p, kind, c.cap));
  }
  if (method == "mc" || method == "all")
  {
    const std::uint64_t seed = need_seed(c, "Monte-Carlo moments");
    o.config["samples"] = c.samples;
    o.config["seed"] = seed;
    add("monte_carlo", mc_pnorm(t, p, kind, c.samples, seed));
  }
  if (method == "hitczenko" || method == "all")
  {
    add("hitczenko", {hitczenko(t, p), 0.0, Method::hitczenko_surrogate});
  }
  if (o.result.empty())
  {
    throw Invalid("--method must be exact, mc, hitczenko or all");
  }
  if (tail)
  {
    o.result["tail_check"] = tail_prob_check(t, p, c.cap);
    o.config["tail"] = true;
  }
  return o;
}

Output cmd_suprema(const Common& c, const std::string& set, const std::string& kind_text,
                   bool exact, bool mc)
{
  const PointSet T = load_set(set);
  const DistKind kind = parse_dist_kind(kind_text);
  Output o;
  o.config = {{"set", set}, {"kind", kind_text}, {"cap", c.cap}};
  SupEstimate e;
  if (exact)
  {
    if (kind != DistKind::bernoulli)
    {
      throw Invalid("--exact is only available for bernoulli suprema");
    }
    e = b_exact(T, c.cap);
  }
  else if (mc || kind == DistKind::gaussian || T.dim() > c.cap)
  {
    const std::uint64_t seed = need_seed(c, "Monte-Carlo suprema");
    o.config["samples"] = c.samples;
    o.config["seed"] = seed;
    e = kind == DistKind::gaussian ? g_mc(T, c.samples, seed) : b_mc(T, c.samples, seed);
  }
  else
  {
    e = b_exact(T, c.cap);
  }
  o.result = e;
  o.csv_header = {"kind", "method", "value", "std_error"};
  o.csv_rows.push_back(row({kind_text, std::string(to_string(e.method)), num(e.value),
                            num(e.std_error)}));
  return o;
}

Output cmd_gamma(const Common& c, const std::string& set, const std::string& kind_text,
                 const std::string& chain_spec, int depth, const std::string& save_chain)
{
  const PointSet T = load_set(set);
  const DistKind kind = parse_dist_kind(kind_text);
  Output o;
  o.config = {{"set", set}, {"kind", kind_text}, {"chain", chain_spec}, {"depth", depth},
              {"cap", c.cap}};
  AdmissibleChain chain;
  if (chain_spec == "exhaustive")
  {
    ExhaustiveGamma ex = gamma_exhaustive(T, kind, c.cap);
    chain = std::move(ex.best);
  }
  else if (chain_spec == "greedy")
  {
    chain = build_greedy_chain(T, kind, depth, c.cap);
  }
  else if (chain_spec == "l1")
  {
    chain = build_l1_chain(T);
  }
  else
  {
    chain = read_json_file(chain_spec).get<AdmissibleChain>();
  }
  const GammaValue g = gamma_of_chain(T, chain, kind, c.cap);
  o.result = {{"gamma", g}, {"chain", chain}};
  if (!save_chain.empty())
  {
    write_json_file(save_chain, chain);
  }
  o.csv_header = {"chain", "kind", "gamma", "method", "argmax", "depth"};
  o.csv_rows.push_back(row({chain_spec, kind_text, num(g.value), std::string(to_string(g.method)),
                            std::to_string(g.argmax), std::to_string(chain.depth())}));
  return o;
}

Output cmd_certificate(const Common& c, const std::string& set, const std::string& chain_file,
                       const std::string& map_spec)
{
  const PointSet T = load_set(set);
  const AdmissibleChain chain = read_json_file(chain_file).get<AdmissibleChain>();
  Output o;
  o.config = {{"set", set}, {"chain", chain_file}, {"cap", c.cap}};
  SupEstimate b_ref;
  if (T.dim() <= c.cap)
  {
    b_ref = b_exact(T, c.cap);
  }
  else
  {
    const std::uint64_t seed = need_seed(c, "reference b(T) above the cap");
    o.config["samples"] = c.samples;
    o.config["seed"] = seed;
    b_ref = b_mc(T, c.samples, seed);
  }
  const CertificateReport report = verify_certificate(T, chain, b_ref);
  o.result = {{"b_ref", b_ref}, {"report", report}};
  o.csv_header = {"condition", "pass"};
  o.csv_rows = {row({"diameter", report.diameter.pass ? "1" : "0"}),
                row({"increments", report.increments.pass ? "1" : "0"}),
                row({"budget", report.budget.pass ? "1" : "0"}),
                row({"complement", report.complement.pass ? "1" : "0"})};
  if (!map_spec.empty())
  {
    o.config["f"] = map_spec;
    const PushForward pf = push_forward_chain(T, chain, resolve_map(map_spec, T));
    o.result["push_forward"] = pf;
    o.result["input_ratios"] = certificate_increment_ratios(T.matrix(), chain);
  }
  return o;
}

Output cmd_compare(const Common& c, const std::string& set, const std::string& check,
                   const std::string& map_spec, double C, int p_max, const std::string& p_text,
                   const std::string& r_text, const std::string& kind_text)
{
  const PointSet T = load_set(set);
  const PointMap f = resolve_map(map_spec, T);
  Output o;
  o.config = {{"set", set}, {"check", check}, {"f", map_spec}, {"cap", c.cap}};
  o.csv_header = {"condition", "constant", "s", "t", "p", "r", "pass"};
  const auto report_row = [&](const ComparisonReport& r, const std::string& pass) {
    o.csv_rows.push_back(row({std::string(to_string(r.condition)), num(r.constant),
                              std::to_string(r.s), std::to_string(r.t),
                              r.p ? num(*r.p) : "", r.r ? num(*r.r) : "", pass}));
  };
  if (check == "empirical")
  {
    const DistKind kind = parse_dist_kind(kind_text);
    const bool exact = kind == DistKind::bernoulli && T.dim() <= c.cap && f.image_dim() <= c.cap;
    std::uint64_t seed = 0;
    if (!exact)
    {
      seed = need_seed(c, "Monte-Carlo comparison");
      o.config["samples"] = c.samples;
      o.config["seed"] = seed;
    }
    o.config["kind"] = kind_text;
    const EmpiricalComparison e = empirical_comparison(f, kind, c.samples, seed, c.cap);
    o.result = e;
    o.csv_header = {"kind", "ratio", "std_error", "domain", "image", "applicable"};
    o.csv_rows.push_back(row({kind_text, num(e.ratio), num(e.std_error), num(e.domain.value),
                              num(e.image.value), e.applicable ? "1" : "0"}));
    return o;
  }
  const ComparisonCondition cond = parse_comparison_condition(check);
  const std::vector<double> p_grid = grid_or(p_text, dyadic_p_grid(256.0));
  switch (cond)
  {
    case ComparisonCondition::lipschitz:
    {
      const auto r = lipschitz_constant(f);
      o.result = r;
      report_row(r, "");
      break;
    }
    case ComparisonCondition::ole1:
    {
      o.config["p_grid"] = p_grid;
      const auto r = ole1_constant(f, p_grid, c.cap);
      o.result = r;
      report_row(r, "");
      break;
    }
    case ComparisonCondition::ole2:
    {
      o.config["p_grid"] = p_grid;
      const auto r = ole2_constant(f, p_grid, grid_or(r_text, {}), c.cap);
      o.result = r;
      report_row(r, "");
      break;
    }
    case ComparisonCondition::mela:
    {
      const int p_top = p_max > 0 ? p_max : static_cast<int>(T.dim());
      o.config["C"] = C;
      o.config["p_max"] = p_top;
      const auto r = mela_check(f, C, p_top);
      o.result = r;
      report_row(r.report, r.pass ? "1" : "0");
      break;
    }
  }
  return o;
}

Output cmd_decompose(const Common& c, const std::string& set, const std::string& pi_spec)
{
  const PointSet T = load_set(set);
  Output o;
  o.config = {{"set", set}, {"pi", pi_spec}, {"cap", c.cap}};
  PointMap pi;
  if (pi_spec == "identity")
  {
    pi = identity_split(T);
  }
  else if (pi_spec == "zero")
  {
    pi = zero_split(T);
  }
  else if (pi_spec.rfind("soft", 0) == 0)
  {
    const auto colon = pi_spec.find(':');
    const double theta = colon == std::string::npos
                             ? median_abs_coordinate(T)
                             : parse_number_list(pi_spec.substr(colon + 1)).at(0);
    o.config["theta"] = theta;
    pi = soft_threshold_split(T, theta);
  }
  else
  {
    pi = read_json_file(pi_spec).get<PointMap>();
    if (!(pi.domain() == T))
    {
      throw Invalid("pi file domain differs from --set");
    }
  }
  SupEstimate b_ref;
  if (T.dim() <= c.cap)
  {
    b_ref = b_exact(T, c.cap);
  }
  else
  {
    const std::uint64_t seed = need_seed(c, "reference b(T) above the cap");
    o.config["samples"] = c.samples;
    o.config["seed"] = seed;
    b_ref = b_mc(T, c.samples, seed);
  }
  const DecompositionReport r = decomposition_eval(pi, b_ref, c.cap);
  o.result = {{"b_ref", b_ref}, {"decomposition", r}};
  o.csv_header = {"quantity", "value"};
  o.csv_rows = {row({"b_ref", num(b_ref.value)}),
                row({"residual_gamma", num(r.residual_gamma.value)}),
                row({"kept_gamma", num(r.kept_gamma.value)}), row({"total", num(r.total)}),
                row({"lower_ratio", num(r.lower_ratio)}), row({"upper_ratio", num(r.upper_ratio)})};
  return o;
}

Output cmd_banach(const Common& c, const std::string& model_file, const std::string& check,
                  const std::string& p_text, Index dirs, bool as_printed, const std::string& u_text)
{
  const BanachModel model = read_json_file(model_file).get<BanachModel>();
  const std::vector<double> p_grid = grid_or(p_text, dyadic_p_grid(256.0));
  const std::vector<double> u_grid = grid_or(u_text, {0.25, 0.5, 1.0, 1.5, 2.0});
  Output o;
  o.config = {{"model", model_file}, {"check", check}, {"p_grid", p_grid}, {"dirs", dirs},
              {"cap", c.cap}};
  std::uint64_t seed = 0;
  const bool random_dirs = dirs > 0 && check != "strong" && check != "onto";
  const bool mc = model.terms() > c.cap && (check == "strong" || check == "report");
  if (random_dirs || mc)
  {
    seed = need_seed(c, random_dirs ? "random test directions" : "Monte-Carlo strong moments");
    o.config["seed"] = seed;
  }
  if (mc)
  {
    o.config["samples"] = c.samples;
  }
  o.csv_header = {"quantity", "value", "std_error"};
  o.result = json::object();
  if (check == "weak" || check == "report")
  {
    const auto w = weak_constant(model, p_grid, dirs, seed, c.cap);
    o.result["weak"] = w;
    o.csv_rows.push_back(row({"weak_constant", num(w.constant), "0"}));
  }
  if (check == "strong" || check == "report")
  {
    const auto s = strong_ratio(model, c.samples, seed, c.cap);
    o.result["strong"] = s;
    o.csv_rows.push_back(row({"strong_ratio", num(s.ratio), num(s.std_error)}));
  }
  if (check == "report")
  {
    const auto w = o.result["weak"];
    const auto s = o.result["strong"];
    const bool flagged = w["infinite"].get<bool>() || !(w["constant"].is_number()) ||
                         w["constant"].get<double>() <= 0.0 || !s["applicable"].get<bool>();
    const double k = flagged ? 0.0 : s["ratio"].get<double>() / w["constant"].get<double>();
    o.result["k_ratio"] = k;
    o.result["k_ratio_flagged"] = flagged;
    o.csv_rows.push_back(row({"k_ratio", num(k), ""}));
  }
  if (check == "onto" || check == "report")
  {
    const auto q = q_onto_check(model);
    o.result["onto"] = q;
    o.csv_rows.push_back(row({"rank", std::to_string(q.rank), "0"}));
  }
  if (check == "ole6")
  {
    o.config["as_printed"] = as_printed;
    const auto r = ole6_constant(model, p_grid, dirs, seed, as_printed, c.cap);
    o.result["ole6"] = r;
    o.csv_rows.push_back(row({"ole6_constant", num(r.constant), "0"}));
  }
  if (check == "tail")
  {
    o.config["u_grid"] = u_grid;
    const auto r = tail_domination_constant(model, u_grid, dirs, seed, c.cap);
    o.result["tail"] = r;
    o.csv_rows.push_back(row({"tail_constant", num(r.constant), "0"}));
  }
  if (o.result.empty())
  {
    throw Invalid("--check must be weak, strong, onto, ole6, tail or report");
  }
  return o;
}

struct GenerateArgs
{
  std::string kind;
  Index dim = 10;
  Index size = 8;
  int depth = 2;
  Index n = 4;
  Index extra = 2;
  double r = 4.0;
  double M = 1.0;
  std::string set;
  std::string mutate;
  std::string instance_out;
  bool no_flips = false;
};

Output cmd_generate(const Common& c, const GenerateArgs& g)
{
  const std::uint64_t seed = need_seed(c, "instance generation");
  if (g.instance_out.empty())
  {
    throw Invalid("generate needs --instance-out");
  }
  Output o;
  o.config = {{"kind", g.kind}, {"seed", seed}, {"instance_out", g.instance_out}};
  json instance;
  const auto domain = [&] {
    if (g.set.empty())
    {
      throw Invalid(g.kind + " needs --set");
    }
    o.config["set"] = g.set;
    return load_set(g.set);
  };
  if (g.kind == "random-set")
  {
    o.config["dim"] = g.dim;
    o.config["size"] = g.size;
    instance = random_set(g.dim, g.size, seed);
  }
  else if (g.kind == "lipschitz-map")
  {
    instance = lipschitz_map(domain(), seed);
  }
  else if (g.kind == "contraction-map")
  {
    instance = contraction_map(domain(), seed);
  }
  else if (g.kind == "permutation-map")
  {
    o.config["sign_flips"] = !g.no_flips;
    instance = permutation_map(domain(), seed, !g.no_flips);
  }
  else if (g.kind == "banach-model")
  {
    o.config["dim"] = g.dim;
    o.config["n"] = g.n;
    o.config["extra"] = g.extra;
    instance = random_banach_model(g.dim, g.n, g.extra, seed);
  }
  else if (g.kind == "certificate-fixture")
  {
    o.config["depth"] = g.depth;
    o.config["dim"] = g.dim;
    o.config["r"] = g.r;
    o.config["M"] = g.M;
    CertificateFixture fx = certificate_fixture(g.depth, g.dim, seed, g.r, g.M);
    if (!g.mutate.empty())
    {
      o.config["mutate"] = g.mutate;
      fx = mutate_certificate(fx, parse_certificate_condition(g.mutate), derive_seed(seed, 1));
    }
    instance = {{"set", fx.points}, {"chain", fx.chain}};
  }
  else
  {
    throw Invalid("unknown generator '" + g.kind +
                  "' (random-set, lipschitz-map, contraction-map, permutation-map, "
                  "banach-model, certificate-fixture)");
  }
  write_json_file(g.instance_out, instance);
  o.result = {{"written", g.instance_out}};
  if (g.kind == "certificate-fixture")
  {
    // Companion files usable by the certificate command directly.
    const std::string stem = g.instance_out.substr(0, g.instance_out.rfind('.'));
    write_json_file(stem + ".set.json", instance["set"]);
    write_json_file(stem + ".chain.json", instance["chain"]);
    o.result["set_file"] = stem + ".set.json";
    o.result["chain_file"] = stem + ".chain.json";
  }
  return o;
}

Output cmd_suite(const Common& c, const std::string& ids_text, bool determinism,
                 const std::string& findings)
{
  SuiteConfig config;
  config.seed = need_seed(c, "the acceptance battery");
  config.findings_dir = findings;
  const std::vector<int> all_ids{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  std::vector<int> ids;
  for (const double x : grid_or(ids_text, {all_ids.begin(), all_ids.end()}))
  {
    if (x != static_cast<int>(x) || x < 1 || x > 12)
    {
      throw Invalid("--ids entries must be integers in 1..12");
    }
    ids.push_back(static_cast<int>(x));
  }
  Output o;
  o.config = {{"seed", config.seed}, {"ids", ids}, {"determinism", determinism},
              {"findings", findings}};
  auto results = run_suite(config, ids);
  const json body = suite_body(results);
  if (determinism)
  {
    const json first = ids == all_ids ? body : suite_body(run_suite(config, all_ids));
    results.push_back(run_determinism(config, first));
  }
  bool all = true;
  o.csv_header = {"id", "name", "pass", "seconds"};
  for (const auto& r : results)
  {
    all = all && r.pass;
    o.csv_rows.push_back(row({std::to_string(r.id), r.name, r.pass ? "1" : "0", num(r.seconds)}));
  }
  o.result = {{"all_pass", all}, {"criteria", suite_body(results)}};
  return o;
}

void emit(const std::string& command, const Common& c, const Output& o)
{
  json report = {{"command", command},
                 {"config", o.config},
                 {"result", o.result},
                 {"version", BLAB_VERSION},
                 {"timestamp", timestamp()}};
  if (c.out.empty())
  {
    std::cout << report.dump(2) << '\n';
  }
  else
  {
    write_json_file(c.out, report);
  }
  if (!c.csv.empty())
  {
    write_csv(c.csv, o.csv_header, o.csv_rows);
  }
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Numerical laboratory for canonical Bernoulli and Gaussian processes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", BLAB_VERSION);

  Common c;
  std::uint64_t seed_value = 0;
  int cap_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Seed for every stochastic step");
  auto* cap_opt = app.add_option("--cap", cap_value, "Sign-enumeration cap (default 20, or $BLAB_ENUM_CAP)")
                      ->check(CLI::Range(1, kMaxEnumCap));
  app.add_option("--out", c.out, "Write the JSON report here instead of stdout");
  app.add_option("--csv", c.csv, "Also write a CSV table");
  app.add_option("--samples", c.samples, "Monte-Carlo samples")->check(CLI::Range(100ULL, 1ULL << 40));
  app.fallthrough();

  // moments
  std::string t_text, kind_text = "bernoulli", method = "exact";
  double p = 2.0;
  bool tail = false;
  auto* moments = app.add_subcommand("moments", "p-norms of sum t_i xi_i");
  moments->add_option("--t", t_text, "Coefficients, comma separated")->required();
  moments->add_option("--p", p, "Moment order p >= 1");
  moments->add_option("--kind", kind_text, "bernoulli | gaussian");
  moments->add_option("--method", method, "exact | mc | hitczenko | all");
  moments->add_flag("--tail", tail, "Also check P(|X| >= e ||X||_p) <= e^-p");

  // suprema
  std::string set;
  bool exact = false, mc = false;
  auto* suprema = app.add_subcommand("suprema", "Expected suprema b(T) and g(T)");
  suprema->add_option("--set", set, "PointSet JSON")->required();
  suprema->add_option("--kind", kind_text, "bernoulli | gaussian");
  suprema->add_flag("--exact", exact, "Exact enumeration");
  suprema->add_flag("--mc", mc, "Monte-Carlo");

  // gamma
  std::string chain_spec = "greedy", save_chain;
  int depth = 2;
  auto* gamma = app.add_subcommand("gamma", "gamma-functional of a chain");
  gamma->add_option("--set", set, "PointSet JSON")->required();
  gamma->add_option("--kind", kind_text, "bernoulli | gaussian");
  gamma->add_option("--chain", chain_spec, "greedy | l1 | exhaustive | chain JSON");
  gamma->add_option("--depth", depth, "Greedy depth")->check(CLI::Range(1, 16));
  gamma->add_option("--save-chain", save_chain, "Write the chain used");

  // certificate
  std::string chain_file, map_spec;
  auto* certificate = app.add_subcommand("certificate", "Verify a certificate chain");
  certificate->add_option("--set", set, "PointSet JSON")->required();
  certificate->add_option("--chain", chain_file, "Chain JSON with scales")->required();
  certificate->add_option("--f", map_spec, "Push forward under a map");

  // compare
  std::string check, p_text, r_text;
  double C = 1.0;
  int p_max = 0;
  auto* compare = app.add_subcommand("compare", "Comparison conditions for a map f on T");
  compare->add_option("--set", set, "PointSet JSON")->required();
  compare->add_option("--check", check, "lipschitz | ole1 | ole2 | mela | empirical")->required();
  compare->add_option("--f", map_spec, "identity | scale:L | permutation:S | contraction:S | lipschitz:S | map JSON")
      ->required();
  compare->add_option("--C", C, "mela constant");
  compare->add_option("--p-max", p_max, "mela p range (default dim)");
  compare->add_option("--p-grid", p_text, "Integer p grid (default 1,2,...,256)");
  compare->add_option("--r-grid", r_text, "Truncation grid (default 8 log-spaced)");
  compare->add_option("--kind", kind_text, "bernoulli | gaussian (empirical)");

  // decompose
  std::string pi_spec = "soft";
  auto* decompose = app.add_subcommand("decompose", "Two-part decomposition sandwich");
  decompose->add_option("--set", set, "PointSet JSON")->required();
  decompose->add_option("--pi", pi_spec, "identity | zero | soft[:theta] | map JSON");

  // banach
  std::string model_file, banach_check = "report", u_text;
  Index dirs = 16;
  bool as_printed = false;
  auto* banach = app.add_subcommand("banach", "Weak vs strong moments in a finite model");
  banach->add_option("--model", model_file, "BanachModel JSON")->required();
  banach->add_option("--check", banach_check, "weak | strong | onto | ole6 | tail | report");
  banach->add_option("--p-grid", p_text, "p grid (default 1,2,...,256)");
  banach->add_option("--dirs", dirs, "Random test directions")->check(CLI::NonNegativeNumber);
  banach->add_flag("--as-printed", as_printed, "ole6 with x_i on both sides");
  banach->add_option("--u-grid", u_text, "Tail levels relative to ||a||_2");

  // generate
  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a seeded instance");
  generate->add_option("--kind", gen.kind, "random-set | lipschitz-map | contraction-map | "
                                           "permutation-map | banach-model | certificate-fixture")
      ->required();
  generate->add_option("--dim", gen.dim, "Ambient dimension")->check(CLI::PositiveNumber);
  generate->add_option("--size", gen.size, "Number of points")->check(CLI::PositiveNumber);
  generate->add_option("--depth", gen.depth, "Fixture depth")->check(CLI::Range(1, 12));
  generate->add_option("--n", gen.n, "Banach model terms")->check(CLI::PositiveNumber);
  generate->add_option("--extra", gen.extra, "Extra functionals")->check(CLI::NonNegativeNumber);
  generate->add_option("--r", gen.r, "Fixture base r > 1");
  generate->add_option("--M", gen.M, "Fixture M >= 1");
  generate->add_option("--set", gen.set, "Domain PointSet JSON (maps)");
  generate->add_option("--mutate", gen.mutate, "diameter | increments | budget | complement");
  generate->add_flag("--no-flips", gen.no_flips, "Permutation without sign flips");
  generate->add_option("--instance-out", gen.instance_out, "Instance JSON path")->required();

  // suite
  std::string ids_text, findings = "findings";
  bool determinism = false;
  auto* suite = app.add_subcommand("suite", "Run the acceptance battery");
  suite->add_option("--ids", ids_text, "Criteria to run (default 1..12)");
  suite->add_flag("--determinism", determinism, "Also rerun and compare (criterion 13)");
  suite->add_option("--findings", findings, "Directory for archived findings");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try
  {
    c.cap = *cap_opt ? cap_value : default_cap();
    if (*seed_opt)
    {
      c.seed = seed_value;
    }
    Output o;
    std::string name;
    if (*moments)
    {
      name = "moments";
      o = cmd_moments(c, t_text, p, kind_text, method, tail);
    }
    else if (*suprema)
    {
      name = "suprema";
      o = cmd_suprema(c, set, kind_text, exact, mc);
    }
    else if (*gamma)
    {
      name = "gamma";
      o = cmd_gamma(c, set, kind_text, chain_spec, depth, save_chain);
    }
    else if (*certificate)
    {
      name = "certificate";
      o = cmd_certificate(c, set, chain_file, map_spec);
    }
    else if (*compare)
    {
      name = "compare";
      o = cmd_compare(c, set, check, map_spec, C, p_max, p_text, r_text, kind_text);
    }
    else if (*decompose)
    {
      name = "decompose";
      o = cmd_decompose(c, set, pi_spec);
    }
    else if (*banach)
    {
      name = "banach";
      o = cmd_banach(c, model_file, banach_check, p_text, dirs, as_printed, u_text);
    }
    else if (*generate)
    {
      name = "generate";
      o = cmd_generate(c, gen);
    }
    else
    {
      name = "suite";
      o = cmd_suite(c, ids_text, determinism, findings);
    }
    emit(name, c, o);
    return 0;
  }
  catch (const std::invalid_argument& e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  catch (const json::exception& e)
  {
    std::cerr << "error: malformed input: " << e.what() << '\n';
    return 2;
  }
  catch (const std::out_of_range& e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  catch (const std::exception& e)
  {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 3;
  }
}
