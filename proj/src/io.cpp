#include "blab/io.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace blab
{
namespace
{
json matrix_rows(const Eigen::MatrixXd& m)
{
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i)
  {
    json row = json::array();
    for (Index k = 0; k < m.cols(); ++k)
    {
      row.push_back(m(i, k));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json matrix_columns(const Eigen::MatrixXd& m)
{
  return matrix_rows(m.transpose());
}

// Rows of equal width `width` (or inferred when < 0) into a matrix.
Eigen::MatrixXd rows_matrix(const json& rows, Index width, const char* what)
{
  if (!rows.is_array())
  {
    throw std::invalid_argument(std::string(what) + " must be an array of rows");
  }
  const auto n = static_cast<Index>(rows.size());
  if (width < 0)
  {
    width = n > 0 ? static_cast<Index>(rows.at(0).size()) : 0;
  }
  Eigen::MatrixXd m(n, width);
  for (Index i = 0; i < n; ++i)
  {
    const json& row = rows.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Index>(row.size()) != width)
    {
      throw std::invalid_argument(std::string(what) + ": row " + std::to_string(i) +
                                  " has the wrong length");
    }
    for (Index k = 0; k < width; ++k)
    {
      const json& x = row.at(static_cast<std::size_t>(k));
      if (!x.is_number())
      {
        throw std::invalid_argument(std::string(what) + ": entries must be numbers");
      }
      m(i, k) = x.get<double>();
    }
  }
  return m;
}

json optional_number(const std::optional<double>& x)
{
  return x ? number(*x) : json(nullptr);
}

}  // namespace

json number(double x)
{
  return std::isfinite(x) ? json(x) : json(nullptr);
}

void to_json(json& j, const PointSet& T)
{
  j = json{{"dim", T.dim()}, {"points", matrix_columns(T.matrix())}};
}

void from_json(const json& j, PointSet& T)
{
  const Index dim = j.at("dim").get<Index>();
  if (dim < 1)
  {
    throw std::invalid_argument("point set dim must be >= 1");
  }
  T = PointSet(rows_matrix(j.at("points"), dim, "points").transpose());
}

void to_json(json& j, const PointMap& f)
{
  j = json{{"domain", f.domain()},
           {"image", json{{"dim", f.image_dim()}, {"points", matrix_columns(f.image())}}}};
}

void from_json(const json& j, PointMap& f)
{
  auto domain = j.at("domain").get<PointSet>();
  const json& image = j.at("image");
  const Index dim = image.at("dim").get<Index>();
  f = PointMap(std::move(domain), rows_matrix(image.at("points"), dim, "image").transpose());
}

void to_json(json& j, const AdmissibleChain& chain)
{
  json levels = json::array();
  json reps = json::array();
  json scales = json::array();
  for (const auto& level : chain.levels)
  {
    levels.push_back(level.cells);
    reps.push_back(level.reps);
    scales.push_back(level.scales);
  }
  j = json{{"levels", levels},
           {"reps", reps},
           {"scales", chain.has_scales() ? scales : json(nullptr)},
           {"r", chain.r},
           {"M", chain.M}};
}

void from_json(const json& j, AdmissibleChain& chain)
{
  AdmissibleChain out;
  const json& levels = j.at("levels");
  const json& reps = j.at("reps");
  const json scales = j.value("scales", json(nullptr));
  if (!levels.is_array() || !reps.is_array() || levels.size() != reps.size())
  {
    throw std::invalid_argument("chain needs one reps array per level");
  }
  if (!scales.is_null() && (!scales.is_array() || scales.size() != levels.size()))
  {
    throw std::invalid_argument("chain scales must be null or one array per level");
  }
  for (std::size_t n = 0; n < levels.size(); ++n)
  {
    ChainLevel level;
    level.cells = levels[n].get<std::vector<std::vector<Index>>>();
    level.reps = reps[n].get<std::vector<Index>>();
    if (!scales.is_null())
    {
      level.scales = scales[n].get<std::vector<int>>();
    }
    out.levels.push_back(std::move(level));
  }
  out.r = j.value("r", 4.0);
  out.M = j.value("M", 1.0);
  chain = std::move(out);
}

void to_json(json& j, const BanachModel& model)
{
  j = json{{"d", model.dim()},
           {"functionals", matrix_rows(model.functionals())},
           {"xs", matrix_rows(model.xs())},
           {"ys", matrix_rows(model.ys())}};
}

void from_json(const json& j, BanachModel& model)
{
  const Index d = j.at("d").get<Index>();
  if (d < 1)
  {
    throw std::invalid_argument("model d must be >= 1");
  }
  model = BanachModel(rows_matrix(j.at("functionals"), d, "functionals"),
                      rows_matrix(j.at("xs"), d, "xs"), rows_matrix(j.at("ys"), d, "ys"));
}

void to_json(json& j, const MomentEstimate& e)
{
  j = json{{"value", number(e.value)},
           {"std_error", number(e.std_error)},
           {"method", to_string(e.method)}};
}

void to_json(json& j, const SupEstimate& e)
{
  j = json{{"value", number(e.value)},
           {"std_error", number(e.std_error)},
           {"method", to_string(e.method)}};
}

void to_json(json& j, const TailCheck& c)
{
  j = json{{"prob", number(c.prob)},
           {"bound", number(c.bound)},
           {"threshold", number(c.threshold)},
           {"pass", c.pass}};
}

void to_json(json& j, const GammaValue& g)
{
  j = json{{"value", number(g.value)}, {"method", to_string(g.method)}, {"argmax", g.argmax}};
}

void to_json(json& j, const CertificateReport& r)
{
  j = json{
      {"all_pass", r.all_pass()},
      {"diameter",
       {{"pass", r.diameter.pass},
        {"witness", {r.diameter.s, r.diameter.t}},
        {"distance", number(r.diameter.distance)},
        {"bound", number(r.diameter.bound)}}},
      {"increments",
       {{"pass", r.increments.pass},
        {"level", r.increments.level},
        {"cell", r.increments.cell},
        {"parent", r.increments.parent},
        {"point", r.increments.point},
        {"reason", r.increments.reason},
        {"max_ratio", number(r.increments.max_ratio)}}},
      {"budget",
       {{"pass", r.budget.pass},
        {"applicable", r.budget.applicable},
        {"sup_sum", number(r.budget.sup_sum)},
        {"sup_sum_finite", std::isfinite(r.budget.sup_sum)},
        {"L_hat", number(r.budget.L_hat)},
        {"point", r.budget.point}}},
      {"complement",
       {{"pass", r.complement.pass},
        {"max_ratio", number(r.complement.max_ratio)},
        {"level", r.complement.level},
        {"point", r.complement.point},
        {"size", r.complement.size},
        {"bound", number(r.complement.bound)}}},
  };
}

void to_json(json& j, const IncrementRatios& r)
{
  json cells = json::array();
  for (const auto& c : r.cells)
  {
    cells.push_back(
        {{"level", c.level}, {"cell", c.cell}, {"point", c.point}, {"ratio", number(c.ratio)}});
  }
  j = json{{"max_ratio", number(r.max_ratio)}, {"cells", cells}};
}

void to_json(json& j, const PushForward& p)
{
  json pairs = json::array();
  for (const auto& [s, t] : p.coinciding)
  {
    pairs.push_back({s, t});
  }
  j = json{{"chain", p.chain},
           {"image", json{{"dim", p.image_points.rows()},
                          {"points", matrix_columns(p.image_points)}}},
           {"ratios", p.ratios},
           {"coinciding", pairs},
           {"cells_merged", p.cells_merged}};
}

void to_json(json& j, const ComparisonReport& r)
{
  j = json{{"condition", to_string(r.condition)},
           {"constant", number(r.constant)},
           {"constant_infinite", std::isinf(r.constant)},
           {"witness", {{"s", r.s}, {"t", r.t}, {"p", optional_number(r.p)}, {"r", optional_number(r.r)}}},
           {"p_grid", r.p_grid},
           {"r_grid", r.r_grid},
           {"method", r.method ? json(to_string(*r.method)) : json(nullptr)}};
}

void to_json(json& j, const MelaResult& r)
{
  j = json{{"pass", r.pass}, {"C", r.C}, {"report", r.report}};
}

void to_json(json& j, const EmpiricalComparison& r)
{
  j = json{{"domain", r.domain},
           {"image", r.image},
           {"ratio", number(r.ratio)},
           {"std_error", number(r.std_error)},
           {"applicable", r.applicable}};
}

void to_json(json& j, const DecompositionReport& r)
{
  j = json{{"residual_size", r.residual.size()},
           {"kept_size", r.kept.size()},
           {"residual_gamma", r.residual_gamma},
           {"kept_gamma", r.kept_gamma},
           {"l1_radius", number(r.l1_radius)},
           {"total", number(r.total)},
           {"lower_ratio", number(r.lower_ratio)},
           {"upper_ratio", number(r.upper_ratio)}};
}

void to_json(json& j, const WeakReport& r)
{
  j = json{{"constant", number(r.constant)},
           {"infinite", r.infinite},
           {"lower_bound", true},
           {"direction", r.direction},
           {"p", r.p},
           {"method", to_string(r.method)},
           {"directions_tested", r.directions_tested}};
}

void to_json(json& j, const StrongRatio& r)
{
  j = json{{"x_side", r.x_side},
           {"y_side", r.y_side},
           {"ratio", number(r.ratio)},
           {"std_error", number(r.std_error)},
           {"applicable", r.applicable}};
}

void to_json(json& j, const OntoCheck& r)
{
  j = json{{"onto", r.onto}, {"rank", r.rank}, {"rel_tolerance", kRankTolerance}};
}

void to_json(json& j, const Ole6Report& r)
{
  j = json{{"constant", number(r.constant)},
           {"direction", r.direction},
           {"p", r.p},
           {"method", to_string(r.method)}};
}

void to_json(json& j, const TailDomination& r)
{
  j = json{{"constant", number(r.constant)},
           {"infinite", r.infinite},
           {"direction", r.direction},
           {"u", number(r.u)}};
}

void to_json(json& j, const DominationReport& r)
{
  j = json{{"weak", r.weak},
           {"strong", r.strong},
           {"k_ratio", number(r.k_ratio)},
           {"k_ratio_flagged", r.k_ratio_flagged}};
}

json read_json_file(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw std::invalid_argument("cannot open " + path.string());
  }
  try
  {
    return json::parse(in);
  }
  catch (const json::parse_error& e)
  {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j)
{
  if (path.has_parent_path())
  {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out)
  {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << j.dump(2) << '\n';
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows)
{
  if (path.has_parent_path())
  {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out)
  {
    throw std::runtime_error("cannot write " + path.string());
  }
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k)
    {
      out << (k ? "," : "") << cells[k];
    }
    out << '\n';
  };
  line(header);
  for (const auto& row : rows)
  {
    line(row);
  }
}

std::string format_number(double x)
{
  if (std::isnan(x))
  {
    return "nan";
  }
  if (std::isinf(x))
  {
    return x > 0 ? "inf" : "-inf";
  }
  return json(x).dump();
}

std::vector<double> parse_number_list(std::string_view text)
{
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size())
  {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    std::string item(text.substr(pos, comma - pos));
    if (item.empty())
    {
      throw std::invalid_argument("empty entry in number list '" + std::string(text) + "'");
    }
    std::size_t used = 0;
    double value = 0.0;
    try
    {
      value = std::stod(item, &used);
    }
    catch (const std::exception&)
    {
      used = 0;
    }
    if (used != item.size() || !std::isfinite(value))
    {
      throw std::invalid_argument("not a finite number: '" + item + "'");
    }
    out.push_back(value);
    pos = comma + 1;
  }
  return out;
}

}  // namespace blab
