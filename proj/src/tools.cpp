#include "infoiter/tools.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "infoiter/errors.hpp"

namespace infoiter {

namespace {

const std::string& param(const ToolParams& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) throw Error(ErrorCode::ParamError, "missing parameter '" + key + "'");
  return it->second;
}

double real_param(const ToolParams& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  double v{};
  const std::string& s = it->second;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::ParamError, "parameter '" + key + "' is not a number: '" + s + "'");
  }
  return v;
}

const Column& numeric_column(const Dataset& data, const std::string& name) {
  const Column& col = data.column(name);
  if (col.kind() == ScalarKind::Label) {
    throw Error(ErrorCode::ParamError, "column '" + name + "' holds labels, a numeric column is required");
  }
  return col;
}

std::vector<double> present_values(const Column& col) {
  std::vector<double> out;
  out.reserve(col.size());
  for (std::size_t i = 0; i < col.size(); ++i) {
    if (!col.is_missing(i)) out.push_back(col.numeric(i));
  }
  return out;
}

std::int64_t sign_of(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

OutcomeSpace sign_space() {
  return normalize(FiniteSet{{std::int64_t{-1}, std::int64_t{0}, std::int64_t{1}}});
}

OutcomeSpace counts_space() { return normalize(IntegerRange{std::int64_t{0}, std::nullopt}); }

ToolDefinition row_count_tool() {
  ToolDefinition d;
  d.id = "row_count";
  d.description = "number of rows in the dataset";
  d.output_kind = ScalarKind::Integer;
  d.intrinsic_space = [](const ToolParams&) { return counts_space(); };
  d.apply = [](const ToolParams&, const Dataset& data) -> ScalarValue {
    return static_cast<std::int64_t>(data.rows());
  };
  return d;
}

ToolDefinition sample_mean_tool() {
  ToolDefinition d;
  d.id = "sample_mean";
  d.description = "arithmetic mean of the non-missing cells of a numeric column";
  d.output_kind = ScalarKind::Real;
  d.required_params = {"column"};
  d.intrinsic_space = [](const ToolParams&) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return normalize(RealInterval{-inf, inf, false, false});
  };
  d.apply = [](const ToolParams& params, const Dataset& data) -> ScalarValue {
    const auto values = present_values(numeric_column(data, param(params, "column")));
    if (values.empty()) {
      throw Error(ErrorCode::ToolDomainError, "sample_mean of a column with no present values");
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
  };
  return d;
}

ToolDefinition correlation_sign_tool() {
  ToolDefinition d;
  d.id = "correlation_sign";
  d.description = "sign of the Pearson correlation between two numeric columns";
  d.output_kind = ScalarKind::Integer;
  d.required_params = {"col_a", "col_b"};
  d.intrinsic_space = [](const ToolParams&) { return sign_space(); };
  d.apply = [](const ToolParams& params, const Dataset& data) -> ScalarValue {
    const Column& a = numeric_column(data, param(params, "col_a"));
    const Column& b = numeric_column(data, param(params, "col_b"));
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < data.rows(); ++i) {
      if (a.is_missing(i) || b.is_missing(i)) continue;
      xs.push_back(a.numeric(i));
      ys.push_back(b.numeric(i));
    }
    if (xs.size() < 2) {
      throw Error(ErrorCode::ToolDomainError, "correlation needs at least two complete rows");
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double dx = xs[i] - mx;
      const double dy = ys[i] - my;
      sxx += dx * dx;
      syy += dy * dy;
      sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
      throw Error(ErrorCode::ToolDomainError, "correlation is undefined for a zero-variance column");
    }
    // sign(r) == sign(sxy) since both denominators are positive.
    return sign_of(sxy);
  };
  return d;
}

ToolDefinition missing_count_tool() {
  ToolDefinition d;
  d.id = "missing_count";
  d.description = "number of missing cells in a column";
  d.output_kind = ScalarKind::Integer;
  d.required_params = {"column"};
  d.intrinsic_space = [](const ToolParams&) { return counts_space(); };
  d.apply = [](const ToolParams& params, const Dataset& data) -> ScalarValue {
    std::size_t count = data.column(param(params, "column")).missing_count();
    if (count > data.rows()) {
      throw Error(ErrorCode::ToolContractError, "missing_count exceeds the row count");
    }
    return static_cast<std::int64_t>(count);
  };
  return d;
}

ToolDefinition skewness_sign_tool() {
  ToolDefinition d;
  d.id = "skewness_sign";
  d.description = "sign of the sample skewness m3 / m2^1.5, zero inside the band [-tau, tau]";
  d.output_kind = ScalarKind::Integer;
  d.required_params = {"column"};
  d.optional_params = {"tau"};
  d.intrinsic_space = [](const ToolParams&) { return sign_space(); };
  d.apply = [](const ToolParams& params, const Dataset& data) -> ScalarValue {
    const double tau = real_param(params, "tau", kDefaultSkewnessBand);
    if (tau < 0) throw Error(ErrorCode::ParamError, "tau must be non-negative");
    const auto values = present_values(numeric_column(data, param(params, "column")));
    if (values.size() < 2) {
      throw Error(ErrorCode::ToolDomainError, "skewness needs at least two present values");
    }
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double m2 = 0.0, m3 = 0.0;
    for (double v : values) {
      const double dv = v - mean;
      m2 += dv * dv;
      m3 += dv * dv * dv;
    }
    m2 /= n;
    m3 /= n;
    if (m2 == 0.0) throw Error(ErrorCode::ToolDomainError, "skewness of a constant column");
    const double g1 = m3 / std::pow(m2, 1.5);
    if (g1 > tau) return std::int64_t{1};
    if (g1 < -tau) return std::int64_t{-1};
    return std::int64_t{0};
  };
  return d;
}

}  // namespace

ToolRegistry ToolRegistry::with_builtins() {
  ToolRegistry r;
  r.add(row_count_tool());
  r.add(sample_mean_tool());
  r.add(correlation_sign_tool());
  r.add(missing_count_tool());
  r.add(skewness_sign_tool());
  return r;
}

const ToolRegistry& ToolRegistry::builtin() {
  static const ToolRegistry registry = with_builtins();
  return registry;
}

void ToolRegistry::add(ToolDefinition definition) {
  std::string id = definition.id;
  tools_[id] = std::make_shared<const ToolDefinition>(std::move(definition));
}

bool ToolRegistry::has(const std::string& id) const { return tools_.count(id) != 0; }

std::vector<std::shared_ptr<const ToolDefinition>> ToolRegistry::list() const {
  std::vector<std::shared_ptr<const ToolDefinition>> out;
  for (const auto& [_, def] : tools_) out.push_back(def);
  return out;
}

ToolSpec ToolRegistry::make_spec(const std::string& id, ToolParams params, bool require_all) const {
  auto it = tools_.find(id);
  if (it == tools_.end()) throw Error(ErrorCode::ParamError, "unknown tool '" + id + "'");
  const auto& def = it->second;

  for (const auto& [key, _] : params) {
    bool known = key == "space" ||
                 std::find(def->required_params.begin(), def->required_params.end(), key) !=
                     def->required_params.end() ||
                 std::find(def->optional_params.begin(), def->optional_params.end(), key) !=
                     def->optional_params.end();
    if (!known) throw Error(ErrorCode::ParamError, "tool '" + id + "' has no parameter '" + key + "'");
  }
  for (const auto& key : def->required_params) {
    if (require_all && !params.count(key)) {
      throw Error(ErrorCode::ParamError, "tool '" + id + "' requires parameter '" + key + "'");
    }
  }

  ToolSpec spec;
  spec.tool_id = id;
  spec.output_kind = def->output_kind;
  spec.intrinsic_space = def->intrinsic_space(params);
  spec.declared_space = spec.intrinsic_space;
  if (auto s = params.find("space"); s != params.end()) {
    OutcomeSpace narrowed = parse_set(s->second, def->output_kind);
    if (!is_subset(narrowed, spec.intrinsic_space)) {
      throw Error(ErrorCode::ParamError, "space " + to_string(narrowed) +
                                             " is not inside the outcome space of '" + id +
                                             "' " + to_string(spec.intrinsic_space));
    }
    spec.declared_space = std::move(narrowed);
    // Store the canonical text so logs carry one spelling per space.
    s->second = to_string(spec.declared_space);
  }
  spec.params = std::move(params);
  spec.definition = def;
  return spec;
}

ToolSpec make_tool(const std::string& id, ToolParams params) {
  return ToolRegistry::builtin().make_spec(id, std::move(params));
}

ScalarValue apply_tool(const ToolSpec& tool, const Dataset& data) {
  if (!tool.definition) throw Error(ErrorCode::ParamError, "tool spec has no definition");
  ScalarValue y = tool.definition->apply(tool.params, data);
  if (kind_of(y) != tool.output_kind || !contains(tool.intrinsic_space, y)) {
    throw Error(ErrorCode::ToolContractError,
                "tool '" + tool.tool_id + "' produced " + format_scalar(y) +
                    " outside its outcome space " + to_string(tool.intrinsic_space));
  }
  return y;
}

}  // namespace infoiter
