#pragma once

// Analytic tools: T maps a dataset to one scalar output inside a declared
// complete outcome space.
//
// Every tool has an intrinsic space (all outputs the implementation can ever
// produce). A ToolSpec may narrow it with the `space` parameter, which is how
// an analyst states assumptions such as "this mean is non-negative". Outputs
// outside the intrinsic space are engine bugs (ToolContractError); outputs
// outside a narrowed space falsify the analyst's model and surface as
// ModelViolation during classification.

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "infoiter/dataset.hpp"
#include "infoiter/outcome.hpp"

namespace infoiter {

using ToolParams = std::map<std::string, std::string>;

struct ToolDefinition {
  std::string id;
  std::string description;
  ScalarKind output_kind;
  std::vector<std::string> required_params;
  std::vector<std::string> optional_params;
  std::function<OutcomeSpace(const ToolParams&)> intrinsic_space;
  std::function<ScalarValue(const ToolParams&, const Dataset&)> apply;
};

struct ToolSpec {
  std::string tool_id;
  ToolParams params;
  ScalarKind output_kind = ScalarKind::Integer;
  OutcomeSpace intrinsic_space;
  OutcomeSpace declared_space;
  std::shared_ptr<const ToolDefinition> definition;

  friend bool operator==(const ToolSpec& a, const ToolSpec& b) {
    return a.tool_id == b.tool_id && a.params == b.params && a.output_kind == b.output_kind &&
           a.intrinsic_space == b.intrinsic_space && a.declared_space == b.declared_space;
  }
};

class ToolRegistry {
 public:
  /// Registry preloaded with row_count, sample_mean, correlation_sign,
  /// missing_count and skewness_sign.
  static ToolRegistry with_builtins();
  /// Process-wide built-in registry.
  static const ToolRegistry& builtin();

  void add(ToolDefinition definition);
  bool has(const std::string& id) const;
  std::vector<std::shared_ptr<const ToolDefinition>> list() const;

  /// Throws ParamError for unknown tools, unknown or missing parameters, and
  /// a `space` override that is not inside the intrinsic space. With
  /// require_all false, absent required parameters are accepted; planning
  /// needs only the space, and apply reports them later.
  ToolSpec make_spec(const std::string& id, ToolParams params = {}, bool require_all = true) const;

 private:
  std::map<std::string, std::shared_ptr<const ToolDefinition>> tools_;
};

/// make_spec against the built-in registry.
ToolSpec make_tool(const std::string& id, ToolParams params = {});

/// Applies the tool. Throws ParamError for missing or wrongly typed columns,
/// ToolDomainError when the statistic is undefined on this data, and
/// ToolContractError when the output escapes the intrinsic space.
ScalarValue apply_tool(const ToolSpec& tool, const Dataset& data);

/// Default zero band for skewness_sign.
inline constexpr double kDefaultSkewnessBand = 0.05;

}  // namespace infoiter
