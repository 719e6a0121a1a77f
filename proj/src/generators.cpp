#include "infoiter/generators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "infoiter/errors.hpp"

namespace infoiter {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct MechanismInfo {
  Mechanism mechanism;
  std::string_view name;
  std::vector<std::string_view> params;
};

const std::vector<MechanismInfo>& mechanisms() {
  static const std::vector<MechanismInfo> table = {
      {Mechanism::Normal, "normal", {"mu", "sigma"}},
      {Mechanism::Poisson, "poisson", {"lambda"}},
      {Mechanism::Uniform, "uniform", {"a", "b"}},
      {Mechanism::Bernoulli, "bernoulli", {"p"}},
      {Mechanism::Exponential, "exponential", {"rate"}},
      {Mechanism::BivariateNormal, "bvnormal", {"rho"}},
      {Mechanism::Replay, "replay", {}},
  };
  return table;
}

const MechanismInfo& info(Mechanism m) {
  for (const auto& i : mechanisms()) {
    if (i.mechanism == m) return i;
  }
  throw Error(ErrorCode::GenError, "unknown mechanism");
}

[[noreturn]] void gen_fail(const std::string& what) { throw Error(ErrorCode::GenError, what); }

double get(const HypothesisGenerator& g, const char* key) {
  auto it = g.params.find(key);
  if (it == g.params.end()) {
    gen_fail(std::string(mechanism_name(g.mechanism)) + " requires parameter '" + key + "'");
  }
  return it->second;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void apply_missingness(Dataset& data, double rate, std::mt19937_64& rng) {
  if (rate <= 0.0) return;
  std::bernoulli_distribution blank(rate);
  std::vector<Column> cols;
  for (const auto& src : data.columns()) {
    Column col(src.name(), src.kind());
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (src.is_missing(i) || blank(rng)) {
        col.push_missing();
      } else {
        col.push(src.value(i));
      }
    }
    cols.push_back(std::move(col));
  }
  data = Dataset(std::move(cols));
}

}  // namespace

std::string_view mechanism_name(Mechanism m) { return info(m).name; }

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(base) ^ stream) ^ index);
}

void HypothesisGenerator::validate() const {
  if (!(missing >= 0.0 && missing < 1.0)) gen_fail("missing rate must lie in [0, 1)");
  if (mechanism == Mechanism::Replay) {
    if (!fixed) gen_fail("replay generator has no dataset");
    return;
  }
  for (const auto& [key, value] : params) {
    const auto& allowed = info(mechanism).params;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      gen_fail(std::string(mechanism_name(mechanism)) + " has no parameter '" + key + "'");
    }
    if (!std::isfinite(value)) gen_fail("parameter '" + key + "' must be finite");
  }
  if (n == 0) gen_fail("sample size n must be positive");
  switch (mechanism) {
    case Mechanism::Normal:
      get(*this, "mu");
      if (!(get(*this, "sigma") > 0)) gen_fail("normal sigma must be positive");
      break;
    case Mechanism::Poisson:
      if (!(get(*this, "lambda") > 0)) gen_fail("poisson lambda must be positive");
      break;
    case Mechanism::Uniform:
      if (!(get(*this, "a") < get(*this, "b"))) gen_fail("uniform requires a < b");
      break;
    case Mechanism::Bernoulli: {
      double p = get(*this, "p");
      if (!(p >= 0 && p <= 1)) gen_fail("bernoulli p must lie in [0, 1]");
      break;
    }
    case Mechanism::Exponential:
      if (!(get(*this, "rate") > 0)) gen_fail("exponential rate must be positive");
      break;
    case Mechanism::BivariateNormal: {
      double rho = get(*this, "rho");
      if (!(rho >= -1 && rho <= 1)) gen_fail("bvnormal rho must lie in [-1, 1]");
      break;
    }
    case Mechanism::Replay: break;
  }
}

Dataset HypothesisGenerator::sample(std::uint64_t seed) const {
  validate();
  std::mt19937_64 rng(seed);
  Dataset data;
  auto univariate = [&](ScalarKind kind, auto&& draw) {
    Column col("x", kind);
    for (std::size_t i = 0; i < n; ++i) col.push(draw());
    std::vector<Column> cols;
    cols.push_back(std::move(col));
    return Dataset(std::move(cols));
  };
  switch (mechanism) {
    case Mechanism::Normal: {
      std::normal_distribution<double> d(get(*this, "mu"), get(*this, "sigma"));
      data = univariate(ScalarKind::Real, [&] { return ScalarValue(d(rng)); });
      break;
    }
    case Mechanism::Poisson: {
      std::poisson_distribution<std::int64_t> d(get(*this, "lambda"));
      data = univariate(ScalarKind::Integer, [&] { return ScalarValue(d(rng)); });
      break;
    }
    case Mechanism::Uniform: {
      std::uniform_real_distribution<double> d(get(*this, "a"), get(*this, "b"));
      data = univariate(ScalarKind::Real, [&] { return ScalarValue(d(rng)); });
      break;
    }
    case Mechanism::Bernoulli: {
      std::bernoulli_distribution d(get(*this, "p"));
      data = univariate(ScalarKind::Integer,
                        [&] { return ScalarValue(static_cast<std::int64_t>(d(rng))); });
      break;
    }
    case Mechanism::Exponential: {
      std::exponential_distribution<double> d(get(*this, "rate"));
      data = univariate(ScalarKind::Real, [&] { return ScalarValue(d(rng)); });
      break;
    }
    case Mechanism::BivariateNormal: {
      const double rho = get(*this, "rho");
      const double coef = std::sqrt(std::max(0.0, 1.0 - rho * rho));
      std::normal_distribution<double> z(0.0, 1.0);
      Column x("x", ScalarKind::Real);
      Column y("y", ScalarKind::Real);
      for (std::size_t i = 0; i < n; ++i) {
        const double z1 = z(rng);
        const double z2 = z(rng);
        x.push(z1);
        y.push(rho * z1 + coef * z2);
      }
      std::vector<Column> cols;
      cols.push_back(std::move(x));
      cols.push_back(std::move(y));
      data = Dataset(std::move(cols));
      break;
    }
    case Mechanism::Replay:
      data = *fixed;
      break;
  }
  apply_missingness(data, missing, rng);
  return data;
}

HypothesisGenerator parse_generator(std::string_view text, std::string hypothesis_id) {
  const auto open = text.find('(');
  const auto close = text.rfind(')');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open ||
      !trim(text.substr(close + 1)).empty()) {
    gen_fail("generator spec must look like name(key=value, ...): '" + std::string(text) + "'");
  }
  const std::string name = trim(text.substr(0, open));
  HypothesisGenerator g;
  g.hypothesis_id = std::move(hypothesis_id);
  bool found = false;
  for (const auto& i : mechanisms()) {
    if (i.name == name) {
      g.mechanism = i.mechanism;
      found = true;
    }
  }
  if (!found) gen_fail("unknown generator mechanism '" + name + "'");

  std::string body(text.substr(open + 1, close - open - 1));
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) gen_fail("expected key=value, got '" + trim(item) + "'");
    std::string key = trim(std::string_view(item).substr(0, eq));
    std::string value = trim(std::string_view(item).substr(eq + 1));
    if (key == "path") {
      g.source_path = value;
      continue;
    }
    double v{};
    auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
      gen_fail("parameter '" + key + "' is not a number: '" + value + "'");
    }
    if (key == "n") {
      if (!(v >= 1) || v != std::floor(v)) gen_fail("n must be a positive integer");
      g.n = static_cast<std::size_t>(v);
    } else if (key == "missing") {
      g.missing = v;
    } else {
      g.params[key] = v;
    }
  }
  if (g.mechanism == Mechanism::Replay) {
    if (g.source_path.empty()) gen_fail("replay requires path=<csv file>");
    try {
      g.fixed = std::make_shared<const Dataset>(load_csv(g.source_path));
    } catch (const Error& e) {
      gen_fail("replay dataset could not be loaded: " + std::string(e.what()));
    }
    g.n = g.fixed->rows();
  }
  g.validate();
  return g;
}

std::string to_string(const HypothesisGenerator& gen) {
  std::string out(mechanism_name(gen.mechanism));
  out += "(";
  bool first = true;
  auto add = [&](const std::string& kv) {
    if (!first) out += ", ";
    out += kv;
    first = false;
  };
  if (gen.mechanism == Mechanism::Replay) {
    add("path=" + gen.source_path);
  } else {
    for (const auto& key : info(gen.mechanism).params) {
      auto it = gen.params.find(std::string(key));
      if (it != gen.params.end()) add(std::string(key) + "=" + format_number(it->second));
    }
    add("n=" + std::to_string(gen.n));
  }
  if (gen.missing > 0) add("missing=" + format_number(gen.missing));
  out += ")";
  return out;
}

HypothesisGenerator fixed_dataset_generator(Dataset data, std::string hypothesis_id) {
  HypothesisGenerator g;
  g.hypothesis_id = std::move(hypothesis_id);
  g.mechanism = Mechanism::Replay;
  g.n = data.rows();
  g.fixed = std::make_shared<const Dataset>(std::move(data));
  return g;
}

}  // namespace infoiter
