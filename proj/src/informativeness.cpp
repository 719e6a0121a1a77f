#include "infoiter/informativeness.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <map>

#include "infoiter/errors.hpp"

namespace infoiter {

namespace {

std::pair<double, double> mean_and_variance(std::span<const double> xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, ss / static_cast<double>(xs.size() - 1)};
}

std::vector<ScalarValue> draw_outputs(const ToolSpec& tool, const HypothesisGenerator& gen,
                                      std::size_t reps, std::uint64_t seed, std::uint64_t stream) {
  std::vector<ScalarValue> out;
  out.reserve(reps);
  for (std::size_t i = 0; i < reps; ++i) {
    Dataset data;
    try {
      data = gen.sample(derive_seed(seed, stream, i));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::GenError) throw;
      throw Error(ErrorCode::GenError, std::string("generator failed: ") + e.what());
    }
    out.push_back(apply_tool(tool, data));
  }
  return out;
}

}  // namespace

WelchResult welch_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(ErrorCode::ParamError, "welch test needs at least two values per sample");
  }
  WelchResult r;
  auto [ma, va] = mean_and_variance(a);
  auto [mb, vb] = mean_and_variance(b);
  r.mean_a = ma;
  r.mean_b = mb;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double sa = va / na;
  const double sb = vb / nb;
  r.std_error = std::sqrt(sa + sb);
  if (r.std_error == 0.0) {
    r.df = na + nb - 2;
    r.t = ma == mb ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), ma - mb);
    r.p_value = ma == mb ? 1.0 : 0.0;
    return r;
  }
  r.t = (ma - mb) / r.std_error;
  r.df = (sa + sb) * (sa + sb) / (sa * sa / (na - 1) + sb * sb / (nb - 1));
  boost::math::students_t dist(r.df);
  r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t)));
  return r;
}

ChiSquareResult chi_square_homogeneity(const std::vector<std::string>& a,
                                       const std::vector<std::string>& b) {
  std::map<std::string, std::pair<double, double>> counts;
  for (const auto& s : a) counts[s].first += 1;
  for (const auto& s : b) counts[s].second += 1;
  ChiSquareResult r;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double total = na + nb;
  if (counts.size() < 2 || na == 0 || nb == 0) return r;
  for (const auto& [_, c] : counts) {
    const double col = c.first + c.second;
    const double ea = na * col / total;
    const double eb = nb * col / total;
    r.statistic += (c.first - ea) * (c.first - ea) / ea + (c.second - eb) * (c.second - eb) / eb;
  }
  r.df = static_cast<double>(counts.size() - 1);
  boost::math::chi_squared dist(r.df);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

InformativenessVerdict informativeness_check(const ToolSpec& tool, const HypothesisGenerator& h1,
                                             const HypothesisGenerator& h2,
                                             const InformativenessOptions& options) {
  if (options.n_replicates < 100) {
    throw Error(ErrorCode::ParamError, "informativeness check needs at least 100 replicates");
  }
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
    throw Error(ErrorCode::ParamError, "alpha must lie in (0, 1)");
  }
  h1.validate();
  h2.validate();

  const auto out1 = draw_outputs(tool, h1, options.n_replicates, options.seed, 1);
  const auto out2 = draw_outputs(tool, h2, options.n_replicates, options.seed, 2);

  InformativenessVerdict v;
  v.n_replicates = options.n_replicates;

  if (tool.output_kind == ScalarKind::Label) {
    std::vector<std::string> a, b;
    for (const auto& y : out1) a.push_back(std::get<std::string>(y));
    for (const auto& y : out2) b.push_back(std::get<std::string>(y));
    const auto r = chi_square_homogeneity(a, b);
    v.method = "chi-square";
    v.p_value = r.p_value;
    v.informative = r.df > 0 && r.p_value < options.alpha;
    double critical = 0.0;
    if (r.df > 0) {
      critical = boost::math::quantile(boost::math::chi_squared(r.df), 1.0 - options.alpha);
    }
    v.ci_separation = r.statistic - critical;
    // Means of labels are undefined.
    v.mean_h1 = std::numeric_limits<double>::quiet_NaN();
    v.mean_h2 = std::numeric_limits<double>::quiet_NaN();
    return v;
  }

  std::vector<double> a, b;
  a.reserve(out1.size());
  b.reserve(out2.size());
  auto as_double = [](const ScalarValue& y) {
    if (const auto* i = std::get_if<std::int64_t>(&y)) return static_cast<double>(*i);
    return std::get<double>(y);
  };
  for (const auto& y : out1) a.push_back(as_double(y));
  for (const auto& y : out2) b.push_back(as_double(y));

  const auto r = welch_test(a, b);
  v.method = "welch";
  v.mean_h1 = r.mean_a;
  v.mean_h2 = r.mean_b;
  v.p_value = r.p_value;
  v.informative = r.p_value < options.alpha;
  double half_width = 0.0;
  if (r.std_error > 0.0) {
    half_width = r.std_error *
                 boost::math::quantile(boost::math::students_t(r.df), 1.0 - options.alpha / 2.0);
  }
  v.ci_separation = std::fabs(r.mean_a - r.mean_b) - half_width;
  return v;
}

}  // namespace infoiter
