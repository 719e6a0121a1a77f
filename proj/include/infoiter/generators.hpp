#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>

#include "infoiter/dataset.hpp"

namespace infoiter {

enum class Mechanism { Normal, Poisson, Uniform, Bernoulli, Exponential, BivariateNormal, Replay };

std::string_view mechanism_name(Mechanism m);

/// A sampleable stand-in for the data-generating distribution under one
/// hypothesis. Univariate mechanisms emit a single column "x"; the bivariate
/// normal emits standard normal columns "x" and "y" with correlation rho;
/// replay returns a fixed dataset. Any mechanism can additionally blank each
/// cell independently with probability `missing`.
///
/// Parameters by mechanism:
///   normal(mu, sigma)   poisson(lambda)   uniform(a, b)   bernoulli(p)
///   exponential(rate)   bvnormal(rho)     replay(path)
struct HypothesisGenerator {
  std::string hypothesis_id;
  Mechanism mechanism = Mechanism::Normal;
  std::map<std::string, double> params;
  std::size_t n = 0;
  double missing = 0.0;
  std::string source_path;
  std::shared_ptr<const Dataset> fixed;

  /// Throws GenError on invalid parameters.
  void validate() const;

  /// Deterministic in `seed`.
  Dataset sample(std::uint64_t seed) const;

  friend bool operator==(const HypothesisGenerator& a, const HypothesisGenerator& b) {
    return a.hypothesis_id == b.hypothesis_id && a.mechanism == b.mechanism &&
           a.params == b.params && a.n == b.n && a.missing == b.missing &&
           a.source_path == b.source_path;
  }
};

/// Parses the compact form, e.g. `poisson(lambda=2, n=200)`,
/// `bvnormal(rho=0.6, n=100, missing=0.1)`, `replay(path=data.csv)`.
/// Throws GenError.
HypothesisGenerator parse_generator(std::string_view text, std::string hypothesis_id = "");

/// Inverse of parse_generator.
std::string to_string(const HypothesisGenerator& gen);

HypothesisGenerator fixed_dataset_generator(Dataset data, std::string hypothesis_id = "");

/// Counter-based seed derivation: a stable 64-bit seed for replicate `index`
/// of stream `stream`, independent of evaluation order.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index);

}  // namespace infoiter
