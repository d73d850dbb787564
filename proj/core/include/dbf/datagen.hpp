#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dbf/core.hpp"

namespace dbf {

/// SplitMix64 generator. State update: state += 0x9E3779B97F4A7C15; output
/// z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
/// z = (z ^ (z >> 27)) * 0x94D049BB133111EB; z ^ (z >> 31).
/// Uniforms are ((z >> 11) + 0.5) * 2^-53, strictly inside (0, 1).
/// Normals use Box-Muller on two uniforms (u1 radius, u2 angle), returning
/// the cosine branch first and caching the sine branch.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  double uniform();
  double normal();

 private:
  std::uint64_t state_;
  std::optional<double> cached_normal_;
};

enum class DatasetKind { kAds1, kAds2, kAds3, kAds4, kMarkov };

std::optional<DatasetKind> parse_dataset(const std::string& name);
std::string to_string(DatasetKind kind);

struct GeneratorSpec {
  DatasetKind which = DatasetKind::kAds1;
  std::size_t length = 3000;
  std::uint64_t seed = 1;
  double sigma = 0.05;
  // Markov chain parameters.
  int markov_states = 5;
  double markov_p = 0.5;

  void validate() const;
};

struct GeneratedSeries {
  TimeSeries series;
  /// E[Y_t | Y_{t-1}] = alpha_t Y_{t-1} for t = 1..T (empty for Markov).
  std::vector<double> conditional_mean;
  /// Regime i(t) in {1, 2} for ads3; state path for Markov; empty otherwise.
  std::vector<int> hidden_states;
};

/// AR coefficient of the regime-free generators at (1-based) time t.
double ads_coefficient(DatasetKind kind, std::size_t t);

/// Y_0 = 0, then Y_t = alpha_t Y_{t-1} + eps_t for t = 1..T. For ads3 each
/// step t >= 2 first draws one uniform for the regime (stay with probability
/// 0.99995^tau, tau = current run length) and then the Gaussian innovation.
GeneratedSeries generate(const GeneratorSpec& spec);

/// States X_1..X_T on {0..N-1}; X_1 uniform unless `start` is given; each
/// step moves to (i - 1) mod N with probability p, else (i + 1) mod N.
std::vector<int> generate_markov(int states, double p, std::size_t length, std::uint64_t seed,
                                 std::optional<int> start = std::nullopt);

}  // namespace dbf
