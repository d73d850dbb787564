#include "dbf/datagen.hpp"

#include <cmath>
#include <numbers>

namespace dbf {

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() {
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double SplitMix64::normal() {
  if (cached_normal_) {
    const double z = *cached_normal_;
    cached_normal_.reset();
    return z;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_normal_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

std::optional<DatasetKind> parse_dataset(const std::string& name) {
  if (name == "ads1") return DatasetKind::kAds1;
  if (name == "ads2") return DatasetKind::kAds2;
  if (name == "ads3") return DatasetKind::kAds3;
  if (name == "ads4") return DatasetKind::kAds4;
  if (name == "markov") return DatasetKind::kMarkov;
  return std::nullopt;
}

std::string to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::kAds1: return "ads1";
    case DatasetKind::kAds2: return "ads2";
    case DatasetKind::kAds3: return "ads3";
    case DatasetKind::kAds4: return "ads4";
    case DatasetKind::kMarkov: return "markov";
  }
  return "unknown";
}

void GeneratorSpec::validate() const {
  require(length >= 2, ErrorKind::kInvalidArgument, "generated series need T >= 2");
  require(sigma > 0.0 && std::isfinite(sigma), ErrorKind::kInvalidArgument, "sigma must be positive");
  if (which == DatasetKind::kMarkov) {
    require(markov_states >= 2, ErrorKind::kInvalidArgument, "Markov chain needs N >= 2");
    require(markov_p >= 0.0 && markov_p <= 1.0, ErrorKind::kInvalidArgument, "Markov p must lie in [0, 1]");
  }
}

double ads_coefficient(DatasetKind kind, std::size_t t) {
  switch (kind) {
    case DatasetKind::kAds1: return (t >= 1000 && t <= 2000) ? -0.9 : 0.9;
    case DatasetKind::kAds2: return 1.0 - static_cast<double>(t) / 1500.0;
    case DatasetKind::kAds4: return -0.5;
    default: break;
  }
  fail(ErrorKind::kInvalidArgument, "dataset has no deterministic AR coefficient");
}

namespace {

constexpr double kAds3Stay = 0.99995;
constexpr double kAds3Alpha[2] = {-0.5, 0.9};

}  // namespace

GeneratedSeries generate(const GeneratorSpec& spec) {
  spec.validate();
  if (spec.which == DatasetKind::kMarkov) {
    std::vector<int> path = generate_markov(spec.markov_states, spec.markov_p, spec.length, spec.seed);
    std::vector<double> values(path.begin(), path.end());
    return {TimeSeries(std::move(values)), {}, std::move(path)};
  }

  SplitMix64 rng(spec.seed);
  std::vector<double> values;
  std::vector<double> means;
  std::vector<int> regimes;
  values.reserve(spec.length);
  means.reserve(spec.length);
  double previous = 0.0;
  int regime = 1;
  long run_length = 1;
  for (std::size_t t = 1; t <= spec.length; ++t) {
    double alpha = 0.0;
    if (spec.which == DatasetKind::kAds3) {
      if (t >= 2) {
        const double stay = std::pow(kAds3Stay, static_cast<double>(run_length));
        if (rng.uniform() < stay) {
          ++run_length;
        } else {
          regime = 3 - regime;
          run_length = 1;
        }
      }
      regimes.push_back(regime);
      alpha = kAds3Alpha[regime - 1];
    } else {
      alpha = ads_coefficient(spec.which, t);
    }
    const double mean = alpha * previous;
    const double value = mean + spec.sigma * rng.normal();
    means.push_back(mean);
    values.push_back(value);
    previous = value;
  }
  return {TimeSeries(std::move(values)), std::move(means), std::move(regimes)};
}

std::vector<int> generate_markov(int states, double p, std::size_t length, std::uint64_t seed,
                                 std::optional<int> start) {
  require(states >= 2, ErrorKind::kInvalidArgument, "Markov chain needs N >= 2");
  require(p >= 0.0 && p <= 1.0, ErrorKind::kInvalidArgument, "Markov p must lie in [0, 1]");
  require(length >= 1, ErrorKind::kInvalidArgument, "Markov path needs length >= 1");
  SplitMix64 rng(seed);
  int state = 0;
  if (start) {
    require(*start >= 0 && *start < states, ErrorKind::kInvalidArgument, "start state out of range");
    state = *start;
  } else {
    state = static_cast<int>(rng.next() % static_cast<std::uint64_t>(states));
  }
  std::vector<int> path;
  path.reserve(length);
  path.push_back(state);
  while (path.size() < length) {
    const bool left = rng.uniform() < p;
    state = left ? (state + states - 1) % states : (state + 1) % states;
    path.push_back(state);
  }
  return path;
}

}  // namespace dbf
