#include "reflexsim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace reflexsim {

namespace {

// Top 53 bits, so the stream is identical on every platform.
double uniform01(std::mt19937_64& rng) {
  return (double)(rng() >> 11) * 0x1.0p-53;
}

// Rejection keeps the draw exactly uniform over [0, n).
uint64_t bounded_rand(std::mt19937_64& rng, uint64_t n) {
  uint64_t rem = (UINT64_MAX % n + 1) % n;  // 2^64 mod n
  uint64_t limit = UINT64_MAX - rem;        // inclusive
  uint64_t x;
  do {
    x = rng();
  } while (x > limit);
  return x % n;
}

}  // namespace

SizeCdfTable SizeCdfTable::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in)
    throw std::runtime_error("cannot open size cdf file: " + file.string());
  return parse(in, file.string());
}

SizeCdfTable SizeCdfTable::parse(std::istream& in, const std::string& name) {
  SizeCdfTable table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::istringstream row(line);
    uint64_t size = 0;
    double prob = 0.0;
    if (!(row >> size)) continue;  // blank or comment-only line
    std::string trailing;
    if (!(row >> prob) || (row >> trailing))
      throw std::runtime_error(name + ":" + std::to_string(lineno) +
                               ": expected two columns (size_bytes cum_prob)");
    table.points.emplace_back(size, prob);
  }
  table.validate(name);
  return table;
}

void SizeCdfTable::validate(const std::string& name) const {
  auto bad = [&](const std::string& why) {
    throw std::runtime_error("size cdf " + name + ": " + why);
  };
  if (points.size() < 2) bad("needs at least two points");
  if (points.front().second < 0.0) bad("first probability is negative");
  if (points.back().second != 1.0) bad("last probability must be 1");
  for (size_t i = 0; i < points.size(); ++i) {
    if (points[i].first == 0) bad("zero flow size");
    if (i > 0) {
      if (points[i].first <= points[i - 1].first)
        bad("sizes must be strictly increasing");
      if (points[i].second < points[i - 1].second)
        bad("probabilities must be non-decreasing");
    }
  }
}

uint64_t SizeCdfTable::sample(double u) const {
  if (u <= points.front().second) return points.front().first;
  for (size_t j = 1; j < points.size(); ++j) {
    if (u <= points[j].second) {
      double p0 = points[j - 1].second, p1 = points[j].second;
      if (p1 <= p0) return points[j].first;
      double s0 = (double)points[j - 1].first, s1 = (double)points[j].first;
      double s = s0 + (u - p0) / (p1 - p0) * (s1 - s0);
      return (uint64_t)llround(s);
    }
  }
  return points.back().first;
}

double SizeCdfTable::mean_bytes() const {
  // Point mass at the first size, uniform density inside each segment.
  double mean = points.front().second * (double)points.front().first;
  for (size_t j = 1; j < points.size(); ++j) {
    double mass = points[j].second - points[j - 1].second;
    mean += mass * 0.5 * ((double)points[j - 1].first + (double)points[j].first);
  }
  return mean;
}

uint64_t SizeCdfTable::min_bytes() const { return points.front().first; }
uint64_t SizeCdfTable::max_bytes() const { return points.back().first; }

std::vector<FlowSpec> generate(const ArrivalProcess& process,
                               double duration_s, uint64_t seed) {
  if (!(duration_s > 0.0))
    throw std::invalid_argument("generate: duration must be positive");
  std::mt19937_64 rng(seed);

  std::vector<double> arrivals;
  if (process.arrival_kind == ArrivalProcess::ArrivalKind::Poisson) {
    if (!(process.rate_per_s > 0.0))
      throw std::invalid_argument("generate: poisson rate must be positive");
    double t = 0.0;
    for (;;) {
      t += -std::log1p(-uniform01(rng)) / process.rate_per_s;
      if (t >= duration_s) break;
      arrivals.push_back(t);
    }
  } else {
    for (double t : process.times_s) {
      if (t < 0.0)
        throw std::invalid_argument("generate: negative arrival time");
      if (t < duration_s) arrivals.push_back(t);
    }
    std::sort(arrivals.begin(), arrivals.end());
  }

  if (process.size_kind == ArrivalProcess::SizeKind::EmpiricalCdf)
    process.cdf.validate("generate");
  if (process.endpoint_kind == ArrivalProcess::EndpointKind::AllPairsUniform &&
      process.candidates.empty())
    throw std::invalid_argument("generate: no endpoint candidates");

  std::vector<FlowSpec> flows;
  flows.reserve(arrivals.size());
  for (size_t i = 0; i < arrivals.size(); ++i) {
    FlowSpec f;
    f.flow_id = (FlowId)i;
    f.arrival_time_s = arrivals[i];
    f.size_bytes = process.size_kind == ArrivalProcess::SizeKind::Constant
                       ? process.constant_bytes
                       : process.cdf.sample(uniform01(rng));
    if (process.endpoint_kind == ArrivalProcess::EndpointKind::Fixed) {
      f.src = process.src;
      f.dst = process.dst;
    } else {
      const auto& pair =
          process.candidates[bounded_rand(rng, process.candidates.size())];
      f.src = pair.first;
      f.dst = pair.second;
    }
    f.alpha = process.alpha;
    f.r = process.r;
    f.kind = FlowSpec::kind_for(f.alpha, f.r);
    flows.push_back(std::move(f));
  }
  return flows;
}

double target_rate_for_utilization(double mean_size_bytes, int link_count,
                                   double capacity_bps, double utilization) {
  if (!(mean_size_bytes > 0.0) || link_count <= 0 || !(capacity_bps > 0.0) ||
      utilization < 0.0)
    throw std::invalid_argument("target_rate_for_utilization: bad inputs");
  return utilization * link_count * capacity_bps / (8.0 * mean_size_bytes);
}

uint64_t child_seed(uint64_t seed, uint64_t index) {
  // splitmix64 step over well separated states
  uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace reflexsim
