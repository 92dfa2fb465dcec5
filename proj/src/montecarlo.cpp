#include "eec/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "eec/errors.hpp"

namespace eec {
namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Integer tallies per chunk; sums of integers are exact, so the reduction is
// independent of scheduling.
struct Tally {
  std::size_t m = 0;
  std::size_t nx = 0;
  std::vector<std::uint64_t> tail;  // [k * m + i]
  std::vector<std::int64_t> euler;  // per x: sum of per-sample values
  std::vector<std::uint64_t> euler_sq;

  Tally(std::size_t m_, std::size_t nx_) : m(m_), nx(nx_), tail(m_ * nx_, 0), euler(nx_, 0), euler_sq(nx_, 0) {}

  void merge(const Tally& o) {
    for (std::size_t j = 0; j < tail.size(); ++j) tail[j] += o.tail[j];
    for (std::size_t k = 0; k < nx; ++k) {
      euler[k] += o.euler[k];
      euler_sq[k] += o.euler_sq[k];
    }
  }
};

void check_grid(std::span<const double> xs) {
  if (xs.empty()) throw DomainError("Monte Carlo: empty x grid");
  for (double x : xs)
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("Monte Carlo: x must be finite and nonnegative");
  if (!std::is_sorted(xs.begin(), xs.end())) throw DomainError("Monte Carlo: x grid must be ascending");
}

Tally run(const WishartParams& p, std::span<const double> xs, const McConfig& cfg) {
  p.validate();
  cfg.validate();
  check_grid(xs);
  const std::size_t m = p.m;
  const std::size_t n_chunks = (cfg.n_samples + cfg.chunk_size - 1) / cfg.chunk_size;
  std::vector<Tally> partial(n_chunks, Tally(m, xs.size()));

  auto do_chunk = [&](std::size_t c) {
    RandomStream stream(cfg.seed, c);
    Tally& t = partial[c];
    const std::size_t begin = c * cfg.chunk_size;
    const std::size_t end = std::min(cfg.n_samples, begin + cfg.chunk_size);
    for (std::size_t s = begin; s < end; ++s) {
      std::vector<double> sv = singular_values(sample_matrix(p, stream));
      if (cfg.scale == ThresholdScale::Eigen)
        for (double& v : sv) v *= v;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        std::int64_t value = 0;
        for (std::size_t i = 0; i < m; ++i) {
          if (sv[i] < xs[k]) break;  // descending
          ++t.tail[k * m + i];
          value += (i % 2 == 0) ? 1 : -1;
        }
        t.euler[k] += value;
        t.euler_sq[k] += static_cast<std::uint64_t>(value * value);
      }
    }
  };

  unsigned workers = cfg.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_chunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) do_chunk(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1)) do_chunk(c);
      });
  }

  Tally total(m, xs.size());
  for (const Tally& t : partial) total.merge(t);
  return total;
}

}  // namespace

void McConfig::validate() const {
  if (n_samples < 1000) throw DomainError("McConfig: n_samples must be at least 1000");
  if (chunk_size == 0) throw DomainError("McConfig: chunk_size must be positive");
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL))) {}

std::uint64_t RandomStream::next_u64() { return splitmix64(key_ + splitmix64(counter_++)); }

double RandomStream::uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

double RandomStream::normal() {
  // Phi^{-1}(u) = -sqrt(2) erfc^{-1}(2u)
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * uniform());
}

Matrix sample_matrix(const WishartParams& p, RandomStream& stream) {
  Matrix a = p.mean;
  for (std::size_t i = 0; i < p.m; ++i) {
    const double d = 1.0 / std::sqrt(p.scales[i]);
    for (std::size_t j = 0; j < p.n; ++j) a(i, j) += d * stream.normal();
  }
  return a;
}

std::vector<std::vector<TailEstimate>> estimate_eigen_tails(const WishartParams& p, std::span<const double> xs,
                                                            const McConfig& cfg) {
  const Tally t = run(p, xs, cfg);
  const double n = static_cast<double>(cfg.n_samples);
  std::vector<std::vector<TailEstimate>> out(xs.size(), std::vector<TailEstimate>(p.m));
  for (std::size_t k = 0; k < xs.size(); ++k)
    for (std::size_t i = 0; i < p.m; ++i) {
      const double v = static_cast<double>(t.tail[k * p.m + i]) / n;
      out[k][i] = {v, std::sqrt(v * (1.0 - v) / n), cfg.n_samples, cfg.seed};
    }
  return out;
}

std::vector<TailEstimate> estimate_expected_euler(const WishartParams& p, std::span<const double> xs,
                                                  const McConfig& cfg) {
  const Tally t = run(p, xs, cfg);
  const double n = static_cast<double>(cfg.n_samples);
  std::vector<TailEstimate> out(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double mean = static_cast<double>(t.euler[k]) / n;
    const double var = std::max(0.0, (static_cast<double>(t.euler_sq[k]) / n - mean * mean) * n / (n - 1.0));
    out[k] = {mean, std::sqrt(var / n), cfg.n_samples, cfg.seed};
  }
  return out;
}

std::vector<RatioEstimate> lemma1_ratio_curve(const WishartParams& p, std::span<const double> xs,
                                              const McConfig& cfg) {
  const Tally t = run(p, xs, cfg);
  std::vector<RatioEstimate> out(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    RatioEstimate& r = out[k];
    r.denominator_count = t.tail[k * p.m];
    r.numerator_count = t.tail[k * p.m + 1];
    if (r.denominator_count == 0) {
      r.value = std::numeric_limits<double>::quiet_NaN();
      r.stderr_ = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    // lambda_2 >= x implies lambda_1 >= x, so the ratio is a proportion among the denominator samples.
    const double c = static_cast<double>(r.denominator_count);
    r.value = static_cast<double>(r.numerator_count) / c;
    r.stderr_ = std::sqrt(r.value * (1.0 - r.value) / c);
    r.defined = true;
  }
  return out;
}

}  // namespace eec
