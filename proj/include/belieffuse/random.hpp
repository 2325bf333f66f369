#pragma once

// Random BBA / CBBA generators shared by the benchmark and the test suites.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "belieffuse/evidence.hpp"

namespace belieffuse {

namespace detail {

template <typename Rng>
std::vector<SubsetCode> random_support(const Frame& frame, Rng& rng, double density) {
  std::bernoulli_distribution keep(density);
  std::vector<SubsetCode> support;
  for (std::uint32_t code = 1; code < frame.power_set_size(); ++code) {
    if (keep(rng)) support.emplace_back(code);
  }
  if (support.empty()) {
    std::uniform_int_distribution<std::uint32_t> pick(1, frame.power_set_size() - 1);
    support.emplace_back(pick(rng));
  }
  return support;
}

}  // namespace detail

// Flat-Dirichlet masses on a random support; each non-empty subset is kept
// with probability `density` (at least one always is).
template <typename Rng>
Bba random_bba(const Frame& frame, Rng& rng, double density = 1.0) {
  const auto support = detail::random_support(frame, rng, density);
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(support.size());
  double total = 0.0;
  for (auto& x : w) total += (x = expo(rng));
  Bba m(frame);
  for (std::size_t i = 0; i < support.size(); ++i) m.set(support[i], w[i] / total);
  return m;
}

// Real parts as in random_bba; imaginary parts sum to zero and are scaled so
// every modulus stays <= 1.
template <typename Rng>
Cbba random_cbba(const Frame& frame, Rng& rng, double density = 1.0) {
  const Bba real = random_bba(frame, rng, density);
  Cbba m = to_complex(real);
  const std::size_t n = real.masses().size();
  if (n < 2) return m;

  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> im(n);
  double mean = 0.0;
  for (auto& v : im) mean += (v = unit(rng));
  mean /= static_cast<double>(n);
  for (auto& v : im) v -= mean;

  double cap = 1.0;
  std::size_t i = 0;
  for (const auto& [code, re] : real.masses()) {
    if (im[i] != 0.0) cap = std::min(cap, std::sqrt(1.0 - re * re) / std::abs(im[i]));
    ++i;
  }
  const double scale = cap * std::uniform_real_distribution<double>(0.05, 0.95)(rng);
  i = 0;
  for (auto& [code, v] : m.masses()) v.imag(im[i++] * scale);
  return m;
}

}  // namespace belieffuse
