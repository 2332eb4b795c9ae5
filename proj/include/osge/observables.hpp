// Probability distributions and summary statistics of a packet.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "osge/model.hpp"

namespace osge {

/// Sampled density with a uniform cell measure; sum(density) * measure is
/// the probability inside the support.
struct Distribution1D {
  std::string axis;  // "q" or "xi"
  std::vector<double> support;
  std::vector<double> density;
  double measure = 1.0;

  std::size_t size() const noexcept { return support.size(); }
  double total() const {
    double s = 0.0;
    for (double d : density) s += d;
    return s * measure;
  }
};

// ---------------------------------------------------------------------------
// Distributions
// ---------------------------------------------------------------------------

/// P(q) = sum_n |Ce(n,q)|^2 + |Cg(n,q)|^2 of the renormalized state.
inline Distribution1D momentum_distribution(const PacketState& s) {
  Distribution1D d;
  d.axis = "q";
  d.support = s.grid().axis();
  d.measure = s.grid().spacing();
  d.density.assign(s.points(), 0.0);
  auto add = [&](std::span<const cplx> row) {
    for (std::size_t i = 0; i < row.size(); ++i) d.density[i] += std::norm(row[i]);
  };
  for (int n = 1; n <= s.n_max(); ++n) add(s.e(n));
  for (int n = 0; n <= s.n_max(); ++n) add(s.g(n));
  const double norm = s.norm_squared();
  if (norm > 0.0)
    for (auto& v : d.density) v /= norm;
  return d;
}

/// Window of the position axis on which P(xi) is sampled. A resolution of
/// zero means 1/(2 q_max).
struct PositionWindow {
  double lo = -0.5;
  double hi = 0.5;
  double resolution = 0.0;

  static PositionWindow around(double center, double half_width, double resolution = 0.0) {
    return {center - half_width, center + half_width, resolution};
  }
};

/// P(xi) = P0 sum_{n,a} |sum_q e^{i 2 pi q xi} C_a(n,q) / S|^2 with P0 = 1/N,
/// which integrates to one over a full period S. Only the window is sampled.
inline Distribution1D position_distribution(const PacketState& s, PositionWindow w = {}) {
  const auto& grid = s.grid();
  const double h = w.resolution > 0.0 ? w.resolution : 1.0 / (2.0 * grid.q_max());
  const auto count = static_cast<std::size_t>(std::floor((w.hi - w.lo) / h + 1e-9)) + 1;

  Distribution1D d;
  d.axis = "xi";
  d.measure = h;
  d.support.resize(count);
  d.density.assign(count, 0.0);
  for (std::size_t j = 0; j < count; ++j) d.support[j] = w.lo + h * static_cast<double>(j);

  std::vector<std::span<const cplx>> rows;
  auto keep = [&](std::span<const cplx> row) {
    if (std::any_of(row.begin(), row.end(), [](cplx c) { return c != cplx{}; })) rows.push_back(row);
  };
  for (int n = 1; n <= s.n_max(); ++n) keep(s.e(n));
  for (int n = 0; n <= s.n_max(); ++n) keep(s.g(n));

  const std::size_t np = grid.points();
  std::vector<cplx> phase(np);
  const double inv_s = grid.spacing();
  const double norm = s.norm_squared();
  for (std::size_t j = 0; j < count; ++j) {
    const double xi = d.support[j];
    for (std::size_t i = 0; i < np; ++i)
      phase[i] = std::polar(inv_s, 2.0 * std::numbers::pi * grid.q(i) * xi);
    double acc = 0.0;
    for (const auto& row : rows) {
      double re = 0.0, im = 0.0;
      for (std::size_t i = 0; i < np; ++i) {
        const cplx c = row[i];
        const cplx p = phase[i];
        re += c.real() * p.real() - c.imag() * p.imag();
        im += c.real() * p.imag() + c.imag() * p.real();
      }
      acc += re * re + im * im;
    }
    d.density[j] = norm > 0.0 ? acc / norm : 0.0;
  }
  return d;
}

struct ExcitedPopulation {
  Distribution1D by_momentum;  // P_e(q) = sum_n |Ce(n,q)|^2
  double total = 0.0;          // P_e
};

inline ExcitedPopulation excited_population(const PacketState& s) {
  ExcitedPopulation out;
  auto& d = out.by_momentum;
  d.axis = "q";
  d.support = s.grid().axis();
  d.measure = s.grid().spacing();
  d.density.assign(s.points(), 0.0);
  const double norm = s.norm_squared();
  for (int n = 1; n <= s.n_max(); ++n) {
    auto row = s.e(n);
    for (std::size_t i = 0; i < row.size(); ++i) d.density[i] += std::norm(row[i]);
  }
  if (norm > 0.0)
    for (auto& v : d.density) v /= norm;
  out.total = d.total();
  return out;
}

// ---------------------------------------------------------------------------
// Moments and peaks
// ---------------------------------------------------------------------------

inline constexpr double kDefaultPeakProminence = 0.02;

struct Peak {
  double position = 0.0;
  double value = 0.0;
  double prominence = 0.0;
};

struct Moments {
  double mean = 0.0;
  double std = 0.0;
  std::vector<Peak> local_maxima;
};

/// Interior local maxima whose topographic prominence is at least
/// `prominence_fraction` of the global maximum. Plateaus report their midpoint.
inline std::vector<Peak> local_maxima(const Distribution1D& d,
                                      double prominence_fraction = kDefaultPeakProminence) {
  std::vector<Peak> peaks;
  const auto& v = d.density;
  const std::size_t n = v.size();
  if (n < 3) return peaks;
  const double global = *std::max_element(v.begin(), v.end());
  if (!(global > 0.0)) return peaks;
  const double threshold = prominence_fraction * global;

  std::size_t i = 1;
  while (i + 1 < n) {
    if (v[i] > v[i - 1]) {
      std::size_t ahead = i + 1;
      while (ahead + 1 < n && v[ahead] == v[i]) ++ahead;
      if (v[ahead] < v[i]) {
        const std::size_t left_end = i;
        const std::size_t right_end = ahead - 1;
        const double top = v[i];
        double left_min = top;
        for (std::size_t k = left_end; k-- > 0;) {
          if (v[k] > top) break;
          left_min = std::min(left_min, v[k]);
        }
        double right_min = top;
        for (std::size_t k = right_end + 1; k < n; ++k) {
          if (v[k] > top) break;
          right_min = std::min(right_min, v[k]);
        }
        const double prominence = top - std::max(left_min, right_min);
        if (prominence >= threshold) {
          const double pos = 0.5 * (d.support[left_end] + d.support[right_end]);
          peaks.push_back({pos, top, prominence});
        }
        i = ahead;
        continue;
      }
      i = ahead;
      continue;
    }
    ++i;
  }
  return peaks;
}

inline Moments moments(const Distribution1D& d, double prominence_fraction = kDefaultPeakProminence) {
  Moments m;
  double mass = 0.0, first = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    mass += d.density[i];
    first += d.density[i] * d.support[i];
  }
  if (mass > 0.0) {
    m.mean = first / mass;
    double second = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double x = d.support[i] - m.mean;
      second += d.density[i] * x * x;
    }
    m.std = std::sqrt(second / mass);
  }
  m.local_maxima = local_maxima(d, prominence_fraction);
  return m;
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

/// Momentum profile right after an early atomic jump from a node packet:
/// P(q) ~ [e^{-b(q+eta+1)^2} - e^{-b(q+eta-1)^2}]^2, normalized on the grid.
inline Distribution1D post_jump_oracle(double beta, double eta, const MomentumGrid& grid) {
  if (!(beta > 0.0)) throw ValidationError("post_jump_oracle: beta must be > 0");
  Distribution1D d;
  d.axis = "q";
  d.support = grid.axis();
  d.measure = grid.spacing();
  d.density.resize(d.support.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double q = d.support[i];
    const double diff = std::exp(-beta * (q + eta + 1.0) * (q + eta + 1.0)) -
                        std::exp(-beta * (q + eta - 1.0) * (q + eta - 1.0));
    d.density[i] = diff * diff;
  }
  const double t = d.total();
  if (t > 0.0)
    for (auto& v : d.density) v /= t;
  return d;
}

/// Delta xi * Delta q; the minimum-uncertainty value is 1/(4 pi).
inline double uncertainty_product(const PacketState& s, PositionWindow w = {}) {
  const double dq = moments(momentum_distribution(s)).std;
  const double dxi = moments(position_distribution(s, w)).std;
  return dq * dxi;
}

}  // namespace osge
