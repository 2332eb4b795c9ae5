// Domain types for a two-level atom on a momentum grid coupled to one
// quantized standing-wave cavity mode.
//
// Units: time tau = g0 t, momentum q = p / (hbar k), position xi = x / lambda.
// Rates and energies are scaled by g0.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace osge {

using cplx = std::complex<double>;

/// Bad input: a precondition of some constructor or run failed.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A run left its numerical domain (boundary mass, photon cutoff, step size).
struct RuntimeViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// MomentumGrid
// ---------------------------------------------------------------------------

/// Uniform grid q_i = (i - center) / S on [-q_max, q_max]. A unit recoil is
/// exactly S cells, so the shift operators exp(+-ikx) act as index shifts.
class MomentumGrid {
 public:
  MomentumGrid() = default;
  MomentumGrid(int subdivisions_per_recoil, int q_max)
      : subdivisions_(subdivisions_per_recoil), q_max_(q_max) {}

  int subdivisions() const noexcept { return subdivisions_; }
  int q_max() const noexcept { return q_max_; }
  std::size_t points() const noexcept {
    return static_cast<std::size_t>(2 * subdivisions_ * q_max_ + 1);
  }
  std::size_t center() const noexcept {
    return static_cast<std::size_t>(subdivisions_ * q_max_);
  }
  double spacing() const noexcept { return 1.0 / subdivisions_; }
  double q(std::size_t i) const noexcept {
    return (static_cast<double>(i) - static_cast<double>(center())) / subdivisions_;
  }
  /// Period of the position representation, in units of lambda.
  double position_period() const noexcept { return static_cast<double>(subdivisions_); }

  std::vector<double> axis() const {
    std::vector<double> out(points());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = q(i);
    return out;
  }

  friend bool operator==(const MomentumGrid&, const MomentumGrid&) = default;

 private:
  int subdivisions_ = 1;
  int q_max_ = 1;
};

inline MomentumGrid make_grid(int subdivisions_per_recoil, int q_max) {
  if (subdivisions_per_recoil < 1)
    throw ValidationError("grid: subdivisions_per_recoil must be >= 1");
  if (q_max < 1) throw ValidationError("grid: q_max must be >= 1");
  return MomentumGrid(subdivisions_per_recoil, q_max);
}

// ---------------------------------------------------------------------------
// FieldSpec
// ---------------------------------------------------------------------------

/// Number-state amplitudes f(0..n_max) of the cavity field.
struct FieldSpec {
  std::vector<cplx> amplitudes;

  int n_max() const noexcept { return static_cast<int>(amplitudes.size()) - 1; }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return s;
  }

  double mean_photons() const {
    double s = 0.0;
    for (std::size_t n = 0; n < amplitudes.size(); ++n)
      s += static_cast<double>(n) * std::norm(amplitudes[n]);
    return s;
  }
};

inline constexpr double kFieldNormTolerance = 1e-12;
inline constexpr double kCoherentTruncationTolerance = 1e-10;

inline FieldSpec field_fock(int n, int n_max) {
  if (n_max < 0) throw ValidationError("field_fock: n_max must be >= 0");
  if (n < 0 || n > n_max)
    throw ValidationError("field_fock: photon number " + std::to_string(n) +
                          " outside [0, n_max=" + std::to_string(n_max) + "]");
  FieldSpec f;
  f.amplitudes.assign(static_cast<std::size_t>(n_max) + 1, cplx{0.0, 0.0});
  f.amplitudes[static_cast<std::size_t>(n)] = 1.0;
  return f;
}

/// Coherent state |alpha> truncated at n_max and renormalized. Throws when
/// the probability beyond the cutoff exceeds `tolerance`.
inline FieldSpec field_coherent(cplx alpha, int n_max,
                                double tolerance = kCoherentTruncationTolerance) {
  if (n_max < 0) throw ValidationError("field_coherent: n_max must be >= 0");
  FieldSpec f;
  f.amplitudes.resize(static_cast<std::size_t>(n_max) + 1);
  const double prefactor = std::exp(-0.5 * std::norm(alpha));
  cplx term = prefactor;  // e^{-|a|^2/2} a^n / sqrt(n!)
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) term *= alpha / std::sqrt(static_cast<double>(n));
    f.amplitudes[static_cast<std::size_t>(n)] = term;
  }
  const double kept = f.norm_squared();
  const double lost = 1.0 - kept;
  if (lost > tolerance)
    throw ValidationError("field_coherent: photon cutoff n_max=" + std::to_string(n_max) +
                          " loses " + std::to_string(lost) + " of |alpha|=" +
                          std::to_string(std::abs(alpha)) + " (tolerance " +
                          std::to_string(tolerance) + ")");
  const double scale = 1.0 / std::sqrt(kept);
  for (auto& a : f.amplitudes) a *= scale;
  return f;
}

// ---------------------------------------------------------------------------
// SystemParams
// ---------------------------------------------------------------------------

/// Mode function convention: sin(kx) puts a node at xi = 0, cos(kx) at xi = 1/4.
enum class ModePhase { Sine, Cosine };

struct SystemParams {
  double mu = 0.0;         // hbar k^2 / (2 M g0); 0 = infinite mass
  double gamma = 0.0;      // atomic decay rate / g0
  double kappa = 0.0;      // cavity field decay rate / g0 (photon jump rate 2 kappa)
  double delta = 0.0;      // (omega_C - omega_A) / g0
  double detuning_sign = 1.0;
  double drive = 0.0;      // epsilon / g0
  double xi0 = 0.25;       // initial packet center / lambda
  double delta_q = 10.0;   // initial momentum spread / (hbar k)
  ModePhase mode_phase = ModePhase::Cosine;

  double beta() const { return 1.0 / (4.0 * delta_q * delta_q); }
};

inline void validate(const SystemParams& p) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ValidationError(what);
  };
  require(std::isfinite(p.mu) && p.mu >= 0.0, "params.mu must be finite and >= 0");
  require(std::isfinite(p.gamma) && p.gamma >= 0.0, "params.gamma must be finite and >= 0");
  require(std::isfinite(p.kappa) && p.kappa >= 0.0, "params.kappa must be finite and >= 0");
  require(std::isfinite(p.delta), "params.delta must be finite");
  require(p.detuning_sign == 1.0 || p.detuning_sign == -1.0,
          "params.detuning_sign must be +1 or -1");
  require(std::isfinite(p.drive), "params.drive must be finite");
  require(std::isfinite(p.xi0), "params.xi0 must be finite");
  require(std::isfinite(p.delta_q) && p.delta_q > 0.0, "params.delta_q must be > 0");
}

// ---------------------------------------------------------------------------
// PacketState
// ---------------------------------------------------------------------------

/// Unnormalized expansion coefficients Ce(n, q) for |n-1, q, e> (n = 1..n_max)
/// and Cg(n, q) for |n, q, g> (n = 0..n_max). Rows are contiguous in q.
class PacketState {
 public:
  PacketState() = default;
  PacketState(MomentumGrid grid, int n_max)
      : grid_(grid),
        n_max_(n_max),
        c_e_(static_cast<std::size_t>(n_max) * grid.points()),
        c_g_(static_cast<std::size_t>(n_max + 1) * grid.points()) {
    if (n_max < 0) throw ValidationError("PacketState: n_max must be >= 0");
  }

  const MomentumGrid& grid() const noexcept { return grid_; }
  int n_max() const noexcept { return n_max_; }
  std::size_t points() const noexcept { return grid_.points(); }

  double tau = 0.0;

  /// Excited row for photon label n in [1, n_max].
  std::span<cplx> e(int n) { return {c_e_.data() + row_e(n), points()}; }
  std::span<const cplx> e(int n) const { return {c_e_.data() + row_e(n), points()}; }
  /// Ground row for photon number n in [0, n_max].
  std::span<cplx> g(int n) { return {c_g_.data() + row_g(n), points()}; }
  std::span<const cplx> g(int n) const { return {c_g_.data() + row_g(n), points()}; }

  std::span<cplx> excited_data() { return c_e_; }
  std::span<const cplx> excited_data() const { return c_e_; }
  std::span<cplx> ground_data() { return c_g_; }
  std::span<const cplx> ground_data() const { return c_g_; }

  /// Squared norm with the grid measure 1/S, so a normalized packet has N = 1.
  double norm_squared() const {
    return (sum_norm(c_e_) + sum_norm(c_g_)) * grid_.spacing();
  }
  double excited_norm_squared() const { return sum_norm(c_e_) * grid_.spacing(); }

  /// <a^dagger a> with the grid measure (unnormalized).
  double photon_expectation() const {
    double s = 0.0;
    for (int n = 1; n <= n_max_; ++n) s += (n - 1) * sum_norm(e(n)) + n * sum_norm(g(n));
    return s * grid_.spacing();
  }

  void scale(double factor) {
    for (auto& c : c_e_) c *= factor;
    for (auto& c : c_g_) c *= factor;
  }

  /// Rescales to unit norm; returns the norm before rescaling.
  double normalize() {
    const double n2 = norm_squared();
    if (!(n2 > 0.0)) throw RuntimeViolation("PacketState: cannot normalize a zero state");
    scale(1.0 / std::sqrt(n2));
    return n2;
  }

  void set_zero() {
    std::fill(c_e_.begin(), c_e_.end(), cplx{});
    std::fill(c_g_.begin(), c_g_.end(), cplx{});
  }

  /// Fraction of the squared norm held in the outermost 5% of cells per side.
  double boundary_mass_fraction() const {
    const std::size_t np = points();
    const auto edge = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.05 * np / 2.0)));
    double edge_sum = 0.0;
    auto add_edges = [&](std::span<const cplx> row) {
      for (std::size_t i = 0; i < edge; ++i) edge_sum += std::norm(row[i]) + std::norm(row[np - 1 - i]);
    };
    for (int n = 1; n <= n_max_; ++n) add_edges(e(n));
    for (int n = 0; n <= n_max_; ++n) add_edges(g(n));
    const double total = sum_norm(c_e_) + sum_norm(c_g_);
    return total > 0.0 ? edge_sum / total : 0.0;
  }

  /// Fraction of the squared norm in the top photon row (n_max photons).
  double cutoff_mass_fraction() const {
    const double total = sum_norm(c_e_) + sum_norm(c_g_);
    if (!(total > 0.0) || n_max_ == 0) return 0.0;
    return sum_norm(g(n_max_)) / total;
  }

  bool same_shape(const PacketState& other) const {
    return grid_ == other.grid_ && n_max_ == other.n_max_;
  }

 private:
  std::size_t row_e(int n) const { return static_cast<std::size_t>(n - 1) * points(); }
  std::size_t row_g(int n) const { return static_cast<std::size_t>(n) * points(); }

  static double sum_norm(std::span<const cplx> v) {
    double s = 0.0;
    for (const auto& c : v) s += std::norm(c);
    return s;
  }

  MomentumGrid grid_{};
  int n_max_ = 0;
  std::vector<cplx> c_e_;
  std::vector<cplx> c_g_;
};

// ---------------------------------------------------------------------------
// JumpEvent
// ---------------------------------------------------------------------------

enum class JumpChannel { Atomic, Cavity };

inline const char* to_string(JumpChannel c) {
  return c == JumpChannel::Atomic ? "atomic" : "cavity";
}

struct JumpEvent {
  double tau = 0.0;
  JumpChannel channel = JumpChannel::Atomic;
  double eta = 0.0;  // recoil projection, atomic jumps only

  friend bool operator==(const JumpEvent&, const JumpEvent&) = default;
};

// ---------------------------------------------------------------------------
// Initial packet
// ---------------------------------------------------------------------------

inline constexpr double kDefaultBoundaryTolerance = 1e-6;

/// Ground-state Gaussian packet of width delta_q centered at xi0, with the
/// field amplitudes f(n) attached: Cg(n,q) = F(n) exp(-q^2/4dq^2) exp(-2 pi i q xi0).
inline PacketState init_packet(const MomentumGrid& grid, const FieldSpec& field,
                               const SystemParams& params,
                               double boundary_tolerance = kDefaultBoundaryTolerance) {
  validate(params);
  if (field.amplitudes.empty()) throw ValidationError("init_packet: empty field");
  if (std::abs(field.norm_squared() - 1.0) > kFieldNormTolerance)
    throw ValidationError("init_packet: field amplitudes are not normalized");

  const int n_max = field.n_max();
  PacketState s(grid, n_max);
  const double dq = params.delta_q;
  const double f_norm = 1.0 / std::pow(2.0 * std::numbers::pi * dq * dq, 0.25);
  std::vector<cplx> profile(grid.points());
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double q = grid.q(i);
    profile[i] = std::polar(f_norm * std::exp(-q * q / (4.0 * dq * dq)),
                            -2.0 * std::numbers::pi * q * params.xi0);
  }
  for (int n = 0; n <= n_max; ++n) {
    const cplx fn = field.amplitudes[static_cast<std::size_t>(n)];
    auto row = s.g(n);
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = fn * profile[i];
  }
  const double frac = s.boundary_mass_fraction();
  if (frac > boundary_tolerance)
    throw ValidationError("init_packet: boundary mass " + std::to_string(frac) +
                          " exceeds tolerance " + std::to_string(boundary_tolerance) +
                          " (q_max=" + std::to_string(grid.q_max()) +
                          " too small for delta_q=" + std::to_string(dq) + ")");
  s.normalize();
  return s;
}

}  // namespace osge
