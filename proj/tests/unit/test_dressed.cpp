#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "osge/dressed.hpp"

using namespace osge;
using doctest::Approx;
constexpr double kPi = std::numbers::pi;

namespace {

// Hamiltonian restricted to {|0,e>, |1,g>} in the interaction frame used by
// the dynamics: -delta/2 on |0,e>, +delta/2 on |1,g>, coupling -i g.
Eigen::Matrix2cd couplet_matrix(double g, double delta) {
  const std::complex<double> i{0.0, 1.0};
  Eigen::Matrix2cd h;
  h << -0.5 * delta, -i * g, i * g, 0.5 * delta;
  return h;
}

}  // namespace

TEST_CASE("mixing angle limits and closed form") {
  for (double x : {0.03, 0.1, 0.37, 0.61, 0.9}) CHECK(dressed::mixing_angle(x, 0.0) == Approx(kPi / 4));
  // X = delta / 2g = 3/4 -> tan(theta) = 2
  CHECK(dressed::mixing_angle_for_coupling(1.0, 1.5) == Approx(std::atan(2.0)).epsilon(1e-14));
  CHECK(std::tan(dressed::mixing_angle_for_coupling(0.4, 0.3)) ==
        Approx(0.375 + std::sqrt(0.375 * 0.375 + 1.0)));
  // delta / 2g -> +inf from g > 0, -> -inf from g < 0
  CHECK(dressed::mixing_angle_for_coupling(1e-12, 0.1) == Approx(kPi / 2));
  CHECK(dressed::mixing_angle_for_coupling(-1e-12, 0.1) == Approx(0.0));
  CHECK(dressed::mixing_angle(0.0, 0.1) == Approx(kPi / 2));
  for (double x = -0.49; x < 0.5; x += 0.013) {
    const double t = dressed::mixing_angle(x, 0.2);
    CHECK(t >= 0.0);
    CHECK(t <= kPi / 2);
  }
}

TEST_CASE("dressed energies") {
  auto e = dressed::dressed_energies(0.25, 0.0);  // sin-mode antinode
  CHECK(e.plus == Approx(1.0));
  CHECK(e.minus == Approx(-1.0));
  e = dressed::dressed_energies(0.0, 0.0);
  CHECK(e.plus == Approx(0.0));
  CHECK(e.minus == Approx(0.0));
  e = dressed::dressed_energies(0.0, 0.1);
  CHECK(e.plus == Approx(0.05));
  CHECK(e.minus == Approx(-0.05));
  e = dressed::dressed_energies(0.25, 0.0, ModePhase::Cosine);  // cos-mode node
  CHECK(std::abs(e.plus) < 1e-15);
}

TEST_CASE("dressed vectors diagonalize the couplet (Eigen oracle)") {
  const std::complex<double> i{0.0, 1.0};
  for (double delta : {0.0, 0.1, -0.3, 1.7}) {
    for (double x : {0.013, 0.1, 0.21, 0.3, 0.47, 0.66, 0.93}) {
      const double g = dressed::mode_function(x);
      const auto h = couplet_matrix(g, delta);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(h);
      const auto en = dressed::dressed_energies(x, delta);
      CHECK(std::abs(solver.eigenvalues()(0) - en.minus) < 1e-12);
      CHECK(std::abs(solver.eigenvalues()(1) - en.plus) < 1e-12);

      const double t = dressed::mixing_angle(x, delta);
      Eigen::Vector2cd d_plus, d_minus;
      d_plus << std::cos(t), i * std::sin(t);
      d_minus << std::sin(t), -i * std::cos(t);
      // both must be eigenvectors, whatever the sign of g
      const Eigen::Vector2cd hp = h * d_plus;
      const Eigen::Vector2cd hm = h * d_minus;
      const double ep = (d_plus.adjoint() * hp)(0).real();
      const double em = (d_minus.adjoint() * hm)(0).real();
      CHECK((hp - ep * d_plus).norm() < 1e-12);
      CHECK((hm - em * d_minus).norm() < 1e-12);
      CHECK(std::abs(std::abs(ep) - en.plus) < 1e-12);
      CHECK(std::abs(std::abs(em) - en.plus) < 1e-12);
    }
  }
}

TEST_CASE("level association near a node") {
  // the state continuous with |1,g> sits on the upper level on both sides
  const double delta = 0.1;
  for (double x : {-0.002, 0.002}) {
    const auto a = dressed::decompose_bare(0.0, 1.0, x, delta);
    const double t = dressed::mixing_angle(x, delta);
    const double g = dressed::mode_function(x);
    // energy of d+ is g tan t - delta/2
    const double e_dplus = g * std::tan(t) - 0.5 * delta;
    const double e_dminus = -e_dplus;
    const double dominant = std::norm(a.plus) > std::norm(a.minus) ? e_dplus : e_dminus;
    CHECK(dominant > 0.0);
  }
}

TEST_CASE("decompose_bare") {
  auto a = dressed::decompose_bare(0.0, 1.0, 0.1, 0.0);
  CHECK(std::abs(a.plus) == Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(a.minus) == Approx(1.0 / std::sqrt(2.0)));

  a = dressed::decompose_bare_theta(1.0, 0.0, 0.0);
  CHECK(a.plus == cplx{1.0, 0.0});
  CHECK(a.minus == cplx{0.0, 0.0});

  const cplx c1{0.6, 0.0}, c2{0.0, 0.8};
  a = dressed::decompose_bare(c1, c2, 0.07, 0.3);
  CHECK(std::norm(a.plus) + std::norm(a.minus) == Approx(1.0));

  // |A+-(x1)| = |B-+(-x1)|
  for (double x1 : {0.004, 0.02, 0.11}) {
    const auto A = dressed::decompose_bare(0.0, 1.0, x1, 0.1);
    const auto B = dressed::decompose_bare(0.0, 1.0, -x1, 0.1);
    CHECK(std::abs(A.plus) == Approx(std::abs(B.minus)));
    CHECK(std::abs(A.minus) == Approx(std::abs(B.plus)));
  }
}

TEST_CASE("effective coupling") {
  CHECK(dressed::effective_coupling(1.0 / (40.0 * kPi)) == Approx(0.0399).epsilon(0.0005 / 0.0399));
  CHECK(dressed::effective_coupling(1.0 / (20.0 * kPi)) == Approx(0.0798).epsilon(0.001));
  CHECK(dressed::effective_coupling(0.0) == 0.0);
}

TEST_CASE("pulsation period against the Gamma-function closed form") {
  // int_0^{pi/2} sin^{-1/2} = B(1/4, 1/2) / 2 = Gamma(1/4) Gamma(1/2) / (2 Gamma(3/4))
  const double closed = std::tgamma(0.25) * std::tgamma(0.5) / (2.0 * std::tgamma(0.75));
  CHECK(dressed::pulsation_integral() == Approx(closed).epsilon(1e-8));
  const double tau0 = dressed::pulsation_period(1.7e-4);
  CHECK(tau0 == Approx(2.0 * closed / std::sqrt(1.7e-4)).epsilon(1e-8));
  CHECK(std::abs(tau0 - 402.2) <= 0.5);
  CHECK(dressed::pulsation_period(4 * 1.7e-4) == Approx(tau0 / 2));
  CHECK_THROWS_AS(dressed::pulsation_period(0.0), ValidationError);
}

TEST_CASE("excursion estimate") {
  CHECK(dressed::excursion_estimate(1.7e-4) == Approx(0.493));
  CHECK(dressed::excursion_estimate(3.4e-4) == Approx(0.986));
  CHECK(dressed::excursion_estimate(0.0) == 0.0);
}
