#include <doctest.h>

#include <cmath>
#include <numbers>

#include "osge/observables.hpp"

using namespace osge;
using doctest::Approx;
constexpr double kPi = std::numbers::pi;

TEST_CASE("momentum distribution of the initial packet") {
  SystemParams p;
  const auto grid = make_grid(8, 60);
  const auto s = init_packet(grid, field_fock(1, 1), p);
  const auto d = momentum_distribution(s);
  CHECK(d.axis == "q");
  CHECK(d.total() == Approx(1.0).epsilon(1e-12));
  const auto m = moments(d);
  CHECK(m.mean == Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(m.std - 10.0) <= 0.05);
  REQUIRE(m.local_maxima.size() == 1);
  CHECK(m.local_maxima[0].position == 0.0);
  // Gaussian of variance 100
  for (std::size_t i = 0; i < grid.points(); i += 40) {
    const double q = grid.q(i);
    CHECK(d.density[i] == Approx(std::exp(-q * q / 200.0) / std::sqrt(200.0 * kPi)).epsilon(1e-10));
  }
}

TEST_CASE("position distribution of the initial packet") {
  SystemParams p;
  p.xi0 = 0.25;
  const auto grid = make_grid(8, 60);
  const auto s = init_packet(grid, field_fock(1, 1), p);
  const auto d = position_distribution(s);
  CHECK(d.axis == "xi");
  CHECK(d.support.front() == Approx(-0.5));
  CHECK(d.support.back() == Approx(0.5));
  CHECK(d.measure == Approx(1.0 / 120.0));
  // Parseval over the default window (the packet lies well inside it)
  CHECK(d.total() == Approx(1.0).epsilon(1e-9));
  const auto fine = position_distribution(s, PositionWindow::around(0.25, 0.1, 1e-4));
  const auto m = moments(fine);
  CHECK(m.mean == Approx(0.25).epsilon(1e-9));
  CHECK(m.std == Approx(1.0 / (40.0 * kPi)).epsilon(1e-4));
  CHECK(uncertainty_product(s, PositionWindow::around(0.25, 0.1, 1e-4)) ==
        Approx(1.0 / (4.0 * kPi)).epsilon(1e-4 * 4 * kPi));
}

TEST_CASE("position distribution: plane wave is flat; Parseval over a full period") {
  const auto grid = make_grid(2, 10);
  PacketState s(grid, 1);
  s.g(1)[grid.center() + 6] = 1.0;
  s.normalize();
  const auto d = position_distribution(s);
  for (double v : d.density) CHECK(v == Approx(d.density[0]).epsilon(1e-12));

  // a full period S sampled at a resolution fine enough for the grid
  PacketState r(grid, 2);
  for (std::size_t i = 0; i < grid.points(); ++i) {
    r.g(0)[i] = {std::sin(0.3 * i), std::cos(0.7 * i)};
    r.e(2)[i] = {0.1 * i, -0.2};
  }
  r.normalize();
  PositionWindow w{-1.0, 1.0 - 1.0 / 64, 1.0 / 64};  // [-S/2, S/2)
  const auto full = position_distribution(r, w);
  CHECK(full.total() == Approx(momentum_distribution(r).total()).epsilon(1e-12));
}

TEST_CASE("uncertainty product scales with neither width") {
  const auto grid = make_grid(8, 60);
  SystemParams narrow;
  narrow.delta_q = 5.0;
  SystemParams wide;
  wide.delta_q = 10.0;
  const auto a = init_packet(grid, field_fock(0, 0), narrow);
  const auto b = init_packet(grid, field_fock(0, 0), wide);
  const auto w = PositionWindow::around(0.25, 0.2, 1e-4);
  CHECK(uncertainty_product(a, w) == Approx(uncertainty_product(b, w)).epsilon(1e-4));
}

TEST_CASE("excited population") {
  const auto grid = make_grid(4, 64);
  SystemParams p;
  const auto s0 = init_packet(grid, field_fock(1, 1), p);
  auto pe = excited_population(s0);
  CHECK(pe.total == 0.0);
  PacketState e(grid, 1);
  e.e(1)[grid.center()] = 2.0;
  pe = excited_population(e);
  CHECK(pe.total == Approx(1.0));
  CHECK(pe.by_momentum.density[grid.center()] == Approx(4.0 / (4.0 * grid.spacing())));
}

TEST_CASE("post-jump oracle") {
  const auto grid = make_grid(8, 60);
  const double beta = 0.0025;
  const auto d = post_jump_oracle(beta, 0.0, grid);
  CHECK(d.total() == Approx(1.0));
  for (std::size_t i = 0; i < grid.points(); ++i)
    CHECK(d.density[i] == Approx(d.density[grid.points() - 1 - i]).epsilon(1e-12));
  CHECK(moments(d).mean == Approx(0.0).epsilon(1e-12));

  // brute-force argmax of the closed form on a fine mesh
  double best_q = 0.0, best = -1.0;
  for (double q = 0.0; q < 60.0; q += 1e-4) {
    const double v = std::exp(-beta * (q + 1) * (q + 1)) - std::exp(-beta * (q - 1) * (q - 1));
    if (v * v > best) {
      best = v * v;
      best_q = q;
    }
  }
  CHECK(best_q == Approx(14.154).epsilon(1e-3));
  const auto peaks = local_maxima(d);
  REQUIRE(peaks.size() == 2);
  CHECK(std::abs(peaks[1].position - best_q) <= grid.spacing());
  CHECK(std::abs(peaks[0].position + best_q) <= grid.spacing());
  CHECK(std::abs(peaks[1].position - std::sqrt(2.0) * 10.0) <= grid.spacing());

  // eta shifts the profile by -eta
  const auto shifted = post_jump_oracle(beta, 0.5, grid);
  for (std::size_t i = 4; i < grid.points(); ++i)
    CHECK(shifted.density[i - 4] == Approx(d.density[i]).epsilon(1e-9));
  CHECK_THROWS_AS(post_jump_oracle(0.0, 0.0, grid), ValidationError);
}

TEST_CASE("local maxima: prominence and plateaus") {
  Distribution1D d;
  d.support = {0, 1, 2, 3, 4, 5, 6, 7, 8};
  d.density = {0, 5, 1, 1.05, 1, 4, 4, 1, 0};
  d.measure = 1.0;
  auto peaks = local_maxima(d);  // threshold 0.1
  REQUIRE(peaks.size() == 2);
  CHECK(peaks[0].position == 1.0);
  CHECK(peaks[0].prominence == Approx(5.0));
  CHECK(peaks[1].position == 5.5);
  CHECK(peaks[1].prominence == Approx(3.0));
  peaks = local_maxima(d, 0.001);
  CHECK(peaks.size() == 3);
  // edges never count
  d.density = {9, 1, 0, 1, 9};
  d.support = {0, 1, 2, 3, 4};
  CHECK(local_maxima(d).empty());
}
