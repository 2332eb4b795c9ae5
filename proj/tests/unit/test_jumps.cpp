#include <doctest.h>

#include <cmath>
#include <random>

#include "osge/dynamics.hpp"
#include "osge/jumps.hpp"
#include "osge/observables.hpp"

using namespace osge;
using doctest::Approx;

namespace {

PacketState early_node_state(const MomentumGrid& grid, double tau, double gamma) {
  SystemParams p;
  p.gamma = gamma;
  auto s = init_packet(grid, field_fock(1, 1), p);
  Rk4Stepper st(Generator(grid, 1, p));
  const int steps = static_cast<int>(std::lround(tau / 1e-3));
  for (int k = 0; k < steps; ++k) st.step(s, 1e-3);
  return s;
}

double l2_relative(const Distribution1D& a, const Distribution1D& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a.density[i] - b.density[i]) * (a.density[i] - b.density[i]);
    den += b.density[i] * b.density[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("collapse probabilities") {
  const auto grid = make_grid(4, 64);
  SystemParams p;
  p.gamma = 0.1;
  const auto s0 = init_packet(grid, field_fock(1, 1), p);
  auto pr = collapse_probabilities(s0, p, 1e-3);
  CHECK(pr.p_atom == 0.0);
  CHECK(pr.p_cav == 0.0);

  // fully in |0, e>
  PacketState e(grid, 1);
  e.e(1)[grid.center()] = 1.0;
  pr = collapse_probabilities(e, p, 1e-3);
  CHECK(pr.p_atom == Approx(1e-4));
  CHECK(pr.p_cav == 0.0);

  // |1, e> at kappa = 0.25: 2 kappa dtau <n> = 0.5 dtau
  p.kappa = 0.25;
  PacketState e2(grid, 2);
  e2.e(2)[grid.center()] = 3.0;
  pr = collapse_probabilities(e2, p, 0.01);
  CHECK(pr.p_atom == Approx(1e-3));
  CHECK(pr.p_cav == Approx(5e-3));

  p.gamma = 0.0;
  pr = collapse_probabilities(e2, p, 0.01);
  CHECK(pr.p_atom == 0.0);

  // coherent alpha = 1, ground atom: <n> = 1
  const auto c = init_packet(grid, field_coherent(1.0, 12), p);
  pr = collapse_probabilities(c, p, 0.02);
  CHECK(pr.p_cav == Approx(2 * 0.25 * 0.02).epsilon(1e-8));

  CHECK(ChannelProbabilities{0.05, 0.0499}.first_order_valid());
  CHECK_FALSE(ChannelProbabilities{0.05, 0.05}.first_order_valid());
  CHECK_THROWS_AS(collapse_probabilities(PacketState(grid, 1), p, 0.1), RuntimeViolation);
}

TEST_CASE("select_event partitions one draw") {
  const ChannelProbabilities p{0.004, 0.006};
  CHECK(select_event(p, 0.99) == std::nullopt);
  CHECK(select_event(p, 0.0) == JumpChannel::Atomic);
  CHECK(select_event(p, 0.0039) == JumpChannel::Atomic);
  CHECK(select_event(p, 0.004) == JumpChannel::Cavity);
  CHECK(select_event(p, 0.0099) == JumpChannel::Cavity);
  CHECK(select_event(p, 0.01) == std::nullopt);
  CHECK(select_event({0.0, 0.0}, 0.0) == std::nullopt);
}

TEST_CASE("select_event frequencies follow binomial statistics") {
  const ChannelProbabilities p{2e-3, 1e-3};
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int draws = 1'000'000;
  int atomic = 0, cavity = 0;
  for (int k = 0; k < draws; ++k) {
    const auto ev = select_event(p, u(rng));
    if (ev == JumpChannel::Atomic) ++atomic;
    if (ev == JumpChannel::Cavity) ++cavity;
  }
  auto within = [&](int count, double prob) {
    const double mean = draws * prob;
    const double sigma = std::sqrt(draws * prob * (1 - prob));
    return std::abs(count - mean) < 5 * sigma;
  };
  CHECK(within(atomic, p.p_atom));
  CHECK(within(cavity, p.p_cav));
}

TEST_CASE("atomic jump: early node packet gives the difference-of-Gaussians profile") {
  const auto grid = make_grid(8, 60);
  const auto s = early_node_state(grid, 2.0, 0.1);
  auto after = atomic_jump(s, 0.0);
  CHECK(after.excited_norm_squared() == 0.0);
  after.normalize();
  const auto pq = momentum_distribution(after);
  const auto oracle = post_jump_oracle(SystemParams{}.beta(), 0.0, grid);
  CHECK(l2_relative(pq, oracle) <= 0.02);

  // maxima at +-sqrt(2) dq within a cell
  const auto peaks = local_maxima(pq);
  REQUIRE(peaks.size() == 2);
  CHECK(std::abs(std::abs(peaks[0].position) - 14.14) <= grid.spacing());
  CHECK(std::abs(std::abs(peaks[1].position) - 14.14) <= grid.spacing());

  // nothing left at the node
  const auto px = position_distribution(after, PositionWindow::around(0.25, 0.25));
  const double peak = *std::max_element(px.density.begin(), px.density.end());
  const auto node = static_cast<std::size_t>(std::lround((0.25 - px.support[0]) / px.measure));
  REQUIRE(std::abs(px.support[node] - 0.25) < 1e-12);
  CHECK(px.density[node] < 1e-6 * peak);
}

TEST_CASE("atomic jump: recoil translates the momentum profile") {
  const auto grid = make_grid(8, 60);
  const auto s = early_node_state(grid, 1.0, 0.0);
  const auto a = atomic_jump(s, 0.0);
  const auto b = atomic_jump(s, 1.0);
  // eta = +1 moves the profile by -1 recoil = 8 cells
  const auto ra = a.g(0);
  const auto rb = b.g(0);
  for (std::size_t i = 0; i + 8 < grid.points(); ++i) CHECK(rb[i] == ra[i + 8]);
  for (std::size_t i = grid.points() - 8; i < grid.points(); ++i) CHECK(rb[i] == cplx{});
  // eta rounds to the nearest cell
  CHECK(recoil_cells(grid, 0.3) == 2);
  CHECK(recoil_cells(grid, -0.3) == -2);
  CHECK(recoil_cells(grid, 0.0624) == 0);
  CHECK(recoil_cells(grid, 0.0626) == 1);
}

TEST_CASE("atomic jump: errors") {
  const auto grid = make_grid(2, 64);
  SystemParams p;
  const auto g = init_packet(grid, field_fock(1, 1), p);
  CHECK_THROWS_AS(atomic_jump(g, 0.0), RuntimeViolation);
  const auto s = early_node_state(grid, 0.5, 0.0);
  CHECK_THROWS_AS(atomic_jump(s, 1.5), ValidationError);
  CHECK_THROWS_AS(atomic_jump(s, -1.01), ValidationError);
  CHECK_NOTHROW(atomic_jump(s, -1.0));
}

TEST_CASE("position distribution is blind to the recoil") {
  const auto grid = make_grid(8, 120);
  const auto s = early_node_state(grid, 3.0, 0.1);
  const auto ref = position_distribution(atomic_jump(s, 0.0));
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 5; ++k) {
    const auto pd = position_distribution(atomic_jump(s, u(rng)));
    double diff = 0.0;
    for (std::size_t i = 0; i < pd.size(); ++i) diff = std::max(diff, std::abs(pd.density[i] - ref.density[i]));
    CHECK(diff < 1e-10);
  }
}

TEST_CASE("cavity jump") {
  const auto grid = make_grid(4, 64);
  SystemParams p;
  const auto one = init_packet(grid, field_fock(1, 1), p);
  auto out = cavity_jump(one);
  out.normalize();
  CHECK(out.g(1)[grid.center()] == cplx{});
  const auto before = momentum_distribution(one);
  const auto after = momentum_distribution(out);
  for (std::size_t i = 0; i < grid.points(); ++i) CHECK(after.density[i] == Approx(before.density[i]));

  // a coherent field stays coherent: f(n) <- sqrt(n+1) f(n+1)
  const auto coh = init_packet(grid, field_coherent(cplx{0.7, 0.2}, 12), p);
  auto c = cavity_jump(coh);
  c.normalize();
  for (int n = 0; n < 12; ++n) {
    const double expected = std::abs(coh.g(n)[grid.center()]);
    CHECK(std::abs(c.g(n)[grid.center()]) == Approx(expected).epsilon(1e-6));
  }

  const auto vac = init_packet(grid, field_fock(0, 2), p);
  CHECK_THROWS_AS(cavity_jump(vac), RuntimeViolation);
}

TEST_CASE("cavity jump keeps a single-peaked packet single-peaked") {
  const auto grid = make_grid(8, 60);
  SystemParams p;
  p.kappa = 0.25;
  auto s = init_packet(grid, field_coherent(1.0, 12), p);
  Rk4Stepper st(Generator(grid, 12, p));
  for (int k = 0; k < 1000; ++k) st.step(s, 1e-3);
  const auto w = PositionWindow::around(0.25, 0.25);
  REQUIRE(local_maxima(position_distribution(s, w)).size() == 1);
  auto c = cavity_jump(s);
  c.normalize();
  CHECK(local_maxima(position_distribution(c, w)).size() == 1);
}
