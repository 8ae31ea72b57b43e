#include "oracles.hpp"

#include "skyslice/errors.hpp"
#include "skyslice/radio.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace skyslice;

TEST_SUITE("radio") {
  TEST_CASE("peak gain closed form") {
    CHECK(max_beam_gain(1.0) == doctest::Approx(0.6097).epsilon(1e-4));
    CHECK(max_beam_gain(2.0) == doctest::Approx(max_beam_gain(1.0) / 2.0));
    CHECK(max_beam_gain(0.5) == doctest::Approx(max_beam_gain(1.0) * 2.0));
    CHECK_THROWS(max_beam_gain(0.0));
    CHECK(max_beam_gain(1.0f) == doctest::Approx(0.6097f).epsilon(1e-4));
  }

  TEST_CASE("peak gain is the maximum of the pattern over beamwidth") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.05, 1.5);
    for (int k = 0; k < 20; ++k) {
      const double phi = u(rng);
      const double bw = optimal_beamwidth(phi);
      CHECK(beam_pattern_gain(phi, bw) == doctest::Approx(max_beam_gain(phi)).epsilon(1e-12));
      CHECK(beam_pattern_gain(phi, bw * 1.01) < beam_pattern_gain(phi, bw));
      CHECK(beam_pattern_gain(phi, bw * 0.99) < beam_pattern_gain(phi, bw));
    }
  }

  TEST_CASE("rate derivative vanishes at the optimal beamwidth") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> angle(0.1, 1.4), dist(200.0, 5000.0), snr(1.0, 1e6);
    for (int k = 0; k < 20; ++k) {
      const double phi = angle(rng), d = dist(rng), s = snr(rng);
      auto rate_at = [&](double bw) { return achievable_rate(50.0, s, beam_pattern_gain(phi, bw), d, 1000.0); };
      const double bw = optimal_beamwidth(phi), h = 1e-5 * bw;
      const double slope = (rate_at(bw + h) - rate_at(bw - h)) / (2.0 * h);
      CHECK(std::abs(slope) * bw / rate_at(bw) < 1e-6);
    }
  }

  TEST_CASE("steered gain saturates below the minimum beamwidth") {
    CHECK(steered_gain(1.0, 0.2) == doctest::Approx(max_beam_gain(1.0)));
    const double phi = 0.01;
    CHECK(optimal_beamwidth(phi) < 0.2);
    CHECK(steered_gain(phi, 0.2) == doctest::Approx(beam_pattern_gain(phi, 0.2)));
    CHECK(steered_gain(phi, 0.2) < max_beam_gain(phi));
    CHECK(std::isfinite(steered_gain(0.0, 0.2)));
  }

  TEST_CASE("effective gain scaling") {
    CHECK(effective_gain(1.0, 0.0, 1.0) == 0.0);
    CHECK(effective_gain(1.0, 1.0, 1.0) == doctest::Approx(0.6097).epsilon(1e-4));
    CHECK(effective_gain(0.7, 0.5, 1.0) == doctest::Approx(0.5 * effective_gain(0.7, 1.0, 1.0)));
    CHECK_THROWS_AS(effective_gain(1.0, 1.5, 1.0), ContractViolation);
    CHECK_THROWS_AS(effective_gain(1.0, -0.1, 1.0), ContractViolation);
  }

  TEST_CASE("gain matches the literal pattern formula") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.01, 1.5), frac(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
      const double phi = u(rng), bw = u(rng), v = frac(rng);
      CHECK(oracle::rel_err(scale_gain(beam_pattern_gain(phi, bw), v, 2.0), oracle::beam_gain(phi, bw, v, 2.0)) < 1e-12);
      CHECK(oracle::rel_err(max_beam_gain(phi), oracle::max_gain(phi)) < 1e-12);
    }
  }

  TEST_CASE("single link SINR") {
    RadioParams p;
    const std::vector<ActiveLink> links{{0, 0}};
    CHECK(sinr(0, 0, links, p) == doctest::Approx(1e8));
    p.noise_power = 1e30;
    CHECK(sinr(0, 0, links, p) < 1e-20);
  }

  TEST_CASE("SINR interference set and symmetry") {
    RadioParams p;
    p.channel_gain_sq = Eigen::MatrixXd::Constant(3, 2, 0.5);
    const std::vector<ActiveLink> links{{0, 0}, {1, 1}, {2, 0}};
    const double s0 = sinr(0, 0, links, p), s2 = sinr(2, 0, links, p);
    CHECK(s0 == doctest::Approx(s2));
    CHECK(s0 == doctest::Approx(oracle::sinr(0.1, 0.5, {0.1}, {0.5}, 1e-9)));
    const std::vector<int> tx{0, 1, 2};
    CHECK(worst_case_sinr(0, 0, tx, p) == doctest::Approx(oracle::sinr(0.1, 0.5, {0.1, 0.1}, {0.5, 0.5}, 1e-9)));
  }

  TEST_CASE("SINR is invariant to a common power scale") {
    RadioParams a;
    a.channel_gain_sq = Eigen::MatrixXd::Random(4, 2).cwiseAbs();
    RadioParams b = a;
    b.tx_power *= 37.0;
    b.noise_power *= 37.0;
    const std::vector<ActiveLink> links{{0, 0}, {1, 1}, {2, 1}, {3, 0}};
    for (const ActiveLink& l : links) CHECK(sinr(l.evtol, l.bs, links, a) == doctest::Approx(sinr(l.evtol, l.bs, links, b)));
  }

  TEST_CASE("rate examples") {
    CHECK(achievable_rate(0.0, 1e8, 0.6, 500.0, 1000.0) == 0.0);
    const double r1 = achievable_rate(50.0, 1e3, 0.6, 500.0, 1000.0);
    const double r2 = achievable_rate(50.0, 1e3, 0.6, 1000.0, 1000.0);
    CHECK(r2 == doctest::Approx(r1 / 4.0));
    CHECK_THROWS_AS(achievable_rate(50.0, 1e3, 0.6, 0.0, 1000.0), DegenerateGeometry);
  }

  TEST_CASE("rate matches the literal transcription") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> frac(0.0, 1.0), d(1.0, 6000.0), s(0.0, 1e9), g(0.0, 5.0);
    for (int k = 0; k < 500; ++k) {
      const double v = frac(rng), dd = d(rng), ss = s(rng), gg = g(rng);
      CHECK(oracle::rel_err(achievable_rate(v * 100.0, ss, gg, dd, 1.0), oracle::rate(v, 100.0, ss, gg, dd)) < 1e-12);
      CHECK(oracle::rel_err(achievable_rate(v * 100.0, ss, gg, dd, 2000.0), oracle::rate(v, 100.0, ss, gg, dd, 2000.0)) < 1e-12);
    }
  }

  TEST_CASE("rate is monotone in each input") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (int k = 0; k < 100; ++k) {
      const double band = 100.0 * u(rng), s = 1e4 * u(rng), g = u(rng), d = 1000.0 * u(rng);
      const double r = achievable_rate(band, s, g, d, 1000.0);
      CHECK(achievable_rate(band * 1.1, s, g, d, 1000.0) >= r);
      CHECK(achievable_rate(band, s * 1.1, g, d, 1000.0) >= r);
      CHECK(achievable_rate(band, s, g * 1.1, d, 1000.0) >= r);
      CHECK(achievable_rate(band, s, g, d * 1.1, 1000.0) <= r);
    }
  }

  TEST_CASE("link budget composes the pieces") {
    EvtolState e;
    e.position = Vec3(300.0, 400.0, 100.0);
    BaseStation b;
    RadioParams p;
    const LinkBudget lb = link_budget(e, b, 0.4, 100.0, 0.5, 1.0, 1e4, p);
    const double d = oracle::distance(300, 400, 100, 0, 0, 0);
    const double phi = oracle::azimuth(100.0, d);
    const double g = oracle::max_gain(phi) * 0.5;
    CHECK(lb.gain == doctest::Approx(g));
    CHECK(lb.rate == doctest::Approx(oracle::rate(0.4, 100.0, 1e4, g, d, p.reference_distance)));
    CHECK_THROWS_AS(link_budget(e, b, 1.2, 100.0, 0.5, 1.0, 1e4, p), ContractViolation);
  }
}
