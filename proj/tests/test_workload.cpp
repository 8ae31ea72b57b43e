#include "oracles.hpp"

#include "skyslice/errors.hpp"
#include "skyslice/workload.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace skyslice;

namespace {

TaskRequest task(double w, double f, double t) {
  TaskRequest r;
  r.w_ask = w;
  r.f_ask = f;
  r.t_ask = t;
  return r;
}

}  // namespace

TEST_SUITE("workload") {
  TEST_CASE("transmission delay") {
    CHECK(transmission_delay(task(10, 1, 1), 5.0) == 2.0);
    CHECK(transmission_delay(task(10, 1, 1), 1e300) == doctest::Approx(0.0));
    CHECK(std::isinf(transmission_delay(task(10, 1, 1), 0.0)));
  }

  TEST_CASE("computation delay") {
    CHECK(computation_delay(task(1, 50, 1), 0.5, 100.0) == doctest::Approx(1.0));
    CHECK(computation_delay(task(1, 50, 1), 1.0, 100.0) ==
          doctest::Approx(computation_delay(task(1, 50, 1), 0.5, 100.0) / 2.0));
    CHECK(std::isinf(computation_delay(task(1, 50, 1), 0.0, 100.0)));
  }

  TEST_CASE("delays match the oracle on random instances") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.01, 100.0), frac(0.01, 1.0);
    for (int k = 0; k < 1000; ++k) {
      const TaskRequest t = task(u(rng), u(rng), u(rng));
      const double r = u(rng), v = frac(rng), s = u(rng);
      CHECK(oracle::rel_err(transmission_delay(t, r), oracle::t_tran(t.w_ask, r)) < 1e-12);
      CHECK(oracle::rel_err(computation_delay(t, v, s), oracle::t_comp(t.f_ask, v, s)) < 1e-12);
      CHECK(total_delay(r, s) == oracle::t_total(r, s));
    }
    CHECK(total_delay(2, 1) == 3);
    CHECK(total_delay(0, 4.5) == 4.5);
  }

  TEST_CASE("satisfaction examples") {
    CHECK(satisfaction(3.0, 3.0, 0.1) == 0.5);
    CHECK(satisfaction(20.0, 10.0, 0.1) == doctest::Approx(0.7311).epsilon(1e-4));
    CHECK(satisfaction(1.0, 1e6, 0.1) < 1e-12);
    CHECK(satisfaction(1.0, kInfiniteDelay, 0.1) == 0.0);
  }

  TEST_CASE("satisfaction is bounded and strictly decreasing in delay") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    for (int k = 0; k < 500; ++k) {
      const double t_ask = u(rng), a = u(rng), b = a + 0.01 + u(rng);
      const double sa = satisfaction(t_ask, a, 0.1), sb = satisfaction(t_ask, b, 0.1);
      CHECK(sa > 0.0);
      CHECK(sa < 1.0);
      CHECK(sb < sa);
      CHECK(oracle::rel_err(sa, oracle::sat(t_ask, a, 0.1)) < 1e-12);
      CHECK(satisfaction(a, a, 0.1) == 0.5);
    }
  }

  TEST_CASE("slice satisfaction sum and mean") {
    CHECK(slice_satisfaction({}) == 0.0);
    CHECK(mean_satisfaction({}) == 0.0);
    const std::vector<double> one{0.7}, two{0.7, 0.3};
    CHECK(slice_satisfaction(one) == doctest::Approx(0.7));
    CHECK(slice_satisfaction(two) == doctest::Approx(1.0));
    CHECK(mean_satisfaction(two) == doctest::Approx(0.5));
  }

  TEST_CASE("violation cost counts strictly late tasks") {
    const std::vector<double> none_late{1, 2}, deadlines2{1, 2};
    CHECK(violation_cost(none_late, deadlines2, 2.0) == 0.0);
    const std::vector<double> delays{5, 6, 7, 1}, deadlines{1, 2, 3, 4};
    CHECK(violation_cost(delays, deadlines, 2.0) == 6.0);
    const std::vector<double> exact{3.0}, exact_deadline{3.0};
    CHECK(violation_cost(exact, exact_deadline, 2.0) == 0.0);
    const std::vector<double> inf{kInfiniteDelay};
    CHECK(violation_cost(inf, exact_deadline, 2.0) == 2.0);
    CHECK_THROWS_AS(late_count(delays, exact), ContractViolation);
  }

  TEST_CASE("violation cost is an integer multiple of omega_v") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int k = 0; k < 300; ++k) {
      std::vector<double> d(5), t(5);
      for (int i = 0; i < 5; ++i) {
        d[static_cast<std::size_t>(i)] = u(rng);
        t[static_cast<std::size_t>(i)] = u(rng);
      }
      const double omega = 0.5 + u(rng);
      const double c = violation_cost(d, t, omega);
      CHECK(c >= 0.0);
      CHECK(std::abs(c / omega - std::round(c / omega)) < 1e-12);
      CHECK(c == doctest::Approx(oracle::vio(d, t, omega)));
    }
  }

  TEST_CASE("operation cost is linear") {
    CostWeights w;
    CHECK(operation_cost(0, 0, 0, w) == 0.0);
    CHECK(operation_cost(60, 0.6, 60, w) == doctest::Approx(2.0 * operation_cost(30, 0.3, 30, w)));
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
      const double vb = frac(rng), vm = frac(rng), vc = frac(rng), lambda = frac(rng);
      const double c = operation_cost(vb * 100, vm * 1, vc * 100, w);
      CHECK(oracle::rel_err(c, oracle::op(vb, 100, vm, 1, vc, 100, w.omega_band, w.omega_beam, w.omega_comp)) < 1e-12);
      CHECK(operation_cost(lambda * vb * 100, lambda * vm, lambda * vc * 100, w) == doctest::Approx(lambda * c));
    }
  }

  TEST_CASE("total cost is the sum of its parts") {
    CHECK(total_cost(0, 0) == 0);
    CHECK(total_cost(6, 4) == 10);
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (int k = 0; k < 100; ++k) {
      const double a = u(rng), b = u(rng);
      CHECK(total_cost(a, b) == oracle::total(a, b));
    }
  }

  TEST_CASE("system objective") {
    const std::vector<double> sats{1.5, 0.5}, costs{1.0, 2.0};
    CHECK(system_objective(sats, costs, 1.0, 1.0) == doctest::Approx(-1.0));
    CHECK(system_objective(sats, costs, 2.0, 0.5) == doctest::Approx(2.5));
    const std::vector<double> short_costs{1.0};
    CHECK_THROWS_AS(system_objective(sats, short_costs, 1.0, 1.0), ContractViolation);
  }

  TEST_CASE("task generation") {
    TaskGenerator gen({});
    std::vector<EvtolState> fleet(3);
    fleet[0].phase = FlightPhase::Cruise;
    fleet[1].phase = FlightPhase::Grounded;
    fleet[2].phase = FlightPhase::Takeoff;
    fleet[2].id = 2;
    std::mt19937_64 a(5), b(5);
    const auto ta = gen.generate(a, fleet), tb = gen.generate(b, fleet);
    REQUIRE(ta.size() == 2);
    CHECK(ta[1].owner == 2);
    for (std::size_t k = 0; k < ta.size(); ++k) {
      CHECK(ta[k].w_ask == tb[k].w_ask);
      CHECK(ta[k].f_ask == tb[k].f_ask);
      CHECK(ta[k].t_ask == tb[k].t_ask);
      CHECK(ta[k].w_ask > 0.0);
    }
  }

  TEST_CASE("task draws average to the range midpoints") {
    TaskGenerator gen({});
    std::mt19937_64 rng(43);
    EvtolState e;
    e.phase = FlightPhase::Cruise;
    double w = 0, f = 0, t = 0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
      const TaskRequest r = gen.draw(rng, e);
      CHECK(r.w_ask >= 5.0);
      CHECK(r.w_ask <= 20.0);
      w += r.w_ask;
      f += r.f_ask;
      t += r.t_ask;
    }
    CHECK(std::abs(w / n - 12.5) / 12.5 < 0.01);
    CHECK(std::abs(f / n - 30.0) / 30.0 < 0.01);
    CHECK(std::abs(t / n - 3.0) / 3.0 < 0.01);
  }

  TEST_CASE("invalid task ranges are rejected") {
    TaskGenConfig c;
    c.w = {5.0, 1.0};
    CHECK_THROWS_AS(TaskGenerator{c}, ConfigError);
    c = {};
    c.t = {0.0, 1.0};
    CHECK_THROWS_AS(TaskGenerator{c}, ConfigError);
  }
}
