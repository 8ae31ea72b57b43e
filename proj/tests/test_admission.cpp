#include "oracles.hpp"

#include "skyslice/admission.hpp"
#include "skyslice/errors.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

using namespace skyslice;

namespace {

PairingProblem full_mesh(int evtols, int bss, int slices, int bs_cap, int slice_cap, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> delay(0.1, 10.0), dist(100.0, 5000.0), ask(1.0, 5.0);
  PairingProblem p;
  p.bs_capacity.assign(static_cast<std::size_t>(bss), bs_cap);
  p.slice_capacity.assign(static_cast<std::size_t>(slices), slice_cap);
  for (int i = 0; i < evtols; ++i) {
    PairingRequest r;
    r.evtol = i;
    r.t_ask = ask(rng);
    for (int j = 0; j < bss; ++j)
      for (int q = 0; q < slices; ++q) r.candidates.push_back({j, q, delay(rng), dist(rng)});
    p.requests.push_back(r);
  }
  return p;
}

void check_caps(const PairingProblem& p, const PairingOutcome& out) {
  std::vector<int> bs(p.bs_capacity.size(), 0), sl(p.slice_capacity.size(), 0);
  for (const Pairing& x : out.pairings) {
    ++bs[static_cast<std::size_t>(x.bs)];
    ++sl[static_cast<std::size_t>(x.slice)];
  }
  for (std::size_t j = 0; j < bs.size(); ++j) CHECK(bs[j] <= p.bs_capacity[j]);
  for (std::size_t q = 0; q < sl.size(); ++q) CHECK(sl[q] <= p.slice_capacity[q]);
  CHECK(out.pairings.size() + out.unpaired.size() == p.requests.size());
}

/// Averaged-task delay under a toy link whose rate and compute scale with the
/// reserved fraction.
struct ToyLink {
  std::vector<double> rate;  // Mbit/s at the full pool, per owner
  double comp = 100.0;
  double operator()(const TaskRequest& t, double fraction) const {
    return t.w_ask / (rate[static_cast<std::size_t>(t.owner)] * fraction) + t.f_ask / (comp * fraction);
  }
};

bool feasible_at(const std::vector<TaskRequest>& tasks, int level, int l_max, const ToyLink& link) {
  double w = 0, f = 0, t = 0;
  for (const TaskRequest& x : tasks) {
    w += x.w_ask;
    f += x.f_ask;
    t += x.t_ask;
  }
  const double n = static_cast<double>(tasks.size());
  for (const TaskRequest& x : tasks) {
    TaskRequest avg = x;
    avg.w_ask = w / n;
    avg.f_ask = f / n;
    if (link(avg, double(level) / l_max) > t / n) return false;
  }
  return true;
}

/// Exhaustive scan over every level; -1 when none is feasible.
int oracle_level(const std::vector<TaskRequest>& tasks, int l_max, const ToyLink& link) {
  int best = -1;
  for (int l = l_max; l >= 1; --l)
    if (feasible_at(tasks, l, l_max, link)) best = l;
  return best;
}

}  // namespace

TEST_SUITE("admission") {
  TEST_CASE("priority normalization examples") {
    const std::vector<Candidate> one{{0, 0, 2.0, 300.0}};
    CHECK(match_priorities(3.0, one, 0.5)[0] == doctest::Approx(1.0));
    CHECK_THROWS_AS(match_priorities(3.0, std::vector<Candidate>{}, 0.5), ContractViolation);
    const std::vector<Candidate> zero_d{{0, 0, 2.0, 0.0}};
    CHECK_THROWS_AS(match_priorities(3.0, zero_d, 0.5), ContractViolation);
  }

  TEST_CASE("gamma one ranks by deadline over delay") {
    const std::vector<Candidate> c{{0, 0, 4.0, 10.0}, {1, 0, 1.0, 5000.0}, {2, 0, 2.0, 100.0}};
    const std::vector<double> p = match_priorities(3.0, c, 1.0);
    CHECK(p[1] > p[2]);
    CHECK(p[2] > p[0]);
  }

  TEST_CASE("gamma zero prefers the closest base station") {
    const std::vector<Candidate> c{{0, 0, 1.0, 900.0}, {1, 0, 1.0, 150.0}, {2, 0, 1.0, 400.0}};
    const std::vector<double> p = match_priorities(3.0, c, 0.0);
    CHECK(std::max_element(p.begin(), p.end()) - p.begin() == 1);
  }

  TEST_CASE("priorities match the literal formula and sum to one") {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> delay(0.01, 20.0), dist(1.0, 6000.0), g(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
      const double gamma = g(rng), t_ask = delay(rng);
      std::vector<Candidate> c;
      std::vector<double> ds, dd;
      for (int k = 0; k < 9; ++k) {
        c.push_back({k / 3, k % 3, delay(rng), dist(rng)});
        ds.push_back(c.back().delay);
        dd.push_back(c.back().distance);
      }
      const std::vector<double> p = match_priorities(t_ask, c, gamma);
      const std::vector<double> o = oracle::priorities(t_ask, ds, dd, gamma);
      double sum = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) {
        CHECK(p[k] >= 0.0);
        CHECK(oracle::rel_err(p[k], o[k]) < 1e-12);
        sum += p[k];
      }
      CHECK(std::abs(sum - 1.0) < 1e-9);
      std::vector<double> raw;
      for (const Candidate& x : c) raw.push_back(match_priority_numerator(t_ask, x, gamma));
      CHECK(std::max_element(raw.begin(), raw.end()) - raw.begin() ==
            std::max_element(p.begin(), p.end()) - p.begin());
    }
  }

  TEST_CASE("infinite delays contribute only through distance") {
    const Candidate c{0, 0, kInfiniteDelay, 200.0};
    CHECK(match_priority_numerator(3.0, c, 0.5) == doctest::Approx(0.5 / 200.0));
  }

  TEST_CASE("pairing examples") {
    std::mt19937_64 rng(59);
    const PairingProblem six = full_mesh(6, 3, 3, 3, 2, rng);
    const PairingOutcome a = pair_all(six, 0.5);
    CHECK(a.pairings.size() == 6);
    CHECK(a.unpaired.empty());

    const PairingProblem single = full_mesh(1, 1, 1, 3, 2, rng);
    const PairingOutcome b = pair_all(single, 0.5);
    REQUIRE(b.pairings.size() == 1);
    CHECK(b.pairings[0] == Pairing{0, 0, 0, 1.0});

    const PairingProblem ten = full_mesh(10, 3, 3, 10, 2, rng);
    const PairingOutcome c = pair_all(ten, 0.5);
    CHECK(c.unpaired.size() == 4);
    check_caps(ten, c);
  }

  TEST_CASE("pairing takes the best free candidate") {
    PairingProblem p;
    p.bs_capacity = {1, 3};
    p.slice_capacity = {2, 2};
    PairingRequest r0{0, 3.0, {{0, 0, 1.0, 100.0}, {1, 1, 3.0, 100.0}}};
    PairingRequest r1{1, 3.0, {{0, 1, 1.0, 100.0}, {1, 0, 2.0, 100.0}}};
    p.requests = {r0, r1};
    const PairingOutcome out = pair_all(p, 1.0);
    REQUIRE(out.pairings.size() == 2);
    CHECK(out.pairings[0].bs == 0);
    CHECK(out.pairings[1].bs == 1);
    CHECK(out.pairings[1].slice == 0);
  }

  TEST_CASE("pairing never exceeds capacities") {
    std::mt19937_64 rng(61);
    std::uniform_int_distribution<int> n(1, 14), bs(1, 4), sl(1, 4);
    for (int trial = 0; trial < 300; ++trial) {
      const PairingProblem p = full_mesh(n(rng), bs(rng), sl(rng), 3, 2, rng);
      check_caps(p, pair_all(p, 0.5));
      check_caps(p, pair_random(p, rng));
    }
  }

  TEST_CASE("random pairing is seeded") {
    std::mt19937_64 gen(67);
    const PairingProblem p = full_mesh(6, 3, 3, 3, 2, gen);
    std::mt19937_64 a(1), b(1);
    CHECK(pair_random(p, a).pairings == pair_random(p, b).pairings);
  }

  TEST_CASE("pre-assessment examples") {
    ToyLink link{{1e6, 1e6}, 1e6};
    std::vector<TaskRequest> tasks(2);
    for (int i = 0; i < 2; ++i) {
      tasks[static_cast<std::size_t>(i)].owner = i;
      tasks[static_cast<std::size_t>(i)].w_ask = 10;
      tasks[static_cast<std::size_t>(i)].f_ask = 10;
      tasks[static_cast<std::size_t>(i)].t_ask = 3;
    }
    CHECK(pre_assess(tasks, 10, link) == AssessmentResult{1, true});

    ToyLink slow{{1.0, 1.0}, 1.0};
    CHECK(pre_assess(tasks, 10, slow) == AssessmentResult{10, false});

    CHECK(pre_assess(std::vector<TaskRequest>{}, 10, slow) == AssessmentResult{1, true});
    CHECK_THROWS_AS(pre_assess(tasks, 0, slow), ContractViolation);
  }

  TEST_CASE("pre-assessment returns the minimal feasible level") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> w(5, 20), f(10, 50), t(1, 5), r(5, 200);
    int found = 0;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<TaskRequest> tasks(6);
      ToyLink link;
      for (int i = 0; i < 6; ++i) {
        TaskRequest& x = tasks[static_cast<std::size_t>(i)];
        x.owner = i;
        x.w_ask = w(rng);
        x.f_ask = f(rng);
        x.t_ask = t(rng);
        link.rate.push_back(r(rng));
      }
      link.comp = 50.0 + r(rng);
      const int expect = oracle_level(tasks, 10, link);
      const AssessmentResult got = pre_assess(tasks, 10, link);
      if (expect < 0) {
        CHECK(got == AssessmentResult{10, false});
      } else {
        ++found;
        CHECK(got == AssessmentResult{expect, true});
        for (int l = expect; l <= 10; ++l) CHECK(feasible_at(tasks, l, 10, link));
      }
    }
    CHECK(found > 20);
  }
}
