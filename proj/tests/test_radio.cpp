#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rissim/energy.hpp"
#include "rissim/radio.hpp"
#include "rissim/random.hpp"

using namespace rissim;

namespace {

// MBS at the origin and one SBS at (100, 0) with a 50 m disk.
Scenario two_cell() {
  Scenario s = paper_default_scenario();
  s.sbs_list.resize(1);
  s.sbs_list[0].position = {100.0, 0.0};
  s.sbs_list[0].coverage_radius = 50.0;
  s.ris_list.clear();
  return s;
}

GainMatrix gain_matrix(std::size_t nb, std::size_t nu, std::vector<double> values) {
  return GainMatrix{nb, nu, std::move(values)};
}

}  // namespace

TEST_CASE("association") {
  const Scenario s = two_cell();
  WorldInstance w;
  w.ue_positions = {{100.0, 10.0}, {300.0, 0.0}, {100.0, -20.0}};
  w.base_demand = {1.0, 1.0, 1.0};
  const bool on[] = {true, true};
  const bool off[] = {true, false};
  // UE0: SBS stronger and in range. UE1: out of range. UE2: MBS stronger.
  const std::vector<double> gain{1.0, 1.0, 5.0, 2.0, 9.0, 4.0};
  const auto a = associate(s, w, on, gain);
  CHECK(a.serving == std::vector<int>{1, 0, 0});
  const auto b = associate(s, w, off, gain);
  CHECK(b.serving == std::vector<int>{0, 0, 0});
  // Ties go to the lower index.
  const std::vector<double> tie{2.0, 1.0, 1.0, 2.0, 1.0, 1.0};
  CHECK(associate(s, w, on, tie).serving[0] == 0);
  CHECK_THROWS_AS(associate(s, w, std::span<const bool>(on, 1), gain), InvalidArgument);
}

TEST_CASE("single UE takes RBs until its demand is met") {
  BaseStationSpec bs = paper_default_scenario().mbs;
  const std::vector<int> attached{0};
  const std::vector<double> avg{0.0};
  // 100 RBs at 1 Mbit/s each.
  const auto rates = uniform_rb_rates(std::vector<double>{1e6}, 100);
  auto alloc = allocate_rbs(bs, 40.0, attached, std::vector<double>{10.5e6}, rates, avg);
  CHECK(std::count(alloc.rb_owner.begin(), alloc.rb_owner.end(), 0) == 11);
  CHECK(alloc.rb_owner[0] == 0);
  CHECK(alloc.power_per_rb == doctest::Approx(0.4));
  CHECK(alloc.rb_bandwidth == doctest::Approx(200e3));

  alloc = allocate_rbs(bs, 40.0, attached, std::vector<double>{1e12}, rates, avg, FillOrder::descending);
  CHECK(std::count(alloc.rb_owner.begin(), alloc.rb_owner.end(), 0) == 100);

  alloc = allocate_rbs(bs, 40.0, attached, std::vector<double>{3e6}, rates, avg, FillOrder::descending);
  CHECK(alloc.rb_owner[99] == 0);
  CHECK(alloc.rb_owner[0] == -1);

  CHECK_THROWS_AS(allocate_rbs(bs, 41.0, attached, std::vector<double>{1.0}, rates, avg), InvalidArgument);
}

TEST_CASE("identical UEs alternate under proportional fairness") {
  BaseStationSpec bs = paper_default_scenario().mbs;
  const std::vector<int> attached{0, 1};
  const auto rates = uniform_rb_rates(std::vector<double>{1e6, 1e6}, 100);
  const auto alloc = allocate_rbs(bs, 40.0, attached, std::vector<double>{1e9, 1e9}, rates,
                                  std::vector<double>{0.0, 0.0});
  for (std::size_t r = 0; r < 100; ++r) CHECK(alloc.rb_owner[r] == static_cast<int>(r % 2));
}

TEST_CASE("allocation never exceeds the grid and only serves attached UEs") {
  BaseStationSpec bs = paper_default_scenario().mbs;
  bs.num_rbs = 25;
  Rng rng(8);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rng.below(12);
    std::vector<int> attached;
    for (std::size_t i = 0; i < n; ++i) attached.push_back(static_cast<int>(2 * i));
    std::vector<double> demand(2 * n), avg(2 * n), per_ue(n);
    for (auto& d : demand) d = 1e7 * rng.uniform();
    for (auto& a : avg) a = 1e6 * rng.uniform();
    for (auto& r : per_ue) r = 1e6 * rng.uniform();
    const auto alloc = allocate_rbs(bs, 10.0, attached, demand, uniform_rb_rates(per_ue, 25), avg);
    CHECK(alloc.rb_owner.size() == 25);
    for (int owner : alloc.rb_owner) {
      CHECK((owner == -1 || (owner % 2 == 0 && owner < static_cast<int>(2 * n))));
    }
  }
}

TEST_CASE("rb rate") {
  // Unit SINR gives one bit per hertz.
  CHECK(rb_rate(1.0, 1.0, 1.0, 0.5, 0.5) == doctest::Approx(1.0));
  CHECK(rb_rate(0.0, 1.0, 180e3, 4e-21, 0.0) == 0.0);
}

TEST_CASE("two-BS SINR against a hand computation") {
  // UE0 on BS0 owns RBs 0 and 1; UE1 on BS1 owns RB 1 only.
  RbAllocation alloc;
  alloc.per_bs.resize(2);
  alloc.per_bs[0] = BsAllocation{0.4, 200e3, {0, 0, -1}};
  alloc.per_bs[1] = BsAllocation{0.063, 200e3, {-1, 1, -1}};
  Association assoc{{0, 1}};
  const auto gains = gain_matrix(2, 2, {2e-9, 3e-12, 5e-11, 7e-10});
  const double n0 = 4e-21;
  const std::vector<double> demand{1e9, 1.0};
  const auto links = link_report(alloc, assoc, gains, n0, demand, 1.0);

  const double s0 = 2 * 0.4 * 2e-9;
  const double i0 = 0.063 * 5e-11;
  const double sinr0 = s0 / (400e3 * n0 + i0);
  CHECK(links[0].sinr == doctest::Approx(sinr0).epsilon(1e-9));
  CHECK(links[0].rate == doctest::Approx(400e3 * std::log2(1.0 + sinr0)).epsilon(1e-9));
  CHECK(links[0].throughput == doctest::Approx(links[0].rate).epsilon(1e-12));
  CHECK(links[0].rbs == 2);

  const double s1 = 0.063 * 7e-10;
  const double i1 = 0.4 * 3e-12;
  CHECK(links[1].sinr == doctest::Approx(s1 / (200e3 * n0 + i1)).epsilon(1e-9));
  CHECK(links[1].throughput == 1.0);
  CHECK(links[1].sinr_ok);

  // Zero transmit power reports zero SINR and rate.
  alloc.per_bs[1].power_per_rb = 0.0;
  const auto silent = link_report(alloc, assoc, gains, n0, demand, 1.0);
  CHECK(silent[1].sinr == 0.0);
  CHECK(silent[1].rate == 0.0);
  CHECK_FALSE(silent[1].sinr_ok);
}

TEST_CASE("overload count") {
  std::vector<LinkResult> links(3);
  links[0].bs = 0, links[0].rate = 10.0;
  links[1].bs = 1, links[1].rate = 10.0;
  links[2].bs = 1, links[2].rate = 10.0;
  CHECK(overload_count(links, std::vector<double>{10.0, 10.0, 10.0}, 2) == 0);
  CHECK(overload_count(links, std::vector<double>{20.0, 10.0, 10.0}, 2) == 1);
  CHECK(overload_count(links, std::vector<double>{20.0, 15.0, 15.0}, 2) == 2);
  // Within the 1% slack.
  CHECK(overload_count(links, std::vector<double>{10.05, 10.0, 10.0}, 2) == 0);
}

TEST_CASE("base station power") {
  const Scenario s = paper_default_scenario();
  CHECK(bs_power(s.mbs, BsMode::active, 10.0) == doctest::Approx(177.0));
  CHECK(bs_power(s.sbs_list[0], BsMode::active, 0.0) == doctest::Approx(75.0));
  CHECK(bs_power(s.sbs_list[0], BsMode::active, 6.3) == doctest::Approx(75.0 + 2.6 * 6.3));
  CHECK(bs_power(s.sbs_list[0], BsMode::sleeping, 6.3) == 0.0);
  CHECK_THROWS_AS(bs_power(s.sbs_list[0], BsMode::active, 6.4), InvalidArgument);
  CHECK_THROWS_AS(bs_power(s.mbs, BsMode::active, -1.0), InvalidArgument);
}

TEST_CASE("energy efficiency and objective") {
  std::vector<PowerDraw> power{{100.0, BsMode::active}, {0.0, BsMode::sleeping}};
  std::vector<LinkResult> links(2);
  links[0].throughput = 3e6;
  links[1].throughput = 2e6;
  auto snap = snapshot(power, links, 1e4, 0);
  CHECK(snap.ee == doctest::Approx(50000.0));
  CHECK(snap.penalized_objective == doctest::Approx(50000.0));
  snap = snapshot(power, links, 1e4, 2);
  CHECK(snap.penalized_objective == doctest::Approx(30000.0));
  links[0].throughput = links[1].throughput = 0.0;
  CHECK(snapshot(power, links, 0.0, 0).ee == 0.0);
  std::vector<PowerDraw> none{{0.0, BsMode::sleeping}};
  CHECK(snapshot(none, links, 0.0, 0).ee == 0.0);
}
