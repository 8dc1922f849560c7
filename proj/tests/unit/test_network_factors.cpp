#include <doctest.h>

#include <random>
#include <sstream>

#include "gridline/error.hpp"
#include "gridline/network_factors.hpp"
#include "test_support.hpp"

using namespace gridline;
using doctest::Approx;

TEST_SUITE("network_factors") {
  TEST_CASE("two buses, one line") {
    const auto net = test::make_network(2, {{1, 2, 0.1}}, {{1, 100, 10}});
    const auto ptdf = compute_ptdf(net, 2);
    CHECK(ptdf(0, 0) == Approx(1.0).epsilon(1e-15));
    CHECK(ptdf(0, 1) == 0.0);
    const auto f = compute_factors(net, 2);
    CHECK(f.radial[0]);
    CHECK(f.radial_branch_ids(net) == std::vector<BranchId>{1});
  }

  TEST_CASE("equal-reactance triangle") {
    // Branches 1-2, 2-3, 1-3.
    const auto net = test::make_network(3, {{1, 2, 0.1}, {2, 3, 0.1}, {1, 3, 0.1}}, {{1, 100, 10}});
    const auto ptdf = compute_ptdf(net, 3);
    CHECK(ptdf(2, 0) == Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(ptdf(0, 0) == Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(ptdf(1, 0) == Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK((ptdf.col(2).array() == 0.0).all());
    const auto f = compute_factors(net, 3);
    CHECK(std::none_of(f.radial.begin(), f.radial.end(), [](bool r) { return r; }));
    // Lose 1-2: everything takes the direct path.
    std::vector<bool> removed{true, false, false};
    Eigen::VectorXd inj(3);
    inj << 90, -30, -60;
    const auto base = test::dc_flows(net, inj, 3);
    const auto after = test::dc_flows(net, inj, 3, removed);
    for (std::size_t b = 1; b < 3; ++b) {
      const auto i = static_cast<Eigen::Index>(b);
      CHECK(base(i) + f.lodf(i, 0) * base(0) == Approx(after(i)).epsilon(1e-12));
    }
    CHECK(f.lodf(0, 0) == -1.0);
  }

  TEST_CASE("parallel identical lines shift everything to the twin") {
    const auto net = test::make_network(3, {{1, 2, 0.1}, {1, 2, 0.1}, {2, 3, 0.2}}, {{1, 100, 10}});
    const auto f = compute_factors(net);
    CHECK(f.lodf(1, 0) == Approx(1.0).epsilon(1e-12));
    CHECK(f.lodf(0, 1) == Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(f.radial[0]);
    CHECK(f.radial[2]);
    for (Eigen::Index b = 0; b < 3; ++b) {
      if (b != 2) CHECK(f.lodf(b, 2) == 0.0);
    }
    CHECK(f.lodf(2, 2) == -1.0);
  }

  TEST_CASE("fixtures: PTDF matches direct DC power flow") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> mw(0, 50);
    for (const auto& name : test::fixture_cases()) {
      CAPTURE(name);
      const auto net = load_network(test::fixture(name));
      const auto f = compute_factors(net);
      for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd inj(static_cast<Eigen::Index>(net.bus_count()));
        for (auto& v : inj) v = mw(rng);
        inj(0) -= inj.sum();
        const Eigen::VectorXd a = f.ptdf * inj;
        const auto b = test::dc_flows(net, inj, f.slack_bus);
        CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, b.cwiseAbs().maxCoeff()));
      }
    }
  }

  TEST_CASE("fixtures: LODF matches remove-and-resolve; radial set matches bridges") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> mw(0, 50);
    for (const auto& name : test::fixture_cases()) {
      CAPTURE(name);
      const auto net = load_network(test::fixture(name));
      const auto f = compute_factors(net);
      CHECK(f.radial == test::bridges(net));
      Eigen::VectorXd inj(static_cast<Eigen::Index>(net.bus_count()));
      for (auto& v : inj) v = mw(rng);
      inj(0) -= inj.sum();
      const auto base = test::dc_flows(net, inj, f.slack_bus);
      for (std::size_t c = 0; c < net.branch_count(); ++c) {
        if (f.radial[c]) continue;
        std::vector<bool> removed(net.branch_count(), false);
        removed[c] = true;
        const auto after = test::dc_flows(net, inj, f.slack_bus, removed);
        for (std::size_t b = 0; b < net.branch_count(); ++b) {
          if (b == c) continue;
          const auto i = static_cast<Eigen::Index>(b);
          const double predicted = base(i) + f.lodf(i, static_cast<Eigen::Index>(c)) * base(static_cast<Eigen::Index>(c));
          CHECK(std::abs(predicted - after(i)) <= 1e-8 * std::max(1.0, std::abs(after(i))));
        }
      }
    }
  }

  TEST_CASE("thirty-bus radial branches") {
    const auto net = load_network(test::fixture("thirty_bus"));
    const auto f = compute_factors(net);
    const auto ids = f.radial_branch_ids(net);
    // 9-11, 12-13 and 25-26.
    CHECK(ids == std::vector<BranchId>{13, 16, 34});
  }

  TEST_CASE("slack choice") {
    const auto net = test::make_network(3, {{1, 2, 0.1}, {2, 3, 0.1}}, {{3, 50, 10}, {2, 50, 20}});
    CHECK(default_slack_bus(net) == 2);
    // Flows from a balanced injection do not depend on the slack.
    Eigen::VectorXd inj(3);
    inj << -10, 30, -20;
    const Eigen::VectorXd a = compute_ptdf(net, 1) * inj, b = compute_ptdf(net, 3) * inj;
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(compute_ptdf(net, 9), DomainError);
  }

  TEST_CASE("disconnected network is rejected") {
    const auto net = test::make_network(4, {{1, 2, 0.1}, {3, 4, 0.1}}, {{1, 50, 10}});
    CHECK_THROWS_AS(compute_factors(net), DomainError);
  }

  TEST_CASE("debug dumps") {
    const auto net = load_network(test::fixture("three_bus"));
    const auto f = compute_factors(net);
    std::ostringstream p, l;
    write_ptdf_csv(p, net, f);
    write_lodf_csv(l, net, f);
    const auto ptdf = p.str(), lodf = l.str();
    CHECK(ptdf.rfind("branch_id,bus_1,bus_2,bus_3\n", 0) == 0);
    CHECK(std::count(lodf.begin(), lodf.end(), '\n') == 4);
  }
}
