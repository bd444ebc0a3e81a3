#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "condot/measures.hpp"
#include "support/oracles.hpp"

using namespace condot;

TEST_CASE("validate enforces weight and shape invariants") {
  auto mu = oracles::measure_1d({0.0, 1.0}, {0.0, 5.0}, {0.5, 0.5});
  CHECK_NOTHROW(mu.validate());

  auto bad = mu;
  bad.weights[0] = 0.4;
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = mu;
  bad.weights[0] = -0.5;
  bad.weights[1] = 1.5;
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  DiscreteJointMeasure empty;
  CHECK_THROWS_AS(empty.validate(), ValidationError);
}

TEST_CASE("group_by_condition splits the crossing instance into two groups") {
  // P_{Y,X} = 1/2 delta_(0,0) + 1/2 delta_(1,n)
  auto mu = oracles::measure_1d({0.0, 1.0}, {0.0, 5.0}, {0.5, 0.5});
  const auto groups = group_by_condition(mu, 1e-9);
  REQUIRE(groups.size() == 2);
  for (const auto& g : groups) {
    CHECK(g.weight == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(g.atoms.size() == 1);
    CHECK(g.cond_weights[0] == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("group_by_condition on a singleton") {
  auto mu = oracles::measure_1d({3.0}, {-1.0}, {1.0});
  const auto groups = group_by_condition(mu, 0.5);
  REQUIRE(groups.size() == 1);
  CHECK(groups[0].weight == doctest::Approx(1.0));
}

TEST_CASE("group_by_condition: 6 atoms at 3 conditions") {
  auto mu = oracles::measure_1d({0, 0, 2, 2, 4, 4}, {1, 2, 3, 4, 5, 6},
                                {1. / 6, 1. / 6, 1. / 6, 1. / 6, 1. / 6, 1. / 6});
  const auto groups = group_by_condition(mu, 1e-9);
  REQUIRE(groups.size() == 3);
  for (const auto& g : groups) {
    CHECK(g.weight == doctest::Approx(1.0 / 3).epsilon(1e-12));
    REQUIRE(g.atoms.size() == 2);
    CHECK(g.cond_weights[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(g.cond_weights[1] == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("ambiguous grouping is rejected") {
  auto mu = oracles::measure_1d({0.0, 1.5e-9}, {0.0, 1.0}, {0.5, 0.5});
  CHECK_THROWS_AS(group_by_condition(mu, 1e-9), ValidationError);
}

TEST_CASE("regrouping reproduces the measure exactly") {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    auto [mu, nu] = random_joint_instance(seed, 2, 3, 3, 4);
    const auto groups = group_by_condition(mu);
    Eigen::VectorXd rebuilt = Eigen::VectorXd::Zero(mu.num_atoms());
    for (const auto& g : groups)
      for (size_t k = 0; k < g.atoms.size(); ++k) {
        rebuilt[g.atoms[k]] += g.weight * g.cond_weights[static_cast<int>(k)];
        CHECK((mu.ys.row(g.atoms[k]).transpose() - g.y).norm() <= 1e-9);
      }
    CHECK((rebuilt - mu.weights).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("same_condition_marginal") {
  auto mu = oracles::measure_1d({0.0, 1.0}, {0.0, 5.0}, {0.5, 0.5});
  auto nu = oracles::measure_1d({1.0, 0.0}, {0.0, 5.0}, {0.5, 0.5});
  CHECK(same_condition_marginal(mu, nu, 1e-9));
  CHECK(same_condition_marginal(mu, mu, 1e-9));

  auto rho = oracles::measure_1d({0.0}, {0.0}, {1.0});
  auto tau = oracles::measure_1d({1.0}, {0.0}, {1.0});
  CHECK_FALSE(same_condition_marginal(rho, tau, 1e-9));

  // same conditions, different masses
  auto heavier = oracles::measure_1d({0.0, 1.0}, {0.0, 5.0}, {0.75, 0.25});
  CHECK_FALSE(same_condition_marginal(mu, heavier, 1e-9));
}

TEST_CASE("random_joint_instance: construction, determinism, marginals") {
  auto [mu, nu] = random_joint_instance(0, 1, 1, 2, 2);
  CHECK(mu.num_atoms() == 4);
  CHECK(nu.num_atoms() == 4);
  CHECK(same_condition_marginal(mu, nu));

  auto [mu2, nu2] = random_joint_instance(0, 1, 1, 2, 2);
  CHECK(mu.xs == mu2.xs);
  CHECK(nu.xs == nu2.xs);
  CHECK(mu.ys == mu2.ys);

  auto [mu3, nu3] = random_joint_instance(1, 1, 1, 2, 2);
  CHECK(mu.xs != mu3.xs);

  for (uint64_t seed = 0; seed < 10; ++seed) {
    auto [a, b] = random_joint_instance(seed, 2, 2, 4, 3);
    a.validate();
    b.validate();
    CHECK(same_condition_marginal(a, b));
  }
}

TEST_CASE("counts must be positive") {
  CHECK_THROWS_AS(random_joint_instance(0, 0, 1, 1, 1), ValidationError);
  CHECK_THROWS_AS(random_joint_instance(0, 1, 1, 0, 1), ValidationError);
}
