#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "condot/lp.hpp"

using namespace condot;

TEST_CASE("two-variable textbook program") {
  // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6 -> optimum (4, 0), value 12
  Eigen::VectorXd c(2);
  c << 3, 2;
  Eigen::MatrixXd A(2, 2);
  A << 1, 1, 1, 3;
  Eigen::VectorXd b(2);
  b << 4, 6;
  const auto res = lp::maximize(c, A, b);
  CHECK(res.value == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(res.x[0] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(res.x[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("negative right-hand side forces phase 1") {
  // max -x s.t. -x <= -2  (i.e. x >= 2) -> x = 2, value -2
  Eigen::VectorXd c(1);
  c << -1;
  Eigen::MatrixXd A(1, 1);
  A << -1;
  Eigen::VectorXd b(1);
  b << -2;
  const auto res = lp::maximize(c, A, b);
  CHECK(res.value == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("infeasible program throws") {
  // x <= 1 and x >= 2
  Eigen::VectorXd c(1);
  c << 1;
  Eigen::MatrixXd A(2, 1);
  A << 1, -1;
  Eigen::VectorXd b(2);
  b << 1, -2;
  CHECK_THROWS_AS(lp::maximize(c, A, b), NumericError);
}

TEST_CASE("unbounded program throws") {
  Eigen::VectorXd c(1);
  c << 1;
  Eigen::MatrixXd A(1, 1);
  A << -1;
  Eigen::VectorXd b(1);
  b << 0;
  CHECK_THROWS_AS(lp::maximize(c, A, b), NumericError);
}

TEST_CASE("degenerate constraints terminate (Bland)") {
  // the third row is redundant and active at the optimum
  Eigen::VectorXd c(2);
  c << 1, 1;
  Eigen::MatrixXd A(3, 2);
  A << 1, 0, 0, 1, 1, 1;
  Eigen::VectorXd b(3);
  b << 1, 1, 2;
  const auto res = lp::maximize(c, A, b);
  CHECK(res.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("equality pairs with zero right-hand side") {
  // max x - y with x = y (two inequalities), x <= 3 -> value 0 at x = y
  Eigen::VectorXd c(2);
  c << 1, -1;
  Eigen::MatrixXd A(3, 2);
  A << 1, -1, -1, 1, 1, 0;
  Eigen::VectorXd b(3);
  b << 0, 0, 3;
  const auto res = lp::maximize(c, A, b);
  CHECK(res.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("variable cap is enforced") {
  Eigen::VectorXd c = Eigen::VectorXd::Ones(65);
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(65, 65);
  Eigen::VectorXd b = Eigen::VectorXd::Ones(65);
  CHECK_THROWS_AS(lp::maximize(c, A, b), ValidationError);
}
