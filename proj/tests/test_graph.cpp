#include "pgo/graph.hpp"

#include <doctest.h>

#include <Eigen/QR>
#include <random>

#include "pgo/errors.hpp"
#include "test_util.hpp"

using namespace pgo;
using pgo::test::check_close;

namespace {

Eigen::Matrix3d random_spd3(std::mt19937_64& rng) {
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = pgo::test::uniform(rng, -1.0, 1.0);
  return m.transpose() * m + 3.0 * Eigen::Matrix3d::Identity();
}

Graph2 random_graph2(std::mt19937_64& rng) {
  Graph2 g;
  g.poses.push_back({});
  for (int i = 1; i < 10; ++i)
    g.poses.push_back(compose(g.poses.back(), pgo::test::random_pose2(rng)));
  for (int i = 0; i + 1 < 10; ++i) {
    Factor<Pose2> f;
    f.kind = FactorKind::kOdometry;
    f.i = i;
    f.j = i + 1;
    f.measurement = between(g.poses[i], g.poses[i + 1]);
    f.sqrt_information = sqrt_information_from(random_spd3(rng), 0);
    g.factors.push_back(f);
  }
  for (auto [i, j] : {std::pair{0, 5}, {2, 9}}) {
    Factor<Pose2> f;
    f.kind = FactorKind::kLoop;
    f.i = i;
    f.j = j;
    f.measurement = between(g.poses[i], g.poses[j]);
    f.sqrt_information = sqrt_information_from(random_spd3(rng), 0);
    f.truth_label = j == 5 ? TruthLabel::kTrueLoop : TruthLabel::kFalseLoop;
    g.factors.push_back(f);
  }
  return g;
}

}  // namespace

TEST_CASE("parse_g2o reads SE2 vertices and edges") {
  const auto any = parse_g2o(
      "# comment line\n"
      "VERTEX_SE2 0 1.0 2.0 0.5\n"
      "VERTEX_SE2 1 2.0 2.0 0.5\n"
      "EDGE_SE2 0 1 1 0 0 1 0 0 1 0 1\n");
  const auto& g = std::get<Graph2>(any);
  REQUIRE(g.num_poses() == 2);
  CHECK(g.poses[0].x == 1.0);
  CHECK(g.poses[0].y == 2.0);
  CHECK(g.poses[0].theta == 0.5);
  REQUIRE(g.factors.size() == 1);
  const auto& f = g.factors[0];
  CHECK(f.kind == FactorKind::kOdometry);
  CHECK(f.i == 0);
  CHECK(f.j == 1);
  CHECK(f.measurement.x == 1.0);
  CHECK(f.measurement.theta == 0.0);
  check_close(f.sqrt_information, Eigen::Matrix3d::Identity(), 1e-14);
}

TEST_CASE("parse_g2o discriminates loops by index gap and attaches labels") {
  const auto any = parse_g2o(
      "VERTEX_SE2 0 0 0 0\n"
      "VERTEX_SE2 1 1 0 0\n"
      "VERTEX_SE2 2 2 0 0\n"
      "EDGE_SE2 0 1 1 0 0 1 0 0 1 0 1\n"
      "EDGE_SE2 0 2 2 0 0 1 0 0 1 0 1\n"
      "LOOP_LABEL 0 2 false\n");
  const auto& g = std::get<Graph2>(any);
  REQUIRE(g.factors.size() == 2);
  CHECK(g.factors[0].kind == FactorKind::kOdometry);
  CHECK(!g.factors[0].truth_label);
  CHECK(g.factors[1].kind == FactorKind::kLoop);
  REQUIRE(g.factors[1].truth_label.has_value());
  CHECK(*g.factors[1].truth_label == TruthLabel::kFalseLoop);
}

TEST_CASE("parse_g2o error paths") {
  CHECK_THROWS_AS(parse_g2o("VERTEX_SE2 0 1.0 2.0\n"), MalformedLine);
  CHECK_THROWS_AS(parse_g2o("VERTEX_SE2 0 1 2 3 4\n"), MalformedLine);
  CHECK_THROWS_AS(parse_g2o("WHATEVER 1 2\n"), MalformedLine);
  CHECK_THROWS_AS(parse_g2o("VERTEX_SE2 0 0 0 0\nVERTEX_SE2 0 1 1 1\n"),
                  MalformedLine);
  CHECK_THROWS_AS(parse_g2o("EDGE_SE2 0 1 1 0 0 1 0 0 x 0 1\n"),
                  MalformedLine);
  // Indefinite information matrix.
  CHECK_THROWS_AS(
      parse_g2o("VERTEX_SE2 0 0 0 0\nVERTEX_SE2 1 1 0 0\n"
                "EDGE_SE2 0 1 1 0 0 -1 0 0 1 0 1\n"),
      NonPositiveDefiniteInformation);
  // PD but condition number 1e13.
  CHECK_THROWS_AS(
      parse_g2o("VERTEX_SE2 0 0 0 0\nVERTEX_SE2 1 1 0 0\n"
                "EDGE_SE2 0 1 1 0 0 1e13 0 0 1 0 1\n"),
      NonPositiveDefiniteInformation);
  CHECK_THROWS_AS(parse_g2o("VERTEX_SE2 0 0 0 0\nVERTEX_SE3:QUAT 1 0 0 0 0 0 0 1\n"),
                  MixedDimensions);
  // Gap in node ids.
  CHECK_THROWS_AS(parse_g2o("VERTEX_SE2 0 0 0 0\nVERTEX_SE2 2 1 0 0\n"),
                  IndexOutOfRange);
  // Edge to a node that does not exist.
  CHECK_THROWS_AS(parse_g2o("VERTEX_SE2 0 0 0 0\nVERTEX_SE2 1 1 0 0\n"
                            "EDGE_SE2 0 7 1 0 0 1 0 0 1 0 1\n"),
                  IndexOutOfRange);
  // Label with no matching loop edge.
  CHECK_THROWS_AS(parse_g2o("VERTEX_SE2 0 0 0 0\nLOOP_LABEL 0 5 true\n"),
                  MalformedLine);
  try {
    parse_g2o("VERTEX_SE2 0 0 0 0\nbroken\n");
    FAIL("expected throw");
  } catch (const MalformedLine& e) {
    CHECK(e.line_no == 2);
  }
}

TEST_CASE("g2o round trip preserves an SE2 graph") {
  std::mt19937_64 rng(71);
  const Graph2 g = random_graph2(rng);
  const auto back_any = parse_g2o(write_g2o(g));
  const auto& back = std::get<Graph2>(back_any);
  REQUIRE(back.num_poses() == g.num_poses());
  REQUIRE(back.factors.size() == g.factors.size());
  for (int i = 0; i < g.num_poses(); ++i)
    check_close(log_se2(between(back.poses[i], g.poses[i])),
                Eigen::Vector3d::Zero(), 1e-9);
  for (std::size_t k = 0; k < g.factors.size(); ++k) {
    const auto& a = g.factors[k];
    const auto& b = back.factors[k];
    CHECK(a.kind == b.kind);
    CHECK(a.i == b.i);
    CHECK(a.j == b.j);
    CHECK(a.truth_label == b.truth_label);
    check_close(log_se2(between(b.measurement, a.measurement)),
                Eigen::Vector3d::Zero(), 1e-9);
    check_close(a.information(), b.information(), 1e-9);
  }
  // Emission is stable: a second round trip reproduces the text exactly.
  const std::string text = write_g2o(back_any);
  CHECK(write_g2o(parse_g2o(text)) == text);
}

TEST_CASE("g2o round trip preserves an SE3 graph and canonicalizes") {
  std::mt19937_64 rng(73);
  Graph3 g;
  g.poses.push_back({});
  for (int i = 1; i < 6; ++i)
    g.poses.push_back(compose(g.poses.back(), pgo::test::random_pose3(rng)));
  for (int i = 0; i + 1 < 6; ++i) {
    Factor<Pose3> f;
    f.kind = FactorKind::kOdometry;
    f.i = i;
    f.j = i + 1;
    f.measurement = between(g.poses[i], g.poses[i + 1]);
    Matrix6d m = Matrix6d::Random();
    f.sqrt_information =
        sqrt_information_from(Matrix6d(m.transpose() * m + 6.0 * Matrix6d::Identity()), 0);
    g.factors.push_back(f);
  }
  const auto back = std::get<Graph3>(parse_g2o(write_g2o(g)));
  REQUIRE(back.num_poses() == 6);
  for (int i = 0; i < 6; ++i) {
    check_close(log_se3(between(back.poses[i], g.poses[i])),
                Vector6d(Vector6d::Zero()), 1e-9);
    CHECK(back.poses[i].q.w() >= 0.0);
  }
  for (std::size_t k = 0; k < g.factors.size(); ++k)
    check_close(g.factors[k].information(), back.factors[k].information(),
                1e-9);
  // A negated quaternion on input parses to the same canonical pose.
  const auto a = std::get<Graph3>(
      parse_g2o("VERTEX_SE3:QUAT 0 1 2 3 0.5 -0.5 0.5 -0.5\n"));
  const auto b = std::get<Graph3>(
      parse_g2o("VERTEX_SE3:QUAT 0 1 2 3 -0.5 0.5 -0.5 0.5\n"));
  check_close(a.poses[0].q.coeffs(), b.poses[0].q.coeffs(), 1e-15);
}

TEST_CASE("whitened_residual and mahalanobis") {
  Graph2 g;
  g.poses = {Pose2{0, 0, 0}, exp_se2({1.0, 2.0, 2.0})};
  Factor<Pose2> f;
  f.kind = FactorKind::kLoop;
  f.i = 0;
  f.j = 1;
  f.measurement = Pose2{};  // identity measurement: residual = log(X1)
  g.factors.push_back(f);

  check_close(whitened_residual(f, g), Eigen::Vector3d(1.0, 2.0, 2.0), 1e-12);
  CHECK(mahalanobis(f, g) == doctest::Approx(9.0).epsilon(1e-12));

  // Satisfied factor.
  Factor<Pose2> sat = f;
  sat.measurement = between(g.poses[0], g.poses[1]);
  CHECK(mahalanobis(sat, g) < 1e-20);

  // Scaling linearity.
  Factor<Pose2> scaled = f;
  scaled.sqrt_information = 2.0 * Eigen::Matrix3d::Identity();
  check_close(whitened_residual(scaled, g), Eigen::Vector3d(2.0, 4.0, 4.0),
              1e-12);
  CHECK(mahalanobis(scaled, g) == doctest::Approx(36.0).epsilon(1e-12));

  // Prior factor residual.
  Factor<Pose2> prior;
  prior.kind = FactorKind::kPrior;
  prior.i = 1;
  prior.measurement = g.poses[1];
  CHECK(mahalanobis(prior, g) < 1e-20);
  prior.measurement = Pose2{};
  check_close(whitened_residual(prior, g), Eigen::Vector3d(1.0, 2.0, 2.0),
              1e-12);
}

TEST_CASE("mahalanobis is invariant under orthogonal re-whitening") {
  std::mt19937_64 rng(79);
  Graph2 g;
  g.poses = {Pose2{0, 0, 0}, pgo::test::random_pose2(rng)};
  Factor<Pose2> f;
  f.kind = FactorKind::kLoop;
  f.i = 0;
  f.j = 1;
  f.measurement = pgo::test::random_pose2(rng);
  f.sqrt_information = sqrt_information_from(random_spd3(rng), 0);
  g.factors.push_back(f);
  const double m0 = mahalanobis(f, g);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::Matrix3d a;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) a(r, c) = pgo::test::uniform(rng, -1.0, 1.0);
    const Eigen::Matrix3d q =
        Eigen::HouseholderQR<Eigen::Matrix3d>(a).householderQ();
    Factor<Pose2> fq = f;
    fq.sqrt_information = q * f.sqrt_information;
    CHECK(mahalanobis(fq, g) == doctest::Approx(m0).epsilon(1e-10));
  }
}

TEST_CASE("write_g2o trivial outputs") {
  CHECK(write_g2o(Graph2{}) == "");
  Graph2 g;
  g.poses.push_back({1.5, -2.0, 0.25});
  const std::string text = write_g2o(g);
  CHECK(text == "VERTEX_SE2 0 1.5 -2 0.25\n");
}
