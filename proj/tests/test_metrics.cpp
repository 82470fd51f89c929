#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <random>
#include <vector>

#include "pgo/errors.hpp"
#include "pgo/metrics.hpp"
#include "test_util.hpp"

using namespace pgo;

namespace {

std::vector<Pose2> loop_2d(int n) {
  std::vector<Pose2> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double phi = 2.0 * M_PI * k / n;
    out.emplace_back(4.0 * std::cos(phi), 3.0 * std::sin(phi), 0.3 * phi);
  }
  return out;
}

std::vector<Pose3> helix_3d(int n) {
  std::vector<Pose3> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double phi = 0.4 * k;
    Eigen::Quaterniond q(Eigen::AngleAxisd(0.2 * k, Eigen::Vector3d::UnitZ()));
    out.emplace_back(Eigen::Vector3d(2.0 * std::cos(phi), 2.0 * std::sin(phi),
                                     0.25 * k),
                     q);
  }
  return out;
}

template <class PoseT>
std::vector<PoseT> left_compose(const PoseT& t, const std::vector<PoseT>& ps) {
  std::vector<PoseT> out;
  out.reserve(ps.size());
  for (const auto& p : ps) out.push_back(GroupTraits<PoseT>::compose(t, p));
  return out;
}

Pose2 random_pose2(std::mt19937_64& gen) {
  return {test::uniform(gen, -5.0, 5.0), test::uniform(gen, -5.0, 5.0),
          test::uniform(gen, -3.0, 3.0)};
}

Pose3 random_pose3(std::mt19937_64& gen) {
  Eigen::Vector3d axis(test::uniform(gen, -1.0, 1.0),
                       test::uniform(gen, -1.0, 1.0),
                       test::uniform(gen, -1.0, 1.0));
  axis.normalize();
  Eigen::Quaterniond q(
      Eigen::AngleAxisd(test::uniform(gen, -2.5, 2.5), axis));
  return {Eigen::Vector3d(test::uniform(gen, -5.0, 5.0),
                          test::uniform(gen, -5.0, 5.0),
                          test::uniform(gen, -5.0, 5.0)),
          q};
}

}  // namespace

TEST_CASE("rmse arithmetic") {
  CHECK(rmse({}) == 0.0);
  CHECK(rmse({2.0}) == doctest::Approx(2.0).epsilon(1e-15));
  // Two residuals of 3 m and 4 m average to sqrt(25/2).
  CHECK(rmse({3.0, 4.0}) ==
        doctest::Approx(std::sqrt(25.0 / 2.0)).epsilon(1e-15));
  CHECK(rmse({3.0, 4.0}) == doctest::Approx(3.5355339).epsilon(1e-7));
}

TEST_CASE("align is identity on matching trajectories") {
  const auto gt = loop_2d(12);
  const auto t = align(gt, gt);
  CHECK((t.rotation - Eigen::Matrix2d::Identity()).norm() < 1e-12);
  CHECK(t.translation.norm() < 1e-12);

  const auto gt3 = helix_3d(15);
  const auto t3 = align(gt3, gt3);
  CHECK((t3.rotation - Eigen::Matrix3d::Identity()).norm() < 1e-12);
  CHECK(t3.translation.norm() < 1e-12);
}

TEST_CASE("align recovers a planted rigid transform") {
  std::mt19937_64 gen(71);
  for (int trial = 0; trial < 20; ++trial) {
    const auto gt = loop_2d(10);
    const Pose2 t = random_pose2(gen);
    const auto est = left_compose(t, gt);
    const auto rec = align(est, gt);
    for (std::size_t k = 0; k < gt.size(); ++k) {
      CHECK((rec.apply(est[k].translation()) - gt[k].translation()).norm() <
            1e-9);
    }
    CHECK((rec.rotation * t.rotation() - Eigen::Matrix2d::Identity()).norm() <
          1e-9);
  }
  for (int trial = 0; trial < 20; ++trial) {
    const auto gt = helix_3d(12);
    const Pose3 t = random_pose3(gen);
    const auto est = left_compose(t, gt);
    const auto rec = align(est, gt);
    for (std::size_t k = 0; k < gt.size(); ++k) {
      CHECK((rec.apply(est[k].t) - gt[k].t).norm() < 1e-9);
    }
    CHECK((rec.rotation * t.rotation() - Eigen::Matrix3d::Identity()).norm() <
          1e-9);
  }
}

TEST_CASE("aligned rmse never exceeds unaligned rmse") {
  std::mt19937_64 gen(72);
  for (int trial = 0; trial < 10; ++trial) {
    auto gt = loop_2d(25);
    auto est = gt;
    for (auto& p : est) {
      p.x += test::uniform(gen, -0.4, 0.4);
      p.y += test::uniform(gen, -0.4, 0.4);
    }
    est = left_compose(random_pose2(gen), est);

    std::vector<double> raw(gt.size());
    for (std::size_t k = 0; k < gt.size(); ++k)
      raw[k] = (est[k].translation() - gt[k].translation()).norm();
    CHECK(ate(est, gt) <= rmse(raw) + 1e-12);
  }
}

TEST_CASE("ate basics") {
  const auto gt = loop_2d(20);
  CHECK(ate(gt, gt) == doctest::Approx(0.0).epsilon(1e-12));

  // A constant rigid offset is absorbed entirely by alignment.
  std::mt19937_64 gen(73);
  const auto est = left_compose(random_pose2(gen), gt);
  CHECK(ate(est, gt) < 1e-9);

  CHECK(ate(std::vector<Pose2>{}, std::vector<Pose2>{}) == 0.0);
}

TEST_CASE("ate is invariant to a rigid transform of the estimate") {
  std::mt19937_64 gen(74);
  auto gt = loop_2d(30);
  auto est = gt;
  for (auto& p : est) {
    p.x += test::uniform(gen, -0.3, 0.3);
    p.y += test::uniform(gen, -0.3, 0.3);
    p.theta += test::uniform(gen, -0.1, 0.1);
  }
  const double base = ate(est, gt);
  CHECK(base > 0.01);
  for (int trial = 0; trial < 10; ++trial) {
    const auto moved = left_compose(random_pose2(gen), est);
    CHECK(std::abs(ate(moved, gt) - base) < 1e-9);
  }

  auto gt3 = helix_3d(25);
  auto est3 = gt3;
  for (auto& p : est3) {
    p.t += Eigen::Vector3d(test::uniform(gen, -0.3, 0.3),
                           test::uniform(gen, -0.3, 0.3),
                           test::uniform(gen, -0.3, 0.3));
  }
  const double base3 = ate(est3, gt3);
  CHECK(base3 > 0.01);
  for (int trial = 0; trial < 10; ++trial) {
    const auto moved = left_compose(random_pose3(gen), est3);
    CHECK(std::abs(ate(moved, gt3) - base3) < 1e-9);
  }
}

TEST_CASE("two-pose ate compares positions raw") {
  // Below three poses there is no rigid fit; residuals of 3 m and 4 m give
  // sqrt(25/2).
  const std::vector<Pose2> gt{{0.0, 0.0, 0.0}, {10.0, 0.0, 0.0}};
  const std::vector<Pose2> est{{0.0, 3.0, 0.0}, {10.0, -4.0, 0.0}};
  CHECK(ate(est, gt) ==
        doctest::Approx(std::sqrt(25.0 / 2.0)).epsilon(1e-12));
}

TEST_CASE("collinear 3d positions fall back to translation-only") {
  std::vector<Pose3> gt;
  for (int k = 0; k < 8; ++k) {
    Eigen::Quaterniond q(
        Eigen::AngleAxisd(0.3 * k, Eigen::Vector3d::UnitX()));
    gt.emplace_back(Eigen::Vector3d(1.5 * k, 0.0, 0.0), q);
  }
  CHECK_THROWS_AS((void)align(gt, gt), DegenerateGeometry);

  // Pure translation offset is still removed by the centroid fallback.
  auto est = gt;
  for (auto& p : est) p.t += Eigen::Vector3d(0.7, -0.2, 1.1);
  CHECK(ate(est, gt) < 1e-12);

  // Collinear 2d positions keep the rotation observable through the line
  // direction.
  std::vector<Pose2> line;
  for (int k = 0; k < 6; ++k) line.emplace_back(2.0 * k, 0.0, 0.0);
  const Pose2 t{1.0, -2.0, 0.6};
  const auto rec = align(left_compose(t, line), line);
  CHECK((rec.rotation * t.rotation() - Eigen::Matrix2d::Identity()).norm() <
        1e-9);
}

TEST_CASE("rpe basics") {
  const auto gt = helix_3d(20);
  const auto zero = rpe(gt, gt);
  CHECK(zero.trans_rmse == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(zero.rot_rmse == doctest::Approx(0.0).epsilon(1e-12));

  // Relative steps are untouched by a global rigid transform of either side.
  std::mt19937_64 gen(75);
  auto est = gt;
  for (auto& p : est) {
    p.t += Eigen::Vector3d(test::uniform(gen, -0.2, 0.2),
                           test::uniform(gen, -0.2, 0.2),
                           test::uniform(gen, -0.2, 0.2));
  }
  const auto base = rpe(est, gt);
  CHECK(base.trans_rmse > 0.01);
  for (int trial = 0; trial < 5; ++trial) {
    const Pose3 t = random_pose3(gen);
    const auto a = rpe(left_compose(t, est), gt);
    CHECK(a.trans_rmse == doctest::Approx(base.trans_rmse).epsilon(1e-9));
    CHECK(a.rot_rmse == doctest::Approx(base.rot_rmse).epsilon(1e-9));
    const auto b = rpe(est, left_compose(t, gt));
    CHECK(b.trans_rmse == doctest::Approx(base.trans_rmse).epsilon(1e-9));
    CHECK(b.rot_rmse == doctest::Approx(base.rot_rmse).epsilon(1e-9));
  }
}

TEST_CASE("rpe charges a single corrupted step once") {
  // Ten unit steps along x; shifting the tail by 1 m corrupts exactly one
  // relative step, so the RMSE over 10 steps is sqrt(1/10).
  std::vector<Pose2> gt;
  for (int k = 0; k <= 10; ++k) gt.emplace_back(1.0 * k, 0.0, 0.0);
  auto est = gt;
  for (std::size_t k = 6; k < est.size(); ++k) est[k].y += 1.0;

  const auto r = rpe(est, gt);
  CHECK(r.trans_rmse ==
        doctest::Approx(std::sqrt(1.0 / 10.0)).epsilon(1e-12));
  CHECK(r.rot_rmse == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("rpe respects delta") {
  std::vector<Pose2> gt;
  for (int k = 0; k <= 8; ++k) gt.emplace_back(1.0 * k, 0.0, 0.3 * k);
  auto est = gt;
  est[4].x += 0.5;

  // With delta = 2 the perturbed pose appears in two step pairs.
  const auto r1 = rpe(est, gt, 1);
  const auto r2 = rpe(est, gt, 2);
  CHECK(r1.trans_rmse > 0.0);
  CHECK(r2.trans_rmse > 0.0);
  CHECK(rpe(gt, gt, 3).trans_rmse == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("trajectory_metrics bundles ate and rpe") {
  std::mt19937_64 gen(76);
  auto gt = loop_2d(15);
  auto est = gt;
  for (auto& p : est) p.x += test::uniform(gen, -0.2, 0.2);
  const auto m = trajectory_metrics(est, gt);
  CHECK(m.ate_rmse == doctest::Approx(ate(est, gt)).epsilon(1e-15));
  CHECK(m.rpe_trans_rmse ==
        doctest::Approx(rpe(est, gt).trans_rmse).epsilon(1e-15));
  CHECK(m.rpe_rot_rmse ==
        doctest::Approx(rpe(est, gt).rot_rmse).epsilon(1e-15));
}

TEST_CASE("precision and recall") {
  using C = Classification;
  using L = TruthLabel;

  SUBCASE("perfect separation") {
    const auto m = precision_recall(
        {L::kTrueLoop, L::kTrueLoop, L::kFalseLoop},
        {C::kInlier, C::kInlier, C::kOutlier});
    CHECK(m.tp == 2);
    CHECK(m.fp == 0);
    CHECK(m.tn == 1);
    CHECK(m.fn == 0);
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 1.0);
  }

  SUBCASE("one missed true loop") {
    const auto m = precision_recall(
        {L::kTrueLoop, L::kTrueLoop, L::kTrueLoop, L::kTrueLoop},
        {C::kInlier, C::kInlier, C::kInlier, C::kOutlier});
    CHECK(m.tp == 3);
    CHECK(m.fn == 1);
    CHECK(m.fp == 0);
    CHECK(m.precision == 1.0);
    CHECK(m.recall == doctest::Approx(0.75).epsilon(1e-15));
  }

  SUBCASE("ambiguous counts as accepted") {
    const auto m = precision_recall({L::kTrueLoop, L::kFalseLoop},
                                    {C::kAmbiguous, C::kAmbiguous});
    CHECK(m.tp == 1);
    CHECK(m.fp == 1);
    CHECK(m.precision == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m.recall == 1.0);
  }

  SUBCASE("empty denominators default to one") {
    const auto none = precision_recall({}, {});
    CHECK(none.precision == 1.0);
    CHECK(none.recall == 1.0);

    const auto rejected_false = precision_recall(
        {L::kFalseLoop, L::kFalseLoop}, {C::kOutlier, C::kOutlier});
    CHECK(rejected_false.tp == 0);
    CHECK(rejected_false.precision == 1.0);
    CHECK(rejected_false.recall == 1.0);
  }

  SUBCASE("tp + fn equals the true-loop count") {
    std::mt19937_64 gen(77);
    std::vector<L> labels;
    std::vector<C> cls;
    int true_count = 0;
    for (int k = 0; k < 200; ++k) {
      const bool pos = test::uniform(gen, 0.0, 1.0) < 0.6;
      labels.push_back(pos ? L::kTrueLoop : L::kFalseLoop);
      true_count += pos ? 1 : 0;
      const double u = test::uniform(gen, 0.0, 1.0);
      cls.push_back(u < 0.4 ? C::kInlier
                            : (u < 0.7 ? C::kAmbiguous : C::kOutlier));
    }
    const auto m = precision_recall(labels, cls);
    CHECK(m.tp + m.fn == true_count);
    CHECK(m.tp + m.fp + m.tn + m.fn == 200);
    CHECK(m.precision >= 0.0);
    CHECK(m.precision <= 1.0);
    CHECK(m.recall >= 0.0);
    CHECK(m.recall <= 1.0);
  }
}

TEST_CASE("metrics input validation") {
  const auto gt = loop_2d(6);
  auto shorter = gt;
  shorter.pop_back();

  CHECK_THROWS_AS((void)align(shorter, gt), LengthMismatch);
  CHECK_THROWS_AS((void)ate(shorter, gt), LengthMismatch);
  CHECK_THROWS_AS((void)rpe(shorter, gt), LengthMismatch);
  CHECK_THROWS_AS(
      (void)precision_recall({TruthLabel::kTrueLoop}, {}), LengthMismatch);

  const std::vector<Pose2> two{{0, 0, 0}, {1, 0, 0}};
  CHECK_THROWS_AS((void)align(two, two), std::invalid_argument);

  CHECK_THROWS_AS((void)rpe(gt, gt, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)rpe(gt, gt, -1), std::invalid_argument);
  CHECK_THROWS_AS((void)rpe(gt, gt, 6), std::invalid_argument);
}
