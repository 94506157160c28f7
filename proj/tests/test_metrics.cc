#include "doctest.h"
#include "oracles.h"

#include "skelfit/error.h"
#include "skelfit/metrics.h"
#include "skelfit/toy_model.h"

#include <numbers>
#include <random>

using namespace skelfit;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Eigen::MatrixX3d random_points(std::mt19937_64 &rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixX3d P(n, 3);
    for (Eigen::Index i = 0; i < P.size(); ++i)
        P.data()[i] = g(rng);
    return P;
}

Mat3 random_rotation(std::mt19937_64 &rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> a(-std::numbers::pi, std::numbers::pi);
    return oracle::rodrigues(Vec3(g(rng), g(rng), g(rng)).normalized(), a(rng));
}

PoseSample knee_sample(const BodyModel &model, int knee, double angle) {
    PoseSample s(model.num_joints(), Mat3::Identity());
    s[knee] = oracle::rx(angle);
    return s;
}

} // namespace

TEST_SUITE("metrics") {

TEST_CASE("pck") {
    Points2D gt = Points2D::Zero(4, 2);
    CHECK(pck(gt, gt, 0.05, 1.0) == 1.0);
    Points2D pred = gt;
    pred.row(0) << 0.01, 0;
    pred.row(1) << 0, -0.02;
    pred.row(2) << 0.5, 0;
    pred.row(3) << 0, 0.3;
    CHECK(pck(pred, gt, 0.05, 1.0) == 0.5);
    CHECK(pck(pred, gt, 0.05, 2.0) == 0.5);
    CHECK(pck(pred, gt, 0.2, 2.0) == 0.75);

    Points2D one(1, 2), zero = Points2D::Zero(1, 2);
    one << 0.1, 0.0;
    CHECK(pck(one, zero, 0.05, 2.0) == 0.0);  // exactly on the boundary
    CHECK(pck(one, zero, 0.0500001, 2.0) == 1.0);

    const std::vector<double> vis{1, 1, 0, 0};
    CHECK(pck(pred, gt, 0.05, 1.0, vis) == 1.0);
    CHECK(pck(pred, gt, 0.05, 1.0, std::vector<double>{0, 0, 0, 0}) == 0.0);
    CHECK_THROWS_AS(pck(pred, gt, 0.05, 0.0), InputError);
    CHECK_THROWS_AS(pck(pred, gt.topRows(3), 0.05, 1.0), InputError);

    std::mt19937_64 rng(1);
    const Points2D a = random_points(rng, 30).leftCols<2>(), b = random_points(rng, 30).leftCols<2>();
    double prev = 0.0;
    for (double t = 0.0; t < 3.0; t += 0.01) {
        const double v = pck(a, b, t, 1.0);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("mpjpe") {
    Eigen::MatrixX3d gt(3, 3);
    gt << 0, 0, 0, 100, 50, 0, -20, 300, 10;
    Eigen::MatrixX3d pred = gt;
    CHECK(mpjpe(pred, gt) == 0.0);
    pred.rowwise() += Eigen::RowVector3d(3, 4, 0);
    CHECK(mpjpe(pred, gt, std::nullopt) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(mpjpe(pred, gt) == doctest::Approx(0.0).scale(1e-12));

    std::mt19937_64 rng(2);
    const Eigen::MatrixX3d a = random_points(rng, 12), b = random_points(rng, 12);
    double direct = 0.0;
    for (int j = 0; j < 12; ++j)
        direct += ((a.row(j) - a.row(0)) - (b.row(j) - b.row(0))).norm();
    CHECK(mpjpe(a, b) == doctest::Approx(direct / 12).epsilon(1e-14));
    CHECK_THROWS_AS(mpjpe(a, b.topRows(5)), InputError);
    CHECK_THROWS_AS(mpjpe(a, b, 12), InputError);

    // Consistent permutation of both inputs leaves the unaligned and PA errors unchanged.
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(12);
    perm.setIdentity();
    std::shuffle(perm.indices().data(), perm.indices().data() + 12, rng);
    CHECK(mpjpe(perm * a, perm * b, std::nullopt) == doctest::Approx(mpjpe(a, b, std::nullopt)).epsilon(1e-14));
    CHECK(pa_mpjpe(perm * a, perm * b) == doctest::Approx(pa_mpjpe(a, b)).epsilon(1e-10));
}

TEST_CASE("procrustes recovers planted transforms") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.2, 5.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::MatrixX3d src = random_points(rng, 8);
        SimilarityTransform planted;
        planted.scale = u(rng);
        planted.rotation = random_rotation(rng);
        planted.translation = random_points(rng, 1).row(0).transpose();
        const Eigen::MatrixX3d tgt = planted.apply(src);
        const SimilarityTransform t = procrustes_align(src, tgt);
        CHECK(alignment_residual(t, src, tgt) < 1e-9);
        CHECK(t.scale == doctest::Approx(planted.scale).epsilon(1e-9));
        CHECK((t.rotation - planted.rotation).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((t.translation - planted.translation).norm() < 1e-9);
        CHECK(pa_mpjpe(src, tgt) < 1e-9);
        CHECK(pa_mpvpe(src, tgt) < 1e-9);
    }
}

TEST_CASE("procrustes excludes reflections") {
    std::mt19937_64 rng(4);
    const Eigen::MatrixX3d src = random_points(rng, 10);
    Eigen::MatrixX3d mirrored = src;
    mirrored.col(0) *= -1.0;
    const SimilarityTransform t = procrustes_align(src, mirrored);
    CHECK(t.rotation.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((t.rotation * t.rotation.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(t.scale > 0.0);
    CHECK(alignment_residual(t, src, mirrored) > 1e-3);
}

TEST_CASE("procrustes beats random similarity transforms") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ls(-1.0, 1.0);
    for (int inst = 0; inst < 5; ++inst) {
        const Eigen::MatrixX3d src = random_points(rng, 5), tgt = random_points(rng, 5);
        const double best = alignment_residual(procrustes_align(src, tgt), src, tgt);
        CHECK(best <= alignment_residual(SimilarityTransform{}, src, tgt));
        for (int k = 0; k < 2000; ++k) {
            SimilarityTransform r{std::exp(ls(rng)), random_rotation(rng), random_points(rng, 1).row(0).transpose()};
            CHECK(best <= alignment_residual(r, src, tgt));
        }
        CHECK(pa_mpjpe(src, tgt) <= mpjpe(src, tgt, std::nullopt));
        CHECK(pa_mpjpe(src, tgt) <= mpjpe(src, tgt));
    }
}

TEST_CASE("procrustes degenerate input") {
    Eigen::MatrixX3d line(4, 3);
    line << 0, 0, 0, 1, 1, 1, 2, 2, 2, 3, 3, 3;
    std::mt19937_64 rng(6);
    const Eigen::MatrixX3d ok = random_points(rng, 4);
    CHECK_THROWS_AS(procrustes_align(line, ok), NumericalError);
    CHECK_THROWS_AS(procrustes_align(ok, line), NumericalError);
    CHECK_THROWS_AS(procrustes_align(Eigen::MatrixX3d::Ones(4, 3), ok), NumericalError);
    CHECK_THROWS_AS(procrustes_align(ok.topRows(2), ok.topRows(2)), NumericalError);
}

TEST_CASE("mpvpe") {
    Eigen::MatrixX3d a = Eigen::MatrixX3d::Zero(4, 3);
    CHECK(mpvpe(a, a) == 0.0);
    Eigen::MatrixX3d b = a;
    b(0, 0) = 1.0;
    b(1, 1) = 2.0;
    b(2, 2) = 3.0;
    CHECK(mpvpe(a, b) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("limit decomposition") {
    const BodyModel model = make_toy_model();
    const int knee = *model.find_joint("l_knee");
    const JointDofSpec spec = joint_dof_spec(model, knee);
    REQUIRE(spec.axes.size() == 1);

    LimitDecomposition d = decompose_against_limits(oracle::rx(60 * kDeg), spec);
    CHECK(d.angles[0] == doctest::Approx(60 * kDeg).epsilon(1e-12));
    CHECK(d.max_violation() < 1e-12);

    d = decompose_against_limits(oracle::rx(-15 * kDeg), spec);
    CHECK(d.violations[0] == doctest::Approx(15 * kDeg).epsilon(1e-12));
    CHECK(d.off_axis < 1e-12);

    // Off-hinge twist on a hinge: the whole rotation is residual.
    d = decompose_against_limits(oracle::ry(25 * kDeg), spec);
    CHECK(d.angles[0] == doctest::Approx(0.0).scale(1e-12));
    CHECK(d.off_axis == doctest::Approx(25 * kDeg).epsilon(1e-12));
    CHECK(d.max_violation() == doctest::Approx(25 * kDeg).epsilon(1e-12));

    // Three-DoF joints express every rotation.
    const JointDofSpec shoulder = joint_dof_spec(model, *model.find_joint("r_shoulder"));
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const LimitDecomposition s = decompose_against_limits(random_rotation(rng), shoulder);
        CHECK(s.off_axis == 0.0);
        CHECK(s.angles.size() == 3);
    }
}

TEST_CASE("violation audit") {
    const BodyModel model = make_toy_model();
    const int knee = *model.find_joint("l_knee");
    const std::vector<PoseSample> poses{knee_sample(model, knee, -15 * kDeg), knee_sample(model, knee, 10 * kDeg),
                                        knee_sample(model, knee, 140 * kDeg)};
    const std::vector<double> thresholds{0.0, 4.0, 10.0, 20.0};
    const std::vector<std::string> joints{"l_knee", "r_knee"};
    const ViolationTable t = violation_audit(poses, model, thresholds, joints);
    CHECK(t.samples == 3);
    CHECK(t.frequencies[0] == std::vector<double>{2.0 / 3, 2.0 / 3, 1.0 / 3, 0.0});
    CHECK(t.frequencies[1] == std::vector<double>{0, 0, 0, 0});
    CHECK(t.render().find("l_knee") != std::string::npos);

    // Random SMPL-like ball rotations everywhere: frequencies stay monotone.
    std::mt19937_64 rng(8);
    std::vector<PoseSample> wild;
    for (int i = 0; i < 200; ++i) {
        PoseSample s;
        for (int j = 0; j < model.num_joints(); ++j)
            s.push_back(random_rotation(rng));
        wild.push_back(s);
    }
    std::vector<std::string> names;
    for (const Joint &j : model.definition().joints)
        names.push_back(j.name);
    const std::vector<double> grid{0, 5, 10, 20, 30, 45, 90};
    const ViolationTable w = violation_audit(wild, model, grid, names);
    for (const auto &row : w.frequencies) {
        for (size_t k = 0; k < row.size(); ++k) {
            CHECK(row[k] >= 0.0);
            CHECK(row[k] <= 1.0);
            if (k > 0)
                CHECK(row[k] <= row[k - 1]);
        }
    }

    CHECK(violation_audit({}, model, thresholds, joints).frequencies[0] == std::vector<double>(4, 0.0));
    CHECK_THROWS_AS(violation_audit(poses, model, std::vector<double>{10, 5}, joints), InputError);
    CHECK_THROWS_AS(violation_audit(poses, model, thresholds, std::vector<std::string>{"tail"}), InputError);
}

}
