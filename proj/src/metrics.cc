#include "skelfit/metrics.h"

#include "skelfit/error.h"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace skelfit {

namespace {

void check_counts(Eigen::Index a, Eigen::Index b, const char *what) {
    if (a != b)
        throw InputError(std::string(what) + ": point counts differ (" + std::to_string(a) + " vs " +
                         std::to_string(b) + ")");
}

double mean_distance(const Eigen::MatrixX3d &a, const Eigen::MatrixX3d &b) {
    if (a.rows() == 0)
        return 0.0;
    return (a - b).rowwise().norm().mean();
}

void check_spread(const Eigen::MatrixX3d &centered, const char *which) {
    const Eigen::JacobiSVD<Eigen::MatrixX3d> svd(centered);
    const Eigen::Vector3d sv = svd.singularValues();
    if (!(sv[0] > 1e-12) || sv[1] <= 1e-9 * sv[0])
        throw NumericalError(std::string("procrustes: ") + which + " points are collinear or coincident");
}

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

} // namespace

Eigen::MatrixX3d SimilarityTransform::apply(const Eigen::MatrixX3d &points) const {
    Eigen::MatrixX3d out = scale * points * rotation.transpose();
    out.rowwise() += translation.transpose();
    return out;
}

double pck(const Points2D &pred, const Points2D &gt, double threshold, double normalizer,
           std::span<const double> visible) {
    check_counts(pred.rows(), gt.rows(), "pck");
    if (!visible.empty() && static_cast<Eigen::Index>(visible.size()) != gt.rows())
        throw InputError("pck: visibility has wrong length");
    if (!(normalizer > 0.0))
        throw InputError("pck: normalizer must be positive");
    const double radius = threshold * normalizer;
    int total = 0;
    int correct = 0;
    for (Eigen::Index k = 0; k < gt.rows(); ++k) {
        if (!visible.empty() && !(visible[static_cast<size_t>(k)] > 0.0))
            continue;
        ++total;
        if ((pred.row(k) - gt.row(k)).norm() < radius)
            ++correct;
    }
    return total == 0 ? 0.0 : static_cast<double>(correct) / total;
}

double mpjpe(const Eigen::MatrixX3d &pred, const Eigen::MatrixX3d &gt, std::optional<int> root_index) {
    check_counts(pred.rows(), gt.rows(), "mpjpe");
    if (!root_index)
        return mean_distance(pred, gt);
    if (*root_index < 0 || *root_index >= pred.rows())
        throw InputError("mpjpe: root index out of range");
    Eigen::MatrixX3d p = pred, g = gt;
    p.rowwise() -= pred.row(*root_index);
    g.rowwise() -= gt.row(*root_index);
    return mean_distance(p, g);
}

SimilarityTransform procrustes_align(const Eigen::MatrixX3d &source, const Eigen::MatrixX3d &target) {
    check_counts(source.rows(), target.rows(), "procrustes");
    if (source.rows() < 3)
        throw NumericalError("procrustes: need at least 3 points");
    const Eigen::RowVector3d mu_s = source.colwise().mean();
    const Eigen::RowVector3d mu_t = target.colwise().mean();
    const Eigen::MatrixX3d S = source.rowwise() - mu_s;
    const Eigen::MatrixX3d T = target.rowwise() - mu_t;
    check_spread(S, "source");
    check_spread(T, "target");

    const double n = static_cast<double>(source.rows());
    const Mat3 cov = T.transpose() * S / n;
    const Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Vec3 d = Vec3::Ones();
    if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0)
        d[2] = -1.0;
    SimilarityTransform out;
    out.rotation = svd.matrixU() * d.asDiagonal() * svd.matrixV().transpose();
    const double var_s = S.squaredNorm() / n;
    out.scale = svd.singularValues().dot(d) / var_s;
    if (!(out.scale > 0.0))
        throw NumericalError("procrustes: non-positive optimal scale");
    out.translation = mu_t.transpose() - out.scale * out.rotation * mu_s.transpose();
    return out;
}

double alignment_residual(const SimilarityTransform &transform, const Eigen::MatrixX3d &source,
                          const Eigen::MatrixX3d &target) {
    check_counts(source.rows(), target.rows(), "alignment_residual");
    if (source.rows() == 0)
        return 0.0;
    return (transform.apply(source) - target).squaredNorm() / static_cast<double>(source.rows());
}

double pa_mpjpe(const Eigen::MatrixX3d &pred, const Eigen::MatrixX3d &gt) {
    const SimilarityTransform t = procrustes_align(pred, gt);
    return mean_distance(t.apply(pred), gt);
}

double mpvpe(const Eigen::MatrixX3d &pred, const Eigen::MatrixX3d &gt) {
    check_counts(pred.rows(), gt.rows(), "mpvpe");
    return mean_distance(pred, gt);
}

double pa_mpvpe(const Eigen::MatrixX3d &pred, const Eigen::MatrixX3d &gt) { return pa_mpjpe(pred, gt); }

JointDofSpec joint_dof_spec(const BodyModel &model, int joint) {
    if (joint < 0 || joint >= model.num_joints())
        throw InputError("joint index out of range");
    JointDofSpec spec;
    for (const Dof &dof : model.joint(joint).dofs) {
        if (dof.kind != DofKind::rotation)
            continue;
        spec.axes.push_back(dof.axis);
        spec.lower.push_back(dof.lower);
        spec.upper.push_back(dof.upper);
    }
    return spec;
}

double LimitDecomposition::max_violation() const {
    double m = off_axis;
    for (double v : violations)
        m = std::max(m, v);
    return m;
}

LimitDecomposition decompose_against_limits(const Mat3 &rotation, const JointDofSpec &spec) {
    if (spec.lower.size() != spec.axes.size() || spec.upper.size() != spec.axes.size())
        throw InputError("joint spec: limits do not match axes");
    const DofDecomposition dec = decompose_dof_rotation(rotation, spec.axes);
    LimitDecomposition out;
    out.angles = dec.angles;
    for (size_t i = 0; i < dec.angles.size(); ++i) {
        double v = 0.0;
        if (spec.lower[i])
            v = std::max(v, *spec.lower[i] - dec.angles[i]);
        if (spec.upper[i])
            v = std::max(v, dec.angles[i] - *spec.upper[i]);
        out.violations.push_back(v);
    }
    out.off_axis = spec.axes.size() < 3 ? dec.residual_angle : 0.0;
    return out;
}

ViolationTable violation_audit(std::span<const PoseSample> poses, const BodyModel &model,
                               std::span<const double> thresholds_deg, std::span<const std::string> joints) {
    for (size_t t = 1; t < thresholds_deg.size(); ++t) {
        if (!(thresholds_deg[t - 1] < thresholds_deg[t]))
            throw InputError("violation_audit: thresholds must be strictly ascending");
    }
    ViolationTable table;
    table.thresholds_deg.assign(thresholds_deg.begin(), thresholds_deg.end());
    table.samples = static_cast<int>(poses.size());
    std::vector<std::pair<int, JointDofSpec>> specs;
    for (const std::string &name : joints) {
        const auto j = model.find_joint(name);
        if (!j)
            throw InputError("violation_audit: unknown joint '" + name + "'");
        specs.emplace_back(*j, joint_dof_spec(model, *j));
        table.joints.push_back(name);
    }
    std::vector<std::vector<int>> counts(specs.size(), std::vector<int>(thresholds_deg.size(), 0));
    for (const PoseSample &pose : poses) {
        if (static_cast<int>(pose.size()) != model.num_joints())
            throw InputError("violation_audit: pose sample has " + std::to_string(pose.size()) +
                             " rotations, model has " + std::to_string(model.num_joints()) + " joints");
        for (size_t j = 0; j < specs.size(); ++j) {
            const double v = decompose_against_limits(pose[specs[j].first], specs[j].second).max_violation() * kRadToDeg;
            for (size_t t = 0; t < thresholds_deg.size(); ++t) {
                if (v > thresholds_deg[t])
                    ++counts[j][t];
            }
        }
    }
    for (const auto &row : counts) {
        std::vector<double> freq;
        for (int c : row)
            freq.push_back(poses.empty() ? 0.0 : static_cast<double>(c) / static_cast<double>(poses.size()));
        table.frequencies.push_back(std::move(freq));
    }
    return table;
}

std::string ViolationTable::render() const {
    size_t width = 5;
    for (const auto &j : joints)
        width = std::max(width, j.size());
    std::string out = "joint" + std::string(width - 5, ' ');
    char buf[64];
    for (double t : thresholds_deg) {
        std::snprintf(buf, sizeof buf, "  >%6.1f deg", t);
        out += buf;
    }
    out += '\n';
    for (size_t j = 0; j < joints.size(); ++j) {
        out += joints[j] + std::string(width - joints[j].size(), ' ');
        for (double f : frequencies[j]) {
            std::snprintf(buf, sizeof buf, "  %11.4f", f);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

} // namespace skelfit
