#include "skelfit/toy_model.h"

#include "skelfit/error.h"

#include <cmath>
#include <numbers>

namespace skelfit {

namespace {

constexpr double kHingeMax = 3.0 * std::numbers::pi / 4.0;

Dof rot(std::string name, const Vec3 &axis, double lo, double hi) {
    return Dof{std::move(name), DofKind::rotation, axis, lo, hi};
}

Dof free_dof(std::string name, DofKind kind, const Vec3 &axis) {
    return Dof{std::move(name), kind, axis, std::nullopt, std::nullopt};
}

struct Segment {
    int owner;  // joint whose rotation carries the segment
    int blend;  // joint blended in towards the far end, -1 for none
    Vec3 start;
    Vec3 end;
    double radius;
};

} // namespace

ModelDefinition make_toy_model_definition(const ToyModelSpec &spec) {
    if (spec.joint_count < 13)
        throw InputError("toy model needs at least 13 joints");
    if (spec.vertices_per_bone < 8 || spec.vertices_per_bone % 4 != 0)
        throw InputError("toy model vertices_per_bone must be a multiple of 4 and at least 8");
    if (spec.shape_dim < 0)
        throw InputError("toy model shape_dim must be non-negative");

    ModelDefinition def;
    auto add = [&](std::string name, int parent, Vec3 offset, std::vector<Dof> dofs) {
        def.joints.push_back(Joint{std::move(name), parent, offset, std::move(dofs)});
        return static_cast<int>(def.joints.size()) - 1;
    };
    const Vec3 X = Vec3::UnitX(), Y = Vec3::UnitY(), Z = Vec3::UnitZ();

    const int pelvis = add("pelvis", -1, Vec3(0.0, 0.95, 0.0),
                           {free_dof("pelvis_tx", DofKind::translation, X),
                            free_dof("pelvis_ty", DofKind::translation, Y),
                            free_dof("pelvis_tz", DofKind::translation, Z),
                            free_dof("pelvis_yaw", DofKind::rotation, Y),
                            free_dof("pelvis_tilt", DofKind::rotation, X),
                            free_dof("pelvis_list", DofKind::rotation, Z)});

    const int n_spine = spec.joint_count - 12;
    int chest = pelvis;
    for (int s = 0; s < n_spine; ++s) {
        const std::string name = "spine_" + std::to_string(s + 1);
        chest = add(name, chest, Vec3(0.0, 0.5 / n_spine, 0.0),
                    {rot(name + "_bend", X, -0.5, 0.5), rot(name + "_lean", Z, -0.4, 0.4),
                     rot(name + "_twist", Y, -0.5, 0.5)});
    }
    const int head = add("head", chest, Vec3(0.0, 0.15, 0.0),
                         {rot("head_nod", X, -0.6, 0.6), rot("head_turn", Y, -1.1, 1.1)});

    std::vector<std::pair<int, Vec3>> tips = {{head, Vec3(0.0, 0.2, 0.0)}};
    for (int side = 0; side < 2; ++side) {
        const double sx = side == 0 ? 1.0 : -1.0;
        const std::string p = side == 0 ? "l_" : "r_";
        const int hip = add(p + "hip", pelvis, Vec3(0.1 * sx, -0.06, 0.0),
                            {rot(p + "hip_flexion", X, -2.0, 0.5), rot(p + "hip_rotation", Y, -0.7, 0.7),
                             side == 0 ? rot(p + "hip_adduction", Z, -0.5, 0.8)
                                       : rot(p + "hip_adduction", Z, -0.8, 0.5)});
        const int knee = add(p + "knee", hip, Vec3(0.0, -0.42, 0.0), {rot(p + "knee_flexion", X, 0.0, kHingeMax)});
        const int ankle = add(p + "ankle", knee, Vec3(0.0, -0.42, 0.0),
                              {rot(p + "ankle_flexion", X, -0.7, 0.5), rot(p + "ankle_inversion", Z, -0.35, 0.35)});
        tips.emplace_back(ankle, Vec3(0.0, -0.05, 0.15));
    }
    for (int side = 0; side < 2; ++side) {
        const double sx = side == 0 ? 1.0 : -1.0;
        const std::string p = side == 0 ? "l_" : "r_";
        const int shoulder = add(p + "shoulder", chest, Vec3(0.18 * sx, -0.02, 0.0),
                                 {side == 0 ? rot(p + "shoulder_elevation", Z, -1.4, 1.2)
                                            : rot(p + "shoulder_elevation", Z, -1.2, 1.4),
                                  rot(p + "shoulder_swing", Y, -1.2, 1.2), rot(p + "shoulder_twist", X, -1.0, 1.0)});
        const int elbow = add(p + "elbow", shoulder, Vec3(0.28 * sx, 0.0, 0.0),
                              {rot(p + "elbow_flexion", Vec3(0.0, -sx, 0.0), 0.0, kHingeMax)});
        tips.emplace_back(elbow, Vec3(0.25 * sx, 0.0, 0.0));
    }
    const int J = static_cast<int>(def.joints.size());

    JointSet3D rest(J, 3);
    for (int j = 0; j < J; ++j) {
        rest.row(j) = def.joints[j].rest_offset.transpose();
        if (def.joints[j].parent != -1)
            rest.row(j) += rest.row(def.joints[j].parent);
    }

    std::vector<Segment> segments;
    for (int j = 0; j < J; ++j) {
        const int p = def.joints[j].parent;
        if (p == -1)
            continue;
        const Vec3 a = rest.row(p).transpose();
        const Vec3 b = rest.row(j).transpose();
        const bool midline = std::abs(a.x()) < 0.05 && std::abs(b.x()) < 0.05;
        segments.push_back({p, j, a, b, midline ? 0.1 : 0.05});
    }
    for (const auto &[leaf, tip] : tips) {
        const Vec3 a = rest.row(leaf).transpose();
        segments.push_back({leaf, -1, a, a + tip, 0.04});
    }

    const int rings = spec.vertices_per_bone / 4;
    const int N = static_cast<int>(segments.size()) * spec.vertices_per_bone;
    def.template_vertices.resize(N, 3);
    def.skinning_weights = Eigen::MatrixXd::Zero(N, J);
    Eigen::MatrixX3d radial(N, 3);
    std::vector<Eigen::Vector3i> faces;
    // First vertex of the first and last ring of each segment.
    std::vector<int> first_ring(segments.size()), last_ring(segments.size());

    int v = 0;
    for (size_t s = 0; s < segments.size(); ++s) {
        const Segment &seg = segments[s];
        const Vec3 dir = (seg.end - seg.start).normalized();
        const Vec3 helper = std::abs(dir.y()) < 0.9 ? Y : X;
        const Vec3 u = helper.cross(dir).normalized();
        const Vec3 w = dir.cross(u);
        first_ring[s] = v;
        for (int r = 0; r < rings; ++r) {
            const double f = static_cast<double>(r) / (rings - 1);
            const Vec3 center = seg.start + f * (seg.end - seg.start);
            const double w_blend = seg.blend >= 0 ? std::max(0.0, f - 0.5) : 0.0;
            if (r == rings - 1)
                last_ring[s] = v;
            for (int k = 0; k < 4; ++k) {
                const double phi = k * std::numbers::pi / 2.0;
                const Vec3 out = std::cos(phi) * u + std::sin(phi) * w;
                def.template_vertices.row(v) = (center + seg.radius * out).transpose();
                radial.row(v) = out.transpose();
                def.skinning_weights(v, seg.owner) += 1.0 - w_blend;
                if (w_blend > 0.0)
                    def.skinning_weights(v, seg.blend) += w_blend;
                if (r + 1 < rings) {
                    const int a0 = v, a1 = first_ring[s] + r * 4 + (k + 1) % 4;
                    faces.emplace_back(a0, a1, a1 + 4);
                    faces.emplace_back(a0, a1 + 4, a0 + 4);
                }
                ++v;
            }
        }
    }
    def.faces.resize(static_cast<Eigen::Index>(faces.size()), 3);
    for (size_t f = 0; f < faces.size(); ++f)
        def.faces.row(static_cast<Eigen::Index>(f)) = faces[f].transpose();

    auto ring_row = [&](int first_vertex) {
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(N);
        for (int k = 0; k < 4; ++k)
            row[first_vertex + k] = 0.25;
        return row;
    };
    def.skeleton_regressor = Eigen::MatrixXd::Zero(J, N);
    for (int j = 0; j < J; ++j) {
        for (size_t s = 0; s < segments.size(); ++s) {
            if (j == pelvis && segments[s].owner == pelvis && segments[s].blend >= 0) {
                def.skeleton_regressor.row(j) = ring_row(first_ring[s]);
                break;
            }
            if (segments[s].blend == j) {
                def.skeleton_regressor.row(j) = ring_row(last_ring[s]);
                break;
            }
        }
    }
    const int K = J + static_cast<int>(tips.size());
    def.joint_regressor.resize(K, N);
    def.joint_regressor.topRows(J) = def.skeleton_regressor;
    for (int j = 0; j < J; ++j)
        def.keypoint_names.push_back(def.joints[j].name);
    const size_t first_tip_segment = segments.size() - tips.size();
    for (size_t t = 0; t < tips.size(); ++t) {
        def.joint_regressor.row(J + static_cast<int>(t)) = ring_row(last_ring[first_tip_segment + t]);
        def.keypoint_names.push_back(def.joints[tips[t].first].name + "_tip");
    }

    const double root_y = rest(pelvis, 1);
    for (int b = 0; b < spec.shape_dim; ++b) {
        Eigen::MatrixX3d blend = Eigen::MatrixX3d::Zero(N, 3);
        for (int i = 0; i < N; ++i) {
            const Vec3 p = def.template_vertices.row(i).transpose();
            Vec3 d = Vec3::Zero();
            switch (b) {
            case 0: // stature
                d = Vec3(0.0, 0.05 * (p.y() - root_y), 0.0);
                break;
            case 1: // girth
                d = 0.02 * radial.row(i).transpose();
                break;
            case 2: // arm span
                d = Vec3(0.05 * p.x(), 0.0, 0.0);
                break;
            case 3: // leg length
                d = p.y() < root_y ? Vec3(0.0, 0.06 * (p.y() - root_y), 0.0) : Vec3::Zero();
                break;
            case 4: // depth
                d = Vec3(0.0, 0.0, 0.3 * p.z());
                break;
            default: {
                const double k = b - 4;
                const double t = static_cast<double>(i + 1);
                d = 0.01 * Vec3(std::sin(0.37 * k * t), std::cos(0.53 * k * t), std::sin(0.71 * k * t + 0.3));
            }
            }
            blend.row(i) = d.transpose();
        }
        def.shape_blendshapes.push_back(std::move(blend));
    }
    return def;
}

BodyModel make_toy_model(const ToyModelSpec &spec) { return BodyModel(make_toy_model_definition(spec)); }

} // namespace skelfit
