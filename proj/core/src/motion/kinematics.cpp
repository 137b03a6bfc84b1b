#include "motionstyle/motion/kinematics.hpp"

#include "motionstyle/error.hpp"
#include "motionstyle/motion/rotation.hpp"

namespace motionstyle::motion {

namespace {

void require_unnormalized(const PoseSequence& seq, const char* op) {
  if (seq.normalized) raise(ErrorCode::NotNormalized, std::string(op) + " expects raw features");
  if (!seq.skeleton) raise(ErrorCode::ShapeMismatch, std::string(op) + ": missing skeleton");
  if (seq.feature_dim() != seq.layout().dim())
    raise(ErrorCode::ShapeMismatch, std::string(op) + ": feature width does not match skeleton");
}

Rotation6D read_sixd(const PoseSequence& seq, int t, int j) {
  const int base = seq.layout().rotations() + 6 * j;
  Rotation6D r;
  for (int k = 0; k < 6; ++k) r[k] = seq.frames(t, base + k);
  return r;
}

void pose_frame(const Skeleton& skel, const Eigen::Matrix3d& root_global,
                const Eigen::Vector3d& root_pos, const std::vector<Eigen::Matrix3d>& local,
                JointPositions& out, int t) {
  const int J = skel.joint_count();
  std::vector<Eigen::Matrix3d> global(J);
  global[0] = root_global * local[0];
  out.at(t, 0) = root_pos;
  for (int j = 1; j < J; ++j) {
    const int p = skel.parents[j];
    global[j] = global[p] * local[j];
    out.at(t, j) = out.at(t, p) + global[p] * skel.offsets[j];
  }
}

}  // namespace

RootTrajectory integrate_root(const PoseSequence& seq) {
  const int T = seq.frame_count();
  RootTrajectory root;
  root.yaw.resize(T);
  root.position.resize(T);
  if (T == 0) return root;
  root.yaw[0] = 0.0;
  root.position[0] = Eigen::Vector3d(0.0, seq.frames(0, PoseLayout::kRootHeight), 0.0);
  for (int t = 1; t < T; ++t) {
    const double yaw_rate = seq.frames(t - 1, PoseLayout::kRootYawRate);
    const Eigen::Vector3d v(seq.frames(t - 1, PoseLayout::kRootVelocity), 0.0,
                            seq.frames(t - 1, PoseLayout::kRootVelocity + 1));
    root.yaw[t] = root.yaw[t - 1] + yaw_rate;
    Eigen::Vector3d p = root.position[t - 1] + yaw_matrix(root.yaw[t - 1]) * v;
    p.y() = seq.frames(t, PoseLayout::kRootHeight);
    root.position[t] = p;
  }
  return root;
}

std::vector<std::vector<Eigen::Matrix3d>> local_rotations(const PoseSequence& seq) {
  const int T = seq.frame_count();
  const int J = seq.layout().joints;
  std::vector<std::vector<Eigen::Matrix3d>> out(T, std::vector<Eigen::Matrix3d>(J));
  for (int t = 0; t < T; ++t)
    for (int j = 0; j < J; ++j) out[t][j] = sixd_to_matrix(read_sixd(seq, t, j));
  return out;
}

JointPositions forward_kinematics(const PoseSequence& seq) {
  require_unnormalized(seq, "forward_kinematics");
  const auto& skel = *seq.skeleton;
  const int T = seq.frame_count();
  const RootTrajectory root = integrate_root(seq);
  const auto rotations = local_rotations(seq);
  JointPositions out(T, skel.joint_count());
  for (int t = 0; t < T; ++t)
    pose_frame(skel, yaw_matrix(root.yaw[t]), root.position[t], rotations[t], out, t);
  return out;
}

double default_contact_threshold(double fps) { return 0.002 * (30.0 / fps); }

Eigen::MatrixXf detect_foot_contacts(const JointPositions& positions, const Skeleton& skeleton,
                                     double fps, double threshold) {
  const int T = positions.frames();
  if (T < 2) raise(ErrorCode::TooShort, "contact detection needs at least two frames");
  const double thr = threshold > 0.0 ? threshold : default_contact_threshold(fps);
  const double thr2 = thr * thr;
  Eigen::MatrixXf labels(T, 4);
  for (int f = 0; f < 4; ++f) {
    const int j = skeleton.foot_joints[f];
    for (int t = 1; t < T; ++t) {
      const double d2 = (positions.at(t, j) - positions.at(t - 1, j)).squaredNorm();
      labels(t, f) = d2 < thr2 ? 1.0f : 0.0f;
    }
    labels(0, f) = labels(1, f);
  }
  return labels;
}

JointPositions pose_state(const MotionState& state, const Skeleton& skeleton) {
  const int T = static_cast<int>(state.root_yaw.size());
  JointPositions out(T, skeleton.joint_count());
  for (int t = 0; t < T; ++t)
    pose_frame(skeleton, yaw_matrix(state.root_yaw[t]), state.root_position[t], state.rotations[t],
               out, t);
  return out;
}

PoseSequence featurize(const MotionState& state, std::shared_ptr<const Skeleton> skeleton,
                       double fps) {
  const int T = static_cast<int>(state.root_yaw.size());
  const int J = skeleton->joint_count();
  const PoseLayout layout{J};
  const JointPositions pos = pose_state(state, *skeleton);
  PoseSequence seq;
  seq.fps = fps;
  seq.skeleton = skeleton;
  seq.frames = FrameMatrix::Zero(T, layout.dim());
  for (int t = 0; t < T; ++t) {
    // Rates at the last frame repeat the previous frame.
    const int a = t + 1 < T ? t : std::max(0, t - 1);
    const int b = t + 1 < T ? t + 1 : t;
    const Eigen::Matrix3d heading_inv = yaw_matrix(state.root_yaw[t]).transpose();
    const Eigen::Matrix3d heading_a_inv = yaw_matrix(state.root_yaw[a]).transpose();
    auto row = seq.frames.row(t);
    row(PoseLayout::kRootYawRate) = static_cast<float>(state.root_yaw[b] - state.root_yaw[a]);
    const Eigen::Vector3d dv = heading_a_inv * (state.root_position[b] - state.root_position[a]);
    row(PoseLayout::kRootVelocity) = static_cast<float>(dv.x());
    row(PoseLayout::kRootVelocity + 1) = static_cast<float>(dv.z());
    row(PoseLayout::kRootHeight) = static_cast<float>(state.root_position[t].y());
    for (int j = 0; j < J; ++j) {
      const Eigen::Vector3d local = heading_inv * (pos.at(t, j) - pos.at(t, 0));
      const Eigen::Vector3d vel = heading_a_inv * (pos.at(b, j) - pos.at(a, j));
      for (int k = 0; k < 3; ++k) {
        row(layout.positions() + 3 * j + k) = static_cast<float>(local[k]);
        row(layout.velocities() + 3 * j + k) = static_cast<float>(vel[k]);
      }
      const Rotation6D r = matrix_to_sixd(state.rotations[t][j]);
      for (int k = 0; k < 6; ++k) row(layout.rotations() + 6 * j + k) = static_cast<float>(r[k]);
    }
  }
  if (T >= 2) {
    seq.frames.block(0, layout.contacts(), T, 4) =
        detect_foot_contacts(pos, *skeleton, fps).cast<float>();
  }
  return seq;
}

PoseSequence recompute_contacts(const PoseSequence& seq) {
  require_unnormalized(seq, "recompute_contacts");
  PoseSequence out = seq;
  if (seq.frame_count() < 2) return out;
  const auto pos = forward_kinematics(seq);
  out.frames.block(0, seq.layout().contacts(), seq.frame_count(), 4) =
      detect_foot_contacts(pos, *seq.skeleton, seq.fps);
  return out;
}

double mpjpe(const PoseSequence& a, const PoseSequence& b) {
  if (a.frame_count() != b.frame_count()) raise(ErrorCode::LengthMismatch, "mpjpe: frame counts differ");
  auto strip = [](PoseSequence s) {
    s.frames.leftCols(3).setZero();
    return s;
  };
  const auto pa = forward_kinematics(strip(a));
  const auto pb = forward_kinematics(strip(b));
  double acc = 0.0;
  for (int t = 0; t < pa.frames(); ++t)
    for (int j = 0; j < pa.joints(); ++j) acc += (pa.at(t, j) - pb.at(t, j)).norm();
  return acc / (static_cast<double>(pa.frames()) * pa.joints());
}

}  // namespace motionstyle::motion
