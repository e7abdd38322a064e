// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <array>
#include <numbers>
#include <stdexcept>

#include "walkin/error.hpp"
#include "walkin/retarget.hpp"

namespace walkin {

namespace {

// Ground-truth knees below this count as straight.
constexpr double kStraightKnee = std::numbers::pi / 180.0;

class Accumulator {
 public:
  void add(double v) {
    sum_ += v;
    max_ = n_ == 0 ? v : std::max(max_, v);
    min_ = n_ == 0 ? v : std::min(min_, v);
    ++n_;
  }
  std::size_t count() const { return n_; }
  EffectorStats stats() const { return {n_ ? sum_ / static_cast<double>(n_) : 0.0, max_}; }
  double min() const { return min_; }

 private:
  double sum_ = 0.0;
  double max_ = 0.0;
  double min_ = 0.0;
  std::size_t n_ = 0;
};

struct TruthIndex {
  std::size_t hip_l, knee_l, ankle_l, hip_r, knee_r, ankle_r, wrist_l, wrist_r;
};

std::size_t truth_joint(const GroundTruth& truth, JointRole role) {
  const auto i = truth.find(role);
  if (!i) throw FormatError("ground truth lacks joint role " + std::string(to_string(role)));
  return *i;
}

}  // namespace

SessionSolve solve_session(const Session& session, const CalibrationProfile& profile,
                           const SkeletonModel& skeleton, OffsetMode mode, const GroundTruth* truth) {
  if (truth && truth->frames.size() != session.frames.size()) {
    throw std::invalid_argument("ground truth and session have different frame counts");
  }
  const SkeletonModel scaled = scale_uniform(skeleton, profile.scale);

  SessionSolve out;
  out.frames.resize(session.frames.size());
  for (std::size_t i = 0; i < session.frames.size(); ++i) {
    try {
      out.frames[i] = solve_frame(session.frames[i], profile, scaled, mode);
    } catch (const Error& e) {
      out.failures.push_back({i, e.what()});
    }
  }

  SessionMetrics& m = out.metrics;
  m.frames = session.frames.size();
  m.failed_frames = out.failures.size();

  std::optional<TruthIndex> ti;
  if (truth) {
    ti = TruthIndex{truth_joint(*truth, JointRole::hip_l),   truth_joint(*truth, JointRole::knee_l),
                    truth_joint(*truth, JointRole::ankle_l), truth_joint(*truth, JointRole::hip_r),
                    truth_joint(*truth, JointRole::knee_r),  truth_joint(*truth, JointRole::ankle_r),
                    truth_joint(*truth, JointRole::wrist_l), truth_joint(*truth, JointRole::wrist_r)};
  }
  const std::array<std::size_t, 4> solved_effectors{
      scaled.index_of(JointRole::wrist_l), scaled.index_of(JointRole::wrist_r),
      scaled.index_of(JointRole::ankle_l), scaled.index_of(JointRole::ankle_r)};

  Accumulator effector, ankle, knee, alpha;
  std::size_t straight = 0;
  for (std::size_t i = 0; i < out.frames.size(); ++i) {
    if (!out.frames[i]) continue;
    const SolvedPose& s = *out.frames[i];
    alpha.add(s.alpha);
    m.detached_l += s.controller_detached_l ? 1 : 0;
    m.detached_r += s.controller_detached_r ? 1 : 0;

    bool straight_frame = true;
    if (ti) {
      const auto& gt = truth->frames[i];
      const std::array<std::size_t, 4> truth_effectors{ti->wrist_l, ti->wrist_r, ti->ankle_l, ti->ankle_r};
      for (std::size_t k = 0; k < 4; ++k) {
        const double err = distance(s.world[solved_effectors[k]].translation,
                                    gt[truth_effectors[k]].translation);
        effector.add(err);
        if (k >= 2) ankle.add(err);
      }
      const double gt_knee_l = flexion_angle(gt[ti->hip_l].translation, gt[ti->knee_l].translation,
                                             gt[ti->ankle_l].translation);
      const double gt_knee_r = flexion_angle(gt[ti->hip_r].translation, gt[ti->knee_r].translation,
                                             gt[ti->ankle_r].translation);
      straight_frame = gt_knee_l < kStraightKnee && gt_knee_r < kStraightKnee;
    }
    if (straight_frame) {
      ++straight;
      knee.add(s.knee_l());
      knee.add(s.knee_r());
    }
  }

  if (ti) {
    m.effector_error = effector.stats();
    m.ankle_error = ankle.stats();
    m.straight_leg_frames = straight;
  }
  m.knee_flexion = knee.stats();
  m.knee_flexion_min = knee.min();
  m.alpha = alpha.stats();
  return out;
}

nlohmann::json metrics_to_json(const SessionMetrics& m) {
  using nlohmann::json;
  auto stats = [](const EffectorStats& s) { return json{{"mean", s.mean}, {"max", s.max}}; };
  json j = {{"frames", m.frames},
            {"failed_frames", m.failed_frames},
            {"knee_flexion", {{"mean", m.knee_flexion.mean},
                              {"max", m.knee_flexion.max},
                              {"min", m.knee_flexion_min}}},
            {"alpha", stats(m.alpha)},
            {"detached_l", m.detached_l},
            {"detached_r", m.detached_r}};
  j["effector_error"] = m.effector_error ? stats(*m.effector_error) : json(nullptr);
  j["ankle_error"] = m.ankle_error ? stats(*m.ankle_error) : json(nullptr);
  j["straight_leg_frames"] = m.straight_leg_frames ? json(*m.straight_leg_frames) : json(nullptr);
  return j;
}

}  // namespace walkin
