#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rppg {

inline constexpr int kActionUnitCount = 17;

/// Head pose (radians) and facial action unit intensities (0-5) per frame.
struct MotionProfile {
  std::string id;
  double fps = 30.0;
  Eigen::MatrixX3d pose;   // frames x (Rx, Ry, Rz)
  Eigen::MatrixXd aus;     // frames x 17
  std::vector<std::string> au_names;

  Eigen::Index frames() const { return pose.rows(); }
};

struct MotionSummary {
  double rigid_msd = 0.0;      // rad
  double nonrigid_msd = 0.0;   // AU intensity
  Eigen::Vector3d mean_pose_deg = Eigen::Vector3d::Zero();
};

enum class RigidCategory { very_small, small, large, unclassified };
enum class NonrigidCategory { below_small, small, large, unclassified };

struct MotionCategory {
  RigidCategory rigid = RigidCategory::unclassified;
  NonrigidCategory nonrigid = NonrigidCategory::unclassified;

  bool operator==(const MotionCategory&) const = default;
};

const char* to_string(RigidCategory c);
const char* to_string(NonrigidCategory c);

/// Interval table used by classify_motion. Bounds are inclusive except the
/// upper edge of the lowest class; values in the gaps are unclassified.
namespace motion_bands {
inline constexpr double kRigidSmallLo = 0.03;
inline constexpr double kRigidSmallHi = 0.07;
inline constexpr double kRigidLargeLo = 0.10;
inline constexpr double kRigidLargeHi = 0.14;
inline constexpr double kNonrigidSmallLo = 0.15;
inline constexpr double kNonrigidSmallHi = 0.25;
inline constexpr double kNonrigidLargeLo = 0.45;
inline constexpr double kNonrigidLargeHi = 0.55;
// Driving-pool admission.
inline constexpr double kMaxMeanPoseDeg = 20.0;
inline constexpr double kMinNonrigidMsd = 0.15;
}  // namespace motion_bands

/// Per-axis (per-AU) sample standard deviation over frames, averaged across
/// axes (AUs), plus the per-axis mean pose in degrees. Rows holding NaN are
/// dropped when they make up less than 5% of frames; otherwise DataError.
MotionSummary summarize_motion(const MotionProfile& profile);

MotionCategory classify_motion(const MotionSummary& summary);

/// Keeps profiles whose mean pose is within +/-20 degrees on every axis and
/// whose non-rigid spread is at least 0.15, in input order. Throws
/// EmptyPoolError when nothing survives.
std::vector<MotionProfile> filter_driving_pool(const std::vector<MotionProfile>& pool);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

struct SelectionCriteria {
  std::optional<Range> rigid_range;
  std::optional<Range> nonrigid_range;
};

struct AugmentationPlan {
  struct Pairing {
    std::size_t source_index = 0;
    std::vector<std::string> driving_ids;

    bool operator==(const Pairing&) const = default;
  };
  std::vector<Pairing> pairings;
  std::vector<std::string> qualifying_ids;
  std::uint64_t seed = 0;

  bool operator==(const AugmentationPlan&) const = default;
};

/// Applies the pool filter, keeps drivers inside every supplied range, then
/// draws `per_source` distinct drivers for each of `n_sources` sources from a
/// generator seeded with `seed`.
AugmentationPlan select_driving_videos(const std::vector<MotionProfile>& pool,
                                       const SelectionCriteria& criteria, int per_source,
                                       int n_sources, std::uint64_t seed);

/// Reads an OpenFace-style CSV: `frame`, `pose_Rx`, `pose_Ry`, `pose_Rz` and
/// exactly 17 `AU??_r` columns (any subset names). Header cells are trimmed.
MotionProfile read_motion_csv(std::istream& in, std::string id, double fps = 30.0);
MotionProfile load_motion_csv(const std::string& path, std::string id, double fps = 30.0);
void write_motion_csv(std::ostream& out, const MotionProfile& profile);

/// Default OpenFace intensity column names.
const std::vector<std::string>& default_au_names();

/// Extends or truncates a per-frame track to n rows, looping with reflection
/// at the ends (0 1 2 3 2 1 0 1 ...).
Eigen::MatrixXd fit_track_length(const Eigen::MatrixXd& track, Eigen::Index n);

}  // namespace rppg
