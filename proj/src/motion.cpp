#include "rppg/motion.hpp"

#include "rppg/errors.hpp"
#include "rppg/random.hpp"
#include "rppg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <iomanip>
#include <numbers>
#include <regex>
#include <sstream>

namespace rppg {

namespace {

// Slack for threshold comparisons on values that went through a rad/deg
// conversion or a std computation.
constexpr double kThresholdEps = 1e-9;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell) {
  if (cell.empty() || cell == "nan" || cell == "NaN" || cell == "NA") {
    return std::numeric_limits<double>::quiet_NaN();
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw DataError("unparseable motion CSV value '" + cell + "'");
  }
  if (used != cell.size()) throw DataError("unparseable motion CSV value '" + cell + "'");
  return v;
}

}  // namespace

const char* to_string(RigidCategory c) {
  switch (c) {
    case RigidCategory::very_small: return "very_small";
    case RigidCategory::small: return "small";
    case RigidCategory::large: return "large";
    case RigidCategory::unclassified: return "unclassified";
  }
  return "unclassified";
}

const char* to_string(NonrigidCategory c) {
  switch (c) {
    case NonrigidCategory::below_small: return "below_small";
    case NonrigidCategory::small: return "small";
    case NonrigidCategory::large: return "large";
    case NonrigidCategory::unclassified: return "unclassified";
  }
  return "unclassified";
}

MotionSummary summarize_motion(const MotionProfile& profile) {
  const Eigen::Index n = profile.pose.rows();
  if (profile.aus.rows() != n) throw DataError("pose and AU tracks differ in frame count");
  if (profile.aus.cols() != kActionUnitCount) throw DataError("expected 17 action units");

  std::vector<Eigen::Index> keep;
  keep.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (profile.pose.row(i).allFinite() && profile.aus.row(i).allFinite()) keep.push_back(i);
  }
  const auto dropped = n - static_cast<Eigen::Index>(keep.size());
  if (dropped > 0 && static_cast<double>(dropped) >= 0.05 * static_cast<double>(n)) {
    throw DataError("profile '" + profile.id + "' has NaN in " + std::to_string(dropped) +
                    " of " + std::to_string(n) + " frames");
  }
  if (keep.size() < 2) throw DataError("profile '" + profile.id + "' needs at least 2 frames");

  const Eigen::MatrixX3d pose = profile.pose(keep, Eigen::all);
  const Eigen::MatrixXd aus = profile.aus(keep, Eigen::all);

  MotionSummary s;
  for (int axis = 0; axis < 3; ++axis) {
    s.rigid_msd += stats::sample_std(pose.col(axis));
    s.mean_pose_deg(axis) = stats::mean(pose.col(axis)) * 180.0 / std::numbers::pi;
  }
  s.rigid_msd /= 3.0;
  for (int au = 0; au < kActionUnitCount; ++au) s.nonrigid_msd += stats::sample_std(aus.col(au));
  s.nonrigid_msd /= static_cast<double>(kActionUnitCount);
  return s;
}

MotionCategory classify_motion(const MotionSummary& summary) {
  using namespace motion_bands;
  MotionCategory c;
  const double r = summary.rigid_msd;
  if (r >= 0.0 && r < kRigidSmallLo) {
    c.rigid = RigidCategory::very_small;
  } else if (r >= kRigidSmallLo && r <= kRigidSmallHi) {
    c.rigid = RigidCategory::small;
  } else if (r >= kRigidLargeLo && r <= kRigidLargeHi) {
    c.rigid = RigidCategory::large;
  }
  const double nr = summary.nonrigid_msd;
  if (nr >= 0.0 && nr < kNonrigidSmallLo) {
    c.nonrigid = NonrigidCategory::below_small;
  } else if (nr >= kNonrigidSmallLo && nr <= kNonrigidSmallHi) {
    c.nonrigid = NonrigidCategory::small;
  } else if (nr >= kNonrigidLargeLo && nr <= kNonrigidLargeHi) {
    c.nonrigid = NonrigidCategory::large;
  }
  return c;
}

namespace {

bool admissible(const MotionSummary& s) {
  using namespace motion_bands;
  return (s.mean_pose_deg.cwiseAbs().array() <= kMaxMeanPoseDeg + kThresholdEps).all() &&
         s.nonrigid_msd >= kMinNonrigidMsd - kThresholdEps;
}

}  // namespace

std::vector<MotionProfile> filter_driving_pool(const std::vector<MotionProfile>& pool) {
  if (pool.empty()) throw EmptyPoolError("driving pool is empty");
  std::vector<MotionProfile> kept;
  for (const auto& p : pool) {
    if (admissible(summarize_motion(p))) kept.push_back(p);
  }
  if (kept.empty()) throw EmptyPoolError("no driving video passes the pose/AU filter");
  return kept;
}

AugmentationPlan select_driving_videos(const std::vector<MotionProfile>& pool,
                                       const SelectionCriteria& criteria, int per_source,
                                       int n_sources, std::uint64_t seed) {
  if (per_source < 1) throw PreconditionError("per_source must be >= 1");
  if (n_sources < 0) throw PreconditionError("n_sources must be >= 0");
  for (const auto& range : {criteria.rigid_range, criteria.nonrigid_range}) {
    if (range && !(range->lo <= range->hi)) throw PreconditionError("criteria range has lo > hi");
  }

  AugmentationPlan plan;
  plan.seed = seed;
  for (const auto& p : filter_driving_pool(pool)) {
    const MotionSummary s = summarize_motion(p);
    if (criteria.rigid_range && !criteria.rigid_range->contains(s.rigid_msd)) continue;
    if (criteria.nonrigid_range && !criteria.nonrigid_range->contains(s.nonrigid_msd)) continue;
    plan.qualifying_ids.push_back(p.id);
  }
  const auto available = plan.qualifying_ids.size();
  if (available < static_cast<std::size_t>(per_source)) {
    throw InsufficientPoolError("only " + std::to_string(available) +
                                " qualifying drivers for per_source = " +
                                std::to_string(per_source));
  }

  Rng rng(seed);
  std::vector<std::size_t> order(available);
  for (int src = 0; src < n_sources; ++src) {
    for (std::size_t i = 0; i < available; ++i) order[i] = i;
    AugmentationPlan::Pairing pairing;
    pairing.source_index = static_cast<std::size_t>(src);
    // partial Fisher-Yates: the first per_source slots become the draw
    for (int k = 0; k < per_source; ++k) {
      const auto j = static_cast<std::size_t>(k) + rng.below(available - static_cast<std::size_t>(k));
      std::swap(order[static_cast<std::size_t>(k)], order[j]);
      pairing.driving_ids.push_back(plan.qualifying_ids[order[static_cast<std::size_t>(k)]]);
    }
    plan.pairings.push_back(std::move(pairing));
  }
  return plan;
}

const std::vector<std::string>& default_au_names() {
  static const std::vector<std::string> names = {
      "AU01_r", "AU02_r", "AU04_r", "AU05_r", "AU06_r", "AU07_r", "AU09_r", "AU10_r", "AU12_r",
      "AU14_r", "AU15_r", "AU17_r", "AU20_r", "AU23_r", "AU25_r", "AU26_r", "AU45_r"};
  return names;
}

MotionProfile read_motion_csv(std::istream& in, std::string id, double fps) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("motion CSV is empty");
  const auto header = split_csv(line);

  int pose_col[3] = {-1, -1, -1};
  std::vector<int> au_cols;
  MotionProfile profile;
  profile.id = std::move(id);
  profile.fps = fps;
  static const std::regex au_re(R"(AU\d+_r)");
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto& h = header[i];
    if (h == "pose_Rx") pose_col[0] = static_cast<int>(i);
    if (h == "pose_Ry") pose_col[1] = static_cast<int>(i);
    if (h == "pose_Rz") pose_col[2] = static_cast<int>(i);
    if (std::regex_match(h, au_re)) {
      au_cols.push_back(static_cast<int>(i));
      profile.au_names.push_back(h);
    }
  }
  for (int c : pose_col) {
    if (c < 0) throw DataError("motion CSV lacks pose_Rx/pose_Ry/pose_Rz columns");
  }
  if (au_cols.size() != static_cast<std::size_t>(kActionUnitCount)) {
    throw DataError("motion CSV must carry exactly 17 AU intensity columns, found " +
                    std::to_string(au_cols.size()));
  }

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() < header.size()) throw DataError("short row in motion CSV");
    std::vector<double> row;
    for (int c : pose_col) row.push_back(parse_cell(cells[static_cast<std::size_t>(c)]));
    for (int c : au_cols) row.push_back(parse_cell(cells[static_cast<std::size_t>(c)]));
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (n < 2) throw DataError("motion CSV needs at least 2 frames");
  profile.pose.resize(n, 3);
  profile.aus.resize(n, kActionUnitCount);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    for (int a = 0; a < 3; ++a) profile.pose(i, a) = row[static_cast<std::size_t>(a)];
    for (int a = 0; a < kActionUnitCount; ++a) {
      const double v = row[static_cast<std::size_t>(3 + a)];
      if (std::isfinite(v) && (v < 0.0 || v > 5.0)) {
        throw DataError("AU intensity outside [0, 5] in '" + profile.id + "'");
      }
      profile.aus(i, a) = v;
    }
  }
  return profile;
}

MotionProfile load_motion_csv(const std::string& path, std::string id, double fps) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open motion CSV " + path);
  return read_motion_csv(in, std::move(id), fps);
}

void write_motion_csv(std::ostream& out, const MotionProfile& profile) {
  const auto& names = profile.au_names.size() == static_cast<std::size_t>(kActionUnitCount)
                          ? profile.au_names
                          : default_au_names();
  out << "frame,pose_Rx,pose_Ry,pose_Rz";
  for (const auto& n : names) out << ',' << n;
  out << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < profile.frames(); ++i) {
    out << i;
    for (int a = 0; a < 3; ++a) out << ',' << profile.pose(i, a);
    for (int a = 0; a < kActionUnitCount; ++a) out << ',' << profile.aus(i, a);
    out << '\n';
  }
}

Eigen::MatrixXd fit_track_length(const Eigen::MatrixXd& track, Eigen::Index n) {
  const Eigen::Index m = track.rows();
  if (m < 1) throw PreconditionError("track is empty");
  Eigen::MatrixXd out(n, track.cols());
  const Eigen::Index period = m > 1 ? 2 * (m - 1) : 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index phase = i % period;
    const Eigen::Index src = phase < m ? phase : period - phase;
    out.row(i) = track.row(src);
  }
  return out;
}

}  // namespace rppg
