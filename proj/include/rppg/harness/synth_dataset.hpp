#pragma once

#include "rppg/frame_io.hpp"
#include "rppg/harness/config.hpp"

#include <filesystem>

namespace rppg::harness {

/// Writes config.synthetic.n_videos seeded synthetic videos under `dir`:
/// `<id>/frames/` (frames plus meta.json and mask.png), `<id>/gold.csv`,
/// `<id>/motion.csv`, and a `manifest.json` that load_manifest accepts.
///
/// Heart rates are evenly spaced over hr_range_bpm. When the suite asks for
/// motion, each video carries its pose track and the skin mask shared by all
/// frames is the intersection of the per-frame warped masks. Action-unit
/// columns are smooth sinusoids whose spread is drawn from [0.15, 0.55].
DatasetManifest write_synthetic_dataset(const RunConfig& config, const std::filesystem::path& dir,
                                        FrameFormat format = FrameFormat::png16);

}  // namespace rppg::harness
