#ifndef SFD_PIPELINE_HPP
#define SFD_PIPELINE_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sfd/acwe.hpp"
#include "sfd/baselines.hpp"
#include "sfd/config_json.hpp"
#include "sfd/disk.hpp"
#include "sfd/error.hpp"
#include "sfd/eval.hpp"
#include "sfd/image.hpp"
#include "sfd/image_io.hpp"
#include "sfd/postprocess.hpp"
#include "sfd/preprocess.hpp"

namespace sfd {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Atomic artifact writes: write to a temp sibling, then rename into place.
// ---------------------------------------------------------------------------

namespace detail {

template <typename WriteFn>
void atomic_write(const fs::path& path, WriteFn&& write) {
  const fs::path tmp = path.string() + ".tmp";
  write(tmp.string());
  fs::rename(tmp, path);
}

inline void atomic_write_text(const fs::path& path, const std::string& text) {
  atomic_write(path, [&](const std::string& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorCode::UnwritablePath, "cannot write " + p);
    out << text;
  });
}

class StageClock {
public:
  void start() { t0_ = std::chrono::steady_clock::now(); }
  double stop() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

private:
  std::chrono::steady_clock::time_point t0_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

struct StageTiming {
  std::string name;
  bool skipped = false;
  double wall_time_seconds = 0.0;
};

/// In-memory results of one pipeline run; files land in out_dir.
struct PipelineResult {
  BinaryMask final_mask;
  std::optional<DiskGeometry> disk_geometry;
  std::optional<BinaryMask> disk_mask;
  AcweResult acwe;
  std::vector<StageTiming> stages;
  double total_wall_time_seconds = 0.0;
  nlohmann::json manifest;
};

inline const std::vector<std::string>& pipeline_stage_names() {
  static const std::vector<std::string> names = {
      "detect_disk",    "build_white_patch_mask", "inpaint",       "log_transform",
      "sharpen",        "evolve",                 "filament_mask", "filter_by_area"};
  return names;
}

/// Runs the full detection pipeline on one image:
///
///   detect_disk (optional) -> build_white_patch_mask -> inpaint
///     -> log_transform -> sharpen -> evolve -> filament_mask
///     -> filter_by_area
///
/// With use_disk_mask set, the white-patch quantile is computed over on-disk
/// pixels, the level-set evolution is confined to the disk, and the final
/// mask is intersected with it. Writes final_mask.pgm and a run.json
/// manifest recording every parameter and per-stage wall time; with
/// emit_intermediates it also writes each stage's image, the raw ACWE mask
/// and the energy trace.
inline PipelineResult run_pipeline(const std::string& input_path,
                                   const PipelineConfig& config,
                                   const std::string& out_dir) {
  config.validate();
  fs::create_directories(out_dir);
  const fs::path out(out_dir);

  const auto run_t0 = std::chrono::steady_clock::now();
  const GrayImage img = load_image(input_path);

  PipelineResult result;
  auto timed = [&result](const std::string& name, auto&& fn) {
    detail::StageClock clock;
    clock.start();
    fn();
    result.stages.push_back(StageTiming{name, false, clock.stop()});
  };

  // 1. detect_disk
  if (config.use_disk_mask) {
    timed("detect_disk", [&] {
      auto [geom, mask] = detect_disk(img, config.disk_threshold_fraction);
      result.disk_geometry = geom;
      result.disk_mask = std::move(mask);
    });
  } else {
    result.stages.push_back(StageTiming{"detect_disk", true, 0.0});
  }
  const BinaryMask* roi = result.disk_mask ? &*result.disk_mask : nullptr;

  // 2. white patches
  BinaryMask omega;
  timed("build_white_patch_mask",
        [&] { omega = build_white_patch_mask(img, config.inpaint, roi); });

  // 3. inpaint
  GrayImage inpainted;
  timed("inpaint", [&] { inpainted = inpaint(img, omega, config.inpaint); });

  // 4. log transform
  GrayImage logimg;
  LogTransformParams logparams;
  timed("log_transform", [&] {
    auto [li, lp] = log_transform(inpainted);
    logimg = std::move(li);
    logparams = lp;
  });

  // 5. sharpen
  GrayImage sharpened;
  timed("sharpen", [&] { sharpened = sharpen(logimg); });

  // 6. ACWE
  timed("evolve", [&] { result.acwe = evolve(sharpened, config.acwe, roi); });

  // 7. darker-region selection
  BinaryMask filaments;
  timed("filament_mask", [&] {
    filaments = filament_mask(result.acwe, sharpened);
    if (roi) filaments = filaments.intersect(*roi);
  });

  // 8. area filter
  timed("filter_by_area",
        [&] { result.final_mask = filter_by_area(filaments, config.post); });

  result.total_wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - run_t0).count();

  // Artifacts
  detail::atomic_write(out / "final_mask.pgm", [&](const std::string& p) {
    save_mask(result.final_mask, p);
  });

  nlohmann::json outputs = {{"final_mask", "final_mask.pgm"}};
  if (config.emit_intermediates) {
    auto emit_img = [&](const char* name, const GrayImage& im) {
      detail::atomic_write(out / name, [&](const std::string& p) { save_pgm(im, p); });
      outputs[fs::path(name).stem().string()] = name;
    };
    auto emit_mask = [&](const char* name, const BinaryMask& m) {
      detail::atomic_write(out / name, [&](const std::string& p) { save_mask(m, p); });
      outputs[fs::path(name).stem().string()] = name;
    };
    if (result.disk_mask) emit_mask("disk.pgm", *result.disk_mask);
    emit_mask("omega.pgm", omega);
    emit_img("inpainted.pgm", inpainted);
    emit_img("log.pgm", logimg);
    emit_img("sharpened.pgm", sharpened);
    emit_mask("acwe_mask.pgm", result.acwe.mask);

    std::ostringstream trace;
    trace << "iteration,energy\n" << std::setprecision(17);
    for (size_t i = 0; i < result.acwe.energy_trace.size(); ++i)
      trace << i << ',' << result.acwe.energy_trace[i] << '\n';
    detail::atomic_write_text(out / "energy_trace.csv", trace.str());
    outputs["energy_trace"] = "energy_trace.csv";
  }

  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : result.stages)
    stages.push_back({{"name", s.name},
                      {"skipped", s.skipped},
                      {"wall_time_seconds", s.wall_time_seconds}});

  nlohmann::json manifest = {
      {"input", input_path},
      {"config", config},
      {"image", {{"width", img.width()}, {"height", img.height()}}},
      {"log_transform", {{"r", logparams.r}, {"i_max", logparams.i_max}}},
      {"acwe",
       {{"iterations_run", result.acwe.iterations_run},
        {"converged", result.acwe.converged},
        {"c1", result.acwe.c1},
        {"c2", result.acwe.c2},
        {"initial_energy", result.acwe.energy_trace.front()},
        {"final_energy", result.acwe.energy_trace.back()}}},
      {"stages", stages},
      {"total_wall_time_seconds", result.total_wall_time_seconds},
      {"outputs", outputs},
  };
  if (result.disk_geometry)
    manifest["disk"] = {{"center_x", result.disk_geometry->center_x},
                        {"center_y", result.disk_geometry->center_y},
                        {"radius", result.disk_geometry->radius}};
  result.manifest = manifest;
  detail::atomic_write_text(out / "run.json", manifest.dump(2) + "\n");
  return result;
}

/// Accepts either a bare PipelineConfig JSON or a run.json manifest (whose
/// "config" object is extracted), so a recorded run can be replayed as-is.
inline PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotReadable, "cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::UnsupportedFormat, path + ": bad JSON: " + e.what());
  }
  if (j.contains("config") && j.at("config").is_object()) j = j.at("config");
  PipelineConfig cfg = j.get<PipelineConfig>();
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// Experiment harness
// ---------------------------------------------------------------------------

/// Scores pred against truth, over roi when given (primary block) and over
/// the full frame (always attached), since published accuracy figures for
/// full-disk images are sensitive to whether off-limb pixels count.
inline nlohmann::json score_to_json(const MetricsReport& primary,
                                    const ConfusionMatrix& full,
                                    bool roi_restricted) {
  const auto [far, ftpr] = metrics(full);
  nlohmann::json j = {{"method", primary.method_name},
                      {"image_id", primary.image_id},
                      {"tp", primary.matrix.tp},
                      {"fp", primary.matrix.fp},
                      {"tn", primary.matrix.tn},
                      {"fn", primary.matrix.fn},
                      {"ar", primary.ar},
                      {"tpr", primary.tpr},
                      {"iou", primary.iou},
                      {"dice", primary.dice},
                      {"wall_time_seconds", primary.wall_time_seconds},
                      {"scoring", roi_restricted ? "disk_roi" : "full_frame"},
                      {"full_frame",
                       {{"tp", full.tp},
                        {"fp", full.fp},
                        {"tn", full.tn},
                        {"fn", full.fn},
                        {"ar", far},
                        {"tpr", ftpr}}}};
  return j;
}

struct ExperimentResult {
  ComparisonTable table;
  std::vector<std::string> warnings;
  int images_processed = 0;
};

/// Runs the pipeline plus both classical baselines on every image in
/// image_dir that has a same-stem ground-truth file in truth_dir, scores
/// all three against the truth, and writes per-image report JSONs plus a
/// comparison table (CSV and text). Baselines run on the raw image and
/// their masks get the same area filter as the pipeline. Unpaired files are
/// reported and skipped. Images are independent and are distributed over
/// `threads` workers.
inline ExperimentResult run_experiment(const std::string& image_dir,
                                       const std::string& truth_dir,
                                       const PipelineConfig& config,
                                       const std::string& out_dir,
                                       int threads = 1) {
  config.validate();
  fs::create_directories(out_dir);

  ExperimentResult result;

  std::map<std::string, fs::path> truths;
  if (fs::exists(truth_dir))
    for (const auto& e : fs::directory_iterator(truth_dir)) {
      if (!e.is_regular_file()) continue;
      const auto ext = e.path().extension().string();
      if (ext == ".png" || ext == ".pgm") truths[e.path().stem().string()] = e.path();
    }

  std::vector<std::pair<fs::path, fs::path>> pairs;
  if (fs::exists(image_dir))
    for (const auto& e : fs::directory_iterator(image_dir)) {
      if (!e.is_regular_file()) continue;
      const auto ext = e.path().extension().string();
      if (ext != ".png" && ext != ".pgm") continue;
      const auto stem = e.path().stem().string();
      auto it = truths.find(stem);
      if (it == truths.end()) {
        result.warnings.push_back("no ground truth for " + e.path().string() + "; skipped");
        continue;
      }
      pairs.emplace_back(e.path(), it->second);
    }
  std::sort(pairs.begin(), pairs.end());

  if (pairs.empty())
    result.warnings.push_back("no image/truth pairs found; empty comparison table");

  std::vector<std::vector<MetricsReport>> per_image(pairs.size());
  std::vector<std::string> errors(pairs.size());

  auto process = [&](size_t idx) {
    const auto& [img_path, truth_path] = pairs[idx];
    const std::string image_id = img_path.stem().string();
    const fs::path image_out = fs::path(out_dir) / image_id;
    try {
      const GrayImage img = load_image(img_path.string());
      const BinaryMask truth = load_mask(truth_path.string());
      if (!truth.same_dims(img.width(), img.height()))
        throw Error(ErrorCode::DimensionMismatch,
                    image_id + ": truth dimensions differ from image");

      const PipelineResult pr =
          run_pipeline(img_path.string(), config, (image_out / "proposed").string());
      const BinaryMask* roi = pr.disk_mask ? &*pr.disk_mask : nullptr;

      auto score = [&](const std::string& method, const BinaryMask& mask,
                       double seconds) {
        MetricsReport rep = MetricsReport::from_matrix(confusion(mask, truth, roi),
                                                       method, image_id, seconds);
        const ConfusionMatrix full = confusion(mask, truth, nullptr);
        detail::atomic_write_text(
            fs::path(out_dir) / (image_id + "_" + method + ".json"),
            score_to_json(rep, full, roi != nullptr).dump(2) + "\n");
        per_image[idx].push_back(std::move(rep));
      };

      score("proposed_acwe", pr.final_mask, pr.total_wall_time_seconds);

      detail::StageClock clock;
      clock.start();
      auto [otsu_t, otsu_mask] = otsu_threshold(img, nullptr);
      BinaryMask otsu_post = filter_by_area(otsu_mask, config.post);
      score("otsu", otsu_post, clock.stop());

      clock.start();
      BinaryMask km = kmeans_segment(img, KMeansConfig{}, nullptr);
      BinaryMask km_post = filter_by_area(km, config.post);
      score("kmeans", km_post, clock.stop());
    } catch (const std::exception& e) {
      errors[idx] = image_id + ": " + e.what();
    }
  };

  const int n_workers = std::max(1, std::min<int>(threads, static_cast<int>(pairs.size())));
  if (n_workers <= 1 || pairs.size() <= 1) {
    for (size_t i = 0; i < pairs.size(); ++i) process(i);
  } else {
    std::vector<std::thread> workers;
    std::atomic<size_t> next{0};
    for (int t = 0; t < n_workers; ++t)
      workers.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < pairs.size(); i = next.fetch_add(1))
          process(i);
      });
    for (auto& w : workers) w.join();
  }

  std::vector<MetricsReport> all;
  for (size_t i = 0; i < pairs.size(); ++i) {
    if (!errors[i].empty()) {
      result.warnings.push_back(errors[i]);
      continue;
    }
    all.insert(all.end(), per_image[i].begin(), per_image[i].end());
    ++result.images_processed;
  }

  result.table = compare_methods(std::move(all));
  detail::atomic_write_text(fs::path(out_dir) / "comparison.csv", result.table.to_csv());
  detail::atomic_write_text(fs::path(out_dir) / "comparison.txt", result.table.to_text());
  return result;
}

}  // namespace sfd

#endif
