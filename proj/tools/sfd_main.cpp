// sfd: solar filament detection toolkit
//
// Subcommands cover the individual stages (preprocess, segment, baseline,
// postprocess), the evaluation harness (evaluate, compare, experiment), the
// end-to-end pipeline, and the synthetic-case generator (synth).
//
// Exit codes: 0 success, 1 usage error, 2 stage failure, 3 evaluation
// dimension mismatch.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <sfd/sfd.hpp>

namespace {

struct GlobalOpts {
  std::string config_path;
  int threads = 1;
  bool verbose = false;
};

sfd::PipelineConfig config_or_default(const GlobalOpts& g) {
  if (g.config_path.empty()) return {};
  return sfd::load_pipeline_config(g.config_path);
}

void chat(const GlobalOpts& g, const std::string& msg) {
  if (g.verbose) std::cerr << msg << "\n";
}

std::optional<sfd::BinaryMask> load_optional_mask(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return sfd::load_mask(path);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sfd::Error(sfd::ErrorCode::UnwritablePath, "cannot write " + path);
  out << text;
}

// ---------------------------------------------------------------------------

int cmd_preprocess(const GlobalOpts& g, const std::string& in, const std::string& out,
                   const std::string& save_mask_path, const sfd::InpaintConfig& icfg,
                   bool use_disk, double disk_threshold) {
  const sfd::GrayImage img = sfd::load_image(in);

  std::optional<sfd::BinaryMask> disk;
  if (use_disk) {
    disk = sfd::detect_disk(img, disk_threshold).second;
    chat(g, "disk detected");
  }
  const sfd::BinaryMask omega =
      sfd::build_white_patch_mask(img, icfg, disk ? &*disk : nullptr);
  if (!save_mask_path.empty()) sfd::save_mask(omega, save_mask_path);
  chat(g, "inpainting " + std::to_string(omega.count()) + " pixels");

  const sfd::GrayImage inpainted = sfd::inpaint(img, omega, icfg);
  const auto [logimg, params] = sfd::log_transform(inpainted);
  const sfd::GrayImage sharpened = sfd::sharpen(logimg);
  sfd::save_image(sharpened, out);
  chat(g, "wrote " + out);
  return 0;
}

int cmd_segment(const GlobalOpts& g, const std::string& in, const std::string& out,
                const std::string& roi_path, const std::string& trace_path,
                bool raw_mask, const sfd::AcweConfig& acfg) {
  const sfd::GrayImage img = sfd::load_image(in);
  const auto roi = load_optional_mask(roi_path);

  struct TraceRow {
    int iteration;
    double energy;
    double delta;
  };
  std::vector<TraceRow> rows;
  sfd::EvolveObserver observer;
  if (!trace_path.empty())
    observer = [&rows](const sfd::EvolveIterationInfo& info) {
      rows.push_back({info.iteration, info.energy, info.mean_abs_delta});
    };

  const sfd::AcweResult res = sfd::evolve(img, acfg, roi ? &*roi : nullptr, observer);

  if (!trace_path.empty()) {
    std::ostringstream os;
    os << "iteration,energy,delta\n" << std::setprecision(17);
    os << 0 << ',' << res.energy_trace[0] << ',' << 0.0 << '\n';
    for (const auto& r : rows) os << r.iteration << ',' << r.energy << ',' << r.delta << '\n';
    write_text(trace_path, os.str());
  }

  chat(g, "evolve ran " + std::to_string(res.iterations_run) + " iterations, " +
              (res.converged ? "converged" : "hit the cap"));
  sfd::save_mask(raw_mask ? res.mask : sfd::filament_mask(res, img), out);
  return 0;
}

int cmd_baseline(const std::string& method, const std::string& in, const std::string& out,
                 const std::string& roi_path, int k) {
  const sfd::GrayImage img = sfd::load_image(in);
  const auto roi = load_optional_mask(roi_path);
  sfd::BinaryMask mask;
  if (method == "otsu") {
    mask = sfd::otsu_threshold(img, roi ? &*roi : nullptr).second;
  } else if (method == "kmeans") {
    sfd::KMeansConfig cfg;
    cfg.k = k;
    mask = sfd::kmeans_segment(img, cfg, roi ? &*roi : nullptr);
  } else {
    throw CLI::ValidationError("--method must be otsu or kmeans");
  }
  sfd::save_mask(mask, out);
  return 0;
}

int cmd_postprocess(const std::string& in, const std::string& out, size_t min_area,
                    const std::string& report_path) {
  const sfd::BinaryMask mask = sfd::load_mask(in);
  sfd::PostprocessConfig cfg;
  cfg.min_area = min_area;
  const sfd::BinaryMask filtered = sfd::filter_by_area(mask, cfg);
  sfd::save_mask(filtered, out);

  if (!report_path.empty()) {
    std::ostringstream os;
    os << "label,area,min_x,min_y,max_x,max_y,centroid_x,centroid_y\n"
       << std::setprecision(10);
    for (const auto& s : sfd::component_stats(sfd::label_components(filtered)))
      os << s.label << ',' << s.area << ',' << s.min_x << ',' << s.min_y << ','
         << s.max_x << ',' << s.max_y << ',' << s.centroid_x << ',' << s.centroid_y
         << '\n';
    write_text(report_path, os.str());
  }
  return 0;
}

int cmd_evaluate(const std::string& pred_path, const std::string& truth_path,
                 const std::string& roi_path, const std::string& out,
                 const std::string& method, const std::string& image_id,
                 double wall_time) {
  const sfd::BinaryMask pred = sfd::load_mask(pred_path);
  const sfd::BinaryMask truth = sfd::load_mask(truth_path);
  const auto roi = load_optional_mask(roi_path);

  const sfd::ConfusionMatrix primary = sfd::confusion(pred, truth, roi ? &*roi : nullptr);
  const sfd::ConfusionMatrix full = sfd::confusion(pred, truth, nullptr);
  const auto report = sfd::MetricsReport::from_matrix(primary, method, image_id, wall_time);
  write_text(out, sfd::score_to_json(report, full, roi.has_value()).dump(2) + "\n");
  return 0;
}

int cmd_compare(const std::vector<std::string>& report_paths, const std::string& out) {
  std::vector<sfd::MetricsReport> reports;
  for (const auto& path : report_paths) {
    std::ifstream in(path);
    if (!in)
      throw sfd::Error(sfd::ErrorCode::FileNotReadable, "cannot open " + path);
    nlohmann::json j;
    in >> j;
    sfd::ConfusionMatrix m{j.at("tp").get<int64_t>(), j.at("fp").get<int64_t>(),
                           j.at("tn").get<int64_t>(), j.at("fn").get<int64_t>()};
    reports.push_back(sfd::MetricsReport::from_matrix(
        m, j.value("method", "unknown"), j.value("image_id", ""),
        j.value("wall_time_seconds", 0.0)));
  }
  const sfd::ComparisonTable table = sfd::compare_methods(std::move(reports));
  write_text(out, table.to_csv());
  std::cout << table.to_text();
  return 0;
}

int cmd_pipeline(const GlobalOpts& g, const std::string& in, const std::string& out_dir,
                 bool emit_intermediates) {
  sfd::PipelineConfig cfg = config_or_default(g);
  if (emit_intermediates) cfg.emit_intermediates = true;
  const sfd::PipelineResult res = sfd::run_pipeline(in, cfg, out_dir);
  chat(g, "pipeline finished in " + std::to_string(res.total_wall_time_seconds) + " s");
  return 0;
}

int cmd_experiment(const GlobalOpts& g, const std::string& images,
                   const std::string& truth, const std::string& out_dir) {
  const sfd::ExperimentResult res =
      sfd::run_experiment(images, truth, config_or_default(g), out_dir, g.threads);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << res.table.to_text();
  return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir) {
  sfd::SynthSpec spec;
  if (!spec_path.empty()) {
    std::ifstream in(spec_path);
    if (!in)
      throw sfd::Error(sfd::ErrorCode::FileNotReadable, "cannot open " + spec_path);
    nlohmann::json j;
    in >> j;
    spec = j.get<sfd::SynthSpec>();
  }
  const sfd::SynthCase c = sfd::generate(spec);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path out(out_dir);
  sfd::save_image(c.image, (out / "image.png").string());
  sfd::save_mask(c.truth, (out / "truth.pgm").string());
  sfd::save_mask(c.disk, (out / "disk.pgm").string());
  sfd::save_mask(c.patches, (out / "patches.pgm").string());
  write_text((out / "spec.json").string(), nlohmann::json(spec).dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sfd: solar filament detection in full-disk images"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "pipeline configuration JSON (or a run.json)");
  app.add_option("--threads", g.threads, "worker threads for experiment")
      ->check(CLI::PositiveNumber);
  app.add_flag("--verbose", g.verbose, "progress output on stderr");

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "inpaint bright patches, log-enhance, sharpen");
  std::string pre_in, pre_out, pre_save_mask;
  sfd::InpaintConfig pre_cfg;
  bool pre_use_disk = true;
  double pre_disk_threshold = 0.5;
  pre->add_option("--in", pre_in, "input image")->required();
  pre->add_option("--out", pre_out, "output image")->required();
  pre->add_option("--save-mask", pre_save_mask, "write the inpaint region mask here");
  pre->add_option("--dt", pre_cfg.dt, "inpaint time step");
  pre->add_option("--iterations", pre_cfg.iterations, "inpaint iterations");
  pre->add_option("--white-patch-percentile", pre_cfg.white_patch_percentile,
                  "intensity quantile defining white patches");
  pre->add_option("--dilation-radius", pre_cfg.dilation_radius, "patch mask dilation");
  pre->add_flag("--use-disk,!--no-use-disk", pre_use_disk,
                "restrict the patch quantile to the detected disk");
  pre->add_option("--disk-threshold", pre_disk_threshold, "disk detection threshold fraction");

  // segment
  auto* seg = app.add_subcommand("segment", "active-contours segmentation");
  std::string seg_in, seg_out, seg_roi, seg_trace;
  bool seg_raw = false;
  seg->add_option("--in", seg_in, "input image")->required();
  seg->add_option("--out", seg_out, "output mask")->required();
  seg->add_option("--roi", seg_roi, "region-of-interest mask");
  seg->add_option("--trace", seg_trace, "per-iteration energy/delta CSV");
  seg->add_flag("--raw", seg_raw, "emit the inside region instead of the dark region");

  // baseline
  auto* base = app.add_subcommand("baseline", "classical segmentation baselines");
  std::string base_method, base_in, base_out, base_roi;
  int base_k = 2;
  base->add_option("--method", base_method, "otsu or kmeans")->required();
  base->add_option("--in", base_in, "input image")->required();
  base->add_option("--out", base_out, "output mask")->required();
  base->add_option("--roi", base_roi, "region-of-interest mask");
  base->add_option("--k", base_k, "cluster count for kmeans");

  // postprocess
  auto* post = app.add_subcommand("postprocess", "area-filter a mask");
  std::string post_in, post_out, post_report;
  size_t post_min_area = 50;
  post->add_option("--in", post_in, "input mask")->required();
  post->add_option("--out", post_out, "output mask")->required();
  post->add_option("--min-area", post_min_area, "minimum component area in pixels");
  post->add_option("--report", post_report, "per-component CSV report");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "score a mask against ground truth");
  std::string eval_pred, eval_truth, eval_roi, eval_out, eval_method = "unknown",
              eval_image;
  double eval_wall = 0.0;
  eval->add_option("--pred", eval_pred, "predicted mask")->required();
  eval->add_option("--truth", eval_truth, "ground-truth mask")->required();
  eval->add_option("--roi", eval_roi, "score only inside this mask");
  eval->add_option("--out", eval_out, "report JSON")->required();
  eval->add_option("--method-name", eval_method, "method label for the report");
  eval->add_option("--image-id", eval_image, "image label for the report");
  eval->add_option("--wall-time", eval_wall, "seconds to record in the report");

  // compare
  auto* cmp = app.add_subcommand("compare", "merge report JSONs into a comparison table");
  std::vector<std::string> cmp_reports;
  std::string cmp_out;
  cmp->add_option("--reports", cmp_reports, "report JSON files")->required()->expected(-1);
  cmp->add_option("--out", cmp_out, "comparison CSV")->required();

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "full detection pipeline");
  std::string pipe_in, pipe_out_dir;
  bool pipe_emit = false;
  pipe->add_option("--in", pipe_in, "input image")->required();
  pipe->add_option("--out-dir", pipe_out_dir, "artifact directory")->required();
  pipe->add_flag("--emit-intermediates", pipe_emit, "write per-stage artifacts");

  // experiment
  auto* exp = app.add_subcommand("experiment", "pipeline + baselines over a directory");
  std::string exp_images, exp_truth, exp_out_dir;
  exp->add_option("--images", exp_images, "image directory")->required();
  exp->add_option("--truth", exp_truth, "ground-truth directory")->required();
  exp->add_option("--out-dir", exp_out_dir, "artifact directory")->required();

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic case");
  std::string synth_spec, synth_out_dir;
  synth->add_option("--spec", synth_spec, "generator spec JSON");
  synth->add_option("--out-dir", synth_out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    const sfd::PipelineConfig cfg = config_or_default(g);
    if (pre->parsed())
      return cmd_preprocess(g, pre_in, pre_out, pre_save_mask,
                            pre->count("--dt") || pre->count("--iterations") ||
                                    pre->count("--white-patch-percentile") ||
                                    pre->count("--dilation-radius")
                                ? pre_cfg
                                : cfg.inpaint,
                            pre_use_disk, pre_disk_threshold);
    if (seg->parsed())
      return cmd_segment(g, seg_in, seg_out, seg_roi, seg_trace, seg_raw, cfg.acwe);
    if (base->parsed()) return cmd_baseline(base_method, base_in, base_out, base_roi, base_k);
    if (post->parsed()) {
      const size_t min_area = post->count("--min-area") ? post_min_area : cfg.post.min_area;
      return cmd_postprocess(post_in, post_out, min_area, post_report);
    }
    if (eval->parsed())
      return cmd_evaluate(eval_pred, eval_truth, eval_roi, eval_out, eval_method,
                          eval_image, eval_wall);
    if (cmp->parsed()) return cmd_compare(cmp_reports, cmp_out);
    if (pipe->parsed()) return cmd_pipeline(g, pipe_in, pipe_out_dir, pipe_emit);
    if (exp->parsed()) return cmd_experiment(g, exp_images, exp_truth, exp_out_dir);
    if (synth->parsed()) return cmd_synth(synth_spec, synth_out_dir);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const sfd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (eval->parsed() && e.code() == sfd::ErrorCode::DimensionMismatch) return 3;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
