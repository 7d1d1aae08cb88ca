#ifndef SFD_CONFIG_JSON_HPP
#define SFD_CONFIG_JSON_HPP

#include <string>

#include <json.hpp>

#include "sfd/acwe.hpp"
#include "sfd/error.hpp"
#include "sfd/postprocess.hpp"
#include "sfd/preprocess.hpp"
#include "sfd/synth.hpp"

namespace sfd {

/// Every numeric knob of every stage. All JSON fields are omissible and
/// default to the values below.
struct PipelineConfig {
  InpaintConfig inpaint;
  AcweConfig acwe;
  PostprocessConfig post;
  bool use_disk_mask = true;
  bool emit_intermediates = false;
  double disk_threshold_fraction = 0.5;

  void validate() const {
    inpaint.validate();
    acwe.validate();
    if (!(disk_threshold_fraction > 0.0 && disk_threshold_fraction < 1.0))
      throw Error(ErrorCode::InvalidArgument, "disk_threshold_fraction must be in (0,1)");
  }
};

inline std::string to_string(InitScheme s) {
  return s == InitScheme::Checkerboard ? "checkerboard" : "circle";
}

inline InitScheme init_scheme_from_string(const std::string& s) {
  if (s == "checkerboard") return InitScheme::Checkerboard;
  if (s == "circle") return InitScheme::Circle;
  throw Error(ErrorCode::InvalidArgument, "unknown init scheme '" + s + "'");
}

inline void to_json(nlohmann::json& j, const InpaintConfig& c) {
  j = {{"dt", c.dt},
       {"iterations", c.iterations},
       {"white_patch_percentile", c.white_patch_percentile},
       {"dilation_radius", c.dilation_radius}};
}

inline void from_json(const nlohmann::json& j, InpaintConfig& c) {
  c.dt = j.value("dt", c.dt);
  c.iterations = j.value("iterations", c.iterations);
  c.white_patch_percentile = j.value("white_patch_percentile", c.white_patch_percentile);
  c.dilation_radius = j.value("dilation_radius", c.dilation_radius);
}

inline void to_json(nlohmann::json& j, const AcweConfig& c) {
  j = {{"mu", c.mu},
       {"nu", c.nu},
       {"lambda1", c.lambda1},
       {"lambda2", c.lambda2},
       {"dt", c.dt},
       {"epsilon", c.epsilon},
       {"max_iters", c.max_iters},
       {"tol", c.tol},
       {"init", to_string(c.init)},
       {"normalize_input", c.normalize_input}};
}

inline void from_json(const nlohmann::json& j, AcweConfig& c) {
  c.mu = j.value("mu", c.mu);
  c.nu = j.value("nu", c.nu);
  c.lambda1 = j.value("lambda1", c.lambda1);
  c.lambda2 = j.value("lambda2", c.lambda2);
  c.dt = j.value("dt", c.dt);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.max_iters = j.value("max_iters", c.max_iters);
  c.tol = j.value("tol", c.tol);
  if (j.contains("init")) c.init = init_scheme_from_string(j.at("init").get<std::string>());
  c.normalize_input = j.value("normalize_input", c.normalize_input);
}

inline void to_json(nlohmann::json& j, const PostprocessConfig& c) {
  j = {{"min_area", c.min_area}};
}

inline void from_json(const nlohmann::json& j, PostprocessConfig& c) {
  c.min_area = j.value("min_area", c.min_area);
}

inline void to_json(nlohmann::json& j, const PipelineConfig& c) {
  j = {{"inpaint", c.inpaint},
       {"acwe", c.acwe},
       {"post", c.post},
       {"use_disk_mask", c.use_disk_mask},
       {"emit_intermediates", c.emit_intermediates},
       {"disk_threshold_fraction", c.disk_threshold_fraction}};
}

inline void from_json(const nlohmann::json& j, PipelineConfig& c) {
  if (j.contains("inpaint")) j.at("inpaint").get_to(c.inpaint);
  if (j.contains("acwe")) j.at("acwe").get_to(c.acwe);
  if (j.contains("post")) j.at("post").get_to(c.post);
  c.use_disk_mask = j.value("use_disk_mask", c.use_disk_mask);
  c.emit_intermediates = j.value("emit_intermediates", c.emit_intermediates);
  c.disk_threshold_fraction = j.value("disk_threshold_fraction", c.disk_threshold_fraction);
}

inline void to_json(nlohmann::json& j, const SynthSpec& s) {
  j = {{"size", s.size},
       {"disk_radius_fraction", s.disk_radius_fraction},
       {"background_level", s.background_level},
       {"disk_level", s.disk_level},
       {"filament_level", s.filament_level},
       {"patch_level", s.patch_level},
       {"n_filaments", s.n_filaments},
       {"n_patches", s.n_patches},
       {"noise_sigma", s.noise_sigma},
       {"seed", s.seed}};
}

inline void from_json(const nlohmann::json& j, SynthSpec& s) {
  s.size = j.value("size", s.size);
  s.disk_radius_fraction = j.value("disk_radius_fraction", s.disk_radius_fraction);
  s.background_level = j.value("background_level", s.background_level);
  s.disk_level = j.value("disk_level", s.disk_level);
  s.filament_level = j.value("filament_level", s.filament_level);
  s.patch_level = j.value("patch_level", s.patch_level);
  s.n_filaments = j.value("n_filaments", s.n_filaments);
  s.n_patches = j.value("n_patches", s.n_patches);
  s.noise_sigma = j.value("noise_sigma", s.noise_sigma);
  s.seed = j.value("seed", s.seed);
}

}  // namespace sfd

#endif
