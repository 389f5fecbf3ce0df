#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gsr/types.hpp"

namespace gsr {

struct RenderStyle {
  double scale = 8.0;     // document units per meter
  double margin_m = 4.0;  // border around the pitch, meters
  double marker_radius_m = 1.0;
  bool show_jersey = true;
  std::string grass = "#3a7d44";
  std::string lines = "#ffffff";
  std::string left = "#d62728";
  std::string right = "#1f77b4";
  std::string referee = "#ffd700";
  std::string other = "#7f7f7f";
  std::string no_team = "#bbbbbb";
};

// Pitch meters to document units: u = (margin + X + 52.5) * scale,
// v = (margin + Y + 34) * scale.
struct MinimapTransform {
  double scale = 8.0;
  double margin_m = 4.0;

  explicit MinimapTransform(const RenderStyle& s) : scale(s.scale), margin_m(s.margin_m) {}
  Eigen::Vector2d to_document(const PitchPoint& p) const;
  PitchPoint to_pitch(const Eigen::Vector2d& d) const;
  double width() const;
  double height() const;
};

struct RenderStats {
  std::size_t markers = 0;
  std::size_t clamped = 0;
  std::size_t skipped = 0;  // no pitch point

  RenderStats& operator+=(const RenderStats& o) {
    markers += o.markers;
    clamped += o.clamped;
    skipped += o.skipped;
    return *this;
  }
};

// SVG minimap of one frame. Every marker element carries class="marker".
std::string render_minimap_frame(const std::vector<Detection>& frame, const RenderStyle& style = {},
                                 RenderStats* stats = nullptr);
// GT drawn as filled discs, predictions as hollow rings on top.
std::string render_overlay_frame(const std::vector<Detection>& gt, const std::vector<Detection>& pred,
                                 const RenderStyle& style = {}, RenderStats* stats = nullptr);

enum class RenderFormat { svg, ppm };

// Binary PPM raster of the same minimap.
std::string rasterize_minimap_frame(const std::vector<Detection>& frame, const RenderStyle& style = {},
                                    RenderStats* stats = nullptr);

// Writes 000001.<ext> ... one per frame, creating `directory` when needed.
// `overlay` (predictions) is drawn on top when given. Throws Error(io).
RenderStats render_sequence(const GameState& state, const std::string& directory, RenderFormat format,
                            const RenderStyle& style = {}, const GameState* overlay = nullptr);

}  // namespace gsr
