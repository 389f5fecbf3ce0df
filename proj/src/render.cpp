#include "gsr/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <system_error>
#include <variant>

#include "gsr/error.hpp"
#include "gsr/pitch.hpp"

namespace gsr {

using Eigen::Vector2d;

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

bool is_goal_frame(LineClass c) {
  switch (c) {
    case LineClass::goal_left_crossbar:
    case LineClass::goal_left_post_left:
    case LineClass::goal_left_post_right:
    case LineClass::goal_right_crossbar:
    case LineClass::goal_right_post_left:
    case LineClass::goal_right_post_right:
      return true;
    default:
      return false;
  }
}

const std::string& fill_for(const Attributes& a, const RenderStyle& s) {
  switch (a.role) {
    case Role::referee: return s.referee;
    case Role::other: return s.other;
    default: break;
  }
  if (!a.team) return s.no_team;
  return *a.team == Team::left ? s.left : s.right;
}

PitchPoint clamp_point(const PitchPoint& p, const RenderStyle& s, bool& clamped) {
  const double lx = pitch_dims::half_length + s.margin_m, ly = pitch_dims::half_width + s.margin_m;
  PitchPoint q{std::clamp(p.x, -lx, lx), std::clamp(p.y, -ly, ly)};
  clamped = q.x != p.x || q.y != p.y;
  return q;
}

std::string pitch_markup(const MinimapTransform& t, const RenderStyle& s) {
  std::string out;
  out += "<rect class=\"grass\" x=\"0\" y=\"0\" width=\"" + num(t.width()) + "\" height=\"" + num(t.height()) +
         "\" fill=\"" + s.grass + "\"/>\n";
  const Vector2d tl = t.to_document({-pitch_dims::half_length, -pitch_dims::half_width});
  out += "<rect class=\"outline\" x=\"" + num(tl.x()) + "\" y=\"" + num(tl.y()) + "\" width=\"" +
         num(pitch_dims::length * t.scale) + "\" height=\"" + num(pitch_dims::width * t.scale) +
         "\" fill=\"none\" stroke=\"" + s.lines + "\" stroke-width=\"" + num(0.12 * t.scale) + "\"/>\n";
  const PitchTemplate& pitch = default_pitch();
  out += "<g class=\"markings\" fill=\"none\" stroke=\"" + s.lines + "\" stroke-width=\"" + num(0.12 * t.scale) + "\">\n";
  for (LineClass c : all_line_classes()) {
    if (is_goal_frame(c)) continue;
    const Geometry& g = pitch.line_geometry(c);
    if (const auto* seg = std::get_if<Segment>(&g)) {
      const Vector2d a = t.to_document({seg->a.x(), seg->a.y()});
      const Vector2d b = t.to_document({seg->b.x(), seg->b.y()});
      out += "<line x1=\"" + num(a.x()) + "\" y1=\"" + num(a.y()) + "\" x2=\"" + num(b.x()) + "\" y2=\"" + num(b.y()) +
             "\"/>\n";
    } else {
      const auto& arc = std::get<CircleArc>(g);
      const Eigen::Vector3d p0 = arc.point_at(arc.start_angle), p1 = arc.point_at(arc.end_angle);
      const Vector2d a = t.to_document({p0.x(), p0.y()});
      const Vector2d b = t.to_document({p1.x(), p1.y()});
      const double r = arc.radius * t.scale;
      const double sweep = arc.end_angle - arc.start_angle;
      if (sweep >= 2 * M_PI - 1e-9) {
        const Vector2d c = t.to_document({arc.center.x(), arc.center.y()});
        out += "<circle cx=\"" + num(c.x()) + "\" cy=\"" + num(c.y()) + "\" r=\"" + num(r) + "\"/>\n";
      } else {
        // Angles grow from +X towards +Y, which is clockwise on screen (y down): sweep flag 1.
        out += "<path d=\"M " + num(a.x()) + " " + num(a.y()) + " A " + num(r) + " " + num(r) + " 0 " +
               (sweep > M_PI ? "1" : "0") + " 1 " + num(b.x()) + " " + num(b.y()) + "\"/>\n";
      }
    }
  }
  // Goals as shallow boxes behind the goal lines.
  for (double side : {-1.0, 1.0}) {
    const double x0 = side < 0 ? -pitch_dims::half_length - 2.0 : pitch_dims::half_length;
    const Vector2d a = t.to_document({x0, -pitch_dims::goal_width / 2});
    out += "<rect class=\"goal\" x=\"" + num(a.x()) + "\" y=\"" + num(a.y()) + "\" width=\"" + num(2.0 * t.scale) +
           "\" height=\"" + num(pitch_dims::goal_width * t.scale) + "\"/>\n";
  }
  out += "</g>\n";
  return out;
}

std::string marker_markup(const Detection& d, const MinimapTransform& t, const RenderStyle& s, bool hollow,
                          RenderStats& stats) {
  if (!d.pitch_point) {
    ++stats.skipped;
    return {};
  }
  bool clamped = false;
  const PitchPoint p = clamp_point(*d.pitch_point, s, clamped);
  if (clamped) ++stats.clamped;
  ++stats.markers;
  const Vector2d c = t.to_document(p);
  const std::string& color = fill_for(d.attributes, s);
  const double r = s.marker_radius_m * t.scale;
  std::string out;
  const std::string kind = hollow ? "pred" : "gt";
  const std::string role(to_string(d.attributes.role));
  if (d.attributes.role == Role::goalkeeper) {
    out += "<rect class=\"marker\" data-kind=\"" + kind + "\" data-role=\"" + role + "\" data-track=\"" + std::to_string(d.track_id) + "\" x=\"" +
           num(c.x() - r) + "\" y=\"" + num(c.y() - r) + "\" width=\"" + num(2 * r) + "\" height=\"" + num(2 * r) + "\"";
  } else {
    out += "<circle class=\"marker\" data-kind=\"" + kind + "\" data-role=\"" + role + "\" data-track=\"" +
           std::to_string(d.track_id) + "\" cx=\"" + num(c.x()) + "\" cy=\"" + num(c.y()) + "\" r=\"" + num(r) + "\"";
  }
  if (hollow) {
    out += " fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" + num(0.3 * t.scale) + "\"/>\n";
  } else {
    out += " fill=\"" + color + "\" stroke=\"#000000\" stroke-width=\"" + num(0.1 * t.scale) + "\"/>\n";
  }
  if (s.show_jersey && d.attributes.jersey && !hollow) {
    out += "<text class=\"jersey\" x=\"" + num(c.x()) + "\" y=\"" + num(c.y() + 0.4 * r) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"" + num(1.1 * r) + "\" fill=\"#ffffff\">" +
           std::to_string(*d.attributes.jersey) + "</text>\n";
  }
  return out;
}

std::string document(const MinimapTransform& t, const std::string& body) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         num(t.width()) + "\" height=\"" + num(t.height()) + "\" viewBox=\"0 0 " + num(t.width()) + " " +
         num(t.height()) + "\">\n" + body + "</svg>\n";
}

struct Rgb {
  unsigned char r, g, b;
};

Rgb parse_color(const std::string& hex) {
  unsigned v = 0;
  if (hex.size() == 7 && hex[0] == '#') std::sscanf(hex.c_str() + 1, "%06x", &v);
  return {static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
}

}  // namespace

Vector2d MinimapTransform::to_document(const PitchPoint& p) const {
  return {(margin_m + p.x + pitch_dims::half_length) * scale, (margin_m + p.y + pitch_dims::half_width) * scale};
}

PitchPoint MinimapTransform::to_pitch(const Vector2d& d) const {
  return {d.x() / scale - margin_m - pitch_dims::half_length, d.y() / scale - margin_m - pitch_dims::half_width};
}

double MinimapTransform::width() const { return (pitch_dims::length + 2 * margin_m) * scale; }
double MinimapTransform::height() const { return (pitch_dims::width + 2 * margin_m) * scale; }

std::string render_minimap_frame(const std::vector<Detection>& frame, const RenderStyle& style, RenderStats* stats) {
  const MinimapTransform t(style);
  RenderStats local;
  std::string body = pitch_markup(t, style);
  body += "<g class=\"athletes\">\n";
  for (const auto& d : frame) body += marker_markup(d, t, style, false, local);
  body += "</g>\n";
  if (stats) *stats += local;
  return document(t, body);
}

std::string render_overlay_frame(const std::vector<Detection>& gt, const std::vector<Detection>& pred,
                                 const RenderStyle& style, RenderStats* stats) {
  const MinimapTransform t(style);
  RenderStats local;
  std::string body = pitch_markup(t, style);
  body += "<g class=\"ground-truth\">\n";
  for (const auto& d : gt) body += marker_markup(d, t, style, false, local);
  body += "</g>\n<g class=\"predictions\">\n";
  for (const auto& d : pred) body += marker_markup(d, t, style, true, local);
  body += "</g>\n";
  if (stats) *stats += local;
  return document(t, body);
}

std::string rasterize_minimap_frame(const std::vector<Detection>& frame, const RenderStyle& style, RenderStats* stats) {
  const MinimapTransform t(style);
  const int w = static_cast<int>(std::lround(t.width()));
  const int h = static_cast<int>(std::lround(t.height()));
  std::vector<Rgb> px(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), parse_color(style.grass));
  const auto plot = [&](double x, double y, Rgb c) {
    const int ix = static_cast<int>(std::floor(x)), iy = static_cast<int>(std::floor(y));
    if (ix >= 0 && iy >= 0 && ix < w && iy < h) px[static_cast<std::size_t>(iy) * w + ix] = c;
  };
  const Rgb line = parse_color(style.lines);
  const PitchTemplate& pitch = default_pitch();
  for (LineClass c : all_line_classes()) {
    if (is_goal_frame(c)) continue;
    for (const auto& p : pitch.sample(c, 0.5 / style.scale)) {
      const Vector2d d = t.to_document({p.x(), p.y()});
      plot(d.x(), d.y(), line);
    }
  }
  RenderStats local;
  const double r = style.marker_radius_m * style.scale;
  for (const auto& d : frame) {
    if (!d.pitch_point) {
      ++local.skipped;
      continue;
    }
    bool clamped = false;
    const PitchPoint p = clamp_point(*d.pitch_point, style, clamped);
    if (clamped) ++local.clamped;
    ++local.markers;
    const Vector2d c = t.to_document(p);
    const Rgb color = parse_color(fill_for(d.attributes, style));
    for (int y = static_cast<int>(std::floor(c.y() - r)); y <= static_cast<int>(std::ceil(c.y() + r)); ++y) {
      for (int x = static_cast<int>(std::floor(c.x() - r)); x <= static_cast<int>(std::ceil(c.x() + r)); ++x) {
        if (std::hypot(x + 0.5 - c.x(), y + 0.5 - c.y()) <= r) plot(x, y, color);
      }
    }
  }
  if (stats) *stats += local;
  std::string out = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  out.reserve(out.size() + px.size() * 3);
  for (const auto& c : px) {
    out.push_back(static_cast<char>(c.r));
    out.push_back(static_cast<char>(c.g));
    out.push_back(static_cast<char>(c.b));
  }
  return out;
}

RenderStats render_sequence(const GameState& state, const std::string& directory, RenderFormat format,
                            const RenderStyle& style, const GameState* overlay) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec || !fs::is_directory(directory)) {
    throw Error(ErrorCode::io, "cannot create output directory '" + directory + "'" + (ec ? ": " + ec.message() : ""));
  }
  RenderStats stats;
  static const std::vector<Detection> none;
  for (int f = 1; f <= state.num_frames(); ++f) {
    char name[32];
    std::snprintf(name, sizeof name, "%06d.%s", f, format == RenderFormat::svg ? "svg" : "ppm");
    std::string content;
    if (format == RenderFormat::ppm) {
      content = rasterize_minimap_frame(state.frame(f), style, &stats);
    } else if (overlay) {
      content = render_overlay_frame(state.frame(f), f <= overlay->num_frames() ? overlay->frame(f) : none, style, &stats);
    } else {
      content = render_minimap_frame(state.frame(f), style, &stats);
    }
    const fs::path path = fs::path(directory) / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw Error(ErrorCode::io, "cannot write '" + path.string() + "'");
  }
  return stats;
}

}  // namespace gsr
