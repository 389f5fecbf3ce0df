#include "gsr/annotations.hpp"

#include <cctype>
#include <cmath>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "gsr/error.hpp"
#include "gsr/predictions.hpp"

namespace gsr {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::schema, where + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) schema_error(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) schema_error(where, std::string("missing required field '") + key + "'");
  return *it;
}

double number_of(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      std::size_t used = 0;
      const std::string s = v.get<std::string>();
      const double d = std::stod(s, &used);
      if (used == s.size()) return d;
    } catch (const std::exception&) {
    }
  }
  schema_error(where, "expected a number");
}

std::string string_of(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

bool flag(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return true;
  if (!it->is_boolean()) schema_error(key, "expected a boolean");
  return it->get<bool>();
}

// Frame number encoded in the image file name ("000001.jpg" -> 1).
std::optional<int> frame_from_file_name(const std::string& name) {
  std::string digits;
  for (char c : name) {
    if (c == '.') break;
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    digits += c;
  }
  if (digits.empty()) return std::nullopt;
  return std::stoi(digits);
}

std::vector<IgnoreRegion> parse_ignore_regions(const json& image) {
  std::vector<IgnoreRegion> regions;
  auto xs = image.find("ignore_regions_x");
  auto ys = image.find("ignore_regions_y");
  if (xs == image.end() || ys == image.end() || xs->is_null() || ys->is_null()) return regions;
  if (!xs->is_array() || !ys->is_array() || xs->size() != ys->size()) {
    schema_error("ignore_regions", "x and y must be arrays of equal length");
  }
  if (xs->empty()) return regions;
  const auto to_vec = [](const json& arr) {
    std::vector<double> out;
    for (const auto& v : arr) out.push_back(number_of(v, "ignore_regions"));
    return out;
  };
  if ((*xs)[0].is_array()) {
    for (std::size_t i = 0; i < xs->size(); ++i) {
      IgnoreRegion r{to_vec((*xs)[i]), to_vec((*ys)[i])};
      if (r.x.size() != r.y.size()) schema_error("ignore_regions", "polygon coordinate count mismatch");
      regions.push_back(std::move(r));
    }
  } else {
    regions.push_back({to_vec(*xs), to_vec(*ys)});
  }
  return regions;
}

std::optional<PitchPoint> bottom_point(const json& bp, const char* kx, const char* ky) {
  auto x = bp.find(kx);
  auto y = bp.find(ky);
  if (x == bp.end() || y == bp.end() || x->is_null() || y->is_null()) return std::nullopt;
  return PitchPoint{number_of(*x, kx), number_of(*y, ky)};
}

Attributes parse_attributes(const json& attrs, const std::string& where) {
  Attributes a;
  a.role = parse_role(require(attrs, "role", where).get<std::string>());
  if (auto t = attrs.find("team"); t != attrs.end() && !t->is_null()) {
    a.team = parse_team(t->get<std::string>());
  }
  if (auto j = attrs.find("jersey"); j != attrs.end() && !j->is_null()) {
    a.jersey = parse_jersey(j->is_string() ? j->get<std::string>() : j->dump());
  }
  // Team and jersey carry no meaning for non-player roles.
  if (!carries_team(a.role)) {
    a.team.reset();
    a.jersey.reset();
  }
  return a;
}

}  // namespace

bool IgnoreRegion::contains(double px, double py) const {
  bool inside = false;
  const std::size_t n = x.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if (((y[i] > py) != (y[j] > py)) && (px < (x[j] - x[i]) * (py - y[i]) / (y[j] - y[i]) + x[i])) {
      inside = !inside;
    }
  }
  return inside;
}

int SequenceRecord::image_width() const { return images.empty() ? 1920 : images.front().width; }
int SequenceRecord::image_height() const { return images.empty() ? 1080 : images.front().height; }

const ImageInfo* SequenceRecord::image_for_frame(int frame) const {
  for (const auto& im : images) {
    if (im.frame == frame) return &im;
  }
  return nullptr;
}

const PitchAnnotation* SequenceRecord::pitch_for_frame(int frame) const {
  for (const auto& p : pitch) {
    if (p.frame == frame) return &p;
  }
  return nullptr;
}

SequenceRecord parse_sequence(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse, std::string("malformed annotation document: ") + e.what());
  }
  if (!doc.is_object()) schema_error("document", "expected a top-level object");

  SequenceRecord seq;
  try {
    const json& info = require(doc, "info", "document");
    seq.info.name = string_of(require(info, "name", "info"));
    seq.info.seq_length = static_cast<int>(number_of(require(info, "seq_length", "info"), "info.seq_length"));
    seq.info.frame_rate = number_of(require(info, "frame_rate", "info"), "info.frame_rate");
    if (seq.info.seq_length <= 0) schema_error("info", "seq_length must be positive");
    if (!(seq.info.frame_rate > 0)) schema_error("info", "frame_rate must be positive");
    for (const auto& [key, value] : info.items()) {
      if (key == "name" || key == "seq_length" || key == "frame_rate") continue;
      if (key == "im_dir") seq.info.im_dir = string_of(value);
      else if (key == "im_ext") seq.info.im_ext = string_of(value);
      else if (!value.is_null() && !value.is_structured()) seq.info.extra[key] = string_of(value);
    }

    std::unordered_map<std::string, int> frame_of_image;
    if (auto images = doc.find("images"); images != doc.end() && !images->is_null()) {
      if (!images->is_array()) schema_error("images", "expected an array");
      for (std::size_t i = 0; i < images->size(); ++i) {
        const json& im = (*images)[i];
        const std::string where = "images[" + std::to_string(i) + "]";
        ImageInfo info_im;
        info_im.image_id = string_of(require(im, "image_id", where));
        if (auto f = im.find("file_name"); f != im.end() && !f->is_null()) info_im.file_name = string_of(*f);
        info_im.frame = frame_from_file_name(info_im.file_name).value_or(static_cast<int>(i) + 1);
        info_im.width = static_cast<int>(number_of(require(im, "width", where), where + ".width"));
        info_im.height = static_cast<int>(number_of(require(im, "height", where), where + ".height"));
        info_im.is_labeled = flag(im, "is_labeled");
        info_im.has_labeled_person = flag(im, "has_labeled_person");
        info_im.has_labeled_pitch = flag(im, "has_labeled_pitch");
        info_im.has_labeled_camera = flag(im, "has_labeled_camera");
        info_im.ignore_regions = parse_ignore_regions(im);
        if (info_im.frame < 1 || info_im.frame > seq.info.seq_length) {
          schema_error(where, "frame index " + std::to_string(info_im.frame) + " outside [1, seq_length]");
        }
        frame_of_image[info_im.image_id] = info_im.frame;
        seq.images.push_back(std::move(info_im));
      }
    }

    auto frame_for = [&](const std::string& image_id, const std::string& where) {
      auto it = frame_of_image.find(image_id);
      if (it == frame_of_image.end()) schema_error(where, "unknown image_id '" + image_id + "'");
      return it->second;
    };

    if (auto anns = doc.find("annotations"); anns != doc.end() && !anns->is_null()) {
      if (!anns->is_array()) schema_error("annotations", "expected an array");
      for (std::size_t i = 0; i < anns->size(); ++i) {
        const json& a = (*anns)[i];
        const std::string where = "annotations[" + std::to_string(i) + "]";
        if (!a.is_object()) schema_error(where, "expected an object");
        const std::string super = a.value("supercategory", std::string("object"));
        const int category = static_cast<int>(number_of(a.value("category_id", json(1)), where + ".category_id"));

        if (super == "pitch") {
          PitchAnnotation p;
          p.id = string_of(require(a, "id", where));
          p.image_id = string_of(require(a, "image_id", where));
          p.frame = frame_for(p.image_id, where);
          const json& lines = require(a, "lines", where);
          if (!lines.is_object()) schema_error(where, "lines must be an object");
          for (const auto& [name, pts] : lines.items()) {
            auto cls = try_parse_line_class(name);
            if (!cls) continue;
            if (!pts.is_array()) schema_error(where, "polyline '" + name + "' must be an array");
            NormalizedPolyline poly;
            for (const auto& pt : pts) {
              poly.push_back({number_of(require(pt, "x", where), where), number_of(require(pt, "y", where), where)});
            }
            p.lines[*cls] = std::move(poly);
          }
          seq.pitch.push_back(std::move(p));
          continue;
        }
        if (super != "object") continue;

        const json& attrs = require(a, "attributes", where);
        if (auto r = attrs.find("role"); category == 4 || (r != attrs.end() && r->is_string() && *r == "ball")) {
          continue;  // balls are never evaluated
        }

        AthleteAnnotation ann;
        ann.id = string_of(require(a, "id", where));
        ann.image_id = string_of(require(a, "image_id", where));
        ann.category_id = category;
        Detection& det = ann.detection;
        det.frame = frame_for(ann.image_id, where);
        det.track_id = static_cast<TrackId>(number_of(require(a, "track_id", where), where + ".track_id"));
        det.attributes = parse_attributes(attrs, where + ".attributes");

        const json& bb = require(a, "bbox_image", where);
        BBox box{number_of(require(bb, "x", where), where), number_of(require(bb, "y", where), where),
                 number_of(require(bb, "w", where), where), number_of(require(bb, "h", where), where)};
        if (!(box.w > 0) || !(box.h > 0)) schema_error(where, "bbox_image must have positive w and h");
        det.bbox_image = box;
        if (auto xc = bb.find("x_center"); xc != bb.end() && !xc->is_null()) ann.x_center = number_of(*xc, where);
        if (auto yc = bb.find("y_center"); yc != bb.end() && !yc->is_null()) ann.y_center = number_of(*yc, where);

        if (auto bp = a.find("bbox_pitch"); bp != a.end() && bp->is_object()) {
          PitchBottom bottom;
          bottom.left = bottom_point(*bp, "x_bottom_left", "y_bottom_left");
          bottom.right = bottom_point(*bp, "x_bottom_right", "y_bottom_right");
          bottom.middle = bottom_point(*bp, "x_bottom_middle", "y_bottom_middle");
          det.pitch_point = bottom.middle;
          ann.bbox_pitch = bottom;
        }
        seq.athletes.push_back(std::move(ann));
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::schema, std::string("annotation document: ") + e.what());
  }
  return seq;
}

std::string serialize_sequence(const SequenceRecord& seq) {
  ordered_json doc;
  ordered_json info;
  for (const auto& [k, v] : seq.info.extra) info[k] = v;
  info["name"] = seq.info.name;
  if (!seq.info.im_dir.empty()) info["im_dir"] = seq.info.im_dir;
  info["frame_rate"] = seq.info.frame_rate;
  info["seq_length"] = seq.info.seq_length;
  if (!seq.info.im_ext.empty()) info["im_ext"] = seq.info.im_ext;
  doc["info"] = info;

  ordered_json images = ordered_json::array();
  for (const auto& im : seq.images) {
    ordered_json j;
    j["is_labeled"] = im.is_labeled;
    j["image_id"] = im.image_id;
    j["file_name"] = im.file_name;
    j["height"] = im.height;
    j["width"] = im.width;
    j["has_labeled_person"] = im.has_labeled_person;
    j["has_labeled_pitch"] = im.has_labeled_pitch;
    j["has_labeled_camera"] = im.has_labeled_camera;
    ordered_json ry = ordered_json::array();
    ordered_json rx = ordered_json::array();
    for (const auto& r : im.ignore_regions) {
      ry.push_back(r.y);
      rx.push_back(r.x);
    }
    j["ignore_regions_y"] = ry;
    j["ignore_regions_x"] = rx;
    images.push_back(std::move(j));
  }
  doc["images"] = images;

  ordered_json anns = ordered_json::array();
  for (const auto& a : seq.athletes) {
    const Detection& d = a.detection;
    ordered_json j;
    j["id"] = a.id;
    j["image_id"] = a.image_id;
    j["track_id"] = d.track_id;
    j["supercategory"] = "object";
    j["category_id"] = a.category_id;
    ordered_json attrs;
    attrs["role"] = std::string(to_string(d.attributes.role));
    attrs["jersey"] = d.attributes.jersey ? ordered_json(std::to_string(*d.attributes.jersey)) : ordered_json();
    attrs["team"] = d.attributes.team ? ordered_json(std::string(to_string(*d.attributes.team))) : ordered_json();
    j["attributes"] = attrs;
    if (d.bbox_image) {
      ordered_json bb;
      bb["x"] = d.bbox_image->x;
      bb["y"] = d.bbox_image->y;
      if (a.x_center) bb["x_center"] = *a.x_center;
      if (a.y_center) bb["y_center"] = *a.y_center;
      bb["w"] = d.bbox_image->w;
      bb["h"] = d.bbox_image->h;
      j["bbox_image"] = bb;
    }
    if (a.bbox_pitch) {
      ordered_json bp;
      const auto put = [&](const std::optional<PitchPoint>& p, const char* kx, const char* ky) {
        if (!p) return;
        bp[kx] = p->x;
        bp[ky] = p->y;
      };
      put(a.bbox_pitch->left, "x_bottom_left", "y_bottom_left");
      put(a.bbox_pitch->right, "x_bottom_right", "y_bottom_right");
      put(a.bbox_pitch->middle, "x_bottom_middle", "y_bottom_middle");
      j["bbox_pitch"] = bp;
    }
    anns.push_back(std::move(j));
  }
  for (const auto& p : seq.pitch) {
    ordered_json j;
    j["id"] = p.id;
    j["image_id"] = p.image_id;
    j["supercategory"] = "pitch";
    j["category_id"] = 5;
    ordered_json lines = ordered_json::object();
    for (const auto& [cls, poly] : p.lines) {
      ordered_json pts = ordered_json::array();
      for (const auto& pt : poly) pts.push_back({{"x", pt.x}, {"y", pt.y}});
      lines[std::string(line_class_name(cls))] = pts;
    }
    j["lines"] = lines;
    anns.push_back(std::move(j));
  }
  doc["annotations"] = anns;
  return doc.dump(2);
}

SequenceRecord load_sequence(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_sequence(text);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void save_sequence(const SequenceRecord& seq, const std::string& path) {
  write_text_file(path, serialize_sequence(seq));
}

std::vector<Finding> validate_sequence(const SequenceRecord& seq) {
  std::vector<Finding> out;
  auto report = [&](std::string rule, std::string message) { out.push_back({std::move(rule), std::move(message)}); };

  if (seq.info.seq_length <= 0) report("info", "seq_length must be positive");
  if (!(seq.info.frame_rate > 0)) report("info", "frame_rate must be positive");

  std::set<std::pair<int, TrackId>> seen;
  for (const auto& a : seq.athletes) {
    const Detection& d = a.detection;
    const std::string who = "annotation " + a.id;
    if (d.frame < 1 || d.frame > seq.info.seq_length) report("frame_range", who + ": frame outside [1, seq_length]");
    if (!seen.insert({d.frame, d.track_id}).second) {
      report("duplicate_track", who + ": track_id repeated within frame " + std::to_string(d.frame));
    }
    if (!d.bbox_image && !d.pitch_point) report("localization", who + ": neither image box nor pitch point");
    if (d.bbox_image) {
      const BBox& b = *d.bbox_image;
      if (!(b.w > 0) || !(b.h > 0)) report("bbox_positive", who + ": non-positive box size");
      if (a.x_center && std::abs(*a.x_center - b.center_x()) > 1e-6) report("x_center", who + ": x_center != x + w/2");
      if (a.y_center && std::abs(*a.y_center - b.center_y()) > 1e-6) report("y_center", who + ": y_center != y + h/2");
    }
    if (a.bbox_pitch && a.bbox_pitch->left && a.bbox_pitch->right && a.bbox_pitch->middle) {
      const auto& bp = *a.bbox_pitch;
      const double mx = 0.5 * (bp.left->x + bp.right->x);
      const double my = 0.5 * (bp.left->y + bp.right->y);
      if (std::hypot(mx - bp.middle->x, my - bp.middle->y) > 1e-3) {
        report("bottom_middle", who + ": bottom middle is not the midpoint of the bottom corners");
      }
    }
    if (d.pitch_point) {
      const double lim_x = pitch_dims::half_length + kOutOfPitchMargin;
      const double lim_y = pitch_dims::half_width + kOutOfPitchMargin;
      if (std::abs(d.pitch_point->x) > lim_x || std::abs(d.pitch_point->y) > lim_y) {
        report("out_of_pitch", who + ": pitch point outside the pitch");
      }
    }
    const Attributes& at = d.attributes;
    if (at.team && !carries_team(at.role)) report("attributes", who + ": team on a non-player role");
    if (at.jersey && !at.team) report("attributes", who + ": jersey without team");
  }

  for (const auto& p : seq.pitch) {
    for (const auto& [cls, poly] : p.lines) {
      const std::string who = "frame " + std::to_string(p.frame) + " '" + std::string(line_class_name(cls)) + "'";
      const std::size_t min_points = is_circle(cls) ? 3 : 2;
      if (poly.size() < min_points) report("polyline_length", who + ": too few points");
      for (const auto& pt : poly) {
        if (pt.x < 0 || pt.x > 1 || pt.y < 0 || pt.y > 1) {
          report("polyline_range", who + ": point outside the unit square");
          break;
        }
      }
    }
  }
  return out;
}

}  // namespace gsr
