#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gsr/pitch.hpp"
#include "gsr/types.hpp"

namespace gsr {

struct SequenceInfo {
  std::string name;
  int seq_length = 0;
  double frame_rate = 0.0;
  std::string im_dir;
  std::string im_ext;
  // Remaining string-valued info fields (version, game_id, clip_start, ...).
  std::map<std::string, std::string> extra;

  friend bool operator==(const SequenceInfo&, const SequenceInfo&) = default;
};

// Ignore region as a polygon in image pixels; x[i], y[i] is one vertex.
struct IgnoreRegion {
  std::vector<double> x;
  std::vector<double> y;

  bool contains(double px, double py) const;
  friend bool operator==(const IgnoreRegion&, const IgnoreRegion&) = default;
};

struct ImageInfo {
  std::string image_id;
  std::string file_name;
  int frame = 0;
  int width = 0;
  int height = 0;
  bool is_labeled = true;
  bool has_labeled_person = true;
  bool has_labeled_pitch = true;
  bool has_labeled_camera = true;
  std::vector<IgnoreRegion> ignore_regions;

  friend bool operator==(const ImageInfo&, const ImageInfo&) = default;
};

struct PitchBottom {
  std::optional<PitchPoint> left;
  std::optional<PitchPoint> right;
  std::optional<PitchPoint> middle;

  friend bool operator==(const PitchBottom&, const PitchBottom&) = default;
};

// One athlete box. detection.pitch_point mirrors bbox_pitch.middle.
struct AthleteAnnotation {
  std::string id;
  std::string image_id;
  int category_id = 1;
  Detection detection;
  // Stored centers, checked against x + w/2 and y + h/2 during validation.
  std::optional<double> x_center;
  std::optional<double> y_center;
  std::optional<PitchBottom> bbox_pitch;

  friend bool operator==(const AthleteAnnotation&, const AthleteAnnotation&) = default;
};

struct NormalizedPoint {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const NormalizedPoint&, const NormalizedPoint&) = default;
};

using NormalizedPolyline = std::vector<NormalizedPoint>;
using PitchLines = std::map<LineClass, NormalizedPolyline>;

struct PitchAnnotation {
  std::string id;
  std::string image_id;
  int frame = 0;
  PitchLines lines;

  friend bool operator==(const PitchAnnotation&, const PitchAnnotation&) = default;
};

struct SequenceRecord {
  SequenceInfo info;
  std::vector<ImageInfo> images;
  std::vector<AthleteAnnotation> athletes;
  std::vector<PitchAnnotation> pitch;

  // Image size of the first image, or 1920x1080 when no images are listed.
  int image_width() const;
  int image_height() const;
  const ImageInfo* image_for_frame(int frame) const;
  const PitchAnnotation* pitch_for_frame(int frame) const;

  friend bool operator==(const SequenceRecord&, const SequenceRecord&) = default;
};

SequenceRecord parse_sequence(std::string_view document);
std::string serialize_sequence(const SequenceRecord& seq);

SequenceRecord load_sequence(const std::string& path);
void save_sequence(const SequenceRecord& seq, const std::string& path);

struct Finding {
  std::string rule;
  std::string message;
};

std::vector<Finding> validate_sequence(const SequenceRecord& seq);

// Pitch points further than this outside the template are reported.
inline constexpr double kOutOfPitchMargin = 5.0;

}  // namespace gsr
