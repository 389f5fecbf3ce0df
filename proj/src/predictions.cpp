#include "gsr/predictions.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gsr/error.hpp"

namespace gsr {

namespace {

using json = nlohmann::json;

[[noreturn]] void line_error(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::parse, "line " + std::to_string(line) + ": " + what);
}

double number_field(const json& rec, const char* key, std::size_t line) {
  const json& v = rec.at(key);
  if (!v.is_number()) line_error(line, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

bool has(const json& rec, const char* key) {
  auto it = rec.find(key);
  return it != rec.end() && !it->is_null();
}

bool in_ignore_region(const Detection& d, const ImageInfo& im) {
  if (!d.bbox_image || im.ignore_regions.empty()) return false;
  const double cx = d.bbox_image->center_x();
  const double cy = d.bbox_image->center_y();
  return std::any_of(im.ignore_regions.begin(), im.ignore_regions.end(),
                     [&](const IgnoreRegion& r) { return r.contains(cx, cy); });
}

}  // namespace

ParsedPredictions parse_predictions(std::string_view text) {
  ParsedPredictions out;
  std::set<std::pair<int, TrackId>> seen;
  std::vector<Detection> all;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  bool named = false;

  while (std::getline(in, raw)) {
    ++line;
    if (std::all_of(raw.begin(), raw.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    json rec;
    try {
      rec = json::parse(raw);
    } catch (const json::parse_error& e) {
      line_error(line, std::string("malformed record: ") + e.what());
    }
    if (!rec.is_object()) line_error(line, "record must be an object");
    try {
      for (const char* key : {"sequence", "frame", "track_id", "role"}) {
        if (!has(rec, key)) line_error(line, std::string("missing required field '") + key + "'");
      }
      const std::string sequence = rec.at("sequence").get<std::string>();
      if (!named) {
        out.state.sequence = sequence;
        named = true;
      } else if (sequence != out.state.sequence) {
        line_error(line, "records from several sequences ('" + out.state.sequence + "', '" + sequence + "')");
      }

      Detection d;
      const double frame = number_field(rec, "frame", line);
      if (frame < 1 || frame != static_cast<int>(frame)) line_error(line, "frame must be a positive integer");
      d.frame = static_cast<int>(frame);
      d.track_id = static_cast<TrackId>(number_field(rec, "track_id", line));
      d.attributes.role = parse_role(rec.at("role").get<std::string>());
      if (has(rec, "team")) d.attributes.team = parse_team(rec.at("team").get<std::string>());
      if (has(rec, "jersey")) {
        const json& j = rec.at("jersey");
        d.attributes.jersey = parse_jersey(j.is_string() ? j.get<std::string>() : j.dump());
      }
      if (!carries_team(d.attributes.role) && (d.attributes.team || d.attributes.jersey)) {
        out.warnings.push_back("line " + std::to_string(line) + ": team/jersey ignored for role '" +
                               std::string(to_string(d.attributes.role)) + "'");
        d.attributes.team.reset();
        d.attributes.jersey.reset();
      }
      if (has(rec, "pitch_x") != has(rec, "pitch_y")) line_error(line, "pitch_x and pitch_y must come together");
      if (has(rec, "pitch_x")) d.pitch_point = PitchPoint{number_field(rec, "pitch_x", line), number_field(rec, "pitch_y", line)};
      if (has(rec, "bbox_image")) {
        const json& bb = rec.at("bbox_image");
        BBox box;
        if (bb.is_array() && bb.size() == 4) {
          box = {bb[0].get<double>(), bb[1].get<double>(), bb[2].get<double>(), bb[3].get<double>()};
        } else if (bb.is_object()) {
          box = {number_field(bb, "x", line), number_field(bb, "y", line), number_field(bb, "w", line),
                 number_field(bb, "h", line)};
        } else {
          line_error(line, "bbox_image must be {x, y, w, h} or a 4-element array");
        }
        if (!(box.w > 0) || !(box.h > 0)) line_error(line, "bbox_image must have positive w and h");
        d.bbox_image = box;
      }
      if (!d.pitch_point && !d.bbox_image) line_error(line, "record has neither pitch point nor bbox_image");
      if (has(rec, "confidence")) d.confidence = number_field(rec, "confidence", line);
      if (!seen.insert({d.frame, d.track_id}).second) {
        line_error(line, "duplicate (frame=" + std::to_string(d.frame) + ", track_id=" + std::to_string(d.track_id) + ")");
      }
      if (has(rec, "embedding")) {
        std::vector<double> emb;
        for (const auto& v : rec.at("embedding")) {
          if (!v.is_number()) line_error(line, "embedding entries must be numbers");
          emb.push_back(v.get<double>());
        }
        out.embeddings[{d.frame, d.track_id}] = std::move(emb);
      }
      all.push_back(std::move(d));
    } catch (const json::exception& e) {
      line_error(line, e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::parse) throw;
      line_error(line, e.what());
    }
  }

  std::sort(all.begin(), all.end(), [](const Detection& a, const Detection& b) {
    return std::tie(a.frame, a.track_id) < std::tie(b.frame, b.track_id);
  });
  for (auto& d : all) out.state.frame(d.frame).push_back(std::move(d));
  return out;
}

GameState parse_predictions_state(std::string_view text) { return parse_predictions(text).state; }

std::string serialize_predictions(const GameState& state,
                                  const std::map<std::pair<int, TrackId>, std::vector<double>>& embeddings) {
  std::string out;
  for (const auto& frame : state.frames) {
    for (const auto& d : frame) {
      nlohmann::ordered_json rec;
      rec["sequence"] = state.sequence;
      rec["frame"] = d.frame;
      rec["track_id"] = d.track_id;
      rec["role"] = std::string(to_string(d.attributes.role));
      if (d.attributes.team) rec["team"] = std::string(to_string(*d.attributes.team));
      if (d.attributes.jersey) rec["jersey"] = std::to_string(*d.attributes.jersey);
      if (d.pitch_point) {
        rec["pitch_x"] = d.pitch_point->x;
        rec["pitch_y"] = d.pitch_point->y;
      }
      if (d.bbox_image) {
        rec["bbox_image"] = {{"x", d.bbox_image->x}, {"y", d.bbox_image->y}, {"w", d.bbox_image->w}, {"h", d.bbox_image->h}};
      }
      if (d.confidence) rec["confidence"] = *d.confidence;
      if (auto it = embeddings.find({d.frame, d.track_id}); it != embeddings.end()) rec["embedding"] = it->second;
      out += rec.dump();
      out += '\n';
    }
  }
  return out;
}

ParsedPredictions load_predictions(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_predictions(text);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void save_predictions(const GameState& state, const std::string& path) {
  write_text_file(path, serialize_predictions(state));
}

GameState game_state_from_record(const SequenceRecord& seq, const StateOptions& options) {
  GameState raw;
  raw.sequence = seq.info.name;
  raw.frames.resize(static_cast<std::size_t>(seq.info.seq_length));
  for (const auto& a : seq.athletes) raw.frame(a.detection.frame).push_back(a.detection);
  for (auto& f : raw.frames) {
    std::sort(f.begin(), f.end(), [](const Detection& a, const Detection& b) { return a.track_id < b.track_id; });
  }
  return apply_exclusions(raw, seq, options);
}

GameState apply_exclusions(const GameState& state, const SequenceRecord& gt, const StateOptions& options) {
  if (state.num_frames() > gt.info.seq_length) {
    throw Error(ErrorCode::invalid_argument, "sequence '" + state.sequence + "' has frames beyond seq_length " +
                                                 std::to_string(gt.info.seq_length));
  }
  GameState out;
  out.sequence = state.sequence;
  out.frames.resize(static_cast<std::size_t>(gt.info.seq_length));
  for (std::size_t i = 0; i < state.frames.size(); ++i) {
    const int frame = static_cast<int>(i) + 1;
    const ImageInfo* im = gt.image_for_frame(frame);
    if (im) {
      if (!im->is_labeled || !im->has_labeled_person) continue;
      if (options.require_camera && !im->has_labeled_camera) continue;
    }
    for (const auto& d : state.frames[i]) {
      if (im && in_ignore_region(d, *im)) continue;
      out.frames[i].push_back(d);
    }
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path + "' (file not found or unreadable)");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::io, "write failed for '" + path + "'");
}

}  // namespace gsr
