#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gsr/annotations.hpp"
#include "gsr/types.hpp"

namespace gsr {

struct PredictionRecord {
  std::string sequence;
  Detection detection;
  // Optional appearance vector, consumed by the refine workflow.
  std::vector<double> embedding;
};

struct ParsedPredictions {
  GameState state;
  // Embeddings keyed by (frame, track_id); empty when none were given.
  std::map<std::pair<int, TrackId>, std::vector<double>> embeddings;
  std::vector<std::string> warnings;
};

// Line-delimited records, one JSON object per line. Blank lines are skipped.
// Errors carry the 1-based line number.
ParsedPredictions parse_predictions(std::string_view text);
GameState parse_predictions_state(std::string_view text);

std::string serialize_predictions(const GameState& state,
                                  const std::map<std::pair<int, TrackId>, std::vector<double>>& embeddings = {});

ParsedPredictions load_predictions(const std::string& path);
void save_predictions(const GameState& state, const std::string& path);

// Evaluated content of a ground-truth document.
struct StateOptions {
  // Drop frames whose camera is not labeled; used for pitch-space scoring.
  bool require_camera = true;
};

GameState game_state_from_record(const SequenceRecord& seq, const StateOptions& options = {});

// Removes detections that cannot be scored against `gt`: frames that are not
// labeled (or lack camera labels when required) and boxes whose center lies in
// an ignore region. Applied identically to ground truth and predictions.
GameState apply_exclusions(const GameState& state, const SequenceRecord& gt, const StateOptions& options = {});

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace gsr
