#include <cmath>
#include <random>

#include <gtest/gtest.h>
#include <json.hpp>

#include "gsr/annotations.hpp"
#include "gsr/error.hpp"
#include "gsr/predictions.hpp"
#include "gsr/synthetic.hpp"

using namespace gsr;

namespace {

std::string fixture() { return read_text_file(std::string(GSR_TEST_DATA) + "/annotated_sample.json"); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::internal;
}

std::string with_role(const std::string& role) {
  auto doc = nlohmann::json::parse(fixture());
  doc["annotations"][0]["attributes"]["role"] = role;
  return doc.dump();
}

}  // namespace

TEST(ParseSequence, AnnotatedSample) {
  const SequenceRecord s = parse_sequence(fixture());
  EXPECT_EQ(s.info.name, "SNGS-200");
  EXPECT_EQ(s.info.seq_length, 750);
  EXPECT_EQ(s.info.frame_rate, 25.0);
  EXPECT_EQ(s.image_width(), 1920);
  EXPECT_EQ(s.image_height(), 1080);
  EXPECT_EQ(s.info.extra.at("game_id"), "11");
  ASSERT_EQ(s.images.size(), 1u);
  EXPECT_EQ(s.images[0].frame, 1);

  ASSERT_EQ(s.athletes.size(), 1u);
  const Detection& d = s.athletes[0].detection;
  EXPECT_EQ(d.track_id, 1);
  EXPECT_EQ(d.attributes.role, Role::player);
  EXPECT_EQ(d.attributes.jersey, 14);
  EXPECT_EQ(d.attributes.team, Team::left);
  ASSERT_TRUE(d.bbox_image);
  EXPECT_EQ(*d.bbox_image, (BBox{1020, 508, 46, 99}));
  ASSERT_TRUE(d.pitch_point);
  EXPECT_NEAR(d.pitch_point->x, -28.7864, 1e-4);
  EXPECT_NEAR(d.pitch_point->y, -14.1198, 1e-4);

  ASSERT_EQ(s.pitch.size(), 1u);
  const PitchLines& lines = s.pitch[0].lines;
  EXPECT_EQ(lines.size(), 7u);
  EXPECT_EQ(lines.at(LineClass::side_line_top).size(), 3u);
  EXPECT_DOUBLE_EQ(lines.at(LineClass::big_rect_left_main)[0].y, 0.81);
}

TEST(ParseSequence, SampleValidatesClean) {
  const SequenceRecord s = parse_sequence(fixture());
  const auto findings = validate_sequence(s);
  for (const auto& f : findings) ADD_FAILURE() << f.rule << ": " << f.message;
  const auto& a = s.athletes[0];
  EXPECT_DOUBLE_EQ(*a.x_center, 1020 + 46 / 2.0);
  const auto& bp = *a.bbox_pitch;
  EXPECT_NEAR(0.5 * (bp.left->x + bp.right->x), bp.middle->x, 1e-3);
  EXPECT_NEAR(0.5 * (bp.left->y + bp.right->y), bp.middle->y, 1e-3);
}

TEST(ParseSequence, UnknownRoleIsSchemaError) {
  EXPECT_EQ(code_of([&] { parse_sequence(with_role("coach")); }), ErrorCode::schema);
}

TEST(ParseSequence, MalformedAndMissing) {
  EXPECT_EQ(code_of([] { parse_sequence("{\"info\": "); }), ErrorCode::parse);
  auto doc = nlohmann::json::parse(fixture());
  doc["info"].erase("seq_length");
  EXPECT_EQ(code_of([&] { parse_sequence(doc.dump()); }), ErrorCode::schema);

  doc = nlohmann::json::parse(fixture());
  doc["images"][0]["file_name"] = "000751.jpg";
  EXPECT_EQ(code_of([&] { parse_sequence(doc.dump()); }), ErrorCode::schema);

  doc = nlohmann::json::parse(fixture());
  doc["annotations"][0]["attributes"]["team"] = "middle";
  EXPECT_EQ(code_of([&] { parse_sequence(doc.dump()); }), ErrorCode::schema);
}

TEST(ParseSequence, BallsAreDropped) {
  auto doc = nlohmann::json::parse(fixture());
  auto ball = doc["annotations"][0];
  ball["id"] = "ball-1";
  ball["track_id"] = 99;
  ball["category_id"] = 4;
  ball["attributes"] = {{"role", "ball"}, {"jersey", nullptr}, {"team", nullptr}};
  doc["annotations"].push_back(ball);
  EXPECT_EQ(parse_sequence(doc.dump()).athletes.size(), 1u);
}

TEST(ParseSequence, NonPlayerAttributesStripped) {
  auto doc = nlohmann::json::parse(fixture());
  doc["annotations"][0]["attributes"]["role"] = "referee";
  const SequenceRecord s = parse_sequence(doc.dump());
  EXPECT_FALSE(s.athletes[0].detection.attributes.team);
  EXPECT_FALSE(s.athletes[0].detection.attributes.jersey);
}

TEST(ParseSequence, LeadingZeroJersey) {
  auto doc = nlohmann::json::parse(fixture());
  doc["annotations"][0]["attributes"]["jersey"] = "07";
  EXPECT_EQ(parse_sequence(doc.dump()).athletes[0].detection.attributes.jersey, 7);
  doc["annotations"][0]["attributes"]["jersey"] = "100";
  EXPECT_EQ(code_of([&] { parse_sequence(doc.dump()); }), ErrorCode::schema);
}

TEST(SerializeSequence, RoundTripSample) {
  const SequenceRecord s = parse_sequence(fixture());
  const std::string text = serialize_sequence(s);
  EXPECT_EQ(parse_sequence(text), s);
  EXPECT_EQ(serialize_sequence(parse_sequence(text)), text);
  // Field names as in the annotation schema.
  const auto j = nlohmann::json::parse(text);
  EXPECT_TRUE(j["annotations"][0]["bbox_pitch"].contains("x_bottom_middle"));
  EXPECT_EQ(j["annotations"][0]["attributes"]["jersey"], "14");
}

TEST(SerializeSequence, EmptyAnnotations) {
  SequenceRecord s;
  s.info.name = "empty";
  s.info.seq_length = 3;
  s.info.frame_rate = 25;
  const auto j = nlohmann::json::parse(serialize_sequence(s));
  ASSERT_TRUE(j["annotations"].is_array());
  EXPECT_TRUE(j["annotations"].empty());
  EXPECT_EQ(parse_sequence(j.dump()), s);
}

TEST(SerializeSequence, KeepsFullPrecision) {
  auto doc = nlohmann::json::parse(fixture());
  doc["annotations"][0]["bbox_pitch"]["x_bottom_middle"] = -28.78644682618477512;
  const SequenceRecord s = parse_sequence(doc.dump());
  const SequenceRecord r = parse_sequence(serialize_sequence(s));
  EXPECT_EQ(r.athletes[0].detection.pitch_point->x, s.athletes[0].detection.pitch_point->x);
}

TEST(SerializeSequence, RoundTripGenerated) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 25; ++i) {
    SimConfig c;
    c.seed = rng();
    c.n_frames = 3 + static_cast<int>(rng() % 5);
    c.players_per_team = static_cast<int>(rng() % 6);
    c.referees = static_cast<int>(rng() % 3);
    c.others = static_cast<int>(rng() % 2);
    SequenceRecord s = generate_ground_truth(c).record;
    // Exercise optional schema parts the generator does not produce.
    if (!s.images.empty() && i % 2) {
      s.images[0].ignore_regions.push_back({{0.0, 100.0, 100.0}, {0.0, 0.0, 50.0}});
      s.images[0].has_labeled_camera = false;
    }
    EXPECT_TRUE(validate_sequence(s).empty());
    EXPECT_EQ(parse_sequence(serialize_sequence(s)), s) << "generated sequence " << i;
  }
}

TEST(ValidateSequence, Findings) {
  SequenceRecord s = parse_sequence(fixture());
  s.athletes[0].detection.pitch_point = PitchPoint{52.5 + 10.0, 0.0};
  s.athletes[0].bbox_pitch->middle = s.athletes[0].detection.pitch_point;
  bool out_of_pitch = false;
  for (const auto& f : validate_sequence(s)) out_of_pitch = out_of_pitch || f.rule == "out_of_pitch";
  EXPECT_TRUE(out_of_pitch);

  s = parse_sequence(fixture());
  s.athletes[0].x_center = 1000.0;
  ASSERT_EQ(validate_sequence(s).size(), 1u);
  EXPECT_EQ(validate_sequence(s)[0].rule, "x_center");

  s = parse_sequence(fixture());
  s.pitch[0].lines[LineClass::circle_central] = {{0.1, 0.1}, {0.2, 0.2}};
  ASSERT_EQ(validate_sequence(s).size(), 1u);
  EXPECT_EQ(validate_sequence(s)[0].rule, "polyline_length");
}

TEST(ParsePredictions, TwoFrames) {
  const ParsedPredictions p = parse_predictions(
      "{\"sequence\":\"S\",\"frame\":1,\"track_id\":3,\"role\":\"player\",\"team\":\"left\",\"jersey\":\"07\","
      "\"pitch_x\":1.5,\"pitch_y\":-2}\n"
      "\n"
      "{\"sequence\":\"S\",\"frame\":2,\"track_id\":3,\"role\":\"player\",\"bbox_image\":[1,2,3,4]}\n");
  EXPECT_EQ(p.state.sequence, "S");
  ASSERT_EQ(p.state.num_frames(), 2);
  ASSERT_EQ(p.state.frame(1).size(), 1u);
  ASSERT_EQ(p.state.frame(2).size(), 1u);
  EXPECT_EQ(p.state.frame(1)[0].attributes.jersey, 7);
  EXPECT_EQ(*p.state.frame(2)[0].bbox_image, (BBox{1, 2, 3, 4}));
  EXPECT_TRUE(p.warnings.empty());
}

TEST(ParsePredictions, SortedByFrameThenTrack) {
  const GameState s = parse_predictions_state(
      "{\"sequence\":\"S\",\"frame\":2,\"track_id\":9,\"role\":\"player\",\"pitch_x\":0,\"pitch_y\":0}\n"
      "{\"sequence\":\"S\",\"frame\":1,\"track_id\":5,\"role\":\"player\",\"pitch_x\":0,\"pitch_y\":0}\n"
      "{\"sequence\":\"S\",\"frame\":1,\"track_id\":2,\"role\":\"player\",\"pitch_x\":0,\"pitch_y\":0}\n");
  ASSERT_EQ(s.frame(1).size(), 2u);
  EXPECT_EQ(s.frame(1)[0].track_id, 2);
  EXPECT_EQ(s.frame(1)[1].track_id, 5);
}

TEST(ParsePredictions, DuplicateIdentity) {
  const std::string line = "{\"sequence\":\"S\",\"frame\":5,\"track_id\":3,\"role\":\"player\",\"pitch_x\":0,\"pitch_y\":0}\n";
  try {
    parse_predictions(line + line);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::parse);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
  }
}

TEST(ParsePredictions, RefereeTeamIgnoredWithWarning) {
  const ParsedPredictions p = parse_predictions(
      "{\"sequence\":\"S\",\"frame\":1,\"track_id\":3,\"role\":\"referee\",\"team\":\"left\",\"pitch_x\":0,\"pitch_y\":0}");
  EXPECT_FALSE(p.state.frame(1)[0].attributes.team);
  EXPECT_EQ(p.warnings.size(), 1u);
}

TEST(ParsePredictions, ErrorsCarryLineNumbers) {
  const std::string good = "{\"sequence\":\"S\",\"frame\":1,\"track_id\":1,\"role\":\"player\",\"pitch_x\":0,\"pitch_y\":0}\n";
  const std::vector<std::string> bad = {
      "{not json}",
      "{\"sequence\":\"S\",\"frame\":2,\"role\":\"player\",\"pitch_x\":0,\"pitch_y\":0}",
      "{\"sequence\":\"S\",\"frame\":2,\"track_id\":1,\"role\":\"coach\",\"pitch_x\":0,\"pitch_y\":0}",
      "{\"sequence\":\"S\",\"frame\":0,\"track_id\":1,\"role\":\"player\",\"pitch_x\":0,\"pitch_y\":0}",
      "{\"sequence\":\"S\",\"frame\":2,\"track_id\":1,\"role\":\"player\"}",
      "{\"sequence\":\"T\",\"frame\":2,\"track_id\":1,\"role\":\"player\",\"pitch_x\":0,\"pitch_y\":0}",
      "{\"sequence\":\"S\",\"frame\":2,\"track_id\":1,\"role\":\"player\",\"bbox_image\":[0,0,-1,2]}",
      "[1,2]",
  };
  for (const auto& b : bad) {
    try {
      parse_predictions(good + b + "\n");
      ADD_FAILURE() << "accepted: " << b;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::parse) << b;
      EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
  }
}

TEST(ParsePredictions, RoundTrip) {
  const SequenceRecord s = parse_sequence(fixture());
  GameState g = game_state_from_record(s);
  g.frame(1)[0].confidence = 0.75;
  std::map<std::pair<int, TrackId>, std::vector<double>> emb{{{1, 1}, {0.5, -1.0}}};
  const ParsedPredictions p = parse_predictions(serialize_predictions(g, emb));
  EXPECT_EQ(p.state.frame(1), g.frame(1));
  EXPECT_EQ(p.embeddings, emb);
}

TEST(Exclusions, IgnoreRegionsAndCameraFlags) {
  SequenceRecord s = parse_sequence(fixture());
  GameState all = game_state_from_record(s);
  EXPECT_EQ(all.num_frames(), 750);
  EXPECT_EQ(all.frame(1).size(), 1u);

  // Box center (1043, 557.5) inside the region.
  s.images[0].ignore_regions.push_back({{1000, 1100, 1100, 1000}, {500, 500, 600, 600}});
  EXPECT_TRUE(game_state_from_record(s).frame(1).empty());

  s = parse_sequence(fixture());
  s.images[0].has_labeled_camera = false;
  EXPECT_TRUE(game_state_from_record(s).frame(1).empty());
  EXPECT_EQ(game_state_from_record(s, {false}).frame(1).size(), 1u);

  GameState too_long;
  too_long.frame(751).push_back(all.frame(1)[0]);
  EXPECT_EQ(code_of([&] { apply_exclusions(too_long, s); }), ErrorCode::invalid_argument);
}

TEST(Files, MissingFileIsIoError) {
  try {
    load_sequence("/nonexistent/gt.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::io);
    EXPECT_NE(std::string(e.what()).find("not found"), std::string::npos);
  }
}
