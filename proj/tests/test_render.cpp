#include <filesystem>
#include <fstream>
#include <regex>

#include <unistd.h>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "gsr/error.hpp"
#include "gsr/render.hpp"

using namespace gsr;
using gsr::testing::det;
namespace fs = std::filesystem;

namespace {

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

std::vector<Detection> full_frame() {
  std::vector<Detection> f;
  for (int i = 0; i < 22; ++i) {
    const Role role = i % 11 == 0 ? Role::goalkeeper : Role::player;
    f.push_back(det(1, i, -45.0 + 4.0 * i, (i % 5) * 10.0 - 20, role, i < 11 ? Team::left : Team::right, i + 1));
  }
  return f;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gsr_render_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Minimap, OneMarkerPerAthlete) {
  RenderStats stats;
  const std::string svg = render_minimap_frame(full_frame(), {}, &stats);
  EXPECT_EQ(count(svg, "class=\"marker\""), 22u);
  EXPECT_EQ(stats.markers, 22u);
  EXPECT_EQ(stats.clamped, 0u);
  EXPECT_EQ(count(svg, "data-role=\"goalkeeper\""), 2u);
  EXPECT_EQ(count(svg, "class=\"jersey\""), 22u);
  EXPECT_EQ(svg, render_minimap_frame(full_frame()));
}

TEST(Minimap, PitchOutlineAspect) {
  RenderStyle style;
  style.scale = 5;
  const std::string svg = render_minimap_frame({}, style);
  const std::regex outline(R"re(class="outline" x="([0-9.]+)" y="([0-9.]+)" width="([0-9.]+)" height="([0-9.]+)")re");
  std::smatch m;
  ASSERT_TRUE(std::regex_search(svg, m, outline));
  const double w = std::stod(m[3]), h = std::stod(m[4]);
  EXPECT_NEAR(w / h, 105.0 / 68.0, 1e-6);
  EXPECT_NEAR(w, 525.0, 1e-9);
  EXPECT_NEAR(std::stod(m[1]), 20.0, 1e-9);
}

TEST(Minimap, TransformRoundTrip) {
  const MinimapTransform t{RenderStyle{}};
  EXPECT_NEAR(t.width(), (105 + 8) * 8.0, 1e-12);
  EXPECT_NEAR(t.height(), (68 + 8) * 8.0, 1e-12);
  const auto c = t.to_document({0, 0});
  EXPECT_NEAR(c.x(), t.width() / 2, 1e-12);
  EXPECT_NEAR(c.y(), t.height() / 2, 1e-12);
  for (double x = -60; x <= 60; x += 7.3) {
    for (double y = -40; y <= 40; y += 5.9) {
      const PitchPoint p = t.to_pitch(t.to_document({x, y}));
      EXPECT_NEAR(p.x, x, 1e-6);
      EXPECT_NEAR(p.y, y, 1e-6);
    }
  }
}

TEST(Minimap, ClampsAndSkips) {
  std::vector<Detection> f{det(1, 1, 200, 0), det(1, 2, 0, 0)};
  f[1].pitch_point.reset();
  RenderStats stats;
  const std::string svg = render_minimap_frame(f, {}, &stats);
  EXPECT_EQ(stats.markers, 1u);
  EXPECT_EQ(stats.clamped, 1u);
  EXPECT_EQ(stats.skipped, 1u);
  EXPECT_EQ(count(svg, "class=\"marker\""), 1u);
}

TEST(Overlay, DrawsBothLayers) {
  const auto f = full_frame();
  RenderStats stats;
  const std::string svg = render_overlay_frame(f, std::vector<Detection>(f.begin(), f.begin() + 5), {}, &stats);
  EXPECT_EQ(count(svg, "class=\"marker\""), 27u);
  EXPECT_EQ(stats.markers, 27u);
}

TEST(Raster, PpmHeader) {
  RenderStyle style;
  style.scale = 2;
  const std::string ppm = rasterize_minimap_frame(full_frame(), style);
  const std::string header = "P6\n226 152\n255\n";
  ASSERT_GE(ppm.size(), header.size());
  EXPECT_EQ(ppm.substr(0, header.size()), header);
  EXPECT_EQ(ppm.size(), header.size() + 226u * 152u * 3u);
  EXPECT_EQ(ppm, rasterize_minimap_frame(full_frame(), style));
}

TEST(RenderSequence, WritesOneFilePerFrame) {
  std::vector<Detection> all;
  for (int f = 1; f <= 10; ++f)
    for (auto d : full_frame()) {
      d.frame = f;
      all.push_back(d);
    }
  const GameState s = gsr::testing::state_of(all, 10);
  const fs::path dir = scratch("seq");
  const RenderStats stats = render_sequence(s, dir.string(), RenderFormat::svg);
  EXPECT_EQ(stats.markers, 220u);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    EXPECT_EQ(e.path().extension(), ".svg");
    ++files;
  }
  EXPECT_EQ(files, 10u);
  EXPECT_TRUE(fs::exists(dir / "000001.svg"));
  EXPECT_TRUE(fs::exists(dir / "000010.svg"));
  std::ifstream in(dir / "000003.svg");
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  EXPECT_EQ(text, render_minimap_frame(s.frames[2]));
  fs::remove_all(dir);

  const fs::path ppm = scratch("ppm");
  render_sequence(s, ppm.string(), RenderFormat::ppm);
  EXPECT_TRUE(fs::exists(ppm / "000010.ppm"));
  fs::remove_all(ppm);
}

TEST(RenderSequence, EmptyStateWritesNothing) {
  const fs::path dir = scratch("empty");
  const RenderStats stats = render_sequence(GameState{}, dir.string(), RenderFormat::svg);
  EXPECT_EQ(stats.markers, 0u);
  EXPECT_TRUE(!fs::exists(dir) || fs::is_empty(dir));
  fs::remove_all(dir);
}

TEST(RenderSequence, UnwritableDirectory) {
  const fs::path file = scratch("blocker");
  std::ofstream(file) << "x";
  const GameState s = gsr::testing::state_of(full_frame(), 1);
  try {
    render_sequence(s, (file / "sub").string(), RenderFormat::svg);
    ADD_FAILURE() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::io);
  }
  fs::remove(file);
}
