#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <gtest/gtest.h>

#include "drgraph/cli.hpp"
#include "drgraph/io.hpp"
#include "support.hpp"

using namespace drgraph;
namespace fs = std::filesystem;

namespace {

// Structural XML check: one root, every tag closed in order, attributes
// quoted, no stray '<' or '&' in text.
bool well_formed_xml(const std::string& doc) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  int roots = 0;
  static const std::regex open(R"(^<([A-Za-z_][\w:.-]*)((\s+[A-Za-z_][\w:.-]*="[^"<&]*")*)\s*(/?)>$)");
  static const std::regex close(R"(^</([A-Za-z_][\w:.-]*)\s*>$)");
  while (i < doc.size()) {
    if (doc[i] != '<') {
      if (doc[i] == '&') return false;
      if (stack.empty() && !std::isspace(static_cast<unsigned char>(doc[i]))) return false;
      ++i;
      continue;
    }
    const auto end = doc.find('>', i);
    if (end == std::string::npos) return false;
    const std::string tag = doc.substr(i, end - i + 1);
    i = end + 1;
    std::smatch m;
    if (tag.starts_with("<?xml")) {
      if (!stack.empty() || roots) return false;
    } else if (std::regex_match(tag, m, close)) {
      if (stack.empty() || stack.back() != m[1]) return false;
      stack.pop_back();
    } else if (std::regex_match(tag, m, open)) {
      if (stack.empty()) ++roots;
      if (m[4].length() == 0) stack.push_back(m[1]);
    } else {
      return false;
    }
  }
  return stack.empty() && roots == 1;
}

std::vector<std::string> line_colors(const std::string& svg) {
  std::vector<std::string> out;
  static const std::regex stroke(R"re(<line [^>]*stroke="(#[0-9a-f]{6})")re");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), stroke); it != std::sregex_iterator(); ++it)
    out.push_back((*it)[1]);
  return out;
}

std::size_t count_of(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "drgraph_io_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Coords, SingleNodeAtOrigin) {
  std::ostringstream out;
  write_coords(Layout(1), out);
  EXPECT_EQ(out.str(), "#nodes 1\n0.000000 0.000000\n");
}

TEST(Coords, RoundTripAndLineCount) {
  auto y = oracle::random_layout(500, 3);
  y[0] = {1.234567e-5, -9.87654e-8};
  y[1] = {12345.678901, -0.5};
  std::ostringstream out;
  write_coords(y, out);
  const auto text = out.str();
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), 501u);
  std::istringstream in(text);
  const auto back = read_coords(in);
  ASSERT_EQ(back.size(), y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    EXPECT_NEAR(back[i].x, y[i].x, 1e-6 * std::max(1.0, std::abs(y[i].x)));
    EXPECT_NEAR(back[i].y, y[i].y, 1e-6 * std::max(1.0, std::abs(y[i].y)));
  }
  EXPECT_NEAR(back[0].x / y[0].x, 1.0, 1e-5);
}

TEST(Coords, ReadRejectsBadInput) {
  std::istringstream a("0 0\n"), b("#nodes 2\n0 0\n"), c("#nodes 1\nx y\n");
  EXPECT_THROW(read_coords(a), FormatError);
  EXPECT_THROW(read_coords(b), FormatError);
  EXPECT_THROW(read_coords(c), FormatError);
}

TEST(Colormap, Anchors) {
  EXPECT_EQ(to_hex(edge_length_color(0.0)), "#ff0000");
  EXPECT_EQ(to_hex(edge_length_color(0.5)), "#00ff00");
  EXPECT_EQ(to_hex(edge_length_color(1.0)), "#0000ff");
  EXPECT_EQ(edge_length_color(0.25), (Rgb{128, 128, 0}));
}

TEST(Svg, SingleEdgeIsRed) {
  const auto svg = svg_string(oracle::path_graph(2), Layout(std::vector<Point>{{0, 0}, {1, 1}}));
  EXPECT_EQ(line_colors(svg), (std::vector<std::string>{"#ff0000"}));
}

TEST(Svg, LengthsOneTwoThreeAreRedGreenBlue) {
  const auto g = Graph::from_edges(6, std::vector<Edge>{{0, 1}, {2, 3}, {4, 5}});
  const Layout y(std::vector<Point>{{0, 0}, {1, 0}, {0, 1}, {2, 1}, {0, 2}, {3, 2}});
  EXPECT_EQ(line_colors(svg_string(g, y)), (std::vector<std::string>{"#ff0000", "#00ff00", "#0000ff"}));
}

TEST(Svg, NodesDrawnAfterEdges) {
  const auto svg = svg_string(oracle::path_graph(3), oracle::random_layout(3, 1));
  EXPECT_LT(svg.rfind("<line"), svg.find("<circle"));
  EXPECT_EQ(count_of(svg, "<circle"), 3u);
}

TEST(Svg, ThresholdBoundaryAndSampling) {
  const auto g = oracle::random_graph(200, 1500, 2);
  const auto y = oracle::random_layout(200, 2);
  SvgStyle style;
  style.edge_sample_threshold = g.edge_count();
  EXPECT_EQ(count_of(svg_string(g, y, style), "<line"), g.edge_count());
  style.edge_sample_threshold = 100;
  const auto a = svg_string(g, y, style, 7);
  EXPECT_EQ(count_of(a, "<line"), 100u);
  EXPECT_EQ(a, svg_string(g, y, style, 7));
  EXPECT_NE(a, svg_string(g, y, style, 8));
}

TEST(Svg, LargeGraphIsCappedAtDefaultThreshold) {
  // 700k edges of a banded graph; positions do not matter here.
  const std::size_t n = 1500;
  std::vector<Edge> e;
  for (NodeId v = 0; v < n; ++v)
    for (NodeId s = 1; e.size() < 700000 && s <= 600; ++s)
      if (v + s < n) e.emplace_back(v, v + s);
  const auto g = Graph::from_edges(n, e);
  ASSERT_GT(g.edge_count(), 600000u);
  std::ostringstream out;
  write_svg(g, oracle::random_layout(n, 1), SvgStyle{}, 1, out);
  EXPECT_EQ(count_of(out.str(), "<line"), 600000u);
}

TEST(Svg, WellFormedForEveryFixture) {
  for (const auto& name : oracle::fixture_names()) {
    SCOPED_TRACE(name);
    const auto g = load_graph(oracle::fixture(name));
    EXPECT_TRUE(well_formed_xml(svg_string(g, oracle::random_layout(g.node_count(), 1))));
  }
  EXPECT_FALSE(well_formed_xml("<svg><g></svg></g>"));
  EXPECT_FALSE(well_formed_xml("<svg a=\"1\"></svg><svg></svg>"));
}

TEST(AtomicWrite, FailureLeavesNoFile) {
  const auto path = scratch("partial.txt");
  fs::remove(path);
  EXPECT_THROW(write_file_atomic(path,
                                 [](std::ostream& o) {
                                   o << "half";
                                   throw IoError("boom");
                                 }),
               IoError);
  EXPECT_FALSE(fs::exists(path));
  EXPECT_FALSE(fs::exists(path.string() + ".tmp"));
}

TEST(AtomicWrite, ReplacesExistingFile) {
  const auto path = scratch("whole.txt");
  write_file_atomic(path, [](std::ostream& o) { o << "first"; });
  write_file_atomic(path, [](std::ostream& o) { o << "second"; });
  std::ifstream in(path);
  std::string s;
  in >> s;
  EXPECT_EQ(s, "second");
}

TEST(AtomicWrite, MissingDirectoryIsIoError) {
  EXPECT_THROW(write_file_atomic("/nonexistent-dir/x/y.txt", [](std::ostream& o) { o << 1; }), IoError);
}

TEST(ReportOutput, TextAndJsonCarryAllKeys) {
  const auto g = oracle::grid_graph(4);
  const auto r = compute_metrics(g, oracle::random_layout(16, 1));
  std::ostringstream text;
  write_report_text(r, text);
  for (const char* key : {"np = ", "stress = ", "alpha_star = ", "crossings = ", "c_max = ", "crosslessness = ",
                          "min_angle = ", "flags ="})
    EXPECT_NE(text.str().find(key), std::string::npos) << key;
  const auto j = report_json(r);
  for (const char* key : {"np", "stress", "alpha_star", "crossings", "c_max", "crosslessness", "min_angle", "flags"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["np"].get<double>(), r.np);
}
