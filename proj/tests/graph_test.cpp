#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "drgraph/graph.hpp"
#include "support.hpp"

using namespace drgraph;

namespace {

Graph parse(const std::string& text) {
  std::istringstream in(text);
  return parse_edge_list(in);
}

Graph parse_mtx(const std::string& text) {
  std::istringstream in(text);
  return parse_matrix_market(in);
}

std::vector<NodeId> adj(const Graph& g, NodeId v) {
  auto n = g.neighbors(v);
  return {n.begin(), n.end()};
}

}  // namespace

TEST(EdgeList, PathOnThreeNodes) {
  const auto g = parse("0 1\n1 2");
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(adj(g, 1), (std::vector<NodeId>{0, 2}));
}

TEST(EdgeList, DropsSelfLoopsAndDuplicates) {
  const auto g = parse("0 0\n0 1\n1 0");
  EXPECT_EQ(g.node_count(), 2u);
  EXPECT_EQ(g.edge_count(), 1u);
}

TEST(EdgeList, SkipsCommentsAndBlankLines) {
  const auto g = parse("# header\n% other\n\n  0\t1  \n");
  EXPECT_EQ(g.edge_count(), 1u);
}

TEST(EdgeList, MatchesSetBasedReference) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> pick(0, 299);
  std::ostringstream text;
  std::set<std::pair<int, int>> reference;
  int max_id = 0;
  for (int line = 0; line < 1000; ++line) {
    const int a = pick(rng), b = pick(rng);
    text << a << ' ' << b << '\n';
    max_id = std::max({max_id, a, b});
    if (a != b) reference.emplace(std::min(a, b), std::max(a, b));
  }
  const auto g = parse(text.str());
  ASSERT_EQ(g.node_count(), static_cast<std::size_t>(max_id + 1));
  std::set<std::pair<int, int>> got;
  for (auto [u, v] : g.edges()) got.emplace(std::min(u, v), std::max(u, v));
  EXPECT_EQ(got, reference);
  for (NodeId v = 0; v < g.node_count(); ++v)
    for (NodeId u : g.neighbors(v)) EXPECT_TRUE(g.has_edge(u, v));
}

TEST(EdgeList, MalformedTokenReportsLine) {
  try {
    parse("0 1\n1 x\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(EdgeList, NegativeIdIsParseError) { EXPECT_THROW(parse("0 1\n-1 2\n"), ParseError); }

TEST(EdgeList, WrongTokenCountIsParseError) { EXPECT_THROW(parse("0 1 2\n"), ParseError); }

TEST(EdgeList, SparseIdsAreRemapped) {
  std::istringstream in("10 1000000\n1000000 42\n");
  std::vector<std::uint64_t> ids;
  const auto g = parse_edge_list(in, &ids);
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(ids, (std::vector<std::uint64_t>{10, 42, 1000000}));
  EXPECT_TRUE(g.has_edge(0, 2));
  EXPECT_TRUE(g.has_edge(1, 2));
}

TEST(EdgeList, WriteThenParseIsIdentity) {
  const auto g = oracle::random_graph(120, 400, 3);
  std::ostringstream out;
  write_edge_list(g, out);
  auto again = parse(out.str());
  // Trailing isolated nodes are not representable in an edge list.
  EXPECT_EQ(again.edges(), g.edges());
  const auto back = Graph::from_edges(g.node_count(), again.edges());
  EXPECT_EQ(back, g);
}

TEST(MatrixMarket, SymmetricPatternPath) {
  const auto g = parse_mtx("%%MatrixMarket matrix coordinate pattern symmetric\n3 3 2\n2 1\n3 2\n");
  EXPECT_EQ(g, parse("0 1\n1 2"));
}

TEST(MatrixMarket, DiagonalEntriesDropped) {
  const auto g = parse_mtx("%%MatrixMarket matrix coordinate real general\n3 3 3\n1 1 5.0\n1 2 1.5\n3 3 2\n");
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_count(), 1u);
}

TEST(MatrixMarket, MissingHeaderIsFormatError) { EXPECT_THROW(parse_mtx("3 3 1\n1 2\n"), FormatError); }

TEST(MatrixMarket, ArrayFormatIsFormatError) {
  EXPECT_THROW(parse_mtx("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n"), FormatError);
}

TEST(MatrixMarket, IndexOutOfRangeIsFormatError) {
  EXPECT_THROW(parse_mtx("%%MatrixMarket matrix coordinate pattern general\n3 3 1\n1 4\n"), FormatError);
  EXPECT_THROW(parse_mtx("%%MatrixMarket matrix coordinate pattern general\n3 3 1\n0 2\n"), FormatError);
}

TEST(MatrixMarket, FixturesAgreeWithEdgeListParser) {
  for (const auto& name : oracle::fixture_names()) {
    if (!name.ends_with(".mtx")) continue;
    SCOPED_TRACE(name);
    std::ifstream in(oracle::fixture(name));
    ASSERT_TRUE(in);
    const auto g = parse_matrix_market(in);

    std::ifstream again(oracle::fixture(name));
    std::string line;
    std::ostringstream pairs;
    bool size_line = false;
    std::size_t rows = 0;
    while (std::getline(again, line)) {
      if (line.empty() || line[0] == '%') continue;
      std::istringstream row(line);
      std::size_t a, b;
      row >> a >> b;
      if (!size_line) {
        size_line = true;
        rows = std::max(a, b);
        continue;
      }
      pairs << a - 1 << ' ' << b - 1 << '\n';
    }
    const auto h = parse(pairs.str());
    EXPECT_EQ(g.edges(), h.edges());
    EXPECT_EQ(g.node_count(), rows);
  }
}

TEST(Bfs, PathTwoHops) {
  const auto g = oracle::path_graph(5);
  const auto got = bfs_k_neighborhood(g, 2, 2);
  EXPECT_EQ(got, (std::vector<Neighbor>{{1, 1}, {3, 1}, {0, 2}, {4, 2}}));
}

TEST(Bfs, TriangleOneHop) {
  const auto g = parse("0 1\n1 2\n2 0");
  EXPECT_EQ(bfs_k_neighborhood(g, 0, 1), (std::vector<Neighbor>{{1, 1}, {2, 1}}));
}

TEST(Bfs, MatchesFloydWarshall) {
  const auto g = oracle::random_graph(100, 130, 5);
  const auto d = oracle::floyd_warshall(g);
  for (NodeId s = 0; s < g.node_count(); ++s) {
    std::set<std::pair<NodeId, std::uint32_t>> expected;
    for (NodeId t = 0; t < g.node_count(); ++t)
      if (t != s && d[s][t] <= 3) expected.emplace(t, d[s][t]);
    std::set<std::pair<NodeId, std::uint32_t>> got;
    for (auto n : bfs_k_neighborhood(g, s, 3)) got.emplace(n.id, n.distance);
    EXPECT_EQ(got, expected) << "source " << s;
  }
}

TEST(Bfs, RejectsBadArguments) {
  const auto g = oracle::path_graph(3);
  EXPECT_THROW(bfs_k_neighborhood(g, 3, 1), ArgumentError);
  EXPECT_THROW(bfs_k_neighborhood(g, 0, 0), ArgumentError);
}

TEST(AllNeighborhoods, PathOneHop) {
  const auto nd = all_k_neighborhoods(oracle::path_graph(3), 1);
  auto row = [&](NodeId i) {
    auto r = nd.row(i);
    return std::vector<Neighbor>(r.begin(), r.end());
  };
  EXPECT_EQ(row(0), (std::vector<Neighbor>{{1, 1}}));
  EXPECT_EQ(row(1), (std::vector<Neighbor>{{0, 1}, {2, 1}}));
  EXPECT_EQ(row(2), (std::vector<Neighbor>{{1, 1}}));
}

TEST(AllNeighborhoods, StarLeavesAtDistanceTwo) {
  const auto g = parse("0 1\n0 2\n0 3\n0 4");
  const auto nd = all_k_neighborhoods(g, 2);
  for (NodeId leaf = 1; leaf <= 4; ++leaf) {
    for (const auto& n : nd.row(leaf)) EXPECT_EQ(n.distance, n.id == 0 ? 1u : 2u);
    EXPECT_EQ(nd.row(leaf).size(), 4u);
  }
}

TEST(AllNeighborhoods, MatchesIndependentBfsAndIsSymmetric) {
  const auto g = oracle::random_graph(200, 300, 8);
  const auto nd = all_k_neighborhoods(g, 2);
  std::set<std::tuple<NodeId, NodeId, std::uint32_t>> relation;
  for (NodeId i = 0; i < g.node_count(); ++i) {
    const auto d = oracle::bfs_distances(g, i);
    std::vector<Neighbor> expected;
    for (NodeId j = 0; j < g.node_count(); ++j)
      if (j != i && d[j] <= 2) expected.push_back({j, d[j]});
    std::sort(expected.begin(), expected.end(),
              [](auto a, auto b) { return std::tie(a.distance, a.id) < std::tie(b.distance, b.id); });
    auto r = nd.row(i);
    EXPECT_EQ(std::vector<Neighbor>(r.begin(), r.end()), expected);
    for (auto n : r) relation.emplace(i, n.id, n.distance);
  }
  for (auto [i, j, d] : relation) EXPECT_TRUE(relation.count({j, i, d}));
}

TEST(AllNeighborhoods, WorkIsBoundedByNeighborhoodSize) {
  // Each search touches only the edges of nodes strictly inside its radius.
  const auto g = oracle::random_graph(2000, 6000, 9);
  for (std::uint32_t k = 1; k <= 3; ++k) {
    TraversalStats stats;
    const auto nd = all_k_neighborhoods(g, k, &stats);
    EXPECT_EQ(stats.node_visits, nd.entry_count());
    std::uint64_t bound = 0;
    for (NodeId i = 0; i < g.node_count(); ++i) {
      bound += g.degree(i);
      for (auto n : nd.row(i))
        if (n.distance < k) bound += g.degree(n.id);
    }
    EXPECT_EQ(stats.edge_visits, bound);
  }
}

TEST(Components, PathIsOneComponent) {
  EXPECT_EQ(connected_components(oracle::path_graph(3)), (std::vector<std::uint32_t>{0, 0, 0}));
}

TEST(Components, TwoDisjointEdges) {
  EXPECT_EQ(connected_components(parse("0 1\n2 3")), (std::vector<std::uint32_t>{0, 0, 1, 1}));
}

TEST(Components, ForestMatchesUnionFind) {
  std::mt19937 rng(4);
  std::vector<Edge> edges;
  const std::size_t trees = 10, per = 30;
  std::vector<NodeId> perm(trees * per);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  for (std::size_t t = 0; t < trees; ++t)
    for (std::size_t v = 1; v < per; ++v)
      edges.emplace_back(perm[t * per + v], perm[t * per + std::uniform_int_distribution<std::size_t>(0, v - 1)(rng)]);
  const auto g = Graph::from_edges(trees * per, edges);
  const auto labels = connected_components(g);
  EXPECT_EQ(component_count(labels), trees);
  oracle::UnionFind uf(g.node_count());
  for (auto [u, v] : edges) uf.unite(u, v);
  for (NodeId a = 0; a < g.node_count(); ++a)
    for (NodeId b = 0; b < g.node_count(); ++b) ASSERT_EQ(labels[a] == labels[b], uf.find(a) == uf.find(b));
}
