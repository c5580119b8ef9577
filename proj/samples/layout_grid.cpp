// Lays out an n x n grid graph and prints its quality metrics.
//
//   layout_grid [side=17] [b=3] [seed=1]

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <vector>

#include "drgraph/drgraph.hpp"
#include "drgraph/io.hpp"

int main(int argc, char** argv) {
  const int side = argc > 1 ? std::atoi(argv[1]) : 17;
  const int b = argc > 2 ? std::atoi(argv[2]) : 3;
  const auto seed = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 1ULL;

  std::vector<drgraph::Edge> edges;
  auto id = [side](int r, int c) { return static_cast<drgraph::NodeId>(r * side + c); };
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) {
      if (c + 1 < side) edges.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < side) edges.emplace_back(id(r, c), id(r + 1, c));
    }
  const auto g = drgraph::Graph::from_edges(static_cast<std::size_t>(side) * side, edges);

  drgraph::OptimizerParams params;
  params.b = b;
  params.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  const auto layout = drgraph::layout_graph(g, {}, params);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::cout << "layout_seconds = " << secs << '\n';
  drgraph::write_report_text(drgraph::compute_metrics(g, layout), std::cout);
}
