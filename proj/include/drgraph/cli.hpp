#pragma once

#include <charconv>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <sys/resource.h>

#include "drgraph/errors.hpp"
#include "drgraph/graph.hpp"
#include "drgraph/io.hpp"
#include "drgraph/metrics.hpp"
#include "drgraph/optimizer.hpp"
#include "drgraph/similarity.hpp"

namespace drgraph {

enum class ExitCode : int { ok = 0, usage = 1, io = 2, format = 3, internal = 4 };

// Everything one layout run needs. Serializes to "key = value" lines whose
// keys are the long flag names.
struct RunConfig {
  std::string input;
  std::string format = "auto";       // auto | edgelist | mtx
  std::string output;
  std::string out_format = "coords";  // coords | svg | both
  SimilarityParams similarity;
  OptimizerParams optimizer;
  bool metrics = false;
  std::uint32_t k_eval = 2;
  std::size_t svg_edge_cap = 600000;

  friend bool operator==(const RunConfig& a, const RunConfig& b) { return a.to_text() == b.to_text(); }

  std::string to_text() const {
    std::ostringstream out;
    auto num = [](double v) {
      char buf[64];
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
      return std::string(buf, end);
    };
    out << "input = " << input << '\n';
    out << "format = " << format << '\n';
    out << "output = " << output << '\n';
    out << "out-format = " << out_format << '\n';
    out << "k = " << similarity.k << '\n';
    out << "perplexity = " << (similarity.perplexity ? num(*similarity.perplexity) : "auto") << '\n';
    out << "neg-samples = " << optimizer.negative_samples << '\n';
    out << "gamma = " << num(optimizer.gamma) << '\n';
    out << "b = " << optimizer.b << '\n';
    out << "iters = " << optimizer.iterations << '\n';
    out << "rho = " << num(optimizer.rho) << '\n';
    out << "min-size = " << optimizer.min_size << '\n';
    out << "lr = " << num(optimizer.lr0) << '\n';
    out << "seed = " << optimizer.seed << '\n';
    out << "threads = " << optimizer.threads << '\n';
    out << "metrics = " << (metrics ? "true" : "false") << '\n';
    out << "k-eval = " << k_eval << '\n';
    out << "svg-edge-cap = " << svg_edge_cap << '\n';
    return out.str();
  }

  // Applies one key/value pair; throws ConfigError on unknown keys or
  // unparsable values.
  void set(const std::string& key, const std::string& value) {
    auto bad = [&]() { return ConfigError("invalid value '" + value + "' for " + key); };
    auto real = [&]() {
      double v = 0.0;
      auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc() || p != value.data() + value.size()) throw bad();
      return v;
    };
    auto whole = [&]() {
      std::uint64_t v = 0;
      auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc() || p != value.data() + value.size()) throw bad();
      return v;
    };
    if (key == "input") {
      input = value;
    } else if (key == "format") {
      if (value != "auto" && value != "edgelist" && value != "mtx") throw bad();
      format = value;
    } else if (key == "output") {
      output = value;
    } else if (key == "out-format") {
      if (value != "coords" && value != "svg" && value != "both") throw bad();
      out_format = value;
    } else if (key == "k") {
      similarity.k = static_cast<std::uint32_t>(whole());
    } else if (key == "perplexity") {
      if (value == "auto")
        similarity.perplexity.reset();
      else
        similarity.perplexity = real();
    } else if (key == "neg-samples") {
      optimizer.negative_samples = static_cast<int>(whole());
    } else if (key == "gamma") {
      optimizer.gamma = real();
    } else if (key == "b") {
      optimizer.b = static_cast<int>(whole());
    } else if (key == "iters") {
      optimizer.iterations = static_cast<int>(whole());
    } else if (key == "rho") {
      optimizer.rho = real();
    } else if (key == "min-size") {
      optimizer.min_size = whole();
    } else if (key == "lr") {
      optimizer.lr0 = real();
    } else if (key == "seed") {
      optimizer.seed = whole();
    } else if (key == "threads") {
      optimizer.threads = static_cast<unsigned>(whole());
    } else if (key == "metrics") {
      if (value != "true" && value != "false") throw bad();
      metrics = value == "true";
    } else if (key == "k-eval") {
      k_eval = static_cast<std::uint32_t>(whole());
    } else if (key == "svg-edge-cap") {
      svg_edge_cap = whole();
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }

  // Reads "key = value" lines on top of the current values. Blank lines and
  // '#' comments are ignored.
  void apply_text(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      auto body = detail::trim(line);
      if (body.empty() || body.front() == '#') continue;
      auto eq = body.find('=');
      if (eq == std::string_view::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
      set(std::string(detail::trim(body.substr(0, eq))), std::string(detail::trim(body.substr(eq + 1))));
    }
  }

  static RunConfig from_text(std::istream& in) {
    RunConfig cfg;
    cfg.apply_text(in);
    return cfg;
  }

  void validate() const {
    if (similarity.k < 1 || similarity.k > 6) throw ConfigError("k must lie in [1, 6]");
    if (similarity.perplexity && !(*similarity.perplexity > 0.0)) throw ConfigError("perplexity must be positive");
    if (k_eval < 1) throw ConfigError("k-eval must be >= 1");
    if (!(optimizer.rho > 0.0 && optimizer.rho < 1.0)) throw ConfigError("rho must lie in (0, 1)");
    if (optimizer.min_size < 1) throw ConfigError("min-size must be >= 1");
    try {
      optimizer.validate();
    } catch (const ArgumentError& e) {
      throw ConfigError(e.what());
    }
  }
};

inline std::string detect_format(const std::filesystem::path& path) {
  if (path.extension() == ".mtx") return "mtx";
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  return first.rfind("%%MatrixMarket", 0) == 0 ? "mtx" : "edgelist";
}

inline Graph load_graph(const std::filesystem::path& path, std::string format = "auto") {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open input " + path.string());
  if (format == "auto") format = detect_format(path);
  return format == "mtx" ? parse_matrix_market(in) : parse_edge_list(in);
}

// Parse, lay out, write outputs and (optionally) print the metrics report
// to `out`. Diagnostics go to `err`. Never leaves partial output files.
inline ExitCode run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
    if (cfg.input.empty()) throw ConfigError("no input file given");
    if (cfg.output.empty() && !cfg.metrics) throw ConfigError("nothing to do: give --output and/or --metrics");
    const Graph g = load_graph(cfg.input, cfg.format);
    if (g.node_count() == 0) throw FormatError("input graph has no nodes");

    const auto labels = connected_components(g);
    if (const auto c = component_count(labels); c > 1)
      err << "warning: graph has " << c << " connected components\n";

    const Layout layout = layout_graph(g, cfg.similarity, cfg.optimizer);

    if (!cfg.output.empty()) {
      const std::filesystem::path path(cfg.output);
      if (cfg.out_format == "coords" || cfg.out_format == "both")
        write_file_atomic(path, [&](std::ostream& o) { write_coords(layout, o); });
      if (cfg.out_format == "svg" || cfg.out_format == "both") {
        auto svg_path = path;
        if (cfg.out_format == "both") svg_path += ".svg";
        SvgStyle style;
        style.edge_sample_threshold = cfg.svg_edge_cap;
        write_file_atomic(svg_path, [&](std::ostream& o) { write_svg(g, layout, style, cfg.optimizer.seed, o); });
      }
    }
    if (cfg.metrics) {
      MetricsOptions mo;
      mo.k_eval = cfg.k_eval;
      mo.seed = cfg.optimizer.seed;
      const auto report = compute_metrics(g, layout, mo);
      write_report_text(report, out);
      out << "json = " << report_json(report).dump() << '\n';
    }
    return ExitCode::ok;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::usage;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::usage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::io;
  } catch (const ParseError& e) {
    err << "error: " << cfg.input << ": " << e.what() << '\n';
    return ExitCode::format;
  } catch (const FormatError& e) {
    err << "error: " << cfg.input << ": " << e.what() << '\n';
    return ExitCode::format;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return ExitCode::internal;
  }
}

// ---------------------------------------------------------------------------
// Benchmark

struct BenchRow {
  std::string name;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  double layout_seconds = 0.0;
  std::size_t similarity_bytes = 0;
  std::size_t hierarchy_bytes = 0;
  std::size_t storage_bytes = 0;  // similarity + hierarchy + samplers + positions
  long max_rss_kb = 0;
};

inline long max_rss_kb() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return usage.ru_maxrss;
}

// Times layout_graph alone; loading the graph is outside the clock.
inline BenchRow bench_one(const std::string& name, const Graph& g, const SimilarityParams& sim,
                          const OptimizerParams& opt, Layout* layout_out = nullptr) {
  BenchRow row;
  row.name = name;
  row.nodes = g.node_count();
  row.edges = g.edge_count();
  const auto start = std::chrono::steady_clock::now();
  auto result = layout_graph_detailed(g, sim, opt);
  row.layout_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  row.similarity_bytes = result.similarity_bytes;
  row.hierarchy_bytes = result.hierarchy_bytes;
  row.storage_bytes = result.similarity_bytes + result.hierarchy_bytes + result.sampler_bytes +
                      result.layout.positions.capacity() * sizeof(Point);
  row.max_rss_kb = max_rss_kb();
  if (layout_out) *layout_out = std::move(result.layout);
  return row;
}

inline void write_bench_header(std::ostream& out) {
  out << "graph,nodes,edges,layout_seconds,similarity_bytes,hierarchy_bytes,storage_bytes,max_rss_kb\n";
}

inline void write_bench_row(const BenchRow& r, std::ostream& out) {
  out << r.name << ',' << r.nodes << ',' << r.edges << ',' << std::setprecision(6) << std::fixed << r.layout_seconds
      << ',' << r.similarity_bytes << ',' << r.hierarchy_bytes << ',' << r.storage_bytes << ',' << r.max_rss_kb
      << '\n';
}

// CSV over the given input files, one row each.
inline ExitCode bench(const std::vector<std::string>& inputs, const RunConfig& base, std::ostream& out,
                      std::ostream& err) {
  try {
    base.validate();
    write_bench_header(out);
    for (const auto& path : inputs) {
      const Graph g = load_graph(path, base.format);
      write_bench_row(bench_one(path, g, base.similarity, base.optimizer), out);
    }
    return ExitCode::ok;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::usage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::io;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::format;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::format;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return ExitCode::internal;
  }
}

}  // namespace drgraph
