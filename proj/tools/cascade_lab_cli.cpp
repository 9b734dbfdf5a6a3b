// cascade-lab: command-line front end over the cascade_lab C API.
//
// Exit codes: 0 success, 1 domain error (empty histogram, every grid point
// diverged), 2 usage or I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "cascade_lab.h"

namespace {

struct GraphDeleter {
  void operator()(cl_graph* g) const { cl_graph_free(g); }
};
struct HistogramDeleter {
  void operator()(cl_histogram* h) const { cl_histogram_free(h); }
};
struct TableDeleter {
  void operator()(cl_table* t) const { cl_table_free(t); }
};
using GraphPtr = std::unique_ptr<cl_graph, GraphDeleter>;
using HistogramPtr = std::unique_ptr<cl_histogram, HistogramDeleter>;
using TablePtr = std::unique_ptr<cl_table, TableDeleter>;

struct CommandFailed {
  int code;
};

int exit_code_for(cl_status status) { return status == CL_ERR_DOMAIN ? 1 : 2; }

void check(cl_status status, const std::string& context) {
  if (status == CL_OK) return;
  std::fprintf(stderr, "cascade-lab: %s: %s: %s\n", context.c_str(), cl_status_name(status), cl_last_error());
  throw CommandFailed{exit_code_for(status)};
}

GraphPtr load_graph(const std::string& path) {
  cl_graph* g = nullptr;
  check(cl_graph_load(path.c_str(), &g), "loading graph " + path);
  return GraphPtr(g);
}

HistogramPtr load_histogram(const std::string& path) {
  cl_histogram* h = nullptr;
  check(cl_histogram_load(path.c_str(), &h), "reading histogram " + path);
  return HistogramPtr(h);
}

cl_model parse_model(const std::string& name) {
  cl_model m;
  check(cl_model_parse(name.c_str(), &m), "--model");
  return m;
}

// Output paths must land in an existing directory.
const CLI::Validator kWritablePath(
    [](std::string& path) -> std::string {
      const auto parent = std::filesystem::path(path).parent_path();
      if (!parent.empty() && !std::filesystem::is_directory(parent)) return "directory does not exist: " + parent.string();
      return {};
    },
    "PATH");

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo simulation and fitting of rumor-cascade models on directed graphs"};
  app.require_subcommand(1);
  app.fallthrough();

  unsigned workers = 0;
  bool verbose = false;
  app.add_option("--workers", workers, "Worker threads (default: CASCADE_LAB_WORKERS or all cores)")->envname("CASCADE_LAB_WORKERS");
  app.add_flag("-v,--verbose", verbose, "Print progress details");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Build the retweet graph and fresh-hashtag popularity from an event log");
  std::string events_path, graph_out, popularity_out, split_out, ids_out;
  unsigned fresh_days = 1;
  bool strict = false;
  ingest->add_option("--events", events_path, "Event TSV")->required()->check(CLI::ExistingFile);
  ingest->add_option("--graph-out", graph_out, "Binary graph output")->required()->check(kWritablePath);
  ingest->add_option("--ids-out", ids_out, "Id mapping TSV (default: <graph-out>.ids.tsv)")->check(kWritablePath);
  ingest->add_option("--popularity-out", popularity_out, "Popularity TSV output")->check(kWritablePath);
  ingest->add_option("--split-out", split_out, "Train/test day split manifest")->check(kWritablePath);
  ingest->add_option("--fresh-days", fresh_days, "Full days in the fresh-hashtag window")->check(CLI::PositiveNumber);
  ingest->add_flag("--strict", strict, "Fail on malformed lines instead of skipping them");

  // graph
  auto* graph_cmd = app.add_subcommand("graph", "Convert an edge list or generate a synthetic graph");
  std::string gr_edges, gr_out, gr_ids_out, gr_direction = "forward";
  std::uint64_t gr_star = 0, gr_path = 0, gr_er_nodes = 0, gr_seed = 0;
  double gr_er_p = 0.0, gr_er_mean = 0.0;
  auto* gr_source = graph_cmd->add_option_group("source")->require_option(1);
  gr_source->add_option("--edges", gr_edges, "Text edge list of decimal ids, src<TAB>dst")->check(CLI::ExistingFile);
  gr_source->add_option("--star", gr_star, "Star with this many leaves")->check(CLI::NonNegativeNumber);
  gr_source->add_option("--path", gr_path, "Directed path on this many nodes")->check(CLI::PositiveNumber);
  gr_source->add_option("--erdos-renyi", gr_er_nodes, "Directed G(n, p) on this many nodes")->check(CLI::PositiveNumber);
  graph_cmd->add_option("--p", gr_er_p, "Edge probability for --erdos-renyi")->check(CLI::Range(0.0, 1.0));
  graph_cmd->add_option("--mean-degree", gr_er_mean, "Mean out-degree for --erdos-renyi, instead of --p")
      ->check(CLI::NonNegativeNumber);
  graph_cmd->add_option("--seed", gr_seed, "Random seed for --erdos-renyi");
  graph_cmd->add_option("--direction", gr_direction, "Edge list direction: forward | reverse | undirected")
      ->check(CLI::IsMember({"forward", "reverse", "undirected"}));
  graph_cmd->add_option("--ids-out", gr_ids_out, "Id mapping TSV for --edges")->check(kWritablePath);
  graph_cmd->add_option("--out", gr_out, "Binary graph output")->required()->check(kWritablePath);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Simulate a batch of cascades on a graph");
  std::string sim_graph, sim_model = "alpha-k", hist_out, table_out;
  double sim_alpha = 0.0, sim_lambda = 0.0;
  std::uint64_t sim_runs = 1'000'000, sim_seed = 0, max_rounds = 0, size_cap = 0;
  std::int64_t sim_start = -1;
  simulate->add_option("--graph", sim_graph, "Binary graph")->required()->check(CLI::ExistingFile);
  simulate->add_option("--model", sim_model, "cgm | alpha | alpha-k | multi-exact")
      ->check(CLI::IsMember({"cgm", "alpha", "alpha-k", "multi-exact"}));
  simulate->add_option("--alpha", sim_alpha, "Spreading probability")->required()->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--lambda", sim_lambda, "Injected sources per round (multi-exact)")->check(CLI::NonNegativeNumber);
  simulate->add_option("--runs", sim_runs, "Number of cascades")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim_seed, "Random seed");
  simulate->add_option("--start", sim_start, "Fixed start node (default: uniform per run)");
  simulate->add_option("--max-rounds", max_rounds, "Round cap per cascade (default 10000)");
  simulate->add_option("--size-cap", size_cap, "Truncate cascades at this size (default 1000 for alpha)");
  simulate->add_option("--hist-out", hist_out, "Histogram TSV output")->required()->check(kWritablePath);
  simulate->add_option("--table-out", table_out, "Property table TSV output")->check(kWritablePath);

  // table
  auto* table = app.add_subcommand("table", "Build an alpha^k (size, rounds) property table");
  std::string tab_graph, tab_out;
  double tab_alpha = 0.0;
  std::uint64_t tab_runs = 1'000'000, tab_seed = 0;
  table->add_option("--graph", tab_graph, "Binary graph")->required()->check(CLI::ExistingFile);
  table->add_option("--alpha", tab_alpha, "Spreading probability")->required()->check(CLI::Range(0.0, 1.0));
  table->add_option("--runs", tab_runs, "Number of cascades")->check(CLI::PositiveNumber);
  table->add_option("--seed", tab_seed, "Random seed");
  table->add_option("--out", tab_out, "Property table TSV output")->required()->check(kWritablePath);

  // compound
  auto* compound = app.add_subcommand("compound", "Multi-source rumors from a property table");
  std::string cmp_table, cmp_out;
  double cmp_lambda = 0.0;
  std::uint64_t cmp_runs = 1'000'000, cmp_seed = 0, round_cap = 0;
  compound->add_option("--table", cmp_table, "Property table TSV")->required()->check(CLI::ExistingFile);
  compound->add_option("--lambda", cmp_lambda, "Injected sources per round")->required()->check(CLI::NonNegativeNumber);
  compound->add_option("--runs", cmp_runs, "Number of rumors")->check(CLI::PositiveNumber);
  compound->add_option("--seed", cmp_seed, "Random seed");
  compound->add_option("--round-cap", round_cap, "Divergence cap on rounds (default 1000000)");
  compound->add_option("--hist-out", cmp_out, "Histogram TSV output")->required()->check(kWritablePath);

  // ks
  auto* ks = app.add_subcommand("ks", "Kolmogorov-Smirnov distance of two histograms");
  std::string ks_a, ks_b;
  ks->add_option("--a", ks_a, "Histogram TSV")->required()->check(CLI::ExistingFile);
  ks->add_option("--b", ks_b, "Histogram TSV")->required()->check(CLI::ExistingFile);

  // fit
  auto* fit = app.add_subcommand("fit", "Grid search minimizing K-S against a target histogram");
  std::string fit_graph, fit_model = "alpha-k", fit_target, report_out, validate_target;
  double alpha_lo = 0.0, alpha_hi = 1.0, lambda_lo = 0.0, lambda_hi = 1.0, step = 1e-4;
  std::uint64_t runs_per_point = 1'000'000, fit_seed = 0, fit_size_cap = 0, fit_max_rounds = 0, fit_round_cap = 0;
  unsigned levels = 3;
  fit->add_option("--graph", fit_graph, "Binary graph")->required()->check(CLI::ExistingFile);
  fit->add_option("--model", fit_model, "cgm | alpha | alpha-k | multi-exact | compound")
      ->check(CLI::IsMember({"cgm", "alpha", "alpha-k", "multi-exact", "compound"}));
  fit->add_option("--target", fit_target, "Target histogram or popularity TSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--alpha-lo", alpha_lo)->check(CLI::Range(0.0, 1.0));
  fit->add_option("--alpha-hi", alpha_hi)->check(CLI::Range(0.0, 1.0));
  fit->add_option("--lambda-lo", lambda_lo)->check(CLI::NonNegativeNumber);
  fit->add_option("--lambda-hi", lambda_hi)->check(CLI::NonNegativeNumber);
  fit->add_option("--step", step, "Finest grid step")->check(CLI::PositiveNumber);
  fit->add_option("--runs-per-point", runs_per_point)->check(CLI::PositiveNumber);
  fit->add_option("--levels", levels, "Refinement levels above --step (0: flat sweep)");
  fit->add_option("--seed", fit_seed, "Random seed");
  fit->add_option("--size-cap", fit_size_cap, "Truncate cascades at this size (default 1000 for alpha)");
  fit->add_option("--max-rounds", fit_max_rounds, "Round cap per cascade (default 10000)");
  fit->add_option("--round-cap", fit_round_cap, "Compound divergence cap (default 1000000)");
  fit->add_option("--report-out", report_out, "Fit report TSV")->check(kWritablePath);
  fit->add_option("--validate", validate_target, "Held-out target to validate the fit against")->check(CLI::ExistingFile);

  // bucketize
  auto* bucketize = app.add_subcommand("bucketize", "Logarithmic buckets of a histogram for plotting");
  std::string bk_in, bk_out, cdf_out;
  double base = 2.0;
  bucketize->add_option("--in", bk_in, "Histogram TSV")->required()->check(CLI::ExistingFile);
  bucketize->add_option("--base", base, "Bucket growth factor, > 1")->required();
  bucketize->add_option("--out", bk_out, "Bucket TSV output")->required()->check(kWritablePath);
  bucketize->add_option("--cdf-out", cdf_out, "Also write the CDF TSV")->check(kWritablePath);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*ingest) {
      cl_ingest_options o;
      cl_ingest_options_init(&o);
      o.events_path = events_path.c_str();
      o.graph_out = graph_out.c_str();
      o.id_map_out = ids_out.empty() ? nullptr : ids_out.c_str();
      o.popularity_out = popularity_out.empty() ? nullptr : popularity_out.c_str();
      o.split_out = split_out.empty() ? nullptr : split_out.c_str();
      o.fresh_days = fresh_days;
      o.strict = strict;
      cl_ingest_summary s;
      check(cl_ingest(&o, &s), "ingest");
      std::printf("events=%llu malformed=%llu nodes=%llu edges=%llu hashtags=%llu\n",
                  static_cast<unsigned long long>(s.events), static_cast<unsigned long long>(s.malformed),
                  static_cast<unsigned long long>(s.nodes), static_cast<unsigned long long>(s.edges),
                  static_cast<unsigned long long>(s.hashtags));
      if (!split_out.empty())
        std::printf("train_days=%llu test_days=%llu\n", static_cast<unsigned long long>(s.train_days),
                    static_cast<unsigned long long>(s.test_days));
    } else if (*graph_cmd) {
      cl_graph* g = nullptr;
      if (!gr_edges.empty()) {
        const cl_direction dir = gr_direction == "reverse"      ? CL_DIRECTION_REVERSE
                                 : gr_direction == "undirected" ? CL_DIRECTION_UNDIRECTED
                                                                : CL_DIRECTION_FORWARD;
        check(cl_graph_from_edge_list(gr_edges.c_str(), dir, gr_ids_out.empty() ? nullptr : gr_ids_out.c_str(), &g),
              "reading edges " + gr_edges);
      } else if (graph_cmd->count("--star")) {
        check(cl_graph_star(gr_star, &g), "graph");
      } else if (gr_path) {
        check(cl_graph_path(gr_path, &g), "graph");
      } else {
        double p = gr_er_p;
        if (gr_er_mean > 0.0) p = gr_er_nodes > 1 ? gr_er_mean / static_cast<double>(gr_er_nodes - 1) : 0.0;
        check(cl_graph_erdos_renyi(gr_er_nodes, p, gr_seed, &g), "graph");
      }
      GraphPtr graph(g);
      check(cl_graph_save(graph.get(), gr_out.c_str()), "writing " + gr_out);
      std::printf("nodes=%llu edges=%llu\n", static_cast<unsigned long long>(cl_graph_num_nodes(graph.get())),
                  static_cast<unsigned long long>(cl_graph_num_edges(graph.get())));
    } else if (*simulate) {
      const auto model = parse_model(sim_model);
      auto graph = load_graph(sim_graph);
      cl_sim_options o;
      cl_sim_options_init(&o);
      o.model = model;
      o.alpha = sim_alpha;
      o.lambda = sim_lambda;
      o.runs = sim_runs;
      o.seed = sim_seed;
      o.workers = workers;
      o.max_rounds = max_rounds;
      o.size_cap = size_cap;
      o.start = sim_start;
      cl_histogram* h = nullptr;
      cl_table* t = nullptr;
      check(cl_simulate_batch(graph.get(), &o, &h, table_out.empty() ? nullptr : &t), "simulate");
      HistogramPtr hist(h);
      TablePtr tab(t);
      check(cl_histogram_save(hist.get(), hist_out.c_str()), "writing " + hist_out);
      if (tab) check(cl_table_save(tab.get(), table_out.c_str()), "writing " + table_out);
      std::printf("runs=%llu truncated=%llu\n", static_cast<unsigned long long>(cl_histogram_total(hist.get())),
                  static_cast<unsigned long long>(cl_histogram_truncated(hist.get())));
    } else if (*table) {
      auto graph = load_graph(tab_graph);
      cl_sim_options o;
      cl_sim_options_init(&o);
      o.model = CL_MODEL_ALPHA_K;
      o.alpha = tab_alpha;
      o.runs = tab_runs;
      o.seed = tab_seed;
      o.workers = workers;
      cl_histogram* h = nullptr;
      cl_table* t = nullptr;
      check(cl_simulate_batch(graph.get(), &o, &h, &t), "table");
      HistogramPtr hist(h);
      TablePtr tab(t);
      check(cl_table_save(tab.get(), tab_out.c_str()), "writing " + tab_out);
      std::printf("entries=%llu total=%llu\n", static_cast<unsigned long long>(cl_table_entries(tab.get())),
                  static_cast<unsigned long long>(cl_table_total(tab.get())));
    } else if (*compound) {
      cl_table* t = nullptr;
      check(cl_table_load(cmp_table.c_str(), &t), "reading table " + cmp_table);
      TablePtr tab(t);
      cl_compound_options o;
      cl_compound_options_init(&o);
      o.lambda = cmp_lambda;
      o.runs = cmp_runs;
      o.seed = cmp_seed;
      o.workers = workers;
      o.round_cap = round_cap;
      cl_histogram* h = nullptr;
      check(cl_compound_batch(tab.get(), &o, &h), "compound");
      HistogramPtr hist(h);
      check(cl_histogram_save(hist.get(), cmp_out.c_str()), "writing " + cmp_out);
      std::printf("runs=%llu diverged=%llu\n", static_cast<unsigned long long>(cmp_runs),
                  static_cast<unsigned long long>(cl_histogram_diverged(hist.get())));
    } else if (*ks) {
      auto a = load_histogram(ks_a);
      auto b = load_histogram(ks_b);
      double stat = 0.0;
      std::uint64_t at = 0;
      check(cl_ks(a.get(), b.get(), &stat, &at), "ks");
      std::printf("ks=%.6f at=%llu\n", stat, static_cast<unsigned long long>(at));
    } else if (*fit) {
      const auto model = parse_model(fit_model);
      auto graph = load_graph(fit_graph);
      auto target = load_histogram(fit_target);
      cl_fit_options o;
      cl_fit_options_init(&o);
      o.model = model;
      o.alpha_lo = alpha_lo;
      o.alpha_hi = alpha_hi;
      o.lambda_lo = lambda_lo;
      o.lambda_hi = lambda_hi;
      o.step = step;
      o.runs_per_point = runs_per_point;
      o.refinement_levels = levels;
      o.seed = fit_seed;
      o.workers = workers;
      o.size_cap = fit_size_cap;
      o.max_rounds = fit_max_rounds;
      o.round_cap = fit_round_cap;
      cl_fit_summary s;
      check(cl_fit(graph.get(), target.get(), &o, report_out.empty() ? nullptr : report_out.c_str(), &s), "fit");
      if (s.has_lambda)
        std::printf("best alpha=%.10g lambda=%.10g ks=%.10g\n", s.best_alpha, s.best_lambda, s.best_ks);
      else
        std::printf("best alpha=%.10g lambda=- ks=%.10g\n", s.best_alpha, s.best_ks);
      if (verbose)
        std::fprintf(stderr, "evaluations=%llu diverged_points=%llu\n", static_cast<unsigned long long>(s.evaluations),
                     static_cast<unsigned long long>(s.diverged_points));
      if (!validate_target.empty()) {
        auto test = load_histogram(validate_target);
        double test_ks = 0.0, diff = 0.0;
        check(cl_validate(graph.get(), &o, &s, test.get(), runs_per_point, fit_seed + 1, &test_ks, &diff), "validate");
        std::printf("validation train_ks=%.10g test_ks=%.10g difference=%.10g\n", s.best_ks, test_ks, diff);
      }
    } else if (*bucketize) {
      if (!(base > 1.0)) {
        std::fprintf(stderr, "cascade-lab: bucketize: --base must be > 1\n");
        return 2;
      }
      auto hist = load_histogram(bk_in);
      check(cl_bucketize_save(hist.get(), base, bk_out.c_str()), "bucketize");
      if (!cdf_out.empty()) check(cl_histogram_save_cdf(hist.get(), cdf_out.c_str()), "writing " + cdf_out);
    }
  } catch (const CommandFailed& f) {
    return f.code;
  }
  return 0;
}
