#include "cascade_lab.h"

#include <fstream>
#include <new>
#include <string>

#include "cascade/compound.hpp"
#include "cascade/diffusion.hpp"
#include "cascade/error.hpp"
#include "cascade/fit.hpp"
#include "cascade/formats.hpp"
#include "cascade/graph.hpp"
#include "cascade/ingest.hpp"
#include "cascade/io.hpp"
#include "cascade/parallel.hpp"
#include "cascade/stats.hpp"

struct cl_graph {
  cascade::Graph graph;
};

struct cl_histogram {
  cascade::SizeHistogram hist;
  cascade::formats::Metadata meta;
};

struct cl_table {
  cascade::PropertyTable table;
  cascade::formats::Metadata meta;
};

namespace {

thread_local std::string g_last_error;

cl_status fail(cl_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
cl_status guarded(Fn&& fn) {
  try {
    fn();
    return CL_OK;
  } catch (const cascade::InvalidArgument& e) {
    return fail(CL_ERR_INVALID_ARGUMENT, e.what());
  } catch (const cascade::IoError& e) {
    return fail(CL_ERR_IO, e.what());
  } catch (const cascade::FormatError& e) {
    return fail(CL_ERR_FORMAT, e.what());
  } catch (const cascade::ParseError& e) {
    return fail(CL_ERR_PARSE, e.what());
  } catch (const cascade::DomainError& e) {
    return fail(CL_ERR_DOMAIN, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CL_ERR_INTERNAL, e.what());
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw cascade::InvalidArgument(what);
}

unsigned workers_or_default(unsigned w) { return w == 0 ? cascade::default_workers() : w; }

std::optional<std::uint64_t> size_cap_from(std::uint64_t raw, cl_model model) {
  if (raw == CL_NO_SIZE_CAP) return std::nullopt;
  if (raw == 0) return model == CL_MODEL_ALPHA ? std::optional<std::uint64_t>(cascade::kDefaultAlphaSizeCap) : std::nullopt;
  return raw;
}

cascade::Model sim_model(cl_model m) {
  switch (m) {
    case CL_MODEL_CGM: return cascade::Model::cgm;
    case CL_MODEL_ALPHA: return cascade::Model::alpha;
    case CL_MODEL_ALPHA_K: return cascade::Model::alpha_k;
    case CL_MODEL_MULTI_EXACT: return cascade::Model::multi_exact;
    default: throw cascade::InvalidArgument("model cannot be simulated directly");
  }
}

cascade::FitModel fit_model(cl_model m) {
  switch (m) {
    case CL_MODEL_CGM: return cascade::FitModel::cgm;
    case CL_MODEL_ALPHA: return cascade::FitModel::alpha;
    case CL_MODEL_ALPHA_K: return cascade::FitModel::alpha_k;
    case CL_MODEL_MULTI_EXACT: return cascade::FitModel::multi_exact;
    case CL_MODEL_COMPOUND: return cascade::FitModel::compound;
  }
  throw cascade::InvalidArgument("unknown model");
}

cascade::BatchOptions batch_options(const cl_graph* g, const cl_sim_options* o) {
  require(g && o, "null argument");
  cascade::BatchOptions b;
  b.model = sim_model(o->model);
  b.params.alpha = o->alpha;
  b.params.max_rounds = o->max_rounds == 0 ? 10'000 : o->max_rounds;
  b.params.size_cap = size_cap_from(o->size_cap, o->model);
  b.params.validate();
  require(o->lambda >= 0.0, "lambda must be >= 0");
  b.lambda = o->lambda;
  b.num_runs = o->runs;
  b.seed = o->seed;
  b.workers = workers_or_default(o->workers);
  if (o->start >= 0) {
    require(static_cast<std::uint64_t>(o->start) < g->graph.num_nodes(), "start node out of range");
    b.start = static_cast<cascade::NodeId>(o->start);
  }
  return b;
}

cascade::FitContext fit_context(const cl_graph* g, const cl_fit_options* o) {
  require(g && o, "null argument");
  cascade::FitContext ctx;
  ctx.graph = &g->graph;
  ctx.model = fit_model(o->model);
  ctx.max_rounds = o->max_rounds == 0 ? 10'000 : o->max_rounds;
  ctx.size_cap = size_cap_from(o->size_cap, o->model);
  ctx.round_cap = o->round_cap == 0 ? cascade::kDefaultRoundCap : o->round_cap;
  ctx.workers = workers_or_default(o->workers);
  return ctx;
}

}  // namespace

extern "C" {

const char* cl_last_error(void) { return g_last_error.c_str(); }

const char* cl_status_name(cl_status status) {
  switch (status) {
    case CL_OK: return "ok";
    case CL_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CL_ERR_IO: return "i/o error";
    case CL_ERR_FORMAT: return "format error";
    case CL_ERR_PARSE: return "parse error";
    case CL_ERR_DOMAIN: return "domain error";
    case CL_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

cl_status cl_model_parse(const char* name, cl_model* out) {
  return guarded([&] {
    require(name && out, "null argument");
    const auto m = cascade::parse_fit_model(name);
    if (!m) throw cascade::InvalidArgument(std::string("unknown model '") + name + "'");
    switch (*m) {
      case cascade::FitModel::cgm: *out = CL_MODEL_CGM; break;
      case cascade::FitModel::alpha: *out = CL_MODEL_ALPHA; break;
      case cascade::FitModel::alpha_k: *out = CL_MODEL_ALPHA_K; break;
      case cascade::FitModel::multi_exact: *out = CL_MODEL_MULTI_EXACT; break;
      case cascade::FitModel::compound: *out = CL_MODEL_COMPOUND; break;
    }
  });
}

cl_status cl_graph_load(const char* path, cl_graph** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new cl_graph{cascade::load_graph(path)};
  });
}

cl_status cl_graph_save(const cl_graph* graph, const char* path) {
  return guarded([&] {
    require(graph && path, "null argument");
    cascade::save_graph(graph->graph, path);
  });
}

cl_status cl_graph_from_edge_list(const char* path, cl_direction direction, const char* id_map_path, cl_graph** out) {
  return guarded([&] {
    require(path && out, "null argument");
    require(direction >= CL_DIRECTION_FORWARD && direction <= CL_DIRECTION_UNDIRECTED, "unknown direction");
    const auto edges = cascade::read_edge_list(path);
    auto built = cascade::build_graph(edges, static_cast<cascade::DirectionMode>(direction));
    if (id_map_path) {
      std::string text;
      for (std::size_t i = 0; i < built.external_ids.size(); ++i)
        text += std::to_string(built.external_ids[i]) + '\t' + std::to_string(i) + '\n';
      cascade::io::write_text_atomic(id_map_path, text);
    }
    *out = new cl_graph{std::move(built.graph)};
  });
}

cl_status cl_graph_star(uint64_t leaves, cl_graph** out) {
  return guarded([&] {
    require(out, "null argument");
    *out = new cl_graph{cascade::generate_star(leaves)};
  });
}

cl_status cl_graph_path(uint64_t n, cl_graph** out) {
  return guarded([&] {
    require(out, "null argument");
    *out = new cl_graph{cascade::generate_path(n)};
  });
}

cl_status cl_graph_erdos_renyi(uint64_t n, double p, uint64_t seed, cl_graph** out) {
  return guarded([&] {
    require(out, "null argument");
    *out = new cl_graph{cascade::generate_erdos_renyi(n, p, seed)};
  });
}

uint64_t cl_graph_num_nodes(const cl_graph* graph) { return graph ? graph->graph.num_nodes() : 0; }
uint64_t cl_graph_num_edges(const cl_graph* graph) { return graph ? graph->graph.num_edges() : 0; }
cl_direction cl_graph_direction(const cl_graph* graph) {
  return graph ? static_cast<cl_direction>(graph->graph.direction_mode()) : CL_DIRECTION_FORWARD;
}

cl_status cl_graph_neighbors(const cl_graph* graph, uint32_t node, const uint32_t** neighbors, size_t* count) {
  return guarded([&] {
    require(graph && neighbors && count, "null argument");
    require(node < graph->graph.num_nodes(), "node out of range");
    const auto span = graph->graph.neighbors(node);
    *neighbors = span.data();
    *count = span.size();
  });
}

void cl_graph_free(cl_graph* graph) { delete graph; }

void cl_ingest_options_init(cl_ingest_options* options) {
  if (!options) return;
  *options = cl_ingest_options{};
  options->fresh_days = 1;
}

cl_status cl_ingest(const cl_ingest_options* o, cl_ingest_summary* summary) {
  return guarded([&] {
    require(o && o->events_path && o->graph_out, "events_path and graph_out are required");
    require(o->fresh_days >= 1, "fresh_days must be >= 1");
    std::ifstream in(o->events_path);
    if (!in) throw cascade::IoError(std::string("cannot open ") + o->events_path);
    cascade::ParseOptions parse_options;
    parse_options.strict = o->strict != 0;
    const auto parsed = cascade::parse_events(in, parse_options);

    const auto edges = cascade::build_retweet_edges(parsed.events);
    const auto graph = edges.to_graph();
    cascade::save_graph(graph, o->graph_out);
    const std::string id_map = o->id_map_out ? o->id_map_out : std::string(o->graph_out) + ".ids.tsv";
    cascade::io::write_text_atomic(id_map, cascade::formats::id_map_tsv(edges.ids));

    cl_ingest_summary s{};
    s.events = parsed.events.size();
    s.malformed = parsed.malformed;
    s.nodes = graph.num_nodes();
    s.edges = graph.num_edges();

    const auto window = cascade::default_fresh_window(parsed.events, o->fresh_days);
    const auto popularity = cascade::compute_popularity(parsed.events, window);
    s.hashtags = popularity.total;
    if (o->popularity_out) cascade::io::write_text_atomic(o->popularity_out, cascade::formats::popularity_tsv(popularity));

    if (o->split_out) {
      const auto split = cascade::split_days(parsed.events);
      s.train_days = split.train.size();
      s.test_days = split.test.size();
      cascade::io::write_text_atomic(o->split_out, cascade::formats::day_split_tsv(split));
    }
    if (summary) *summary = s;
  });
}

void cl_sim_options_init(cl_sim_options* options) {
  if (!options) return;
  *options = cl_sim_options{};
  options->model = CL_MODEL_ALPHA_K;
  options->runs = 1;
  options->start = -1;
}

cl_status cl_simulate_one(const cl_graph* graph, const cl_sim_options* options, uint64_t stream_index,
                          cl_cascade_outcome* out) {
  return guarded([&] {
    require(out, "null argument");
    const auto b = batch_options(graph, options);
    require(graph->graph.num_nodes() > 0, "cannot simulate on an empty graph");
    cascade::RngStream rng(b.seed, stream_index);
    const auto start = b.start ? *b.start : static_cast<cascade::NodeId>(rng.below(graph->graph.num_nodes()));
    cascade::Simulator sim(graph->graph);
    const auto r = sim.run(b.model, b.params, b.lambda, start, rng);
    *out = cl_cascade_outcome{r.spreaders, r.informed, r.rounds, r.truncated ? 1 : 0};
  });
}

cl_status cl_simulate_batch(const cl_graph* graph, const cl_sim_options* options, cl_histogram** hist_out,
                            cl_table** table_out) {
  return guarded([&] {
    require(hist_out, "null argument");
    auto b = batch_options(graph, options);
    b.collect_properties = table_out != nullptr;
    auto result = cascade::run_batch(graph->graph, b);
    cascade::formats::Metadata meta{{"runs", result.runs}, {"truncated", result.truncated}};
    if (table_out) *table_out = new cl_table{cascade::PropertyTable::from_counts(result.properties), meta};
    *hist_out = new cl_histogram{std::move(result.histogram), meta};
  });
}

cl_status cl_histogram_new(cl_histogram** out) {
  return guarded([&] {
    require(out, "null argument");
    *out = new cl_histogram{};
  });
}

cl_status cl_histogram_add(cl_histogram* hist, uint64_t size, uint64_t count) {
  return guarded([&] {
    require(hist, "null argument");
    hist->hist.add(size, count);
  });
}

cl_status cl_histogram_load(const char* path, cl_histogram** out) {
  return guarded([&] {
    require(path && out, "null argument");
    const auto text = cascade::io::read_text(path);
    auto hist = cascade::formats::parse_histogram_tsv(text);
    cascade::formats::Metadata meta;
    for (const auto& [k, v] : cascade::formats::parse_metadata(text)) meta.emplace_back(k, v);
    *out = new cl_histogram{std::move(hist), std::move(meta)};
  });
}

cl_status cl_histogram_save(const cl_histogram* hist, const char* path) {
  return guarded([&] {
    require(hist && path, "null argument");
    cascade::io::write_text_atomic(path, cascade::formats::histogram_tsv(hist->hist, hist->meta));
  });
}

cl_status cl_histogram_save_cdf(const cl_histogram* hist, const char* path) {
  return guarded([&] {
    require(hist && path, "null argument");
    cascade::io::write_text_atomic(path, cascade::formats::cdf_tsv(cascade::to_cdf(hist->hist)));
  });
}

cl_status cl_histogram_merge(const cl_histogram* a, const cl_histogram* b, cl_histogram** out) {
  return guarded([&] {
    require(a && b && out, "null argument");
    *out = new cl_histogram{cascade::merge(a->hist, b->hist), {}};
  });
}

uint64_t cl_histogram_total(const cl_histogram* hist) { return hist ? hist->hist.total() : 0; }
uint64_t cl_histogram_count(const cl_histogram* hist, uint64_t size) { return hist ? hist->hist.count(size) : 0; }

static uint64_t meta_value(const cl_histogram* hist, const char* key) {
  if (!hist) return 0;
  for (const auto& [k, v] : hist->meta)
    if (k == key) return v;
  return 0;
}

uint64_t cl_histogram_truncated(const cl_histogram* hist) { return meta_value(hist, "truncated"); }
uint64_t cl_histogram_diverged(const cl_histogram* hist) { return meta_value(hist, "diverged"); }

void cl_histogram_free(cl_histogram* hist) { delete hist; }

cl_status cl_ks(const cl_histogram* a, const cl_histogram* b, double* statistic, uint64_t* location) {
  return guarded([&] {
    require(a && b && statistic, "null argument");
    const auto r = cascade::ks_statistic(a->hist, b->hist);
    *statistic = r.statistic;
    if (location) *location = r.location;
  });
}

cl_status cl_bucketize_save(const cl_histogram* hist, double base, const char* path) {
  return guarded([&] {
    require(hist && path, "null argument");
    if (hist->hist.empty()) throw cascade::DomainError("cannot bucketize an empty histogram");
    cascade::io::write_text_atomic(path, cascade::formats::buckets_tsv(cascade::log_bucketize(hist->hist, base)));
  });
}

cl_status cl_table_load(const char* path, cl_table** out) {
  return guarded([&] {
    require(path && out, "null argument");
    const auto text = cascade::io::read_text(path);
    auto entries = cascade::formats::parse_property_table_tsv(text);
    if (entries.empty()) throw cascade::DomainError(std::string("property table ") + path + " is empty");
    *out = new cl_table{cascade::PropertyTable::build(std::move(entries)), {}};
  });
}

cl_status cl_table_save(const cl_table* table, const char* path) {
  return guarded([&] {
    require(table && path, "null argument");
    cascade::io::write_text_atomic(path, cascade::formats::property_table_tsv(table->table, table->meta));
  });
}

uint64_t cl_table_entries(const cl_table* table) { return table ? table->table.entries().size() : 0; }
uint64_t cl_table_total(const cl_table* table) { return table ? table->table.total() : 0; }
void cl_table_free(cl_table* table) { delete table; }

void cl_compound_options_init(cl_compound_options* options) {
  if (!options) return;
  *options = cl_compound_options{};
  options->runs = 1;
}

cl_status cl_compound_batch(const cl_table* table, const cl_compound_options* o, cl_histogram** out) {
  return guarded([&] {
    require(table && o && out, "null argument");
    cascade::CompoundOptions c;
    c.lambda = o->lambda;
    c.num_runs = o->runs;
    c.seed = o->seed;
    c.workers = workers_or_default(o->workers);
    c.round_cap = o->round_cap == 0 ? cascade::kDefaultRoundCap : o->round_cap;
    auto result = cascade::run_compound_batch(table->table, c);
    *out = new cl_histogram{std::move(result.histogram), {{"runs", result.runs}, {"diverged", result.diverged}}};
  });
}

void cl_fit_options_init(cl_fit_options* options) {
  if (!options) return;
  *options = cl_fit_options{};
  options->model = CL_MODEL_ALPHA_K;
  options->alpha_hi = 1.0;
  options->lambda_hi = 1.0;
  options->step = 1e-4;
  options->runs_per_point = 1'000'000;
  options->refinement_levels = 3;
}

cl_status cl_fit(const cl_graph* graph, const cl_histogram* target, const cl_fit_options* o, const char* report_path,
                 cl_fit_summary* out) {
  return guarded([&] {
    require(target, "null argument");
    const auto ctx = fit_context(graph, o);
    cascade::GridSpec spec;
    spec.alpha_range = {o->alpha_lo, o->alpha_hi};
    if (cascade::takes_lambda(ctx.model)) spec.lambda_range = std::make_pair(o->lambda_lo, o->lambda_hi);
    spec.step = o->step;
    spec.runs_per_point = o->runs_per_point;
    spec.refinement_levels = o->refinement_levels;
    const auto result = cascade::grid_search(ctx, target->hist, spec, o->seed);
    if (report_path) cascade::io::write_text_atomic(report_path, cascade::format_fit_report(result));
    if (out) {
      cl_fit_summary s{};
      s.best_alpha = result.best_alpha;
      s.has_lambda = result.best_lambda ? 1 : 0;
      s.best_lambda = result.best_lambda.value_or(0.0);
      s.best_ks = result.best_ks;
      s.evaluations = result.evaluations.size();
      for (const auto& ev : result.evaluations) s.diverged_points += ev.diverged != 0;
      *out = s;
    }
  });
}

cl_status cl_validate(const cl_graph* graph, const cl_fit_options* o, const cl_fit_summary* fit,
                      const cl_histogram* test_target, uint64_t runs, uint64_t seed, double* test_ks,
                      double* difference) {
  return guarded([&] {
    require(fit && test_target && test_ks && difference, "null argument");
    const auto ctx = fit_context(graph, o);
    cascade::FitResult r;
    r.best_alpha = fit->best_alpha;
    if (fit->has_lambda) r.best_lambda = fit->best_lambda;
    r.best_ks = fit->best_ks;
    const auto report = cascade::validate(ctx, r, test_target->hist, runs, seed);
    *test_ks = report.test_ks;
    *difference = report.difference;
  });
}

}  // extern "C"
