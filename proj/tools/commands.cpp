#include "commands.hpp"

#include <fmt/format.h>
#include <zlib.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include "rsgrove/assign.hpp"
#include "rsgrove/errors.hpp"
#include "rsgrove/generators.hpp"
#include "rsgrove/ingest.hpp"
#include "rsgrove/join.hpp"
#include "rsgrove/metrics.hpp"
#include "rsgrove/partitioner.hpp"
#include "rsgrove/queries.hpp"
#include "rsgrove/version.hpp"

namespace rsgrove::cli {

namespace fs = std::filesystem;

RunConfig ConfigFlags::resolve() const {
  RunConfig cfg;
  if (!config_path.empty()) {
    for (const auto& [key, value] : read_config_file(config_path)) cfg.set(key, value);
  }
  for (const auto& [key, opt] : options) {
    if (opt->count() > 0) cfg.set(key, values.at(key));
  }
  return cfg;
}

namespace {

// ------------------------------------------------------------- helpers ---

ConfigFlags& add_config_flags(CLI::App* sub, std::vector<std::unique_ptr<ConfigFlags>>& store) {
  store.push_back(std::make_unique<ConfigFlags>());
  ConfigFlags& f = *store.back();
  sub->add_option("--config", f.config_path, "key=value settings file; flags override it");
  const std::map<std::string, std::string> help{
      {"block-size", "block size B, e.g. 134217728 or 128MiB (default 128MiB)"},
      {"alpha", "balance factor m/M in (0,1) (default 0.95)"},
      {"rho", "minimum split ratio in [0,0.5] (default 0.4)"},
      {"ratio", "sampling ratio in (0,1] (default 0.01)"},
      {"seed", "random seed"},
      {"partitioner", "grove|str|kdtree|zcurve|hcurve (default grove)"},
      {"mode", "overlap|disjoint (default overlap)"},
      {"strategy", "grove strategy blackbox|graybox|grove (default grove)"},
      {"grid", "histogram cells per dimension (default from the partition count)"},
      {"schema", "record layout, e.g. point:2, point:2:3,4 or envelope:2 (default point:2)"},
      {"delimiter", "field delimiter: one character, tab, comma or space (default ,)"},
      {"capacity", "override the partition capacity M"},
      {"threads", "worker threads (default: hardware concurrency)"},
  };
  for (const std::string& key : config_keys()) {
    f.options[key] = sub->add_option("--" + key, f.values[key], help.at(key));
  }
  return f;
}

class TextOutput {
 public:
  explicit TextOutput(const std::string& path) : path_(path) {
    if (path == "-") {
      file_ = stdout;
    } else if (path.size() > 3 && path.ends_with(".gz")) {
      gz_ = gzopen(path.c_str(), "wb");
      if (!gz_) throw DataError("cannot write '" + path + "'");
    } else {
      file_ = std::fopen(path.c_str(), "wb");
      if (!file_) throw DataError("cannot write '" + path + "'");
    }
  }
  ~TextOutput() {
    if (gz_) gzclose(gz_);
    if (file_ && file_ != stdout) std::fclose(file_);
  }
  TextOutput(const TextOutput&) = delete;
  TextOutput& operator=(const TextOutput&) = delete;

  void line(std::string_view text) {
    bool ok = true;
    if (gz_) {
      ok = gzwrite(gz_, text.data(), static_cast<unsigned>(text.size())) ==
               static_cast<int>(text.size()) &&
           gzputc(gz_, '\n') == '\n';
    } else {
      ok = std::fwrite(text.data(), 1, text.size(), file_) == text.size() &&
           std::fputc('\n', file_) != EOF;
    }
    if (!ok) throw DataError("write failed for '" + path_ + "'");
  }

  void close() {
    if (gz_ && gzclose(gz_) != Z_OK) {
      gz_ = nullptr;
      throw DataError("write failed for '" + path_ + "'");
    }
    gz_ = nullptr;
    if (file_ && file_ != stdout && std::fclose(file_) != 0) {
      file_ = nullptr;
      throw DataError("write failed for '" + path_ + "'");
    }
    if (file_ == stdout) std::fflush(stdout);
    file_ = nullptr;
  }

 private:
  std::string path_;
  FILE* file_ = nullptr;
  gzFile gz_ = nullptr;
};

Schema schema_for(const RunConfig& cfg, std::size_t dim) {
  if (cfg.explicit_keys.count("schema")) {
    Schema s = cfg.parsed_schema();
    if (s.dim != dim) {
      throw DataError(fmt::format("schema has d={} but the data has d={}", s.dim, dim));
    }
    return s;
  }
  return Schema::parse("point:" + std::to_string(dim), cfg.delimiter);
}

std::uint64_t seed_of(const RunConfig& cfg) { return cfg.seed.value_or(1); }

struct SampleRun {
  WeightedSample sample;
  GridHistogram hist;
  ParseStats parse;
};

SampleRun sample_input(const std::string& input, const RunConfig& cfg, bool with_histogram) {
  const Schema schema = cfg.parsed_schema();
  Sampler sampler(schema.dim, cfg.ratio, seed_of(cfg));
  SampleRun out;
  out.parse = for_each_record(input, schema, [&](const Record& r) { sampler.add(r); });
  out.sample = std::move(sampler).finish();
  if (with_histogram) {
    if (input == "-") throw UsageError("histograms need a file input, not stdin");
    const auto partitions = static_cast<std::size_t>(
        std::ceil(static_cast<double>(out.sample.total_bytes) / cfg.block_size));
    std::vector<std::size_t> cells = cfg.grid > 0
                                         ? std::vector<std::size_t>(schema.dim, cfg.grid)
                                         : default_grid(std::max<std::size_t>(1, partitions),
                                                        schema.dim);
    out.hist = GridHistogram(out.sample.domain, cells);
    for_each_record(input, schema, [&](const Record& r) { out.hist.add(r); });
  }
  return out;
}

void warn_malformed(const ParseStats& p) {
  if (p.malformed > 0) {
    fmt::print(stderr, "warning: skipped {} malformed line(s) of {}\n", p.malformed, p.lines);
  }
}

void warn_dropped(const QualityReport& r) {
  if (r.dropped_empty > 0) {
    fmt::print(stderr, "warning: dropped {} empty partition(s)\n", r.dropped_empty);
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// --------------------------------------------------------- subcommands ---

struct GenerateArgs {
  std::string out;
  std::string dist = "uniform";
  std::size_t count = 1000;
  std::size_t dim = 2;
  double perc = 0.05;
  double buf = 0.1;
  std::size_t pad_min = 0;
  std::size_t pad_max = 0;
  double box_size = 0.0;
};

int run_generate(const GenerateArgs& a, const RunConfig& cfg) {
  GeneratorSpec spec;
  if (a.dist == "uniform") {
    spec.distribution = Distribution::uniform;
  } else if (a.dist == "diagonal") {
    spec.distribution = Distribution::diagonal;
  } else {
    throw UsageError("unknown distribution '" + a.dist + "' (uniform|diagonal)");
  }
  spec.count = a.count;
  spec.dim = a.dim;
  spec.seed = seed_of(cfg);
  spec.perc = a.perc;
  spec.buf = a.buf;
  spec.pad_min = a.pad_min;
  spec.pad_max = a.pad_max;
  spec.box_size = a.box_size;
  validate(spec);
  TextOutput out(a.out);
  generate(spec, [&](std::string_view line) { out.line(line); });
  out.close();
  if (a.out != "-") {
    fmt::print("wrote {} records to {} (schema {})\n", a.count, a.out,
               generated_schema(spec).to_string());
  }
  return 0;
}

struct SampleArgs {
  std::string input;
  std::string sample_out;
  std::string hist_out;
};

int run_sample(const SampleArgs& a, const RunConfig& cfg) {
  const SampleRun run = sample_input(a.input, cfg, !a.hist_out.empty());
  warn_malformed(run.parse);
  save_sample(run.sample, a.sample_out);
  fmt::print("records {} bytes {} sampled {}\n", run.sample.record_count,
             run.sample.total_bytes, run.sample.size());
  if (!a.hist_out.empty()) {
    save_histogram(run.hist, a.hist_out);
    fmt::print("histogram cells {} clamped {}\n", run.hist.cell_count(), run.hist.clamped());
  }
  return 0;
}

struct PartitionArgs {
  std::string sample;
  std::string hist;
  std::string out;
};

int run_partition(const PartitionArgs& a, const RunConfig& cfg) {
  WeightedSample sample = load_sample(a.sample);
  if (!a.hist.empty()) sample = assign_weights(sample, load_histogram(a.hist));
  GroveStats stats;
  const PartitionScheme scheme = make_partition(sample, cfg.partitioner_options(), &stats);
  save_scheme(scheme, a.out);
  fmt::print("partitioner {} partitions {} M {:.10g} m {:.10g}\n", scheme.partitioner, scheme.size(),
             scheme.capacity, scheme.min_capacity);
  if (scheme.partitioner == "grove") {
    fmt::print("splits {} relaxed {} corrections {} depth {}\n", stats.splits,
               stats.relaxed_splits, stats.corrections, stats.max_depth);
  }
  return 0;
}

struct AssignArgs {
  std::string input;
  std::string scheme;
  std::string out_dir;
};

int run_assign(const AssignArgs& a, const RunConfig& cfg) {
  const PartitionScheme scheme = load_scheme(a.scheme);
  const AssignReport report =
      run_assignment(a.input, schema_for(cfg, scheme.dim), scheme, a.out_dir, cfg.block_size);
  warn_malformed(report.parse);
  std::uint64_t stored = 0;
  for (const PartitionStats& p : report.manifest.partitions) stored += p.record_count;
  fmt::print("partitions {} records {} stored copies {}\n", report.manifest.partitions.size(),
             report.parse.lines - report.parse.malformed, stored);
  return 0;
}

struct MetricsArgs {
  std::string dir;
  std::string manifest;
  std::string format = "table";
};

int run_metrics(const MetricsArgs& a, const RunConfig& cfg) {
  if (a.dir.empty() == a.manifest.empty()) throw UsageError("give exactly one of --dir or --manifest");
  const std::string path =
      a.manifest.empty() ? (fs::path(a.dir) / kManifestName).string() : a.manifest;
  const Manifest m = read_manifest(path);
  const double block = cfg.explicit_keys.count("block-size") || !(m.block_size > 0.0)
                           ? cfg.block_size
                           : m.block_size;
  const QualityReport r = quality_report(m.partitions, block);
  warn_dropped(r);
  if (a.format == "json") {
    std::cout << report_json(r);
  } else if (a.format == "csv") {
    std::cout << report_csv_header() << '\n' << report_csv_row(r) << '\n';
  } else if (a.format == "table") {
    std::cout << report_table(r);
  } else {
    throw UsageError("unknown format '" + a.format + "' (table|json|csv)");
  }
  return 0;
}

struct RangeArgs {
  std::string dir;
  std::size_t count = 100;
  double area = 1e-4;
  std::string out = "-";
};

int run_rangequery(const RangeArgs& a, const RunConfig& cfg) {
  const PartitionedData data = load_partitions(a.dir);
  Envelope domain = Envelope::empty(data.manifest.dim);
  for (const PartitionStats& p : data.manifest.partitions) {
    if (p.record_count > 0) domain.extend(p.mbb);
  }
  if (domain.is_empty()) throw DataError("no records to query");
  const std::vector<Envelope> queries = gen_queries(domain, a.count, a.area, seed_of(cfg));

  const std::size_t threads = std::min(cfg.thread_count(), std::max<std::size_t>(1, a.count));
  std::vector<QueryOutcome> results(queries.size());
  const std::size_t chunk = (queries.size() + threads - 1) / std::max<std::size_t>(1, threads);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        const std::size_t lo = std::min(queries.size(), t * chunk);
        const std::size_t hi = std::min(queries.size(), lo + chunk);
        auto part = run_range_queries(
            data, std::span<const Envelope>(queries).subspan(lo, hi - lo));
        std::move(part.begin(), part.end(), results.begin() + static_cast<std::ptrdiff_t>(lo));
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  TextOutput out(a.out);
  out.line("id,blocks,matches,micros");
  for (std::size_t i = 0; i < results.size(); ++i) {
    out.line(fmt::format("{},{},{},{:.1f}", i, results[i].blocks, results[i].matches,
                         results[i].micros));
  }
  out.close();
  return 0;
}

struct JoinArgs {
  std::string left;
  std::string right;
  std::string out = "-";
};

int run_sjoin(const JoinArgs& a, const RunConfig&) {
  const PartitionedData left = load_partitions(a.left);
  const PartitionedData right = load_partitions(a.right);
  const auto start = std::chrono::steady_clock::now();
  const JoinPlan plan = plan_join(left.manifest, right.manifest);
  const std::uint64_t pairs = spatial_join(left, right, plan);
  const double millis =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  TextOutput out(a.out);
  out.line("pair_count,planned_pairs,block_cost,millis");
  out.line(fmt::format("{},{},{},{:.1f}", pairs, plan.pairs.size(), plan.block_cost, millis));
  out.close();
  return 0;
}

struct SweepArgs {
  std::string input;
  std::string partitioners = "grove,str,kdtree,zcurve,hcurve";
  std::string ratios;
  std::string work_dir;
  std::string out = "-";
};

int run_sweep(const SweepArgs& a, RunConfig cfg) {
  if (!cfg.seed) throw UsageError("sweep needs an explicit --seed");
  const std::vector<std::string> names = split_list(a.partitioners);
  if (names.empty()) throw UsageError("no partitioners given");
  std::vector<double> ratios;
  for (const std::string& r : split_list(a.ratios)) {
    RunConfig probe;
    probe.set("ratio", r);
    ratios.push_back(probe.ratio);
  }
  if (ratios.empty()) ratios.push_back(cfg.ratio);
  const fs::path work = a.work_dir.empty() ? fs::path(a.input + ".sweep") : fs::path(a.work_dir);

  struct Row {
    std::string name;
    double ratio;
    QualityReport report;
  };
  std::vector<Row> rows;
  for (double ratio : ratios) {
    cfg.ratio = ratio;
    const SampleRun run = sample_input(a.input, cfg, true);
    const WeightedSample weighted = assign_weights(run.sample, run.hist);
    for (const std::string& name : names) {
      RunConfig each = cfg;
      each.set("partitioner", name);
      const bool use_hist = name == "grove" && each.strategy == Strategy::grove;
      const PartitionScheme scheme =
          make_partition(use_hist ? weighted : run.sample, each.partitioner_options());
      const fs::path dir = work / fmt::format("r{}-{}", ratio, name);
      const AssignReport rep =
          run_assignment(a.input, cfg.parsed_schema(), scheme, dir.string(), cfg.block_size);
      rows.push_back({name, ratio, quality_report(rep.manifest.partitions, cfg.block_size)});
      warn_dropped(rows.back().report);
    }
  }

  TextOutput out(a.out);
  out.line("partitioner,strategy,ratio,seed,partitions,blocks,q1,q2,q3,q4,q5,"
           "q1_norm,q2_norm,q3_norm,q5_norm");
  for (std::size_t g = 0; g < rows.size(); g += names.size()) {
    std::vector<double> cols[4];
    for (std::size_t i = g; i < g + names.size(); ++i) {
      const QualityReport& r = rows[i].report;
      cols[0].push_back(r.q1_total_volume);
      cols[1].push_back(r.q2_total_overlap);
      cols[2].push_back(r.q3_total_margin);
      cols[3].push_back(r.q5_size_stddev);
    }
    std::vector<double> norm[4];
    for (int c = 0; c < 4; ++c) norm[c] = normalize_to_max(cols[c]);
    for (std::size_t i = g; i < g + names.size(); ++i) {
      const Row& row = rows[i];
      const QualityReport& r = row.report;
      const std::size_t j = i - g;
      out.line(fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}", row.name,
                           row.name == "grove" ? to_string(cfg.strategy) : "", row.ratio,
                           *cfg.seed, r.partition_count, r.total_blocks, r.q1_total_volume,
                           r.q2_total_overlap, r.q3_total_margin, r.q4_block_utilization,
                           r.q5_size_stddev, norm[0][j], norm[1][j], norm[2][j], norm[3][j]));
    }
  }
  out.close();
  return 0;
}

struct State {
  GenerateArgs generate;
  SampleArgs sample;
  PartitionArgs partition;
  AssignArgs assign;
  MetricsArgs metrics;
  RangeArgs range;
  JoinArgs join;
  SweepArgs sweep;
};

}  // namespace

Commands::Commands(CLI::App& app) {
  auto state = std::make_shared<State>();
  State& s = *state;
  state_ = state;

  const auto add = [&](const char* name, const char* about) {
    CLI::App* sub = app.add_subcommand(name, about);
    ConfigFlags& flags = add_config_flags(sub, flags_);
    return std::pair<CLI::App*, ConfigFlags*>{sub, &flags};
  };

  {
    auto [sub, flags] = add("generate", "write a synthetic dataset");
    sub->add_option("--out", s.generate.out, "output file (.gz compresses, - for stdout)")
        ->required();
    sub->add_option("--dist", s.generate.dist, "uniform|diagonal");
    sub->add_option("--count", s.generate.count, "number of records");
    sub->add_option("--dim", s.generate.dim, "dimensions");
    sub->add_option("--perc", s.generate.perc, "diagonal: share of points on the line");
    sub->add_option("--buf", s.generate.buf, "diagonal: band width around the line");
    sub->add_option("--pad-min", s.generate.pad_min, "shortest padding field in bytes");
    sub->add_option("--pad-max", s.generate.pad_max, "longest padding field (0 = none)");
    sub->add_option("--box-size", s.generate.box_size, "emit boxes with sides up to this");
    entries_.push_back({sub, [&s, flags] { return run_generate(s.generate, flags->resolve()); }});
  }
  {
    auto [sub, flags] = add("sample", "draw a sample and a storage-size histogram");
    sub->add_option("--input", s.sample.input, "input records (plain or gzip, - for stdin)")
        ->required();
    sub->add_option("--out", s.sample.sample_out, "sample JSON output")->required();
    sub->add_option("--hist", s.sample.hist_out, "histogram JSON output (enables weighting)");
    entries_.push_back({sub, [&s, flags] { return run_sample(s.sample, flags->resolve()); }});
  }
  {
    auto [sub, flags] = add("partition", "compute partition boundaries from a sample");
    sub->add_option("--sample", s.partition.sample, "sample JSON")->required();
    sub->add_option("--hist", s.partition.hist, "histogram JSON for byte weights");
    sub->add_option("--out", s.partition.out, "scheme JSON output")->required();
    entries_.push_back(
        {sub, [&s, flags] { return run_partition(s.partition, flags->resolve()); }});
  }
  {
    auto [sub, flags] = add("assign", "route records to partition files");
    sub->add_option("--input", s.assign.input, "input records")->required();
    sub->add_option("--scheme", s.assign.scheme, "scheme JSON")->required();
    sub->add_option("--out-dir", s.assign.out_dir, "directory for part files and _master")
        ->required();
    entries_.push_back({sub, [&s, flags] { return run_assign(s.assign, flags->resolve()); }});
  }
  {
    auto [sub, flags] = add("metrics", "quality metrics Q1-Q5 of an assigned directory");
    sub->add_option("--dir", s.metrics.dir, "assigned directory");
    sub->add_option("--manifest", s.metrics.manifest, "manifest file");
    sub->add_option("--format", s.metrics.format, "table|json|csv");
    entries_.push_back({sub, [&s, flags] { return run_metrics(s.metrics, flags->resolve()); }});
  }
  {
    auto [sub, flags] = add("rangequery", "run random range queries over an assigned directory");
    sub->add_option("--dir", s.range.dir, "assigned directory")->required();
    sub->add_option("--count", s.range.count, "number of queries");
    sub->add_option("--area", s.range.area, "query volume as a fraction of the data extent");
    sub->add_option("--out", s.range.out, "CSV output (- for stdout)");
    entries_.push_back({sub, [&s, flags] { return run_rangequery(s.range, flags->resolve()); }});
  }
  {
    auto [sub, flags] = add("sjoin", "spatial join of two assigned directories");
    sub->add_option("--left", s.join.left, "first assigned directory")->required();
    sub->add_option("--right", s.join.right, "second assigned directory")->required();
    sub->add_option("--out", s.join.out, "CSV output (- for stdout)");
    entries_.push_back({sub, [&s, flags] { return run_sjoin(s.join, flags->resolve()); }});
  }
  {
    auto [sub, flags] = add("sweep", "partition one input with several partitioners and ratios");
    sub->add_option("--input", s.sweep.input, "input records")->required();
    sub->add_option("--partitioners", s.sweep.partitioners, "comma-separated names");
    sub->add_option("--ratios", s.sweep.ratios, "comma-separated sampling ratios");
    sub->add_option("--work-dir", s.sweep.work_dir, "where assigned outputs go");
    sub->add_option("--out", s.sweep.out, "CSV output (- for stdout)");
    entries_.push_back({sub, [&s, flags] { return run_sweep(s.sweep, flags->resolve()); }});
  }
}

int Commands::run() const {
  for (const Entry& e : entries_) {
    if (e.sub->parsed()) return e.action();
  }
  throw UsageError("no subcommand given");
}

}  // namespace rsgrove::cli
