#include "rsgrove/assign.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <tuple>

#include "rsgrove/errors.hpp"

namespace rsgrove {

namespace fs = std::filesystem;

std::size_t choose_leaf(const PartitionScheme& scheme, const Envelope& e) {
  if (e.dim() != scheme.dim) throw DataError("record dimension does not match the scheme");
  if (scheme.size() == 0) throw DataError("scheme has no partitions");
  return Router(scheme).choose_leaf(e);
}

Router::Router(const PartitionScheme& scheme) : scheme_(&scheme) {
  replicate_ = scheme.mode == AssignMode::disjoint && !scheme.curve;
  if (replicate_) cells_ = scheme.cells();
  const std::size_t d = scheme.dim;
  lo_.assign(scheme.size() * d, 0.0);
  hi_.assign(scheme.size() * d, 0.0);
  has_box_.assign(scheme.size(), false);
  for (const PartitionInfo& p : scheme.partitions) {
    if (p.mbb.is_empty() || p.mbb.dim() != d) continue;
    has_box_[p.id] = true;
    std::copy(p.mbb.lo().begin(), p.mbb.lo().end(), lo_.begin() + static_cast<std::ptrdiff_t>(p.id * d));
    std::copy(p.mbb.hi().begin(), p.mbb.hi().end(), hi_.begin() + static_cast<std::ptrdiff_t>(p.id * d));
  }
}

std::size_t Router::choose_leaf(const Envelope& e) const {
  const std::size_t d = scheme_->dim;
  const bool any_box = std::find(has_box_.begin(), has_box_.end(), true) != has_box_.end();
  std::size_t best = 0;
  std::tuple<double, double> best_key{std::numeric_limits<double>::infinity(),
                                      std::numeric_limits<double>::infinity()};
  bool found = false;
  for (std::size_t id = 0; id < scheme_->size(); ++id) {
    double dv = 0.0, dm = 0.0;
    if (has_box_[id]) {
      const double* lo = lo_.data() + id * d;
      const double* hi = hi_.data() + id * d;
      double vu = 1.0, vp = 1.0, mu = 0.0, mp = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double su = std::max(hi[k], e.hi(k)) - std::min(lo[k], e.lo(k));
        const double sp = hi[k] - lo[k];
        vu *= su;
        vp *= sp;
        mu += su;
        mp += sp;
      }
      dv = vu - vp;
      dm = mu - mp;
    } else if (any_box) {
      continue;
    } else {
      dv = volume(e);
      dm = margin(e);
    }
    const std::tuple<double, double> key{dv, dm};
    if (!found || key < best_key) {
      found = true;
      best = id;
      best_key = key;
    }
  }
  return best;
}

void Router::route(const Envelope& e, std::vector<std::size_t>& ids) const {
  ids.clear();
  if (scheme_->size() == 0) throw DataError("scheme has no partitions");
  if (e.dim() != scheme_->dim) throw DataError("record dimension does not match the scheme");
  if (scheme_->curve) {
    ids.push_back(scheme_->curve->lookup(e.center()));
  } else if (replicate_) {
    ids = scheme_->aux.range(e);
  } else {
    ids.push_back(choose_leaf(e));
  }
  RSGROVE_ENSURE(!ids.empty(), "record could not be routed");
}

std::vector<PartitionStats> empty_stats(const Router& router) {
  const PartitionScheme& scheme = router.scheme();
  std::vector<PartitionStats> stats(scheme.size());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    stats[i].id = i;
    stats[i].mbb = Envelope::empty(scheme.dim);
    stats[i].cell = router.replicates() ? router.cells()[i] : Envelope::empty(scheme.dim);
  }
  return stats;
}

void account(PartitionStats& stats, const Router& router, const Envelope& e,
             std::uint64_t bytes) {
  if (router.replicates()) {
    const auto clipped = intersection(e, stats.cell);
    RSGROVE_ENSURE(clipped.has_value(), "replicated record misses its cell");
    stats.mbb.extend(*clipped);
  } else {
    stats.mbb.extend(e);
  }
  stats.size += bytes;
  ++stats.record_count;
}

Assignment assign_records(std::span<const Record> records, const PartitionScheme& scheme,
                          bool keep_members) {
  const Router router(scheme);
  Assignment out;
  out.stats = empty_stats(router);
  if (keep_members) out.members.resize(scheme.size());
  std::vector<std::size_t> ids;
  for (std::size_t r = 0; r < records.size(); ++r) {
    router.route(records[r].envelope, ids);
    for (std::size_t id : ids) {
      account(out.stats[id], router, records[r].envelope, records[r].payload_size);
      if (keep_members) out.members[id].push_back(static_cast<std::uint32_t>(r));
    }
  }
  return out;
}

namespace {

class PartitionWriter {
 public:
  PartitionWriter(fs::path dir, std::size_t partitions)
      : dir_(std::move(dir)), buffers_(partitions), touched_(partitions, false) {}

  void append(std::size_t id, const std::string& line) {
    buffers_[id] += line;
    buffers_[id] += '\n';
    buffered_ += line.size() + 1;
    if (buffered_ >= kFlushBytes) flush();
  }

  void flush() {
    for (std::size_t id = 0; id < buffers_.size(); ++id) write(id);
    buffered_ = 0;
  }

  /// Creates an empty file for every partition that received nothing.
  void finish() {
    flush();
    for (std::size_t id = 0; id < buffers_.size(); ++id) {
      if (!touched_[id]) write(id, true);
    }
  }

 private:
  static constexpr std::size_t kFlushBytes = 64U << 20;

  void write(std::size_t id, bool force = false) {
    if (buffers_[id].empty() && !force) return;
    const fs::path path = dir_ / partition_file_name(id);
    std::ofstream out(path, std::ios::binary | std::ios::app);
    out << buffers_[id];
    out.close();
    if (!out) throw DataError("write failed for '" + path.string() + "'");
    touched_[id] = true;
    buffers_[id].clear();
  }

  fs::path dir_;
  std::vector<std::string> buffers_;
  std::vector<bool> touched_;
  std::size_t buffered_ = 0;
};

void remove_outputs(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("part-", 0) == 0 || name == kManifestName) fs::remove(entry.path(), ec);
  }
}

}  // namespace

AssignReport run_assignment(const std::string& input, const Schema& schema,
                            const PartitionScheme& scheme, const std::string& out_dir,
                            double block_size) {
  if (schema.dim != scheme.dim) {
    throw DataError("schema has d=" + std::to_string(schema.dim) + " but the scheme has d=" +
                    std::to_string(scheme.dim));
  }
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create '" + out_dir + "': " + ec.message());
  remove_outputs(dir);

  AssignReport report;
  Manifest& m = report.manifest;
  m.dim = scheme.dim;
  m.mode = scheme.curve ? AssignMode::overlap : scheme.mode;
  m.block_size = block_size;
  m.partitioner = scheme.partitioner;
  m.schema = schema.to_string();
  m.delimiter = schema.delimiter;

  try {
    const Router router(scheme);
    m.partitions = empty_stats(router);
    PartitionWriter writer(dir, scheme.size());
    std::vector<std::size_t> ids;
    report.parse = for_each_record(
        input, schema,
        [&](const Record& r) {
          router.route(r.envelope, ids);
          for (std::size_t id : ids) {
            account(m.partitions[id], router, r.envelope, r.payload_size);
            writer.append(id, r.raw);
          }
        },
        true);
    writer.finish();
    write_manifest(m, (dir / kManifestName).string());
  } catch (...) {
    remove_outputs(dir);
    throw;
  }
  return report;
}

}  // namespace rsgrove
