#include "rsgrove/scheme.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "json_io.hpp"
#include "rsgrove/errors.hpp"
#include "rsgrove/version.hpp"

namespace rsgrove {

using detail::json;

std::string_view to_string(AssignMode mode) {
  return mode == AssignMode::disjoint ? "disjoint" : "overlap";
}

AssignMode assign_mode_from(std::string_view name) {
  if (name == "disjoint") return AssignMode::disjoint;
  if (name == "overlap") return AssignMode::overlap;
  throw UsageError("unknown mode '" + std::string(name) + "' (disjoint|overlap)");
}

// ------------------------------------------------------------ SplitTrace ---

SplitTrace::SplitTrace() { add_leaf(0); }

std::int32_t SplitTrace::add_leaf(std::size_t leaf_id) {
  Node n;
  n.leaf_id = static_cast<std::int32_t>(leaf_id);
  nodes_.push_back(n);
  return static_cast<std::int32_t>(nodes_.size() - 1);
}

std::int32_t SplitTrace::add_split(std::size_t axis, double coord) {
  Node n;
  n.axis = static_cast<std::uint32_t>(axis);
  n.coord = coord;
  nodes_.push_back(n);
  return static_cast<std::int32_t>(nodes_.size() - 1);
}

void SplitTrace::set_children(std::int32_t node, std::int32_t left, std::int32_t right) {
  Node& n = nodes_.at(static_cast<std::size_t>(node));
  n.left = left;
  n.right = right;
}

void SplitTrace::clear() { nodes_.clear(); }

std::size_t SplitTrace::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

std::size_t SplitTrace::depth() const {
  std::size_t best = 0;
  std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    best = std::max(best, d);
    if (!n.is_leaf()) {
      stack.emplace_back(n.left, d + 1);
      stack.emplace_back(n.right, d + 1);
    }
  }
  return best;
}

std::size_t SplitTrace::lookup(std::span<const double> p) const {
  const Node* n = &nodes_.front();
  while (!n->is_leaf()) {
    const std::int32_t next = p[n->axis] < n->coord ? n->left : n->right;
    n = &nodes_[static_cast<std::size_t>(next)];
  }
  return static_cast<std::size_t>(n->leaf_id);
}

std::vector<std::size_t> SplitTrace::range(const Envelope& e) const {
  std::vector<std::size_t> out;
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const Node& n = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (n.is_leaf()) {
      out.push_back(static_cast<std::size_t>(n.leaf_id));
      continue;
    }
    if (e.lo(n.axis) < n.coord) stack.push_back(n.left);
    if (e.hi(n.axis) >= n.coord) stack.push_back(n.right);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Envelope> SplitTrace::cells(std::size_t dim) const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<Envelope> out(leaf_count());
  struct Item {
    std::int32_t node;
    std::vector<double> lo, hi;
  };
  std::vector<Item> stack;
  stack.push_back({0, std::vector<double>(dim, -inf), std::vector<double>(dim, inf)});
  while (!stack.empty()) {
    Item it = std::move(stack.back());
    stack.pop_back();
    const Node& n = nodes_[static_cast<std::size_t>(it.node)];
    if (n.is_leaf()) {
      out.at(static_cast<std::size_t>(n.leaf_id)) = Envelope(std::move(it.lo), std::move(it.hi));
      continue;
    }
    Item left{n.left, it.lo, it.hi};
    left.hi[n.axis] = n.coord;
    Item right{n.right, std::move(it.lo), std::move(it.hi)};
    right.lo[n.axis] = n.coord;
    stack.push_back(std::move(left));
    stack.push_back(std::move(right));
  }
  return out;
}

void SplitTrace::validate() const {
  if (nodes_.empty()) throw DataError("aux tree has no nodes");
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<bool> ids(nodes_.size(), false);
  std::size_t leaves = 0;
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const std::int32_t i = stack.back();
    stack.pop_back();
    if (i < 0 || static_cast<std::size_t>(i) >= nodes_.size() || seen[static_cast<std::size_t>(i)]) {
      throw DataError("aux tree is not a tree");
    }
    seen[static_cast<std::size_t>(i)] = true;
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.is_leaf()) {
      const auto id = static_cast<std::size_t>(n.leaf_id);
      if (id >= ids.size() || ids[id]) throw DataError("aux leaf ids are not unique");
      ids[id] = true;
      ++leaves;
    } else {
      stack.push_back(n.left);
      stack.push_back(n.right);
    }
  }
  for (std::size_t id = 0; id < leaves; ++id) {
    if (!ids[id]) throw DataError("aux leaf ids are not dense");
  }
}

// ------------------------------------------------------------ CurveTable ---

std::size_t CurveTable::lookup_key(std::uint64_t key) const {
  const auto it = std::upper_bound(starts.begin(), starts.end(), key);
  return it == starts.begin() ? 0 : static_cast<std::size_t>(it - starts.begin() - 1);
}

std::size_t CurveTable::lookup(std::span<const double> p) const {
  return lookup_key(curve_encode(kind, p, domain, bits));
}

// ------------------------------------------------------- PartitionScheme ---

std::size_t PartitionScheme::lookup_point(std::span<const double> p) const {
  return curve ? curve->lookup(p) : aux.lookup(p);
}

std::vector<Envelope> PartitionScheme::cells() const {
  if (curve) return {};
  return aux.cells(dim);
}

// ------------------------------------------------------------------ JSON ---

namespace {

json aux_json(const SplitTrace& aux, std::int32_t i) {
  const auto& n = aux.nodes()[static_cast<std::size_t>(i)];
  if (n.is_leaf()) return json{{"leaf_id", n.leaf_id}};
  return json{{"axis", n.axis},
              {"coord", n.coord},
              {"left", aux_json(aux, n.left)},
              {"right", aux_json(aux, n.right)}};
}

std::int32_t aux_from(const json& j, SplitTrace& aux) {
  if (j.contains("leaf_id")) return aux.add_leaf(j.at("leaf_id").get<std::size_t>());
  const std::int32_t node =
      aux.add_split(j.at("axis").get<std::size_t>(), j.at("coord").get<double>());
  const std::int32_t left = aux_from(j.at("left"), aux);
  const std::int32_t right = aux_from(j.at("right"), aux);
  aux.set_children(node, left, right);
  return node;
}

}  // namespace

std::string scheme_to_json(const PartitionScheme& s) {
  json j;
  j["version"] = kVersionStamp;
  j["kind"] = "scheme";
  j["d"] = s.dim;
  j["mode"] = to_string(s.mode);
  j["partitioner"] = s.partitioner;
  j["strategy"] = s.strategy;
  j["capacity"] = s.capacity;
  j["min_capacity"] = s.min_capacity;
  json parts = json::array();
  for (const PartitionInfo& p : s.partitions) {
    json e = detail::envelope_json(p.mbb);
    e["id"] = p.id;
    e["expected_weight"] = p.expected_weight;
    e["sample_count"] = p.sample_count;
    parts.push_back(std::move(e));
  }
  j["partitions"] = std::move(parts);
  j["aux"] = aux_json(s.aux, 0);
  if (s.curve) {
    j["curve"] = json{{"kind", to_string(s.curve->kind)},
                      {"bits", s.curve->bits},
                      {"domain", detail::envelope_json(s.curve->domain)},
                      {"starts", s.curve->starts}};
  }
  return j.dump(1) + '\n';
}

PartitionScheme scheme_from_json(std::string_view text) {
  PartitionScheme s;
  try {
    const json j = json::parse(text);
    if (j.value("kind", "") != "scheme") throw DataError("not a partition scheme");
    s.dim = j.at("d").get<std::size_t>();
    s.mode = assign_mode_from(j.at("mode").get<std::string>());
    s.partitioner = j.at("partitioner").get<std::string>();
    s.strategy = j.value("strategy", "");
    s.capacity = j.value("capacity", 0.0);
    s.min_capacity = j.value("min_capacity", 0.0);
    for (const json& e : j.at("partitions")) {
      PartitionInfo p;
      p.id = e.at("id").get<std::size_t>();
      p.mbb = detail::envelope_from(e, s.dim);
      p.expected_weight = e.at("expected_weight").get<double>();
      p.sample_count = e.value("sample_count", std::size_t{0});
      if (p.id != s.partitions.size()) throw DataError("partition ids must be 0..n-1 in order");
      if (p.mbb.dim() != s.dim) throw DataError("partition box has the wrong dimension");
      s.partitions.push_back(std::move(p));
    }
    s.aux.clear();
    aux_from(j.at("aux"), s.aux);
    s.aux.validate();
    if (j.contains("curve")) {
      const json& c = j.at("curve");
      CurveTable t;
      t.kind = curve_kind_from(c.at("kind").get<std::string>());
      t.bits = c.at("bits").get<unsigned>();
      t.domain = detail::envelope_from(c.at("domain"), s.dim);
      t.starts = c.at("starts").get<std::vector<std::uint64_t>>();
      if (t.starts.size() != s.partitions.size()) {
        throw DataError("curve table size does not match the partition count");
      }
      s.curve = std::move(t);
    } else if (s.aux.leaf_count() != s.partitions.size()) {
      throw DataError("aux leaves do not match the partition count");
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed scheme: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("malformed scheme: ") + e.what());
  }
  return s;
}

void save_scheme(const PartitionScheme& scheme, const std::string& path) {
  detail::write_text(scheme_to_json(scheme), path);
}

PartitionScheme load_scheme(const std::string& path) {
  return scheme_from_json(detail::read_json(path).dump());
}

}  // namespace rsgrove
