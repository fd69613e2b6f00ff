#include "run_config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <thread>

#include "rsgrove/errors.hpp"

namespace rsgrove::cli {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double to_double(const std::string& key, const std::string& value) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw UsageError(key + ": '" + value + "' is not a number");
  }
  return x;
}

std::uint64_t to_uint(const std::string& key, const std::string& value) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw UsageError(key + ": '" + value + "' is not a non-negative integer");
  }
  return x;
}

char to_delimiter(const std::string& value) {
  if (value == "tab" || value == "\\t") return '\t';
  if (value == "comma") return ',';
  if (value == "space") return ' ';
  if (value.size() == 1) return value[0];
  throw UsageError("delimiter must be a single character, 'tab', 'comma' or 'space'");
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "block-size", "alpha", "rho",    "ratio",     "seed",     "partitioner", "mode",
      "strategy",   "grid",  "schema", "delimiter", "capacity", "threads"};
  return keys;
}

double parse_bytes(const std::string& text) {
  const std::string t = trim(text);
  std::size_t split = 0;
  while (split < t.size() && (std::isdigit(static_cast<unsigned char>(t[split])) ||
                              t[split] == '.' || t[split] == 'e' || t[split] == '+')) {
    ++split;
  }
  const double number = to_double("block-size", t.substr(0, split));
  std::string unit = t.substr(split);
  std::transform(unit.begin(), unit.end(), unit.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  double scale = 1.0;
  if (unit.empty() || unit == "b") {
    scale = 1.0;
  } else if (unit == "k" || unit == "kib") {
    scale = 1024.0;
  } else if (unit == "m" || unit == "mib") {
    scale = 1024.0 * 1024;
  } else if (unit == "g" || unit == "gib") {
    scale = 1024.0 * 1024 * 1024;
  } else if (unit == "kb") {
    scale = 1e3;
  } else if (unit == "mb") {
    scale = 1e6;
  } else if (unit == "gb") {
    scale = 1e9;
  } else {
    throw UsageError("unknown size unit '" + unit + "'");
  }
  const double bytes = number * scale;
  if (!(bytes > 0.0)) throw UsageError("size must be positive");
  return bytes;
}

void RunConfig::set(const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  explicit_keys.insert(key);
  if (key == "block-size") {
    block_size = parse_bytes(value);
  } else if (key == "alpha") {
    alpha = to_double(key, value);
    if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must be in (0, 1)");
  } else if (key == "rho") {
    rho = to_double(key, value);
    if (!(rho >= 0.0 && rho <= 0.5)) throw UsageError("rho must be in [0, 0.5]");
  } else if (key == "ratio") {
    ratio = to_double(key, value);
    if (!(ratio > 0.0 && ratio <= 1.0)) throw UsageError("ratio must be in (0, 1]");
  } else if (key == "seed") {
    seed = to_uint(key, value);
  } else if (key == "partitioner") {
    const auto& names = partitioner_names();
    if (std::find(names.begin(), names.end(), value) == names.end()) {
      throw UsageError("unknown partitioner '" + value + "' (grove|str|kdtree|zcurve|hcurve)");
    }
    partitioner = value;
  } else if (key == "mode") {
    mode = assign_mode_from(value);
  } else if (key == "strategy") {
    strategy = strategy_from(value);
  } else if (key == "grid") {
    grid = to_uint(key, value);
  } else if (key == "schema") {
    Schema::parse(value, delimiter);
    schema = value;
  } else if (key == "delimiter") {
    delimiter = to_delimiter(value);
  } else if (key == "capacity") {
    const double c = to_double(key, value);
    if (!(c >= 1.0)) throw UsageError("capacity must be at least 1");
    capacity = c;
  } else if (key == "threads") {
    threads = to_uint(key, value);
  } else {
    throw UsageError("unknown setting '" + key + "'");
  }
}

Schema RunConfig::parsed_schema() const { return Schema::parse(schema, delimiter); }

PartitionerOptions RunConfig::partitioner_options() const {
  PartitionerOptions o;
  o.name = partitioner;
  o.strategy = strategy;
  o.block_size = block_size;
  o.alpha = alpha;
  o.rho = rho;
  o.mode = mode;
  o.capacity = capacity;
  return o;
}

std::size_t RunConfig::thread_count() const {
  if (threads > 0) return threads;
  return std::max(1U, std::thread::hardware_concurrency());
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

}  // namespace rsgrove::cli
