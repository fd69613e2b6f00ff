#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rsgrove/errors.hpp"
#include "rsgrove/generators.hpp"

using namespace rsgrove;

namespace {

std::size_t pad_length(const std::string& line) {
  return line.size() - line.rfind(',') - 1;
}

}  // namespace

TEST_CASE("uniform generator") {
  CHECK(gen_uniform(0, 2, 1).empty());
  const auto lines = gen_uniform(1000, 3, 5);
  CHECK(lines.size() == 1000);
  CHECK(lines == gen_uniform(1000, 3, 5));
  CHECK(lines != gen_uniform(1000, 3, 6));
  const Schema schema = Schema::parse("point:3");
  for (const auto& l : lines) {
    const Record r = parse_record(l, schema);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(r.envelope.lo(k) >= 0.0);
      CHECK(r.envelope.lo(k) < 1.0);
    }
  }
}

TEST_CASE("diagonal generator") {
  const Schema schema = Schema::parse("point:2");
  for (const auto& l : gen_diagonal(500, 2, 1.0, 0.1, 3)) {
    const Record r = parse_record(l, schema);
    CHECK(r.envelope.lo(1) == r.envelope.lo(0));
  }
  for (const auto& l : gen_diagonal(500, 2, 0.0, 0.0, 3)) {
    const Record r = parse_record(l, schema);
    CHECK(r.envelope.lo(1) == r.envelope.lo(0));
  }
  std::size_t on_line = 0;
  const auto lines = gen_diagonal(100000, 2, 0.05, 0.1, 4);
  for (const auto& l : lines) {
    const Record r = parse_record(l, schema);
    on_line += r.envelope.lo(1) == r.envelope.lo(0) ? 1 : 0;
    CHECK(std::abs(r.envelope.lo(1) - r.envelope.lo(0)) <= 0.1);
  }
  CHECK(on_line >= 4500);
}

TEST_CASE("variable-size generator") {
  const auto lines = gen_varsize(100000, 2, 7, 10, 10000);
  std::vector<std::size_t> len;
  for (const auto& l : lines) {
    const std::size_t n = pad_length(l);
    CHECK(n >= 10);
    CHECK(n <= 10000);
    len.push_back(n);
  }
  std::nth_element(len.begin(), len.begin() + len.size() / 2, len.end());
  const double median = static_cast<double>(len[len.size() / 2]);
  CHECK(median == doctest::Approx(std::sqrt(10.0 * 10000.0)).epsilon(0.1));
}

TEST_CASE("box records") {
  GeneratorSpec spec;
  spec.count = 200;
  spec.box_size = 0.05;
  const std::vector<Record> records = generate_records(spec);
  CHECK(generated_schema(spec).kind == Schema::Kind::envelope);
  for (const auto& r : records) {
    CHECK(r.envelope.side(0) <= 0.05);
    CHECK(r.envelope.side(1) <= 0.05);
  }
  spec.perc = 2;
  spec.distribution = Distribution::diagonal;
  CHECK_THROWS_AS(validate(spec), UsageError);
}

TEST_CASE("query generator") {
  const Envelope unit({0, 0}, {1, 1});
  const auto qs = gen_queries(unit, 100, 1e-4, 9);
  CHECK(qs.size() == 100);
  for (const auto& q : qs) {
    CHECK(q.side(0) == doctest::Approx(0.01));
    CHECK(q.side(1) == doctest::Approx(0.01));
    CHECK(unit.contains(q));
  }
  CHECK(qs == gen_queries(unit, 100, 1e-4, 9));
  CHECK(gen_queries(unit, 0, 1e-4, 9).empty());
  CHECK_THROWS_AS(gen_queries(Envelope({0, 0}, {100, 0.001}), 1, 0.5, 1), UsageError);
  CHECK_THROWS_AS(gen_queries(unit, 1, 1.0, 1), UsageError);
}
