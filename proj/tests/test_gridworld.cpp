#include "improv/gridworld.hpp"

#include "improv/exact_scheme.hpp"
#include "support/brute.hpp"

#include <doctest.h>

#include <map>

using namespace improv;

TEST_CASE("map parsing") {
  SUBCASE("markers and costs") {
    GridMap map = parse_map("S0 2 X C1\n1 O3 0 E0\n");
    CHECK(map.width == 4);
    CHECK(map.height == 2);
    CHECK(map.start == 0);
    CHECK(map.goal == 7);
    CHECK(map.costs[1] == 2);
    CHECK(map.costs[5] == 3);
    CHECK(map.markers[2] == 'X');
    CHECK(map.dropoffs == std::vector<uint32_t>{5});
    CHECK(map.stations == std::vector<uint32_t>{3});
  }
  SUBCASE("slash-separated rows parse the same") {
    GridMap a = parse_map("S0 2 X C1 / 1 O3 0 E0");
    GridMap b = parse_map("S0 2 X C1\n1 O3 0 E0\n");
    CHECK(a.costs == b.costs);
    CHECK(a.markers == b.markers);
  }
  SUBCASE("marker without digits defaults to cost 0") {
    GridMap map = parse_map("S C / O E");
    CHECK(map.costs == std::vector<int64_t>{0, 0, 0, 0});
  }
  SUBCASE("two starts") {
    CHECK_THROWS_AS(parse_map("S0 S0 / C0 E0"), MapError);
  }
  SUBCASE("no charging station") {
    CHECK_THROWS_AS(parse_map("S0 1 / 1 E0"), MapError);
  }
  SUBCASE("ragged rows") {
    try {
      parse_map("S0 1 C0 / 1 E0");
      FAIL("expected MapError");
    } catch (const MapError& e) {
      CHECK(e.kind == MapErrorKind::NonRectangular);
    }
  }
  SUBCASE("bad token") {
    CHECK_THROWS_AS(parse_map("S0 Q7 / C0 E0"), MapError);
  }
}

namespace {

// 3x3 with one drop-off and two stations.
const char* kSmallMap =
    "S0 1  C2\n"
    "2  X  1\n"
    "O1 C1 E0\n";

}  // namespace

TEST_CASE("encoded automata agree with the replay oracle") {
  GridMap map = parse_map(kSmallMap);
  GridEncoding enc = encode(map);
  const uint32_t n = 8;

  for (Word& w : brute::all_words(4, 0, n)) {
    Replay r = replay(map, w);
    CAPTURE(render_word(enc.hard, w));
    CHECK(enc.hard.accepts(w) == r.valid);
    if (r.valid) {
      CHECK(eval_label(enc.label, w) == r.first_station);
      CHECK(enc.cost.cost_of(w) == r.cost);
    }
  }
}

TEST_CASE("class table matches a brute-force path walk") {
  GridMap map = parse_map(kSmallMap);
  GridEncoding enc = encode(map);
  const uint32_t m = 1, n = 8;

  auto build = build_cost_class_table(enc.hard, enc.label, CostSpec(enc.cost), m, n, 100000);

  std::map<std::pair<int64_t, int64_t>, BigInt> expected;
  BigInt valid = 0;
  for (Word& w : brute::all_words(4, m, n)) {
    Replay r = replay(map, w);
    if (!r.valid) continue;
    valid += 1;
    expected[{r.first_station, r.cost}] += 1;
  }
  CHECK(build.hard_word_count == valid);
  CHECK(valid > 0);

  for (size_t i = 0; i < build.table.label_values.size(); i++)
    for (size_t k = 0; k < build.table.costs.size(); k++) {
      auto key = std::make_pair(build.table.label_values[i],
                                numerator(build.table.costs[k]).convert_to<int64_t>());
      auto it = expected.find(key);
      BigInt want = it == expected.end() ? 0 : it->second;
      CHECK(build.table.sizes[i][k] == want);
    }
}

TEST_CASE("unreachable goal gives an empty hard language") {
  GridMap map = parse_map("S0 X E0\nC0 X 1\n");
  GridEncoding enc = encode(map);
  for (uint32_t len = 0; len <= 10; len++)
    CHECK(count_words(enc.hard, len, len) == std::vector<BigInt>{0});
}

TEST_CASE("zero-cost map yields the single cost 0") {
  GridMap map = parse_map("S0 C0 E0");
  GridEncoding enc = encode(map);
  CHECK(possible_costs(enc.cost, enc.hard, 0, 6) == std::vector<int64_t>{0});
}

TEST_CASE("label values are the 1-based station indices") {
  GridMap map = parse_map(kSmallMap);
  GridEncoding enc = encode(map);
  CHECK(label_set(enc.label) == std::vector<int64_t>{1, 2});
}

TEST_CASE("station and drop-off limits") {
  std::string many_stations = "S0";
  for (int i = 0; i < 65; i++) many_stations += " C0";
  many_stations += " E0";
  CHECK_THROWS_AS(encode(parse_map(many_stations)), TooManyStations);

  std::string many_dropoffs = "S0 C0";
  for (int i = 0; i < 17; i++) many_dropoffs += " O0";
  many_dropoffs += " E0";
  CHECK_THROWS_AS(encode(parse_map(many_dropoffs)), TooManyDropoffs);
}
