#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "occnav/grid_map.hpp"
#include "support/oracles.hpp"

using namespace occnav;

namespace {

std::string uniform_map(int width, int height, double resolution, char fill = '.') {
  std::ostringstream out;
  out << "resolution " << resolution << "\norigin 0 0\n";
  for (int r = 0; r < height; ++r) out << std::string(width, fill) << "\n";
  return out.str();
}

}  // namespace

TEST_SUITE("grid_map") {
  TEST_CASE("parses a uniform free map") {
    const GridMap map = parse_static_map(uniform_map(3, 3, 0.5));
    CHECK(map.width() == 3);
    CHECK(map.height() == 3);
    CHECK(map.resolution() == 0.5);
    for (int row = 0; row < 3; ++row) {
      for (int col = 0; col < 3; ++col) {
        CHECK(map.at(GridIndex{col, row}) == StaticCell::Free);
      }
    }
  }

  TEST_CASE("a 200x200 half-meter map covers 10000 square meters") {
    const GridMap map = parse_static_map(uniform_map(200, 200, 0.5));
    const double area = map.width() * map.height() * map.resolution() * map.resolution();
    CHECK(area == doctest::Approx(10000.0));
  }

  TEST_CASE("ragged rows are rejected at the offending row") {
    const std::string text = "resolution 0.5\norigin 0 0\n...\n...\n....\n";
    CHECK_THROWS_WITH_AS(parse_static_map(text),
                         doctest::Contains("grid row 3"), ParseError);
    try {
      parse_static_map(text);
    } catch (const ParseError& e) {
      CHECK(e.line() == 5);
    }
  }

  TEST_CASE("unknown characters and bad headers are parse errors") {
    CHECK_THROWS_AS(parse_static_map("resolution 0.5\norigin 0 0\n..X\n"), ParseError);
    CHECK_THROWS_AS(parse_static_map("resolution -1\norigin 0 0\n...\n"), ParseError);
    CHECK_THROWS_AS(parse_static_map("size 3 3\norigin 0 0\n...\n"), ParseError);
    CHECK_THROWS_AS(parse_static_map("resolution 0.5\n...\n"), ParseError);
  }

  TEST_CASE("the file's first row is the north edge") {
    const GridMap map = parse_static_map("resolution 1\norigin 0 0\n#.\n..\n");
    CHECK(map.at(GridIndex{0, 1}) == StaticCell::Wall);   // top-left of the file
    CHECK(map.at(GridIndex{0, 0}) == StaticCell::Free);
  }

  TEST_CASE("world_to_cell follows the floor convention") {
    const GridMap map = parse_static_map(uniform_map(4, 4, 0.5));
    CHECK(map.world_to_cell(WorldPoint{0.0, 0.0}) == GridIndex{0, 0});
    CHECK(map.world_to_cell(WorldPoint{0.74, 1.26}) == GridIndex{1, 2});
    CHECK(map.world_to_cell(WorldPoint{1.0, 0.0}) == GridIndex{2, 0});
    CHECK_THROWS_AS(map.world_to_cell(WorldPoint{2.0, 0.0}), std::out_of_range);
    CHECK_THROWS_AS(map.world_to_cell(WorldPoint{-0.01, 0.0}), std::out_of_range);
  }

  TEST_CASE("cell_to_world returns cell centers") {
    const GridMap map = parse_static_map(uniform_map(4, 4, 0.5));
    const WorldPoint first = map.cell_to_world(GridIndex{0, 0});
    CHECK(first.x == doctest::Approx(0.25));
    CHECK(first.y == doctest::Approx(0.25));
    const WorldPoint other = map.cell_to_world(GridIndex{3, 1});
    CHECK(other.x == doctest::Approx(1.75));
    CHECK(other.y == doctest::Approx(0.75));
    CHECK_THROWS_AS(map.cell_to_world(GridIndex{4, 0}), std::out_of_range);
  }

  TEST_CASE("cell/world transforms invert each other") {
    const GridMap map = parse_static_map(uniform_map(7, 5, 0.25));
    for (int row = 0; row < map.height(); ++row) {
      for (int col = 0; col < map.width(); ++col) {
        const GridIndex i{col, row};
        CHECK(map.world_to_cell(map.cell_to_world(i)) == i);
      }
    }
  }

  TEST_CASE("any in-extent point maps to a center within half a diagonal") {
    const GridMap map = parse_static_map(uniform_map(9, 6, 0.5));
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ux(0.0, 9 * 0.5 - 1e-9);
    std::uniform_real_distribution<double> uy(0.0, 6 * 0.5 - 1e-9);
    for (int i = 0; i < 500; ++i) {
      const WorldPoint p{ux(rng), uy(rng)};
      const WorldPoint center = map.cell_to_world(map.world_to_cell(p));
      CHECK(std::hypot(center.x - p.x, center.y - p.y) <=
            map.resolution() / std::sqrt(2.0) + 1e-12);
    }
  }

  TEST_CASE("is_blocking distinguishes occluders from transparent cells") {
    CHECK(is_blocking(StaticCell::Wall));
    CHECK(is_blocking(StaticCell::ParkedVehicle));
    CHECK_FALSE(is_blocking(StaticCell::Free));
    CHECK_FALSE(is_blocking(StaticCell::Entrance));
  }

  TEST_CASE("serialization round-trips arbitrary maps") {
    std::mt19937 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
      const GridMap map = occnav::testing::random_map(rng, 12, 9, 0.2, 0.05, 0.05);
      const GridMap reparsed = parse_static_map(serialize_static_map(map));
      CHECK(reparsed.frame() == map.frame());
      CHECK(reparsed.cells() == map.cells());
    }
  }
}
