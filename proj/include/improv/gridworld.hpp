#pragma once

#include "improv/automata.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace improv {

enum class MapErrorKind { Malformed, MarkerCount, NonRectangular };

struct MapError : std::runtime_error {
  MapError(MapErrorKind kind, const std::string& what) : std::runtime_error(what), kind(kind) {}
  MapErrorKind kind;
};

struct TooManyDropoffs : std::runtime_error {
  TooManyDropoffs() : std::runtime_error("more than 16 drop-off points") {}
};
struct TooManyStations : std::runtime_error {
  TooManyStations() : std::runtime_error("more than 64 charging stations") {}
};

// Rectangular grid; marker letters: S start, E end, O drop-off, C charging
// station, X impassable. Tokens are "<marker><digits>" with the cost digits
// optional after a marker (default 0); plain cells are bare digits. Rows are
// separated by newlines or a "/" token.
struct GridMap {
  uint32_t width = 0, height = 0;
  std::vector<int64_t> costs;   // row-major
  std::vector<char> markers;    // 0 when unmarked
  uint32_t start = 0, goal = 0; // cell indices
  std::vector<uint32_t> dropoffs;  // row-major order
  std::vector<uint32_t> stations;  // row-major order; station i has label i+1

  uint32_t cell(uint32_t row, uint32_t col) const { return row * width + col; }
  bool passable(uint32_t c) const { return markers[c] != 'X'; }
};

GridMap parse_map(const std::string& text);

struct GridEncoding {
  Dfa hard;              // start/end/drop-offs/charge/impassable constraints
  StateOutputDfa label;  // first charging station entered (1-based id)
  WeightedDfa cost;      // occupied-cell costs, entry cell included
};

// Compiles the map over the alphabet {N, E, S, W}. N decreases the row,
// S increases it, E increases the column, W decreases it.
GridEncoding encode(const GridMap& map);

struct Replay {
  bool valid = false;      // on-grid, not into X, S to E, all O, charged
  int64_t cost = 0;        // entry cell plus every cell stepped into
  int first_station = 0;   // 1-based id, 0 when never charged
};

// Walks a word on the grid directly; the test oracle for the encoder.
Replay replay(const GridMap& map, const Word& word);

}  // namespace improv
