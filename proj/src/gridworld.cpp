#include "improv/gridworld.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace improv {

GridMap parse_map(const std::string& text) {
  std::vector<std::vector<std::string>> rows(1);
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string token;
    while (ls >> token) {
      if (token == "/")
        rows.emplace_back();
      else
        rows.back().push_back(token);
    }
    if (!rows.back().empty()) rows.emplace_back();
  }
  while (!rows.empty() && rows.back().empty()) rows.pop_back();
  if (rows.empty()) throw MapError(MapErrorKind::Malformed, "empty map");
  for (const auto& row : rows)
    if (row.size() != rows.front().size())
      throw MapError(MapErrorKind::NonRectangular, "ragged rows");

  GridMap map;
  map.height = static_cast<uint32_t>(rows.size());
  map.width = static_cast<uint32_t>(rows.front().size());
  map.costs.resize(size_t(map.width) * map.height, 0);
  map.markers.resize(size_t(map.width) * map.height, 0);

  int starts = 0, goals = 0;
  for (uint32_t r = 0; r < map.height; r++) {
    for (uint32_t c = 0; c < map.width; c++) {
      const std::string& token = rows[r][c];
      const uint32_t idx = map.cell(r, c);
      size_t pos = 0;
      if (std::isalpha(static_cast<unsigned char>(token[0]))) {
        char marker = token[0];
        if (std::string("SEOCX").find(marker) == std::string::npos)
          throw MapError(MapErrorKind::Malformed, "unknown marker in token: " + token);
        map.markers[idx] = marker;
        pos = 1;
      }
      int64_t cost = 0;
      if (pos < token.size()) {
        for (size_t i = pos; i < token.size(); i++)
          if (!std::isdigit(static_cast<unsigned char>(token[i])))
            throw MapError(MapErrorKind::Malformed, "bad cost digits in token: " + token);
        cost = std::stoll(token.substr(pos));
      } else if (pos == 0) {
        throw MapError(MapErrorKind::Malformed, "empty token");
      }
      map.costs[idx] = cost;
      switch (map.markers[idx]) {
        case 'S': starts++; map.start = idx; break;
        case 'E': goals++; map.goal = idx; break;
        case 'O': map.dropoffs.push_back(idx); break;
        case 'C': map.stations.push_back(idx); break;
        default: break;
      }
    }
  }
  if (starts != 1 || goals != 1)
    throw MapError(MapErrorKind::MarkerCount, "need exactly one S and one E");
  if (map.stations.empty())
    throw MapError(MapErrorKind::MarkerCount, "need at least one charging station");
  return map;
}

namespace {

constexpr int kMoves[4][2] = {{-1, 0}, {0, 1}, {1, 0}, {0, -1}};  // N, E, S, W

// -1 = off grid or impassable.
int64_t move_target(const GridMap& map, uint32_t cell, uint32_t dir) {
  int r = static_cast<int>(cell / map.width) + kMoves[dir][0];
  int c = static_cast<int>(cell % map.width) + kMoves[dir][1];
  if (r < 0 || c < 0 || r >= static_cast<int>(map.height) || c >= static_cast<int>(map.width))
    return -1;
  uint32_t target = map.cell(static_cast<uint32_t>(r), static_cast<uint32_t>(c));
  return map.passable(target) ? static_cast<int64_t>(target) : -1;
}

int station_id(const GridMap& map, uint32_t cell) {
  auto it = std::find(map.stations.begin(), map.stations.end(), cell);
  return it == map.stations.end() ? 0 : static_cast<int>(it - map.stations.begin()) + 1;
}

uint32_t dropoff_bit(const GridMap& map, uint32_t cell) {
  auto it = std::find(map.dropoffs.begin(), map.dropoffs.end(), cell);
  return it == map.dropoffs.end() ? 0u : (1u << (it - map.dropoffs.begin()));
}

const std::vector<std::string> kAlphabet = {"N", "E", "S", "W"};

}  // namespace

GridEncoding encode(const GridMap& map) {
  if (map.dropoffs.size() > 16) throw TooManyDropoffs();
  if (map.stations.size() > 64) throw TooManyStations();

  GridEncoding out;
  const uint32_t full_mask = (1u << map.dropoffs.size()) - 1;

  // Hard DFA over (cell, visited-drop-off mask, charged); dead state 0.
  {
    struct Key {
      uint32_t cell, mask;
      bool charged;
      auto operator<=>(const Key&) const = default;
    };
    std::map<Key, uint32_t> ids;
    std::vector<Key> states;
    auto intern = [&](Key key) {
      auto [it, inserted] = ids.emplace(key, static_cast<uint32_t>(states.size() + 1));
      if (inserted) states.push_back(key);
      return it->second;
    };
    Key init{map.start, dropoff_bit(map, map.start), station_id(map, map.start) != 0};
    out.hard.alphabet = kAlphabet;
    out.hard.initial = intern(init);
    std::vector<uint32_t> transitions(4, 0);  // dead state self-loops
    for (size_t i = 0; i < states.size(); i++) {
      Key key = states[i];
      for (uint32_t dir = 0; dir < 4; dir++) {
        int64_t target = move_target(map, key.cell, dir);
        if (target < 0) {
          transitions.push_back(0);
          continue;
        }
        uint32_t cell = static_cast<uint32_t>(target);
        Key next{cell, key.mask | dropoff_bit(map, cell),
                 key.charged || station_id(map, cell) != 0};
        transitions.push_back(intern(next));
      }
    }
    out.hard.num_states = static_cast<uint32_t>(states.size() + 1);
    out.hard.transitions = std::move(transitions);
    out.hard.accepting.assign(out.hard.num_states, 0);
    for (size_t i = 0; i < states.size(); i++)
      out.hard.accepting[i + 1] =
          states[i].cell == map.goal && states[i].mask == full_mask && states[i].charged;
  }

  // Label DFA over (cell, first station entered); accepting once charged.
  {
    struct Key {
      uint32_t cell;
      int station;  // 0 = none yet
      auto operator<=>(const Key&) const = default;
    };
    std::map<Key, uint32_t> ids;
    std::vector<Key> states;
    auto intern = [&](Key key) {
      auto [it, inserted] = ids.emplace(key, static_cast<uint32_t>(states.size() + 1));
      if (inserted) states.push_back(key);
      return it->second;
    };
    out.label.dfa.alphabet = kAlphabet;
    out.label.dfa.initial = intern({map.start, station_id(map, map.start)});
    std::vector<uint32_t> transitions(4, 0);
    for (size_t i = 0; i < states.size(); i++) {
      Key key = states[i];
      for (uint32_t dir = 0; dir < 4; dir++) {
        int64_t target = move_target(map, key.cell, dir);
        if (target < 0) {
          transitions.push_back(0);
          continue;
        }
        uint32_t cell = static_cast<uint32_t>(target);
        int station = key.station != 0 ? key.station : station_id(map, cell);
        transitions.push_back(intern({cell, station}));
      }
    }
    out.label.dfa.num_states = static_cast<uint32_t>(states.size() + 1);
    out.label.dfa.transitions = std::move(transitions);
    out.label.dfa.accepting.assign(out.label.dfa.num_states, 0);
    out.label.outputs.assign(out.label.dfa.num_states, 0);
    for (size_t i = 0; i < states.size(); i++) {
      out.label.dfa.accepting[i + 1] = states[i].station != 0;
      out.label.outputs[i + 1] = states[i].station;
    }
  }

  // Accumulated-cost DFA: one state per cell plus the dead state.
  {
    out.cost.dfa.alphabet = kAlphabet;
    const uint32_t dead = map.width * map.height;
    out.cost.dfa.num_states = dead + 1;
    out.cost.dfa.initial = map.start;
    out.cost.dfa.accepting.assign(out.cost.dfa.num_states, 1);
    out.cost.weights.assign(out.cost.dfa.num_states, 0);
    for (uint32_t c = 0; c < dead; c++) out.cost.weights[c] = map.passable(c) ? map.costs[c] : 0;
    for (uint32_t c = 0; c <= dead; c++) {
      for (uint32_t dir = 0; dir < 4; dir++) {
        int64_t target = c == dead ? -1 : move_target(map, c, dir);
        out.cost.dfa.transitions.push_back(target < 0 ? dead : static_cast<uint32_t>(target));
      }
    }
  }

  out.hard.validate();
  out.label.validate();
  out.cost.validate();
  return out;
}

Replay replay(const GridMap& map, const Word& word) {
  Replay result;
  uint32_t cell = map.start;
  uint32_t mask = dropoff_bit(map, map.start);
  result.first_station = station_id(map, map.start);
  result.cost = map.costs[cell];
  for (uint32_t dir : word) {
    int64_t target = move_target(map, cell, dir);
    if (target < 0) return result;  // invalid
    cell = static_cast<uint32_t>(target);
    mask |= dropoff_bit(map, cell);
    if (result.first_station == 0) result.first_station = station_id(map, cell);
    result.cost += map.costs[cell];
  }
  const uint32_t full_mask = (1u << map.dropoffs.size()) - 1;
  result.valid = cell == map.goal && mask == full_mask && result.first_station != 0;
  return result;
}

}  // namespace improv
