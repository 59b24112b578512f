#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace regpomdp::automata {

// Deterministic finite automaton over a fixed-size alphabet. Immutable after
// construction; all operations on it are pure.
struct Dfa {
  int num_states = 0;
  int alphabet_size = 0;
  std::vector<int> transition;  // row-major, [state * alphabet_size + symbol]
  int start = 0;
  std::vector<int> accepting;   // sorted, unique

  int next(int state, int symbol) const { return transition[static_cast<size_t>(state) * alphabet_size + symbol]; }
  bool is_accepting(int state) const;

  // Throws std::invalid_argument when any structural invariant is broken.
  void validate() const;
};

bool dfa_accepts(const Dfa& dfa, std::span<const int> word);

nlohmann::json dfa_to_json(const Dfa& dfa);
Dfa dfa_from_json(const nlohmann::json& j);

}  // namespace regpomdp::automata
