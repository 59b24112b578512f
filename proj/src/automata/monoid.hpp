#pragma once

#include <cstddef>
#include <vector>

#include "automata/dfa.hpp"

namespace regpomdp::automata {

// A state-to-state map; entry i is the image of state i.
using StateMap = std::vector<int>;

StateMap identity_map(int num_states);
// Apply `first`, then `then`.
StateMap compose(const StateMap& first, const StateMap& then);
bool is_permutation(const StateMap& map);

struct TransitionMonoid {
  std::vector<StateMap> elements;    // closure under composition, includes identity
  std::vector<StateMap> generators;  // one per alphabet symbol
  bool group_of_units_solvable = true;
};

// Closure of the per-symbol generators under composition, plus the identity.
// Throws std::runtime_error when the closure would exceed `element_cap`.
TransitionMonoid transition_monoid(const Dfa& dfa, size_t element_cap = 10000);

// Derived-series test on a finite permutation group given as a closed element
// set: iterate commutator-subgroup closure until a fixpoint; solvable iff the
// series reaches the trivial group.
bool is_solvable_group(const std::vector<StateMap>& group_elements);

enum class HardnessClass { kNc1Complete, kInTc0 };
const char* to_string(HardnessClass c);

// NC1-complete iff the group of invertible elements of the transition monoid
// is unsolvable.
HardnessClass classify_language(const Dfa& dfa, size_t element_cap = 10000);

}  // namespace regpomdp::automata
