#include "automata/monoid.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace regpomdp::automata {

StateMap identity_map(int num_states) {
  StateMap id(static_cast<size_t>(num_states));
  for (int i = 0; i < num_states; ++i) id[static_cast<size_t>(i)] = i;
  return id;
}

StateMap compose(const StateMap& first, const StateMap& then) {
  StateMap out(first.size());
  for (size_t i = 0; i < first.size(); ++i) out[i] = then[static_cast<size_t>(first[i])];
  return out;
}

bool is_permutation(const StateMap& map) {
  std::vector<bool> seen(map.size(), false);
  for (int v : map) {
    if (v < 0 || v >= static_cast<int>(map.size()) || seen[static_cast<size_t>(v)]) return false;
    seen[static_cast<size_t>(v)] = true;
  }
  return true;
}

namespace {

StateMap invert_permutation(const StateMap& perm) {
  StateMap inv(perm.size());
  for (size_t i = 0; i < perm.size(); ++i) inv[static_cast<size_t>(perm[i])] = static_cast<int>(i);
  return inv;
}

// Closure of a generating set under composition. For permutation generators
// this is the generated subgroup (inverses arise as powers).
std::set<StateMap> close_under_composition(const std::vector<StateMap>& generators, int num_states,
                                           size_t element_cap) {
  std::set<StateMap> elements;
  elements.insert(identity_map(num_states));
  std::vector<StateMap> frontier(generators);
  for (const StateMap& g : generators) elements.insert(g);
  while (!frontier.empty()) {
    if (elements.size() > element_cap) {
      throw std::runtime_error("monoid closure exceeded element cap of " + std::to_string(element_cap));
    }
    std::vector<StateMap> next;
    for (const StateMap& f : frontier) {
      for (const StateMap& g : generators) {
        StateMap fg = compose(f, g);
        if (elements.insert(fg).second) next.push_back(std::move(fg));
        StateMap gf = compose(g, f);
        if (elements.insert(gf).second) next.push_back(std::move(gf));
      }
    }
    frontier = std::move(next);
  }
  if (elements.size() > element_cap) {
    throw std::runtime_error("monoid closure exceeded element cap of " + std::to_string(element_cap));
  }
  return elements;
}

}  // namespace

TransitionMonoid transition_monoid(const Dfa& dfa, size_t element_cap) {
  dfa.validate();
  TransitionMonoid monoid;
  monoid.generators.reserve(static_cast<size_t>(dfa.alphabet_size));
  for (int symbol = 0; symbol < dfa.alphabet_size; ++symbol) {
    StateMap g(static_cast<size_t>(dfa.num_states));
    for (int q = 0; q < dfa.num_states; ++q) g[static_cast<size_t>(q)] = dfa.next(q, symbol);
    monoid.generators.push_back(std::move(g));
  }
  std::set<StateMap> closed = close_under_composition(monoid.generators, dfa.num_states, element_cap);
  monoid.elements.assign(closed.begin(), closed.end());

  std::vector<StateMap> units;
  for (const StateMap& e : monoid.elements) {
    if (is_permutation(e)) units.push_back(e);
  }
  monoid.group_of_units_solvable = is_solvable_group(units);
  return monoid;
}

bool is_solvable_group(const std::vector<StateMap>& group_elements) {
  if (group_elements.empty()) return true;
  const int n = static_cast<int>(group_elements.front().size());
  std::vector<StateMap> current = group_elements;
  // Generous cap: the derived series never grows past the starting group.
  const size_t cap = group_elements.size() + 1;
  while (current.size() > 1) {
    std::vector<StateMap> commutators;
    std::set<StateMap> seen;
    for (const StateMap& a : current) {
      const StateMap a_inv = invert_permutation(a);
      for (const StateMap& b : current) {
        const StateMap b_inv = invert_permutation(b);
        // [a, b] = a^-1 b^-1 a b, applied left to right.
        StateMap c = compose(compose(compose(a_inv, b_inv), a), b);
        if (seen.insert(c).second) commutators.push_back(std::move(c));
      }
    }
    std::set<StateMap> derived = close_under_composition(commutators, n, cap);
    if (derived.size() == current.size()) return false;  // fixpoint above the trivial group
    current.assign(derived.begin(), derived.end());
  }
  return true;
}

const char* to_string(HardnessClass c) {
  switch (c) {
    case HardnessClass::kNc1Complete: return "NC1_COMPLETE";
    case HardnessClass::kInTc0: return "IN_TC0";
  }
  return "UNKNOWN";
}

HardnessClass classify_language(const Dfa& dfa, size_t element_cap) {
  TransitionMonoid monoid = transition_monoid(dfa, element_cap);
  return monoid.group_of_units_solvable ? HardnessClass::kInTc0 : HardnessClass::kNc1Complete;
}

}  // namespace regpomdp::automata
