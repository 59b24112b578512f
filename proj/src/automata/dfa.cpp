#include "automata/dfa.hpp"

#include <algorithm>
#include <stdexcept>

namespace regpomdp::automata {

bool Dfa::is_accepting(int state) const {
  return std::binary_search(accepting.begin(), accepting.end(), state);
}

void Dfa::validate() const {
  if (num_states <= 0) throw std::invalid_argument("dfa: num_states must be positive");
  if (alphabet_size <= 0) throw std::invalid_argument("dfa: alphabet_size must be positive");
  if (transition.size() != static_cast<size_t>(num_states) * alphabet_size) {
    throw std::invalid_argument("dfa: transition table size " + std::to_string(transition.size()) +
                                " does not match num_states * alphabet_size");
  }
  for (int t : transition) {
    if (t < 0 || t >= num_states) throw std::invalid_argument("dfa: transition target " + std::to_string(t) + " out of range");
  }
  if (start < 0 || start >= num_states) throw std::invalid_argument("dfa: start state out of range");
  if (!std::is_sorted(accepting.begin(), accepting.end())) throw std::invalid_argument("dfa: accepting set must be sorted");
  for (int a : accepting) {
    if (a < 0 || a >= num_states) throw std::invalid_argument("dfa: accepting state " + std::to_string(a) + " out of range");
  }
}

bool dfa_accepts(const Dfa& dfa, std::span<const int> word) {
  int state = dfa.start;
  for (int symbol : word) {
    if (symbol < 0 || symbol >= dfa.alphabet_size) {
      throw std::invalid_argument("dfa_accepts: symbol " + std::to_string(symbol) + " outside alphabet of size " +
                                  std::to_string(dfa.alphabet_size));
    }
    state = dfa.next(state, symbol);
  }
  return dfa.is_accepting(state);
}

nlohmann::json dfa_to_json(const Dfa& dfa) {
  return nlohmann::json{{"num_states", dfa.num_states},
                        {"alphabet_size", dfa.alphabet_size},
                        {"transition", dfa.transition},
                        {"start", dfa.start},
                        {"accepting", dfa.accepting}};
}

Dfa dfa_from_json(const nlohmann::json& j) {
  Dfa dfa;
  dfa.num_states = j.at("num_states").get<int>();
  dfa.alphabet_size = j.at("alphabet_size").get<int>();
  dfa.transition = j.at("transition").get<std::vector<int>>();
  dfa.start = j.at("start").get<int>();
  dfa.accepting = j.at("accepting").get<std::vector<int>>();
  std::sort(dfa.accepting.begin(), dfa.accepting.end());
  dfa.accepting.erase(std::unique(dfa.accepting.begin(), dfa.accepting.end()), dfa.accepting.end());
  dfa.validate();
  return dfa;
}

}  // namespace regpomdp::automata
