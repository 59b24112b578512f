#include "automata/languages.hpp"

#include <stdexcept>

namespace regpomdp::automata {

namespace {

Dfa parity_dfa() {
  Dfa dfa;
  dfa.num_states = 2;
  dfa.alphabet_size = 2;
  dfa.transition = {
      0, 1,  // q0: '0' stays, '1' flips
      1, 0,  // q1
  };
  dfa.start = 0;
  dfa.accepting = {0};
  dfa.validate();
  return dfa;
}

// States: 0 = empty input, then (first, last) pairs
// 1 = (0,0), 2 = (0,1), 3 = (1,0), 4 = (1,1).
Dfa even_pairs_dfa() {
  Dfa dfa;
  dfa.num_states = 5;
  dfa.alphabet_size = 2;
  dfa.transition = {
      1, 4,  // empty: first symbol fixes both ends
      1, 2,  // (0,0)
      1, 2,  // (0,1)
      3, 4,  // (1,0)
      3, 4,  // (1,1)
  };
  dfa.start = 0;
  dfa.accepting = {0, 1, 4};
  dfa.validate();
  return dfa;
}

Dfa sym5_dfa() {
  Dfa dfa;
  dfa.num_states = 5;
  dfa.alphabet_size = 2;
  dfa.transition = {
      1, 1,  // q0
      2, 2,  // q1
      3, 3,  // q2
      4, 0,  // q3: '0' -> q4, '1' -> q0
      0, 4,  // q4: '0' -> q0, '1' loops
  };
  dfa.start = 0;
  dfa.accepting = {0};
  dfa.validate();
  return dfa;
}

}  // namespace

const char* to_string(LangName name) {
  switch (name) {
    case LangName::kParity: return "PARITY";
    case LangName::kEvenPairs: return "EVEN_PAIRS";
    case LangName::kSym5: return "SYM5";
  }
  return "UNKNOWN";
}

LangSpec build_language(LangName name) {
  switch (name) {
    case LangName::kParity: return {name, "PARITY", parity_dfa()};
    case LangName::kEvenPairs: return {name, "EVEN_PAIRS", even_pairs_dfa()};
    case LangName::kSym5: return {name, "SYM5", sym5_dfa()};
  }
  throw std::invalid_argument("build_language: unknown language");
}

LangSpec build_language(std::string_view name) {
  if (name == "PARITY") return build_language(LangName::kParity);
  if (name == "EVEN_PAIRS") return build_language(LangName::kEvenPairs);
  if (name == "SYM5") return build_language(LangName::kSym5);
  throw std::invalid_argument("build_language: unknown language '" + std::string(name) + "'");
}

}  // namespace regpomdp::automata
