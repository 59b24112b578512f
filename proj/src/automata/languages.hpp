#pragma once

#include <string>
#include <string_view>

#include "automata/dfa.hpp"

namespace regpomdp::automata {

enum class LangName { kParity, kEvenPairs, kSym5 };

struct LangSpec {
  LangName name;
  std::string label;
  Dfa dfa;
};

// The three built-in binary languages with their minimal DFAs:
//   PARITY      - even number of '1's
//   EVEN_PAIRS  - first and last symbol agree (empty word accepted)
//   SYM5        - ((0+1)^3(01*0+1))*, whose transition monoid is S5
LangSpec build_language(LangName name);
LangSpec build_language(std::string_view name);  // "PARITY" | "EVEN_PAIRS" | "SYM5"

const char* to_string(LangName name);

}  // namespace regpomdp::automata
