#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mvck/messages.hpp"

namespace mvck {

// Mask grammar: '#' accepts a digit, 'A' accepts an ASCII letter, '*' accepts
// any printable character; every other character is a literal inserted by the
// mask itself, never typed.

bool mask_is_slot(char mask_char);
bool mask_slot_accepts(char mask_char, char key);
int mask_slot_count(std::string_view mask);

// Full match: text has the mask's length, literals match exactly, slots match
// their character class. Backs the TextPattern validation rule.
bool mask_full_match(std::string_view mask, std::string_view text);

struct MaskStep {
  bool accepted = false;
  // SetCharAt commands with an empty property name; the owning blueprint
  // stamps the field name before emitting.
  std::vector<RenderCommand> emitted;
  std::string buffer;
  int cursor = 0;
};

// One keystroke against a partially filled mask. Pending literals before the
// next slot are inserted ahead of the keyed character; once the final slot is
// filled, trailing literals are flushed so a completed buffer full-matches
// the mask. Pure function; rejection leaves buffer and cursor unchanged.
MaskStep mask_step(std::string_view mask, std::string_view buffer, char key);

}  // namespace mvck
