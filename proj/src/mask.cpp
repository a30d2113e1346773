#include "mvck/mask.hpp"

#include <cctype>

namespace mvck {

bool mask_is_slot(char mask_char) {
  return mask_char == '#' || mask_char == 'A' || mask_char == '*';
}

bool mask_slot_accepts(char mask_char, char key) {
  const auto uc = static_cast<unsigned char>(key);
  switch (mask_char) {
    case '#': return std::isdigit(uc) != 0;
    case 'A': return std::isalpha(uc) != 0;
    case '*': return std::isprint(uc) != 0;
    default: return false;
  }
}

int mask_slot_count(std::string_view mask) {
  int n = 0;
  for (char c : mask) {
    if (mask_is_slot(c)) ++n;
  }
  return n;
}

bool mask_full_match(std::string_view mask, std::string_view text) {
  if (mask.size() != text.size()) return false;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask_is_slot(mask[i])) {
      if (!mask_slot_accepts(mask[i], text[i])) return false;
    } else if (mask[i] != text[i]) {
      return false;
    }
  }
  return true;
}

MaskStep mask_step(std::string_view mask, std::string_view buffer, char key) {
  MaskStep step;
  step.buffer = std::string(buffer);
  step.cursor = static_cast<int>(buffer.size());

  std::size_t pos = buffer.size();
  std::string pending;
  while (pos < mask.size() && !mask_is_slot(mask[pos])) {
    pending.push_back(mask[pos]);
    ++pos;
  }
  if (pos >= mask.size() || !mask_slot_accepts(mask[pos], key)) {
    return step;  // no slot left for this key, or class mismatch
  }

  step.accepted = true;
  std::size_t at = buffer.size();
  for (char lit : pending) {
    step.emitted.push_back(RenderCommand::set_char_at("", static_cast<int>(at), lit));
    step.buffer.push_back(lit);
    ++at;
  }
  step.emitted.push_back(RenderCommand::set_char_at("", static_cast<int>(at), key));
  step.buffer.push_back(key);
  ++pos;

  // If only literals remain, the mask is complete: flush them.
  std::size_t look = pos;
  while (look < mask.size() && !mask_is_slot(mask[look])) ++look;
  if (look == mask.size()) {
    for (std::size_t i = pos; i < mask.size(); ++i) {
      step.emitted.push_back(
          RenderCommand::set_char_at("", static_cast<int>(step.buffer.size()), mask[i]));
      step.buffer.push_back(mask[i]);
    }
  }
  step.cursor = static_cast<int>(step.buffer.size());
  return step;
}

}  // namespace mvck
