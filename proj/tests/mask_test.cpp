#include <cctype>
#include <string>
#include <vector>

#include "doctest.h"
#include "mvck/mask.hpp"

using namespace mvck;

namespace {

// Straight-line reference interpreter, kept independent of the production
// mask code. Applies a whole key sequence to an empty buffer and returns the
// final buffer plus the per-key acceptance and emitted (position, char)
// pairs.
struct RefStep {
  bool accepted = false;
  std::vector<std::pair<int, char>> emitted;
};

struct RefRun {
  std::string buffer;
  std::vector<RefStep> steps;
};

bool ref_is_slot(char c) { return c == '#' || c == 'A' || c == '*'; }

bool ref_accepts(char slot, char key) {
  unsigned char u = static_cast<unsigned char>(key);
  if (slot == '#') return std::isdigit(u) != 0;
  if (slot == 'A') return std::isalpha(u) != 0;
  if (slot == '*') return std::isprint(u) != 0;
  return false;
}

RefRun ref_run(const std::string& mask, const std::string& keys) {
  RefRun run;
  for (char key : keys) {
    RefStep step;
    // find the next slot, collecting literals on the way
    std::size_t pos = run.buffer.size();
    std::string lits;
    while (pos < mask.size() && !ref_is_slot(mask[pos])) {
      lits.push_back(mask[pos]);
      ++pos;
    }
    if (pos < mask.size() && ref_accepts(mask[pos], key)) {
      step.accepted = true;
      for (char lit : lits) {
        step.emitted.push_back({static_cast<int>(run.buffer.size()), lit});
        run.buffer.push_back(lit);
      }
      step.emitted.push_back({static_cast<int>(run.buffer.size()), key});
      run.buffer.push_back(key);
      // trailing literals flush when no slot remains
      std::size_t rest = pos + 1;
      bool slot_left = false;
      for (std::size_t i = rest; i < mask.size(); ++i) {
        if (ref_is_slot(mask[i])) slot_left = true;
      }
      if (!slot_left) {
        for (std::size_t i = rest; i < mask.size(); ++i) {
          step.emitted.push_back({static_cast<int>(run.buffer.size()), mask[i]});
          run.buffer.push_back(mask[i]);
        }
      }
    }
    run.steps.push_back(std::move(step));
  }
  return run;
}

std::vector<std::pair<int, char>> emitted_pairs(const MaskStep& step) {
  std::vector<std::pair<int, char>> out;
  for (const RenderCommand& cmd : step.emitted) {
    const auto& set = std::get<RenderCommand::SetCharAt>(cmd.v);
    out.push_back({set.position, set.ch});
  }
  return out;
}

}  // namespace

TEST_CASE("digit slot accepts a digit at the first position") {
  MaskStep step = mask_step("##-##", "", '3');
  CHECK(step.accepted);
  CHECK(step.buffer == "3");
  CHECK(step.cursor == 1);
  CHECK(emitted_pairs(step) == std::vector<std::pair<int, char>>{{0, '3'}});
}

TEST_CASE("digit slot rejects a letter, leaving everything unchanged") {
  MaskStep step = mask_step("##-##", "", 'a');
  CHECK_FALSE(step.accepted);
  CHECK(step.emitted.empty());
  CHECK(step.buffer.empty());
  CHECK(step.cursor == 0);
}

TEST_CASE("leading literal is inserted ahead of the keyed character") {
  MaskStep step = mask_step("(###", "", '5');
  CHECK(step.accepted);
  CHECK(step.buffer == "(5");
  CHECK(emitted_pairs(step) == std::vector<std::pair<int, char>>{{0, '('}, {1, '5'}});
}

TEST_CASE("interior literal waits for the next slot's key") {
  MaskStep first = mask_step("##-##", "3", '4');
  CHECK(first.buffer == "34");  // dash not flushed yet, a slot remains
  MaskStep second = mask_step("##-##", "34", '5');
  CHECK(second.buffer == "34-5");
  CHECK(emitted_pairs(second) == std::vector<std::pair<int, char>>{{2, '-'}, {3, '5'}});
}

TEST_CASE("trailing literals flush once the last slot fills") {
  MaskStep step = mask_step("##-", "1", '2');
  CHECK(step.accepted);
  CHECK(step.buffer == "12-");
  CHECK(mask_full_match("##-", step.buffer));
}

TEST_CASE("full buffer rejects further keys") {
  MaskStep step = mask_step("##", "12", '3');
  CHECK_FALSE(step.accepted);
}

TEST_CASE("slotless masks accept nothing") {
  for (char key : {'1', 'a', '-', '('}) {
    CHECK_FALSE(mask_step("--", "", key).accepted);
    CHECK_FALSE(mask_step("(", "", key).accepted);
  }
}

TEST_CASE("full match requires equal length, literal identity and slot classes") {
  CHECK(mask_full_match("##-##", "34-56"));
  CHECK_FALSE(mask_full_match("##-##", "34-5"));
  CHECK_FALSE(mask_full_match("##-##", "34x56"));
  CHECK_FALSE(mask_full_match("AA", "a1"));
  CHECK(mask_full_match("", ""));
}

TEST_CASE("bounded-exhaustive equivalence against the reference interpreter") {
  const std::string alphabet = "#A-(";
  const std::string keys_alphabet = "7k-(";

  std::vector<std::string> masks = {""};
  std::vector<std::string> grown = {""};
  for (int len = 1; len <= 3; ++len) {
    std::vector<std::string> next;
    for (const std::string& prefix : grown) {
      for (char c : alphabet) next.push_back(prefix + c);
    }
    masks.insert(masks.end(), next.begin(), next.end());
    grown = std::move(next);
  }

  std::vector<std::string> sequences = {""};
  std::vector<std::string> seq_grown = {""};
  for (int len = 1; len <= 3; ++len) {
    std::vector<std::string> next;
    for (const std::string& prefix : seq_grown) {
      for (char c : keys_alphabet) next.push_back(prefix + c);
    }
    sequences.insert(sequences.end(), next.begin(), next.end());
    seq_grown = std::move(next);
  }

  for (const std::string& mask : masks) {
    for (const std::string& keys : sequences) {
      RefRun expected = ref_run(mask, keys);
      std::string buffer;
      for (std::size_t i = 0; i < keys.size(); ++i) {
        MaskStep step = mask_step(mask, buffer, keys[i]);
        REQUIRE(step.accepted == expected.steps[i].accepted);
        REQUIRE(emitted_pairs(step) == expected.steps[i].emitted);
        buffer = step.buffer;
      }
      REQUIRE(buffer == expected.buffer);
    }
  }
}

TEST_CASE("every mask with a slot is completable and the fill matches the pattern") {
  const std::string alphabet = "#A-(";
  std::vector<std::string> masks;
  std::vector<std::string> grown = {""};
  for (int len = 1; len <= 4; ++len) {
    std::vector<std::string> next;
    for (const std::string& prefix : grown) {
      for (char c : alphabet) next.push_back(prefix + c);
    }
    masks.insert(masks.end(), next.begin(), next.end());
    grown = std::move(next);
  }

  for (const std::string& mask : masks) {
    if (mask_slot_count(mask) == 0) {
      // Degenerate: no input slot, nothing to fill; every key is rejected.
      CHECK_FALSE(mask_step(mask, "", '1').accepted);
      continue;
    }
    std::string buffer;
    int filled = 0;
    for (int guard = 0; guard < 16 && filled < mask_slot_count(mask); ++guard) {
      for (char key : {'1', 'x', '!'}) {
        MaskStep step = mask_step(mask, buffer, key);
        if (step.accepted) {
          buffer = step.buffer;
          ++filled;
          break;
        }
      }
    }
    REQUIRE(filled == mask_slot_count(mask));
    CHECK(mask_full_match(mask, buffer));
  }
}
