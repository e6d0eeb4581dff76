#include "blackjack/action.hpp"

#include <bit>
#include <stdexcept>

namespace blackjack {

std::optional<Action> actionFromCode(int c) {
  if (c < 0 || c >= kNumActions) return std::nullopt;
  return static_cast<Action>(c);
}

std::string_view actionName(Action a) {
  switch (a) {
  case Action::Stand: return "Stand";
  case Action::Hit: return "Hit";
  case Action::Double: return "Double";
  case Action::Split: return "Split";
  case Action::Surrender: return "Surrender";
  case Action::Insurance: return "Insurance";
  }
  return "?";
}

char actionLetter(Action a) {
  static constexpr char kLetters[kNumActions] = {'S', 'H', 'D', 'P', 'R', 'I'};
  return kLetters[code(a)];
}

ActionSet ActionSet::fromCodes(const std::vector<int> &codes) {
  ActionSet s;
  for (int c : codes) {
    auto a = actionFromCode(c);
    if (!a) throw std::invalid_argument("unknown action code " + std::to_string(c));
    s.insert(*a);
  }
  return s;
}

int ActionSet::size() const { return std::popcount(bits_); }

std::vector<int> ActionSet::codes() const {
  std::vector<int> out;
  for (int c = 0; c < kNumActions; ++c) {
    if ((bits_ >> c) & 1U) out.push_back(c);
  }
  return out;
}

ActionMask ActionSet::mask() const {
  ActionMask m{};
  for (int c = 0; c < kNumActions; ++c) m[c] = (bits_ >> c) & 1U;
  return m;
}

std::string ActionSet::toString() const {
  std::string out;
  for (int c : codes()) {
    if (!out.empty()) out += ',';
    out += std::to_string(c);
  }
  return out;
}

ActionMask operator&(const ActionMask &a, const ActionMask &b) {
  ActionMask m{};
  for (int i = 0; i < kNumActions; ++i) m[i] = a[i] && b[i];
  return m;
}

int countLegal(const ActionMask &mask) {
  int n = 0;
  for (bool b : mask) n += b ? 1 : 0;
  return n;
}

} // namespace blackjack
