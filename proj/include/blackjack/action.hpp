#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace blackjack {

/** Wire and log encoding: 0=Stand,1=Hit,2=Double,3=Split,4=Surrender,5=Insurance. */
enum class Action : uint8_t { Stand = 0, Hit = 1, Double = 2, Split = 3, Surrender = 4, Insurance = 5 };

inline constexpr int kNumActions = 6;

using ActionMask = std::array<bool, kNumActions>;

constexpr int code(Action a) { return static_cast<int>(a); }

std::optional<Action> actionFromCode(int code);
std::string_view actionName(Action a);
/** Single-letter label used by heatmaps: S H D P R I. */
char actionLetter(Action a);

/** Small set of actions; what a curriculum stage makes available. */
class ActionSet {
public:
  constexpr ActionSet() = default;
  constexpr ActionSet(std::initializer_list<Action> actions) {
    for (Action a : actions) insert(a);
  }

  static constexpr ActionSet all() { return ActionSet(uint8_t{0x3F}); }
  static constexpr ActionSet fromBits(uint8_t bits) { return ActionSet(static_cast<uint8_t>(bits & 0x3F)); }
  /** Throws std::invalid_argument on a code outside 0..5. */
  static ActionSet fromCodes(const std::vector<int> &codes);

  constexpr bool contains(Action a) const { return (bits_ >> code(a)) & 1U; }
  constexpr void insert(Action a) { bits_ = static_cast<uint8_t>(bits_ | (1U << code(a))); }
  constexpr void erase(Action a) { bits_ = static_cast<uint8_t>(bits_ & ~(1U << code(a))); }
  constexpr uint8_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  int size() const;
  constexpr bool isSubsetOf(ActionSet other) const { return (bits_ & ~other.bits_) == 0; }

  std::vector<int> codes() const;
  ActionMask mask() const;
  /** "0,1,2" */
  std::string toString() const;

  friend constexpr bool operator==(ActionSet, ActionSet) = default;

private:
  explicit constexpr ActionSet(uint8_t bits) : bits_(bits) {}
  uint8_t bits_ = 0;
};

ActionMask operator&(const ActionMask &a, const ActionMask &b);
int countLegal(const ActionMask &mask);

} // namespace blackjack
