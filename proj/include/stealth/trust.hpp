#pragma once

// Zero-knowledge trust between an evaluating and an evaluated node: interest
// overlap relative to the evaluator, plus competence similarity to doctor.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stealth/taxonomy.hpp"

namespace stealth {

enum class Interest : std::uint8_t { health = 0, music, tourism, movies, books };

inline constexpr std::size_t kInterestCount = 5;
inline constexpr std::array<Interest, kInterestCount> kAllInterests = {
    Interest::health, Interest::music, Interest::tourism, Interest::movies, Interest::books};

std::string_view to_string(Interest i);
/// Throws UnknownInterest.
Interest parse_interest(std::string_view label);

/// Set of interest labels stored as a bitmap (bit i = Interest i).
class InterestSet {
 public:
  constexpr InterestSet() = default;
  constexpr InterestSet(std::initializer_list<Interest> items) {
    for (auto i : items) insert(i);
  }

  static constexpr InterestSet from_bits(std::uint8_t bits) {
    InterestSet s;
    s.bits_ = bits & kMask;
    return s;
  }
  static constexpr InterestSet all() { return from_bits(kMask); }
  /// '|'-separated labels; "" is the empty set. Throws UnknownInterest.
  static InterestSet parse(std::string_view text);

  constexpr void insert(Interest i) { bits_ |= bit(i); }
  constexpr void erase(Interest i) { bits_ &= static_cast<std::uint8_t>(~bit(i)); }
  constexpr bool contains(Interest i) const { return (bits_ & bit(i)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  int size() const;
  constexpr std::uint8_t bits() const { return bits_; }

  friend constexpr InterestSet operator&(InterestSet a, InterestSet b) {
    return from_bits(a.bits_ & b.bits_);
  }
  friend constexpr InterestSet operator|(InterestSet a, InterestSet b) {
    return from_bits(a.bits_ | b.bits_);
  }
  friend constexpr bool operator==(InterestSet, InterestSet) = default;

  std::vector<Interest> items() const;
  std::string to_string() const;

 private:
  static constexpr std::uint8_t kMask = (1u << kInterestCount) - 1;
  static constexpr std::uint8_t bit(Interest i) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(i));
  }
  std::uint8_t bits_ = 0;
};

struct TrustScore {
  double interest_trust = 0.0;
  double skill_trust = 0.0;
  double total = 0.0;
};

/// |evaluator ∩ evaluated| / |evaluator|, or 0 when the evaluated node is not
/// health-interested. Throws EmptyInterestSet.
double interest_trust(InterestSet evaluator, InterestSet evaluated);

double skill_trust(const SkillTaxonomy& tax, SkillId evaluated_skill);
/// Throws UnknownSkill.
double skill_trust(const SkillTaxonomy& tax, std::string_view evaluated_skill);

/// Mean of interest and skill trust; total is 0 when the evaluated node lacks
/// the health interest. The caller is responsible for only evaluating from a
/// health-interested node.
TrustScore total_trust(InterestSet evaluator, InterestSet evaluated, SkillId evaluated_skill,
                       const SkillTaxonomy& tax);
TrustScore total_trust(InterestSet evaluator, InterestSet evaluated,
                       std::string_view evaluated_skill, const SkillTaxonomy& tax);

}  // namespace stealth
