#include "stealth/trust.hpp"

#include <bit>

#include "stealth/errors.hpp"

namespace stealth {
namespace {

constexpr std::array<std::string_view, kInterestCount> kInterestNames = {
    "health", "music", "tourism", "movies", "books"};

}  // namespace

std::string_view to_string(Interest i) { return kInterestNames.at(static_cast<std::size_t>(i)); }

Interest parse_interest(std::string_view label) {
  const auto norm = normalize_label(label);
  for (std::size_t k = 0; k < kInterestNames.size(); ++k) {
    if (norm == kInterestNames[k]) return static_cast<Interest>(k);
  }
  throw UnknownInterest("unknown interest '" + std::string(label) + "'");
}

InterestSet InterestSet::parse(std::string_view text) {
  InterestSet set;
  while (!text.empty()) {
    auto bar = text.find('|');
    auto token = text.substr(0, bar);
    if (!normalize_label(token).empty()) set.insert(parse_interest(token));
    if (bar == std::string_view::npos) break;
    text.remove_prefix(bar + 1);
  }
  return set;
}

int InterestSet::size() const { return std::popcount(bits_); }

std::vector<Interest> InterestSet::items() const {
  std::vector<Interest> out;
  for (auto i : kAllInterests) {
    if (contains(i)) out.push_back(i);
  }
  return out;
}

std::string InterestSet::to_string() const {
  std::string out;
  for (auto i : items()) {
    if (!out.empty()) out.push_back('|');
    out += stealth::to_string(i);
  }
  return out;
}

double interest_trust(InterestSet evaluator, InterestSet evaluated) {
  if (evaluator.empty() || evaluated.empty()) throw EmptyInterestSet("interest set is empty");
  if (!evaluated.contains(Interest::health)) return 0.0;
  return static_cast<double>((evaluator & evaluated).size()) /
         static_cast<double>(evaluator.size());
}

double skill_trust(const SkillTaxonomy& tax, SkillId evaluated_skill) {
  return tax.similarity(evaluated_skill);
}

double skill_trust(const SkillTaxonomy& tax, std::string_view evaluated_skill) {
  return skill_trust(tax, tax.id(evaluated_skill));
}

TrustScore total_trust(InterestSet evaluator, InterestSet evaluated, SkillId evaluated_skill,
                       const SkillTaxonomy& tax) {
  TrustScore score;
  score.interest_trust = interest_trust(evaluator, evaluated);
  score.skill_trust = skill_trust(tax, evaluated_skill);
  score.total = evaluated.contains(Interest::health)
                    ? (score.interest_trust + score.skill_trust) / 2.0
                    : 0.0;
  return score;
}

TrustScore total_trust(InterestSet evaluator, InterestSet evaluated,
                       std::string_view evaluated_skill, const SkillTaxonomy& tax) {
  return total_trust(evaluator, evaluated, tax.id(evaluated_skill), tax);
}

}  // namespace stealth
