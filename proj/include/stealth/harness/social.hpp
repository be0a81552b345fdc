#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stealth/harness/scenario.hpp"
#include "stealth/protocol.hpp"
#include "stealth/taxonomy.hpp"
#include "stealth/trust.hpp"

namespace stealth::harness {

/// How many nodes hold each competence and each interest, for a reference
/// population size.
struct SocialDistribution {
  std::map<std::string, int> skill_counts;
  std::map<Interest, int> interest_counts;
  std::size_t reference_population = 100;

  /// doctor 10, nurse 15, caregiver 20, other 25; health 20, music 30,
  /// tourism 45, movies 60, books 15; for 100 nodes.
  static SocialDistribution defaults();
  /// Counts rescaled to n nodes (rounded to nearest).
  SocialDistribution scaled_to(std::size_t n) const;
};

/// Fixed nodes keep their profile verbatim. Other nodes draw a competence
/// (exact counts, shortfall filled with "other", or weighted draws) and a set
/// of 1 to 5 interests whose per-interest totals match the targets (fixed
/// nodes count toward them). Throws ConflictingFixedProfile.
std::vector<NodeProfile> assign_social_aspects(std::size_t n, const SocialDistribution& dist,
                                               const std::map<NodeId, NodeProfile>& fixed,
                                               const SkillTaxonomy& tax, std::uint64_t seed,
                                               SkillAssignment mode = SkillAssignment::fill_other);

/// Focal nodes: "other" with every interest; the MEACK receiver: "doctor"
/// with every interest.
std::map<NodeId, NodeProfile> fixed_profiles(const ScenarioConfig& cfg, const SkillTaxonomy& tax);

}  // namespace stealth::harness
