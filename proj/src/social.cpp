#include "stealth/harness/social.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stealth/errors.hpp"
#include "stealth/sim/rng.hpp"

namespace stealth::harness {
namespace {

constexpr std::uint64_t kSkillStream = 0x51;
constexpr std::uint64_t kInterestStream = 0x1A;
constexpr int kMaxInterests = 5;

int scale(int count, std::size_t n, std::size_t ref) {
  if (ref == 0) return 0;
  return static_cast<int>(std::lround(static_cast<double>(count) * static_cast<double>(n) /
                                      static_cast<double>(ref)));
}

std::vector<SkillId> draw_skills(std::size_t free, const SocialDistribution& dist,
                                 const std::map<NodeId, NodeProfile>& fixed, const SkillTaxonomy& tax,
                                 sim::Rng& rng, SkillAssignment mode) {
  std::vector<SkillId> out;
  out.reserve(free);
  if (mode == SkillAssignment::weights) {
    std::vector<std::pair<SkillId, std::uint64_t>> weights;
    std::uint64_t total = 0;
    for (const auto& [label, count] : dist.skill_counts) {
      if (count <= 0) continue;
      weights.emplace_back(tax.id(label), static_cast<std::uint64_t>(count));
      total += static_cast<std::uint64_t>(count);
    }
    for (std::size_t i = 0; i < free; ++i) {
      if (total == 0) {
        out.push_back(tax.other());
        continue;
      }
      auto r = rng.below(total);
      for (const auto& [skill, w] : weights) {
        if (r < w) {
          out.push_back(skill);
          break;
        }
        r -= w;
      }
    }
    return out;
  }
  for (const auto& [label, count] : dist.skill_counts) {
    const SkillId skill = tax.id(label);
    int remaining = count;
    for (const auto& [id, p] : fixed) {
      if (p.skill == skill) --remaining;
    }
    for (int i = 0; i < remaining; ++i) out.push_back(skill);
  }
  rng.shuffle(std::span(out));
  if (out.size() > free) out.resize(free);
  out.resize(free, tax.other());
  rng.shuffle(std::span(out));
  return out;
}

}  // namespace

SocialDistribution SocialDistribution::defaults() {
  SocialDistribution d;
  d.skill_counts = {{"doctor", 10}, {"nurse", 15}, {"caregiver", 20}, {"other", 25}};
  d.interest_counts = {{Interest::health, 20},
                       {Interest::music, 30},
                       {Interest::tourism, 45},
                       {Interest::movies, 60},
                       {Interest::books, 15}};
  d.reference_population = 100;
  return d;
}

SocialDistribution SocialDistribution::scaled_to(std::size_t n) const {
  SocialDistribution d;
  d.reference_population = n;
  for (const auto& [k, v] : skill_counts) d.skill_counts[k] = scale(v, n, reference_population);
  for (const auto& [k, v] : interest_counts) d.interest_counts[k] = scale(v, n, reference_population);
  return d;
}

std::vector<NodeProfile> assign_social_aspects(std::size_t n, const SocialDistribution& dist,
                                               const std::map<NodeId, NodeProfile>& fixed,
                                               const SkillTaxonomy& tax, std::uint64_t seed,
                                               SkillAssignment mode) {
  for (const auto& [id, p] : fixed) {
    if (id >= n) {
      throw ConflictingFixedProfile("fixed profile for node " + std::to_string(id) + " outside " +
                                    std::to_string(n) + " nodes");
    }
    if (p.id != id) throw ConflictingFixedProfile("fixed profile keyed " + std::to_string(id) +
                                                  " carries id " + std::to_string(p.id));
    if (p.interests.empty()) {
      throw ConflictingFixedProfile("fixed profile for node " + std::to_string(id) + " has no interests");
    }
    if (p.skill >= tax.size()) {
      throw ConflictingFixedProfile("fixed profile for node " + std::to_string(id) + " has an unknown skill");
    }
  }
  for (const auto& [label, count] : dist.skill_counts) {
    if (count < 0) throw InvalidParams("negative count for skill " + label);
  }
  for (const auto& [interest, count] : dist.interest_counts) {
    if (count < 0) throw InvalidParams("negative count for interest " + std::string(to_string(interest)));
  }

  std::vector<NodeProfile> out(n);
  std::vector<NodeId> free;
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = static_cast<NodeId>(i);
    if (auto it = fixed.find(id); it != fixed.end()) {
      out[i] = it->second;
    } else {
      out[i].id = id;
      free.push_back(id);
    }
  }

  sim::Rng skill_rng(sim::derive_seed(seed, kSkillStream));
  const auto skills = draw_skills(free.size(), dist, fixed, tax, skill_rng, mode);
  for (std::size_t i = 0; i < free.size(); ++i) out[free[i]].skill = skills[i];

  // Interest tokens: one per remaining unit of each target.
  sim::Rng rng(sim::derive_seed(seed, kInterestStream));
  std::vector<Interest> tokens;
  for (auto interest : kAllInterests) {
    auto it = dist.interest_counts.find(interest);
    int remaining = it == dist.interest_counts.end() ? 0 : it->second;
    for (const auto& [id, p] : fixed) {
      if (p.interests.contains(interest)) --remaining;
    }
    for (int k = 0; k < remaining; ++k) tokens.push_back(interest);
  }
  rng.shuffle(std::span(tokens));

  std::vector<NodeId> order = free;
  rng.shuffle(std::span(order));
  std::size_t next_token = 0;
  for (auto id : order) {
    if (next_token == tokens.size()) break;
    out[id].interests.insert(tokens[next_token++]);
  }
  std::vector<NodeId> candidates;
  for (; next_token < tokens.size(); ++next_token) {
    const auto interest = tokens[next_token];
    candidates.clear();
    for (auto id : free) {
      const auto& s = out[id].interests;
      if (!s.contains(interest) && s.size() < kMaxInterests) candidates.push_back(id);
    }
    if (candidates.empty()) continue;
    out[candidates[rng.below(candidates.size())]].interests.insert(interest);
  }
  // Fewer tokens than nodes: the rest get one non-health interest.
  for (auto id : order) {
    if (!out[id].interests.empty()) continue;
    out[id].interests.insert(kAllInterests[1 + rng.below(kAllInterests.size() - 1)]);
  }
  return out;
}

std::map<NodeId, NodeProfile> fixed_profiles(const ScenarioConfig& cfg, const SkillTaxonomy& tax) {
  std::map<NodeId, NodeProfile> out;
  for (auto id : cfg.focal_nodes) out[id] = NodeProfile{id, tax.other(), InterestSet::all()};
  if (cfg.receiver) out[*cfg.receiver] = NodeProfile{*cfg.receiver, tax.doctor(), InterestSet::all()};
  return out;
}

}  // namespace stealth::harness
