#pragma once

// Healthcare skill taxonomy and competence similarity to the reference
// competence (doctor).

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace stealth {

using SkillId = std::uint16_t;

/// Lowercases, trims, and maps spaces and hyphens to underscores.
std::string normalize_label(std::string_view label);

struct TaxonomyEdge {
  std::string child;
  std::string parent;  // empty for the root
};

/// Rooted tree of competences. Immutable once built; similarity to doctor is
/// precomputed for every label so lookups in the simulator are O(1).
class SkillTaxonomy {
 public:
  /// Tree shipped with the library: root -> health -> {medicine, nursing},
  /// medicine -> doctor, nursing -> {nurse, practitioner}, practitioner ->
  /// {caregiver, police_officer, firefighter, life_saving}, root -> other.
  static SkillTaxonomy build_default();

  /// Throws InvalidTaxonomy when the edges do not form a single rooted tree
  /// containing the mandatory health branch.
  static SkillTaxonomy from_edges(std::span<const TaxonomyEdge> edges);

  /// `child<TAB>parent` lines, root declared as `root<TAB>-`. Blank lines and
  /// lines starting with '#' are skipped.
  static SkillTaxonomy parse(std::istream& in);
  static SkillTaxonomy load(const std::filesystem::path& path);

  /// Inverse of parse(): one edge per line, root first, then breadth order.
  std::string to_config() const;

  std::size_t size() const noexcept { return labels_.size(); }
  std::optional<SkillId> find(std::string_view label) const;
  /// Throws UnknownSkill.
  SkillId id(std::string_view label) const;
  const std::string& label(SkillId s) const { return labels_.at(s); }
  std::optional<SkillId> parent(SkillId s) const;

  SkillId root() const noexcept { return root_; }
  SkillId doctor() const noexcept { return doctor_; }
  SkillId nurse() const noexcept { return nurse_; }
  SkillId other() const noexcept { return other_; }

  /// Edge count from `s` to the root.
  int depth(SkillId s) const { return depth_.at(s); }
  SkillId deepest_common_ancestor(SkillId a, SkillId b) const;
  bool is_descendant_or_self(SkillId s, SkillId ancestor) const;

  /// 2*N3/(N1+N2) against doctor, with "other" pinned to 0.
  double similarity(SkillId s) const { return similarity_.at(s); }

 private:
  SkillTaxonomy() = default;

  std::vector<std::string> labels_;
  std::vector<std::optional<SkillId>> parent_;
  std::vector<int> depth_;
  std::vector<double> similarity_;
  std::unordered_map<std::string, SkillId> index_;
  SkillId root_ = 0;
  SkillId doctor_ = 0;
  SkillId nurse_ = 0;
  SkillId other_ = 0;
};

/// Throws UnknownSkill.
int depth_to_root(const SkillTaxonomy& tax, std::string_view skill);
/// Throws UnknownSkill.
double skill_similarity(const SkillTaxonomy& tax, std::string_view skill);

}  // namespace stealth
