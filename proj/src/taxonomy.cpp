#include "stealth/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <sstream>

#include "stealth/errors.hpp"

namespace stealth {
namespace {

const TaxonomyEdge kDefaultEdges[] = {
    {"root", ""},
    {"health", "root"},
    {"other", "root"},
    {"medicine", "health"},
    {"nursing", "health"},
    {"doctor", "medicine"},
    {"nurse", "nursing"},
    {"practitioner", "nursing"},
    {"caregiver", "practitioner"},
    {"police_officer", "practitioner"},
    {"firefighter", "practitioner"},
    {"life_saving", "practitioner"},
};

// Parent links every loaded taxonomy must contain.
constexpr std::pair<std::string_view, std::string_view> kRequiredLinks[] = {
    {"medicine", "health"},         {"nursing", "health"},
    {"doctor", "medicine"},         {"nurse", "nursing"},
    {"practitioner", "nursing"},    {"caregiver", "practitioner"},
    {"police_officer", "practitioner"}, {"firefighter", "practitioner"},
    {"life_saving", "practitioner"},
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string normalize_label(std::string_view label) {
  std::string out;
  out.reserve(label.size());
  for (char c : trim(label)) {
    if (c == ' ' || c == '-') {
      out.push_back('_');
    } else {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

SkillTaxonomy SkillTaxonomy::build_default() { return from_edges(kDefaultEdges); }

SkillTaxonomy SkillTaxonomy::from_edges(std::span<const TaxonomyEdge> edges) {
  SkillTaxonomy tax;
  std::vector<std::string> parent_labels;
  for (const auto& e : edges) {
    auto child = normalize_label(e.child);
    if (child.empty()) throw InvalidTaxonomy("empty skill label");
    if (tax.index_.contains(child)) throw InvalidTaxonomy("duplicate skill '" + child + "'");
    tax.index_.emplace(child, static_cast<SkillId>(tax.labels_.size()));
    tax.labels_.push_back(std::move(child));
    parent_labels.push_back(normalize_label(e.parent));
  }
  if (tax.labels_.size() > 0xFF) throw InvalidTaxonomy("more than 255 skills");

  const auto n = tax.labels_.size();
  tax.parent_.assign(n, std::nullopt);
  int roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (parent_labels[i].empty()) {
      ++roots;
      tax.root_ = static_cast<SkillId>(i);
      continue;
    }
    auto it = tax.index_.find(parent_labels[i]);
    if (it == tax.index_.end()) {
      throw InvalidTaxonomy("skill '" + tax.labels_[i] + "' has unknown parent '" +
                            parent_labels[i] + "'");
    }
    tax.parent_[i] = it->second;
  }
  if (roots != 1) throw InvalidTaxonomy("expected exactly one root, found " + std::to_string(roots));

  // Depths; a walk longer than n links means a cycle.
  tax.depth_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    int d = 0;
    auto cur = static_cast<SkillId>(i);
    while (tax.parent_[cur]) {
      cur = *tax.parent_[cur];
      if (++d > static_cast<int>(n)) {
        throw InvalidTaxonomy("cycle through skill '" + tax.labels_[i] + "'");
      }
    }
    tax.depth_[i] = d;
  }

  auto require = [&](std::string_view label) {
    auto found = tax.find(label);
    if (!found) throw InvalidTaxonomy("missing required skill '" + std::string(label) + "'");
    return *found;
  };
  const SkillId health = require("health");
  if (tax.parent_[health] != tax.root_) throw InvalidTaxonomy("'health' must hang from the root");
  for (auto [child, parent] : kRequiredLinks) {
    if (tax.parent_[require(child)] != require(parent)) {
      throw InvalidTaxonomy("'" + std::string(child) + "' must be a child of '" +
                            std::string(parent) + "'");
    }
  }
  tax.other_ = require("other");
  if (tax.is_descendant_or_self(tax.other_, health)) {
    throw InvalidTaxonomy("'other' must lie outside the health subtree");
  }
  tax.doctor_ = require("doctor");
  tax.nurse_ = require("nurse");

  tax.similarity_.assign(n, 0.0);
  const double n1 = tax.depth_[tax.doctor_];
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = static_cast<SkillId>(i);
    if (s == tax.other_) continue;
    const double n2 = tax.depth_[s];
    const double n3 = tax.depth_[tax.deepest_common_ancestor(s, tax.doctor_)];
    tax.similarity_[i] = (n1 + n2) > 0 ? 2.0 * n3 / (n1 + n2) : 0.0;
  }
  return tax;
}

SkillTaxonomy SkillTaxonomy::parse(std::istream& in) {
  std::vector<TaxonomyEdge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto tab = view.find('\t');
    if (tab == std::string_view::npos) throw ParseError(lineno, "expected child<TAB>parent");
    auto child = trim(view.substr(0, tab));
    auto parent = trim(view.substr(tab + 1));
    if (child.empty() || parent.empty()) throw ParseError(lineno, "empty field");
    edges.push_back({std::string(child), parent == "-" ? std::string() : std::string(parent)});
  }
  return from_edges(edges);
}

SkillTaxonomy SkillTaxonomy::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open taxonomy file " + path.string());
  return parse(in);
}

std::string SkillTaxonomy::to_config() const {
  std::vector<SkillId> order(labels_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<SkillId>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](SkillId a, SkillId b) { return depth_[a] < depth_[b]; });
  std::ostringstream out;
  for (SkillId s : order) {
    out << labels_[s] << '\t' << (parent_[s] ? labels_[*parent_[s]] : std::string("-")) << '\n';
  }
  return out.str();
}

std::optional<SkillId> SkillTaxonomy::find(std::string_view label) const {
  auto it = index_.find(normalize_label(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SkillId SkillTaxonomy::id(std::string_view label) const {
  if (auto s = find(label)) return *s;
  throw UnknownSkill("unknown skill '" + std::string(label) + "'");
}

std::optional<SkillId> SkillTaxonomy::parent(SkillId s) const { return parent_.at(s); }

SkillId SkillTaxonomy::deepest_common_ancestor(SkillId a, SkillId b) const {
  while (depth_.at(a) > depth_.at(b)) a = *parent_[a];
  while (depth_[b] > depth_[a]) b = *parent_[b];
  while (a != b) {
    a = *parent_[a];
    b = *parent_[b];
  }
  return a;
}

bool SkillTaxonomy::is_descendant_or_self(SkillId s, SkillId ancestor) const {
  std::optional<SkillId> cur = s;
  while (cur) {
    if (*cur == ancestor) return true;
    cur = parent_.at(*cur);
  }
  return false;
}

int depth_to_root(const SkillTaxonomy& tax, std::string_view skill) {
  return tax.depth(tax.id(skill));
}

double skill_similarity(const SkillTaxonomy& tax, std::string_view skill) {
  return tax.similarity(tax.id(skill));
}

}  // namespace stealth
