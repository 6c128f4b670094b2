#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace goalforge {

inline constexpr int kGoalCount = 17;

struct SdgIndicator {
  std::string code;  // "1.1.1"
  std::string description;

  bool operator==(const SdgIndicator&) const = default;
};

struct SdgTarget {
  std::string code;  // "1.1", "1.a"
  std::string description;
  std::vector<SdgIndicator> indicators;

  bool operator==(const SdgTarget&) const = default;
};

struct SdgGoal {
  int number = 0;
  std::string title;
  std::vector<SdgTarget> targets;
  std::vector<std::string> keywords;
  int indicator_change_count = 0;

  bool operator==(const SdgGoal&) const = default;
};

// Goal number encoded in a target or indicator code ("16.10.2" -> 16).
// Throws ParseError when the code does not start with "<1..17>.".
int goal_of_code(std::string_view code);

// Lowercase, trim and de-duplicate keywords, preserving first-seen order.
std::vector<std::string> normalize_keywords(const std::vector<std::string>& keywords);

// The 17-goal catalog. Immutable once loaded.
class Catalog {
 public:
  // goals: one row per indicator (goal, goal_title, target_code, target_text,
  //        indicator_code, indicator_text), tab separated, with a header row.
  // keywords: (goal, keyword) rows.
  // changes: optional (goal, changes) reference table.
  static Catalog load(std::istream& goals, std::istream& keywords, std::istream* changes = nullptr);
  static Catalog load_files(const std::filesystem::path& goals, const std::filesystem::path& keywords,
                            const std::optional<std::filesystem::path>& changes = std::nullopt);
  // Loads data/catalog/{sdg_indicators,sdg_keywords,indicator_changes}.tsv.
  static Catalog load_directory(const std::filesystem::path& dir);

  std::span<const SdgGoal> goals() const noexcept { return goals_; }
  const SdgGoal& goal(int number) const;
  bool contains(int number) const noexcept { return number >= 1 && number <= kGoalCount; }

  bool has_change_counts() const noexcept { return has_changes_; }
  std::map<int, int> change_counts() const;

  // "Goal N: Title"
  std::string goal_label(int number) const;
  // Goal title, target texts and keywords; what the retrieval profile embeds.
  std::string profile_text(int number) const;

 private:
  std::vector<SdgGoal> goals_;
  bool has_changes_ = false;
};

}  // namespace goalforge
