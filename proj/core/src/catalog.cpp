#include "goalforge/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>

#include "goalforge/error.hpp"
#include "goalforge/util.hpp"

namespace goalforge {

namespace {

struct Row {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

Error parse_error(std::string_view source, std::size_t line, std::string_view field, const std::string& what) {
  Error e(Errc::ParseError, std::string(source) + " line " + std::to_string(line) + ", field '" +
                                std::string(field) + "': " + what);
  e.with_path(std::string(source) + ":" + std::to_string(line) + ":" + std::string(field));
  return e;
}

// Reads a tab-separated document: '#' lines are comments, the first other
// line must be the expected header.
std::vector<Row> read_table(std::istream& in, std::string_view source, const std::vector<std::string>& header,
                            bool allow_empty) {
  std::vector<Row> rows;
  std::string line;
  std::size_t number = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto fields = split(line, '\t');
    if (!seen_header) {
      if (fields != header) {
        throw parse_error(source, number, "header", "expected '" + join(header, "\\t") + "'");
      }
      seen_header = true;
      continue;
    }
    if (fields.size() != header.size()) {
      throw parse_error(source, number, "row",
                        "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    }
    rows.push_back({number, std::move(fields)});
  }
  if (!seen_header && !allow_empty) throw parse_error(source, number, "header", "document is empty");
  return rows;
}

int parse_goal_field(const Row& row, std::size_t index, std::string_view source, std::string_view field) {
  const std::string& text = row.fields[index];
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw parse_error(source, row.line, field, "not an integer: '" + text + "'");
  }
  if (value < 1 || value > kGoalCount) {
    throw parse_error(source, row.line, field, "goal out of range 1..17: " + text);
  }
  return value;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  return in;
}

}  // namespace

int goal_of_code(std::string_view code) {
  const auto dot = code.find('.');
  if (dot == std::string_view::npos || dot == 0) {
    throw Error(Errc::ParseError, "code '" + std::string(code) + "' has no goal prefix");
  }
  int goal = 0;
  auto [ptr, ec] = std::from_chars(code.data(), code.data() + dot, goal);
  if (ec != std::errc{} || ptr != code.data() + dot || goal < 1 || goal > kGoalCount) {
    throw Error(Errc::ParseError, "code '" + std::string(code) + "' has no valid goal prefix");
  }
  return goal;
}

std::vector<std::string> normalize_keywords(const std::vector<std::string>& keywords) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& k : keywords) {
    auto normalized = to_lower(trim(k));
    if (normalized.empty()) continue;
    if (seen.insert(normalized).second) out.push_back(std::move(normalized));
  }
  return out;
}

Catalog Catalog::load(std::istream& goals_in, std::istream& keywords_in, std::istream* changes_in) {
  static const std::vector<std::string> kGoalHeader = {"goal",           "goal_title",    "target_code",
                                                       "target_text",    "indicator_code", "indicator_text"};
  static const std::vector<std::string> kKeywordHeader = {"goal", "keyword"};
  static const std::vector<std::string> kChangeHeader = {"goal", "changes"};

  Catalog catalog;
  catalog.goals_.resize(kGoalCount);
  std::vector<bool> present(kGoalCount + 1, false);

  for (const auto& row : read_table(goals_in, "goals", kGoalHeader, false)) {
    const int number = parse_goal_field(row, 0, "goals", "goal");
    SdgGoal& goal = catalog.goals_[number - 1];
    const std::string title = trim(row.fields[1]);
    if (title.empty()) throw parse_error("goals", row.line, "goal_title", "empty title");
    if (!present[number]) {
      present[number] = true;
      goal.number = number;
      goal.title = title;
    } else if (goal.title != title) {
      throw parse_error("goals", row.line, "goal_title", "conflicts with earlier title '" + goal.title + "'");
    }

    const std::string target_code = trim(row.fields[2]);
    if (target_code.rfind(std::to_string(number) + ".", 0) != 0) {
      throw parse_error("goals", row.line, "target_code",
                        "'" + target_code + "' does not start with '" + std::to_string(number) + ".'");
    }
    auto target = std::find_if(goal.targets.begin(), goal.targets.end(),
                               [&](const SdgTarget& t) { return t.code == target_code; });
    if (target == goal.targets.end()) {
      goal.targets.push_back({target_code, trim(row.fields[3]), {}});
      target = std::prev(goal.targets.end());
    }

    const std::string indicator_code = trim(row.fields[4]);
    if (indicator_code.empty()) continue;
    if (indicator_code.rfind(target_code + ".", 0) != 0) {
      throw parse_error("goals", row.line, "indicator_code",
                        "'" + indicator_code + "' does not start with '" + target_code + ".'");
    }
    target->indicators.push_back({indicator_code, trim(row.fields[5])});
  }
  for (int n = 1; n <= kGoalCount; ++n) {
    if (!present[n]) {
      Error e(Errc::MissingGoal, "goal " + std::to_string(n) + " is absent from the goal source");
      e.with_path(std::to_string(n));
      throw e;
    }
  }

  std::vector<std::vector<std::string>> raw_keywords(kGoalCount);
  for (const auto& row : read_table(keywords_in, "keywords", kKeywordHeader, true)) {
    const int number = parse_goal_field(row, 0, "keywords", "goal");
    raw_keywords[number - 1].push_back(row.fields[1]);
  }
  for (int n = 1; n <= kGoalCount; ++n) {
    catalog.goals_[n - 1].keywords = normalize_keywords(raw_keywords[n - 1]);
  }

  if (changes_in != nullptr) {
    std::vector<bool> counted(kGoalCount + 1, false);
    for (const auto& row : read_table(*changes_in, "changes", kChangeHeader, false)) {
      const int number = parse_goal_field(row, 0, "changes", "goal");
      const std::string& text = row.fields[1];
      int value = -1;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc{} || ptr != text.data() + text.size() || value < 0) {
        throw parse_error("changes", row.line, "changes", "not a non-negative integer: '" + text + "'");
      }
      catalog.goals_[number - 1].indicator_change_count = value;
      counted[number] = true;
    }
    for (int n = 1; n <= kGoalCount; ++n) {
      if (!counted[n]) throw Error(Errc::MissingGoal, "goal " + std::to_string(n) + " is absent from the change table");
    }
    catalog.has_changes_ = true;
  }
  return catalog;
}

Catalog Catalog::load_files(const std::filesystem::path& goals, const std::filesystem::path& keywords,
                            const std::optional<std::filesystem::path>& changes) {
  auto goals_in = open_or_throw(goals);
  auto keywords_in = open_or_throw(keywords);
  if (changes) {
    auto changes_in = open_or_throw(*changes);
    return load(goals_in, keywords_in, &changes_in);
  }
  return load(goals_in, keywords_in, nullptr);
}

Catalog Catalog::load_directory(const std::filesystem::path& dir) {
  return load_files(dir / "sdg_indicators.tsv", dir / "sdg_keywords.tsv", dir / "indicator_changes.tsv");
}

const SdgGoal& Catalog::goal(int number) const {
  if (!contains(number)) throw Error(Errc::InvalidArgument, "goal " + std::to_string(number) + " out of range");
  return goals_[number - 1];
}

std::map<int, int> Catalog::change_counts() const {
  std::map<int, int> counts;
  for (const auto& g : goals_) counts[g.number] = g.indicator_change_count;
  return counts;
}

std::string Catalog::goal_label(int number) const {
  return "Goal " + std::to_string(number) + ": " + goal(number).title;
}

std::string Catalog::profile_text(int number) const {
  const SdgGoal& g = goal(number);
  std::string text = goal_label(number) + "\n";
  for (const auto& t : g.targets) text += t.code + " " + t.description + "\n";
  if (!g.keywords.empty()) text += "Keywords: " + join(g.keywords, ", ") + "\n";
  return text;
}

}  // namespace goalforge
