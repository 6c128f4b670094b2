#pragma once

// Independent reference computations the library is checked against. They
// are written for clarity, not speed, and share no code with goalforge.

#include <array>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "goalforge/documents.hpp"

namespace gftest {

// ---- co-occurrence ----------------------------------------------------------

using CountMatrix = std::array<std::array<std::size_t, 17>, 17>;

// 1..max_talks talks, each with 1..5 distinct tags in 1..17.
std::vector<std::set<int>> random_tag_db(std::mt19937_64& rng, std::size_t max_talks);
// cell(i,j) = number of talks whose tag set contains both i and j.
CountMatrix naive_cooccurrence(const std::vector<std::set<int>>& tag_sets);

// ---- knowledge-graph repair -------------------------------------------------

// A graph with some mix of padded ids, blank ids, duplicates, dangling links,
// gapped or repeated orders. Always has at least one non-blank id.
goalforge::KgDoc random_corrupted_kg(std::mt19937_64& rng);
// Empty when repair(doc) satisfies every post-condition, else one line per
// violated property.
std::vector<std::string> repair_property_failures(const goalforge::KgDoc& input);

// ---- statistics -------------------------------------------------------------

struct RefLevene {
  double w, p;
};
struct RefWelch {
  double t, df, p;
};
// Brown-Forsythe style deviations from the group mean, then a one-way ANOVA F
// with the Fisher-F survival function from Boost.Math.
RefLevene reference_levene(const std::vector<std::vector<double>>& groups);
// Welch-Satterthwaite with Boost.Math's Student-t.
RefWelch reference_welch(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace gftest
