#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include "goalforge/catalog.hpp"
#include "goalforge/util.hpp"
#include "gtest_helpers.hpp"
#include "support.hpp"

using namespace goalforge;

TEST(Util, TrimSplitJoin) {
  EXPECT_EQ(trim("  a b \n"), "a b");
  EXPECT_EQ(split("a,,b", ','), (std::vector<std::string>{"a", "", "b"}));
  EXPECT_EQ(join({"x", "y"}, ", "), "x, y");
  EXPECT_EQ(word_count("one  two\nthree"), 3u);
  EXPECT_EQ(tokenize_words("It's Well-Being, 2030!"), (std::vector<std::string>{"it's", "well", "being", "2030"}));
}

TEST(Util, Iso8601RoundTrip) {
  const auto t = parse_iso8601("2023-12-31T23:59:59Z");
  EXPECT_EQ(format_iso8601(t), "2023-12-31T23:59:59Z");
  EXPECT_EQ(format_iso8601(parse_iso8601("2023-01-01T02:00:00+02:00")), "2023-01-01T00:00:00Z");
  EXPECT_EQ(parse_iso8601_duration("PT1H2M3S"), std::chrono::seconds(3723));
  EXPECT_ERRC(parse_iso8601("yesterday"), Errc::ParseError);
}

TEST(Util, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Util, ParallelForCoversEveryIndexAndRethrows) {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  EXPECT_EQ(std::accumulate(hits.begin(), hits.end(), 0), 100);
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) {
                 if (i == 5) throw Error(Errc::IoError, "boom");
               }),
               Error);
}

TEST(Error, MessageCarriesCodeAndPath) {
  auto e = Error::schema_violation("qa[2]", "empty answer");
  EXPECT_EQ(e.code(), Errc::SchemaViolation);
  EXPECT_EQ(e.path(), "qa[2]");
  EXPECT_NE(std::string(e.what()).find("SchemaViolation"), std::string::npos);
  Error retry(Errc::QuotaExceeded, "slow down");
  retry.with_retry_after(std::chrono::seconds(3));
  EXPECT_TRUE(retry.retryable());
}

// ---- catalog ------------------------------------------------------------------

TEST(Catalog, ShippedCatalogShape) {
  const auto& cat = gftest::resources().catalog;
  ASSERT_EQ(cat.goals().size(), 17u);
  std::size_t targets = 0;
  for (const auto& g : cat.goals()) {
    targets += g.targets.size();
    EXPECT_FALSE(g.keywords.empty()) << g.number;
  }
  EXPECT_EQ(targets, 169u);
  EXPECT_EQ(cat.goal(1).title, "No Poverty");
  EXPECT_EQ(cat.goal_label(3), "Goal 3: Good Health and Well-being");
}

TEST(Catalog, IndicatorChangeCounts) {
  const auto counts = gftest::resources().catalog.change_counts();
  EXPECT_EQ(counts.at(16), 5);
  EXPECT_EQ(counts.at(9), 0);
  int sum = 0;
  for (const auto& [g, n] : counts) sum += n;
  EXPECT_EQ(sum, 43);
}

TEST(Catalog, SyntheticLoad) {
  std::stringstream goals, keywords;
  goals << "goal\tgoal_title\ttarget_code\ttarget_text\tindicator_code\tindicator_text\n";
  for (int g = 1; g <= 17; ++g) {
    goals << g << "\tTitle " << g << "\t" << g << ".1\tTarget\t" << g << ".1.1\tIndicator\n";
  }
  keywords << "goal\tkeyword\n1\t  Poverty \n1\tpoverty\n";
  const auto cat = Catalog::load(goals, keywords);
  EXPECT_EQ(cat.goal(1).keywords, (std::vector<std::string>{"poverty"}));
  EXPECT_TRUE(cat.goal(2).keywords.empty());
  EXPECT_FALSE(cat.has_change_counts());
  EXPECT_ERRC(cat.goal(18), Errc::InvalidArgument);
}

TEST(Catalog, MissingGoalAndBadRowsFail) {
  std::stringstream goals("goal\tgoal_title\ttarget_code\ttarget_text\tindicator_code\tindicator_text\n"
                          "1\tNo Poverty\t1.1\tt\t1.1.1\ti\n");
  std::stringstream keywords("goal\tkeyword\n");
  EXPECT_ERRC(Catalog::load(goals, keywords), Errc::MissingGoal);

  std::stringstream bad("goal\tgoal_title\ttarget_code\ttarget_text\tindicator_code\tindicator_text\n"
                        "1\tNo Poverty\t2.1\tt\t2.1.1\ti\n");
  std::stringstream kw2("goal\tkeyword\n");
  try {
    Catalog::load(bad, kw2);
    FAIL() << "expected ParseError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ParseError);
    EXPECT_NE(e.path().find(":2:"), std::string::npos) << e.path();
  }
}

TEST(Catalog, GoalOfCode) {
  EXPECT_EQ(goal_of_code("16.10.2"), 16);
  EXPECT_ERRC(goal_of_code("18.1"), Errc::ParseError);
}

TEST(Catalog, ProfileTextMentionsTargetsAndKeywords) {
  const auto& cat = gftest::resources().catalog;
  const auto text = cat.profile_text(6);
  EXPECT_NE(text.find("Goal 6:"), std::string::npos);
  EXPECT_NE(text.find("6.1"), std::string::npos);
  EXPECT_NE(text.find("Keywords:"), std::string::npos);
}
