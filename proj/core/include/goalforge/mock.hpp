#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "goalforge/llm.hpp"
#include "goalforge/prompt.hpp"

namespace goalforge {

// Phrase library the mock provider assembles replies from (data/mock/library.json).
struct MockLibrary {
  std::map<int, std::vector<std::string>> lexicon;   // goal -> lower-case terms
  std::map<int, std::vector<std::string>> concepts;  // goal -> node labels
  std::vector<std::string> relations;
  std::vector<std::string> facilitator_questions;
  std::vector<std::string> openings;
  std::vector<std::string> elaborations;
  std::vector<std::string> core_values;
  std::vector<std::string> questions;
  std::vector<std::string> answers;
  std::vector<std::string> goal_titles;
  std::vector<std::string> indicators;

  static MockLibrary load(const std::filesystem::path& path);

  // Occurrences of each goal's lexicon terms in `text` (whole-word, case-folded).
  std::map<int, int> goal_hits(std::string_view text) const;
};

// Deterministic offline provider. It recognises which template produced a
// prompt, recovers the slot values and assembles a well-formed reply from the
// library, so the output is a pure function of (seed, model id, prompt).
//
// Fault markers embedded in talk text steer it for tests:
//   [[mock:safety-block]]          generate() throws SafetyBlocked
//   [[mock:annotation-invalid]]    annotation replies carry 4 Q&A pairs
//   [[mock:annotation-invalid-once]]  only the first reply is invalid
//   [[mock:unparseable]]           annotation replies contain no JSON
//   [[mock:kg-dangling-link]]      carried into transcripts; KG replies keep a dangling link
//   [[mock:kg-unparseable]]        carried into transcripts; KG replies contain no JSON
class MockProvider : public Provider {
 public:
  MockProvider(PromptLibrary prompts, MockLibrary library, std::size_t dimension = 256);

  std::string id() const override { return "mock"; }
  std::string generate(const std::string& prompt, const ProviderConfig& config) override;
  std::vector<Embedding> embed(const std::vector<std::string>& texts, const ProviderConfig& config) override;

 private:
  PromptLibrary prompts_;
  MockLibrary library_;
  std::size_t dimension_;
};

}  // namespace goalforge
