#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "goalforge/corpus.hpp"
#include "goalforge/llm.hpp"
#include "goalforge/mock.hpp"
#include "goalforge/pipeline.hpp"
#include "goalforge/resources.hpp"

namespace gftest {

std::filesystem::path source_dir();
std::filesystem::path fixtures_dir();  // <source>/fixtures

// Shared, loaded once.
const goalforge::Resources& resources();
const goalforge::MockLibrary& mock_library();

// Unique directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::shared_ptr<goalforge::MockProvider> mock_provider();
// Gateway over the mock provider with a no-op sleeper.
std::unique_ptr<goalforge::Gateway> mock_gateway(std::uint64_t seed = 7);

// Synthetic talk corpus for the mock provider. Talk i leads with goal
// (i % 17) + 1 and mentions up to two more goals, so every goal is covered
// once talks >= 17.
struct CorpusSpec {
  std::string prefix = "talk";
  goalforge::CorpusWindow window = goalforge::CorpusWindow::preliminary();
  std::size_t talks = 24;
  std::uint64_t seed = 1;
  std::size_t invalid_annotations = 0;       // always-invalid marker talks, counted in `talks`
  std::size_t invalid_once = 0;              // recover after one corrective prompt
  std::size_t kg_dangling = 0;               // carry the dangling-link marker
  bool edge_cases = true;  // adds out-of-window, short, member-only, non-English and caption-less talks
};

std::vector<goalforge::TalkRecord> generate_corpus(const CorpusSpec& spec);
void write_corpus(const std::filesystem::path& dir, const std::vector<goalforge::TalkRecord>& records);

// The corpus the integration tests and the CLI demo use.
CorpusSpec mini_corpus_spec();

}  // namespace gftest

namespace gftest {

// Runs every stage with the mock provider over `corpus_dir`, keeping the
// store, work files and bundle under `root`.
struct MockRun {
  goalforge::RunReport report;
  goalforge::PipelineConfig config;
};
MockRun run_mock_pipeline(const std::filesystem::path& corpus_dir, const std::filesystem::path& root,
                          std::uint64_t seed, const std::string& dataset = "preliminary");

// Relative path -> contents of every regular file under `dir`.
std::map<std::string, std::string> read_tree(const std::filesystem::path& dir);

}  // namespace gftest
