#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "goalforge/analytics.hpp"
#include "goalforge/corpus.hpp"
#include "goalforge/error.hpp"
#include "goalforge/llm.hpp"
#include "goalforge/resources.hpp"
#include "goalforge/store.hpp"

namespace goalforge {

enum class Stage { Ingest, Annotate, Index, Simulate, Extract, Synthesize, Analyze, Export };
std::string_view to_string(Stage stage) noexcept;
std::optional<Stage> stage_from_string(std::string_view name) noexcept;
std::vector<Stage> all_stages();

struct PipelineConfig {
  std::string dataset = "preliminary";
  std::optional<CorpusWindow> window;  // defaults to the dataset's named window
  std::filesystem::path store_path = "goalforge.db";
  std::filesystem::path work_dir = "goalforge-work";  // index files and analysis outputs
  std::filesystem::path out_dir = "site";             // export target
  std::filesystem::path fixtures;                     // corpus fixture dir; empty = live video source
  std::filesystem::path record_fixtures;              // mirror live fetches here when set
  YouTubeConfig youtube;                              // live source settings
  std::string provider = "mock";                      // mock | gemini | replay | record
  std::filesystem::path cassette;                     // replay / record
  ProviderConfig provider_config;
  IngestOptions ingest;
  unsigned workers = 4;
  std::size_t participant_cap = 25;
  int palette_size = 8;
  std::vector<int> goals;  // simulate only these goals; empty = all 17
  DiagonalMode diagonal = DiagonalMode::Any;
  std::string timestamp;  // recorded in run metadata; empty = current time
};

// Builds the provider named in the config.
std::shared_ptr<Provider> make_provider(const PipelineConfig& config, const Resources& resources);

struct StageReport {
  Stage stage = Stage::Ingest;
  bool ok = true;
  std::map<std::string, std::size_t> counts;
  std::vector<std::string> skips;   // "<id>: <reason>"
  std::vector<std::string> errors;  // non-fatal per-item failures and the fatal one, if any
  std::optional<Errc> error_code;   // set when the stage itself failed
  std::chrono::milliseconds duration{0};
};

struct RunReport {
  std::string dataset;
  std::vector<StageReport> stages;
  bool ok() const;
  std::string to_json() const;
};

std::filesystem::path index_path(const PipelineConfig& config);
std::filesystem::path analysis_dir(const PipelineConfig& config);

// Runs one stage. Throws StagePrerequisiteMissing when its inputs are absent
// and any fatal stage error; per-item failures land in the report.
StageReport run_stage(Stage stage, const PipelineConfig& config, Store& store, Gateway& gateway,
                      const Resources& resources);

// Runs `stages` in dependency order. A stage that throws is recorded and ends
// the run; later stages are not attempted.
RunReport run_pipeline(const std::vector<Stage>& stages, const PipelineConfig& config, Store& store,
                       Gateway& gateway, const Resources& resources);

// Convenience: opens the store, builds the gateway and runs.
RunReport run_pipeline(const std::vector<Stage>& stages, const PipelineConfig& config);

}  // namespace goalforge
