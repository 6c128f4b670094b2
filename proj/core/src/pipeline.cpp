#include "goalforge/pipeline.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <set>

#include "goalforge/analytics.hpp"
#include "goalforge/annotate.hpp"
#include "goalforge/export.hpp"
#include "goalforge/kg.hpp"
#include "goalforge/mock.hpp"
#include "goalforge/providers.hpp"
#include "goalforge/retrieval.hpp"
#include "goalforge/roundtable.hpp"
#include "goalforge/synthesis.hpp"
#include "goalforge/util.hpp"

namespace goalforge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::pair<Stage, std::string_view> kStageNames[] = {
    {Stage::Ingest, "ingest"},     {Stage::Annotate, "annotate"},     {Stage::Index, "index"},
    {Stage::Simulate, "simulate"}, {Stage::Extract, "extract"},       {Stage::Synthesize, "synthesize"},
    {Stage::Analyze, "analyze"},   {Stage::Export, "export"},
};

[[noreturn]] void missing(Stage stage, const std::string& what) {
  throw Error(Errc::StagePrerequisiteMissing, std::string(to_string(stage)) + " needs " + what)
      .with_path(std::string(to_string(stage)));
}

std::string run_timestamp(const PipelineConfig& config) {
  if (!config.timestamp.empty()) return config.timestamp;
  return format_iso8601(std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

CorpusWindow window_for(const PipelineConfig& config) {
  if (config.window) return *config.window;
  if (auto w = CorpusWindow::named(config.dataset)) return *w;
  throw Error(Errc::InvalidArgument, "dataset " + config.dataset + " has no built-in window; pass one explicitly");
}

std::vector<const KnowledgeGraph*> by_goal(const std::vector<KnowledgeGraph>& graphs) {
  std::vector<const KnowledgeGraph*> out;
  for (const auto& g : graphs) out.push_back(&g);
  std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->goal < b->goal; });
  return out;
}

void stage_ingest(const PipelineConfig& config, Store& store, StageReport& report) {
  std::shared_ptr<TalkSource> source;
  if (!config.fixtures.empty()) {
    if (!fs::is_directory(config.fixtures)) missing(Stage::Ingest, "a corpus fixture directory at " + config.fixtures.string());
    source = std::make_shared<FixtureSource>(config.fixtures);
  } else {
    source = std::make_shared<YouTubeSource>(config.youtube);
    if (!config.record_fixtures.empty()) source = std::make_shared<RecordingSource>(source, config.record_fixtures);
  }
  IngestOptions options = config.ingest;
  options.workers = config.workers;
  const auto records = ingest(*source, window_for(config), options);
  store.clear_from(config.dataset, Store::Stage::Talks);
  store.put_talks(config.dataset, records);
  const auto summary = summarize(records);
  report.counts["collected"] = summary.collected;
  report.counts["usable"] = summary.usable;
  for (const auto& [reason, n] : summary.skipped_by_reason) report.counts["skipped_" + std::string(to_string(reason))] = n;
}

void stage_annotate(const PipelineConfig& config, Store& store, Gateway& gateway, const Resources& res,
                    StageReport& report) {
  // Talks that already have an annotation are kept; only new or previously failed talks are sent.
  std::set<std::string> done;
  for (const auto& a : store.talk_annotations(config.dataset)) done.insert(a.video_id);
  std::vector<TalkRecord> candidates;
  bool any_transcript = false;
  for (auto& t : store.talks(config.dataset)) {
    if (!t.transcript || t.transcript->empty()) continue;
    any_transcript = true;
    const bool retry = t.skip_reason == SkipReason::AnnotationFailed || t.skip_reason == SkipReason::SafetyBlocked;
    if ((t.usable || retry) && !done.contains(t.video_id)) {
      t.usable = true;
      candidates.push_back(std::move(t));
    }
  }
  if (!any_transcript) missing(Stage::Annotate, "ingested talks with transcripts");
  const std::string ts = run_timestamp(config);
  std::vector<std::optional<AnnotationOutcome>> outcomes(candidates.size());
  std::vector<std::string> errors(candidates.size());
  parallel_for(candidates.size(), config.workers, [&](std::size_t i) {
    try {
      outcomes[i] = annotate_talk(candidates[i], gateway, res.prompts, res.catalog, ts);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  if (!candidates.empty()) store.clear_from(config.dataset, Store::Stage::Transcripts);
  std::size_t annotated = 0, prompts = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& id = candidates[i].video_id;
    if (!outcomes[i]) {
      report.errors.push_back(id + ": " + errors[i]);
      store.mark_skipped(config.dataset, id, SkipReason::AnnotationFailed);
      continue;
    }
    prompts += static_cast<std::size_t>(outcomes[i]->prompts_issued);
    if (outcomes[i]->annotation) {
      store.put_annotation(config.dataset, *outcomes[i]->annotation, Origin::Generated, outcomes[i]->metadata);
      ++annotated;
    } else {
      const auto reason = outcomes[i]->skip.value_or(SkipReason::AnnotationFailed);
      report.skips.push_back(id + ": " + std::string(to_string(reason)) + " (" + outcomes[i]->error + ")");
      store.mark_skipped(config.dataset, id, reason);
    }
  }
  report.counts["candidates"] = candidates.size();
  report.counts["annotated"] = annotated;
  report.counts["skipped"] = report.skips.size();
  report.counts["prompts"] = prompts;
}

void stage_index(const PipelineConfig& config, Store& store, Gateway& gateway, StageReport& report) {
  const auto annotations = store.talk_annotations(config.dataset);
  if (annotations.empty()) missing(Stage::Index, "annotations");
  auto built = build_index(annotations, gateway);
  for (const auto& [id, why] : built.skipped) report.skips.push_back(id + ": " + why);
  fs::create_directories(index_path(config).parent_path());
  built.index.save(index_path(config));
  report.counts["indexed"] = built.index.size();
  report.counts["dimension"] = built.index.dimension();
}

void stage_simulate(const PipelineConfig& config, Store& store, Gateway& gateway, const Resources& res,
                    StageReport& report) {
  const auto annotations = store.talk_annotations(config.dataset);
  if (annotations.empty()) missing(Stage::Simulate, "annotations");
  if (!fs::exists(index_path(config))) missing(Stage::Simulate, "an embedding index (run index first)");
  const auto index = EmbeddingIndex::load(index_path(config));
  SimulationInputs inputs{index, annotations, config.participant_cap, config.workers, config.goals};
  const auto batch = simulate_all(inputs, config.dataset, res.catalog, gateway, res.prompts, run_timestamp(config));
  // A partial rerun keeps the other goals' transcripts but invalidates every graph.
  store.clear_from(config.dataset, config.goals.empty() ? Store::Stage::Transcripts : Store::Stage::Graphs);
  std::size_t words = 0;
  for (const auto& t : batch.transcripts) {
    store.put_transcript(t);
    words += t.word_count;
  }
  for (const auto& f : batch.failures) {
    store.put_transcript_failure(config.dataset, f.goal, f.message);
    report.errors.push_back("goal " + std::to_string(f.goal) + ": " + f.message);
  }
  report.counts["transcripts"] = batch.transcripts.size();
  report.counts["failed"] = batch.failures.size();
  report.counts["words"] = words;
}

void stage_extract(const PipelineConfig& config, Store& store, Gateway& gateway, const Resources& res,
                   StageReport& report) {
  std::vector<RoundtableTranscript> transcripts;
  for (auto& s : store.transcripts(config.dataset)) {
    if (s.status == TranscriptStatus::Ok) transcripts.push_back(std::move(s.transcript));
  }
  if (transcripts.empty()) missing(Stage::Extract, "roundtable transcripts");
  const std::string ts = run_timestamp(config);
  std::vector<std::optional<ExtractionOutcome>> outcomes(transcripts.size());
  std::vector<std::string> errors(transcripts.size());
  parallel_for(transcripts.size(), config.workers, [&](std::size_t i) {
    try {
      outcomes[i] = extract_graph(transcripts[i], gateway, res.prompts, res.ontology_guide, ts);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  store.clear_from(config.dataset, Store::Stage::Graphs);
  std::size_t nodes = 0, links = 0, repairs = 0;
  for (std::size_t i = 0; i < transcripts.size(); ++i) {
    if (!outcomes[i]) {
      report.errors.push_back("goal " + std::to_string(transcripts[i].goal) + ": " + errors[i]);
      continue;
    }
    const auto& g = outcomes[i]->graph;
    store.put_graph(g);
    nodes += g.nodes.size();
    links += g.links.size();
    repairs += g.repairs.actions.size();
  }
  report.counts["graphs"] = transcripts.size() - report.errors.size();
  report.counts["failed"] = report.errors.size();
  report.counts["nodes"] = nodes;
  report.counts["links"] = links;
  report.counts["repairs"] = repairs;
}

void stage_synthesize(const PipelineConfig& config, Store& store, Gateway& gateway, const Resources& res,
                      StageReport& report) {
  const auto graphs = store.graphs(config.dataset);
  if (graphs.size() != static_cast<std::size_t>(kGoalCount)) missing(Stage::Synthesize, "graphs for all 17 goals");
  const auto outcome = synthesize(graphs, res.catalog, gateway, res.prompts, run_timestamp(config));
  store.put_proposals(config.dataset, outcome.proposals, outcome.metadata);
  report.counts["proposals"] = outcome.proposals.size();
  report.counts["relationships"] = outcome.document.relationships.size();
  report.counts["prompts"] = static_cast<std::size_t>(outcome.prompts_issued);
}

void stage_analyze(const PipelineConfig& config, Store& store, StageReport& report) {
  const auto graphs = store.graphs(config.dataset);
  if (graphs.size() != static_cast<std::size_t>(kGoalCount)) missing(Stage::Analyze, "graphs for all 17 goals");
  const fs::path dir = analysis_dir(config);
  fs::create_directories(dir);

  std::vector<KgMetrics> metrics;
  for (const auto* g : by_goal(graphs)) metrics.push_back(kg_metrics(*g, config.palette_size));
  write_file(dir / "metrics.tsv", metrics_tsv(metrics));
  write_file(dir / "metrics.json", metrics_document(config.dataset, metrics));
  const auto totals = graph_totals(graphs);
  report.counts["total_nodes"] = totals.total_nodes;
  report.counts["total_links"] = totals.total_links;

  std::vector<std::set<int>> tags;
  for (const auto& a : store.talk_annotations(config.dataset)) tags.push_back(a.sdg_types);
  if (!tags.empty()) {
    const auto matrix = cooccurrence(tags, config.dataset, config.diagonal);
    write_file(dir / "cooccurrence.tsv", matrix_tsv(matrix));
    write_file(dir / "cooccurrence.json", cooccurrence_document(matrix));
    write_file(dir / "heatmap.svg", heatmap_svg(matrix));
    write_file(dir / "attribute-network.json", attribute_network_document(config.dataset, attribute_network(matrix)));
    std::string zeros = "goal_a\tgoal_b\tcount_a\tcount_b\n";
    for (const auto& z : zero_pair_report(matrix)) {
      zeros += std::to_string(z.a) + "\t" + std::to_string(z.b) + "\t" + std::to_string(z.count_a) + "\t" +
               std::to_string(z.count_b) + "\n";
    }
    write_file(dir / "zero-pairs.tsv", zeros);
    report.counts["tagged_talks"] = tags.size();
  }

  // Compare against the other built-in dataset when it is complete too.
  const std::string other = config.dataset == "formal" ? "preliminary" : "formal";
  if (other != config.dataset && store.has_dataset(other)) {
    const auto other_graphs = store.graphs(other);
    if (other_graphs.size() == static_cast<std::size_t>(kGoalCount)) {
      const auto& prelim = config.dataset == "preliminary" ? graphs : other_graphs;
      const auto& formal = config.dataset == "preliminary" ? other_graphs : graphs;
      write_file(dir / "comparison.json",
                 comparison_document({compare_datasets(prelim, formal, CompareMetric::Nodes),
                                      compare_datasets(prelim, formal, CompareMetric::Links)}));
      report.counts["comparisons"] = 2;
    }
  }
}

void stage_export(const PipelineConfig& config, Store& store, const Resources& res, StageReport& report) {
  BundleInputs in;
  in.dataset = config.dataset;
  in.seed = config.provider_config.seed;
  in.provider = config.provider;
  in.graphs = store.graphs(config.dataset);
  if (in.graphs.size() != static_cast<std::size_t>(kGoalCount)) missing(Stage::Export, "graphs for all 17 goals");
  in.proposals = store.proposals(config.dataset);
  for (const auto& a : store.talk_annotations(config.dataset)) in.tag_sets.push_back(a.sdg_types);
  in.palette_size = config.palette_size;
  const auto files = build_bundle(in, res.catalog);
  write_bundle(config.out_dir, files);
  report.counts["files"] = files.size();
}

}  // namespace

std::string_view to_string(Stage stage) noexcept {
  for (const auto& [s, name] : kStageNames) {
    if (s == stage) return name;
  }
  return "?";
}

std::optional<Stage> stage_from_string(std::string_view name) noexcept {
  if (name == "export-site") return Stage::Export;
  for (const auto& [s, n] : kStageNames) {
    if (n == name) return s;
  }
  return std::nullopt;
}

std::vector<Stage> all_stages() {
  std::vector<Stage> out;
  for (const auto& [s, name] : kStageNames) out.push_back(s);
  return out;
}

std::shared_ptr<Provider> make_provider(const PipelineConfig& config, const Resources& resources) {
  if (config.provider == "mock") {
    return std::make_shared<MockProvider>(resources.prompts, MockLibrary::load(resources.mock_library()));
  }
  if (config.provider == "gemini" || config.provider == "live") return std::make_shared<GeminiProvider>();
  if (config.provider == "replay" || config.provider == "record") {
    if (config.cassette.empty()) throw Error(Errc::InvalidArgument, config.provider + " provider needs a cassette path");
    if (config.provider == "replay") return std::make_shared<ReplayProvider>(Cassette::load(config.cassette));
    return std::make_shared<RecordingProvider>(std::make_shared<GeminiProvider>(), config.cassette);
  }
  throw Error(Errc::InvalidArgument, "unknown provider \"" + config.provider + "\" (mock, gemini, replay, record)");
}

bool RunReport::ok() const {
  return std::all_of(stages.begin(), stages.end(), [](const StageReport& s) { return s.ok; });
}

std::string RunReport::to_json() const {
  json list = json::array();
  for (const auto& s : stages) {
    list.push_back({{"stage", goalforge::to_string(s.stage)},
                    {"ok", s.ok},
                    {"counts", s.counts},
                    {"skips", s.skips},
                    {"errors", s.errors},
                    {"error_code", s.error_code ? json(goalforge::to_string(*s.error_code)) : json(nullptr)},
                    {"duration_ms", s.duration.count()}});
  }
  return dump_json({{"dataset", dataset}, {"ok", ok()}, {"stages", list}});
}

fs::path index_path(const PipelineConfig& config) { return config.work_dir / ("index-" + config.dataset + ".bin"); }

fs::path analysis_dir(const PipelineConfig& config) { return config.work_dir / ("analysis-" + config.dataset); }

StageReport run_stage(Stage stage, const PipelineConfig& config, Store& store, Gateway& gateway,
                      const Resources& resources) {
  StageReport report;
  report.stage = stage;
  const auto start = std::chrono::steady_clock::now();
  store.ensure_dataset(config.dataset);
  switch (stage) {
    case Stage::Ingest: stage_ingest(config, store, report); break;
    case Stage::Annotate: stage_annotate(config, store, gateway, resources, report); break;
    case Stage::Index: stage_index(config, store, gateway, report); break;
    case Stage::Simulate: stage_simulate(config, store, gateway, resources, report); break;
    case Stage::Extract: stage_extract(config, store, gateway, resources, report); break;
    case Stage::Synthesize: stage_synthesize(config, store, gateway, resources, report); break;
    case Stage::Analyze: stage_analyze(config, store, report); break;
    case Stage::Export: stage_export(config, store, resources, report); break;
  }
  report.ok = report.errors.empty();
  report.duration = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  spdlog::info("{}: {} in {} ms", to_string(stage), report.ok ? "ok" : "completed with errors", report.duration.count());
  return report;
}

RunReport run_pipeline(const std::vector<Stage>& stages, const PipelineConfig& config, Store& store,
                       Gateway& gateway, const Resources& resources) {
  std::vector<Stage> ordered = stages;
  std::sort(ordered.begin(), ordered.end());
  ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());
  RunReport run;
  run.dataset = config.dataset;
  for (Stage stage : ordered) {
    try {
      run.stages.push_back(run_stage(stage, config, store, gateway, resources));
    } catch (const Error& e) {
      StageReport failed;
      failed.stage = stage;
      failed.ok = false;
      failed.error_code = e.code();
      failed.errors.push_back(e.what());
      run.stages.push_back(std::move(failed));
      spdlog::error("{}: {}", to_string(stage), e.what());
      break;
    }
  }
  return run;
}

RunReport run_pipeline(const std::vector<Stage>& stages, const PipelineConfig& config) {
  const auto resources = Resources::load();
  auto store = Store::open(config.store_path);
  Gateway gateway(make_provider(config, resources), config.provider_config);
  return run_pipeline(stages, config, store, gateway, resources);
}

}  // namespace goalforge
