#include <CLI11.hpp>
#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "goalforge/analytics.hpp"
#include "goalforge/export.hpp"
#include "goalforge/importers.hpp"
#include "goalforge/kg.hpp"
#include "goalforge/pipeline.hpp"
#include "goalforge/retrieval.hpp"
#include "goalforge/store.hpp"
#include "goalforge/util.hpp"

using namespace goalforge;
namespace fs = std::filesystem;

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kStageFailed = 1;
constexpr int kFatal = 3;

std::string fixed(double v, int places) { return fmt::format("{:.{}f}", v, places); }

struct Options {
  PipelineConfig cfg;
  std::optional<std::uint64_t> seed;
  std::string window;
  bool live = false;
  double provider_rate = 0.0;
  std::string report_path;
  std::string verbosity = "info";
  std::vector<std::string> stages;
  bool single_only = false;
  int goal = 0;
  std::string import_path;
  std::string bundle_dir;
};

void add_common(CLI::App* app, Options& o) {
  app->add_option("--dataset", o.cfg.dataset, "Dataset label (preliminary, formal or a custom name)")
      ->capture_default_str();
  app->add_option("--store", o.cfg.store_path, "Store file")->capture_default_str();
  app->add_option("--work", o.cfg.work_dir, "Directory for the index and analysis outputs")->capture_default_str();
  app->add_option("--log-level", o.verbosity, "trace, debug, info, warn, error or off")->capture_default_str();
  app->add_option("--report", o.report_path, "Write the run report as JSON to this file");
}

void add_provider(CLI::App* app, Options& o) {
  app->add_option("--provider", o.cfg.provider, "mock, live (alias gemini), record or replay")
      ->check(CLI::IsMember({"mock", "live", "gemini", "record", "replay"}))
      ->capture_default_str();
  app->add_option("--seed", o.seed, "Seed for the mock provider");
  app->add_option("--cassette", o.cfg.cassette, "Cassette file for record and replay");
  app->add_option("--provider-rate", o.provider_rate, "Provider requests per second (0 = unlimited)");
  app->add_option("--workers", o.cfg.workers, "Concurrent provider calls")->capture_default_str();
  app->add_option("--timestamp", o.cfg.timestamp, "Fixed timestamp recorded in run metadata");
}

void add_ingest(CLI::App* app, Options& o) {
  app->add_option("--fixtures", o.cfg.fixtures, "Read the corpus from a fixture directory");
  app->add_flag("--live", o.live, "Fetch from the video platform (needs YOUTUBE_API_KEY)");
  app->add_option("--window", o.window, "Publication window YYYY-MM-DD..YYYY-MM-DD");
  app->add_option("--rate", o.cfg.youtube.requests_per_second, "Video platform requests per second")
      ->capture_default_str();
  app->add_option("--channel", o.cfg.ingest.channel, "Channel id to list")->capture_default_str();
  app->add_option("--page-limit", o.cfg.ingest.page_limit, "Maximum search pages (0 = all)");
  app->add_option("--record-fixtures", o.cfg.record_fixtures, "Mirror live fetches into this fixture directory");
}

void add_analyze(CLI::App* app, Options& o) {
  app->add_flag("--single-only", o.single_only, "Diagonal counts talks tagged with that goal alone");
  app->add_option("--palette", o.cfg.palette_size, "Number of degree colour bins")->capture_default_str();
}

void finalize(Options& o) {
  spdlog::set_level(spdlog::level::from_str(o.verbosity));
  if (o.seed) o.cfg.provider_config.seed = *o.seed;
  o.cfg.provider_config.requests_per_second = o.provider_rate;
  if (!o.window.empty()) o.cfg.window = CorpusWindow::parse(o.window, o.cfg.dataset);
  if (o.single_only) o.cfg.diagonal = DiagonalMode::SingleOnly;
  if (o.goal != 0) o.cfg.goals = {o.goal};
}

void print_report(const RunReport& report) {
  for (const auto& s : report.stages) {
    std::cout << to_string(s.stage) << ": " << (s.ok ? "ok" : "failed") << " (" << s.duration.count() << " ms)";
    for (const auto& [k, v] : s.counts) std::cout << " " << k << "=" << v;
    std::cout << "\n";
    for (const auto& skip : s.skips) std::cout << "  skipped " << skip << "\n";
    for (const auto& err : s.errors) std::cout << "  error " << err << "\n";
  }
}

int run_stages(const Options& o, const std::vector<Stage>& stages) {
  if (std::find(stages.begin(), stages.end(), Stage::Ingest) != stages.end() && o.cfg.fixtures.empty() && !o.live) {
    throw Error(Errc::InvalidArgument, "ingest needs --fixtures DIR or --live");
  }
  const auto report = run_pipeline(stages, o.cfg);
  print_report(report);
  if (!o.report_path.empty()) write_file(o.report_path, report.to_json());
  return report.ok() ? kOk : kStageFailed;
}

std::vector<KnowledgeGraph> complete_graphs(const Store& store, const std::string& dataset) {
  auto graphs = store.graphs(dataset);
  require_complete(graphs, dataset);
  return graphs;
}

int stats(const Options& o) {
  auto store = Store::open(o.cfg.store_path);
  for (const auto& ds : store.datasets()) {
    const auto c = store.counts(ds);
    std::cout << ds << ": talks=" << c.talks << " usable=" << c.usable_talks << " annotations=" << c.annotations
              << " transcripts=" << c.transcripts << " failed_transcripts=" << c.failed_transcripts
              << " graphs=" << c.graphs << " proposals=" << c.proposals << "\n";
    if (c.graphs == static_cast<std::size_t>(kGoalCount)) {
      const auto t = graph_totals(store.graphs(ds));
      std::cout << fixed(t.mean_nodes, 3) << " mean nodes, " << fixed(t.mean_links, 3) << " mean links ("
                << t.total_nodes << "/" << t.total_links << ")\n";
    }
  }
  if (store.counts("preliminary").graphs == kGoalCount && store.counts("formal").graphs == kGoalCount) {
    const auto pre = complete_graphs(store, "preliminary");
    const auto formal = complete_graphs(store, "formal");
    for (auto metric : {CompareMetric::Nodes, CompareMetric::Links}) {
      const auto r = compare_datasets(pre, formal, metric);
      std::cout << to_string(metric) << ": levene W=" << fixed(r.levene.w, 4) << " p=" << fixed(r.levene.p, 4)
                << "; welch t=" << fixed(r.welch.t, 4) << " df=" << fixed(r.welch.df, 3)
                << " p=" << fixed(r.welch.p, 4) << "\n";
    }
  }
  return kOk;
}

int select(const Options& o, std::size_t cap) {
  const auto resources = Resources::load();
  auto store = Store::open(o.cfg.store_path);
  if (!fs::exists(index_path(o.cfg))) throw Error(Errc::StagePrerequisiteMissing, "no index; run `goalforge index`");
  const auto index = EmbeddingIndex::load(index_path(o.cfg));
  std::map<std::string, std::set<int>> tags;
  for (const auto& a : store.talk_annotations(o.cfg.dataset)) tags[a.video_id] = a.sdg_types;
  Gateway gateway(make_provider(o.cfg, resources), o.cfg.provider_config);
  const auto set = select_participants(o.goal, index, tags, resources.catalog, gateway, cap);
  for (std::size_t i = 0; i < set.members.size(); ++i) {
    std::cout << set.members[i] << "\t" << fixed(set.scores[i], 6) << "\n";
  }
  return kOk;
}

int import_artifacts(const Options& o, const std::string& kind) {
  auto store = Store::open(o.cfg.store_path);
  std::size_t n = 0;
  if (kind == "tags") {
    n = import_tags(store, read_tag_table(o.import_path), o.cfg.dataset);
  } else if (kind == "graphs") {
    n = import_graphs(store, read_graph_dir(o.import_path, o.cfg.dataset), o.cfg.dataset);
  } else {
    n = import_proposals(store, read_proposals(o.import_path), o.cfg.dataset);
  }
  std::cout << "imported " << n << " " << kind << " into " << o.cfg.dataset << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"goalforge: SDG roundtable simulation pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "goalforge 0.1.0");
  Options o;
  std::function<int()> action;

  struct StageCommand {
    const char* name;
    Stage stage;
    const char* help;
  };
  const StageCommand stage_commands[] = {
      {"ingest", Stage::Ingest, "Collect talk metadata and transcripts"},
      {"annotate", Stage::Annotate, "Tag talks with SDGs and question-answer pairs"},
      {"index", Stage::Index, "Embed annotations into the retrieval index"},
      {"simulate", Stage::Simulate, "Run one roundtable per goal"},
      {"extract", Stage::Extract, "Turn roundtable transcripts into knowledge graphs"},
      {"synthesize", Stage::Synthesize, "Propose new goals from the 17 graphs"},
      {"analyze", Stage::Analyze, "Write metrics, co-occurrence and comparison reports"},
      {"export-site", Stage::Export, "Write the static viewer bundle"},
  };
  for (const auto& sc : stage_commands) {
    auto* sub = app.add_subcommand(sc.name, sc.help);
    add_common(sub, o);
    switch (sc.stage) {
      case Stage::Ingest: add_ingest(sub, o); break;
      case Stage::Analyze: add_analyze(sub, o); break;
      case Stage::Export:
        sub->add_option("--out", o.cfg.out_dir, "Bundle directory")->capture_default_str();
        sub->add_option("--palette", o.cfg.palette_size, "Number of degree colour bins")->capture_default_str();
        break;
      case Stage::Simulate:
        add_provider(sub, o);
        sub->add_option("--goal", o.goal, "Simulate only this goal")->check(CLI::Range(1, kGoalCount));
        sub->add_option("--cap", o.cfg.participant_cap, "Participants per roundtable")->capture_default_str();
        break;
      default: add_provider(sub, o); break;
    }
    const Stage stage = sc.stage;
    sub->callback([&, stage] { action = [&, stage] { return run_stages(o, {stage}); }; });
  }

  auto* run = app.add_subcommand("run", "Run several stages in dependency order");
  add_common(run, o);
  add_provider(run, o);
  add_ingest(run, o);
  add_analyze(run, o);
  run->add_option("--out", o.cfg.out_dir, "Bundle directory")->capture_default_str();
  run->add_option("--cap", o.cfg.participant_cap, "Participants per roundtable")->capture_default_str();
  run->add_option("--stages", o.stages, "Comma separated stage names (default: all)")->delimiter(',');
  run->callback([&] {
    action = [&] {
      std::vector<Stage> stages;
      for (const auto& name : o.stages) {
        const auto s = stage_from_string(name);
        if (!s) throw Error(Errc::InvalidArgument, "unknown stage: " + name);
        stages.push_back(*s);
      }
      return run_stages(o, stages.empty() ? all_stages() : stages);
    };
  });

  std::size_t cap = kDefaultParticipantCap;
  auto* sel = app.add_subcommand("select", "Rank roundtable participants for one goal");
  add_common(sel, o);
  add_provider(sel, o);
  sel->add_option("--goal", o.goal, "Goal number")->required()->check(CLI::Range(1, kGoalCount));
  sel->add_option("--cap", cap, "Maximum participants")->capture_default_str();
  sel->callback([&] { action = [&] { return select(o, cap); }; });

  auto* st = app.add_subcommand("stats", "Dataset counts, graph totals and the preliminary/formal comparison");
  add_common(st, o);
  st->callback([&] { action = [&] { return stats(o); }; });

  auto* imp = app.add_subcommand("import", "Load tags, graphs or proposals from files");
  imp->require_subcommand(1);
  for (const char* kind : {"tags", "graphs", "proposals"}) {
    auto* k = imp->add_subcommand(kind, std::string("Import ") + kind);
    add_common(k, o);
    k->add_option("path", o.import_path, "Tag table, graph directory or proposal document")->required();
    const std::string name = kind;
    k->callback([&, name] { action = [&, name] { return import_artifacts(o, name); }; });
  }

  auto* ver = app.add_subcommand("verify", "Check a bundle's manifest checksums");
  ver->add_option("dir", o.bundle_dir, "Bundle directory")->required();
  ver->callback([&] {
    action = [&] {
      verify_bundle(o.bundle_dir);
      std::cout << "bundle ok\n";
      return kOk;
    };
  });

  CLI11_PARSE(app, argc, argv);
  try {
    finalize(o);
    return action ? action() : kOk;
  } catch (const std::exception& e) {
    std::cerr << "goalforge: " << e.what() << "\n";
    return kFatal;
  }
}
