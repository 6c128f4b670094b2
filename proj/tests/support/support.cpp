#include "support.hpp"

#include <atomic>
#include <random>

#include "goalforge/util.hpp"

#ifndef GOALFORGE_TEST_SOURCE_DIR
#error "GOALFORGE_TEST_SOURCE_DIR must be defined"
#endif

namespace gftest {

namespace fs = std::filesystem;
using namespace goalforge;

fs::path source_dir() { return GOALFORGE_TEST_SOURCE_DIR; }
fs::path fixtures_dir() { return source_dir() / "fixtures"; }

const Resources& resources() {
  static const Resources r = Resources::load(source_dir());
  return r;
}

const MockLibrary& mock_library() {
  static const MockLibrary lib = MockLibrary::load(resources().mock_library());
  return lib;
}

TempDir::TempDir() {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          ("goalforge-test-" + std::to_string(rd()) + "-" + std::to_string(counter.fetch_add(1)));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::shared_ptr<MockProvider> mock_provider() {
  return std::make_shared<MockProvider>(resources().prompts, mock_library());
}

std::unique_ptr<Gateway> mock_gateway(std::uint64_t seed) {
  ProviderConfig config;
  config.seed = seed;
  return std::make_unique<Gateway>(mock_provider(), config, [](std::chrono::milliseconds) {});
}

namespace {

const char* const kFiller[] = {
    "We spent years listening to people in the places most affected.",
    "The numbers surprised everyone in the room.",
    "Change starts when a community decides to act together.",
    "I want to share what we learned along the way.",
    "None of this happened overnight.",
    "The evidence points in a clear direction.",
};

std::string sentence_with(const std::string& term, std::mt19937_64& rng) {
  static const char* const kFrames[] = {
      "Our work on {} changed how the town thinks about the future.",
      "Nobody talked about {} when we started.",
      "The question of {} kept coming back in every interview.",
      "We measured {} in each village for three years.",
      "People told us that {} mattered more than anything else.",
  };
  std::string frame = kFrames[rng() % std::size(kFrames)];
  frame.replace(frame.find("{}"), 2, term);
  return frame;
}

}  // namespace

std::vector<TalkRecord> generate_corpus(const CorpusSpec& spec) {
  const auto& lib = mock_library();
  std::mt19937_64 rng(spec.seed);
  std::vector<TalkRecord> out;
  const auto span = (spec.window.end - spec.window.start).count();
  char id[64];
  for (std::size_t i = 0; i < spec.talks; ++i) {
    std::snprintf(id, sizeof id, "%s-%04zu", spec.prefix.c_str(), i + 1);
    const int lead = static_cast<int>(i % 17) + 1;
    std::vector<int> goals{lead};
    const std::size_t extra = rng() % 3;
    for (std::size_t k = 0; k < extra; ++k) {
      const int g = static_cast<int>(rng() % 17) + 1;
      if (std::find(goals.begin(), goals.end(), g) == goals.end()) goals.push_back(g);
    }
    std::string text;
    const auto& lead_terms = lib.lexicon.at(lead);
    for (int s = 0; s < 4; ++s) text += sentence_with(lead_terms[rng() % lead_terms.size()], rng) + " ";
    for (std::size_t k = 1; k < goals.size(); ++k) {
      const auto& terms = lib.lexicon.at(goals[k]);
      for (int s = 0; s < 2; ++s) text += sentence_with(terms[rng() % terms.size()], rng) + " ";
    }
    text += kFiller[rng() % std::size(kFiller)];
    text += "\n";
    if (i < spec.invalid_annotations) {
      text += "[[mock:annotation-invalid]]\n";
    } else if (i < spec.invalid_annotations + spec.invalid_once) {
      text += "[[mock:annotation-invalid-once]]\n";
    } else if (i < spec.invalid_annotations + spec.invalid_once + spec.kg_dangling) {
      text += "[[mock:kg-dangling-link]]\n";
    }

    TalkRecord r;
    r.video_id = id;
    r.title = "Notes on " + lead_terms[i % lead_terms.size()];
    const auto day = spec.window.start + std::chrono::days(static_cast<long long>(i) * span /
                                                            static_cast<long long>(std::max<std::size_t>(1, spec.talks)));
    r.published_at = std::chrono::sys_seconds(day) + std::chrono::hours(15);
    r.duration = std::chrono::seconds(300 + static_cast<long long>(rng() % 800));
    r.channel = "TED";
    r.caption_language = "en";
    r.transcript = text;
    out.push_back(std::move(r));
  }
  if (spec.edge_cases) {
    auto edge = [&](const std::string& suffix) {
      TalkRecord r;
      r.video_id = spec.prefix + "-edge-" + suffix;
      r.title = "Edge case " + suffix;
      r.published_at = std::chrono::sys_seconds(spec.window.start) + std::chrono::hours(30);
      r.duration = std::chrono::seconds(600);
      r.channel = "TED";
      r.caption_language = "en";
      r.transcript = "A talk about health and the hospital and the doctor.\n";
      return r;
    };
    auto before = edge("early");
    before.published_at = std::chrono::sys_seconds(spec.window.start) - std::chrono::hours(2);
    out.push_back(before);
    auto boundary = edge("last-day");  // inside: the window's end day is inclusive
    boundary.published_at = std::chrono::sys_seconds(spec.window.end) + std::chrono::hours(23);
    boundary.duration = kMaxDuration;
    boundary.caption_language = "fr";
    out.push_back(boundary);
    auto short_talk = edge("short");
    short_talk.duration = std::chrono::seconds(120);
    out.push_back(short_talk);
    auto member = edge("members");
    member.member_only = true;
    out.push_back(member);
    auto silent = edge("nocaptions");
    silent.caption_language.clear();
    silent.transcript.reset();
    out.push_back(silent);
  }
  return out;
}

void write_corpus(const fs::path& dir, const std::vector<TalkRecord>& records) {
  fs::create_directories(dir);
  for (const auto& r : records) write_fixture(dir, r);
}

CorpusSpec mini_corpus_spec() {
  CorpusSpec spec;
  spec.prefix = "mini";
  spec.talks = 24;
  spec.seed = 11;
  spec.invalid_annotations = 1;
  spec.invalid_once = 1;
  spec.kg_dangling = 1;
  return spec;
}

MockRun run_mock_pipeline(const fs::path& corpus_dir, const fs::path& root, std::uint64_t seed,
                          const std::string& dataset) {
  MockRun run;
  auto& cfg = run.config;
  cfg.dataset = dataset;
  cfg.fixtures = corpus_dir;
  cfg.store_path = root / "goalforge.db";
  cfg.work_dir = root / "work";
  cfg.out_dir = root / "site";
  cfg.provider = "mock";
  cfg.provider_config.seed = seed;
  cfg.timestamp = "2024-05-01T00:00:00Z";
  auto store = Store::open(cfg.store_path);
  Gateway gateway(make_provider(cfg, resources()), cfg.provider_config, [](std::chrono::milliseconds) {});
  run.report = run_pipeline(all_stages(), cfg, store, gateway, resources());
  return run;
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).generic_string()] = read_file(e.path());
  }
  return out;
}

}  // namespace gftest
