#include "goalforge/mock.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <random>
#include <set>

#include "goalforge/documents.hpp"
#include "goalforge/error.hpp"
#include "goalforge/providers.hpp"
#include "goalforge/util.hpp"

namespace goalforge {

using nlohmann::json;

namespace {

constexpr std::string_view kSafetyMarker = "[[mock:safety-block]]";
constexpr std::string_view kInvalidMarker = "[[mock:annotation-invalid]]";
constexpr std::string_view kInvalidOnceMarker = "[[mock:annotation-invalid-once]]";
constexpr std::string_view kUnparseableMarker = "[[mock:unparseable]]";
constexpr std::string_view kKgDanglingMarker = "[[mock:kg-dangling-link]]";
constexpr std::string_view kKgUnparseableMarker = "[[mock:kg-unparseable]]";

bool contains(std::string_view text, std::string_view needle) { return text.find(needle) != std::string_view::npos; }

std::string fill(std::string pattern, const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    const std::string marker = "{" + key + "}";
    for (auto pos = pattern.find(marker); pos != std::string::npos; pos = pattern.find(marker, pos + value.size())) {
      pattern.replace(pos, marker.size(), value);
    }
  }
  return pattern;
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

// " w1 w2 ... " for whole-word phrase matching.
std::string word_string(std::string_view text) { return " " + join(tokenize_words(text), " ") + " "; }

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(engine_() % n); }
  bool chance(unsigned percent) { return engine_() % 100 < percent; }
  template <typename T>
  const T& pick(const std::vector<T>& items) {
    if (items.empty()) throw Error(Errc::InvalidArgument, "mock library list is empty");
    return items[below(items.size())];
  }
  template <typename T>
  void shuffle(std::vector<T>& items) {
    // Fisher-Yates with raw engine output, stable across standard libraries.
    for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

std::string wrap_reply(const std::string& lead, const json& doc) {
  return lead + "\n\n" + fenced(dump_json(doc)) + "\n";
}

std::string prose_reply(std::string_view subject) {
  return "I am unable to present this as structured data. In summary, the material discusses " +
         std::string(subject.substr(0, 80)) + " at length.\n";
}

struct Participant {
  std::string title;
  std::string key_words;
};

std::vector<Participant> parse_kg_box(std::string_view kg_box) {
  std::vector<Participant> out;
  for (const auto& raw : split(kg_box, '\n')) {
    const std::string line = trim(raw);
    if (line.rfind("[Participant ", 0) == 0) {
      out.emplace_back();
    } else if (!out.empty() && line.rfind("title: ", 0) == 0) {
      out.back().title = line.substr(7);
    } else if (!out.empty() && line.rfind("key_words: ", 0) == 0) {
      out.back().key_words = line.substr(11);
    }
  }
  return out;
}

std::string sentence_around(const std::string& text, std::size_t pos) {
  std::size_t begin = pos;
  while (begin > 0 && text[begin - 1] != '.' && text[begin - 1] != '?' && text[begin - 1] != '\n' &&
         text[begin - 1] != ':') {
    --begin;
  }
  std::size_t end = text.find_first_of(".?\n", pos);
  if (end == std::string::npos) end = text.size();
  std::string s = trim(text.substr(begin, end - begin));
  if (s.size() > 200) s = s.substr(0, 200);
  return s + ".";
}

}  // namespace

MockLibrary MockLibrary::load(const std::filesystem::path& path) {
  const json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(Errc::ParseError, "mock library is not JSON: " + path.string());
  MockLibrary lib;
  try {
    for (const auto& [k, v] : j.at("lexicon").items()) lib.lexicon[std::stoi(k)] = v.get<std::vector<std::string>>();
    for (const auto& [k, v] : j.at("concepts").items()) lib.concepts[std::stoi(k)] = v.get<std::vector<std::string>>();
    j.at("relations").get_to(lib.relations);
    j.at("facilitator_questions").get_to(lib.facilitator_questions);
    j.at("openings").get_to(lib.openings);
    j.at("elaborations").get_to(lib.elaborations);
    j.at("core_values").get_to(lib.core_values);
    j.at("questions").get_to(lib.questions);
    j.at("answers").get_to(lib.answers);
    j.at("goal_titles").get_to(lib.goal_titles);
    j.at("indicators").get_to(lib.indicators);
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, "mock library " + path.string() + ": " + e.what());
  }
  for (int g = 1; g <= 17; ++g) {
    if (lib.lexicon[g].empty() || lib.concepts[g].empty()) {
      throw Error(Errc::ParseError, "mock library lacks goal " + std::to_string(g));
    }
  }
  if (lib.questions.size() < 5 || lib.questions.size() != lib.answers.size()) {
    throw Error(Errc::ParseError, "mock library needs >= 5 parallel questions and answers");
  }
  return lib;
}

std::map<int, int> MockLibrary::goal_hits(std::string_view text) const {
  const std::string words = word_string(text);
  std::map<int, int> hits;
  for (const auto& [goal, terms] : lexicon) {
    int n = 0;
    for (const auto& term : terms) n += static_cast<int>(count_occurrences(words, word_string(term)));
    hits[goal] = n;
  }
  return hits;
}

MockProvider::MockProvider(PromptLibrary prompts, MockLibrary library, std::size_t dimension)
    : prompts_(std::move(prompts)), library_(std::move(library)), dimension_(dimension) {}

namespace {

struct Context {
  const PromptLibrary& prompts;
  const MockLibrary& lib;
  Rng& rng;
  bool corrective;
};

std::string annotate_reply(const Context& ctx, const SlotMap& slots) {
  const std::string& data = slots.at("tedtalk_data");
  if (contains(data, kUnparseableMarker)) return prose_reply(data);

  std::string title;
  std::string body = data;
  for (const auto& line : split(data, '\n')) {
    if (line.rfind("Title: ", 0) == 0) {
      title = trim(line.substr(7));
      break;
    }
  }
  if (auto at = data.find("Transcript:\n"); at != std::string::npos) body = data.substr(at + 12);
  if (title.empty()) {
    auto words = split(trim(body), ' ');
    words.resize(std::min<std::size_t>(words.size(), 8));
    title = join(words, " ");
  }

  const auto hits = ctx.lib.goal_hits(body);
  int max_hits = 0;
  for (const auto& [_, n] : hits) max_hits = std::max(max_hits, n);
  std::vector<std::pair<int, int>> ranked;  // (-hits, goal)
  for (const auto& [goal, n] : hits) {
    if (n > 0) ranked.emplace_back(-n, goal);
  }
  std::sort(ranked.begin(), ranked.end());
  std::set<int> tags;
  for (const auto& [neg, goal] : ranked) {
    if (-neg >= 2 && -neg * 3 >= max_hits) tags.insert(goal);
  }
  if (tags.empty()) tags.insert(ranked.empty() ? static_cast<int>(ctx.rng.below(17)) + 1 : ranked.front().second);
  if (ctx.rng.chance(25)) {
    for (const auto& [neg, goal] : ranked) {
      if (!tags.contains(goal)) {
        tags.insert(goal);
        break;
      }
    }
  }

  // Key words: matched lexicon terms by frequency, then long frequent words.
  const std::string words = word_string(body);
  std::vector<std::pair<std::size_t, std::string>> terms;
  for (const auto& [goal, list] : ctx.lib.lexicon) {
    for (const auto& term : list) {
      if (auto n = count_occurrences(words, word_string(term)); n > 0) terms.emplace_back(n, term);
    }
  }
  std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<std::string> key_words;
  for (const auto& [n, term] : terms) {
    if (key_words.size() == 6) break;
    if (std::find(key_words.begin(), key_words.end(), term) == key_words.end()) key_words.push_back(term);
  }
  if (key_words.empty()) {
    std::map<std::string, int> freq;
    for (const auto& w : tokenize_words(body)) {
      if (w.size() >= 6) ++freq[w];
    }
    std::vector<std::pair<int, std::string>> top;
    for (const auto& [w, n] : freq) top.emplace_back(-n, w);
    std::sort(top.begin(), top.end());
    for (std::size_t i = 0; i < top.size() && i < 3; ++i) key_words.push_back(top[i].second);
  }
  if (key_words.empty()) key_words.push_back("ideas");

  std::string description;
  {
    std::size_t sentences = 0;
    std::size_t pos = 0;
    while (sentences < 2 && pos < body.size()) {
      auto end = body.find_first_of(".?!", pos);
      if (end == std::string::npos) end = body.size() - 1;
      description += body.substr(pos, end - pos + 1);
      pos = end + 1;
      ++sentences;
    }
    description = trim(description);
    for (auto& c : description) {
      if (c == '\n') c = ' ';
    }
    if (description.size() > 400) description = description.substr(0, 400);
    if (description.empty()) description = title;
  }
  // Downstream fault markers ride along in the description.
  for (auto marker : {kKgDanglingMarker, kKgUnparseableMarker}) {
    if (contains(data, marker)) description += " " + std::string(marker);
  }

  const int lead_goal = *tags.begin();
  AnnotationDoc doc;
  doc.title = title;
  doc.description = description;
  doc.core_value = fill(ctx.rng.pick(ctx.lib.core_values), {{"concept", ctx.rng.pick(ctx.lib.concepts.at(lead_goal))}});
  doc.key_words = key_words;
  std::vector<std::size_t> order(ctx.lib.questions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  ctx.rng.shuffle(order);
  const bool invalid = contains(data, kInvalidMarker) || (contains(data, kInvalidOnceMarker) && !ctx.corrective);
  const std::size_t qa_count = invalid ? 4 : 5;
  for (std::size_t i = 0; i < qa_count; ++i) {
    const auto& kw = key_words[i % key_words.size()];
    doc.qa.push_back({fill(ctx.lib.questions[order[i]], {{"keyword", kw}}), fill(ctx.lib.answers[order[i]], {{"keyword", kw}})});
  }
  for (int g : tags) doc.sdg_types.push_back(g);
  return wrap_reply("Here is the structured summary of the talk.", to_json(doc));
}

std::string roundtable_reply(const Context& ctx, const SlotMap& slots) {
  int goal = 1;
  try {
    goal = std::clamp(std::stoi(slots.at("type")), 1, 17);
  } catch (const std::exception&) {
  }
  const std::string& bg = slots.at("bg_box");
  std::string host = trim(split(bg, '\n').front());
  if (host.empty()) host = "Goal " + std::to_string(goal);
  const auto participants = parse_kg_box(slots.at("kg_box"));

  auto host_concepts = ctx.lib.concepts.at(goal);
  ctx.rng.shuffle(host_concepts);
  host_concepts.resize(std::min<std::size_t>(host_concepts.size(), 6 + ctx.rng.below(4)));

  // Each participant brings concepts from the other goals its talk touches.
  std::vector<std::vector<std::string>> brought(participants.size());
  for (std::size_t i = 0; i < participants.size(); ++i) {
    const auto hits = ctx.lib.goal_hits(participants[i].title + " " + participants[i].key_words);
    std::vector<std::pair<int, int>> ranked;
    for (const auto& [g, n] : hits) {
      if (n > 0 && g != goal) ranked.emplace_back(-n, g);
    }
    std::sort(ranked.begin(), ranked.end());
    for (std::size_t k = 0; k < ranked.size() && k < 2; ++k) {
      brought[i].push_back(ctx.rng.pick(ctx.lib.concepts.at(ranked[k].second)));
    }
  }

  std::string t;
  t += "Facilitator: Welcome to this roundtable hosted by " + host +
       ". Our task is a white paper on implementation methods and innovative possibilities.\n\n";
  t += host + " (Host): Thank you. Our core values begin with " + host_concepts.front() + ", and today we will test " +
       "how " + host_concepts[std::min<std::size_t>(1, host_concepts.size() - 1)] + " can be delivered in practice.\n\n";

  const std::size_t rounds = participants.empty() ? 0 : 3;
  std::size_t host_cursor = 1;
  for (std::size_t r = 0; r < rounds; ++r) {
    for (std::size_t i = 0; i < participants.size(); ++i) {
      const auto& p = participants[i];
      std::string concept_name;
      if (r < brought[i].size()) {
        concept_name = brought[i][r];
      } else {
        concept_name = host_concepts[host_cursor % host_concepts.size()];
        ++host_cursor;
      }
      const std::string other = host_concepts[ctx.rng.below(host_concepts.size())];
      const std::string speaker = p.title.empty() ? "Participant " + std::to_string(i + 1) : p.title;
      t += speaker + ": " + fill(ctx.rng.pick(ctx.lib.openings), {{"concept", concept_name}}) + " " +
           fill(ctx.rng.pick(ctx.lib.elaborations),
                {{"concept", concept_name}, {"relation", ctx.rng.pick(ctx.lib.relations)}, {"other", other}});
      if (!p.key_words.empty()) t += " In my talk the key words were " + p.key_words + ".";
      t += "\n\n";
    }
    t += "Facilitator: " + ctx.rng.pick(ctx.lib.facilitator_questions) + "\n\n";
  }
  t += host + " (Host): We conclude that " + host_concepts.front() + " must be pursued together with " +
       host_concepts.back() + ", with individuals, governments and international bodies each taking concrete steps.\n";
  for (auto marker : {kKgDanglingMarker, kKgUnparseableMarker}) {
    if (contains(slots.at("kg_box"), marker)) t += std::string(marker) + "\n";
  }
  return t;
}

std::string kg_reply(const Context& ctx, const SlotMap& slots) {
  const std::string& script = slots.at("conversation_script");
  if (contains(script, kKgUnparseableMarker)) return prose_reply(script);

  struct Found {
    std::size_t pos;
    std::string id;
  };
  std::vector<Found> found;
  if (auto host_end = script.find(" (Host):"); host_end != std::string::npos) {
    auto line_start = script.rfind('\n', host_end);
    line_start = line_start == std::string::npos ? 0 : line_start + 1;
    const std::string label = script.substr(line_start, host_end - line_start);
    found.push_back({script.find(label), label});
  }
  std::set<std::string> seen;
  for (const auto& f : found) seen.insert(f.id);
  for (const auto& [goal, list] : ctx.lib.concepts) {
    for (const auto& c : list) {
      if (seen.contains(c)) continue;
      if (auto pos = script.find(c); pos != std::string::npos) {
        found.push_back({pos, c});
        seen.insert(c);
      }
    }
  }
  std::stable_sort(found.begin(), found.end(), [](const Found& a, const Found& b) { return a.pos < b.pos; });
  if (found.size() > 40) found.resize(40);

  KgDoc doc;
  for (std::size_t i = 0; i < found.size(); ++i) {
    doc.nodes.push_back({found[i].id, static_cast<long long>(i + 1), sentence_around(script, found[i].pos)});
  }
  std::set<std::pair<std::size_t, std::size_t>> linked;
  auto add_link = [&](std::size_t from, std::size_t to) {
    if (from == to || linked.contains({from, to}) || linked.contains({to, from})) return;
    linked.insert({from, to});
    doc.links.push_back({doc.nodes[from].id, doc.nodes[to].id, ctx.rng.pick(ctx.lib.relations)});
  };
  for (std::size_t k = 1; k < doc.nodes.size(); ++k) {
    const std::size_t anchor = ctx.rng.chance(45) ? 0 : ctx.rng.below(k);
    if (ctx.rng.chance(50)) {
      add_link(k, anchor);
    } else {
      add_link(anchor, k);
    }
  }
  for (std::size_t e = 0; e < doc.nodes.size() / 5; ++e) {
    add_link(ctx.rng.below(doc.nodes.size()), ctx.rng.below(doc.nodes.size()));
  }
  if (contains(script, kKgDanglingMarker) && !doc.nodes.empty()) {
    doc.links.push_back({doc.nodes.front().id, "Unlisted Concept", "mentions"});
  }
  return wrap_reply("Below are the nodes and links extracted from the meeting.", to_json(doc));
}

std::string new_goals_reply(const Context& ctx, const SlotMap& slots) {
  const json data = json::parse(slots.at("kg_data"), nullptr, false);
  if (data.is_discarded() || !data.is_array() || data.size() < 2) return prose_reply(slots.at("kg_data"));

  struct Section {
    int goal;
    std::string title;
    std::set<std::string> concepts;
  };
  std::vector<Section> sections;
  for (const auto& s : data) {
    Section sec{s.value("goal", 0), s.value("title", std::string()), {}};
    if (s.contains("nodes")) {
      for (const auto& n : s["nodes"]) {
        const std::string id = n.value("id", std::string());
        if (!id.empty() && id.rfind("Goal ", 0) != 0) sec.concepts.insert(id);
      }
    }
    sections.push_back(std::move(sec));
  }

  struct Pair {
    std::size_t a, b;
    std::vector<std::string> shared;
  };
  std::vector<Pair> pairs;
  for (std::size_t a = 0; a < sections.size(); ++a) {
    for (std::size_t b = a + 1; b < sections.size(); ++b) {
      Pair p{a, b, {}};
      std::set_intersection(sections[a].concepts.begin(), sections[a].concepts.end(), sections[b].concepts.begin(),
                            sections[b].concepts.end(), std::back_inserter(p.shared));
      if (!p.shared.empty()) pairs.push_back(std::move(p));
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Pair& x, const Pair& y) { return x.shared.size() > y.shared.size(); });
  if (pairs.empty()) {
    const auto& first = sections[0].concepts;
    pairs.push_back({0, 1, {first.empty() ? std::string("Shared Progress") : *first.begin()}});
  }

  auto label = [&](std::size_t i) { return "Goal " + std::to_string(sections[i].goal) + ": " + sections[i].title; };
  auto short_label = [&](std::size_t i) { return "Goal " + std::to_string(sections[i].goal); };

  NewGoalsDoc doc;
  for (std::size_t i = 0; i < pairs.size() && i < 8; ++i) {
    const auto& p = pairs[i];
    std::vector<std::string> shown(p.shared.begin(), p.shared.begin() + std::min<std::size_t>(2, p.shared.size()));
    doc.relationships.push_back(
        {{sections[p.a].goal, sections[p.b].goal},
         short_label(p.a) + " and " + short_label(p.b) + " both depend on " + join(shown, " and ") + ".",
         "Shared nodes in the " + short_label(p.a) + " and " + short_label(p.b) + " graphs: " + join(shown, ", ")});
  }
  const std::size_t count = std::min<std::size_t>(5, pairs.size());
  for (std::size_t i = 0; i < count; ++i) {
    const auto& p = pairs[i];
    const int number = 18 + static_cast<int>(i);
    const std::string n = std::to_string(number);
    const std::string topic = p.shared.front();
    std::vector<std::string> pool(sections[p.b].concepts.begin(), sections[p.b].concepts.end());
    std::erase(pool, topic);
    if (pool.empty()) pool.push_back(sections[p.b].title);
    const std::string other = ctx.rng.pick(pool);
    const std::string title = fill(ctx.rng.pick(ctx.lib.goal_titles), {{"a", topic}, {"b", other}});
    std::vector<std::size_t> ind(ctx.lib.indicators.size());
    for (std::size_t k = 0; k < ind.size(); ++k) ind[k] = k;
    ctx.rng.shuffle(ind);
    NewGoalEntry entry;
    entry.goal = "Goal " + n + ": " + title;
    entry.sub_goals.push_back({n + ".1",
                               "By 2035, strengthen " + topic + " by aligning " + short_label(p.a) + " and " +
                                   short_label(p.b) + " programmes.",
                               {{n + ".1.1", capitalize(fill(ctx.lib.indicators[ind[0]], {{"topic", to_lower(topic)}}))},
                                {n + ".1.2", capitalize(fill(ctx.lib.indicators[ind[1]], {{"topic", to_lower(topic)}}))}}});
    entry.source = label(p.a) + ", " + label(p.b);
    entry.description = "Combines " + short_label(p.a) + " and " + short_label(p.b) + " around " + topic + ".";
    doc.new_goals.push_back(std::move(entry));
  }
  return wrap_reply("These are the relationships found across the graphs and the proposed goals.", to_json(doc));
}

}  // namespace

std::string MockProvider::generate(const std::string& prompt, const ProviderConfig& config) {
  if (contains(prompt, kSafetyMarker)) throw Error(Errc::SafetyBlocked, "mock safety filter triggered");

  std::string original = prompt;
  bool corrective = false;
  if (auto parts = prompts_.split_corrective(prompt)) {
    original = parts->original;
    corrective = true;
  }
  const std::uint64_t seed = config.seed.value_or(0);
  Rng rng(mix64(seed ^ mix64(fnv1a64(config.generation_model)) ^ fnv1a64(prompt)));
  Context ctx{prompts_, library_, rng, corrective};

  const auto kind = prompts_.classify(original);
  if (!kind) {
    char tag[20];
    std::snprintf(tag, sizeof tag, "%016llx", static_cast<unsigned long long>(rng.next()));
    return "Mock reply " + std::string(tag) + ": " + original.substr(0, std::min<std::size_t>(original.size(), 60));
  }
  const auto slots = prompts_.get(*kind).match(original);
  if (!slots) throw Error(Errc::ProviderError, "mock could not read the prompt slots");
  switch (*kind) {
    case TemplateName::Annotate: return annotate_reply(ctx, *slots);
    case TemplateName::Roundtable: return roundtable_reply(ctx, *slots);
    case TemplateName::KgExtract: return kg_reply(ctx, *slots);
    case TemplateName::NewGoals: return new_goals_reply(ctx, *slots);
    case TemplateName::Corrective: break;
  }
  throw Error(Errc::ProviderError, "mock cannot answer this prompt");
}

std::vector<Embedding> MockProvider::embed(const std::vector<std::string>& texts, const ProviderConfig& config) {
  const std::uint64_t salt = mix64(config.seed.value_or(0) ^ fnv1a64(config.embedding_model));
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(hashed_embedding(t, salt, dimension_));
  return out;
}

}  // namespace goalforge
