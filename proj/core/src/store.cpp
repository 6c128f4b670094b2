#include "goalforge/store.hpp"

#include <nlohmann/json.hpp>
#include <sqlite3.h>

#include <algorithm>
#include <map>
#include <set>

#include "goalforge/error.hpp"
#include "goalforge/util.hpp"

namespace goalforge {

using nlohmann::json;

namespace {

[[noreturn]] void fail(sqlite3* db, const std::string& what) {
  throw Error(Errc::IoError, what + ": " + (db ? sqlite3_errmsg(db) : "out of memory"));
}

void exec(sqlite3* db, const std::string& sql) {
  char* err = nullptr;
  if (sqlite3_exec(db, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
    std::string message = err ? err : "unknown error";
    sqlite3_free(err);
    throw Error(Errc::IoError, "sqlite: " + message);
  }
}

class Stmt {
 public:
  Stmt(sqlite3* db, const std::string& sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql.c_str(), -1, &stmt_, nullptr) != SQLITE_OK) fail(db, "prepare " + sql);
  }
  ~Stmt() { sqlite3_finalize(stmt_); }
  Stmt(const Stmt&) = delete;
  Stmt& operator=(const Stmt&) = delete;

  Stmt& bind(int i, const std::string& v) {
    check(sqlite3_bind_text(stmt_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT));
    return *this;
  }
  Stmt& bind(int i, long long v) {
    check(sqlite3_bind_int64(stmt_, i, v));
    return *this;
  }
  Stmt& bind(int i, int v) { return bind(i, static_cast<long long>(v)); }
  Stmt& bind(int i, std::size_t v) { return bind(i, static_cast<long long>(v)); }
  Stmt& bind(int i, bool v) { return bind(i, static_cast<long long>(v ? 1 : 0)); }
  Stmt& bind_null(int i) {
    check(sqlite3_bind_null(stmt_, i));
    return *this;
  }
  template <typename T>
  Stmt& bind(int i, const std::optional<T>& v) {
    return v ? bind(i, *v) : bind_null(i);
  }

  // True while rows remain.
  bool step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    fail(db_, "step");
  }
  void run() {
    while (step()) {
    }
    sqlite3_reset(stmt_);
    sqlite3_clear_bindings(stmt_);
  }

  std::string text(int col) const {
    const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
    return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col))) : std::string();
  }
  long long integer(int col) const { return sqlite3_column_int64(stmt_, col); }
  bool is_null(int col) const { return sqlite3_column_type(stmt_, col) == SQLITE_NULL; }

 private:
  void check(int rc) {
    if (rc != SQLITE_OK) fail(db_, "bind");
  }
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

class Transaction {
 public:
  explicit Transaction(sqlite3* db) : db_(db) { exec(db_, "BEGIN IMMEDIATE"); }
  ~Transaction() {
    if (!done_) sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
  }
  void commit() {
    exec(db_, "COMMIT");
    done_ = true;
  }

 private:
  sqlite3* db_;
  bool done_ = false;
};

bool valid_custom_label(const std::string& label) {
  return !label.empty() && label.size() <= 40 && std::all_of(label.begin(), label.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

std::string dataset_tables_sql(const std::string& sfx) {
  const std::string trans = "trans" + sfx, forum = "forum" + sfx, ng = "new_goal" + sfx;
  const std::string meta = "provider TEXT NOT NULL DEFAULT '', model TEXT NOT NULL DEFAULT '', seed INTEGER, "
                           "run_timestamp TEXT NOT NULL DEFAULT '', prompt_hash TEXT NOT NULL DEFAULT ''";
  return "CREATE TABLE IF NOT EXISTS " + trans +
         " (video_id TEXT PRIMARY KEY, title TEXT NOT NULL, description TEXT NOT NULL, core_value TEXT NOT NULL, "
         "key_words TEXT NOT NULL, qa TEXT NOT NULL, sdg_types TEXT NOT NULL, origin TEXT NOT NULL, " + meta + ");\n"
         "CREATE TABLE IF NOT EXISTS " + forum +
         " (goal INTEGER PRIMARY KEY CHECK (goal BETWEEN 1 AND 17), status TEXT NOT NULL "
         "CHECK (status IN ('ok','failed','imported')), participant_ids TEXT NOT NULL, transcript TEXT NOT NULL, "
         "word_count INTEGER NOT NULL, error TEXT NOT NULL DEFAULT '', " + meta + ");\n"
         "CREATE TABLE IF NOT EXISTS " + forum + "_graphs (goal INTEGER PRIMARY KEY REFERENCES " + forum +
         "(goal), repairs TEXT NOT NULL, " + meta + ");\n"
         "CREATE TABLE IF NOT EXISTS " + forum + "_nodes (goal INTEGER NOT NULL REFERENCES " + forum +
         "_graphs(goal), id TEXT NOT NULL, ord INTEGER NOT NULL, details TEXT NOT NULL, PRIMARY KEY (goal, id));\n"
         "CREATE TABLE IF NOT EXISTS " + forum + "_links (goal INTEGER NOT NULL REFERENCES " + forum +
         "_graphs(goal), seq INTEGER NOT NULL, source TEXT NOT NULL, target TEXT NOT NULL, relation TEXT NOT NULL, "
         "PRIMARY KEY (goal, seq));\n"
         "CREATE TABLE IF NOT EXISTS " + ng +
         " (number INTEGER PRIMARY KEY CHECK (number >= 18), title TEXT NOT NULL, sub_goals TEXT NOT NULL, "
         "source_goals TEXT NOT NULL, source TEXT NOT NULL, description TEXT NOT NULL, rationale TEXT NOT NULL, " +
         meta + ");\n";
}

std::string join_ints(const std::set<int>& v) {
  std::vector<std::string> parts;
  for (int x : v) parts.push_back(std::to_string(x));
  return join(parts, ",");
}

std::set<int> parse_ints(const std::string& s) {
  std::set<int> out;
  for (const auto& p : split(s, ',')) {
    if (!trim(p).empty()) out.insert(std::stoi(p));
  }
  return out;
}

void bind_meta(Stmt& st, int first, const RunMetadata& m) {
  st.bind(first, m.provider).bind(first + 1, m.model);
  if (m.seed) {
    st.bind(first + 2, static_cast<long long>(*m.seed));
  } else {
    st.bind_null(first + 2);
  }
  st.bind(first + 3, m.timestamp).bind(first + 4, m.prompt_hash);
}

RunMetadata read_meta(const Stmt& st, int first) {
  RunMetadata m;
  m.provider = st.text(first);
  m.model = st.text(first + 1);
  if (!st.is_null(first + 2)) m.seed = static_cast<std::uint64_t>(st.integer(first + 2));
  m.timestamp = st.text(first + 3);
  m.prompt_hash = st.text(first + 4);
  return m;
}

constexpr const char* kMetaCols = "provider, model, seed, run_timestamp, prompt_hash";

json repairs_to_json(const RepairReport& r) {
  json a = json::array();
  for (const auto& x : r.actions) a.push_back({{"kind", to_string(x.kind)}, {"subject", x.subject}, {"detail", x.detail}});
  return a;
}

RepairReport repairs_from_json(const json& a) {
  RepairReport r;
  for (const auto& x : a) {
    const std::string kind = x.at("kind").get<std::string>();
    RepairKind k = RepairKind::DroppedDanglingLink;
    for (auto candidate : {RepairKind::DroppedInvalidNode, RepairKind::MergedDuplicateNode,
                           RepairKind::DroppedDanglingLink, RepairKind::RenumberedOrder}) {
      if (to_string(candidate) == kind) k = candidate;
    }
    r.actions.push_back({k, x.at("subject").get<std::string>(), x.at("detail").get<std::string>()});
  }
  return r;
}

json sub_goals_to_json(const std::vector<SubGoalEntry>& subs) {
  NewGoalsDoc doc;
  doc.new_goals.push_back({"", subs, "", ""});
  return to_json(doc)["results"]["new_goals"][0]["sub_goals"];
}

std::vector<SubGoalEntry> sub_goals_from_json(const json& j) {
  json goal = json::object();
  goal["goal"] = "";
  goal["sub_goals"] = j;
  goal["source"] = "";
  goal["description"] = "";
  json doc = json::object();
  doc["results"]["relationships"] = json::array();
  doc["results"]["new_goals"] = json::array();
  doc["results"]["new_goals"].push_back(std::move(goal));
  return new_goals_from_json(doc).new_goals.front().sub_goals;
}

std::string dataset_or_throw(const std::string& dataset) {
  return table_suffix(dataset);
}

}  // namespace

std::string table_suffix(const std::string& dataset) {
  if (dataset == "preliminary") return "";
  if (dataset == "formal") return "2";
  if (!valid_custom_label(dataset)) {
    throw Error(Errc::InvalidArgument, "dataset label \"" + dataset + "\" must be lower-case letters, digits or _");
  }
  return "_" + dataset;
}

std::string_view to_string(Origin origin) noexcept { return origin == Origin::Imported ? "imported" : "generated"; }

std::string_view to_string(TranscriptStatus status) noexcept {
  switch (status) {
    case TranscriptStatus::Ok: return "ok";
    case TranscriptStatus::Failed: return "failed";
    case TranscriptStatus::Imported: return "imported";
  }
  return "?";
}

// ---- reader -------------------------------------------------------------------

std::vector<std::string> StoreReader::datasets() const {
  auto guard = lock();
  Stmt st(reader(), "SELECT label FROM datasets ORDER BY label");
  std::vector<std::string> out;
  while (st.step()) out.push_back(st.text(0));
  return out;
}

bool StoreReader::has_dataset(const std::string& dataset) const {
  auto guard = lock();
  Stmt st(reader(), "SELECT 1 FROM datasets WHERE label = ?");
  st.bind(1, dataset);
  return st.step();
}

std::vector<TalkRecord> StoreReader::talks(const std::string& dataset) const {
  auto guard = lock();
  Stmt st(reader(),
          "SELECT video_id, title, published_at, duration_seconds, transcript, channel, caption_language, "
          "member_only, usable, skip_reason FROM talks WHERE dataset = ? ORDER BY video_id");
  st.bind(1, dataset);
  std::vector<TalkRecord> out;
  while (st.step()) {
    TalkRecord r;
    r.video_id = st.text(0);
    r.title = st.text(1);
    r.published_at = parse_iso8601(st.text(2));
    r.duration = std::chrono::seconds(st.integer(3));
    if (!st.is_null(4)) r.transcript = st.text(4);
    r.channel = st.text(5);
    r.caption_language = st.text(6);
    r.member_only = st.integer(7) != 0;
    r.usable = st.integer(8) != 0;
    if (!st.is_null(9)) r.skip_reason = skip_reason_from_string(st.text(9));
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<StoredAnnotation> StoreReader::annotations(const std::string& dataset) const {
  const std::string t = "trans" + dataset_or_throw(dataset);
  auto guard = lock();
  Stmt st(reader(), "SELECT video_id, title, description, core_value, key_words, qa, sdg_types, origin, " +
                        std::string(kMetaCols) + " FROM " + t + " ORDER BY video_id");
  std::vector<StoredAnnotation> out;
  while (st.step()) {
    StoredAnnotation s;
    auto& a = s.annotation;
    a.video_id = st.text(0);
    a.title = st.text(1);
    a.description = st.text(2);
    a.core_value = st.text(3);
    a.key_words = json::parse(st.text(4)).get<std::vector<std::string>>();
    for (const auto& q : json::parse(st.text(5))) a.qa.push_back({q.at("question"), q.at("answer")});
    a.sdg_types = parse_ints(st.text(6));
    s.origin = st.text(7) == "imported" ? Origin::Imported : Origin::Generated;
    s.metadata = read_meta(st, 8);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<TalkAnnotation> StoreReader::talk_annotations(const std::string& dataset) const {
  std::vector<TalkAnnotation> out;
  for (auto& s : annotations(dataset)) out.push_back(std::move(s.annotation));
  return out;
}

namespace {

StoredTranscript read_transcript_row(const Stmt& st, const std::string& dataset) {
  StoredTranscript s;
  auto& t = s.transcript;
  t.goal = static_cast<int>(st.integer(0));
  t.dataset = dataset;
  const std::string status = st.text(1);
  s.status = status == "failed" ? TranscriptStatus::Failed
             : status == "imported" ? TranscriptStatus::Imported
                                    : TranscriptStatus::Ok;
  t.participant_ids = json::parse(st.text(2)).get<std::vector<std::string>>();
  t.text = st.text(3);
  t.word_count = static_cast<std::size_t>(st.integer(4));
  s.error = st.text(5);
  t.metadata = read_meta(st, 6);
  return s;
}

}  // namespace

std::vector<StoredTranscript> StoreReader::transcripts(const std::string& dataset) const {
  const std::string t = "forum" + dataset_or_throw(dataset);
  auto guard = lock();
  Stmt st(reader(), "SELECT goal, status, participant_ids, transcript, word_count, error, " + std::string(kMetaCols) +
                        " FROM " + t + " ORDER BY goal");
  std::vector<StoredTranscript> out;
  while (st.step()) out.push_back(read_transcript_row(st, dataset));
  return out;
}

std::optional<StoredTranscript> StoreReader::transcript(const std::string& dataset, int goal) const {
  const std::string t = "forum" + dataset_or_throw(dataset);
  auto guard = lock();
  Stmt st(reader(), "SELECT goal, status, participant_ids, transcript, word_count, error, " + std::string(kMetaCols) +
                        " FROM " + t + " WHERE goal = ?");
  st.bind(1, goal);
  if (!st.step()) return std::nullopt;
  return read_transcript_row(st, dataset);
}

std::vector<KnowledgeGraph> StoreReader::graphs(const std::string& dataset) const {
  const std::string f = "forum" + dataset_or_throw(dataset);
  auto guard = lock();
  std::vector<KnowledgeGraph> out;
  std::map<int, std::size_t> slot;
  {
    Stmt st(reader(), "SELECT goal, repairs, " + std::string(kMetaCols) + " FROM " + f + "_graphs ORDER BY goal");
    while (st.step()) {
      KnowledgeGraph g;
      g.goal = static_cast<int>(st.integer(0));
      g.dataset = dataset;
      g.repairs = repairs_from_json(json::parse(st.text(1)));
      g.provenance = read_meta(st, 2);
      slot[g.goal] = out.size();
      out.push_back(std::move(g));
    }
  }
  {
    Stmt st(reader(), "SELECT goal, id, ord, details FROM " + f + "_nodes ORDER BY goal, ord");
    while (st.step()) {
      out[slot.at(static_cast<int>(st.integer(0)))].nodes.push_back({st.text(1), st.integer(2), st.text(3)});
    }
  }
  {
    Stmt st(reader(), "SELECT goal, source, target, relation FROM " + f + "_links ORDER BY goal, seq");
    while (st.step()) {
      out[slot.at(static_cast<int>(st.integer(0)))].links.push_back({st.text(1), st.text(2), st.text(3)});
    }
  }
  return out;
}

std::vector<NewGoalProposal> StoreReader::proposals(const std::string& dataset) const {
  const std::string t = "new_goal" + dataset_or_throw(dataset);
  auto guard = lock();
  Stmt st(reader(), "SELECT number, title, sub_goals, source_goals, source, description, rationale FROM " + t +
                        " ORDER BY number");
  std::vector<NewGoalProposal> out;
  while (st.step()) {
    NewGoalProposal p;
    p.number = static_cast<int>(st.integer(0));
    p.title = st.text(1);
    p.sub_goals = sub_goals_from_json(json::parse(st.text(2)));
    p.source_goals = parse_ints(st.text(3));
    p.source = st.text(4);
    p.description = st.text(5);
    p.rationale = st.text(6);
    out.push_back(std::move(p));
  }
  return out;
}

DatasetCounts StoreReader::counts(const std::string& dataset) const {
  const std::string sfx = dataset_or_throw(dataset);
  DatasetCounts c;
  if (!has_dataset(dataset)) return c;
  auto guard = lock();
  auto count = [&](const std::string& sql, bool bind_dataset = false) {
    Stmt st(reader(), sql);
    if (bind_dataset) st.bind(1, dataset);
    st.step();
    return static_cast<std::size_t>(st.integer(0));
  };
  c.talks = count("SELECT COUNT(*) FROM talks WHERE dataset = ?", true);
  c.usable_talks = count("SELECT COUNT(*) FROM talks WHERE dataset = ? AND usable = 1", true);
  c.annotations = count("SELECT COUNT(*) FROM trans" + sfx);
  c.transcripts = count("SELECT COUNT(*) FROM forum" + sfx + " WHERE status != 'failed'");
  c.failed_transcripts = count("SELECT COUNT(*) FROM forum" + sfx + " WHERE status = 'failed'");
  c.graphs = count("SELECT COUNT(*) FROM forum" + sfx + "_graphs");
  c.proposals = count("SELECT COUNT(*) FROM new_goal" + sfx);
  return c;
}

// ---- snapshot -------------------------------------------------------------------

Snapshot::Snapshot(sqlite3* db) : db_(db), mutex_(std::make_unique<std::mutex>()) {}

Snapshot::Snapshot(Snapshot&& other) noexcept : db_(std::exchange(other.db_, nullptr)), mutex_(std::move(other.mutex_)) {}

Snapshot::~Snapshot() {
  if (db_) {
    sqlite3_exec(db_, "COMMIT", nullptr, nullptr, nullptr);
    sqlite3_close(db_);
  }
}

// ---- store ------------------------------------------------------------------------

Store Store::open(const std::filesystem::path& path) {
  Store s;
  s.path_ = path;
  s.mutex_ = std::make_unique<std::mutex>();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  if (sqlite3_open_v2(path.string().c_str(), &s.db_, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX,
                      nullptr) != SQLITE_OK) {
    std::string message = s.db_ ? sqlite3_errmsg(s.db_) : "cannot open";
    throw Error(Errc::IoError, "cannot open store " + path.string() + ": " + message).with_path(path.string());
  }
  sqlite3_busy_timeout(s.db_, 10000);
  const int version = s.schema_version();
  if (version > kStoreSchemaVersion) {
    throw Error(Errc::IncompatibleVersion, "store " + path.string() + " has schema version " + std::to_string(version) +
                                               ", this build supports " + std::to_string(kStoreSchemaVersion));
  }
  exec(s.db_, "PRAGMA journal_mode = WAL; PRAGMA foreign_keys = ON; PRAGMA synchronous = NORMAL;");
  if (version < kStoreSchemaVersion) {
    Transaction tx(s.db_);
    exec(s.db_,
         "CREATE TABLE IF NOT EXISTS datasets (label TEXT PRIMARY KEY, suffix TEXT NOT NULL UNIQUE);\n"
         "CREATE TABLE IF NOT EXISTS talks (dataset TEXT NOT NULL REFERENCES datasets(label), video_id TEXT NOT NULL, "
         "title TEXT NOT NULL, published_at TEXT NOT NULL, duration_seconds INTEGER NOT NULL, transcript TEXT, "
         "channel TEXT NOT NULL, caption_language TEXT NOT NULL, member_only INTEGER NOT NULL, usable INTEGER NOT NULL, "
         "skip_reason TEXT, origin TEXT NOT NULL, PRIMARY KEY (dataset, video_id));\n");
    for (const char* label : {"preliminary", "formal"}) {
      exec(s.db_, dataset_tables_sql(table_suffix(label)));
      Stmt st(s.db_, "INSERT OR IGNORE INTO datasets (label, suffix) VALUES (?, ?)");
      st.bind(1, std::string(label)).bind(2, table_suffix(label));
      st.run();
    }
    exec(s.db_, "PRAGMA user_version = " + std::to_string(kStoreSchemaVersion));
    tx.commit();
  }
  return s;
}

Store::~Store() {
  if (db_) sqlite3_close(db_);
}

Store::Store(Store&& other) noexcept
    : db_(std::exchange(other.db_, nullptr)), path_(std::move(other.path_)), mutex_(std::move(other.mutex_)) {}

Store& Store::operator=(Store&& other) noexcept {
  if (this != &other) {
    if (db_) sqlite3_close(db_);
    db_ = std::exchange(other.db_, nullptr);
    path_ = std::move(other.path_);
    mutex_ = std::move(other.mutex_);
  }
  return *this;
}

int Store::schema_version() const {
  Stmt st(db_, "PRAGMA user_version");
  st.step();
  return static_cast<int>(st.integer(0));
}

void Store::ensure_dataset(const std::string& dataset) {
  const std::string sfx = table_suffix(dataset);
  auto guard = lock();
  Transaction tx(db_);
  exec(db_, dataset_tables_sql(sfx));
  Stmt st(db_, "INSERT OR IGNORE INTO datasets (label, suffix) VALUES (?, ?)");
  st.bind(1, dataset).bind(2, sfx);
  st.run();
  tx.commit();
}

void Store::put_talks(const std::string& dataset, const std::vector<TalkRecord>& talks, Origin origin) {
  ensure_dataset(dataset);
  auto guard = lock();
  Transaction tx(db_);
  Stmt st(db_,
          "INSERT OR REPLACE INTO talks (dataset, video_id, title, published_at, duration_seconds, transcript, channel, "
          "caption_language, member_only, usable, skip_reason, origin) VALUES (?,?,?,?,?,?,?,?,?,?,?,?)");
  for (const auto& r : talks) {
    st.bind(1, dataset).bind(2, r.video_id).bind(3, r.title).bind(4, format_iso8601(r.published_at));
    st.bind(5, static_cast<long long>(r.duration.count())).bind(6, r.transcript).bind(7, r.channel);
    st.bind(8, r.caption_language).bind(9, r.member_only).bind(10, r.usable);
    if (r.skip_reason) {
      st.bind(11, std::string(to_string(*r.skip_reason)));
    } else {
      st.bind_null(11);
    }
    st.bind(12, std::string(origin == Origin::Imported ? "import" : "ingest"));
    st.run();
  }
  tx.commit();
}

void Store::put_annotation(const std::string& dataset, const TalkAnnotation& a, Origin origin,
                           const RunMetadata& metadata) {
  put_annotations(dataset, {a}, origin);
  if (metadata == RunMetadata{}) return;
  auto guard = lock();
  Stmt st(db_, "UPDATE trans" + table_suffix(dataset) +
                   " SET provider = ?, model = ?, seed = ?, run_timestamp = ?, prompt_hash = ? WHERE video_id = ?");
  bind_meta(st, 1, metadata);
  st.bind(6, a.video_id);
  st.run();
}

void Store::put_annotations(const std::string& dataset, const std::vector<TalkAnnotation>& annotations,
                            Origin origin) {
  const std::string t = "trans" + table_suffix(dataset);
  ensure_dataset(dataset);
  auto guard = lock();
  Transaction tx(db_);
  Stmt exists(db_, "SELECT 1 FROM talks WHERE dataset = ? AND video_id = ?");
  Stmt st(db_, "INSERT OR REPLACE INTO " + t +
                   " (video_id, title, description, core_value, key_words, qa, sdg_types, origin) "
                   "VALUES (?,?,?,?,?,?,?,?)");
  for (const auto& a : annotations) {
    exists.bind(1, dataset).bind(2, a.video_id);
    const bool found = exists.step();
    exists.run();
    if (!found) {
      throw Error(Errc::IntegrityViolation, "annotation for unknown talk " + a.video_id + " in " + dataset)
          .with_path(a.video_id);
    }
    json qa = json::array();
    for (const auto& q : a.qa) qa.push_back({{"question", q.question}, {"answer", q.answer}});
    st.bind(1, a.video_id).bind(2, a.title).bind(3, a.description).bind(4, a.core_value);
    st.bind(5, json(a.key_words).dump()).bind(6, qa.dump()).bind(7, join_ints(a.sdg_types));
    st.bind(8, std::string(to_string(origin)));
    st.run();
  }
  tx.commit();
}

void Store::mark_skipped(const std::string& dataset, const std::string& video_id, SkipReason reason) {
  auto guard = lock();
  Stmt st(db_, "UPDATE talks SET usable = 0, skip_reason = ? WHERE dataset = ? AND video_id = ?");
  st.bind(1, std::string(to_string(reason))).bind(2, dataset).bind(3, video_id);
  st.run();
}

void Store::put_transcript(const RoundtableTranscript& t, TranscriptStatus status) {
  const std::string f = "forum" + table_suffix(t.dataset);
  ensure_dataset(t.dataset);
  auto guard = lock();
  Stmt st(db_, "INSERT OR REPLACE INTO " + f +
                   " (goal, status, participant_ids, transcript, word_count, error, " + kMetaCols +
                   ") VALUES (?,?,?,?,?,'',?,?,?,?,?)");
  st.bind(1, t.goal).bind(2, std::string(to_string(status))).bind(3, json(t.participant_ids).dump());
  st.bind(4, t.text).bind(5, t.word_count);
  bind_meta(st, 6, t.metadata);
  st.run();
}

void Store::put_transcript_failure(const std::string& dataset, int goal, const std::string& error) {
  const std::string f = "forum" + table_suffix(dataset);
  ensure_dataset(dataset);
  auto guard = lock();
  Stmt st(db_, "INSERT OR REPLACE INTO " + f +
                   " (goal, status, participant_ids, transcript, word_count, error) VALUES (?, 'failed', '[]', '', 0, ?)");
  st.bind(1, goal).bind(2, error);
  st.run();
}

void Store::put_graph(const KnowledgeGraph& g) {
  if (auto problems = integrity_problems(g.doc()); !problems.empty()) {
    throw Error(Errc::IntegrityViolation, "graph for goal " + std::to_string(g.goal) + ": " + problems.front());
  }
  const std::string f = "forum" + table_suffix(g.dataset);
  ensure_dataset(g.dataset);
  auto guard = lock();
  Transaction tx(db_);
  {
    Stmt st(db_, "SELECT status FROM " + f + " WHERE goal = ?");
    st.bind(1, g.goal);
    if (!st.step() || st.text(0) == "failed") {
      throw Error(Errc::IntegrityViolation, "graph for goal " + std::to_string(g.goal) + " has no transcript in " +
                                                g.dataset);
    }
  }
  for (const char* table : {"_links", "_nodes", "_graphs"}) {
    Stmt del(db_, "DELETE FROM " + f + table + " WHERE goal = ?");
    del.bind(1, g.goal);
    del.run();
  }
  {
    Stmt st(db_, "INSERT INTO " + f + "_graphs (goal, repairs, " + kMetaCols + ") VALUES (?,?,?,?,?,?,?)");
    st.bind(1, g.goal).bind(2, repairs_to_json(g.repairs).dump());
    bind_meta(st, 3, g.provenance);
    st.run();
  }
  {
    Stmt st(db_, "INSERT INTO " + f + "_nodes (goal, id, ord, details) VALUES (?,?,?,?)");
    for (const auto& n : g.nodes) {
      st.bind(1, g.goal).bind(2, n.id).bind(3, n.order).bind(4, n.details);
      st.run();
    }
  }
  {
    Stmt st(db_, "INSERT INTO " + f + "_links (goal, seq, source, target, relation) VALUES (?,?,?,?,?)");
    for (std::size_t i = 0; i < g.links.size(); ++i) {
      st.bind(1, g.goal).bind(2, i).bind(3, g.links[i].source).bind(4, g.links[i].target).bind(5, g.links[i].relation);
      st.run();
    }
  }
  tx.commit();
}

void Store::put_proposals(const std::string& dataset, const std::vector<NewGoalProposal>& proposals,
                          const RunMetadata& metadata) {
  const std::string sfx = table_suffix(dataset);
  ensure_dataset(dataset);
  auto guard = lock();
  Transaction tx(db_);
  std::set<int> graphs;
  {
    Stmt st(db_, "SELECT goal FROM forum" + sfx + "_graphs");
    while (st.step()) graphs.insert(static_cast<int>(st.integer(0)));
  }
  exec(db_, "DELETE FROM new_goal" + sfx);
  Stmt st(db_, "INSERT INTO new_goal" + sfx + " (number, title, sub_goals, source_goals, source, description, rationale, " +
                   kMetaCols + ") VALUES (?,?,?,?,?,?,?,?,?,?,?,?)");
  for (const auto& p : proposals) {
    for (int g : p.source_goals) {
      if (!graphs.contains(g)) {
        throw Error(Errc::IntegrityViolation, "proposal " + std::to_string(p.number) + " cites goal " +
                                                  std::to_string(g) + ", which has no graph in " + dataset);
      }
    }
    st.bind(1, p.number).bind(2, p.title).bind(3, sub_goals_to_json(p.sub_goals).dump());
    st.bind(4, join_ints(p.source_goals)).bind(5, p.source).bind(6, p.description).bind(7, p.rationale);
    bind_meta(st, 8, metadata);
    st.run();
  }
  tx.commit();
}

void Store::clear_from(const std::string& dataset, Stage stage) {
  const std::string sfx = table_suffix(dataset);
  ensure_dataset(dataset);
  auto guard = lock();
  Transaction tx(db_);
  const int s = static_cast<int>(stage);
  exec(db_, "DELETE FROM new_goal" + sfx);
  if (s <= static_cast<int>(Stage::Graphs)) {
    exec(db_, "DELETE FROM forum" + sfx + "_links; DELETE FROM forum" + sfx + "_nodes; DELETE FROM forum" + sfx +
                  "_graphs;");
  }
  if (s <= static_cast<int>(Stage::Transcripts)) exec(db_, "DELETE FROM forum" + sfx);
  if (s <= static_cast<int>(Stage::Annotations)) exec(db_, "DELETE FROM trans" + sfx);
  if (s <= static_cast<int>(Stage::Talks)) {
    Stmt st(db_, "DELETE FROM talks WHERE dataset = ?");
    st.bind(1, dataset);
    st.run();
  }
  tx.commit();
}

Snapshot Store::snapshot() const {
  sqlite3* db = nullptr;
  if (sqlite3_open_v2(path_.string().c_str(), &db, SQLITE_OPEN_READONLY | SQLITE_OPEN_NOMUTEX, nullptr) != SQLITE_OK) {
    std::string message = db ? sqlite3_errmsg(db) : "cannot open";
    sqlite3_close(db);
    throw Error(Errc::IoError, "cannot open snapshot: " + message);
  }
  sqlite3_busy_timeout(db, 10000);
  Snapshot snap(db);
  exec(db, "BEGIN");
  // The read transaction only pins a view once it has read something.
  Stmt st(db, "SELECT COUNT(*) FROM datasets");
  st.step();
  return snap;
}

}  // namespace goalforge
