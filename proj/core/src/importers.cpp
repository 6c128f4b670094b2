#include "goalforge/importers.hpp"

#include <cstdio>
#include <fstream>

#include "goalforge/documents.hpp"
#include "goalforge/error.hpp"
#include "goalforge/util.hpp"

namespace goalforge {

namespace fs = std::filesystem;

TagTable read_tag_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string()).with_path(path.string());
  TagTable t;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (line.starts_with("#")) {
      for (const auto& field : split(line, '\t')) {
        if (field.starts_with("dataset=")) t.dataset = field.substr(8);
        if (field.starts_with("version=") && field != "version=1") {
          throw Error(Errc::IncompatibleVersion, "unsupported tag table " + field).with_path(where);
        }
      }
      continue;
    }
    if (trim(line).empty()) continue;
    if (!header) {
      if (line != "video_id\tsdg_types") throw Error(Errc::ParseError, "expected header video_id<TAB>sdg_types").with_path(where);
      header = true;
      continue;
    }
    const auto fields = split(line, '\t');
    if (fields.size() != 2 || trim(fields[0]).empty()) throw Error(Errc::ParseError, "expected 2 fields").with_path(where);
    std::set<int> tags;
    for (const auto& g : split(fields[1], ',')) {
      int v = 0;
      try {
        v = std::stoi(trim(g));
      } catch (const std::exception&) {
        throw Error(Errc::ParseError, "bad goal \"" + g + "\"").with_path(where + ":sdg_types");
      }
      if (v < 1 || v > kGoalCount) throw Error(Errc::ParseError, "goal out of range").with_path(where + ":sdg_types");
      tags.insert(v);
    }
    if (tags.empty()) throw Error(Errc::ParseError, "no tags").with_path(where + ":sdg_types");
    t.video_ids.push_back(trim(fields[0]));
    t.tags.push_back(std::move(tags));
  }
  if (!header) throw Error(Errc::ParseError, "missing header").with_path(path.string());
  return t;
}

std::string write_tag_table(const TagTable& table) {
  std::string out = "# goalforge-tags\tversion=1\tdataset=" + table.dataset + "\nvideo_id\tsdg_types\n";
  for (std::size_t i = 0; i < table.video_ids.size(); ++i) {
    std::vector<std::string> parts;
    for (int g : table.tags[i]) parts.push_back(std::to_string(g));
    out += table.video_ids[i] + "\t" + join(parts, ",") + "\n";
  }
  return out;
}

std::vector<KnowledgeGraph> read_graph_dir(const fs::path& dir, const std::string& dataset) {
  std::vector<KnowledgeGraph> graphs;
  for (int g = 1; g <= kGoalCount; ++g) {
    char name[32];
    std::snprintf(name, sizeof name, "goal-%02d.json", g);
    const fs::path file = dir / name;
    if (!fs::exists(file)) continue;
    KgDoc doc;
    try {
      doc = parse_kg_doc(read_file(file));
    } catch (Error& e) {
      throw Error(e.code(), file.string() + ": " + e.what()).with_path(e.path());
    }
    graphs.push_back(make_graph(g, dataset, doc));
  }
  require_complete(graphs, dataset);
  return graphs;
}

std::vector<NewGoalProposal> read_proposals(const fs::path& path) {
  return proposals_from_doc(parse_new_goals_doc(read_file(path)));
}

std::size_t import_tags(Store& store, const TagTable& table, const std::string& dataset) {
  store.clear_from(dataset, Store::Stage::Talks);
  std::vector<TalkRecord> talks;
  std::vector<TalkAnnotation> annotations;
  for (std::size_t i = 0; i < table.video_ids.size(); ++i) {
    TalkRecord r;
    r.video_id = table.video_ids[i];
    r.title = table.video_ids[i];
    r.usable = true;
    talks.push_back(r);
    TalkAnnotation a;
    a.video_id = r.video_id;
    a.title = r.title;
    a.sdg_types = table.tags[i];
    annotations.push_back(std::move(a));
  }
  store.put_talks(dataset, talks, Origin::Imported);
  store.put_annotations(dataset, annotations, Origin::Imported);
  return annotations.size();
}

std::size_t import_graphs(Store& store, const std::vector<KnowledgeGraph>& graphs, const std::string& dataset) {
  store.clear_from(dataset, Store::Stage::Transcripts);
  for (auto g : graphs) {
    g.dataset = dataset;
    RoundtableTranscript t;
    t.goal = g.goal;
    t.dataset = dataset;
    store.put_transcript(t, TranscriptStatus::Imported);
    store.put_graph(g);
  }
  return graphs.size();
}

std::size_t import_proposals(Store& store, const std::vector<NewGoalProposal>& proposals, const std::string& dataset) {
  store.put_proposals(dataset, proposals);
  return proposals.size();
}

}  // namespace goalforge
