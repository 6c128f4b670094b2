#include "goalforge/prompt.hpp"

#include "goalforge/error.hpp"
#include "goalforge/util.hpp"

namespace goalforge {

namespace {

constexpr std::string_view kSeparator = "\n%%\n";
constexpr std::string_view kJoin = "\n\n";

}  // namespace

std::string_view to_string(TemplateName name) noexcept {
  switch (name) {
    case TemplateName::Annotate: return "Annotate";
    case TemplateName::Roundtable: return "Roundtable";
    case TemplateName::KgExtract: return "KgExtract";
    case TemplateName::NewGoals: return "NewGoals";
    case TemplateName::Corrective: return "Corrective";
  }
  return "Unknown";
}

std::string_view file_stem(TemplateName name) noexcept {
  switch (name) {
    case TemplateName::Annotate: return "annotate";
    case TemplateName::Roundtable: return "roundtable";
    case TemplateName::KgExtract: return "kg_extract";
    case TemplateName::NewGoals: return "new_goals";
    case TemplateName::Corrective: return "corrective";
  }
  return "";
}

std::vector<PromptTemplate::Piece> PromptTemplate::tokenize(std::string_view text) {
  std::vector<Piece> pieces;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto open = text.find("{{", pos);
    if (open == std::string_view::npos) {
      pieces.push_back({false, std::string(text.substr(pos))});
      break;
    }
    const auto close = text.find("}}", open + 2);
    if (close == std::string_view::npos) {
      throw Error(Errc::ParseError, "unterminated slot marker at offset " + std::to_string(open));
    }
    if (open > pos) pieces.push_back({false, std::string(text.substr(pos, open - pos))});
    std::string slot(text.substr(open + 2, close - open - 2));
    if (slot.empty() || trim(slot) != slot) {
      throw Error(Errc::ParseError, "malformed slot name '" + slot + "'");
    }
    if (!pieces.empty() && pieces.back().is_slot) {
      throw Error(Errc::ParseError, "slots '" + pieces.back().text + "' and '" + slot + "' are adjacent");
    }
    pieces.push_back({true, std::move(slot)});
    pos = close + 2;
  }
  return pieces;
}

PromptTemplate PromptTemplate::parse(TemplateName name, std::string_view file_contents) {
  const auto split_at = file_contents.find(kSeparator);
  if (split_at == std::string_view::npos) {
    throw Error(Errc::ParseError, std::string(file_stem(name)) + ".prompt lacks the '%%' separator line");
  }
  PromptTemplate t;
  t.name_ = name;
  t.instruction_ = std::string(file_contents.substr(0, split_at));
  std::string_view payload = file_contents.substr(split_at + kSeparator.size());
  if (!payload.empty() && payload.back() == '\n') payload.remove_suffix(1);
  t.payload_ = std::string(payload);

  t.instruction_pieces_ = tokenize(t.instruction_);
  t.all_pieces_ = tokenize(t.instruction_ + std::string(kJoin) + t.payload_);
  for (const auto& p : t.instruction_pieces_) {
    if (p.is_slot) t.instruction_slots_.insert(p.text);
  }
  for (const auto& p : t.all_pieces_) {
    if (p.is_slot) t.slots_.insert(p.text);
  }
  return t;
}

PromptTemplate PromptTemplate::load(TemplateName name, const std::filesystem::path& prompts_dir) {
  const auto path = prompts_dir / (std::string(file_stem(name)) + ".prompt");
  return parse(name, read_file(path));
}

std::string PromptTemplate::substitute(const std::vector<Piece>& pieces, const std::set<std::string>& slots,
                                       const SlotMap& values) {
  for (const auto& slot : slots) {
    if (!values.contains(slot)) {
      throw Error(Errc::MissingSlot, "no value for slot '" + slot + "'").with_path(slot);
    }
  }
  for (const auto& [key, _] : values) {
    if (!slots.contains(key)) throw Error(Errc::UnknownSlot, "template has no slot '" + key + "'").with_path(key);
  }
  std::string out;
  for (const auto& p : pieces) out += p.is_slot ? values.at(p.text) : p.text;
  return out;
}

std::string PromptTemplate::render(const SlotMap& values) const { return substitute(all_pieces_, slots_, values); }

std::string PromptTemplate::render_instruction(const SlotMap& values) const {
  return substitute(instruction_pieces_, instruction_slots_, values);
}

std::string_view PromptTemplate::literal_prefix() const noexcept {
  if (all_pieces_.empty() || all_pieces_.front().is_slot) return {};
  return all_pieces_.front().text;
}

std::optional<SlotMap> PromptTemplate::match(std::string_view rendered) const {
  SlotMap values;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < all_pieces_.size(); ++i) {
    const Piece& piece = all_pieces_[i];
    if (!piece.is_slot) {
      if (rendered.substr(pos, piece.text.size()) != piece.text) return std::nullopt;
      pos += piece.text.size();
      continue;
    }
    std::size_t end = rendered.size();
    if (i + 1 < all_pieces_.size()) {
      const std::string& next = all_pieces_[i + 1].text;
      if (i + 2 == all_pieces_.size()) {
        if (rendered.size() < pos + next.size() || rendered.substr(rendered.size() - next.size()) != next) {
          return std::nullopt;
        }
        end = rendered.size() - next.size();
      } else {
        end = rendered.find(next, pos);
        if (end == std::string_view::npos) return std::nullopt;
      }
    }
    std::string value(rendered.substr(pos, end - pos));
    auto [it, inserted] = values.emplace(piece.text, value);
    if (!inserted && it->second != value) return std::nullopt;
    pos = end;
  }
  if (pos != rendered.size()) return std::nullopt;
  return values;
}

PromptLibrary PromptLibrary::load(const std::filesystem::path& prompts_dir) {
  PromptLibrary lib;
  for (auto name : {TemplateName::Annotate, TemplateName::Roundtable, TemplateName::KgExtract, TemplateName::NewGoals,
                    TemplateName::Corrective}) {
    lib.templates_.emplace(name, PromptTemplate::load(name, prompts_dir));
  }
  return lib;
}

const PromptTemplate& PromptLibrary::get(TemplateName name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) throw Error(Errc::InvalidArgument, "template not loaded: " + std::string(to_string(name)));
  return it->second;
}

std::optional<TemplateName> PromptLibrary::classify(std::string_view prompt) const {
  for (const auto& [name, t] : templates_) {
    if (name == TemplateName::Corrective) continue;
    const auto prefix = t.literal_prefix();
    if (!prefix.empty() && prompt.substr(0, prefix.size()) == prefix) return name;
  }
  return std::nullopt;
}

std::string PromptLibrary::corrective(std::string_view original_prompt, std::string_view problem,
                                      std::string_view previous_reply) const {
  return std::string(original_prompt) + std::string(kJoin) +
         get(TemplateName::Corrective)
             .render({{"problem", std::string(problem)}, {"previous_reply", std::string(previous_reply)}});
}

std::optional<PromptLibrary::CorrectiveParts> PromptLibrary::split_corrective(std::string_view prompt) const {
  const auto& t = get(TemplateName::Corrective);
  const std::string marker = std::string(kJoin) + std::string(t.literal_prefix());
  const auto at = prompt.find(marker);
  if (at == std::string_view::npos) return std::nullopt;
  auto values = t.match(prompt.substr(at + kJoin.size()));
  if (!values) return std::nullopt;
  return CorrectiveParts{std::string(prompt.substr(0, at)), (*values)["problem"], (*values)["previous_reply"]};
}

}  // namespace goalforge
