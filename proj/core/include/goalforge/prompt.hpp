#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace goalforge {

enum class TemplateName { Annotate, Roundtable, KgExtract, NewGoals, Corrective };

std::string_view to_string(TemplateName name) noexcept;
// File stem under prompts/ ("annotate", "roundtable", ...).
std::string_view file_stem(TemplateName name) noexcept;

using SlotMap = std::map<std::string, std::string>;

// A prompt resource file holds the instruction text, a line containing only
// "%%", then the payload section that carries the data slots. Slots are
// written {{name}}. The rendered prompt is instruction + "\n\n" + payload.
class PromptTemplate {
 public:
  static PromptTemplate parse(TemplateName name, std::string_view file_contents);
  static PromptTemplate load(TemplateName name, const std::filesystem::path& prompts_dir);

  TemplateName name() const noexcept { return name_; }
  const std::string& instruction() const noexcept { return instruction_; }
  const std::string& payload() const noexcept { return payload_; }
  const std::set<std::string>& slots() const noexcept { return slots_; }
  const std::set<std::string>& instruction_slots() const noexcept { return instruction_slots_; }

  // `values` must name exactly slots(): MissingSlot / UnknownSlot otherwise.
  // Substituted text is never re-scanned for markers.
  std::string render(const SlotMap& values) const;
  // Instruction section only; `values` must name exactly instruction_slots().
  std::string render_instruction(const SlotMap& values) const;

  // Inverse of render(): recovers slot values from a rendered prompt, or
  // nullopt when the literal text does not line up.
  std::optional<SlotMap> match(std::string_view rendered) const;
  // Literal text preceding the first slot; identifies rendered prompts.
  std::string_view literal_prefix() const noexcept;

 private:
  struct Piece {
    bool is_slot = false;
    std::string text;  // literal text or slot name
  };

  static std::vector<Piece> tokenize(std::string_view text);
  static std::string substitute(const std::vector<Piece>& pieces, const std::set<std::string>& slots,
                                const SlotMap& values);

  TemplateName name_ = TemplateName::Annotate;
  std::string instruction_;
  std::string payload_;
  std::vector<Piece> instruction_pieces_;
  std::vector<Piece> all_pieces_;
  std::set<std::string> slots_;
  std::set<std::string> instruction_slots_;
};

class PromptLibrary {
 public:
  static PromptLibrary load(const std::filesystem::path& prompts_dir);

  const PromptTemplate& get(TemplateName name) const;

  // Which template produced `prompt`, judged by its literal prefix.
  std::optional<TemplateName> classify(std::string_view prompt) const;

  // Re-prompt after a rejected reply: the original prompt followed by the
  // rendered corrective template.
  std::string corrective(std::string_view original_prompt, std::string_view problem,
                         std::string_view previous_reply) const;
  // Splits a corrective prompt back into (original prompt, problem, previous reply).
  struct CorrectiveParts {
    std::string original;
    std::string problem;
    std::string previous_reply;
  };
  std::optional<CorrectiveParts> split_corrective(std::string_view prompt) const;

 private:
  std::map<TemplateName, PromptTemplate> templates_;
};

}  // namespace goalforge
