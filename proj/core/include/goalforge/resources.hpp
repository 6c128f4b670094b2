#pragma once

#include <filesystem>
#include <string>

#include "goalforge/catalog.hpp"
#include "goalforge/prompt.hpp"

namespace goalforge {

// Directory holding prompts/ and data/: $GOALFORGE_RESOURCES when set, else
// the source tree this library was built from, else the installed share dir.
std::filesystem::path resource_root();

struct Resources {
  std::filesystem::path root;
  PromptLibrary prompts;
  Catalog catalog;
  std::string ontology_guide;

  std::filesystem::path mock_library() const { return root / "data" / "mock" / "library.json"; }
  static Resources load(const std::filesystem::path& root = resource_root());
};

}  // namespace goalforge
