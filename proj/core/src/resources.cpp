#include "goalforge/resources.hpp"

#include <cstdlib>

#include "goalforge/error.hpp"
#include "goalforge/util.hpp"

namespace goalforge {

namespace fs = std::filesystem;

fs::path resource_root() {
  auto usable = [](const fs::path& p) { return fs::exists(p / "prompts") && fs::exists(p / "data" / "catalog"); };
  if (const char* env = std::getenv("GOALFORGE_RESOURCES"); env && *env) {
    if (!usable(env)) throw Error(Errc::IoError, std::string("GOALFORGE_RESOURCES has no prompts/ or data/: ") + env);
    return env;
  }
#ifdef GOALFORGE_SOURCE_DIR
  if (usable(GOALFORGE_SOURCE_DIR)) return GOALFORGE_SOURCE_DIR;
#endif
#ifdef GOALFORGE_INSTALL_DATADIR
  if (usable(GOALFORGE_INSTALL_DATADIR)) return GOALFORGE_INSTALL_DATADIR;
#endif
  throw Error(Errc::IoError, "cannot locate prompts and data; set GOALFORGE_RESOURCES");
}

Resources Resources::load(const fs::path& root) {
  return {root, PromptLibrary::load(root / "prompts"), Catalog::load_directory(root / "data" / "catalog"),
          read_file(root / "data" / "ontology_guide.txt")};
}

}  // namespace goalforge
