#pragma once

#include <filesystem>

#include "tokaudit/vocabulary.hpp"

namespace tokaudit {

// Imports a model-hub tokenizer definition (the common tokenizer.json layout:
// a top-level "model" object holding a token->id "vocab" map and a ranked
// "merges" list). The result is a byte-level vocabulary; the upstream
// pre-tokenizer is approximated by whitespace splitting with a kept leading
// space, and that approximation is recorded in the vocabulary note.
Vocabulary import_hub_file(const std::filesystem::path& path);

Vocabulary import_hub_json(const std::string& text);

}  // namespace tokaudit
