#pragma once

#include <filesystem>
#include <string>

#include "tokaudit/vocabulary.hpp"

namespace tokaudit {

inline constexpr int kVocabFormatVersion = 1;

// Native vocabulary file: JSON with format_version, base_alphabet, merges
// (rank = list index), vocab map, pretoken rules and symbol level.
void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path);
Vocabulary load_vocabulary(const std::filesystem::path& path);

std::string vocabulary_to_json(const Vocabulary& vocab);
Vocabulary vocabulary_from_json(const std::string& text);

}  // namespace tokaudit
