#include "tokaudit/vocab_io.hpp"

#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "tokaudit/error.hpp"

namespace tokaudit {

using ordered_json = nlohmann::ordered_json;

std::string vocabulary_to_json(const Vocabulary& vocab) {
    ordered_json j;
    j["format_version"] = kVocabFormatVersion;
    j["symbol_level"] = vocab.level() == SymbolLevel::Byte ? "byte" : "scalar";
    j["base_alphabet"] = vocab.base_alphabet();
    ordered_json merges = ordered_json::array();
    for (const MergeRule& m : vocab.merges()) {
        merges.push_back(ordered_json::array({m.left, m.right}));
    }
    j["merges"] = std::move(merges);
    ordered_json vocab_map = ordered_json::object();
    for (const auto& [id, token] : vocab.id_to_token()) {
        vocab_map[token] = id;
    }
    j["vocab"] = std::move(vocab_map);
    j["pretoken"] = {{"mode", pretoken_mode_name(vocab.pretoken().mode)},
                     {"lowercase", vocab.pretoken().lowercase}};
    if (!vocab.note().empty()) {
        j["note"] = vocab.note();
    }
    return j.dump(2) + "\n";
}

Vocabulary vocabulary_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("vocabulary file is not valid JSON: ") + e.what());
    }
    try {
        if (!j.contains("format_version") || !j["format_version"].is_number_integer()) {
            throw ValidationError("vocabulary file is missing format_version");
        }
        const int version = j["format_version"].get<int>();
        if (version != kVocabFormatVersion) {
            throw ValidationError("unsupported vocabulary format_version " +
                                  std::to_string(version) + " (expected " +
                                  std::to_string(kVocabFormatVersion) + ")");
        }
        const SymbolLevel level =
            j.value("symbol_level", "scalar") == std::string("byte") ? SymbolLevel::Byte
                                                                     : SymbolLevel::Scalar;
        std::vector<std::string> base = j.at("base_alphabet").get<std::vector<std::string>>();
        std::vector<MergeRule> merges;
        int rank = 0;
        for (const auto& m : j.at("merges")) {
            if (!m.is_array() || m.size() != 2) {
                throw ValidationError("merge entries must be [left, right] pairs");
            }
            merges.push_back({m[0].get<std::string>(), m[1].get<std::string>(), rank++});
        }
        std::unordered_map<std::string, int> token_to_id;
        for (const auto& [token, id] : j.at("vocab").items()) {
            token_to_id.emplace(token, id.get<int>());
        }
        PreTokenRules rules;
        if (j.contains("pretoken")) {
            rules.mode = pretoken_mode_from_name(j["pretoken"].value("mode", "none"));
            rules.lowercase = j["pretoken"].value("lowercase", false);
        }
        return Vocabulary(level, std::move(base), std::move(merges), std::move(token_to_id),
                          rules, j.value("note", ""));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed vocabulary file: ") + e.what());
    }
}

void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot open " + path.string() + " for writing");
    }
    out << vocabulary_to_json(vocab);
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open vocabulary file " + path.string());
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return vocabulary_from_json(text);
}

}  // namespace tokaudit
