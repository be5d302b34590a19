#include "tokaudit/hub_import.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "tokaudit/error.hpp"

namespace tokaudit {

using json = nlohmann::json;

Vocabulary import_hub_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("tokenizer file is not valid JSON: ") + e.what());
    }
    if (!j.contains("model") || !j["model"].is_object()) {
        throw UnsupportedFormatError("tokenizer file has no model section");
    }
    const json& model = j["model"];
    const std::string type = model.value("type", "BPE");
    if (type != "BPE") {
        throw UnsupportedFormatError("model type \"" + type +
                                     "\" has no merge list and is not supported");
    }
    if (!model.contains("merges")) {
        throw UnsupportedFormatError("model has no merge list");
    }
    if (model.value("byte_fallback", false)) {
        throw UnsupportedFormatError(
            "sentencepiece-style byte_fallback vocabularies are not supported; only "
            "byte-level merge-list tokenizers are");
    }
    if (!model.contains("vocab") || !model["vocab"].is_object()) {
        throw UnsupportedFormatError("model has no vocab map");
    }

    std::unordered_map<std::string, int> token_to_id;
    token_to_id.reserve(model["vocab"].size());
    for (const auto& [token, id] : model["vocab"].items()) {
        if (!id.is_number_integer()) {
            throw ValidationError("vocab entry \"" + token + "\" has a non-integer id");
        }
        token_to_id.emplace(token, id.get<int>());
    }

    std::vector<MergeRule> merges;
    merges.reserve(model["merges"].size());
    int rank = 0;
    for (const auto& m : model["merges"]) {
        std::string left;
        std::string right;
        if (m.is_string()) {
            const std::string s = m.get<std::string>();
            const auto sp = s.find(' ');
            if (sp == std::string::npos) {
                throw ValidationError("merge entry \"" + s + "\" is not a \"left right\" pair");
            }
            left = s.substr(0, sp);
            right = s.substr(sp + 1);
        } else if (m.is_array() && m.size() == 2) {
            left = m[0].get<std::string>();
            right = m[1].get<std::string>();
        } else {
            throw ValidationError("merge entries must be strings or [left, right] pairs");
        }
        merges.push_back({std::move(left), std::move(right), rank++});
    }

    // Hub tokenizer files occasionally keep added/special tokens outside the
    // model vocab; they are ordinary tokens here (no special handling).
    if (j.contains("added_tokens") && j["added_tokens"].is_array()) {
        for (const auto& t : j["added_tokens"]) {
            if (t.contains("content") && t.contains("id")) {
                token_to_id.emplace(t["content"].get<std::string>(), t["id"].get<int>());
            }
        }
    }

    std::vector<std::string> base;
    base.reserve(256);
    for (int b = 0; b < 256; ++b) {
        base.push_back(byte_to_proxy(static_cast<std::uint8_t>(b)));
    }

    std::string note = "imported hub tokenizer; pre-tokenizer approximated by "
                       "whitespace-keep-leading-space";
    if (j.contains("pre_tokenizer") && j["pre_tokenizer"].is_object() &&
        j["pre_tokenizer"].contains("type")) {
        note += " (upstream type: " + j["pre_tokenizer"]["type"].get<std::string>() + ")";
    }

    return Vocabulary(SymbolLevel::Byte, std::move(base), std::move(merges),
                      std::move(token_to_id),
                      PreTokenRules{PreTokenMode::WhitespaceKeepLeadingSpace, false},
                      std::move(note));
}

Vocabulary import_hub_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open tokenizer file " + path.string());
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return import_hub_json(text);
}

}  // namespace tokaudit
