#include "tokaudit/mitigation.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <unordered_set>

#include "tokaudit/error.hpp"
#include "tokaudit/trainer.hpp"

namespace tokaudit {

namespace {

std::map<int, std::uint64_t> id_counts(std::span<const std::string> texts,
                                       const Vocabulary& vocab) {
    std::map<int, std::uint64_t> counts;
    for (const std::string& text : texts) {
        for (const int id : vocab.encode(text).ids) {
            counts[id] += 1;
        }
    }
    return counts;
}

std::vector<GibberishScore> score_and_rank(const std::map<int, std::uint64_t>& secret_counts,
                                           const std::map<int, std::uint64_t>& normal_counts,
                                           const Vocabulary& vocab,
                                           std::size_t top_k,
                                           double epsilon,
                                           const std::unordered_set<int>* candidate_filter) {
    if (epsilon <= 0.0) {
        throw ValidationError("epsilon must be positive");
    }
    std::vector<GibberishScore> scores;
    std::set<int> ids;
    for (const auto& [id, count] : secret_counts) {
        ids.insert(id);
    }
    for (const auto& [id, count] : normal_counts) {
        ids.insert(id);
    }
    for (const int id : ids) {
        if (vocab.is_base_token(id)) {
            continue;
        }
        if (candidate_filter && !candidate_filter->count(id)) {
            continue;
        }
        GibberishScore s;
        s.id = id;
        s.token = *vocab.token_of(id);
        const auto sit = secret_counts.find(id);
        const auto nit = normal_counts.find(id);
        s.freq_secret = sit == secret_counts.end() ? 0 : sit->second;
        s.freq_normal = nit == normal_counts.end() ? 0 : nit->second;
        if (s.freq_secret == 0 && s.freq_normal == 0) {
            continue;
        }
        s.score = (static_cast<double>(s.freq_secret) + epsilon) /
                  (static_cast<double>(s.freq_normal) + epsilon);
        scores.push_back(std::move(s));
    }
    std::sort(scores.begin(), scores.end(), [](const GibberishScore& a, const GibberishScore& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return a.token < b.token;
    });
    if (scores.size() > top_k) {
        scores.resize(top_k);
    }
    return scores;
}

}  // namespace

std::vector<GibberishScore> identify_gibberish(std::span<const std::string> normal_texts,
                                               std::span<const std::string> secret_texts,
                                               const Vocabulary& vocab,
                                               std::size_t top_k,
                                               double epsilon) {
    if (normal_texts.empty() || secret_texts.empty()) {
        throw ValidationError("gibberish identification needs non-empty corpora on both sides");
    }
    if (top_k == 0) {
        return {};
    }
    const auto secret_counts = id_counts(secret_texts, vocab);
    const auto normal_counts = id_counts(normal_texts, vocab);
    return score_and_rank(secret_counts, normal_counts, vocab, top_k, epsilon, nullptr);
}

std::vector<GibberishScore> identify_gibberish(const Corpus& normal_corpus,
                                               const Corpus& secret_corpus,
                                               const Vocabulary& vocab,
                                               std::size_t top_k,
                                               double epsilon) {
    const std::vector<std::string> normal = normal_corpus.texts();
    const std::vector<std::string> secret = secret_corpus.texts();
    return identify_gibberish(normal, secret, vocab, top_k, epsilon);
}

std::vector<GibberishScore> identify_gibberish_vocab_diff(
    std::span<const std::string> normal_texts,
    std::span<const std::string> secret_texts,
    const Vocabulary& vocab,
    std::size_t top_k,
    double epsilon,
    std::size_t trained_size) {
    if (normal_texts.empty() || secret_texts.empty()) {
        throw ValidationError("gibberish identification needs non-empty corpora on both sides");
    }
    if (top_k == 0) {
        return {};
    }
    const std::size_t size = trained_size == 0 ? vocab.size() : trained_size;
    const Vocabulary normal_vocab = train(normal_texts, size, vocab.pretoken());
    const Vocabulary secret_vocab = train(secret_texts, size, vocab.pretoken());

    std::unordered_set<int> candidates;
    for (const auto& [token, id] : secret_vocab.token_to_id()) {
        if (secret_vocab.is_base_token(id) || normal_vocab.id_of(token)) {
            continue;
        }
        if (const auto target_id = vocab.id_of(token)) {
            candidates.insert(*target_id);
        }
    }
    if (candidates.empty()) {
        return {};
    }
    const auto secret_counts = id_counts(secret_texts, vocab);
    const auto normal_counts = id_counts(normal_texts, vocab);
    return score_and_rank(secret_counts, normal_counts, vocab, top_k, epsilon, &candidates);
}

StripSet strip_set_from_scores(const std::vector<GibberishScore>& scores,
                               nlohmann::ordered_json provenance) {
    StripSet strip;
    for (const GibberishScore& s : scores) {
        strip.ids.push_back(s.id);
    }
    std::sort(strip.ids.begin(), strip.ids.end());
    strip.ids.erase(std::unique(strip.ids.begin(), strip.ids.end()), strip.ids.end());
    if (!provenance.is_null()) {
        strip.provenance = std::move(provenance);
    }
    return strip;
}

void save_strip_set(const StripSet& strip, const Vocabulary& vocab,
                    const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    j["ids"] = strip.ids;
    nlohmann::ordered_json tokens = nlohmann::ordered_json::array();
    for (const int id : strip.ids) {
        const std::string* token = vocab.token_of(id);
        tokens.push_back(token ? *token : "");
    }
    j["tokens"] = std::move(tokens);
    j["provenance"] = strip.provenance;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot open " + path.string() + " for writing");
    }
    out << j.dump(2) << "\n";
}

StripSet load_strip_set(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open strip set file " + path.string());
    }
    nlohmann::ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("strip set file is not valid JSON: ") + e.what());
    }
    StripSet strip;
    strip.ids = j.at("ids").get<std::vector<int>>();
    std::sort(strip.ids.begin(), strip.ids.end());
    strip.ids.erase(std::unique(strip.ids.begin(), strip.ids.end()), strip.ids.end());
    if (j.contains("provenance")) {
        strip.provenance = j["provenance"];
    }
    return strip;
}

std::string gibberish_to_csv(const std::vector<GibberishScore>& scores) {
    std::string out = "token,id,freq_secret,freq_normal,score\n";
    for (const GibberishScore& s : scores) {
        out += nlohmann::json(s.token).dump();
        out += ',';
        out += std::to_string(s.id);
        out += ',';
        out += std::to_string(s.freq_secret);
        out += ',';
        out += std::to_string(s.freq_normal);
        out += ',';
        out += nlohmann::json(s.score).dump();
        out += '\n';
    }
    return out;
}

Vocabulary strip_tokens(const Vocabulary& vocab, const StripSet& strip) {
    std::unordered_set<std::string> removed;
    for (const int id : strip.ids) {
        const std::string* token = vocab.token_of(id);
        if (token == nullptr) {
            throw ValidationError("strip set id " + std::to_string(id) +
                                  " does not exist in the vocabulary");
        }
        if (vocab.is_base_token(id)) {
            throw ValidationError("cannot strip base-alphabet token \"" + *token +
                                  "\" (id " + std::to_string(id) + "); it would break encodability");
        }
        removed.insert(*token);
    }

    // One ascending-rank pass settles the cascade: a merge whose side or
    // product is removed is dropped and its product joins the removed set.
    std::vector<MergeRule> surviving;
    for (const MergeRule& m : vocab.merges()) {
        const std::string product = m.left + m.right;
        if (removed.count(m.left) || removed.count(m.right) || removed.count(product)) {
            removed.insert(product);
            continue;
        }
        surviving.push_back(m);
    }
    for (std::size_t i = 0; i < surviving.size(); ++i) {
        surviving[i].rank = static_cast<int>(i);
    }

    std::unordered_map<std::string, int> token_to_id;
    token_to_id.reserve(vocab.token_to_id().size());
    for (const auto& [token, id] : vocab.token_to_id()) {
        if (!removed.count(token)) {
            token_to_id.emplace(token, id);
        }
    }

    return Vocabulary(vocab.level(), vocab.base_alphabet(), std::move(surviving),
                      std::move(token_to_id), vocab.pretoken(), vocab.note());
}

GuardedEncoding guard_encode(const Vocabulary& vocab,
                             std::string_view text,
                             const std::vector<SecretPattern>& patterns) {
    // Collect per-pattern leftmost non-overlapping matches, then resolve
    // overlaps across patterns first-come by offset.
    struct Match {
        std::size_t offset;
        std::size_t length;
        std::size_t pattern_index;
    };
    std::vector<Match> matches;
    for (std::size_t pi = 0; pi < patterns.size(); ++pi) {
        const PatternMatcher matcher(patterns[pi]);
        std::size_t pos = 0;
        while (pos < text.size()) {
            const std::size_t len = matcher.match_at(text, pos);
            if (len > 0) {
                matches.push_back({pos, len, pi});
                pos += len;
            } else {
                ++pos;
            }
        }
    }
    std::sort(matches.begin(), matches.end(), [](const Match& a, const Match& b) {
        if (a.offset != b.offset) {
            return a.offset < b.offset;
        }
        return a.pattern_index < b.pattern_index;
    });

    GuardedEncoding out;
    std::size_t cursor = 0;
    const auto encode_gap = [&](std::size_t begin, std::size_t end) {
        if (end > begin) {
            const TokenSequence seq = vocab.encode(text.substr(begin, end - begin));
            out.ids.insert(out.ids.end(), seq.ids.begin(), seq.ids.end());
        }
    };
    for (const Match& m : matches) {
        if (m.offset < cursor) {
            continue;  // overlapped by an earlier accepted match
        }
        encode_gap(cursor, m.offset);
        const std::string_view span = text.substr(m.offset, m.length);
        std::size_t pos = 0;
        while (pos < span.size()) {
            std::uint32_t cp = 0;
            const std::size_t n = utf8_decode(span, pos, cp);
            const std::string ch(span.substr(pos, n));
            const std::string lookup =
                vocab.level() == SymbolLevel::Byte ? bytes_to_proxy_string(ch) : ch;
            if (const auto id = vocab.id_of(lookup)) {
                out.ids.push_back(*id);
            } else if (vocab.level() == SymbolLevel::Byte) {
                for (const char byte : ch) {
                    const auto bid = vocab.id_of(byte_to_proxy(static_cast<std::uint8_t>(byte)));
                    if (!bid) {
                        throw EncodeError("character in guarded span has no byte token",
                                          m.offset + pos);
                    }
                    out.ids.push_back(*bid);
                }
            } else {
                throw EncodeError("character \"" + ch +
                                      "\" in guarded span has no single-symbol token and byte "
                                      "fallback is disabled",
                                  m.offset + pos);
            }
            pos += n;
        }
        out.spans.push_back({m.offset, m.length, patterns[m.pattern_index].name});
        cursor = m.offset + m.length;
    }
    encode_gap(cursor, text.size());
    return out;
}

}  // namespace tokaudit
