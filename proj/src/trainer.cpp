#include "tokaudit/trainer.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "tokaudit/error.hpp"

namespace tokaudit {

namespace {

constexpr std::int64_t kMinPairCount = 2;  // merging singleton pairs is meaningless

std::uint64_t pack_pair(int left, int right) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(left)) << 32) |
           static_cast<std::uint32_t>(right);
}

struct Word {
    std::vector<int> syms;
    std::int64_t count;
};

// Replaces every adjacent (left, right) occurrence left to right.
void merge_in_place(std::vector<int>& syms, int left, int right, int merged) {
    std::size_t w = 0;
    for (std::size_t i = 0; i < syms.size();) {
        if (i + 1 < syms.size() && syms[i] == left && syms[i + 1] == right) {
            syms[w++] = merged;
            i += 2;
        } else {
            syms[w++] = syms[i++];
        }
    }
    syms.resize(w);
}

bool contains_pair(const std::vector<int>& syms, int left, int right) {
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        if (syms[i] == left && syms[i + 1] == right) {
            return true;
        }
    }
    return false;
}

struct Candidate {
    std::int64_t count;
    int left;
    int right;
};

// Highest count first, then lexicographically smallest (left, right) strings.
struct CandidateOrder {
    const std::vector<std::string>* names;

    bool operator()(const Candidate& a, const Candidate& b) const {
        if (a.count != b.count) {
            return a.count > b.count;
        }
        const std::string& al = (*names)[a.left];
        const std::string& bl = (*names)[b.left];
        if (al != bl) {
            return al < bl;
        }
        return (*names)[a.right] < (*names)[b.right];
    }
};

}  // namespace

Vocabulary train(std::span<const std::string> documents,
                 std::size_t target_size,
                 const PreTokenRules& rules) {
    if (documents.empty()) {
        throw ValidationError("training corpus is empty");
    }

    // Pieces are counted once; the trainer works on the unique-piece table.
    // std::map keeps every downstream structure independent of input order.
    std::map<std::string, std::int64_t> piece_counts;
    for (const std::string& doc : documents) {
        const std::string normalized = normalize_text(doc, rules);
        for (const PieceSpan& span : pretokenize_spans(normalized, rules)) {
            piece_counts[normalized.substr(span.offset, span.length)] += 1;
        }
    }
    if (piece_counts.empty()) {
        throw ValidationError("training corpus is empty");
    }

    std::set<std::string> base_symbols;
    for (const auto& [piece, count] : piece_counts) {
        for (std::string& sym : utf8_scalars(piece)) {
            base_symbols.insert(std::move(sym));
        }
    }
    if (target_size < base_symbols.size()) {
        throw ValidationError("target size " + std::to_string(target_size) +
                              " is below the observed base alphabet size " +
                              std::to_string(base_symbols.size()));
    }

    std::vector<std::string> sym_names;
    std::unordered_map<std::string, int> sym_ids;
    const auto intern = [&](const std::string& s) {
        const auto it = sym_ids.find(s);
        if (it != sym_ids.end()) {
            return it->second;
        }
        const int id = static_cast<int>(sym_names.size());
        sym_names.push_back(s);
        sym_ids.emplace(s, id);
        return id;
    };
    for (const std::string& sym : base_symbols) {
        intern(sym);
    }

    std::vector<Word> words;
    words.reserve(piece_counts.size());
    for (const auto& [piece, count] : piece_counts) {
        Word w;
        w.count = count;
        for (const std::string& sym : utf8_scalars(piece)) {
            w.syms.push_back(sym_ids.at(sym));
        }
        words.push_back(std::move(w));
    }

    std::unordered_map<std::uint64_t, std::int64_t> pair_counts;
    std::unordered_map<std::uint64_t, std::unordered_set<int>> pair_words;
    for (std::size_t w = 0; w < words.size(); ++w) {
        const Word& word = words[w];
        for (std::size_t i = 0; i + 1 < word.syms.size(); ++i) {
            const std::uint64_t key = pack_pair(word.syms[i], word.syms[i + 1]);
            pair_counts[key] += word.count;
            pair_words[key].insert(static_cast<int>(w));
        }
    }

    std::set<Candidate, CandidateOrder> active(CandidateOrder{&sym_names});
    for (const auto& [key, count] : pair_counts) {
        active.insert({count, static_cast<int>(key >> 32), static_cast<int>(key & 0xffffffff)});
    }

    std::vector<MergeRule> merges;
    std::unordered_set<std::string> vocab_tokens(sym_names.begin(), sym_names.end());

    while (vocab_tokens.size() < target_size && !active.empty()) {
        const Candidate best = *active.begin();
        if (best.count < kMinPairCount) {
            break;
        }
        const std::string merged_str = sym_names[best.left] + sym_names[best.right];
        merges.push_back({sym_names[best.left], sym_names[best.right],
                          static_cast<int>(merges.size())});
        vocab_tokens.insert(merged_str);
        const int merged_sym = intern(merged_str);
        const std::uint64_t best_key = pack_pair(best.left, best.right);

        // Delta updates are plain integer sums, so the word processing order
        // cannot affect the resulting counts.
        std::unordered_map<std::uint64_t, std::int64_t> delta;
        const std::unordered_set<int> affected = pair_words[best_key];
        for (const int w : affected) {
            Word& word = words[w];
            if (!contains_pair(word.syms, best.left, best.right)) {
                continue;  // stale membership from an earlier merge
            }
            for (std::size_t i = 0; i + 1 < word.syms.size(); ++i) {
                delta[pack_pair(word.syms[i], word.syms[i + 1])] -= word.count;
            }
            merge_in_place(word.syms, best.left, best.right, merged_sym);
            for (std::size_t i = 0; i + 1 < word.syms.size(); ++i) {
                const std::uint64_t key = pack_pair(word.syms[i], word.syms[i + 1]);
                delta[key] += word.count;
                pair_words[key].insert(w);
            }
        }
        for (const auto& [key, d] : delta) {
            if (d == 0) {
                continue;
            }
            const auto it = pair_counts.find(key);
            const std::int64_t old_count = it == pair_counts.end() ? 0 : it->second;
            const std::int64_t new_count = old_count + d;
            if (old_count > 0) {
                active.erase({old_count, static_cast<int>(key >> 32),
                              static_cast<int>(key & 0xffffffff)});
            }
            if (new_count > 0) {
                active.insert({new_count, static_cast<int>(key >> 32),
                               static_cast<int>(key & 0xffffffff)});
                pair_counts[key] = new_count;
            } else {
                pair_counts.erase(key);
            }
        }
        pair_words.erase(best_key);
    }

    std::unordered_map<std::string, int> token_to_id;
    token_to_id.reserve(vocab_tokens.size());
    std::vector<std::string> base_vec(base_symbols.begin(), base_symbols.end());
    int next_id = 0;
    for (const std::string& sym : base_vec) {
        token_to_id.emplace(sym, next_id++);
    }
    for (const MergeRule& m : merges) {
        // A merge product can collide with an existing token; keep the first id.
        if (token_to_id.emplace(m.left + m.right, next_id).second) {
            ++next_id;
        }
    }

    return Vocabulary(SymbolLevel::Scalar, std::move(base_vec), std::move(merges),
                      std::move(token_to_id), rules);
}

}  // namespace tokaudit
