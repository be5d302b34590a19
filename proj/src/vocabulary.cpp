#include "tokaudit/vocabulary.hpp"

#include <algorithm>
#include <queue>
#include <unordered_set>

#include "tokaudit/error.hpp"

namespace tokaudit {

namespace {

std::uint64_t pack_pair(int left, int right) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(left)) << 32) |
           static_cast<std::uint32_t>(right);
}

struct ProxyTables {
    std::array<std::string, 256> byte_to_proxy;
    std::unordered_map<std::uint32_t, std::uint8_t> proxy_to_byte;

    ProxyTables() {
        const auto visible = [](int b) {
            return (b >= 33 && b <= 126) || (b >= 161 && b <= 172) || (b >= 174 && b <= 255);
        };
        int shifted = 0;
        for (int b = 0; b < 256; ++b) {
            const std::uint32_t cp = visible(b) ? static_cast<std::uint32_t>(b)
                                                : static_cast<std::uint32_t>(256 + shifted++);
            byte_to_proxy[b] = utf8_encode(cp);
            proxy_to_byte.emplace(cp, static_cast<std::uint8_t>(b));
        }
    }
};

const ProxyTables& proxy_tables() {
    static const ProxyTables tables;
    return tables;
}

}  // namespace

const std::string& byte_to_proxy(std::uint8_t b) {
    return proxy_tables().byte_to_proxy[b];
}

std::optional<std::uint8_t> proxy_to_byte(std::uint32_t cp) {
    const auto& map = proxy_tables().proxy_to_byte;
    const auto it = map.find(cp);
    if (it == map.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::string bytes_to_proxy_string(std::string_view bytes) {
    std::string out;
    out.reserve(bytes.size());
    for (const char c : bytes) {
        out += byte_to_proxy(static_cast<std::uint8_t>(c));
    }
    return out;
}

std::string proxy_string_to_bytes(std::string_view proxy) {
    std::string out;
    out.reserve(proxy.size());
    std::size_t pos = 0;
    while (pos < proxy.size()) {
        std::uint32_t cp = 0;
        const std::size_t n = utf8_decode(proxy, pos, cp);
        if (const auto b = proxy_to_byte(cp)) {
            out.push_back(static_cast<char>(*b));
        } else {
            out += proxy.substr(pos, n);
        }
        pos += n;
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (const char c : data) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

Vocabulary::Vocabulary(SymbolLevel level,
                       std::vector<std::string> base_alphabet,
                       std::vector<MergeRule> merges,
                       std::unordered_map<std::string, int> token_to_id,
                       PreTokenRules pretoken,
                       std::string note)
    : level_(level),
      base_alphabet_(std::move(base_alphabet)),
      merges_(std::move(merges)),
      token_to_id_(std::move(token_to_id)),
      pretoken_(pretoken),
      note_(std::move(note)) {
    for (const auto& [token, id] : token_to_id_) {
        const auto [it, inserted] = id_to_token_.emplace(id, token);
        if (!inserted) {
            throw ValidationError("duplicate token id " + std::to_string(id) + " for \"" + token +
                                  "\" and \"" + it->second + "\"");
        }
    }
    validate();
    build_tables();
    fingerprint_ = compute_fingerprint();
}

void Vocabulary::validate() const {
    if (base_alphabet_.empty()) {
        throw ValidationError("vocabulary has an empty base alphabet");
    }
    std::unordered_set<std::string> base_set;
    for (const std::string& sym : base_alphabet_) {
        if (sym.empty()) {
            throw ValidationError("empty base alphabet symbol");
        }
        if (utf8_length(sym) != 1) {
            throw ValidationError("base alphabet symbol \"" + sym + "\" is not a single scalar");
        }
        if (!base_set.insert(sym).second) {
            throw ValidationError("duplicate base alphabet symbol \"" + sym + "\"");
        }
    }
    int prev_rank = -1;
    for (const MergeRule& m : merges_) {
        if (m.left.empty() || m.right.empty()) {
            throw ValidationError("merge rule with empty side at rank " + std::to_string(m.rank));
        }
        if (m.rank <= prev_rank) {
            throw ValidationError("merge ranks are not strictly increasing at rank " +
                                  std::to_string(m.rank));
        }
        prev_rank = m.rank;
        if (!token_to_id_.count(m.left + m.right)) {
            throw ValidationError("merge product \"" + m.left + m.right +
                                  "\" is missing from the vocabulary");
        }
    }
    for (const auto& [token, id] : token_to_id_) {
        if (token.empty()) {
            throw ValidationError("empty token string");
        }
        if (id < 0) {
            throw ValidationError("negative token id for \"" + token + "\"");
        }
        std::size_t pos = 0;
        while (pos < token.size()) {
            std::uint32_t cp = 0;
            const std::size_t n = utf8_decode(token, pos, cp);
            if (!base_set.count(std::string(token.substr(pos, n)))) {
                throw ValidationError("token \"" + token +
                                      "\" does not decompose into base alphabet symbols");
            }
            pos += n;
        }
    }
}

void Vocabulary::build_tables() {
    merge_map_.reserve(merges_.size() * 2);
    for (const MergeRule& m : merges_) {
        const auto left = token_to_id_.find(m.left);
        const auto right = token_to_id_.find(m.right);
        const auto product = token_to_id_.find(m.left + m.right);
        if (left == token_to_id_.end() || right == token_to_id_.end()) {
            // A merge whose side is not itself a token can never apply.
            continue;
        }
        merge_map_.emplace(pack_pair(left->second, right->second),
                           MergeTarget{m.rank, product->second});
    }
    if (level_ == SymbolLevel::Byte) {
        for (int b = 0; b < 256; ++b) {
            const auto it = token_to_id_.find(byte_to_proxy(static_cast<std::uint8_t>(b)));
            byte_token_ids_[b] = it == token_to_id_.end() ? -1 : it->second;
        }
    } else {
        byte_token_ids_.fill(-1);
    }
}

std::string Vocabulary::compute_fingerprint() const {
    std::uint64_t h = fnv1a64(level_ == SymbolLevel::Byte ? "byte" : "scalar");
    const auto mix = [&h](std::string_view part) {
        h = fnv1a64(part, h);
        h = fnv1a64("\x1f", h);
    };
    for (const std::string& sym : base_alphabet_) {
        mix(sym);
    }
    mix("|merges|");
    for (const MergeRule& m : merges_) {
        mix(m.left);
        mix(m.right);
        mix(std::to_string(m.rank));
    }
    mix("|vocab|");
    for (const auto& [id, token] : id_to_token_) {
        mix(std::to_string(id));
        mix(token);
    }
    mix("|pretoken|");
    mix(pretoken_mode_name(pretoken_.mode));
    mix(pretoken_.lowercase ? "lower" : "keep");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

std::optional<int> Vocabulary::id_of(std::string_view token) const {
    const auto it = token_to_id_.find(std::string(token));
    if (it == token_to_id_.end()) {
        return std::nullopt;
    }
    return it->second;
}

const std::string* Vocabulary::token_of(int id) const {
    const auto it = id_to_token_.find(id);
    return it == id_to_token_.end() ? nullptr : &it->second;
}

bool Vocabulary::is_base_token(int id) const {
    const std::string* token = token_of(id);
    if (token == nullptr) {
        return false;
    }
    return utf8_length(*token) == 1 &&
           std::find(base_alphabet_.begin(), base_alphabet_.end(), *token) != base_alphabet_.end();
}

std::vector<int> Vocabulary::initial_ids(std::string_view piece, std::size_t text_offset) const {
    std::vector<int> ids;
    ids.reserve(piece.size());
    if (level_ == SymbolLevel::Byte) {
        for (std::size_t i = 0; i < piece.size(); ++i) {
            const int id = byte_token_ids_[static_cast<std::uint8_t>(piece[i])];
            if (id < 0) {
                throw EncodeError("byte 0x" + std::to_string(static_cast<unsigned>(
                                      static_cast<std::uint8_t>(piece[i]))) +
                                      " has no token in this vocabulary",
                                  text_offset + i);
            }
            ids.push_back(id);
        }
        return ids;
    }
    std::size_t pos = 0;
    while (pos < piece.size()) {
        std::uint32_t cp = 0;
        const std::size_t n = utf8_decode(piece, pos, cp);
        const auto it = token_to_id_.find(std::string(piece.substr(pos, n)));
        if (it == token_to_id_.end()) {
            throw EncodeError("symbol \"" + std::string(piece.substr(pos, n)) +
                                  "\" is outside the base alphabet and byte fallback is disabled",
                              text_offset + pos);
        }
        ids.push_back(it->second);
        pos += n;
    }
    return ids;
}

void Vocabulary::merge_ids(std::vector<int>& ids) const {
    if (ids.size() < 2 || merge_map_.empty()) {
        return;
    }
    struct Node {
        int token;
        int prev;
        int next;
        bool alive;
    };
    std::vector<Node> nodes(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        nodes[i] = {ids[i], static_cast<int>(i) - 1,
                    i + 1 < ids.size() ? static_cast<int>(i) + 1 : -1, true};
    }

    // Lowest rank first; leftmost first among equal ranks, so a higher-rank
    // merge is never applied while a lower-rank one is applicable.
    struct Candidate {
        int rank;
        int pos;
        int left_token;
        int right_token;
    };
    const auto later = [](const Candidate& a, const Candidate& b) {
        return a.rank != b.rank ? a.rank > b.rank : a.pos > b.pos;
    };
    std::priority_queue<Candidate, std::vector<Candidate>, decltype(later)> queue(later);

    const auto push_pair = [&](int pos) {
        const Node& left = nodes[pos];
        if (left.next < 0) {
            return;
        }
        const auto it = merge_map_.find(pack_pair(left.token, nodes[left.next].token));
        if (it != merge_map_.end()) {
            queue.push({it->second.rank, pos, left.token, nodes[left.next].token});
        }
    };
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        push_pair(static_cast<int>(i));
    }

    while (!queue.empty()) {
        const Candidate c = queue.top();
        queue.pop();
        Node& left = nodes[c.pos];
        if (!left.alive || left.next < 0 || left.token != c.left_token ||
            nodes[left.next].token != c.right_token) {
            continue;  // stale entry
        }
        const auto it = merge_map_.find(pack_pair(left.token, nodes[left.next].token));
        left.token = it->second.merged_id;
        Node& right = nodes[left.next];
        right.alive = false;
        left.next = right.next;
        if (left.next >= 0) {
            nodes[left.next].prev = c.pos;
        }
        if (left.prev >= 0) {
            push_pair(left.prev);
        }
        push_pair(c.pos);
    }

    ids.clear();
    for (int pos = 0; pos >= 0; pos = nodes[pos].next) {
        ids.push_back(nodes[pos].token);
    }
}

std::vector<int> Vocabulary::encode_piece(std::string_view piece) const {
    std::vector<int> ids = initial_ids(piece, 0);
    merge_ids(ids);
    return ids;
}

TokenSequence Vocabulary::encode(std::string_view text) const {
    return encode(text, pretoken_);
}

TokenSequence Vocabulary::encode(std::string_view text, const PreTokenRules& rules) const {
    const std::string normalized = normalize_text(text, rules);
    TokenSequence seq;
    seq.vocab_fingerprint = fingerprint_;
    for (const PieceSpan& span : pretokenize_spans(normalized, rules)) {
        std::vector<int> ids =
            initial_ids(std::string_view(normalized).substr(span.offset, span.length), span.offset);
        merge_ids(ids);
        seq.ids.insert(seq.ids.end(), ids.begin(), ids.end());
    }
    return seq;
}

std::string Vocabulary::decode(std::span<const int> ids) const {
    std::string out;
    for (const int id : ids) {
        const std::string* token = token_of(id);
        if (token == nullptr) {
            throw ValidationError("unknown token id " + std::to_string(id));
        }
        out += *token;
    }
    return level_ == SymbolLevel::Byte ? proxy_string_to_bytes(out) : out;
}

std::string Vocabulary::decode(const TokenSequence& seq) const {
    return decode(std::span<const int>(seq.ids));
}

std::string Vocabulary::decode_token(int id) const {
    const std::string* token = token_of(id);
    if (token == nullptr) {
        throw ValidationError("unknown token id " + std::to_string(id));
    }
    return level_ == SymbolLevel::Byte ? proxy_string_to_bytes(*token) : *token;
}

std::size_t Vocabulary::token_char_length(int id) const {
    return utf8_length(decode_token(id));
}

bool Vocabulary::structurally_equal(const Vocabulary& other) const {
    return level_ == other.level_ && base_alphabet_ == other.base_alphabet_ &&
           merges_ == other.merges_ && id_to_token_ == other.id_to_token_ &&
           pretoken_ == other.pretoken_;
}

}  // namespace tokaudit
