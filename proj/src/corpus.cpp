#include "tokaudit/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tokaudit/error.hpp"
#include "tokaudit/rng.hpp"
#include "tokaudit/text.hpp"

namespace tokaudit {

namespace fs = std::filesystem;

Corpus::Corpus(std::vector<Document> documents, CorpusManifest manifest)
    : documents_(std::move(documents)), manifest_(std::move(manifest)) {
    std::set<std::string> ids;
    for (const Document& doc : documents_) {
        if (!ids.insert(doc.id).second) {
            throw ValidationError("duplicate document id " + doc.id);
        }
    }
}

std::vector<std::string> Corpus::texts() const {
    std::vector<std::string> out;
    out.reserve(documents_.size());
    for (const Document& doc : documents_) {
        out.push_back(doc.text);
    }
    return out;
}

Corpus Corpus::from_texts(std::string_view id_prefix, std::vector<std::string> texts) {
    std::vector<Document> docs;
    docs.reserve(texts.size());
    CorpusManifest manifest;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        manifest.total_bytes += texts[i].size();
        docs.push_back({std::string(id_prefix) + "#" + std::to_string(i), std::move(texts[i])});
    }
    manifest.document_count = docs.size();
    return Corpus(std::move(docs), std::move(manifest));
}

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("unreadable");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

Corpus ingest(const std::vector<fs::path>& paths, const IngestOptions& options) {
    if (paths.empty()) {
        throw ValidationError("no corpus paths given");
    }
    std::vector<fs::path> files;
    for (const fs::path& path : paths) {
        std::error_code ec;
        if (!fs::exists(path, ec) || ec) {
            throw ValidationError("corpus path does not exist: " + path.string());
        }
        if (fs::is_directory(path)) {
            for (const auto& entry : fs::recursive_directory_iterator(path)) {
                if (!entry.is_regular_file()) {
                    continue;
                }
                const std::string ext = entry.path().extension().string();
                if (ext == ".txt" || ext == ".jsonl") {
                    files.push_back(entry.path());
                }
            }
        } else {
            files.push_back(path);
        }
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.string() < b.string(); });
    files.erase(std::unique(files.begin(), files.end()), files.end());

    std::vector<Document> docs;
    CorpusManifest manifest;
    for (const fs::path& file : files) {
        CorpusManifest::Entry entry;
        entry.path = file.string();
        std::string content;
        try {
            content = read_file(file);
        } catch (const std::exception&) {
            manifest.warnings.push_back("skipped unreadable file " + file.string());
            continue;
        }
        if (file.extension() == ".jsonl") {
            std::istringstream lines(content);
            std::string line;
            std::size_t line_no = 0;
            while (std::getline(lines, line)) {
                ++line_no;
                if (line.empty()) {
                    continue;
                }
                nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
                if (j.is_discarded() || !j.is_object() ||
                    !j.contains(options.jsonl_text_field) ||
                    !j[options.jsonl_text_field].is_string()) {
                    manifest.warnings.push_back("skipped malformed jsonl record " + file.string() +
                                                "#" + std::to_string(line_no));
                    continue;
                }
                std::string text = j[options.jsonl_text_field].get<std::string>();
                if (text.size() > options.max_document_bytes) {
                    manifest.warnings.push_back("skipped oversized jsonl record " + file.string() +
                                                "#" + std::to_string(line_no));
                    continue;
                }
                entry.bytes += text.size();
                entry.documents += 1;
                docs.push_back({file.string() + "#" + std::to_string(line_no), std::move(text)});
            }
        } else {
            if (content.size() > options.max_document_bytes) {
                manifest.warnings.push_back("skipped oversized file " + file.string());
                continue;
            }
            entry.bytes = content.size();
            entry.documents = 1;
            docs.push_back({file.string(), std::move(content)});
        }
        if (entry.documents > 0) {
            manifest.total_bytes += entry.bytes;
            manifest.document_count += entry.documents;
            manifest.entries.push_back(std::move(entry));
        }
    }
    if (docs.empty()) {
        throw ValidationError("no readable documents under the given corpus paths");
    }
    return Corpus(std::move(docs), std::move(manifest));
}

std::vector<SecretRecord> scan(const Corpus& corpus, const std::vector<SecretPattern>& patterns) {
    std::vector<PatternMatcher> matchers;
    matchers.reserve(patterns.size());
    for (const SecretPattern& p : patterns) {
        matchers.emplace_back(p);
    }
    std::vector<SecretRecord> records;
    for (const Document& doc : corpus.documents()) {
        for (std::size_t pi = 0; pi < patterns.size(); ++pi) {
            const std::string_view text = doc.text;
            std::size_t pos = 0;
            while (pos < text.size()) {
                const std::size_t len = matchers[pi].match_at(text, pos);
                if (len > 0) {
                    records.push_back({std::string(text.substr(pos, len)), patterns[pi].name,
                                       doc.id, pos, len});
                    pos += len;  // leftmost, non-overlapping per pattern
                } else {
                    ++pos;
                }
            }
        }
    }
    std::sort(records.begin(), records.end(), [](const SecretRecord& a, const SecretRecord& b) {
        if (a.document_id != b.document_id) {
            return a.document_id < b.document_id;
        }
        if (a.offset != b.offset) {
            return a.offset < b.offset;
        }
        return a.pattern_name < b.pattern_name;
    });
    return records;
}

std::vector<std::string> sample_snippets(const Corpus& corpus,
                                         const std::vector<std::size_t>& lengths,
                                         std::uint64_t seed) {
    const std::vector<Document>& docs = corpus.documents();
    if (docs.empty()) {
        throw ValidationError("cannot sample snippets from an empty corpus");
    }
    Rng rng(seed);
    std::vector<std::string> snippets;
    snippets.reserve(lengths.size());
    for (const std::size_t want : lengths) {
        std::string snippet;
        for (int attempt = 0; attempt < 64; ++attempt) {
            const Document& doc = docs[uniform_index(rng, docs.size())];
            const std::size_t doc_chars = utf8_length(doc.text);
            if (doc_chars < want) {
                continue;
            }
            const std::size_t start_char = uniform_index(rng, doc_chars - want + 1);
            std::size_t pos = 0;
            for (std::size_t c = 0; c < start_char; ++c) {
                std::uint32_t cp = 0;
                pos += utf8_decode(doc.text, pos, cp);
            }
            const std::size_t begin = pos;
            for (std::size_t c = 0; c < want; ++c) {
                std::uint32_t cp = 0;
                pos += utf8_decode(doc.text, pos, cp);
            }
            snippet = doc.text.substr(begin, pos - begin);
            break;
        }
        if (snippet.empty()) {
            // every attempt hit a too-short document; fall back to the longest
            const auto longest = std::max_element(
                docs.begin(), docs.end(), [](const Document& a, const Document& b) {
                    return a.text.size() < b.text.size();
                });
            snippet = longest->text;
        }
        snippets.push_back(std::move(snippet));
    }
    return snippets;
}

}  // namespace tokaudit
