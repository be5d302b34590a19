#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tokaudit/patterns.hpp"

namespace tokaudit {

struct Document {
    std::string id;
    std::string text;
};

struct CorpusManifest {
    struct Entry {
        std::string path;
        std::uint64_t bytes = 0;
        std::size_t documents = 0;
    };
    std::vector<Entry> entries;
    std::vector<std::string> warnings;
    std::uint64_t total_bytes = 0;
    std::size_t document_count = 0;
};

// Deterministically ordered document collection (sorted by source path; one
// document per .txt file, one per .jsonl line).
class Corpus {
public:
    Corpus() = default;
    Corpus(std::vector<Document> documents, CorpusManifest manifest);

    const std::vector<Document>& documents() const { return documents_; }
    const CorpusManifest& manifest() const { return manifest_; }
    std::vector<std::string> texts() const;

    static Corpus from_texts(std::string_view id_prefix, std::vector<std::string> texts);

private:
    std::vector<Document> documents_;
    CorpusManifest manifest_;
};

struct IngestOptions {
    std::string jsonl_text_field = "text";
    std::uint64_t max_document_bytes = 1 << 20;  // oversized documents are skipped
};

// Reads .txt files whole and .jsonl files one document per line; directories
// are recursed. Unreadable or oversized inputs are skipped with a manifest
// warning; ending up with zero documents is an error.
Corpus ingest(const std::vector<std::filesystem::path>& paths, const IngestOptions& options = {});

struct SecretRecord {
    std::string value;
    std::string pattern_name;
    std::string document_id;
    std::size_t offset = 0;  // bytes
    std::size_t length = 0;  // bytes
};

// Leftmost non-overlapping matches per pattern per document; matches of
// different patterns may overlap. Sorted by (document id, offset, pattern).
std::vector<SecretRecord> scan(const Corpus& corpus, const std::vector<SecretPattern>& patterns);

// Deterministic equal-count snippet sampling: snippet i has the character
// length of lengths[i], drawn from a uniformly chosen document/offset.
std::vector<std::string> sample_snippets(const Corpus& corpus,
                                         const std::vector<std::size_t>& lengths,
                                         std::uint64_t seed);

}  // namespace tokaudit
