#include <string>
#include <vector>

#include "doctest.h"
#include "support/capture.hpp"
#include "tokaudit/corpus.hpp"
#include "tokaudit/entropy.hpp"
#include "tokaudit/error.hpp"
#include "tokaudit/rng.hpp"

using namespace tokaudit;

TEST_CASE("ingest reads txt trees in sorted path order") {
    testsupport::TempDir dir("ingest");
    testsupport::spit(dir.path() / "b.txt", "second");
    testsupport::spit(dir.path() / "a.txt", "first");
    std::filesystem::create_directories(dir.path() / "sub");
    testsupport::spit(dir.path() / "sub" / "c.txt", "third");

    const Corpus corpus = ingest({dir.path()});
    REQUIRE(corpus.documents().size() == 3);
    CHECK(corpus.documents()[0].text == "first");
    CHECK(corpus.documents()[1].text == "second");
    CHECK(corpus.documents()[2].text == "third");
    CHECK(corpus.manifest().document_count == 3);
    CHECK(corpus.manifest().total_bytes == 16);
}

TEST_CASE("ingest reads jsonl records") {
    testsupport::TempDir dir("jsonl");
    testsupport::spit(dir.path() / "data.jsonl",
                      "{\"text\": \"one\"}\n{\"text\": \"two\"}\nnot json\n");
    const Corpus corpus = ingest({dir.path() / "data.jsonl"});
    REQUIRE(corpus.documents().size() == 2);
    CHECK(corpus.documents()[0].text == "one");
    CHECK(corpus.documents()[1].text == "two");
    CHECK(corpus.manifest().warnings.size() == 1);
}

TEST_CASE("ingest error paths") {
    testsupport::TempDir dir("ingest_err");
    CHECK_THROWS_AS(ingest({dir.path() / "missing"}), ValidationError);
    CHECK_THROWS_AS(ingest({dir.path()}), ValidationError);  // empty directory
    CHECK_THROWS_AS(ingest({}), ValidationError);

    // oversized documents are skipped with a warning
    testsupport::spit(dir.path() / "big.txt", std::string(2048, 'x'));
    testsupport::spit(dir.path() / "ok.txt", "fine");
    IngestOptions options;
    options.max_document_bytes = 1024;
    const Corpus corpus = ingest({dir.path()}, options);
    REQUIRE(corpus.documents().size() == 1);
    CHECK(corpus.documents()[0].text == "fine");
    CHECK(corpus.manifest().warnings.size() == 1);
}

TEST_CASE("scan finds planted secrets with exact offsets") {
    const SecretPattern aws = parse_pattern("AKIA[0-9A-Z]{16}", "aws");
    const std::string secret = generate(aws, 1, 9).front();

    Corpus empty = Corpus::from_texts("doc", {"nothing to see here"});
    CHECK(scan(empty, {aws}).empty());

    const std::string text = "prefix " + secret + " suffix";
    Corpus one = Corpus::from_texts("doc", {text});
    const auto records = scan(one, {aws});
    REQUIRE(records.size() == 1);
    CHECK(records[0].value == secret);
    CHECK(records[0].offset == 7);
    CHECK(records[0].length == 20);
    CHECK(records[0].pattern_name == "aws");

    // two adjacent non-overlapping keys
    const std::string second = generate(aws, 1, 10).front();
    Corpus two = Corpus::from_texts("doc", {secret + second});
    const auto both = scan(two, {aws});
    REQUIRE(both.size() == 2);
    CHECK(both[0].offset == 0);
    CHECK(both[1].offset == 20);
}

TEST_CASE("planting k secrets yields exactly k records") {
    Rng rng(77);
    const auto& patterns = bundled_patterns();
    // lowercase filler cannot start or extend a match of the bundled patterns
    const auto filler = [&rng](std::size_t n) {
        std::string s;
        for (std::size_t i = 0; i < n; ++i) {
            s += static_cast<char>('a' + uniform_index(rng, 26));
        }
        return s;
    };
    std::vector<std::string> docs;
    std::vector<std::size_t> offsets;
    std::vector<std::string> planted;
    for (int k = 0; k < 12; ++k) {
        const SecretPattern& pattern = patterns[k % patterns.size()];
        const std::string secret = generate(pattern, 1, 1000 + k).front();
        const std::string head = filler(uniform_index(rng, 120));
        docs.push_back(head + secret + filler(uniform_index(rng, 120)));
        offsets.push_back(head.size());
        planted.push_back(secret);
    }
    const Corpus corpus = Corpus::from_texts("doc", {docs.begin(), docs.end()});
    const auto records = scan(corpus, patterns);
    REQUIRE(records.size() == planted.size());
    for (const auto& r : records) {
        const std::size_t d = std::stoul(r.document_id.substr(4));
        CHECK(r.offset == offsets[d]);
        CHECK(r.value == planted[d]);
        CHECK(corpus.documents()[d].text.substr(r.offset, r.length) == r.value);
    }
}

TEST_CASE("generated sample entropy approaches the analytical value") {
    const SecretPattern ghp = parse_pattern("ghp_[a-zA-Z0-9]{36}", "ghp");
    const PatternEntropyReport analytical = pattern_char_entropy(ghp);
    const std::vector<std::string> sample = generate(ghp, 100000, 4242);
    const auto report =
        report_from_counts(EntropyLevel::Char, EntropyScope::Dataset, char_counts(sample));
    CHECK(report.normalized == doctest::Approx(analytical.normalized).epsilon(0.02));
    CHECK(report.unique_count == 63);
}

TEST_CASE("snippet sampling is deterministic with exact lengths") {
    const Corpus corpus = Corpus::from_texts(
        "doc", {"the quick brown fox jumps over the lazy dog repeatedly", "short"});
    const std::vector<std::size_t> lengths = {5, 10, 3};
    const auto a = sample_snippets(corpus, lengths, 99);
    const auto b = sample_snippets(corpus, lengths, 99);
    CHECK(a == b);
    REQUIRE(a.size() == 3);
    CHECK(a[0].size() == 5);
    CHECK(a[1].size() == 10);
    CHECK(a[2].size() == 3);
}
