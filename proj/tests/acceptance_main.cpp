// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any fail. Run from the build tree (relative fixture paths).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "support/bpe_oracle.hpp"
#include "support/capture.hpp"
#include "support/synth_corpus.hpp"
#include "tokaudit/analysis.hpp"
#include "tokaudit/audit.hpp"
#include "tokaudit/corpus.hpp"
#include "tokaudit/entropy.hpp"
#include "tokaudit/error.hpp"
#include "tokaudit/mitigation.hpp"
#include "tokaudit/rng.hpp"
#include "tokaudit/scaling.hpp"
#include "tokaudit/trainer.hpp"

using namespace tokaudit;
namespace fs = std::filesystem;

namespace {

int failures = 0;

class Criterion {
public:
    Criterion(int number, std::string what)
        : number_(number), what_(std::move(what)), start_(std::chrono::steady_clock::now()) {}

    void finish(bool ok, const std::string& detail) {
        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - start_)
                                 .count();
        std::printf("%s criterion %2d (%s): %s (%lld ms)\n", ok ? "PASS" : "FAIL", number_,
                    what_.c_str(), detail.c_str(), static_cast<long long>(elapsed));
        std::fflush(stdout);
        if (!ok) {
            ++failures;
        }
    }

    template <typename F>
    void run(F&& f) {
        try {
            auto [ok, detail] = f();
            finish(ok, detail);
        } catch (const std::exception& e) {
            finish(false, std::string("exception: ") + e.what());
        }
    }

private:
    int number_;
    std::string what_;
    std::chrono::steady_clock::time_point start_;
};

using Outcome = std::pair<bool, std::string>;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---- shared desk-scale setup (criteria 5-9) ----

struct DeskSetup {
    std::vector<std::string> docs;
    std::optional<Vocabulary> vocab;
    std::vector<std::string> secrets;
    std::vector<std::string> snippets;
    std::size_t corpus_bytes = 0;
};

const DeskSetup& desk() {
    static const DeskSetup setup = [] {
        DeskSetup s;
        s.docs.push_back(synth::coverage_line());
        Rng rng(99);
        while (s.corpus_bytes < (1u << 20) + (1u << 18)) {  // ~1.25 MB
            s.docs.push_back(synth::document(rng, 8000));
            s.corpus_bytes += s.docs.back().size();
        }
        s.vocab.emplace(train(s.docs, 4096));
        const auto& patterns = bundled_patterns();
        for (std::size_t i = 0; i < patterns.size(); ++i) {
            auto batch = generate(patterns[i], 2500, 1000 + i);
            s.secrets.insert(s.secrets.end(), batch.begin(), batch.end());
        }
        std::vector<std::size_t> lengths;
        lengths.reserve(s.secrets.size());
        for (const std::string& secret : s.secrets) {
            lengths.push_back(utf8_length(secret));
        }
        s.snippets = sample_snippets(Corpus::from_texts("desk", {s.docs.begin(), s.docs.end()}),
                                     lengths, 4242);
        return s;
    }();
    return setup;
}

double pooled_entropy(const std::map<std::string, std::uint64_t>& counts) {
    return entropy(distribution_from_counts(counts));
}

Outcome criterion1() {
    const auto result = testsupport::run_cli({"pattern-entropy", "--regex",
                                              "ghp_[a-zA-Z0-9]{36}"});
    if (result.exit_code != 0) {
        return {false, "pattern-entropy exited " + std::to_string(result.exit_code)};
    }
    const auto j = nlohmann::json::parse(result.out);
    const double h = j["entropy_bits"].get<double>();
    const double hmax = j["max_entropy_bits"].get<double>();
    const double norm = j["normalized"].get<double>();
    const bool ok = std::abs(h - 5.915) <= 0.001 && std::abs(hmax - 5.977) <= 0.001 &&
                    std::abs(norm - 0.9896) <= 0.001;
    return {ok, "entropy=" + fmt(h) + " max=" + fmt(hmax) + " normalized=" + fmt(norm)};
}

Outcome criterion2() {
    const double a = normalized_entropy(8.084, 1047);
    const double b = normalized_entropy(6.086, 76);
    const double c = normalized_entropy(11.175, 47945);
    const bool ok = std::abs(a - 0.806) <= 0.001 && std::abs(b - 0.974) <= 0.001 &&
                    std::abs(c - 0.719) <= 0.001;
    return {ok, fmt(a) + " / " + fmt(b) + " / " + fmt(c)};
}

Outcome criterion3() {
    const VocabScalingModel& model = bundled_scaling_model();
    const double s3 = static_cast<double>(suggest_vocab_size(model, 3e9));
    const double s7 = static_cast<double>(suggest_vocab_size(model, 7e9));
    const double s15 = static_cast<double>(suggest_vocab_size(model, 15e9));
    const bool ok = std::abs(s3 - 39367) / 39367 < 0.02 && std::abs(s7 - 62280) / 62280 < 0.02 &&
                    std::abs(s15 - 93987) / 93987 < 0.02;
    return {ok, fmt(s3) + " / " + fmt(s7) + " / " + fmt(s15)};
}

Outcome criterion4() {
    Rng rng(31);
    static const std::string alphabet = "aabbccddeeffgg  hi\nxyz.09AZ";
    int corpora = 0;
    int mismatches = 0;
    while (corpora < 50) {
        std::vector<std::string> corpus;
        const std::size_t docs = 1 + uniform_index(rng, 3);
        const std::size_t budget = 64 + uniform_index(rng, 960);
        std::set<std::string> scalars;
        for (std::size_t d = 0; d < docs; ++d) {
            std::string doc;
            while (doc.size() < budget / docs) {
                doc += alphabet[uniform_index(rng, alphabet.size())];
            }
            for (const std::string& s : utf8_scalars(doc)) {
                scalars.insert(s);
            }
            corpus.push_back(std::move(doc));
        }
        const std::size_t target = scalars.size() + uniform_index(rng, 48);
        const Vocabulary vocab = train(corpus, target);
        const auto expected = oracle::train_merges(corpus, target);
        std::vector<oracle::Pair> got;
        for (const MergeRule& m : vocab.merges()) {
            got.emplace_back(m.left, m.right);
        }
        if (got != expected) {
            ++mismatches;
        }
        ++corpora;
    }

    const Vocabulary& vocab = *desk().vocab;
    const std::vector<std::string>& base = vocab.base_alphabet();
    int roundtrip_failures = 0;
    std::size_t checked = 0;
    for (const std::string& secret : desk().secrets) {  // 10^4 generated strings
        if (vocab.decode(vocab.encode(secret)) != secret) {
            ++roundtrip_failures;
        }
        ++checked;
    }
    Rng rt(32);
    for (int i = 0; i < 2000; ++i) {  // plus random strings over the base alphabet
        std::string text;
        const std::size_t len = uniform_index(rt, 48);
        for (std::size_t c = 0; c < len; ++c) {
            text += base[uniform_index(rt, base.size())];
        }
        if (vocab.decode(vocab.encode(text)) != text) {
            ++roundtrip_failures;
        }
        ++checked;
    }
    const bool ok = mismatches == 0 && roundtrip_failures == 0;
    return {ok, std::to_string(corpora) + " corpora, 0 expected mismatches, got " +
                    std::to_string(mismatches) + "; " + std::to_string(checked) +
                    " round trips, failures " + std::to_string(roundtrip_failures)};
}

Outcome criterion5() {
    const DeskSetup& s = desk();
    const Vocabulary& vocab = *s.vocab;
    const double secret_token = pooled_entropy(token_counts(s.secrets, vocab));
    const double snippet_token = pooled_entropy(token_counts(s.snippets, vocab));
    const double secret_char = pooled_entropy(char_counts(s.secrets));
    const double snippet_char = pooled_entropy(char_counts(s.snippets));
    const bool ok = secret_token < snippet_token && secret_char > snippet_char;
    return {ok, "corpus " + std::to_string(s.corpus_bytes) + " B, vocab " +
                    std::to_string(vocab.size()) + "; token " + fmt(secret_token) + " < " +
                    fmt(snippet_token) + ", char " + fmt(secret_char) + " > " +
                    fmt(snippet_char)};
}

Outcome criterion6() {
    const DeskSetup& s = desk();
    const LengthHistogram hist = length_histogram(*s.vocab, s.secrets);
    const auto count = [&](std::size_t n) -> std::uint64_t {
        const auto it = hist.counts.find(n);
        return it == hist.counts.end() ? 0 : it->second;
    };
    std::uint64_t tail = 0;
    for (const auto& [len, c] : hist.counts) {
        if (len >= 3) {
            tail += c;
        }
    }
    const bool ok = count(1) > count(3) && tail > 0;
    return {ok, "count(1)=" + std::to_string(count(1)) + " count(3)=" + std::to_string(count(3)) +
                    " tail(n>=3)=" + std::to_string(tail)};
}

Outcome criterion7() {
    const DeskSetup& s = desk();
    const auto secret_dist = distribution_from_counts(token_counts(s.secrets, *s.vocab));
    const double identity = kl_divergence(secret_dist, secret_dist);

    Rng rng(321);
    double worst = 0.0;
    for (int round = 0; round < 1000; ++round) {
        std::map<std::string, std::uint64_t> pc;
        std::map<std::string, std::uint64_t> qc;
        const std::size_t support = 2 + uniform_index(rng, 10);
        for (std::size_t i = 0; i < support; ++i) {
            if (uniform_index(rng, 4) != 0) {
                pc["o" + std::to_string(i)] = 1 + uniform_index(rng, 20);
            }
            if (uniform_index(rng, 4) != 0) {
                qc["o" + std::to_string(i)] = 1 + uniform_index(rng, 20);
            }
        }
        if (pc.empty() || qc.empty()) {
            continue;
        }
        worst = std::min(worst, kl_divergence(distribution_from_counts(pc),
                                              distribution_from_counts(qc)));
    }

    const auto two = [](std::uint64_t x, std::uint64_t y) {
        std::map<std::string, std::uint64_t> m;
        if (x) m["x"] = x;
        if (y) m["y"] = y;
        return distribution_from_counts(m);
    };
    const double hand1 = kl_divergence(two(1, 1), two(1, 3));
    const double hand2 = kl_divergence(two(1, 0), two(2, 2));
    const double desk_kl =
        kl_divergence(secret_dist, distribution_from_counts(token_counts(s.snippets, *s.vocab)));
    const bool ok = identity <= 1e-9 && worst >= -1e-9 &&
                    std::abs(hand1 - 0.2075) <= 1e-4 && std::abs(hand2 - 1.0) <= 1e-4 &&
                    desk_kl > 0.5;
    return {ok, "identity=" + fmt(identity) + " worst=" + fmt(worst) + " hand=" + fmt(hand1) +
                    "/" + fmt(hand2) + " KL(secrets||corpus)=" + fmt(desk_kl)};
}

Outcome criterion8() {
    const DeskSetup& s = desk();
    const Vocabulary& vocab = *s.vocab;
    const auto scores = identify_gibberish(s.docs, s.secrets, vocab, 50);
    const StripSet strip = strip_set_from_scores(scores);
    const Vocabulary stripped = strip_tokens(vocab, strip);
    const std::set<int> stripped_ids(strip.ids.begin(), strip.ids.end());

    std::size_t leaked = 0;
    std::size_t shrunk = 0;
    for (const std::string& secret : s.secrets) {
        const auto before = vocab.encode(secret).ids;
        const auto after = stripped.encode(secret).ids;
        if (after.size() < before.size()) {
            ++shrunk;
        }
        for (const int id : after) {
            if (stripped_ids.count(id)) {
                ++leaked;
            }
        }
    }

    const auto& patterns = bundled_patterns();
    std::size_t guard_bad = 0;
    for (std::size_t i = 0; i < 500; ++i) {
        const std::string& secret = s.secrets[i * 17 % s.secrets.size()];
        const std::string prefix = "key = ";
        const std::string suffix = " // end";
        const GuardedEncoding enc = guard_encode(vocab, prefix + secret + suffix, patterns);
        if (enc.spans.size() != 1 || enc.spans[0].offset != prefix.size() ||
            enc.spans[0].length != secret.size()) {
            ++guard_bad;
            continue;
        }
        std::vector<int> expected = vocab.encode(prefix).ids;
        const std::size_t span_begin = expected.size();
        bool span_ok = true;
        for (const char c : secret) {
            const auto id = vocab.id_of(std::string(1, c));
            if (!id) {
                span_ok = false;
                break;
            }
            expected.push_back(*id);
        }
        for (const int id : vocab.encode(suffix).ids) {
            expected.push_back(id);
        }
        if (!span_ok || enc.ids != expected) {
            ++guard_bad;
            continue;
        }
        for (std::size_t t = span_begin; t < span_begin + secret.size(); ++t) {
            if (vocab.token_char_length(enc.ids[t]) != 1) {
                ++guard_bad;
                break;
            }
        }
    }
    const bool ok = leaked == 0 && shrunk == 0 && guard_bad == 0;
    return {ok, "stripped " + std::to_string(strip.ids.size()) + " ids; leaked=" +
                    std::to_string(leaked) + " shrunk=" + std::to_string(shrunk) +
                    " guard_bad=" + std::to_string(guard_bad)};
}

Outcome criterion9() {
    const DeskSetup& s = desk();
    const Vocabulary& vocab = *s.vocab;
    const auto& alphabet = default_probe_alphabet();
    const GridProbe grid = probe_pairs(vocab, alphabet);
    std::size_t bad = 0;
    for (std::size_t i = 0; i < alphabet.size(); ++i) {
        for (std::size_t j = 0; j < alphabet.size(); ++j) {
            const int expected =
                static_cast<int>(vocab.encode(alphabet[i] + alphabet[j]).ids.size());
            if (grid.at(i, j) != expected) {
                ++bad;
            }
        }
    }

    // hand-derived toy matrices
    const Vocabulary none(SymbolLevel::Scalar, {"a", "b"}, {}, {{"a", 0}, {"b", 1}},
                          PreTokenRules{});
    const GridProbe g0 = probe_pairs(none, {"a", "b"});
    bool toys_ok = g0.matrix == std::vector<int>{2, 2, 2, 2};
    const Vocabulary one(SymbolLevel::Scalar, {"a", "b"}, {{"a", "b", 0}},
                         {{"a", 0}, {"b", 1}, {"ab", 2}}, PreTokenRules{});
    const GridProbe g1 = probe_pairs(one, {"a", "b"});
    toys_ok = toys_ok && g1.matrix == std::vector<int>{2, 1, 2, 2};

    const bool ok = bad == 0 && toys_ok;
    return {ok, std::to_string(grid.matrix.size()) + " cells, mismatches=" + std::to_string(bad) +
                    ", toy grids " + (toys_ok ? "exact" : "WRONG")};
}

Outcome criterion10() {
    const fs::path fixture_dir = "acceptance_fixture/corpus";
    fs::remove_all("acceptance_fixture");
    synth::FixtureOptions options;  // 100 documents, seed 42, planted secrets
    synth::write_fixture_tree(fixture_dir, options);

    nlohmann::ordered_json config;
    config["corpus"] = {"acceptance_fixture/corpus"};
    config["tokenizer"] = {{"source", "train"},
                           {"target_size", 384},
                           {"pretoken", {{"mode", "whitespace-keep-leading-space"},
                                         {"lowercase", false}}}};
    config["kl_epsilon"] = 1e-9;
    config["rank_top_k"] = 150;
    config["gibberish_top_k"] = 50;
    config["gibberish_epsilon"] = 0.5;
    config["strip_top_k"] = 50;
    config["secrets_per_pattern"] = 25;
    config["seed"] = 42;
    config["output_dir"] = "acceptance_audit_out";
    testsupport::spit("acceptance_fixture/config.json", config.dump(2) + "\n");

    fs::remove_all("acceptance_audit_out");
    const auto first_run =
        testsupport::run_cli({"audit", "--config", "acceptance_fixture/config.json"});
    if (first_run.exit_code != 0) {
        return {false, "first audit run exited " + std::to_string(first_run.exit_code) + ": " +
                           first_run.err};
    }
    const std::string first = testsupport::slurp("acceptance_audit_out/report.json");

    fs::remove_all("acceptance_audit_out");
    const auto second_run =
        testsupport::run_cli({"audit", "--config", "acceptance_fixture/config.json"});
    if (second_run.exit_code != 0) {
        return {false, "second audit run exited " + std::to_string(second_run.exit_code)};
    }
    const std::string second = testsupport::slurp("acceptance_audit_out/report.json");
    if (first.empty() || first != second) {
        return {false, "repeated runs differ"};
    }

    const fs::path golden_path = fs::path(TOKAUDIT_GOLDEN_DIR) / "audit_report.json";
    if (!fs::exists(golden_path)) {
        return {false, "golden file missing at " + golden_path.string() +
                           "; freeze acceptance_audit_out/report.json there"};
    }
    const std::string golden = testsupport::slurp(golden_path);
    if (golden != first) {
        return {false, "report differs from the frozen golden"};
    }

    // directional restatement inside the report: secrets char-normalized
    // entropy exceeds token-normalized entropy
    const auto report = nlohmann::json::parse(first);
    double char_norm = -1.0;
    double token_norm = -1.0;
    for (const auto& row : report["dataset_stats"]) {
        if (row["label"] == "secrets" && row["level"] == "char") {
            char_norm = row["normalized"].get<double>();
        }
        if (row["label"] == "secrets" && row["level"] == "token") {
            token_norm = row["normalized"].get<double>();
        }
    }
    if (!(char_norm > token_norm)) {
        return {false, "secrets normalized char " + fmt(char_norm) + " !> token " +
                           fmt(token_norm)};
    }
    return {true, "byte-identical across runs and equal to the golden; char-norm " +
                      fmt(char_norm) + " > token-norm " + fmt(token_norm)};
}

}  // namespace

int main() {
    {
        Criterion c(1, "pattern-entropy reproduces the ghp example");
        c.run([] { return criterion1(); });
    }
    {
        Criterion c(2, "normalized-entropy identities");
        c.run([] { return criterion2(); });
    }
    {
        Criterion c(3, "power-law anchors");
        c.run([] { return criterion3(); });
    }
    {
        Criterion c(4, "BPE oracle equivalence and round trips");
        c.run([] { return criterion4(); });
    }
    {
        Criterion c(5, "desk-scale gibberish-bias orderings");
        c.run([] { return criterion5(); });
    }
    {
        Criterion c(6, "token-length histogram shape");
        c.run([] { return criterion6(); });
    }
    {
        Criterion c(7, "KL properties and sanity floor");
        c.run([] { return criterion7(); });
    }
    {
        Criterion c(8, "mitigation soundness");
        c.run([] { return criterion8(); });
    }
    {
        Criterion c(9, "probe-grid consistency");
        c.run([] { return criterion9(); });
    }
    {
        Criterion c(10, "audit determinism against the golden report");
        c.run([] { return criterion10(); });
    }
    if (failures > 0) {
        std::printf("%d criteria FAILED\n", failures);
        return 1;
    }
    std::printf("all 10 criteria passed\n");
    return 0;
}
