#include "tokaudit/audit.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <fstream>

#include "tokaudit/analysis.hpp"
#include "tokaudit/corpus.hpp"
#include "tokaudit/entropy.hpp"
#include "tokaudit/error.hpp"
#include "tokaudit/hub_import.hpp"
#include "tokaudit/mitigation.hpp"
#include "tokaudit/trainer.hpp"
#include "tokaudit/vocab_io.hpp"

namespace tokaudit {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

nlohmann::ordered_json config_to_json(const AuditConfig& config) {
    ordered_json j;
    j["corpus"] = config.corpus_paths;
    if (config.import_path.empty()) {
        j["tokenizer"] = {{"source", "train"},
                          {"target_size", config.train_target_size},
                          {"pretoken",
                           {{"mode", pretoken_mode_name(config.pretoken.mode)},
                            {"lowercase", config.pretoken.lowercase}}}};
    } else {
        j["tokenizer"] = {{"source", "import"}, {"path", config.import_path}};
    }
    j["patterns"] = config.pattern_file;
    j["probe_alphabet"] = config.probe_alphabet;
    j["kl_epsilon"] = config.kl_epsilon;
    j["rank_top_k"] = config.rank_top_k;
    j["gibberish_top_k"] = config.gibberish_top_k;
    j["gibberish_epsilon"] = config.gibberish_epsilon;
    j["strip_top_k"] = config.strip_top_k;
    j["secrets_per_pattern"] = config.secrets_per_pattern;
    j["seed"] = config.seed;
    j["output_dir"] = config.output_dir;
    return j;
}

AuditConfig config_from_json(const nlohmann::json& j) {
    AuditConfig config;
    try {
        if (j.contains("corpus")) {
            config.corpus_paths = j["corpus"].get<std::vector<std::string>>();
        }
        if (j.contains("tokenizer")) {
            const auto& tok = j["tokenizer"];
            const std::string source = tok.value("source", "train");
            if (source == "import") {
                config.import_path = tok.at("path").get<std::string>();
            } else if (source == "train") {
                config.train_target_size = tok.value("target_size", config.train_target_size);
                if (tok.contains("pretoken")) {
                    config.pretoken.mode =
                        pretoken_mode_from_name(tok["pretoken"].value("mode", "whitespace"));
                    config.pretoken.lowercase = tok["pretoken"].value("lowercase", false);
                }
            } else {
                throw ValidationError("tokenizer source must be \"train\" or \"import\"");
            }
        }
        config.pattern_file = j.value("patterns", config.pattern_file);
        config.probe_alphabet = j.value("probe_alphabet", config.probe_alphabet);
        config.kl_epsilon = j.value("kl_epsilon", config.kl_epsilon);
        config.rank_top_k = j.value("rank_top_k", config.rank_top_k);
        config.gibberish_top_k = j.value("gibberish_top_k", config.gibberish_top_k);
        config.gibberish_epsilon = j.value("gibberish_epsilon", config.gibberish_epsilon);
        config.strip_top_k = j.value("strip_top_k", config.strip_top_k);
        config.secrets_per_pattern = j.value("secrets_per_pattern", config.secrets_per_pattern);
        config.seed = j.value("seed", config.seed);
        config.output_dir = j.value("output_dir", config.output_dir);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed audit config: ") + e.what());
    }
    return config;
}

AuditConfig load_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open config file " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("config file is not valid JSON: ") + e.what());
    }
    return config_from_json(j);
}

void validate_config(const AuditConfig& config) {
    if (config.corpus_paths.empty()) {
        throw ValidationError("config: no corpus paths");
    }
    for (const std::string& path : config.corpus_paths) {
        if (!fs::exists(path)) {
            throw ValidationError("config: corpus path does not exist: " + path);
        }
    }
    if (!config.import_path.empty() && !fs::exists(config.import_path)) {
        throw ValidationError("config: tokenizer import path does not exist: " +
                              config.import_path);
    }
    if (config.import_path.empty() && config.train_target_size == 0) {
        throw ValidationError("config: train target size must be positive");
    }
    if (!config.pattern_file.empty() && !fs::exists(config.pattern_file)) {
        throw ValidationError("config: pattern file does not exist: " + config.pattern_file);
    }
    if (config.kl_epsilon <= 0.0) {
        throw ValidationError("config: kl_epsilon must be positive");
    }
    if (config.gibberish_epsilon <= 0.0) {
        throw ValidationError("config: gibberish_epsilon must be positive");
    }
    if (config.secrets_per_pattern == 0) {
        throw ValidationError("config: secrets_per_pattern must be positive");
    }
    if (config.output_dir.empty()) {
        throw ValidationError("config: output_dir is required");
    }
}

namespace {

template <typename F>
auto stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const ValidationError& e) {
        throw ValidationError("stage " + std::string(name) + ": " + e.what());
    } catch (const std::exception& e) {
        throw std::runtime_error("stage " + std::string(name) + ": " + e.what());
    }
}

// O_EXCL lock file: a single process owns the output directory.
class OutputDirLock {
public:
    explicit OutputDirLock(const fs::path& dir) : path_(dir / ".lock") {
        const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd < 0) {
            throw std::runtime_error("output directory " + dir.string() +
                                     " is locked by another run (remove " + path_.string() +
                                     " if stale)");
        }
        ::close(fd);
    }
    ~OutputDirLock() {
        std::error_code ec;
        fs::remove(path_, ec);
    }

private:
    fs::path path_;
};

ordered_json report_from_entropy(const EntropyReport& r) {
    return ordered_json{{"level", entropy_level_name(r.level)},
                        {"scope", entropy_scope_name(r.scope)},
                        {"unique", r.unique_count},
                        {"entropy_bits", r.entropy_bits},
                        {"max_entropy_bits", r.max_entropy_bits},
                        {"normalized", r.normalized},
                        {"estimator", r.estimator}};
}

}  // namespace

nlohmann::ordered_json run_audit(const AuditConfig& config) {
    stage("validate", [&] { validate_config(config); return 0; });

    const fs::path out_dir(config.output_dir);
    fs::create_directories(out_dir);
    OutputDirLock lock(out_dir);

    std::vector<fs::path> written;
    const auto write_output = [&](const fs::path& name, const std::string& content) {
        const fs::path target = out_dir / name;
        const fs::path tmp = out_dir / (name.string() + ".tmp");
        {
            std::ofstream out(tmp, std::ios::binary);
            if (!out) {
                throw std::runtime_error("cannot open " + tmp.string() + " for writing");
            }
            out << content;
            if (!out) {
                throw std::runtime_error("failed writing " + tmp.string());
            }
        }
        fs::rename(tmp, target);
        written.push_back(target);
    };

    try {
        const Corpus corpus = stage("ingest", [&] {
            std::vector<fs::path> paths(config.corpus_paths.begin(), config.corpus_paths.end());
            return ingest(paths);
        });
        const std::vector<std::string> corpus_texts = corpus.texts();

        const Vocabulary vocab = stage("tokenizer", [&] {
            if (!config.import_path.empty()) {
                return import_hub_file(config.import_path);
            }
            return train(corpus_texts, config.train_target_size, config.pretoken);
        });

        const std::vector<SecretPattern>& patterns =
            config.pattern_file.empty() ? bundled_patterns()
                                        : load_pattern_file(config.pattern_file);

        std::vector<std::string> secrets;
        std::vector<SecretRecord> scan_records;
        stage("secrets", [&] {
            for (std::size_t i = 0; i < patterns.size(); ++i) {
                // one generator stream per pattern, derived from the run seed
                std::vector<std::string> batch =
                    generate(patterns[i], config.secrets_per_pattern,
                             config.seed + static_cast<std::uint64_t>(i));
                secrets.insert(secrets.end(), batch.begin(), batch.end());
            }
            scan_records = scan(corpus, patterns);
            return 0;
        });

        std::vector<std::size_t> secret_lengths;
        secret_lengths.reserve(secrets.size());
        for (const std::string& s : secrets) {
            secret_lengths.push_back(utf8_length(s));
        }
        const std::vector<std::string> snippets = stage("secrets", [&] {
            return sample_snippets(corpus, secret_lengths, config.seed ^ 0x9e3779b97f4a7c15ULL);
        });

        const std::vector<LabeledEntropyReport> stats = stage("stats", [&] {
            return dataset_stats({{"corpus", snippets}, {"secrets", secrets}}, vocab);
        });

        const LengthHistogram hist =
            stage("histogram", [&] { return length_histogram(vocab, secrets); });

        const RankFrequencyTable rank = stage("rank-frequency", [&] {
            return rank_frequency(vocab, secrets, snippets, config.rank_top_k, config.kl_epsilon);
        });

        const double kl_bits = stage("kl", [&] {
            const DistributionTable p = distribution_from_counts(token_counts(secrets, vocab));
            const DistributionTable q = distribution_from_counts(token_counts(snippets, vocab));
            return kl_divergence(p, q, config.kl_epsilon);
        });

        const std::vector<GibberishScore> gibberish = stage("gibberish", [&] {
            return identify_gibberish(snippets, secrets, vocab, config.gibberish_top_k,
                                      config.gibberish_epsilon);
        });

        ordered_json strip_section;
        if (config.strip_top_k > 0 && !gibberish.empty()) {
            stage("strip", [&] {
                std::vector<GibberishScore> to_strip = gibberish;
                if (to_strip.size() > config.strip_top_k) {
                    to_strip.resize(config.strip_top_k);
                }
                const StripSet strip = strip_set_from_scores(to_strip);
                const Vocabulary stripped = strip_tokens(vocab, strip);
                const EntropyReport before = report_from_counts(
                    EntropyLevel::Token, EntropyScope::Dataset, token_counts(secrets, vocab));
                const EntropyReport after = report_from_counts(
                    EntropyLevel::Token, EntropyScope::Dataset, token_counts(secrets, stripped));
                strip_section["stripped_ids"] = strip.ids;
                strip_section["stripped_vocab_fingerprint"] = stripped.fingerprint();
                strip_section["secrets_token_entropy_before"] = report_from_entropy(before);
                strip_section["secrets_token_entropy_after"] = report_from_entropy(after);
                return 0;
            });
        }

        ordered_json report;
        report["tool"] = {{"name", "tokaudit"},
                          {"version", kToolVersion},
                          {"vocab_format_version", kVocabFormatVersion}};
        report["config"] = config_to_json(config);
        report["tokenizer"] = {
            {"fingerprint", vocab.fingerprint()},
            {"symbol_level", vocab.level() == SymbolLevel::Byte ? "byte" : "scalar"},
            {"size", vocab.size()},
            {"base_alphabet_size", vocab.base_alphabet().size()},
            {"merges", vocab.merges().size()},
            {"note", vocab.note()}};
        ordered_json manifest;
        manifest["documents"] = corpus.manifest().document_count;
        manifest["total_bytes"] = corpus.manifest().total_bytes;
        manifest["warnings"] = corpus.manifest().warnings;
        report["corpus"] = std::move(manifest);

        ordered_json scan_summary;
        scan_summary["records"] = scan_records.size();
        ordered_json per_pattern = ordered_json::object();
        for (const SecretPattern& p : patterns) {
            per_pattern[p.name] = 0;
        }
        for (const SecretRecord& r : scan_records) {
            per_pattern[r.pattern_name] = per_pattern[r.pattern_name].get<int>() + 1;
        }
        scan_summary["per_pattern"] = std::move(per_pattern);
        report["scan"] = std::move(scan_summary);

        report["secrets"] = {{"generated", secrets.size()},
                             {"per_pattern", config.secrets_per_pattern},
                             {"snippets", snippets.size()}};

        ordered_json stats_json = ordered_json::array();
        for (const LabeledEntropyReport& row : stats) {
            ordered_json entry = report_from_entropy(row.report);
            ordered_json labeled;
            labeled["label"] = row.label;
            labeled.update(entry);
            stats_json.push_back(std::move(labeled));
        }
        report["dataset_stats"] = std::move(stats_json);

        ordered_json hist_json;
        hist_json["total_tokens"] = hist.total_tokens;
        ordered_json hist_counts = ordered_json::object();
        for (const auto& [length, count] : hist.counts) {
            hist_counts[std::to_string(length)] = count;
        }
        hist_json["counts"] = std::move(hist_counts);
        report["length_histogram"] = std::move(hist_json);

        ordered_json rank_json;
        rank_json["top_k"] = rank.top_k;
        rank_json["epsilon"] = rank.epsilon;
        ordered_json rank_rows = ordered_json::array();
        for (const RankFrequencyTable::Row& row : rank.rows) {
            rank_rows.push_back({{"token", row.token},
                                 {"rank", row.rank},
                                 {"p_proportion", row.p_proportion},
                                 {"q_proportion", row.q_proportion}});
        }
        rank_json["rows"] = std::move(rank_rows);
        report["rank_frequency"] = std::move(rank_json);

        report["kl_divergence_bits"] = kl_bits;

        ordered_json gib_json;
        gib_json["epsilon"] = config.gibberish_epsilon;
        gib_json["top_k"] = config.gibberish_top_k;
        ordered_json candidates = ordered_json::array();
        for (const GibberishScore& s : gibberish) {
            candidates.push_back({{"token", s.token},
                                  {"id", s.id},
                                  {"freq_secret", s.freq_secret},
                                  {"freq_normal", s.freq_normal},
                                  {"score", s.score}});
        }
        gib_json["candidates"] = std::move(candidates);
        report["gibberish"] = std::move(gib_json);

        if (!strip_section.is_null()) {
            report["strip"] = std::move(strip_section);
        }

        stage("report", [&] {
            write_output("stats.csv", stats_to_csv(stats));
            write_output("length_histogram.csv", histogram_to_csv(hist));
            write_output("rank_frequency.csv", rank_frequency_to_csv(rank));
            write_output("gibberish.csv", gibberish_to_csv(gibberish));
            write_output("report.json", report.dump(2) + "\n");
            return 0;
        });
        return report;
    } catch (...) {
        for (const fs::path& file : written) {
            std::error_code ec;
            fs::remove(file, ec);
        }
        throw;
    }
}

}  // namespace tokaudit
