#include "tokaudit/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tokaudit/analysis.hpp"
#include "tokaudit/audit.hpp"
#include "tokaudit/corpus.hpp"
#include "tokaudit/entropy.hpp"
#include "tokaudit/error.hpp"
#include "tokaudit/hub_import.hpp"
#include "tokaudit/mitigation.hpp"
#include "tokaudit/scaling.hpp"
#include "tokaudit/trainer.hpp"
#include "tokaudit/vocab_io.hpp"

namespace tokaudit {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string read_stdin() {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
}

std::vector<fs::path> to_paths(const std::vector<std::string>& strings) {
    return {strings.begin(), strings.end()};
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot open " + path.string() + " for writing");
    }
    out << content;
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

void emit(const std::string& content, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << content;
    } else {
        write_text_file(out_path, content);
    }
}

std::vector<SecretPattern> patterns_from(const std::string& pattern_file) {
    return pattern_file.empty() ? bundled_patterns() : load_pattern_file(pattern_file);
}

std::vector<std::string> probe_alphabet_from(const std::string& chars) {
    if (chars.empty()) {
        return default_probe_alphabet();
    }
    return utf8_scalars(chars);
}

ordered_json entropy_report_json(const EntropyReport& r) {
    return ordered_json{{"level", entropy_level_name(r.level)},
                        {"scope", entropy_scope_name(r.scope)},
                        {"unique", r.unique_count},
                        {"entropy_bits", r.entropy_bits},
                        {"max_entropy_bits", r.max_entropy_bits},
                        {"normalized", r.normalized},
                        {"estimator", r.estimator}};
}

void register_train(CLI::App& app) {
    auto cmd = app.add_subcommand("train", "Train a BPE vocabulary on a corpus");
    auto corpus = std::make_shared<std::vector<std::string>>();
    auto target = std::make_shared<std::size_t>(512);
    auto mode = std::make_shared<std::string>("whitespace-keep-leading-space");
    auto lowercase = std::make_shared<bool>(false);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--corpus", *corpus, "Corpus files or directories")->required();
    cmd->add_option("--target-size", *target, "Total vocabulary size to reach");
    cmd->add_option("--pretoken", *mode, "Pre-tokenization mode");
    cmd->add_flag("--lowercase", *lowercase, "Lowercase before partitioning");
    cmd->add_option("--out", *out, "Vocabulary output file")->required();
    cmd->callback([=] {
        const Corpus c = ingest(to_paths(*corpus));
        const PreTokenRules rules{pretoken_mode_from_name(*mode), *lowercase};
        const std::vector<std::string> texts = c.texts();
        const Vocabulary vocab = train(texts, *target, rules);
        save_vocabulary(vocab, *out);
        std::cout << ordered_json{{"fingerprint", vocab.fingerprint()},
                                  {"size", vocab.size()},
                                  {"merges", vocab.merges().size()}}
                         .dump()
                  << "\n";
    });
}

void register_import(CLI::App& app) {
    auto cmd = app.add_subcommand("import", "Import a model-hub tokenizer definition file");
    auto file = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("--file", *file, "tokenizer.json path")->required();
    cmd->add_option("--out", *out, "Vocabulary output file")->required();
    cmd->callback([=] {
        const Vocabulary vocab = import_hub_file(*file);
        save_vocabulary(vocab, *out);
        std::cout << ordered_json{{"fingerprint", vocab.fingerprint()},
                                  {"size", vocab.size()},
                                  {"merges", vocab.merges().size()},
                                  {"note", vocab.note()}}
                         .dump()
                  << "\n";
    });
}

void register_encode(CLI::App& app) {
    auto cmd = app.add_subcommand("encode", "Encode text (stdin unless --text is given)");
    auto vocab_path = std::make_shared<std::string>();
    auto text = std::make_shared<std::string>();
    auto has_text = std::make_shared<bool>(false);
    auto guard = std::make_shared<bool>(false);
    auto pattern_file = std::make_shared<std::string>();
    cmd->add_option("--vocab", *vocab_path, "Vocabulary file")->required();
    cmd->add_option("--text", *text, "Text to encode")->trigger_on_parse()->each(
        [has_text](const std::string&) { *has_text = true; });
    cmd->add_flag("--guard", *guard, "Character-wise encoding inside secret spans");
    cmd->add_option("--patterns", *pattern_file, "Pattern file for --guard");
    cmd->callback([=] {
        const Vocabulary vocab = load_vocabulary(*vocab_path);
        const std::string input = *has_text ? *text : read_stdin();
        ordered_json out;
        if (*guard) {
            const GuardedEncoding enc = guard_encode(vocab, input, patterns_from(*pattern_file));
            out["ids"] = enc.ids;
            ordered_json spans = ordered_json::array();
            for (const GuardedEncoding::Span& s : enc.spans) {
                spans.push_back({{"offset", s.offset},
                                 {"length", s.length},
                                 {"pattern", s.pattern_name}});
            }
            out["spans"] = std::move(spans);
        } else {
            out["ids"] = vocab.encode(input).ids;
        }
        std::cout << out.dump() << "\n";
    });
}

void register_probe_grid(CLI::App& app) {
    auto cmd = app.add_subcommand("probe-grid", "Two-character tokenization grid");
    auto vocab_path = std::make_shared<std::string>();
    auto alphabet = std::make_shared<std::string>();
    auto space_prefix = std::make_shared<bool>(false);
    auto out_csv = std::make_shared<std::string>();
    auto out_pgm = std::make_shared<std::string>();
    auto out_svg = std::make_shared<std::string>();
    cmd->add_option("--vocab", *vocab_path, "Vocabulary file")->required();
    cmd->add_option("--alphabet", *alphabet, "Probe characters (default: 76-char set)");
    cmd->add_flag("--space-prefix", *space_prefix, "Feed space-prefixed pairs");
    cmd->add_option("--out-csv", *out_csv, "CSV output (stdout if omitted)");
    cmd->add_option("--out-pgm", *out_pgm, "PGM heatmap output");
    cmd->add_option("--out-svg", *out_svg, "SVG heatmap output");
    cmd->callback([=] {
        const Vocabulary vocab = load_vocabulary(*vocab_path);
        const GridProbe grid = probe_pairs(vocab, probe_alphabet_from(*alphabet), *space_prefix);
        emit(grid_to_csv(grid), *out_csv);
        if (!out_pgm->empty()) {
            write_text_file(*out_pgm, grid_to_pgm(grid));
        }
        if (!out_svg->empty()) {
            write_text_file(*out_svg, grid_to_svg(grid));
        }
    });
}

void register_entropy(CLI::App& app) {
    auto cmd = app.add_subcommand("entropy", "Entropy of text or a corpus");
    auto level = std::make_shared<std::string>("char");
    auto vocab_path = std::make_shared<std::string>();
    auto text = std::make_shared<std::string>();
    auto has_text = std::make_shared<bool>(false);
    auto corpus = std::make_shared<std::vector<std::string>>();
    cmd->add_option("--level", *level, "char or token")
        ->check(CLI::IsMember({"char", "token"}));
    cmd->add_option("--vocab", *vocab_path, "Vocabulary file (required for token level)");
    cmd->add_option("--text", *text, "Single sequence (scope: sequence)")
        ->trigger_on_parse()
        ->each([has_text](const std::string&) { *has_text = true; });
    cmd->add_option("--corpus", *corpus, "Corpus paths (scope: dataset, pooled)");
    cmd->callback([=] {
        std::vector<std::string> sequences;
        EntropyScope scope = EntropyScope::Dataset;
        if (!corpus->empty()) {
            sequences = ingest(to_paths(*corpus)).texts();
        } else {
            sequences.push_back(*has_text ? *text : read_stdin());
            scope = EntropyScope::Sequence;
        }
        const EntropyLevel lvl = *level == "token" ? EntropyLevel::Token : EntropyLevel::Char;
        std::map<std::string, std::uint64_t> counts;
        if (lvl == EntropyLevel::Token) {
            if (vocab_path->empty()) {
                throw ValidationError("token-level entropy needs --vocab");
            }
            const Vocabulary vocab = load_vocabulary(*vocab_path);
            counts = token_counts(sequences, vocab);
        } else {
            counts = char_counts(sequences);
        }
        if (counts.empty()) {
            throw ValidationError("input contains no elements");
        }
        std::cout << entropy_report_json(report_from_counts(lvl, scope, counts)).dump() << "\n";
    });
}

void register_pattern_entropy(CLI::App& app) {
    auto cmd = app.add_subcommand("pattern-entropy", "Analytical char-level pattern entropy");
    auto regex = std::make_shared<std::string>();
    auto pattern_file = std::make_shared<std::string>();
    auto name = std::make_shared<std::string>();
    cmd->add_option("--regex", *regex, "Pattern regex");
    cmd->add_option("--patterns", *pattern_file, "Pattern file");
    cmd->add_option("--name", *name, "Pattern name inside --patterns");
    cmd->callback([=] {
        SecretPattern pattern;
        if (!regex->empty()) {
            pattern = parse_pattern(*regex, "cli");
        } else if (!pattern_file->empty()) {
            const std::vector<SecretPattern> patterns = load_pattern_file(*pattern_file);
            const auto it = std::find_if(patterns.begin(), patterns.end(),
                                         [&](const SecretPattern& p) { return p.name == *name; });
            if (it == patterns.end()) {
                throw ValidationError("pattern \"" + *name + "\" not found in " + *pattern_file);
            }
            pattern = *it;
        } else {
            throw ValidationError("pattern-entropy needs --regex or --patterns/--name");
        }
        const PatternEntropyReport report = pattern_char_entropy(pattern);
        ordered_json expected = ordered_json::object();
        for (const auto& [symbol, count] : report.expected_counts) {
            expected[symbol] = count;
        }
        std::cout << ordered_json{{"regex", pattern.source_regex},
                                  {"entropy_bits", report.entropy_bits},
                                  {"max_entropy_bits", report.max_entropy_bits},
                                  {"normalized", report.normalized},
                                  {"support", report.expected_counts.size()},
                                  {"expected_counts", std::move(expected)}}
                         .dump()
                  << "\n";
    });
}

void register_gen_secrets(CLI::App& app) {
    auto cmd = app.add_subcommand("gen-secrets", "Generate secrets from a pattern");
    auto regex = std::make_shared<std::string>();
    auto pattern_file = std::make_shared<std::string>();
    auto name = std::make_shared<std::string>();
    auto count = std::make_shared<std::size_t>(1);
    auto seed = std::make_shared<std::uint64_t>(0);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--regex", *regex, "Pattern regex");
    cmd->add_option("--patterns", *pattern_file, "Pattern file (default: bundled)");
    cmd->add_option("--name", *name, "Pattern name (all patterns if omitted)");
    cmd->add_option("--count", *count, "Secrets per pattern");
    cmd->add_option("--seed", *seed, "Generator seed");
    cmd->add_option("--out", *out, "Output file (stdout if omitted)");
    cmd->callback([=] {
        std::vector<SecretPattern> patterns;
        if (!regex->empty()) {
            patterns.push_back(parse_pattern(*regex, "cli"));
        } else {
            patterns = patterns_from(*pattern_file);
            if (!name->empty()) {
                std::erase_if(patterns,
                              [&](const SecretPattern& p) { return p.name != *name; });
                if (patterns.empty()) {
                    throw ValidationError("pattern \"" + *name + "\" not found");
                }
            }
        }
        std::string output;
        for (std::size_t i = 0; i < patterns.size(); ++i) {
            for (std::string& s : generate(patterns[i], *count, *seed + i)) {
                output += s;
                output += '\n';
            }
        }
        emit(output, *out);
    });
}

void register_scan(CLI::App& app) {
    auto cmd = app.add_subcommand("scan", "Scan a corpus for secret patterns");
    auto corpus = std::make_shared<std::vector<std::string>>();
    auto pattern_file = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("--corpus", *corpus, "Corpus files or directories")->required();
    cmd->add_option("--patterns", *pattern_file, "Pattern file (default: bundled)");
    cmd->add_option("--out", *out, "CSV output (stdout if omitted)");
    cmd->callback([=] {
        const Corpus c = ingest(to_paths(*corpus));
        const std::vector<SecretRecord> records = scan(c, patterns_from(*pattern_file));
        std::string csv = "document_id,offset,length,pattern,value\n";
        for (const SecretRecord& r : records) {
            csv += nlohmann::json(r.document_id).dump();
            csv += ',';
            csv += std::to_string(r.offset);
            csv += ',';
            csv += std::to_string(r.length);
            csv += ',';
            csv += r.pattern_name;
            csv += ',';
            csv += nlohmann::json(r.value).dump();
            csv += '\n';
        }
        emit(csv, *out);
    });
}

void register_kl(CLI::App& app) {
    auto cmd = app.add_subcommand("kl", "KL divergence between two corpora");
    auto vocab_path = std::make_shared<std::string>();
    auto p_paths = std::make_shared<std::vector<std::string>>();
    auto q_paths = std::make_shared<std::vector<std::string>>();
    auto level = std::make_shared<std::string>("token");
    auto epsilon = std::make_shared<double>(1e-9);
    cmd->add_option("--vocab", *vocab_path, "Vocabulary file (token level)");
    cmd->add_option("--p", *p_paths, "P corpus paths")->required();
    cmd->add_option("--q", *q_paths, "Q corpus paths (reference)")->required();
    cmd->add_option("--level", *level, "token or char")->check(CLI::IsMember({"token", "char"}));
    cmd->add_option("--epsilon", *epsilon, "Smoothing mass for missing outcomes");
    cmd->callback([=] {
        const std::vector<std::string> p_texts = ingest(to_paths(*p_paths)).texts();
        const std::vector<std::string> q_texts = ingest(to_paths(*q_paths)).texts();
        std::map<std::string, std::uint64_t> p_counts;
        std::map<std::string, std::uint64_t> q_counts;
        if (*level == "token") {
            if (vocab_path->empty()) {
                throw ValidationError("token-level KL needs --vocab");
            }
            const Vocabulary vocab = load_vocabulary(*vocab_path);
            p_counts = token_counts(p_texts, vocab);
            q_counts = token_counts(q_texts, vocab);
        } else {
            p_counts = char_counts(p_texts);
            q_counts = char_counts(q_texts);
        }
        const double kl = kl_divergence(distribution_from_counts(p_counts),
                                        distribution_from_counts(q_counts), *epsilon);
        std::cout << ordered_json{{"kl_divergence_bits", kl}, {"epsilon", *epsilon}}.dump()
                  << "\n";
    });
}

void register_hist_lengths(CLI::App& app) {
    auto cmd = app.add_subcommand("hist-lengths", "Token-length histogram of a corpus");
    auto vocab_path = std::make_shared<std::string>();
    auto corpus = std::make_shared<std::vector<std::string>>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("--vocab", *vocab_path, "Vocabulary file")->required();
    cmd->add_option("--corpus", *corpus, "Corpus files or directories")->required();
    cmd->add_option("--out", *out, "CSV output (stdout if omitted)");
    cmd->callback([=] {
        const Vocabulary vocab = load_vocabulary(*vocab_path);
        const std::vector<std::string> texts = ingest(to_paths(*corpus)).texts();
        emit(histogram_to_csv(length_histogram(vocab, texts)), *out);
    });
}

void register_rank_freq(CLI::App& app) {
    auto cmd = app.add_subcommand("rank-freq", "Rank-frequency comparison of two corpora");
    auto vocab_path = std::make_shared<std::string>();
    auto p_paths = std::make_shared<std::vector<std::string>>();
    auto q_paths = std::make_shared<std::vector<std::string>>();
    auto top_k = std::make_shared<std::size_t>(150);
    auto epsilon = std::make_shared<double>(1e-9);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--vocab", *vocab_path, "Vocabulary file")->required();
    cmd->add_option("--p", *p_paths, "P corpus paths (ranked)")->required();
    cmd->add_option("--q", *q_paths, "Q corpus paths (reference)")->required();
    cmd->add_option("--top-k", *top_k, "Rows to keep");
    cmd->add_option("--epsilon", *epsilon, "Smoothing floor for tokens absent from Q");
    cmd->add_option("--out", *out, "CSV output (stdout if omitted)");
    cmd->callback([=] {
        const Vocabulary vocab = load_vocabulary(*vocab_path);
        const std::vector<std::string> p_texts = ingest(to_paths(*p_paths)).texts();
        const std::vector<std::string> q_texts = ingest(to_paths(*q_paths)).texts();
        emit(rank_frequency_to_csv(rank_frequency(vocab, p_texts, q_texts, *top_k, *epsilon)),
             *out);
    });
}

void register_identify_gibberish(CLI::App& app) {
    auto cmd = app.add_subcommand("identify-gibberish", "Score gibberish token candidates");
    auto vocab_path = std::make_shared<std::string>();
    auto normal = std::make_shared<std::vector<std::string>>();
    auto secret = std::make_shared<std::vector<std::string>>();
    auto top_k = std::make_shared<std::size_t>(50);
    auto epsilon = std::make_shared<double>(kDefaultGibberishEpsilon);
    auto mode = std::make_shared<std::string>("shared");
    auto out = std::make_shared<std::string>();
    auto strip_out = std::make_shared<std::string>();
    cmd->add_option("--vocab", *vocab_path, "Vocabulary file")->required();
    cmd->add_option("--normal", *normal, "Normal corpus paths")->required();
    cmd->add_option("--secret", *secret, "Secret corpus paths")->required();
    cmd->add_option("--top-k", *top_k, "Candidates to keep");
    cmd->add_option("--epsilon", *epsilon, "Ratio smoothing");
    cmd->add_option("--mode", *mode, "shared (one vocabulary) or vocab-diff (two tokenizers)")
        ->check(CLI::IsMember({"shared", "vocab-diff"}));
    cmd->add_option("--out", *out, "CSV output (stdout if omitted)");
    cmd->add_option("--strip-set", *strip_out, "Also write a strip-set file");
    cmd->callback([=] {
        const Vocabulary vocab = load_vocabulary(*vocab_path);
        const std::vector<std::string> normal_texts = ingest(to_paths(*normal)).texts();
        const std::vector<std::string> secret_texts = ingest(to_paths(*secret)).texts();
        const std::vector<GibberishScore> scores =
            *mode == "vocab-diff"
                ? identify_gibberish_vocab_diff(normal_texts, secret_texts, vocab, *top_k,
                                                *epsilon)
                : identify_gibberish(normal_texts, secret_texts, vocab, *top_k, *epsilon);
        emit(gibberish_to_csv(scores), *out);
        if (!strip_out->empty()) {
            ordered_json provenance{{"mode", *mode},
                                    {"top_k", *top_k},
                                    {"epsilon", *epsilon},
                                    {"vocab_fingerprint", vocab.fingerprint()}};
            save_strip_set(strip_set_from_scores(scores, provenance), vocab, *strip_out);
        }
    });
}

void register_strip(CLI::App& app) {
    auto cmd = app.add_subcommand("strip", "Delete gibberish token mappings from a vocabulary");
    auto vocab_path = std::make_shared<std::string>();
    auto strip_file = std::make_shared<std::string>();
    auto ids = std::make_shared<std::vector<int>>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("--vocab", *vocab_path, "Vocabulary file")->required();
    cmd->add_option("--strip-set", *strip_file, "Strip-set JSON file");
    cmd->add_option("--ids", *ids, "Token ids to strip");
    cmd->add_option("--out", *out, "Stripped vocabulary output")->required();
    cmd->callback([=] {
        const Vocabulary vocab = load_vocabulary(*vocab_path);
        StripSet strip;
        if (!strip_file->empty()) {
            strip = load_strip_set(*strip_file);
        }
        strip.ids.insert(strip.ids.end(), ids->begin(), ids->end());
        std::sort(strip.ids.begin(), strip.ids.end());
        strip.ids.erase(std::unique(strip.ids.begin(), strip.ids.end()), strip.ids.end());
        if (strip.ids.empty()) {
            throw ValidationError("strip needs --strip-set or --ids");
        }
        const Vocabulary stripped = strip_tokens(vocab, strip);
        save_vocabulary(stripped, *out);
        std::cout << ordered_json{{"fingerprint", stripped.fingerprint()},
                                  {"size", stripped.size()},
                                  {"merges", stripped.merges().size()},
                                  {"removed_tokens", vocab.size() - stripped.size()}}
                         .dump()
                  << "\n";
    });
}

void register_suggest_vocab(CLI::App& app) {
    auto cmd = app.add_subcommand("suggest-vocab", "Power-law optimal vocabulary size");
    auto params = std::make_shared<double>(0.0);
    auto model_file = std::make_shared<std::string>();
    cmd->add_option("--params", *params, "Model parameter count (e.g. 7e9)")->required();
    cmd->add_option("--model", *model_file, "Scaling model file (default: bundled)");
    cmd->callback([=] {
        const VocabScalingModel model =
            model_file->empty() ? bundled_scaling_model() : load_scaling_model(*model_file);
        std::cout << suggest_vocab_size(model, *params) << "\n";
    });
}

void register_stats(CLI::App& app) {
    auto cmd = app.add_subcommand("stats", "Char/token entropy table for labeled sets");
    auto vocab_path = std::make_shared<std::string>();
    auto sets = std::make_shared<std::vector<std::string>>();
    auto out = std::make_shared<std::string>();
    auto json_out = std::make_shared<bool>(false);
    cmd->add_option("--vocab", *vocab_path, "Vocabulary file")->required();
    cmd->add_option("--set", *sets, "label=path entries (repeatable)")->required();
    cmd->add_option("--out", *out, "CSV output (stdout if omitted)");
    cmd->add_flag("--json", *json_out, "Emit JSON instead of CSV");
    cmd->callback([=] {
        const Vocabulary vocab = load_vocabulary(*vocab_path);
        std::map<std::string, std::vector<std::string>> labeled;
        for (const std::string& entry : *sets) {
            const auto eq = entry.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 == entry.size()) {
                throw ValidationError("--set entries must look like label=path, got \"" + entry +
                                      "\"");
            }
            labeled[entry.substr(0, eq)] =
                ingest({fs::path(entry.substr(eq + 1))}).texts();
        }
        const std::vector<LabeledEntropyReport> rows = dataset_stats(labeled, vocab);
        if (*json_out) {
            ordered_json j = ordered_json::array();
            for (const LabeledEntropyReport& row : rows) {
                ordered_json entry;
                entry["label"] = row.label;
                entry.update(entropy_report_json(row.report));
                j.push_back(std::move(entry));
            }
            emit(j.dump(2) + "\n", *out);
        } else {
            emit(stats_to_csv(rows), *out);
        }
    });
}

void register_audit(CLI::App& app) {
    auto cmd = app.add_subcommand("audit", "Run the full audit pipeline");
    auto config_file = std::make_shared<std::string>();
    auto corpus = std::make_shared<std::vector<std::string>>();
    auto import_path = std::make_shared<std::string>();
    auto target = std::make_shared<std::size_t>(0);
    auto pattern_file = std::make_shared<std::string>();
    auto out_dir = std::make_shared<std::string>();
    auto seed = std::make_shared<std::uint64_t>(0);
    auto secrets = std::make_shared<std::size_t>(0);
    auto strip_top_k = std::make_shared<long long>(-1);
    const auto corpus_opt = cmd->add_option("--corpus", *corpus, "Corpus paths");
    cmd->add_option("--config", *config_file, "Audit config JSON file");
    const auto import_opt = cmd->add_option("--import", *import_path, "Tokenizer import path");
    const auto target_opt = cmd->add_option("--target-size", *target, "Training target size");
    const auto patterns_opt = cmd->add_option("--patterns", *pattern_file, "Pattern file");
    const auto out_opt = cmd->add_option("--out-dir", *out_dir, "Output directory");
    const auto seed_opt = cmd->add_option("--seed", *seed, "Run seed");
    const auto secrets_opt =
        cmd->add_option("--secrets-per-pattern", *secrets, "Generated secrets per pattern");
    const auto strip_opt =
        cmd->add_option("--strip-top-k", *strip_top_k, "Strip stage size (0 disables)");
    cmd->callback([=] {
        // precedence: flags > config file > built-in defaults; the output
        // directory alone may also come from TOKAUDIT_OUT_DIR
        AuditConfig config;
        if (!config_file->empty()) {
            config = load_config(*config_file);
        }
        if (corpus_opt->count() > 0) {
            config.corpus_paths = *corpus;
        }
        if (import_opt->count() > 0) {
            config.import_path = *import_path;
        }
        if (target_opt->count() > 0) {
            config.train_target_size = *target;
        }
        if (patterns_opt->count() > 0) {
            config.pattern_file = *pattern_file;
        }
        if (out_opt->count() > 0) {
            config.output_dir = *out_dir;
        } else if (config.output_dir.empty()) {
            if (const char* env = std::getenv("TOKAUDIT_OUT_DIR")) {
                config.output_dir = env;
            }
        }
        if (seed_opt->count() > 0) {
            config.seed = *seed;
        }
        if (secrets_opt->count() > 0) {
            config.secrets_per_pattern = *secrets;
        }
        if (strip_opt->count() > 0) {
            config.strip_top_k = *strip_top_k < 0 ? 0 : static_cast<std::size_t>(*strip_top_k);
        }
        run_audit(config);
        std::cout << "report written to " << (fs::path(config.output_dir) / "report.json").string()
                  << "\n";
    });
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"tokaudit: BPE tokenizer training, import, and gibberish-bias auditing"};
    app.set_version_flag("--version", std::string("tokaudit ") + kToolVersion +
                                          " (vocabulary format " +
                                          std::to_string(kVocabFormatVersion) + ")");
    app.require_subcommand(1);

    register_train(app);
    register_import(app);
    register_encode(app);
    register_probe_grid(app);
    register_entropy(app);
    register_pattern_entropy(app);
    register_gen_secrets(app);
    register_scan(app);
    register_kl(app);
    register_hist_lengths(app);
    register_rank_freq(app);
    register_identify_gibberish(app);
    register_strip(app);
    register_suggest_vocab(app);
    register_stats(app);
    register_audit(app);

    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<std::string> storage;
    storage.reserve(args.size() + 1);
    storage.push_back("tokaudit");
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(storage.size());
    for (const std::string& s : storage) {
        argv.push_back(s.c_str());
    }
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace tokaudit
