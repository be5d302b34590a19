#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tokaudit/text.hpp"

namespace tokaudit {

inline constexpr const char* kToolVersion = "0.1.0";

// Everything the audit pipeline needs; validated up front and echoed into
// the report so any number in it can be recomputed from the echo.
struct AuditConfig {
    std::vector<std::string> corpus_paths;

    // empty import_path: train on the ingested corpus
    std::string import_path;
    std::size_t train_target_size = 512;
    PreTokenRules pretoken;

    std::string pattern_file;     // empty: bundled patterns
    std::string probe_alphabet;   // empty: default 76 characters
    double kl_epsilon = 1e-9;
    std::size_t rank_top_k = 150;
    std::size_t gibberish_top_k = 50;
    double gibberish_epsilon = 0.5;
    std::size_t strip_top_k = 50;  // 0 disables the strip stage
    std::size_t secrets_per_pattern = 50;
    std::uint64_t seed = 42;
    std::string output_dir;
};

nlohmann::ordered_json config_to_json(const AuditConfig& config);
AuditConfig config_from_json(const nlohmann::json& j);
AuditConfig load_config(const std::filesystem::path& path);

void validate_config(const AuditConfig& config);

// Runs the full pipeline (ingest, tokenizer, secrets, stats, histogram,
// rank-frequency, KL, gibberish, optional strip) and writes report.json plus
// CSV sidecars into config.output_dir. The report is written atomically and
// a failed run removes its partial outputs. Returns the report.
nlohmann::ordered_json run_audit(const AuditConfig& config);

}  // namespace tokaudit
