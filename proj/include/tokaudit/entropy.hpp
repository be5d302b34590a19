#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tokaudit/patterns.hpp"
#include "tokaudit/vocabulary.hpp"

namespace tokaudit {

// Empirical outcome distribution. probabilities sum to 1 (within 1e-9) and
// every stored probability is positive.
struct DistributionTable {
    std::map<std::string, double> probabilities;
    std::size_t support_size = 0;
    std::uint64_t total_observations = 0;
};

DistributionTable empirical_distribution(std::span<const std::string> elements);
DistributionTable distribution_from_counts(const std::map<std::string, std::uint64_t>& counts);

// Shannon entropy in bits; zero-probability outcomes contribute nothing.
double entropy(const DistributionTable& dist);

// entropy_bits / log2(unique_count). By convention a single-outcome space is
// maximal, so unique_count == 1 yields 1.0 (0/0 is otherwise undefined).
double normalized_entropy(double entropy_bits, std::size_t unique_count);

enum class EntropyLevel { Char, Token };
enum class EntropyScope { Sequence, Dataset };

struct EntropyReport {
    EntropyLevel level = EntropyLevel::Char;
    EntropyScope scope = EntropyScope::Dataset;
    std::size_t unique_count = 0;
    double entropy_bits = 0.0;
    double max_entropy_bits = 0.0;
    double normalized = 0.0;
    // The upstream level-set outcome-space construction is undisclosed; this
    // tool substitutes the empirical pooled distribution and says so in every
    // serialized report.
    std::string estimator = "empirical-pooled";
};

EntropyReport report_from_counts(EntropyLevel level,
                                 EntropyScope scope,
                                 const std::map<std::string, std::uint64_t>& counts);

// Pooled char-level element counts of a set of sequences.
std::map<std::string, std::uint64_t> char_counts(std::span<const std::string> sequences);
// Pooled token-id counts of a set of sequences under `vocab`.
std::map<std::string, std::uint64_t> token_counts(std::span<const std::string> sequences,
                                                  const Vocabulary& vocab);

struct LabeledEntropyReport {
    std::string label;
    EntropyReport report;
};

// Table-2-shaped statistics: for each labeled set, one pooled char-level and
// one pooled token-level report (labels in map order, char before token).
std::vector<LabeledEntropyReport> dataset_stats(
    const std::map<std::string, std::vector<std::string>>& labeled_sets,
    const Vocabulary& vocab);

std::string stats_to_csv(const std::vector<LabeledEntropyReport>& rows);

const char* entropy_level_name(EntropyLevel level);
const char* entropy_scope_name(EntropyScope scope);

// ---- Analytical pattern entropy ----

struct PatternEntropyReport {
    std::map<std::string, double> expected_counts;  // symbol -> expected occurrences
    double entropy_bits = 0.0;
    double max_entropy_bits = 0.0;
    double normalized = 0.0;
};

// Expected per-symbol counts of one generated string: literal occurrences
// plus repeat/|class| for every class containing the symbol, normalized to
// frequencies.
PatternEntropyReport pattern_char_entropy(const SecretPattern& pattern);

}  // namespace tokaudit
