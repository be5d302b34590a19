#include "tokaudit/entropy.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "tokaudit/error.hpp"

namespace tokaudit {

namespace {

void check_distribution(const DistributionTable& dist) {
    if (dist.probabilities.empty()) {
        throw ValidationError("empty distribution");
    }
    double sum = 0.0;
    for (const auto& [outcome, p] : dist.probabilities) {
        if (p <= 0.0) {
            throw ValidationError("non-positive probability for outcome \"" + outcome + "\"");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ValidationError("distribution does not sum to 1");
    }
    if (dist.support_size != dist.probabilities.size()) {
        throw ValidationError("support_size does not match stored outcomes");
    }
}

}  // namespace

DistributionTable empirical_distribution(std::span<const std::string> elements) {
    if (elements.empty()) {
        throw ValidationError("cannot build a distribution from an empty element list");
    }
    std::map<std::string, std::uint64_t> counts;
    for (const std::string& e : elements) {
        counts[e] += 1;
    }
    return distribution_from_counts(counts);
}

DistributionTable distribution_from_counts(const std::map<std::string, std::uint64_t>& counts) {
    if (counts.empty()) {
        throw ValidationError("cannot build a distribution from empty counts");
    }
    DistributionTable dist;
    std::uint64_t total = 0;
    for (const auto& [outcome, count] : counts) {
        total += count;
    }
    if (total == 0) {
        throw ValidationError("cannot build a distribution from all-zero counts");
    }
    for (const auto& [outcome, count] : counts) {
        if (count > 0) {
            dist.probabilities.emplace(outcome, static_cast<double>(count) /
                                                    static_cast<double>(total));
        }
    }
    dist.support_size = dist.probabilities.size();
    dist.total_observations = total;
    return dist;
}

double entropy(const DistributionTable& dist) {
    check_distribution(dist);
    double h = 0.0;
    for (const auto& [outcome, p] : dist.probabilities) {
        h -= p * std::log2(p);
    }
    return h < 0.0 ? 0.0 : h;
}

double normalized_entropy(double entropy_bits, std::size_t unique_count) {
    if (unique_count == 0) {
        throw ValidationError("normalized entropy is undefined for an empty outcome space");
    }
    if (unique_count == 1) {
        return 1.0;
    }
    return entropy_bits / std::log2(static_cast<double>(unique_count));
}

EntropyReport report_from_counts(EntropyLevel level,
                                 EntropyScope scope,
                                 const std::map<std::string, std::uint64_t>& counts) {
    const DistributionTable dist = distribution_from_counts(counts);
    EntropyReport report;
    report.level = level;
    report.scope = scope;
    report.unique_count = dist.support_size;
    report.entropy_bits = entropy(dist);
    report.max_entropy_bits =
        dist.support_size <= 1 ? 0.0 : std::log2(static_cast<double>(dist.support_size));
    report.normalized = normalized_entropy(report.entropy_bits, report.unique_count);
    return report;
}

std::map<std::string, std::uint64_t> char_counts(std::span<const std::string> sequences) {
    std::map<std::string, std::uint64_t> counts;
    for (const std::string& s : sequences) {
        std::size_t pos = 0;
        while (pos < s.size()) {
            std::uint32_t cp = 0;
            const std::size_t n = utf8_decode(s, pos, cp);
            counts[s.substr(pos, n)] += 1;
            pos += n;
        }
    }
    return counts;
}

std::map<std::string, std::uint64_t> token_counts(std::span<const std::string> sequences,
                                                  const Vocabulary& vocab) {
    std::map<std::string, std::uint64_t> counts;
    for (const std::string& s : sequences) {
        for (const int id : vocab.encode(s).ids) {
            counts[std::to_string(id)] += 1;
        }
    }
    return counts;
}

std::vector<LabeledEntropyReport> dataset_stats(
    const std::map<std::string, std::vector<std::string>>& labeled_sets,
    const Vocabulary& vocab) {
    std::vector<LabeledEntropyReport> rows;
    for (const auto& [label, sequences] : labeled_sets) {
        if (sequences.empty()) {
            throw ValidationError("labeled set \"" + label + "\" is empty");
        }
        const auto chars = char_counts(sequences);
        if (chars.empty()) {
            throw ValidationError("labeled set \"" + label + "\" contains no characters");
        }
        rows.push_back({label, report_from_counts(EntropyLevel::Char, EntropyScope::Dataset, chars)});
        const auto tokens = token_counts(sequences, vocab);
        rows.push_back(
            {label, report_from_counts(EntropyLevel::Token, EntropyScope::Dataset, tokens)});
    }
    return rows;
}

std::string stats_to_csv(const std::vector<LabeledEntropyReport>& rows) {
    std::string out = "label,level,unique,entropy_bits,max_entropy_bits,normalized\n";
    for (const LabeledEntropyReport& row : rows) {
        out += row.label;
        out += ',';
        out += entropy_level_name(row.report.level);
        out += ',';
        out += std::to_string(row.report.unique_count);
        out += ',';
        out += nlohmann::json(row.report.entropy_bits).dump();
        out += ',';
        out += nlohmann::json(row.report.max_entropy_bits).dump();
        out += ',';
        out += nlohmann::json(row.report.normalized).dump();
        out += '\n';
    }
    return out;
}

const char* entropy_level_name(EntropyLevel level) {
    return level == EntropyLevel::Char ? "char" : "token";
}

const char* entropy_scope_name(EntropyScope scope) {
    return scope == EntropyScope::Sequence ? "sequence" : "dataset";
}

PatternEntropyReport pattern_char_entropy(const SecretPattern& pattern) {
    if (pattern.segments.empty()) {
        throw ValidationError("pattern has no segments");
    }
    PatternEntropyReport report;
    double total = 0.0;
    for (const PatternSegment& seg : pattern.segments) {
        if (seg.kind == PatternSegment::Kind::Literal) {
            for (const std::string& s : utf8_scalars(seg.literal)) {
                report.expected_counts[s] += 1.0;
                total += 1.0;
            }
        } else {
            const double share =
                static_cast<double>(seg.repeat) / static_cast<double>(seg.charset.size());
            for (const std::string& s : seg.charset) {
                report.expected_counts[s] += share;
            }
            total += static_cast<double>(seg.repeat);
        }
    }
    double h = 0.0;
    for (const auto& [symbol, count] : report.expected_counts) {
        const double p = count / total;
        h -= p * std::log2(p);
    }
    report.entropy_bits = h < 0.0 ? 0.0 : h;
    const std::size_t support = report.expected_counts.size();
    report.max_entropy_bits = support <= 1 ? 0.0 : std::log2(static_cast<double>(support));
    report.normalized = normalized_entropy(report.entropy_bits, support);
    return report;
}

}  // namespace tokaudit
