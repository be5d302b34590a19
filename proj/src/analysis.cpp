#include "tokaudit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "tokaudit/error.hpp"

namespace tokaudit {

const std::vector<std::string>& default_probe_alphabet() {
    static const std::vector<std::string> alphabet = [] {
        std::vector<std::string> a;
        for (char c = 'a'; c <= 'z'; ++c) {
            a.emplace_back(1, c);
        }
        for (char c = 'A'; c <= 'Z'; ++c) {
            a.emplace_back(1, c);
        }
        for (char c = '0'; c <= '9'; ++c) {
            a.emplace_back(1, c);
        }
        for (const char c : std::string("-_+/=.:@#!$%&?")) {
            a.emplace_back(1, c);
        }
        return a;
    }();
    return alphabet;
}

GridProbe probe_pairs(const Vocabulary& vocab,
                      const std::vector<std::string>& alphabet,
                      bool space_prefixed) {
    if (alphabet.empty()) {
        throw ValidationError("probe alphabet is empty");
    }
    GridProbe grid;
    grid.alphabet = alphabet;
    grid.space_prefixed = space_prefixed;
    const std::size_t n = alphabet.size();
    grid.matrix.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            std::string pair;
            if (space_prefixed) {
                pair = " ";
            }
            pair += alphabet[i];
            pair += alphabet[j];
            grid.matrix[i * n + j] = static_cast<int>(vocab.encode(pair).ids.size());
        }
    }
    return grid;
}

std::string grid_to_csv(const GridProbe& grid) {
    std::string out = "char1,char2,token_count\n";
    const std::size_t n = grid.alphabet.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            out += nlohmann::json(grid.alphabet[i]).dump();
            out += ',';
            out += nlohmann::json(grid.alphabet[j]).dump();
            out += ',';
            out += std::to_string(grid.at(i, j));
            out += '\n';
        }
    }
    return out;
}

std::string grid_to_pgm(const GridProbe& grid) {
    const std::size_t n = grid.alphabet.size();
    const int max_count = *std::max_element(grid.matrix.begin(), grid.matrix.end());
    std::string out = "P2\n" + std::to_string(n) + " " + std::to_string(n) + "\n" +
                      std::to_string(std::max(max_count, 1)) + "\n";
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j > 0) {
                out += ' ';
            }
            out += std::to_string(grid.at(i, j));
        }
        out += '\n';
    }
    return out;
}

std::string grid_to_svg(const GridProbe& grid) {
    const std::size_t n = grid.alphabet.size();
    const int cell = 8;
    const int max_count = std::max(*std::max_element(grid.matrix.begin(), grid.matrix.end()), 1);
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      std::to_string(n * cell) + "\" height=\"" + std::to_string(n * cell) +
                      "\">\n";
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const int v = grid.at(i, j);
            const int shade = 255 - (v * 255) / max_count;
            out += "<rect x=\"" + std::to_string(j * cell) + "\" y=\"" + std::to_string(i * cell) +
                   "\" width=\"" + std::to_string(cell) + "\" height=\"" + std::to_string(cell) +
                   "\" fill=\"rgb(" + std::to_string(shade) + "," + std::to_string(shade) + ",0)\"/>\n";
        }
    }
    out += "</svg>\n";
    return out;
}

LengthHistogram length_histogram(const Vocabulary& vocab, std::span<const std::string> texts) {
    LengthHistogram hist;
    for (const std::string& text : texts) {
        for (const int id : vocab.encode(text).ids) {
            hist.counts[vocab.token_char_length(id)] += 1;
            hist.total_tokens += 1;
        }
    }
    return hist;
}

std::string histogram_to_csv(const LengthHistogram& hist) {
    std::string out = "char_length,token_count\n";
    for (const auto& [length, count] : hist.counts) {
        out += std::to_string(length) + "," + std::to_string(count) + "\n";
    }
    return out;
}

namespace {

std::map<std::string, std::uint64_t> token_string_counts(const Vocabulary& vocab,
                                                         std::span<const std::string> texts,
                                                         std::uint64_t& total) {
    std::map<std::string, std::uint64_t> counts;
    total = 0;
    for (const std::string& text : texts) {
        for (const int id : vocab.encode(text).ids) {
            counts[*vocab.token_of(id)] += 1;
            ++total;
        }
    }
    return counts;
}

}  // namespace

RankFrequencyTable rank_frequency(const Vocabulary& vocab,
                                  std::span<const std::string> p_texts,
                                  std::span<const std::string> q_texts,
                                  std::size_t top_k,
                                  double epsilon) {
    if (epsilon <= 0.0) {
        throw ValidationError("epsilon must be positive");
    }
    std::uint64_t p_total = 0;
    std::uint64_t q_total = 0;
    const auto p_counts = token_string_counts(vocab, p_texts, p_total);
    const auto q_counts = token_string_counts(vocab, q_texts, q_total);
    if (p_total == 0 || q_total == 0) {
        throw ValidationError("rank-frequency comparison needs non-empty corpora on both sides");
    }

    // Smoothed Q over the union support: present outcomes keep their mass,
    // absent ones get epsilon, then everything renormalizes.
    std::size_t absent = 0;
    for (const auto& [token, count] : p_counts) {
        if (!q_counts.count(token)) {
            ++absent;
        }
    }
    const double q_norm = 1.0 + epsilon * static_cast<double>(absent);

    std::vector<RankFrequencyTable::Row> rows;
    rows.reserve(p_counts.size());
    for (const auto& [token, count] : p_counts) {
        RankFrequencyTable::Row row;
        row.token = token;
        row.p_proportion = static_cast<double>(count) / static_cast<double>(p_total);
        const auto qit = q_counts.find(token);
        const double q_raw = qit == q_counts.end()
                                 ? epsilon
                                 : static_cast<double>(qit->second) / static_cast<double>(q_total);
        row.q_proportion = q_raw / q_norm;
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(),
              [](const RankFrequencyTable::Row& a, const RankFrequencyTable::Row& b) {
                  if (a.p_proportion != b.p_proportion) {
                      return a.p_proportion > b.p_proportion;
                  }
                  return a.token < b.token;
              });
    if (rows.size() > top_k) {
        rows.resize(top_k);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].rank = i + 1;
    }

    RankFrequencyTable table;
    table.rows = std::move(rows);
    table.top_k = top_k;
    table.epsilon = epsilon;
    return table;
}

std::string rank_frequency_to_csv(const RankFrequencyTable& table) {
    std::string out = "token,rank,p_proportion,q_proportion\n";
    for (const RankFrequencyTable::Row& row : table.rows) {
        out += nlohmann::json(row.token).dump();
        out += ',';
        out += std::to_string(row.rank);
        out += ',';
        out += nlohmann::json(row.p_proportion).dump();
        out += ',';
        out += nlohmann::json(row.q_proportion).dump();
        out += '\n';
    }
    return out;
}

double kl_divergence(const DistributionTable& p, const DistributionTable& q, double epsilon) {
    if (epsilon <= 0.0) {
        throw ValidationError("epsilon must be positive");
    }
    std::set<std::string> support;
    for (const auto& [outcome, prob] : p.probabilities) {
        support.insert(outcome);
    }
    for (const auto& [outcome, prob] : q.probabilities) {
        support.insert(outcome);
    }
    double p_norm = 1.0;
    double q_norm = 1.0;
    for (const std::string& outcome : support) {
        if (!p.probabilities.count(outcome)) {
            p_norm += epsilon;
        }
        if (!q.probabilities.count(outcome)) {
            q_norm += epsilon;
        }
    }
    double kl = 0.0;
    for (const std::string& outcome : support) {
        const auto pit = p.probabilities.find(outcome);
        const auto qit = q.probabilities.find(outcome);
        const double pv = (pit == p.probabilities.end() ? epsilon : pit->second) / p_norm;
        const double qv = (qit == q.probabilities.end() ? epsilon : qit->second) / q_norm;
        kl += pv * std::log2(pv / qv);
    }
    return kl;
}

}  // namespace tokaudit
