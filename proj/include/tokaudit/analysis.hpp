#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tokaudit/entropy.hpp"
#include "tokaudit/vocabulary.hpp"

namespace tokaudit {

// Exhaustive two-character tokenization probe: cell (i, j) holds the token
// count of alphabet[i] + alphabet[j] (optionally space-prefixed, which is
// recorded in the output since the upstream choice is unknown).
struct GridProbe {
    std::vector<std::string> alphabet;
    std::vector<int> matrix;  // row-major, alphabet.size()^2 cells
    bool space_prefixed = false;

    int at(std::size_t i, std::size_t j) const { return matrix[i * alphabet.size() + j]; }
};

// Letters, digits, and 14 secret-typical symbols; 76 characters total.
const std::vector<std::string>& default_probe_alphabet();

GridProbe probe_pairs(const Vocabulary& vocab,
                      const std::vector<std::string>& alphabet,
                      bool space_prefixed = false);

std::string grid_to_csv(const GridProbe& grid);
// Plain PGM: cell intensity = token count.
std::string grid_to_pgm(const GridProbe& grid);
std::string grid_to_svg(const GridProbe& grid);

// Token occurrences bucketed by decoded character length.
struct LengthHistogram {
    std::map<std::size_t, std::uint64_t> counts;
    std::uint64_t total_tokens = 0;
};

LengthHistogram length_histogram(const Vocabulary& vocab, std::span<const std::string> texts);

std::string histogram_to_csv(const LengthHistogram& hist);

// The most frequent tokens of corpus P compared against their share in Q.
struct RankFrequencyTable {
    struct Row {
        std::string token;
        std::size_t rank = 0;       // 1-based, descending P frequency
        double p_proportion = 0.0;  // raw share in P
        double q_proportion = 0.0;  // epsilon-smoothed share in Q
    };
    std::vector<Row> rows;
    std::size_t top_k = 0;
    double epsilon = 0.0;
};

RankFrequencyTable rank_frequency(const Vocabulary& vocab,
                                  std::span<const std::string> p_texts,
                                  std::span<const std::string> q_texts,
                                  std::size_t top_k = 150,
                                  double epsilon = 1e-9);

std::string rank_frequency_to_csv(const RankFrequencyTable& table);

// KL(p || q) in bits over the union support. Outcomes missing from one side
// receive additive mass epsilon and both sides are renormalized.
double kl_divergence(const DistributionTable& p, const DistributionTable& q,
                     double epsilon = 1e-9);

}  // namespace tokaudit
