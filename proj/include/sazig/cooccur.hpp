#pragma once

#include "sazig/sparse_matrix.hpp"

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace sazig {

using Sentence = std::vector<std::string>;

// Token table ordered by corpus frequency (ties broken alphabetically).
struct Vocabulary {
    std::vector<std::string> tokens;
    std::vector<long> counts;
    std::unordered_map<std::string, Eigen::Index> index;

    Eigen::Index size() const { return static_cast<Eigen::Index>(tokens.size()); }
    std::optional<Eigen::Index> lookup(const std::string& token) const;
};

// One sentence per line, tokens split on blanks. Empty lines are
// skipped.
std::vector<Sentence> read_sentences(const std::string& path);

// Keeps the target_size most frequent tokens; fewer if the corpus has
// fewer distinct tokens. Throws on an empty corpus or zero target.
Vocabulary build_vocab(const std::vector<Sentence>& corpus, std::size_t target_size);

// Symmetric co-occurrence counts: every in-vocabulary pair at positions
// a < b with b - a <= window contributes 1 / (b - a) to both (i, j) and
// (j, i). Pairs of the same vocabulary entry are skipped, so the
// diagonal stays empty.
SparseCountMatrix build_matrix(const std::vector<Sentence>& corpus, const Vocabulary& vocab,
                               int window = 10);

// token <TAB> count per line, ordered by vocabulary index.
void save_vocab(const Vocabulary& vocab, const std::string& path);
Vocabulary load_vocab(const std::string& path);

}  // namespace sazig
