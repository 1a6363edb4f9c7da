#include "sazig/cooccur.hpp"

#include "sazig/errors.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace sazig {

std::optional<Eigen::Index> Vocabulary::lookup(const std::string& token) const {
    const auto it = index.find(token);
    if (it == index.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::vector<Sentence> read_sentences(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw FileError("cannot open: " + path);
    }
    std::vector<Sentence> corpus;
    std::string line;
    while (std::getline(in, line)) {
        Sentence s;
        std::istringstream ls(line);
        std::string token;
        while (ls >> token) {
            s.push_back(token);
        }
        if (!s.empty()) {
            corpus.push_back(std::move(s));
        }
    }
    return corpus;
}

Vocabulary build_vocab(const std::vector<Sentence>& corpus, std::size_t target_size) {
    if (target_size == 0) {
        throw std::invalid_argument("build_vocab: target size must be positive");
    }
    std::map<std::string, long> freq;  // ordered so ties resolve alphabetically
    for (const Sentence& s : corpus) {
        for (const std::string& t : s) {
            ++freq[t];
        }
    }
    if (freq.empty()) {
        throw std::invalid_argument("build_vocab: corpus has no tokens");
    }
    std::vector<std::pair<std::string, long>> items(freq.begin(), freq.end());
    std::stable_sort(items.begin(), items.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    Vocabulary v;
    const std::size_t keep = std::min(target_size, items.size());
    v.tokens.reserve(keep);
    v.counts.reserve(keep);
    for (std::size_t k = 0; k < keep; ++k) {
        v.index.emplace(items[k].first, static_cast<Eigen::Index>(k));
        v.tokens.push_back(std::move(items[k].first));
        v.counts.push_back(items[k].second);
    }
    return v;
}

SparseCountMatrix build_matrix(const std::vector<Sentence>& corpus, const Vocabulary& vocab,
                               int window) {
    if (window < 1) {
        throw std::invalid_argument("build_matrix: window must be at least 1");
    }
    if (vocab.size() == 0) {
        throw std::invalid_argument("build_matrix: empty vocabulary");
    }
    const Eigen::Index v = vocab.size();
    // Keyed accumulation keeps per-cell addition order equal to corpus
    // order, so results are bit-identical across container layouts.
    std::unordered_map<long long, double> cells;
    for (const Sentence& s : corpus) {
        std::vector<Eigen::Index> ids(s.size());
        for (std::size_t a = 0; a < s.size(); ++a) {
            ids[a] = vocab.lookup(s[a]).value_or(-1);
        }
        for (std::size_t a = 0; a < s.size(); ++a) {
            if (ids[a] < 0) {
                continue;
            }
            const std::size_t stop = std::min(s.size(), a + static_cast<std::size_t>(window) + 1);
            for (std::size_t b = a + 1; b < stop; ++b) {
                if (ids[b] < 0 || ids[b] == ids[a]) {
                    continue;
                }
                const double w = 1.0 / static_cast<double>(b - a);
                cells[static_cast<long long>(ids[a]) * v + ids[b]] += w;
                cells[static_cast<long long>(ids[b]) * v + ids[a]] += w;
            }
        }
    }
    std::vector<SparseCountMatrix::Triple> triples;
    triples.reserve(cells.size());
    for (const auto& [key, value] : cells) {
        triples.push_back({static_cast<Eigen::Index>(key / v),
                           static_cast<Eigen::Index>(key % v), value});
    }
    return SparseCountMatrix::from_triples(triples, v, v);
}

void save_vocab(const Vocabulary& vocab, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw FileError("cannot open for writing: " + path);
    }
    for (Eigen::Index i = 0; i < vocab.size(); ++i) {
        out << vocab.tokens[static_cast<std::size_t>(i)] << '\t'
            << vocab.counts[static_cast<std::size_t>(i)] << '\n';
    }
    if (!out) {
        throw FileError("write failed: " + path);
    }
}

Vocabulary load_vocab(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw FileError("cannot open: " + path);
    }
    Vocabulary v;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw FileError("bad vocab line in " + path + ": " + line);
        }
        std::string token = line.substr(0, tab);
        long count = 0;
        try {
            count = std::stol(line.substr(tab + 1));
        } catch (const std::exception&) {
            throw FileError("bad vocab count in " + path + ": " + line);
        }
        v.index.emplace(token, v.size());
        v.tokens.push_back(std::move(token));
        v.counts.push_back(count);
    }
    if (v.tokens.empty()) {
        throw FileError("empty vocabulary file: " + path);
    }
    return v;
}

}  // namespace sazig
