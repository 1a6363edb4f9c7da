#pragma once

#include "sazig/model.hpp"

#include <string>
#include <vector>

namespace sazig {

// Which latent vectors serve as embeddings: one side's, or their sum
// (the sum needs equally-sized sides).
enum class VectorSource { RowVectors, ColVectors, Sum };

struct EmbeddingView {
    VectorSource source = VectorSource::RowVectors;
    Eigen::MatrixXd matrix;  // count x dim

    Eigen::Index count() const { return matrix.rows(); }
    Eigen::Index dim() const { return matrix.cols(); }
};

EmbeddingView make_view(const ModelState& state, VectorSource source);

const char* vector_source_name(VectorSource source);

// Throws std::invalid_argument when either vector has zero norm.
double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct Neighbor {
    Eigen::Index index = -1;
    double similarity = 0.0;
};

// k nearest neighbours of the query row by cosine similarity, the
// query itself excluded, ties broken by ascending index. Zero-norm
// candidates are skipped; a zero-norm query is an error.
std::vector<Neighbor> top_k(const EmbeddingView& view, Eigen::Index query, std::size_t k);

// TSV export: label column (token when provided, else the index)
// followed by the vector entries at 9 significant digits.
void save_embeddings(const EmbeddingView& view, const std::vector<std::string>* labels,
                     const std::string& path);

}  // namespace sazig
