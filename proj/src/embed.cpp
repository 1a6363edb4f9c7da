#include "sazig/embed.hpp"

#include "sazig/errors.hpp"
#include "sazig/text_format.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace sazig {

EmbeddingView make_view(const ModelState& state, VectorSource source) {
    EmbeddingView view;
    view.source = source;
    switch (source) {
        case VectorSource::RowVectors:
            view.matrix = state.rows.vectors;
            break;
        case VectorSource::ColVectors:
            view.matrix = state.cols.vectors;
            break;
        case VectorSource::Sum:
            if (state.rows.count() != state.cols.count()) {
                throw std::invalid_argument(
                    "make_view: summed view needs equally-sized sides");
            }
            view.matrix = state.rows.vectors + state.cols.vectors;
            break;
    }
    return view;
}

const char* vector_source_name(VectorSource source) {
    switch (source) {
        case VectorSource::RowVectors:
            return "row";
        case VectorSource::ColVectors:
            return "col";
        case VectorSource::Sum:
            return "sum";
    }
    return "row";
}

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("cosine: dimension mismatch");
    }
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) {
        throw std::invalid_argument("cosine: undefined for zero-norm vectors");
    }
    return a.dot(b) / (na * nb);
}

std::vector<Neighbor> top_k(const EmbeddingView& view, Eigen::Index query, std::size_t k) {
    if (query < 0 || query >= view.count()) {
        throw std::invalid_argument("top_k: query index out of range");
    }
    const Eigen::VectorXd q = view.matrix.row(query).transpose();
    const double qn = q.norm();
    if (qn == 0.0) {
        throw std::invalid_argument("top_k: query vector has zero norm");
    }
    std::vector<Neighbor> all;
    all.reserve(static_cast<std::size_t>(view.count()));
    for (Eigen::Index i = 0; i < view.count(); ++i) {
        if (i == query) {
            continue;
        }
        const double n = view.matrix.row(i).norm();
        if (n == 0.0) {
            continue;
        }
        all.push_back({i, view.matrix.row(i).dot(q) / (n * qn)});
    }
    std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
        if (a.similarity != b.similarity) {
            return a.similarity > b.similarity;
        }
        return a.index < b.index;
    });
    if (all.size() > k) {
        all.resize(k);
    }
    return all;
}

void save_embeddings(const EmbeddingView& view, const std::vector<std::string>* labels,
                     const std::string& path) {
    if (labels && static_cast<Eigen::Index>(labels->size()) != view.count()) {
        throw std::invalid_argument("save_embeddings: label count mismatch");
    }
    std::ofstream out(path);
    if (!out) {
        throw FileError("cannot open for writing: " + path);
    }
    for (Eigen::Index i = 0; i < view.count(); ++i) {
        if (labels) {
            out << (*labels)[static_cast<std::size_t>(i)];
        } else {
            out << i;
        }
        for (Eigen::Index kk = 0; kk < view.dim(); ++kk) {
            out << '\t' << format_brief(view.matrix(i, kk));
        }
        out << '\n';
    }
    if (!out) {
        throw FileError("write failed: " + path);
    }
}

}  // namespace sazig
