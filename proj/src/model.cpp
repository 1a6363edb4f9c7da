#include "sazig/model.hpp"

#include "sazig/errors.hpp"
#include "sazig/text_format.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace sazig {

SideParams SideParams::zeros(Eigen::Index count, Eigen::Index dim) {
    SideParams p;
    p.vectors = Eigen::MatrixXd::Zero(count, dim);
    p.bias_b = Eigen::VectorXd::Zero(count);
    p.bias_e = Eigen::VectorXd::Zero(count);
    return p;
}

namespace {

void validate_side(const SideParams& p, const char* which) {
    if (p.bias_b.size() != p.count() || p.bias_e.size() != p.count()) {
        throw std::invalid_argument(std::string("model: ") + which +
                                    " bias length does not match vector count");
    }
    if (!p.vectors.allFinite() || !p.bias_b.allFinite() || !p.bias_e.allFinite()) {
        throw std::invalid_argument(std::string("model: ") + which +
                                    " parameters contain non-finite values");
    }
}

}  // namespace

void ModelState::validate() const {
    validate_side(rows, "row");
    validate_side(cols, "col");
    if (rows.dim() != cols.dim()) {
        throw std::invalid_argument("model: row and col vector dimensions differ");
    }
    if (!(shape > 0.0) || !std::isfinite(shape)) {
        throw std::invalid_argument("model: shape must be positive and finite");
    }
    if (iteration < 0) {
        throw std::invalid_argument("model: negative iteration counter");
    }
}

double eta(const SideParams& rows, Eigen::Index i, const SideParams& cols, Eigen::Index j) {
    if (rows.dim() != cols.dim()) {
        throw std::invalid_argument("model: eta with mismatched vector dimensions");
    }
    return rows.vectors.row(i).dot(cols.vectors.row(j)) + rows.bias_b[i] + cols.bias_b[j];
}

double tau(const SideParams& rows, Eigen::Index i, const SideParams& cols, Eigen::Index j) {
    if (rows.dim() != cols.dim()) {
        throw std::invalid_argument("model: tau with mismatched vector dimensions");
    }
    return rows.vectors.row(i).dot(cols.vectors.row(j)) + rows.bias_e[i] + cols.bias_e[j];
}

double prob(double eta) {
    if (eta >= 0.0) {
        return 1.0 / (1.0 + std::exp(-eta));
    }
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

std::optional<double> mean_from_tau(Link link, double tau) {
    if (link == Link::Canonical) {
        if (!(tau < 0.0)) {
            return std::nullopt;
        }
        return -1.0 / tau;
    }
    const double mu = std::exp(tau);
    if (!std::isfinite(mu) || mu <= 0.0) {
        return std::nullopt;  // overflow, or underflow all the way to zero
    }
    return mu;
}

const char* link_name(Link link) {
    return link == Link::Canonical ? "canonical" : "log";
}

std::optional<Link> parse_link(const std::string& name) {
    if (name == "canonical") {
        return Link::Canonical;
    }
    if (name == "log") {
        return Link::Log;
    }
    return std::nullopt;
}

namespace {

constexpr const char* kModelMagic = "#sazig-model-v1";

void write_side(std::ofstream& out, const SideParams& p, const char* prefix) {
    out << "#block " << prefix << ".vectors\n";
    for (Eigen::Index i = 0; i < p.count(); ++i) {
        for (Eigen::Index k = 0; k < p.dim(); ++k) {
            if (k > 0) {
                out << '\t';
            }
            out << format_full(p.vectors(i, k));
        }
        out << '\n';
    }
    out << "#block " << prefix << ".bias_b\n";
    for (Eigen::Index i = 0; i < p.count(); ++i) {
        out << format_full(p.bias_b[i]) << '\n';
    }
    out << "#block " << prefix << ".bias_e\n";
    for (Eigen::Index i = 0; i < p.count(); ++i) {
        out << format_full(p.bias_e[i]) << '\n';
    }
}

void expect_line(std::ifstream& in, const std::string& want, const std::string& path) {
    std::string line;
    if (!std::getline(in, line) || line != want) {
        throw FileError("model file " + path + ": expected '" + want + "'");
    }
}

void read_side(std::ifstream& in, SideParams& p, Eigen::Index count, Eigen::Index dim,
               const char* prefix, const std::string& path) {
    p.vectors.resize(count, dim);
    p.bias_b.resize(count);
    p.bias_e.resize(count);
    expect_line(in, std::string("#block ") + prefix + ".vectors", path);
    std::string line;
    for (Eigen::Index i = 0; i < count; ++i) {
        if (!std::getline(in, line)) {
            throw FileError("model file " + path + ": truncated vectors block");
        }
        std::istringstream ls(line);
        for (Eigen::Index k = 0; k < dim; ++k) {
            if (!(ls >> p.vectors(i, k))) {
                throw FileError("model file " + path + ": short vector row");
            }
        }
    }
    for (const char* bias : {".bias_b", ".bias_e"}) {
        expect_line(in, std::string("#block ") + prefix + bias, path);
        Eigen::VectorXd& target = (bias[6] == 'b') ? p.bias_b : p.bias_e;
        for (Eigen::Index i = 0; i < count; ++i) {
            if (!std::getline(in, line)) {
                throw FileError("model file " + path + ": truncated bias block");
            }
            std::istringstream ls(line);
            if (!(ls >> target[i])) {
                throw FileError("model file " + path + ": bad bias value");
            }
        }
    }
}

}  // namespace

void save_model(const ModelState& state, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw FileError("cannot open for writing: " + path);
    }
    out << kModelMagic << '\n';
    out << "n_rows " << state.rows.count() << '\n';
    out << "n_cols " << state.cols.count() << '\n';
    out << "dim " << state.rows.dim() << '\n';
    out << "link " << link_name(state.link) << '\n';
    out << "shape " << format_full(state.shape) << '\n';
    out << "iteration " << state.iteration << '\n';
    write_side(out, state.rows, "rows");
    write_side(out, state.cols, "cols");
    if (!out) {
        throw FileError("write failed: " + path);
    }
}

ModelState load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw FileError("cannot open: " + path);
    }
    std::string line;
    if (!std::getline(in, line) || line != kModelMagic) {
        throw FileError("not a sazig model file: " + path);
    }
    auto read_kv = [&](const char* key) -> std::string {
        if (!std::getline(in, line)) {
            throw FileError("model file " + path + ": truncated header");
        }
        std::istringstream ls(line);
        std::string k, v;
        ls >> k >> v;
        if (k != key) {
            throw FileError("model file " + path + ": expected header key " + key);
        }
        return v;
    };
    Eigen::Index n_rows = 0;
    Eigen::Index n_cols = 0;
    Eigen::Index dim = 0;
    std::string link_str;
    double shape = 0.0;
    long iteration = 0;
    try {
        n_rows = std::stoll(read_kv("n_rows"));
        n_cols = std::stoll(read_kv("n_cols"));
        dim = std::stoll(read_kv("dim"));
        link_str = read_kv("link");
        shape = std::stod(read_kv("shape"));
        iteration = std::stol(read_kv("iteration"));
    } catch (const FileError&) {
        throw;
    } catch (const std::exception&) {
        throw FileError("model file " + path + ": malformed header value");
    }
    if (n_rows < 0 || n_cols < 0 || dim < 0) {
        throw FileError("model file " + path + ": negative dimensions");
    }
    const auto link = parse_link(link_str);
    if (!link) {
        throw FileError("model file " + path + ": unknown link '" + link_str + "'");
    }
    ModelState state;
    state.link = *link;
    state.shape = shape;
    state.iteration = iteration;
    read_side(in, state.rows, n_rows, dim, "rows", path);
    read_side(in, state.cols, n_cols, dim, "cols", path);
    state.validate();
    return state;
}

}  // namespace sazig
