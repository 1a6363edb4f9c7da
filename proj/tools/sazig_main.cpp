// Command-line front end: simulate, fit, cooccur, similar, export.
// Every run that writes artifacts also writes a manifest.json with the
// fully resolved configuration and FNV-1a checksums of the outputs, so
// a run can be reproduced bit-exactly from its manifest.

#include "sazig/cooccur.hpp"
#include "sazig/embed.hpp"
#include "sazig/errors.hpp"
#include "sazig/likelihood.hpp"
#include "sazig/model.hpp"
#include "sazig/scoring.hpp"
#include "sazig/simulate.hpp"
#include "sazig/sparse_matrix.hpp"
#include "sazig/text_format.hpp"
#include "sazig/trainer.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace sazig;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitIo = 4;

std::string fnv1a_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FileError("cannot read " + path + " for checksum");
    }
    std::uint64_t h = 14695981039346656037ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
    }
    char out[32];
    std::snprintf(out, sizeof(out), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return out;
}

void write_manifest(const fs::path& path, json manifest,
                    const std::vector<fs::path>& artifacts) {
    json sums = json::object();
    for (const fs::path& p : artifacts) {
        sums[p.filename().string()] = fnv1a_hex(p.string());
    }
    manifest["checksums"] = sums;
    std::ofstream out(path);
    if (!out) {
        throw FileError("cannot write " + path.string());
    }
    out << manifest.dump(2) << '\n';
    if (!out) {
        throw FileError("failed writing " + path.string());
    }
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw FileError("cannot create directory " + dir + ": " + ec.message());
    }
}

VectorSource parse_view(const std::string& name) {
    if (name == "row") {
        return VectorSource::RowVectors;
    }
    if (name == "col") {
        return VectorSource::ColVectors;
    }
    if (name == "sum") {
        return VectorSource::Sum;
    }
    throw std::invalid_argument("unknown view '" + name + "' (expected row, col, or sum)");
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) {
        prev[j] = j;
    }
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
    long n = 300;
    long dim = 50;
    double shape = 4.0;
    int setting = 1;
    std::uint64_t seed = 0;
    std::string out;
};

int run_simulate(const SimulateOpts& o) {
    SimConfig config;
    config.n = o.n;
    config.dim = o.dim;
    config.shape = o.shape;
    config.seeds = SimSeeds::from_base(o.seed);
    const SimData data = generate(config);
    const InitSetting setting =
        o.setting == 1 ? InitSetting::TrueExceptColVectors : InitSetting::AllRandom;
    const ModelState init = make_init(setting, data, config, InitSeeds::from_base(o.seed));

    ensure_dir(o.out);
    const fs::path dir(o.out);
    data.matrix.save((dir / "matrix.tsv").string());
    save_model(data.truth, (dir / "truth.model").string());
    save_model(init, (dir / "init.model").string());

    json m;
    m["subcommand"] = "simulate";
    m["config"] = {{"n", o.n},
                   {"dim", o.dim},
                   {"shape", o.shape},
                   {"setting", o.setting},
                   {"seed", o.seed},
                   {"tie_sides", config.tie_sides},
                   {"ranges",
                    {{"vectors", {config.ranges.vectors.first, config.ranges.vectors.second}},
                     {"bias_b", {config.ranges.bias_b.first, config.ranges.bias_b.second}},
                     {"bias_e", {config.ranges.bias_e.first, config.ranges.bias_e.second}}}}};
    m["inputs"] = json::object();
    m["outputs"] = {{"matrix", "matrix.tsv"}, {"truth", "truth.model"}, {"init", "init.model"}};
    write_manifest(dir / "manifest.json", std::move(m),
                   {dir / "matrix.tsv", dir / "truth.model", dir / "init.model"});
    return 0;
}

// --------------------------------------------------------------------- fit

struct FitOpts {
    std::string matrix;
    std::string link = "log";
    bool link_given = false;
    double lr = 0.5;
    std::string lr_schedule = "power-quarter";
    int epochs = 20;
    int max_iter = 100;
    double epsilon = 1e-6;
    std::string init = "random";
    long dim = 20;
    std::uint64_t seed = 0;
    double shape = 0.0;
    bool shape_given = false;
    int threads = 1;
    std::string out;
};

// Stacked score norm over one side, matching the per-iteration trace
// definition used during fitting.
double stacked_norm(const SparseCountMatrix& y, const ModelState& state, Side side) {
    const Eigen::Index count = side == Side::Row ? state.rows.count() : state.cols.count();
    double sq = 0.0;
    for (Eigen::Index i = 0; i < count; ++i) {
        const ScoreBlock block =
            side == Side::Row ? score_row(y, state, i) : score_col(y, state, i);
        sq += block.u.squaredNorm();
    }
    return std::sqrt(sq);
}

int run_fit(const FitOpts& o) {
    const SparseCountMatrix matrix = SparseCountMatrix::load(o.matrix);

    FitConfig config;
    config.lr = o.lr;
    config.inner_epochs = o.epochs;
    config.epsilon = o.epsilon;
    config.threads = o.threads;
    if (o.lr_schedule == "none") {
        config.lr_schedule = LrSchedule::None;
    } else if (o.lr_schedule == "power-quarter") {
        config.lr_schedule = LrSchedule::PowerQuarter;
    } else {
        throw std::invalid_argument("unknown lr schedule '" + o.lr_schedule + "'");
    }
    const auto link = parse_link(o.link);
    if (!link) {
        throw std::invalid_argument("unknown link '" + o.link + "'");
    }
    config.link = *link;

    // Starting point: a checkpoint pins the link and the shape unless
    // flags override them; a random start estimates the shape from the
    // data unless --shape fixes it.
    ModelState init;
    std::string init_label;
    if (o.init == "random") {
        init_label = "random";
        config.shape_mode = o.shape_given ? ShapeMode::Fixed : ShapeMode::EstimateOnce;
        config.shape = o.shape_given ? o.shape : 1.0;
        InitSpec spec;
        spec.dim = o.dim;
        spec.seed = o.seed;
        init = random_init(matrix.n_rows(), matrix.n_cols(), spec, config.link, config.shape);
    } else {
        init_label = o.init;
        init = load_model(o.init);
        if (o.link_given && init.link != config.link) {
            throw std::invalid_argument("--link conflicts with the checkpoint's link; drop the "
                                        "flag or re-fit from random");
        }
        config.link = init.link;
        config.shape_mode = ShapeMode::Fixed;
        config.shape = o.shape_given ? o.shape : init.shape;
        init.shape = config.shape;
    }

    ensure_dir(o.out);
    const fs::path dir(o.out);

    FitResult result;
    if (o.max_iter == 0) {
        // Evaluation only: resolve the shape the same way a fit would,
        // score the starting point, and emit a single iteration-0 row.
        config.max_iterations = 1;
        config.validate();
        result.state = init;
        if (config.shape_mode == ShapeMode::EstimateOnce) {
            result.state.shape = estimate_shape(matrix);
        }
        IterationRecord rec;
        rec.iter = 0;
        rec.loss = total_loss(matrix, result.state);
        rec.u_theta_norm = stacked_norm(matrix, result.state, Side::Row);
        rec.u_thetat_norm = stacked_norm(matrix, result.state, Side::Col);
        result.trace.records.push_back(std::move(rec));
    } else {
        config.max_iterations = o.max_iter;
        config.validate();
        result = fit(matrix, config, init);
    }

    save_model(result.state, (dir / "checkpoint.model").string());
    save_trace(result.trace, (dir / "trace.csv").string());

    bool converged = false;
    if (o.max_iter > 0 && std::isinf(config.epsilon)) {
        converged = true;
    } else if (result.trace.records.size() >= 2) {
        const double prev = result.trace.records[result.trace.records.size() - 2].loss;
        const double last = result.trace.records.back().loss;
        converged = std::abs(last - prev) < config.epsilon * std::abs(prev);
    }
    std::vector<std::string> warnings;
    for (const IterationRecord& rec : result.trace.records) {
        warnings.insert(warnings.end(), rec.warnings.begin(), rec.warnings.end());
    }
    std::sort(warnings.begin(), warnings.end());
    warnings.erase(std::unique(warnings.begin(), warnings.end()), warnings.end());

    json diag;
    diag["converged"] = converged;
    diag["iterations"] = result.trace.records.empty() ? 0 : result.trace.records.back().iter;
    diag["final_loss"] = result.trace.records.empty()
                             ? std::numeric_limits<double>::quiet_NaN()
                             : result.trace.records.back().loss;
    diag["shape"] = result.state.shape;
    diag["warnings"] = warnings;
    {
        std::ofstream out(dir / "diagnostics.json");
        if (!out) {
            throw FileError("cannot write " + (dir / "diagnostics.json").string());
        }
        out << diag.dump(2) << '\n';
    }

    json m;
    m["subcommand"] = "fit";
    m["config"] = {{"link", link_name(config.link)},
                   {"lr", config.lr},
                   {"lr_schedule",
                    config.lr_schedule == LrSchedule::None ? "none" : "power-quarter"},
                   {"epochs", config.inner_epochs},
                   {"max_iter", o.max_iter},
                   {"epsilon", config.epsilon},
                   {"init", init_label},
                   {"dim", static_cast<long>(init.rows.dim())},
                   {"seed", o.seed},
                   {"shape_mode",
                    config.shape_mode == ShapeMode::Fixed ? "fixed" : "estimate-once"},
                   {"shape", config.shape_mode == ShapeMode::Fixed ? json(config.shape)
                                                                   : json("estimated")},
                   {"ridge_scale", config.ridge_scale},
                   {"max_halvings", config.max_halvings},
                   {"sweep_order", config.sweep_order == SweepOrder::Interleaved
                                       ? "interleaved"
                                       : "rows-then-cols"},
                   {"threads", config.threads}};
    m["inputs"] = {{"matrix", o.matrix}, {"init", init_label}};
    m["outputs"] = {{"checkpoint", "checkpoint.model"},
                    {"trace", "trace.csv"},
                    {"diagnostics", "diagnostics.json"}};
    write_manifest(dir / "manifest.json", std::move(m),
                   {dir / "checkpoint.model", dir / "trace.csv", dir / "diagnostics.json"});
    return 0;
}

// ----------------------------------------------------------------- cooccur

struct CooccurOpts {
    std::string text;
    std::size_t vocab_size = 10000;
    int window = 10;
    std::string out;
};

int run_cooccur(const CooccurOpts& o) {
    const std::vector<Sentence> corpus = read_sentences(o.text);
    const Vocabulary vocab = build_vocab(corpus, o.vocab_size);
    const SparseCountMatrix matrix = build_matrix(corpus, vocab, o.window);

    ensure_dir(o.out);
    const fs::path dir(o.out);
    matrix.save((dir / "matrix.tsv").string());
    save_vocab(vocab, (dir / "vocab.tsv").string());

    json m;
    m["subcommand"] = "cooccur";
    m["config"] = {{"vocab_size", o.vocab_size}, {"window", o.window}};
    m["inputs"] = {{"text", o.text}};
    m["outputs"] = {{"matrix", "matrix.tsv"}, {"vocab", "vocab.tsv"}};
    write_manifest(dir / "manifest.json", std::move(m),
                   {dir / "matrix.tsv", dir / "vocab.tsv"});
    return 0;
}

// ----------------------------------------------------------------- similar

struct SimilarOpts {
    std::string model;
    std::string vocab;
    std::string query;
    std::size_t k = 10;
    std::string view = "row";
    std::string out;
};

int run_similar(const SimilarOpts& o) {
    const ModelState state = load_model(o.model);
    const Vocabulary vocab = load_vocab(o.vocab);
    const EmbeddingView view = make_view(state, parse_view(o.view));
    if (vocab.size() != view.count()) {
        throw std::invalid_argument("vocabulary has " + std::to_string(vocab.size()) +
                                    " tokens but the view has " + std::to_string(view.count()) +
                                    " vectors");
    }
    const auto idx = vocab.lookup(o.query);
    if (!idx) {
        std::cerr << "error: token '" << o.query << "' is not in the vocabulary\n";
        std::vector<std::string> close;
        for (const std::string& token : vocab.tokens) {
            if (edit_distance(o.query, token) <= 2) {
                close.push_back(token);
            }
        }
        if (!close.empty()) {
            std::cerr << "did you mean:";
            for (std::size_t i = 0; i < close.size() && i < 8; ++i) {
                std::cerr << ' ' << close[i];
            }
            std::cerr << '\n';
        }
        return kExitValidation;
    }

    const std::vector<Neighbor> neighbors = top_k(view, *idx, o.k);
    std::string table = "rank\tindex\ttoken\tsimilarity\n";
    for (std::size_t r = 0; r < neighbors.size(); ++r) {
        table += std::to_string(r + 1);
        table += '\t';
        table += std::to_string(neighbors[r].index);
        table += '\t';
        table += vocab.tokens[static_cast<std::size_t>(neighbors[r].index)];
        table += '\t';
        table += format_brief(neighbors[r].similarity);
        table += '\n';
    }
    std::cout << table;

    if (!o.out.empty()) {
        ensure_dir(o.out);
        const fs::path dir(o.out);
        {
            std::ofstream file(dir / "neighbors.tsv");
            if (!file) {
                throw FileError("cannot write " + (dir / "neighbors.tsv").string());
            }
            file << table;
        }
        json m;
        m["subcommand"] = "similar";
        m["config"] = {{"query", o.query}, {"k", o.k}, {"view", o.view}};
        m["inputs"] = {{"model", o.model}, {"vocab", o.vocab}};
        m["outputs"] = {{"neighbors", "neighbors.tsv"}};
        write_manifest(dir / "manifest.json", std::move(m), {dir / "neighbors.tsv"});
    }
    return 0;
}

// ------------------------------------------------------------------ export

struct ExportOpts {
    std::string model;
    std::string vocab;
    std::string view = "row";
    std::string out;
};

int run_export(const ExportOpts& o) {
    const ModelState state = load_model(o.model);
    const EmbeddingView view = make_view(state, parse_view(o.view));
    std::vector<std::string> labels;
    const std::vector<std::string>* labels_ptr = nullptr;
    if (!o.vocab.empty()) {
        labels = load_vocab(o.vocab).tokens;
        labels_ptr = &labels;
    }
    const fs::path out(o.out);
    if (out.has_parent_path()) {
        ensure_dir(out.parent_path().string());
    }
    save_embeddings(view, labels_ptr, out.string());

    json m;
    m["subcommand"] = "export";
    m["config"] = {{"view", o.view}, {"labels", labels_ptr != nullptr}};
    m["inputs"] = {{"model", o.model}, {"vocab", o.vocab.empty() ? json() : json(o.vocab)}};
    m["outputs"] = {{"embeddings", out.filename().string()}};
    write_manifest(fs::path(o.out + ".manifest.json"), std::move(m), {out});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sazig: zero-inflated Gamma matrix factorization"};
    app.require_subcommand(1);

    SimulateOpts sim;
    CLI::App* c_sim = app.add_subcommand("simulate", "Generate a synthetic matrix with ground "
                                                     "truth and a fitting start point");
    c_sim->add_option("--n", sim.n, "Matrix side length (square)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    c_sim->add_option("--d", sim.dim, "Latent dimension")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    c_sim->add_option("--shape", sim.shape, "Gamma shape of the positive part")
        ->capture_default_str();
    c_sim->add_option("--setting", sim.setting,
                      "Start point: 1 = truth except column vectors, 2 = all random")
        ->capture_default_str()
        ->check(CLI::Range(1, 2));
    c_sim->add_option("--seed", sim.seed, "Base seed for all random blocks")
        ->capture_default_str();
    c_sim->add_option("--out", sim.out, "Output directory")->required();

    FitOpts fit_o;
    CLI::App* c_fit = app.add_subcommand("fit", "Fit the factorization to a sparse matrix");
    c_fit->add_option("--matrix", fit_o.matrix, "Input matrix (tab-separated triples)")
        ->required();
    CLI::Option* link_opt =
        c_fit->add_option("--link", fit_o.link, "Gamma link: log or canonical")
            ->capture_default_str();
    c_fit->add_option("--lr", fit_o.lr, "Base learning rate")->capture_default_str();
    c_fit->add_option("--lr-schedule", fit_o.lr_schedule,
                      "Step damping: none or power-quarter (lr / t^0.25)")
        ->capture_default_str();
    c_fit->add_option("--epochs", fit_o.epochs, "Inner scoring epochs per index per sweep")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    c_fit->add_option("--max-iter", fit_o.max_iter,
                      "Outer sweeps; 0 evaluates the start point without fitting")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    c_fit->add_option("--epsilon", fit_o.epsilon, "Relative loss-change stopping threshold")
        ->capture_default_str();
    c_fit->add_option("--init", fit_o.init, "'random' or a model checkpoint to start from")
        ->capture_default_str();
    c_fit->add_option("--dim", fit_o.dim, "Latent dimension for random initialization")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    c_fit->add_option("--seed", fit_o.seed, "Seed for random initialization")
        ->capture_default_str();
    CLI::Option* shape_opt =
        c_fit->add_option("--shape", fit_o.shape,
                          "Fix the Gamma shape instead of estimating it from the data");
    c_fit->add_option("--threads", fit_o.threads,
                      "Worker threads for the per-sweep evaluation pass")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    c_fit->add_option("--out", fit_o.out, "Output directory")->required();

    CooccurOpts co;
    CLI::App* c_co = app.add_subcommand("cooccur", "Build a weighted co-occurrence matrix "
                                                   "from a line-per-sentence text file");
    c_co->add_option("--text", co.text, "Input text, one sentence per line")->required();
    c_co->add_option("--vocab-size", co.vocab_size, "Keep this many most frequent tokens")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    c_co->add_option("--window", co.window, "Co-occurrence window size")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    c_co->add_option("--out", co.out, "Output directory")->required();

    SimilarOpts si;
    CLI::App* c_si = app.add_subcommand("similar", "Print a token's nearest neighbours by "
                                                   "cosine similarity");
    c_si->add_option("--model", si.model, "Model checkpoint")->required();
    c_si->add_option("--vocab", si.vocab, "Vocabulary file matching the model")->required();
    c_si->add_option("--query", si.query, "Query token")->required();
    c_si->add_option("--k", si.k, "Number of neighbours")->capture_default_str();
    c_si->add_option("--view", si.view, "Vector set: row, col, or sum")->capture_default_str();
    c_si->add_option("--out", si.out, "Optional directory for neighbors.tsv plus manifest");

    ExportOpts ex;
    CLI::App* c_ex = app.add_subcommand("export", "Write embeddings as TSV");
    c_ex->add_option("--model", ex.model, "Model checkpoint")->required();
    c_ex->add_option("--vocab", ex.vocab, "Optional vocabulary for token labels");
    c_ex->add_option("--view", ex.view, "Vector set: row, col, or sum")->capture_default_str();
    c_ex->add_option("--out", ex.out, "Output embeddings file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (app.got_subcommand(c_sim)) {
            return run_simulate(sim);
        }
        if (app.got_subcommand(c_fit)) {
            fit_o.link_given = link_opt->count() > 0;
            fit_o.shape_given = shape_opt->count() > 0;
            return run_fit(fit_o);
        }
        if (app.got_subcommand(c_co)) {
            return run_cooccur(co);
        }
        if (app.got_subcommand(c_si)) {
            return run_similar(si);
        }
        if (app.got_subcommand(c_ex)) {
            return run_export(ex);
        }
    } catch (const FileError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const InvalidMeanError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const SingularInformationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const TrainingAbortedError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
