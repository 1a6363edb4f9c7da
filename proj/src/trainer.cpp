#include "sazig/trainer.hpp"

#include "sazig/diagnostics.hpp"
#include "sazig/errors.hpp"
#include "sazig/likelihood.hpp"
#include "sazig/scoring.hpp"
#include "sazig/text_format.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace sazig {

void FitConfig::validate() const {
    if (max_iterations < 0) {
        throw std::invalid_argument("fit: max_iterations must be non-negative");
    }
    if (inner_epochs < 0) {
        throw std::invalid_argument("fit: inner_epochs must be non-negative");
    }
    if (!(lr > 0.0) || !std::isfinite(lr)) {
        throw std::invalid_argument("fit: lr must be positive and finite");
    }
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("fit: epsilon must be positive");
    }
    if (ridge_scale < 0.0 || !std::isfinite(ridge_scale)) {
        throw std::invalid_argument("fit: ridge_scale must be non-negative");
    }
    if (shape_mode == ShapeMode::Fixed && (!(shape > 0.0) || !std::isfinite(shape))) {
        throw std::invalid_argument("fit: fixed shape must be positive and finite");
    }
    if (max_halvings < 0) {
        throw std::invalid_argument("fit: max_halvings must be non-negative");
    }
    if (threads < 1) {
        throw std::invalid_argument("fit: threads must be at least 1");
    }
}

void save_trace(const FitTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw FileError("cannot open for writing: " + path);
    }
    out << "#sazig-trace-v1\n";
    out << "iter,loss,u_theta_norm,u_thetat_norm,halvings,warnings\n";
    for (const IterationRecord& r : trace.records) {
        out << r.iter << ',' << format_full(r.loss) << ',' << format_full(r.u_theta_norm)
            << ',' << format_full(r.u_thetat_norm) << ',' << r.halvings << ',';
        for (std::size_t k = 0; k < r.warnings.size(); ++k) {
            if (k > 0) {
                out << ';';
            }
            out << r.warnings[k];
        }
        out << '\n';
    }
    if (!out) {
        throw FileError("write failed: " + path);
    }
}

namespace {

std::mt19937_64 block_engine(std::uint64_t seed, unsigned block) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32), block};
    return std::mt19937_64(seq);
}

void fill_uniform(Eigen::Ref<Eigen::MatrixXd> m, std::mt19937_64& eng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            m(i, k) = dist(eng);
        }
    }
}

}  // namespace

ModelState random_init(Eigen::Index n_rows, Eigen::Index n_cols, const InitSpec& spec,
                       Link link, double shape) {
    if (n_rows <= 0 || n_cols <= 0 || spec.dim < 0) {
        throw std::invalid_argument("random_init: bad dimensions");
    }
    ModelState state;
    state.link = link;
    state.shape = shape;
    state.rows = SideParams::zeros(n_rows, spec.dim);
    state.cols = SideParams::zeros(n_cols, spec.dim);
    unsigned block = 0;
    for (SideParams* side : {&state.rows, &state.cols}) {
        auto eng = block_engine(spec.seed, block++);
        if (spec.dim > 0) {
            const double half =
                0.5 / (static_cast<double>(side->count()) * static_cast<double>(spec.dim));
            fill_uniform(side->vectors, eng, -half, half);
        }
    }
    for (SideParams* side : {&state.rows, &state.cols}) {
        auto eng = block_engine(spec.seed, block++);
        fill_uniform(side->bias_b, eng, -0.1, 0.1);
    }
    for (SideParams* side : {&state.rows, &state.cols}) {
        auto eng = block_engine(spec.seed, block++);
        if (link == Link::Canonical) {
            fill_uniform(side->bias_e, eng, -0.6, -0.1);
        } else {
            fill_uniform(side->bias_e, eng, 0.1, 0.6);
        }
    }
    return state;
}

double lr_factor(const FitConfig& config, long t) {
    if (t < 1) {
        throw std::invalid_argument("lr_factor: iteration must be 1-based");
    }
    if (config.lr_schedule == LrSchedule::None) {
        return 1.0;
    }
    return config.lr / std::pow(static_cast<double>(t), 0.25);
}

namespace {

const char* side_name(Side side) {
    return side == Side::Row ? "row" : "col";
}

std::string warn_tag(const char* kind, Side side, Eigen::Index idx, const char* detail) {
    std::ostringstream s;
    s << kind << ':' << side_name(side) << ':' << idx << ':' << detail;
    return s.str();
}

}  // namespace

UpdateResult update_index(const SparseCountMatrix& y, ModelState& state, Side side,
                          Eigen::Index idx, long t, const FitConfig& config) {
    UpdateResult res;
    const double lr = lr_factor(config, t);
    SideParams& target = (side == Side::Row) ? state.rows : state.cols;
    const Eigen::Index d = target.dim();
    bool any_accepted = false;

    // inner_epochs refinement steps plus the closing sweep-level step;
    // all share the same scaling and validation rules.
    for (int step = 0; step <= config.inner_epochs; ++step) {
        auto block = (side == Side::Row) ? try_score_row(y, state, idx)
                                         : try_score_col(y, state, idx);
        if (!block) {
            res.warnings.push_back(warn_tag("skip", side, idx, "invalid-state"));
            break;
        }
        Eigen::VectorXd delta;
        try {
            delta = lr * fisher_solve(*block, default_ridge(*block, config.ridge_scale));
        } catch (const SingularInformationError&) {
            res.warnings.push_back(warn_tag("skip", side, idx, "singular-information"));
            break;
        }

        const Eigen::RowVectorXd w0 = target.vectors.row(idx);
        const double b0 = target.bias_b[idx];
        const double e0 = target.bias_e[idx];
        bool accepted = false;
        double scale = 1.0;
        for (int h = 0; h <= config.max_halvings; ++h) {
            target.vectors.row(idx) = w0 + scale * delta.head(d).transpose();
            target.bias_b[idx] = b0 + scale * delta[d];
            target.bias_e[idx] = e0 + scale * delta[d + 1];
            const auto ll = (side == Side::Row) ? try_row_loglik(y, state, idx)
                                                : try_col_loglik(y, state, idx);
            if (ll) {
                accepted = true;
                res.halvings += h;
                break;
            }
            scale *= 0.5;
        }
        if (!accepted) {
            target.vectors.row(idx) = w0;
            target.bias_b[idx] = b0;
            target.bias_e[idx] = e0;
            res.halvings += config.max_halvings;
            res.warnings.push_back(warn_tag("reject", side, idx, "invalid-step"));
            break;
        }
        any_accepted = true;
    }
    res.skipped = !any_accepted;
    return res;
}

namespace {

// Applies fn(i) for i in [0, count) across config-many threads; results
// must be written to per-index slots so the outcome is independent of
// scheduling. The first exception wins and is rethrown after join.
template <typename Fn>
void parallel_for(Eigen::Index count, int threads, Fn&& fn) {
    const int nt = static_cast<int>(std::min<Eigen::Index>(threads, count));
    if (nt <= 1) {
        for (Eigen::Index i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<Eigen::Index> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nt));
    for (int k = 0; k < nt; ++k) {
        pool.emplace_back([&]() {
            while (true) {
                const Eigen::Index i = cursor.fetch_add(1);
                if (i >= count) {
                    return;
                }
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) {
                        first_error = std::current_exception();
                    }
                    return;
                }
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

void push_history(std::vector<double>& hist, double value) {
    hist.push_back(value);
    if (hist.size() > static_cast<std::size_t>(kSaturationWindow)) {
        hist.erase(hist.begin());
    }
}

}  // namespace

FitResult fit(const SparseCountMatrix& y, const FitConfig& config, const ModelState& init) {
    config.validate();
    init.validate();
    if (init.rows.count() != y.n_rows() || init.cols.count() != y.n_cols()) {
        throw std::invalid_argument("fit: init dimensions do not match the matrix");
    }

    FitResult out;
    out.state = init;
    out.state.link = config.link;
    out.state.shape =
        (config.shape_mode == ShapeMode::Fixed) ? config.shape : estimate_shape(y);

    // Fail fast on an initial state the link cannot evaluate.
    total_loss(y, out.state);

    const Eigen::Index n_rows = y.n_rows();
    const Eigen::Index n_cols = y.n_cols();
    const bool interleave =
        (config.sweep_order == SweepOrder::Interleaved) && n_rows == n_cols;

    std::vector<std::vector<double>> row_hist(static_cast<std::size_t>(n_rows));
    std::vector<std::vector<double>> col_hist(static_cast<std::size_t>(n_cols));

    double prev_loss = std::numeric_limits<double>::quiet_NaN();
    for (long t = 1; t <= config.max_iterations; ++t) {
        IterationRecord rec;
        rec.iter = t;
        long skipped = 0;

        auto apply = [&](Side side, Eigen::Index idx) {
            const UpdateResult r = update_index(y, out.state, side, idx, t, config);
            rec.halvings += r.halvings;
            skipped += r.skipped ? 1 : 0;
            rec.warnings.insert(rec.warnings.end(), r.warnings.begin(), r.warnings.end());
        };
        if (interleave) {
            for (Eigen::Index i = 0; i < n_rows; ++i) {
                apply(Side::Row, i);
                apply(Side::Col, i);
            }
        } else {
            for (Eigen::Index i = 0; i < n_rows; ++i) {
                apply(Side::Row, i);
            }
            for (Eigen::Index j = 0; j < n_cols; ++j) {
                apply(Side::Col, j);
            }
        }
        if (skipped == n_rows + n_cols) {
            std::ostringstream msg;
            msg << "every index update was rejected in iteration " << t;
            throw TrainingAbortedError(msg.str());
        }

        // Full post-sweep evaluation: loss, stacked score norms, and
        // the per-index saturation statistic. Parallel workers write
        // per-index slots; sums run in fixed index order.
        std::vector<double> row_ll(static_cast<std::size_t>(n_rows));
        std::vector<double> row_unorm2(static_cast<std::size_t>(n_rows));
        std::vector<double> row_maxp(static_cast<std::size_t>(n_rows));
        std::vector<double> col_unorm2(static_cast<std::size_t>(n_cols));
        std::vector<double> col_maxp(static_cast<std::size_t>(n_cols));
        parallel_for(n_rows, config.threads, [&](Eigen::Index i) {
            row_ll[static_cast<std::size_t>(i)] = row_loglik(y, out.state, i).total;
            row_unorm2[static_cast<std::size_t>(i)] =
                score_row(y, out.state, i).u.squaredNorm();
            row_maxp[static_cast<std::size_t>(i)] = line_max_prob(out.state, Side::Row, i);
        });
        parallel_for(n_cols, config.threads, [&](Eigen::Index j) {
            col_unorm2[static_cast<std::size_t>(j)] =
                score_col(y, out.state, j).u.squaredNorm();
            col_maxp[static_cast<std::size_t>(j)] = line_max_prob(out.state, Side::Col, j);
        });
        double loss = 0.0;
        double u2_rows = 0.0;
        double u2_cols = 0.0;
        for (Eigen::Index i = 0; i < n_rows; ++i) {
            loss -= row_ll[static_cast<std::size_t>(i)];
            u2_rows += row_unorm2[static_cast<std::size_t>(i)];
        }
        for (Eigen::Index j = 0; j < n_cols; ++j) {
            u2_cols += col_unorm2[static_cast<std::size_t>(j)];
        }
        rec.loss = loss;
        rec.u_theta_norm = std::sqrt(u2_rows);
        rec.u_thetat_norm = std::sqrt(u2_cols);

        for (Side side : {Side::Row, Side::Col}) {
            const Eigen::Index count = (side == Side::Row) ? n_rows : n_cols;
            auto& hist = (side == Side::Row) ? row_hist : col_hist;
            const auto& maxp = (side == Side::Row) ? row_maxp : col_maxp;
            for (Eigen::Index i = 0; i < count; ++i) {
                push_history(hist[static_cast<std::size_t>(i)],
                             maxp[static_cast<std::size_t>(i)]);
                SeparationFlag flag = saturation_monitor(hist[static_cast<std::size_t>(i)]);
                if (flag == SeparationFlag::SaturationWarning) {
                    if (separation_probe(y, out.state, side, i) >= 1.0) {
                        flag = SeparationFlag::SuspectedSeparation;
                    }
                    std::ostringstream w;
                    w << "sep:" << side_name(side) << ':' << i << ':'
                      << separation_flag_name(flag);
                    rec.warnings.push_back(w.str());
                }
            }
        }

        out.trace.records.push_back(std::move(rec));
        out.state.iteration += 1;

        if (!std::isfinite(config.epsilon)) {
            break;  // an infinite tolerance accepts the first sweep
        }
        if (t >= 2) {
            const double rel = std::abs(loss - prev_loss) / std::abs(prev_loss);
            if (rel < config.epsilon) {
                break;
            }
        }
        prev_loss = loss;
    }
    return out;
}

FitResult fit(const SparseCountMatrix& y, const FitConfig& config, const InitSpec& init) {
    const double shape0 = (config.shape_mode == ShapeMode::Fixed) ? config.shape : 1.0;
    return fit(y, config, random_init(y.n_rows(), y.n_cols(), init, config.link, shape0));
}

}  // namespace sazig
