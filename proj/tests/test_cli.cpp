#include <doctest.h>

#include "sazig/cooccur.hpp"
#include "sazig/model.hpp"
#include "sazig/sparse_matrix.hpp"

#include "fixtures.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace sazig;

namespace {

const std::string kCli = SAZIG_CLI_PATH;

int run_cli(const std::string& args, const std::string& stdout_file = "/dev/null") {
    const std::string cmd = kCli + " " + args + " > " + stdout_file + " 2> /dev/null";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct TraceRow {
    long iter = 0;
    double loss = 0.0;
    double u_theta = 0.0;
    double u_thetat = 0.0;
    long halvings = 0;
    std::string warnings;
};

std::vector<TraceRow> read_trace(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    REQUIRE(std::getline(in, line));
    REQUIRE(line == "#sazig-trace-v1");
    REQUIRE(std::getline(in, line));
    REQUIRE(line == "iter,loss,u_theta_norm,u_thetat_norm,halvings,warnings");
    std::vector<TraceRow> rows;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        TraceRow row;
        std::string field;
        std::getline(ls, field, ',');
        row.iter = std::stol(field);
        std::getline(ls, field, ',');
        row.loss = std::stod(field);
        std::getline(ls, field, ',');
        row.u_theta = std::stod(field);
        std::getline(ls, field, ',');
        row.u_thetat = std::stod(field);
        std::getline(ls, field, ',');
        row.halvings = std::stol(field);
        std::getline(ls, row.warnings);
        rows.push_back(row);
    }
    return rows;
}

// Fresh scratch directory for one test.
std::string scratch_dir(const std::string& name) {
    const std::string dir = fixtures::temp_path(name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("cli simulate writes the four artifacts") {
    const std::string dir = scratch_dir("cli_sim");
    const int rc =
        run_cli("simulate --n 20 --d 3 --shape 4 --setting 2 --seed 7 --out " + dir + "/a");
    CHECK(rc == 0);
    for (const char* name : {"matrix.tsv", "truth.model", "init.model", "manifest.json"}) {
        CHECK(std::filesystem::exists(dir + "/a/" + name));
    }
    const auto m = SparseCountMatrix::load(dir + "/a/matrix.tsv");
    CHECK(m.n_rows() == 20);
    CHECK(m.n_cols() == 20);
}

TEST_CASE("cli simulate is byte-deterministic across runs") {
    const std::string dir = scratch_dir("cli_sim_det");
    const std::string flags = "simulate --n 15 --d 2 --shape 4 --setting 1 --seed 11 --out ";
    CHECK(run_cli(flags + dir + "/a") == 0);
    CHECK(run_cli(flags + dir + "/b") == 0);
    for (const char* name : {"matrix.tsv", "truth.model", "init.model", "manifest.json"}) {
        CHECK(slurp(dir + "/a/" + name) == slurp(dir + "/b/" + name));
    }
}

TEST_CASE("cli simulate rejects a negative shape") {
    const std::string dir = scratch_dir("cli_sim_bad");
    CHECK(run_cli("simulate --n 10 --d 2 --shape -1 --out " + dir + "/a") == 2);
}

TEST_CASE("cli fit writes one trace row per sweep") {
    const std::string dir = scratch_dir("cli_fit_rows");
    REQUIRE(run_cli("simulate --n 12 --d 2 --shape 4 --setting 2 --seed 5 --out " + dir +
                    "/sim") == 0);
    const std::string base = "fit --matrix " + dir + "/sim/matrix.tsv --init " + dir +
                             "/sim/init.model --lr 0.1 --epochs 2 ";
    REQUIRE(run_cli(base + "--max-iter 1 --out " + dir + "/one") == 0);
    CHECK(read_trace(dir + "/one/trace.csv").size() == 1);
    REQUIRE(run_cli(base + "--max-iter 6 --epsilon 1e-300 --out " + dir + "/six") == 0);
    CHECK(read_trace(dir + "/six/trace.csv").size() == 6);
    REQUIRE(run_cli(base + "--max-iter 40 --out " + dir + "/eps") == 0);
    CHECK(read_trace(dir + "/eps/trace.csv").size() <= 40);
}

TEST_CASE("cli fit with the damped schedule has a non-increasing tail") {
    const std::string dir = scratch_dir("cli_fit_tail");
    REQUIRE(run_cli("simulate --n 20 --d 3 --shape 4 --setting 2 --seed 7 --out " + dir +
                    "/sim") == 0);
    REQUIRE(run_cli("fit --matrix " + dir + "/sim/matrix.tsv --init " + dir +
                    "/sim/init.model --lr 0.1 --lr-schedule power-quarter --epochs 3 "
                    "--max-iter 10 --epsilon 1e-300 --out " +
                    dir + "/fit") == 0);
    const auto rows = read_trace(dir + "/fit/trace.csv");
    REQUIRE(rows.size() == 10);
    for (std::size_t i = rows.size() - 5; i < rows.size(); ++i) {
        CHECK(rows[i].loss <= rows[i - 1].loss);
    }
}

TEST_CASE("cli fit is byte-deterministic across runs") {
    const std::string dir = scratch_dir("cli_fit_det");
    REQUIRE(run_cli("simulate --n 12 --d 2 --shape 4 --setting 2 --seed 9 --out " + dir +
                    "/sim") == 0);
    const std::string flags = "fit --matrix " + dir + "/sim/matrix.tsv --init " + dir +
                              "/sim/init.model --lr 0.1 --epochs 2 --max-iter 4 "
                              "--epsilon 1e-300 --threads 3 --out ";
    REQUIRE(run_cli(flags + dir + "/a") == 0);
    REQUIRE(run_cli(flags + dir + "/b") == 0);
    for (const char* name :
         {"checkpoint.model", "trace.csv", "diagnostics.json", "manifest.json"}) {
        CHECK(slurp(dir + "/a/" + name) == slurp(dir + "/b/" + name));
    }
}

TEST_CASE("cli fit under the canonical link reports halvings on an overshoot") {
    // Single positive cell with a large value: the full Fisher step from
    // tau = -2 overshoots past zero and must be halved back.
    const std::string dir = scratch_dir("cli_fit_halve");
    SparseCountMatrix::from_triples({{0, 0, 10.0}}, 1, 1).save(dir + "/m.tsv");
    ModelState start;
    start.link = Link::Canonical;
    start.shape = 1.0;
    start.rows = SideParams::zeros(1, 0);
    start.cols = SideParams::zeros(1, 0);
    start.rows.bias_e[0] = -2.0;
    save_model(start, dir + "/start.model");
    REQUIRE(run_cli("fit --matrix " + dir + "/m.tsv --init " + dir +
                    "/start.model --lr 1 --lr-schedule none --epochs 0 --max-iter 1 --out " +
                    dir + "/fit") == 0);
    const auto rows = read_trace(dir + "/fit/trace.csv");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].halvings > 0);
}

TEST_CASE("cli fit re-evaluates its own checkpoint to the recorded loss") {
    const std::string dir = scratch_dir("cli_fit_resume");
    REQUIRE(run_cli("simulate --n 14 --d 2 --shape 4 --setting 2 --seed 3 --out " + dir +
                    "/sim") == 0);
    REQUIRE(run_cli("fit --matrix " + dir + "/sim/matrix.tsv --init " + dir +
                    "/sim/init.model --lr 0.1 --epochs 2 --max-iter 5 --epsilon 1e-300 "
                    "--out " +
                    dir + "/fit") == 0);
    REQUIRE(run_cli("fit --matrix " + dir + "/sim/matrix.tsv --init " + dir +
                    "/fit/checkpoint.model --max-iter 0 --out " + dir + "/reval") == 0);
    const auto fit_rows = read_trace(dir + "/fit/trace.csv");
    const auto eval_rows = read_trace(dir + "/reval/trace.csv");
    REQUIRE(!fit_rows.empty());
    REQUIRE(eval_rows.size() == 1);
    CHECK(eval_rows[0].iter == 0);
    const double recorded = fit_rows.back().loss;
    CHECK(std::abs(eval_rows[0].loss - recorded) <= 1e-12 * std::abs(recorded));
}

TEST_CASE("cli cooccur matches the in-process builder") {
    const std::string dir = scratch_dir("cli_cooccur");
    {
        std::ofstream corpus(dir + "/corpus.txt");
        corpus << "the cat sat on the mat\n";
        corpus << "the dog sat on the rug\n";
        corpus << "a cat and a dog met\n";
    }
    REQUIRE(run_cli("cooccur --text " + dir + "/corpus.txt --vocab-size 8 --window 10 --out " +
                    dir + "/out") == 0);

    const auto sentences = read_sentences(dir + "/corpus.txt");
    const auto vocab = build_vocab(sentences, 8);
    const auto expected = build_matrix(sentences, vocab, 10);

    const auto got = SparseCountMatrix::load(dir + "/out/matrix.tsv");
    const auto got_triples = got.triples();
    const auto want_triples = expected.triples();
    REQUIRE(got_triples.size() == want_triples.size());
    for (std::size_t t = 0; t < want_triples.size(); ++t) {
        CHECK(got_triples[t].row == want_triples[t].row);
        CHECK(got_triples[t].col == want_triples[t].col);
        CHECK(got_triples[t].value == want_triples[t].value);
    }
    const auto got_vocab = load_vocab(dir + "/out/vocab.tsv");
    CHECK(got_vocab.tokens == vocab.tokens);
    CHECK(got_vocab.counts == vocab.counts);
}

TEST_CASE("cli similar prints non-increasing similarities and flags unknown tokens") {
    const std::string dir = scratch_dir("cli_similar");
    {
        std::ofstream corpus(dir + "/corpus.txt");
        corpus << "red green blue yellow purple orange pink\n";
        corpus << "red green blue cyan magenta white black\n";
        corpus << "yellow purple orange cyan magenta white black\n";
    }
    REQUIRE(run_cli("cooccur --text " + dir + "/corpus.txt --vocab-size 12 --window 5 --out " +
                    dir + "/cooc") == 0);
    REQUIRE(run_cli("fit --matrix " + dir + "/cooc/matrix.tsv --init random --dim 2 --seed 4 "
                    "--lr 0.2 --epochs 2 --max-iter 3 --out " +
                    dir + "/fit") == 0);

    const int rc = run_cli("similar --model " + dir + "/fit/checkpoint.model --vocab " + dir +
                               "/cooc/vocab.tsv --query red --k 5 --view sum",
                           dir + "/neigh.tsv");
    CHECK(rc == 0);
    std::ifstream out(dir + "/neigh.tsv");
    std::string line;
    REQUIRE(std::getline(out, line));
    CHECK(line == "rank\tindex\ttoken\tsimilarity");
    double prev = 2.0;
    int count = 0;
    while (std::getline(out, line)) {
        std::istringstream ls(line);
        std::string rank, index, token, sim;
        std::getline(ls, rank, '\t');
        std::getline(ls, index, '\t');
        std::getline(ls, token, '\t');
        std::getline(ls, sim, '\t');
        ++count;
        CHECK(std::stoi(rank) == count);
        const double s = std::stod(sim);
        CHECK(s <= prev);
        prev = s;
    }
    CHECK(count == 5);

    CHECK(run_cli("similar --model " + dir + "/fit/checkpoint.model --vocab " + dir +
                  "/cooc/vocab.tsv --query crimson --k 5") == 2);
}

TEST_CASE("cli export writes labeled deterministic embeddings") {
    const std::string dir = scratch_dir("cli_export");
    {
        std::ofstream corpus(dir + "/corpus.txt");
        corpus << "alpha beta gamma delta\n";
        corpus << "alpha beta epsilon zeta\n";
    }
    REQUIRE(run_cli("cooccur --text " + dir + "/corpus.txt --vocab-size 6 --window 4 --out " +
                    dir + "/cooc") == 0);
    REQUIRE(run_cli("fit --matrix " + dir + "/cooc/matrix.tsv --init random --dim 2 --seed 8 "
                    "--lr 0.2 --epochs 2 --max-iter 2 --out " +
                    dir + "/fit") == 0);
    const std::string base = "export --model " + dir + "/fit/checkpoint.model --vocab " + dir +
                             "/cooc/vocab.tsv --view row --out ";
    REQUIRE(run_cli(base + dir + "/a.tsv") == 0);
    REQUIRE(run_cli(base + dir + "/b.tsv") == 0);
    CHECK(slurp(dir + "/a.tsv") == slurp(dir + "/b.tsv"));
    CHECK(std::filesystem::exists(dir + "/a.tsv.manifest.json"));

    const auto vocab = load_vocab(dir + "/cooc/vocab.tsv");
    std::ifstream emb(dir + "/a.tsv");
    std::string line;
    std::size_t row = 0;
    while (std::getline(emb, line)) {
        REQUIRE(row < vocab.tokens.size());
        const std::string label = line.substr(0, line.find('\t'));
        CHECK(label == vocab.tokens[row]);
        ++row;
    }
    CHECK(row == vocab.tokens.size());
}

TEST_CASE("cli maps error classes to distinct exit codes") {
    const std::string dir = scratch_dir("cli_exit");
    CHECK(run_cli("fit --matrix " + dir + "/absent.tsv --out " + dir + "/x") == 4);
    REQUIRE(run_cli("simulate --n 8 --d 2 --shape 4 --setting 2 --seed 1 --out " + dir +
                    "/sim") == 0);
    CHECK(run_cli("fit --matrix " + dir + "/sim/matrix.tsv --link sideways --out " + dir +
                  "/x") == 2);
    CHECK(run_cli("nonsense") == 2);
}
