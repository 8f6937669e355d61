// planarize: compute a planarizing edge set (weak solution) for a graph,
// with verification, reports, and a heuristic drawing of the result.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

#include <CLI11.hpp>

#include "planarize/insertion.hpp"
#include "planarize/io.hpp"
#include "planarize/solve.hpp"

namespace {

using namespace planarize;

constexpr double kDeskSigma = 1e-40;

struct CliOptions {
    std::string input;
    std::string format = "edgelist";
    uint64_t seed = 1;
    std::string sigma = "1.0";
    std::string oracle = "exact";
    int exact_limit = 14;
    int retries = 20;
    long long opt_guess_start = 1;
    std::string report_path;
    std::string svg_path;
    std::string embedding_path;
    std::string bench_dir;
    int bench_workers = 4;
};

double parse_sigma(const std::string &s) {
    if (s == "desk") return kDeskSigma;
    double v = std::stod(s);
    if (!(v > 0)) throw CLI::ValidationError("--sigma", "sigma must be positive");
    return v;
}

SolveConfig make_config(const CliOptions &opt) {
    SolveConfig cfg;
    cfg.seed = opt.seed;
    cfg.sigma = parse_sigma(opt.sigma);
    cfg.oracle = opt.oracle == "heuristic" ? OracleMode::Heuristic : OracleMode::Exact;
    cfg.exact_limit = opt.exact_limit;
    cfg.retry_budget = opt.retries;
    cfg.opt_guess_start = opt.opt_guess_start;
    return cfg;
}

int run_single(const CliOptions &opt) {
    Graph g = load_graph(opt.input, opt.format);
    SolveConfig cfg = make_config(opt);
    SolveResult res = solve(g, cfg);
    json report = run_report(g, cfg, res);

    if (!opt.report_path.empty()) {
        std::ofstream out(opt.report_path);
        if (!out.good()) fail("Io", "cannot write " + opt.report_path);
        out << report.dump(2) << '\n';
    } else {
        std::cout << report.dump(2) << '\n';
    }

    if (!opt.svg_path.empty() || !opt.embedding_path.empty()) {
        DrawingReport dr = reinsert_and_draw(g, res.e_star);
        SanityReport sr = sanity_lower_bounds(g, static_cast<long long>(res.e_star.size()),
                                              dr.total_crossings);
        if (!sr.crossings_ok || !sr.planarization_ok)
            fail("InternalError", "drawing violates the skewness lower bound");
        if (!opt.svg_path.empty()) {
            std::ofstream out(opt.svg_path);
            if (!out.good()) fail("Io", "cannot write " + opt.svg_path);
            out << render_svg(dr);
        }
        if (!opt.embedding_path.empty()) {
            RotationSystem rs = planar_embedding(g.without_edges(res.e_star));
            std::ofstream out(opt.embedding_path);
            if (!out.good()) fail("Io", "cannot write " + opt.embedding_path);
            out << to_json(rs).dump(2) << '\n';
        }
    }
    return res.verified ? 0 : 4;
}

struct BenchRow {
    std::string file;
    int n = 0, m = 0;
    long long pipeline = -1, stopping = -1, exhaustive = -1;
    std::string source;
    long long resamples = 0;
    long long ms = 0;
    bool ok = false;
};

int run_bench(const CliOptions &opt) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    for (const auto &entry : fs::directory_iterator(opt.bench_dir))
        if (entry.is_regular_file()) files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    if (files.empty()) fail("Io", "no corpus files in " + opt.bench_dir);

    auto worker = [&](const std::string &path, uint64_t seed) {
        BenchRow row;
        row.file = fs::path(path).filename().string();
        try {
            Graph g = load_graph(path, opt.format);
            row.n = g.n();
            row.m = g.m();
            SolveConfig cfg = make_config(opt);
            cfg.seed = seed;
            auto t0 = std::chrono::steady_clock::now();
            SolveResult res = solve(g, cfg);
            auto t1 = std::chrono::steady_clock::now();
            row.ms = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
            row.pipeline = static_cast<long long>(res.e_star.size());
            row.stopping = res.baseline_stopping;
            row.exhaustive = res.baseline_exhaustive;
            row.source = res.best_source;
            for (const GuessReport &gr : res.guesses)
                for (const IterationReport &ir : gr.iterations) row.resamples += ir.resamples;
            row.ok = res.verified;
        } catch (const std::exception &e) {
            row.source = std::string("error: ") + e.what();
        }
        return row;
    };

    std::vector<BenchRow> rows(files.size());
    size_t next = 0;
    while (next < files.size()) {
        size_t batch = std::min<size_t>(opt.bench_workers, files.size() - next);
        std::vector<std::future<BenchRow>> futs;
        for (size_t i = 0; i < batch; ++i)
            futs.push_back(std::async(std::launch::async, worker, files[next + i],
                                      opt.seed + next + i));
        for (size_t i = 0; i < batch; ++i) rows[next + i] = futs[i].get();
        next += batch;
    }

    std::cout << "file,n,m,pipeline,stopping,exhaustive,source,resamples,ms,verified\n";
    for (const BenchRow &r : rows)
        std::cout << r.file << ',' << r.n << ',' << r.m << ',' << r.pipeline << ','
                  << r.stopping << ',' << r.exhaustive << ',' << r.source << ','
                  << r.resamples << ',' << r.ms << ',' << (r.ok ? 1 : 0) << '\n';
    for (const BenchRow &r : rows)
        if (!r.ok) return 4;
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CliOptions opt;
    CLI::App app{"planarize: minimum-planarization engine"};
    app.add_option("--input", opt.input, "input graph file");
    app.add_option("--format", opt.format, "input format: edgelist | graph6")
        ->check(CLI::IsMember({"edgelist", "graph6"}));
    app.add_option("--seed", opt.seed, "rng seed");
    app.add_option("--sigma", opt.sigma, "scale profile: positive float, or 'desk'");
    app.add_option("--oracle", opt.oracle, "oracle mode")
        ->check(CLI::IsMember({"exact", "heuristic"}));
    app.add_option("--exact-limit", opt.exact_limit, "exhaustive-oracle size threshold");
    app.add_option("--retries", opt.retries, "randomized-step retry budget");
    app.add_option("--opt-guess-start", opt.opt_guess_start, "first OPT guess");
    app.add_option("--report", opt.report_path, "write the run report JSON here");
    app.add_option("--emit-svg", opt.svg_path, "write a drawing SVG here");
    app.add_option("--emit-embedding", opt.embedding_path,
                   "write the residual embedding JSON here");
    app.add_option("--bench", opt.bench_dir, "run a corpus directory, print CSV");
    app.add_option("--bench-workers", opt.bench_workers, "parallel bench workers");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (!opt.bench_dir.empty()) return run_bench(opt);
        if (opt.input.empty()) {
            std::cerr << "error: --input or --bench is required\n";
            return 2;
        }
        return run_single(opt);
    } catch (const CLI::Error &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const planarize::Error &e) {
        std::string code = e.code();
        std::cerr << "error: " << e.what() << '\n';
        if (code == "Io" || code == "ParseError" || code == "MalformedHeader") return 3;
        return 4;
    } catch (const std::invalid_argument &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
}
