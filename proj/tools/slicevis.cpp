// slicevis: generate, preview and evaluate slice KPI image datasets.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 I/O error,
// 3 integrity failure. Failures also print one JSON object on stderr.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <regex>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "slicevis/config.hpp"
#include "slicevis/dataset.hpp"
#include "slicevis/error.hpp"
#include "slicevis/eval.hpp"

namespace fs = std::filesystem;
using namespace slicevis;

namespace {

enum ExitCode : int { kOk = 0, kConfig = 1, kIo = 2, kIntegrity = 3 };

int exit_code_for(const Error& e) {
    const std::string kind = e.kind();
    if (kind == "io") return kIo;
    if (kind == "integrity") return kIntegrity;
    return kConfig;
}

void report_error(const char* kind, const std::string& message) {
    std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << "\n";
}

MontageGrid parse_grid(const std::string& text) {
    static const std::regex re(R"((\d+)[xX](\d+))");
    std::smatch m;
    if (!std::regex_match(text, m, re))
        throw UsageError("grid: expected ROWSxCOLS, e.g. 3x6, got '" + text + "'");
    return {std::stoul(m[1]), std::stoul(m[2])};
}

struct Options {
    std::string config;
    std::size_t count = 3000;
    std::string methods;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::uint64_t split_seed = 7;
    std::string grid = "3x6";
    bool force = false;
    bool float_images = false;
    std::string format = "text";
    std::string dataset;
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::size_t k = 5;
};

int cmd_generate(const Options& o) {
    Config config = o.config.empty() ? Config::defaults() : load_config(o.config);
    if (o.seed) config.set_seed(*o.seed);
    if (!o.methods.empty()) config.methods = parse_methods(o.methods);
    if (o.out.empty()) throw UsageError("generate: --out is required");

    const auto start = std::chrono::steady_clock::now();
    const Dataset ds = generate_dataset(config, o.count, o.workers);
    const auto manifest = write_dataset(ds, o.out, {o.force, o.float_images});
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (o.format == "json") {
        nlohmann::json j{{"out", o.out},
                         {"seconds", seconds},
                         {"class_counts", manifest["class_counts"]},
                         {"checksums", manifest["checksums"]}};
        std::cout << j.dump(2) << "\n";
        return kOk;
    }
    std::cout << "wrote " << ds.size() << " samples to " << o.out << " in "
              << std::to_string(seconds) << " s\n";
    for (auto t : kAllSlices)
        std::cout << "  " << slice_name(t) << ": " << ds.class_counts()[index_of(t)] << "\n";
    for (const auto& [file, digest] : manifest["checksums"].items())
        std::cout << "  sha256 " << digest.get<std::string>() << "  " << file << "\n";
    return kOk;
}

int cmd_preview(const Options& o) {
    const Dataset ds = load_dataset(o.dataset);
    const auto methods = o.methods.empty() ? ds.config.methods : parse_methods(o.methods);
    const auto grid = parse_grid(o.grid);
    const fs::path out = o.out.empty() ? fs::path(".") : fs::path(o.out);
    for (auto m : methods) {
        if (!ds.config.enabled(m))
            throw UsageError("method '" + std::string(method_name(m)) +
                             "' is not present in this dataset");
        std::cout << render_montage(ds, m, grid, out).string() << "\n";
    }
    return kOk;
}

int cmd_evaluate(const Options& o) {
    const Dataset ds = load_dataset(o.dataset);
    const auto methods = o.methods.empty() ? ds.config.methods : parse_methods(o.methods);
    for (auto m : methods)
        if (!ds.config.enabled(m))
            throw UsageError("method '" + std::string(method_name(m)) +
                             "' is not present in this dataset");
    SplitSpec split;
    split.seed = o.split_seed;
    EvalOptions opts;
    opts.k = o.k;
    const auto report = run_evaluation(ds, methods, split, opts);
    const std::string text = o.format == "json" ? report_json(report).dump(2) + "\n"
                                                : report_text(report);
    std::cout << text;
    if (!o.out.empty()) write_file(o.out, text);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"slicevis: slice KPI synthesis, image encodings and baselines"};
    app.require_subcommand(1);
    Options o;

    auto* gen = app.add_subcommand("generate", "Generate a dataset directory");
    gen->add_option("--config", o.config, "Configuration file (JSON); built-in defaults if omitted");
    gen->add_option("--count", o.count, "Number of samples")->check(CLI::Range(3ul, 100000000ul));
    gen->add_option("--methods", o.methods, "Comma-separated encodings (default: from config)");
    gen->add_option("--out", o.out, "Output dataset directory")->required();
    gen->add_option("--seed", o.seed, "Override the configured master seed");
    gen->add_flag("--force", o.force, "Allow writing into a non-empty directory");
    gen->add_flag("--float-images", o.float_images, "Also write float32 image arrays");
    gen->add_option("--workers", o.workers, "Worker threads")->check(CLI::Range(1u, 1024u));
    gen->add_option("--format", o.format, "Summary format")->check(CLI::IsMember({"text", "json"}));

    auto* prev = app.add_subcommand("preview", "Render a montage PNG per method");
    prev->add_option("dataset", o.dataset, "Dataset directory")->required();
    prev->add_option("--methods", o.methods, "Comma-separated encodings (default: all)");
    prev->add_option("--grid", o.grid, "Montage grid as ROWSxCOLS");
    prev->add_option("--out", o.out, "Directory for montage files (default: .)");

    auto* ev = app.add_subcommand("evaluate", "Run the baseline classifiers");
    ev->add_option("dataset", o.dataset, "Dataset directory")->required();
    ev->add_option("--methods", o.methods, "Comma-separated encodings (default: all)");
    ev->add_option("--split-seed", o.split_seed, "Seed of the stratified 80/20 split");
    ev->add_option("--k", o.k, "Neighbours for k-NN")->check(CLI::PositiveNumber);
    ev->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"text", "json"}));
    ev->add_option("--out", o.out, "Also write the report to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        report_error("usage", e.what());
        return kConfig;
    }

    try {
        if (gen->parsed()) return cmd_generate(o);
        if (prev->parsed()) return cmd_preview(o);
        if (ev->parsed()) return cmd_evaluate(o);
    } catch (const Error& e) {
        report_error(e.kind(), e.what());
        return exit_code_for(e);
    } catch (const fs::filesystem_error& e) {
        report_error("io", e.what());
        return kIo;
    } catch (const std::exception& e) {
        report_error("error", e.what());
        return kConfig;
    }
    return kConfig;
}
