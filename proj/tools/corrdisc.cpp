// corrdisc: experiment driver for mining-assisted service discovery.
//
//   corrdisc run config.txt --out results.csv [--jobs N] [--trace dir]
//   corrdisc mine txns.txt 0.8
//   corrdisc gen-cm 10 42

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "corrdisc/experiment.hpp"
#include "corrdisc/mining.hpp"
#include "corrdisc/random.hpp"
#include "corrdisc/transaction_io.hpp"
#include "corrdisc/workload.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_command(const std::string& config_path, const std::string& out, unsigned jobs, const std::string& trace) {
    auto spec = corrdisc::parse_config(slurp(config_path));
    spec.output_path = out;
    std::optional<std::filesystem::path> trace_dir;
    if (!trace.empty()) {
        std::filesystem::create_directories(trace);
        trace_dir = trace;
    }
    spdlog::info("running {} seeds x {} variants with {} job(s)", spec.seeds.size(), spec.variants.size(), jobs);
    const auto rows = corrdisc::run_experiment(spec, jobs, trace_dir);
    corrdisc::write_csv(rows, spec.output_path);
    spdlog::info("wrote {} rows to {}", rows.size(), spec.output_path);
    corrdisc::write_summary(std::cout, corrdisc::summarize(rows));
    return 0;
}

int mine_command(const std::string& path, double support) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    const auto transactions = corrdisc::read_transactions(in);
    const auto itemsets =
        corrdisc::mine_frequent_itemsets<corrdisc::ServiceId>(transactions, corrdisc::SupportThreshold(support));
    spdlog::debug("{} transactions, {} frequent itemsets", transactions.size(), itemsets.size());
    for (const auto& set : itemsets) {
        for (std::size_t i = 0; i < set.items.size(); ++i) std::cout << (i ? " " : "") << set.items[i];
        std::cout << " : " << set.support_count << '\n';
    }
    return 0;
}

int gen_cm_command(std::size_t n, std::uint64_t seed) {
    auto rng = corrdisc::Rng::substream(seed, "workload");
    corrdisc::write_correlation_matrix(std::cout, corrdisc::build_correlation_matrix(n, rng));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    if (const char* level = std::getenv("CORRDISC_LOG")) {
        spdlog::set_level(spdlog::level::from_str(level));
    } else {
        spdlog::set_level(spdlog::level::warn);
    }
    spdlog::set_pattern("[%l] %v");

    CLI::App app{"Service discovery simulator with frequent-itemset piggybacking"};
    app.require_subcommand(1);

    std::string config_path, out_path, trace_dir;
    unsigned jobs = 1;
    auto* run = app.add_subcommand("run", "Run a paired mining-on/off experiment");
    run->add_option("config", config_path, "key = value configuration file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_path, "CSV output path")->required();
    run->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);
    run->add_option("--trace", trace_dir, "Directory for per-run event traces");

    std::string txn_path;
    double support = 0.8;
    auto* mine = app.add_subcommand("mine", "Mine frequent itemsets from a transaction file");
    mine->add_option("transactions", txn_path, "One transaction per line")->required()->check(CLI::ExistingFile);
    mine->add_option("support", support, "Support fraction in (0, 1]")->required();

    std::size_t n = 0;
    std::uint64_t seed = 0;
    auto* gen_cm = app.add_subcommand("gen-cm", "Print a random correlation matrix");
    gen_cm->add_option("n", n, "Number of services")->required()->check(CLI::PositiveNumber);
    gen_cm->add_option("seed", seed, "Seed")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return run_command(config_path, out_path, jobs, trace_dir);
        if (*mine) return mine_command(txn_path, support);
        if (*gen_cm) return gen_cm_command(n, seed);
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 1;
}
