// Command-line front end: validate network files, run the exhaustive
// classical attractor analysis, or run the quantum-suppression search.
//
// Exit codes are a stable contract:
//   0 success, 1 invalid input, 2 I/O error, 3 capacity exceeded,
//   4 search result disagrees with the classical oracle, 5 non-convergence.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qbn/bnet.hpp"
#include "qbn/dynamics.hpp"
#include "qbn/search.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalidInput = 1;
constexpr int kIoError = 2;
constexpr int kCapacity = 3;
constexpr int kOracleMismatch = 4;
constexpr int kNonConvergence = 5;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("error while reading '" + path + "'");
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("error while writing '" + path + "'");
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty())
        std::cout << content;
    else
        write_file(out_path, content);
}

qbn::NetworkSpec parse_file(const std::string& path) {
    return qbn::parse_network(read_file(path));
}

std::string diag(const std::string& path, const qbn::ParseError& e) {
    std::string where = path;
    if (e.line > 0) {
        where += ':' + std::to_string(e.line);
        if (e.column > 0) where += ':' + std::to_string(e.column);
    }
    return where + ": error: " + e.what();
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

int cmd_validate(const std::string& path) {
    qbn::NetworkSpec spec = parse_file(path);
    std::cout << "n=" << spec.n() << " genes:";
    for (const std::string& g : spec.genes) std::cout << ' ' << g;
    std::cout << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------
// classical
// ---------------------------------------------------------------------------

struct ClassicalOpts {
    std::string path;
    std::string out;
    std::string stg;
    std::string stg_format = "index";
};

int cmd_classical(const ClassicalOpts& opt) {
    qbn::NetworkSpec spec = parse_file(opt.path);
    qbn::TransitionTable table = qbn::build_transition_table(spec);
    qbn::AttractorAnalysis analysis = qbn::analyze_attractors(table);

    int horizon = 0;
    for (const qbn::AttractorInfo& a : analysis.attractors)
        horizon = std::max(horizon, a.max_transient);

    nlohmann::json j;
    j["genes"] = spec.genes;
    j["total_states"] = table.size();
    j["transient_horizon"] = horizon;
    j["attractors"] = nlohmann::json::array();
    for (const qbn::AttractorInfo& a : analysis.attractors) {
        nlohmann::json ja;
        ja["cycle"] = nlohmann::json::array();
        for (qbn::StateIndex s : a.cycle_states)
            ja["cycle"].push_back(qbn::display_state(s, table.n));
        ja["period"] = a.period();
        ja["basin_size"] = a.basin_size;
        ja["max_transient"] = a.max_transient;
        j["attractors"].push_back(std::move(ja));
    }
    emit(opt.out, j.dump(2) + "\n");

    if (!opt.stg.empty()) {
        std::ostringstream edges;
        qbn::write_stg(table, edges, opt.stg_format == "display");
        write_file(opt.stg, edges.str());
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// search
// ---------------------------------------------------------------------------

struct SearchOpts {
    std::string path;
    std::string out;
    std::uint64_t shots = 10000;
    std::uint64_t seed = 0;
    int steps = -1; // -1: use the transient horizon
    std::string counting = "classical";
    int precision = 0;
    std::string backend = "effective";
    double noise_px = 0.0;
    double noise_py = 0.0;
    double noise_pz = 0.0;
    std::uint64_t noise_seed = 0;
    bool noise_seed_set = false;
    int trajectories = 100;
    int retries = 32;
    std::string format = "json";
    std::string phi_sign = "negative";
    bool no_verify = false;
};

std::string histogram_csv(const qbn::MeasurementHistogram& h) {
    std::string out = "bitstring,count\n";
    for (const auto& [bits, count] : h.counts)
        out += bits + ',' + std::to_string(count) + '\n';
    return out;
}

// Cycles as display strings, rotated to start at their smallest state and
// sorted, so discovery order does not affect comparison.
std::vector<std::vector<std::string>> canonical_cycles(
    const std::vector<std::vector<qbn::StateIndex>>& cycles, int n) {
    std::vector<std::vector<std::string>> out;
    for (std::vector<qbn::StateIndex> cyc : cycles) {
        std::rotate(cyc.begin(), std::min_element(cyc.begin(), cyc.end()), cyc.end());
        std::vector<std::string> strs;
        strs.reserve(cyc.size());
        for (qbn::StateIndex s : cyc) strs.push_back(qbn::display_state(s, n));
        out.push_back(std::move(strs));
    }
    std::sort(out.begin(), out.end());
    return out;
}

int cmd_search(const SearchOpts& opt) {
    qbn::NetworkSpec spec = parse_file(opt.path);

    qbn::SearchConfig cfg;
    cfg.shots = opt.shots;
    cfg.seed = opt.seed;
    if (opt.steps >= 0) cfg.steps = opt.steps;
    cfg.counting =
        opt.counting == "quantum" ? qbn::CountingMode::Quantum : qbn::CountingMode::ClassicalExact;
    cfg.counting_qubits = opt.precision;
    cfg.backend = opt.backend == "circuit" ? qbn::SearchBackend::CircuitFaithful
                                           : qbn::SearchBackend::Effective;
    cfg.retry_budget = opt.retries;
    cfg.noise_trajectories = opt.trajectories;
    cfg.phi_sign =
        opt.phi_sign == "positive" ? qbn::PhiSign::Positive : qbn::PhiSign::Negative;
    if (opt.noise_px > 0 || opt.noise_py > 0 || opt.noise_pz > 0) {
        qbn::NoiseConfig noise;
        noise.p_x = opt.noise_px;
        noise.p_y = opt.noise_py;
        noise.p_z = opt.noise_pz;
        noise.seed = opt.noise_seed_set ? opt.noise_seed : opt.seed;
        if (!noise.valid()) {
            std::cerr << "error: noise probabilities must be nonnegative with "
                         "p_x + p_y + p_z <= 1\n";
            return kInvalidInput;
        }
        cfg.noise = noise;
    }

    qbn::SearchReport report = qbn::run_search(spec, cfg);
    for (const std::string& w : report.warnings) std::cerr << "warning: " << w << '\n';

    write_file(opt.out, report.to_json());

    std::filesystem::path out_path(opt.out);
    std::string stem = (out_path.parent_path() / out_path.stem()).string();
    for (const qbn::RunRecord& rec : report.runs) {
        std::string hist_path = stem + "_run" + std::to_string(rec.run) +
                                (opt.format == "csv" ? ".csv" : ".json");
        write_file(hist_path,
                   opt.format == "csv" ? histogram_csv(rec.histogram) : rec.histogram.to_json());
    }

    std::cout << "found " << report.attractors.size() << " attractor(s) in "
              << report.runs.size() << " run(s)\n";

    if (!opt.no_verify) {
        qbn::TransitionTable table = qbn::build_transition_table(spec);
        std::vector<std::vector<qbn::StateIndex>> expected;
        for (const qbn::AttractorInfo& a : qbn::find_attractors(table))
            expected.push_back(a.cycle_states);
        std::vector<std::vector<qbn::StateIndex>> found;
        for (const qbn::AttractorRecord& a : report.attractors) {
            std::vector<qbn::StateIndex> cyc;
            for (const std::string& s : a.cycle) cyc.push_back(qbn::parse_display_state(s));
            found.push_back(std::move(cyc));
        }
        if (canonical_cycles(expected, spec.n()) != canonical_cycles(found, spec.n())) {
            std::cerr << "self-check FAILED: discovered attractors do not match the "
                         "exhaustive classical analysis\n";
            return kOracleMismatch;
        }
        std::cout << "self-check passed: attractor set matches exhaustive analysis\n";
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Attractor search for synchronous Boolean networks by iterated "
                 "exact suppression of known basins"};
    app.require_subcommand(1);

    std::string validate_path;
    CLI::App* validate =
        app.add_subcommand("validate", "Parse a network file and report its genes");
    validate->add_option("file", validate_path, "BoolNet-style network file")->required();

    ClassicalOpts copt;
    CLI::App* classical =
        app.add_subcommand("classical", "Exhaustive attractor/basin analysis");
    classical->add_option("file", copt.path, "BoolNet-style network file")->required();
    classical->add_option("--out", copt.out, "Report JSON path (default: stdout)");
    classical->add_option("--stg", copt.stg, "Also write the state transition graph here");
    classical->add_option("--stg-format", copt.stg_format, "STG edge format")
        ->check(CLI::IsMember({"index", "display"}));

    SearchOpts sopt;
    CLI::App* search =
        app.add_subcommand("search", "Quantum suppression search for all attractors");
    search->add_option("file", sopt.path, "BoolNet-style network file")->required();
    search->add_option("--out", sopt.out, "Search report JSON path")->required();
    search->add_option("--shots", sopt.shots, "Measurement shots per run");
    search->add_option("--seed", sopt.seed, "Master RNG seed");
    search->add_option("--steps", sopt.steps, "Evolution steps T (default: transient horizon)");
    search->add_option("--counting", sopt.counting, "Marked-state counting mode")
        ->check(CLI::IsMember({"classical", "quantum"}));
    search->add_option("--precision", sopt.precision,
                       "Counting qubits for --counting quantum (default n+3)");
    search->add_option("--backend", sopt.backend, "Suppression backend")
        ->check(CLI::IsMember({"effective", "circuit"}));
    search->add_option("--noise-px", sopt.noise_px, "Per-gate bit-flip probability");
    search->add_option("--noise-py", sopt.noise_py, "Per-gate Y-error probability");
    search->add_option("--noise-pz", sopt.noise_pz, "Per-gate phase-flip probability");
    search->add_option("--noise-seed", sopt.noise_seed, "Noise RNG seed (default: --seed)")
        ->each([&](const std::string&) { sopt.noise_seed_set = true; });
    search->add_option("--trajectories", sopt.trajectories, "Noise Monte Carlo trajectories");
    search->add_option("--retries", sopt.retries, "Rejected measurements tolerated per run");
    search->add_option("--format", sopt.format, "Per-run histogram file format")
        ->check(CLI::IsMember({"json", "csv"}));
    search->add_option("--phi-sign", sopt.phi_sign, "Suppression phase sign convention")
        ->check(CLI::IsMember({"negative", "positive"}));
    search->add_flag("--no-verify", sopt.no_verify,
                     "Skip the classical-oracle self-check of the result");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInvalidInput;
    }

    try {
        if (app.got_subcommand(validate)) return cmd_validate(validate_path);
        if (app.got_subcommand(classical)) return cmd_classical(copt);
        return cmd_search(sopt);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const qbn::CapacityExceeded& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kCapacity;
    } catch (const qbn::NonConvergence& e) {
        std::cerr << "error: search did not converge\n" << e.what() << '\n';
        return kNonConvergence;
    } catch (const qbn::ParseError& e) {
        std::cerr << diag(app.got_subcommand(validate)   ? validate_path
                          : app.got_subcommand(classical) ? copt.path
                                                          : sopt.path,
                          e)
                  << '\n';
        return kInvalidInput;
    } catch (const qbn::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalidInput;
    }
}
