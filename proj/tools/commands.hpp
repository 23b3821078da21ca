#pragma once

// Command layer behind the `randset` executable. Every command maps parsed
// flags onto one library call and renders the result as JSON (or CSV for
// tables). Kept separate from main() so tests can drive it in-process.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "randset/randset.hpp"

namespace randset::cli {

using io::json;

/// Parsed command line. seed defaults to 0.
struct CommandConfig {
    std::string command;
    std::string space_path;
    std::string input;
    std::string input_b;
    std::string partition;
    std::string decomposition;
    std::string out;
    std::string format = "json";
    std::string replicates_csv;
    std::uint64_t seed = 0;
    std::size_t n_permutations = 999;
    unsigned n_max = 0;
    double alpha = 2.0;
    std::string p = "2";
    double a = 0.5;
    double exponent = 1.0;
    double significance = 0.05;
    std::size_t sample_size = 20;
    std::size_t trials = 500;
    bool exhaustive = false;
    bool measure_variant = false;
};

namespace detail {

using randset::detail::fail;
using randset::detail::require;

inline std::string number(double x) {
    if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    return json(x).dump();
}

inline json maybe_number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string to_csv() const {
        std::ostringstream os;
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t k = 0; k < cells.size(); ++k) os << (k ? "," : "") << cells[k];
            os << '\n';
        };
        line(header);
        for (const auto& r : rows) line(r);
        return os.str();
    }
};

/// What a command produced: a JSON report plus an optional table for CSV.
struct Output {
    json report;
    std::optional<Table> table;
};

inline json base_report(const std::string& command) {
    return json{{"schema", io::schema_version}, {"command", command}};
}

inline MeasureSpace require_space(const CommandConfig& c) {
    require(!c.space_path.empty(), ErrorCode::InvalidParameter, "--space is required");
    return io::load_space(c.space_path);
}

inline const std::string& require_path(const std::string& path, const char* flag) {
    require(!path.empty(), ErrorCode::InvalidParameter, std::string(flag) + " is required");
    return path;
}

inline FiniteSet load_set(const std::string& path, const MeasureSpace& space) {
    const json j = io::read_json_file(path);
    io::detail::check_schema(j);
    return io::parse_set(j, space.size());
}

inline DiscreteRandomSet load_distribution(const std::string& path, const MeasureSpace& space) {
    return io::parse_distribution(io::read_json_file(path), space.size());
}

inline double parse_order(const std::string& text) {
    if (text == "inf" || text == "infinity") return infinite_order;
    try {
        std::size_t used = 0;
        const double p = std::stod(text, &used);
        require(used == text.size(), ErrorCode::InvalidOrder, "cannot read order '" + text + "'");
        return p;
    } catch (const std::logic_error&) {
        fail(ErrorCode::InvalidOrder, "cannot read order '" + text + "'");
    }
}

inline json quantile_summary(std::vector<double> values) {
    if (values.empty()) return json(nullptr);
    std::sort(values.begin(), values.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, values.size() - 1);
        return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
    };
    json qs = json::object();
    for (double q : {0.05, 0.25, 0.5, 0.75, 0.95}) qs[number(q)] = quantile(q);
    return json{{"min", values.front()}, {"max", values.back()}, {"quantiles", qs}};
}

inline json test_result_json(const std::string& command, const TestResult& r) {
    json j = base_report(command);
    j["statistic"] = r.statistic;
    j["p_value"] = r.p_value;
    j["n_permutations"] = r.n_permutations;
    j["seed"] = r.seed;
    j["exhaustive"] = r.exhaustive;
    j["rng"] = rng_name;
    j["replicates_summary"] = quantile_summary(r.replicates);
    return j;
}

inline void write_replicates_csv(const std::string& path, const TestResult& r) {
    if (path.empty()) return;
    Table t{{"replicate", "statistic"}, {}};
    for (std::size_t k = 0; k < r.replicates.size(); ++k) t.rows.push_back({std::to_string(k), number(r.replicates[k])});
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        require(static_cast<bool>(os), ErrorCode::IoError, "cannot write " + path);
        os << t.to_csv();
    }
    std::filesystem::rename(tmp, path);
}

// ---- commands --------------------------------------------------------------

inline Output space_validate(const CommandConfig& c) {
    const MeasureSpace space = require_space(c);
    json j = base_report("space validate");
    j["valid"] = true;
    j["atoms"] = space.size();
    j["total_mass"] = space.total_mass();
    j["is_probability"] = std::abs(space.total_mass() - 1.0) <= identity_tol;
    return {j, std::nullopt};
}

inline Output distance_sets(const CommandConfig& c) {
    const MeasureSpace space = require_space(c);
    const FiniteSet a = load_set(require_path(c.input, "--input"), space);
    const FiniteSet b = load_set(require_path(c.input_b, "--input-b"), space);
    json j = base_report("distance sets");
    j["a"] = io::set_to_json(a);
    j["b"] = io::set_to_json(b);
    j["kernel_L"] = kernel_L(space, a, b);
    j["alpha"] = c.alpha;
    j["dist"] = dist(space, a, b, c.alpha);
    j["kernel_K"] = kernel_K(space, a, b);
    j["set_norm_a"] = set_norm(space, a);
    j["set_norm_b"] = set_norm(space, b);
    j["cos_angle"] = (mu(space, a) > 0.0 && mu(space, b) > 0.0) ? json(cos_angle(space, a, b)) : json(nullptr);
    return {j, std::nullopt};
}

inline Output distance_dists(const CommandConfig& c) {
    const MeasureSpace space = require_space(c);
    const DiscreteRandomSet da = load_distribution(require_path(c.input, "--input"), space);
    const DiscreteRandomSet db = load_distribution(require_path(c.input_b, "--input-b"), space);
    const MeanFunction fa = mean_function(space, da);
    const MeanFunction fb = mean_function(space, db);
    const double p = parse_order(c.p);
    json j = base_report("distance dists");
    j["mean_a"] = io::mean_to_json(fa);
    j["mean_b"] = io::mean_to_json(fb);
    j["n2_sq_double_sum"] = n_distance_sq_double(space, da, db);
    j["n2"] = n_distance(space, fa, fb);
    j["n2_sq"] = std::pow(n_distance(space, fa, fb), 2);
    j["p"] = maybe_number(p);
    j["n_p"] = n_distance_p(space, fa, fb, p);
    j["n_inf"] = n_distance_p(space, fa, fb, infinite_order);
    return {j, std::nullopt};
}

inline Output project_cmd(const CommandConfig& c) {
    const MeasureSpace space = require_space(c);
    const FiniteSet a = load_set(require_path(c.input, "--input"), space);
    const json sys = io::read_json_file(require_path(c.input_b, "--input-b"));
    io::detail::check_schema(sys);
    const auto system = io::parse_set_list(sys, "sets", space.size());
    const Projection p = project(space, a, system);
    json j = base_report("project");
    j["coefficients"] = p.coefficients;
    j["residual"] = p.residual;
    j["coefficient_sum"] = p.coefficient_sum;
    j["completion_coefficient"] = p.completion_coefficient;
    j["complete_system"] = p.complete_system;
    Table t{{"j", "coefficient"}, {}};
    for (std::size_t k = 0; k < p.coefficients.size(); ++k) t.rows.push_back({std::to_string(k + 1), number(p.coefficients[k])});
    return {j, t};
}

inline const std::vector<std::string> stability_header = {"n", "kappa_n", "lambda_n", "sup_error"};

inline Output stability_check(const CommandConfig& c) {
    const MeasureSpace space = require_space(c);
    const DiscreteRandomSet d = load_distribution(require_path(c.input, "--input"), space);
    const unsigned n_max = c.n_max == 0 ? 5 : c.n_max;
    const StabilityReport r = check_stable(space, d, n_max);
    json j = base_report("stability check");
    j["is_stable"] = r.is_stable;
    j["nonzero_value"] = r.nonzero_value ? json(*r.nonzero_value) : json(nullptr);
    j["levels"] = r.levels;
    j["kappa_convention"] = "f^n = kappa_n f";
    Table t{stability_header, {}};
    t.header.push_back("normalizer");
    json rows = json::array();
    for (std::size_t k = 0; k < r.kappa.size(); ++k) {
        const unsigned n = static_cast<unsigned>(k + 2);
        rows.push_back(json{{"n", n}, {"kappa_n", r.kappa[k]}, {"normalizer", r.normalizer[k]}, {"residual", r.residual[k]}});
        t.rows.push_back({std::to_string(n), number(r.kappa[k]), "", number(r.residual[k]), number(r.normalizer[k])});
    }
    j["rows"] = rows;
    j["max_residual"] = r.max_residual;
    j["cross_check_agrees"] = r.cross_check_agrees;
    return {j, t};
}

inline Output stability_t1(const CommandConfig& c) {
    const MeasureSpace space = require_space(c);
    const DiscreteRandomSet d = load_distribution(require_path(c.input, "--input"), space);
    const Theorem1Table tab = theorem1_convergence(space, d, c.n_max == 0 ? 20 : c.n_max);
    json j = base_report("stability t1");
    j["core"] = io::set_to_json(tab.core);
    j["core_probability"] = tab.core_probability;
    j["witness_atom"] = tab.witness ? json(*tab.witness + 1) : json(nullptr);
    Table t{stability_header, {}};
    t.header.push_back("bound");
    json rows = json::array();
    for (const auto& row : tab.rows) {
        rows.push_back(json{{"n", row.n}, {"sup_error", row.sup_error}, {"bound", row.bound}});
        t.rows.push_back({std::to_string(row.n), "", "", number(row.sup_error), number(row.bound)});
    }
    j["rows"] = rows;
    return {j, t};
}

inline Output stability_t2(const CommandConfig& c) {
    const MeasureSpace space = require_space(c);
    const DiscreteRandomSet da = load_distribution(require_path(c.input, "--input"), space);
    const DiscreteRandomSet db = load_distribution(require_path(c.input_b, "--input-b"), space);
    const json dj = io::read_json_file(require_path(c.decomposition, "--decomposition"));
    io::detail::check_schema(dj);
    Decomposition dec;
    const json& p1 = io::detail::field(dj, "p1");
    const json& p2 = io::detail::field(dj, "p2");
    require(p1.is_number() && p2.is_number(), ErrorCode::ParseError, "'p1' and 'p2' must be numbers");
    dec.p1 = p1.get<double>();
    dec.p2 = p2.get<double>();
    dec.h = io::detail::number_array(io::detail::field(io::detail::field(dj, "h"), "values"), "values");
    const Theorem2Table tab = theorem2_convergence(space, da, db, dec, c.n_max == 0 ? 30 : c.n_max);
    json j = base_report("stability t2");
    j["stable_level"] = tab.stable_level;
    Table t{stability_header, {}};
    for (const char* extra : {"decay_term", "bias_term", "premise_ratio"}) t.header.push_back(extra);
    json rows = json::array();
    for (const auto& row : tab.rows) {
        rows.push_back(json{{"n", row.n},
                            {"kappa_n", row.kappa},
                            {"lambda_n", row.lambda},
                            {"sup_error", row.sup_error},
                            {"decay_term", row.decay_term},
                            {"bias_term", row.bias_term},
                            {"premise_ratio", row.premise_ratio}});
        t.rows.push_back({std::to_string(row.n), number(row.kappa), number(row.lambda), number(row.sup_error),
                          number(row.decay_term), number(row.bias_term), number(row.premise_ratio)});
    }
    j["rows"] = rows;
    return {j, t};
}

inline Output stability_t3(const CommandConfig& c) {
    const MeasureSpace space = require_space(c);
    const json cj = io::read_json_file(require_path(c.input, "--input"));
    io::detail::check_schema(cj);
    const auto chain = io::parse_set_list(cj, "chain", space.size());
    const unsigned n_max = c.n_max == 0 ? 10 : c.n_max;
    const Theorem3Check check = verify_theorem3(space, chain, c.a, n_max);
    const DiscreteRandomSet d = make_geometric_chain(space, chain, c.a);
    json j = base_report("stability t3");
    j["a"] = c.a;
    j["distribution"] = io::distribution_to_json(d);
    j["mean"] = io::mean_to_json(mean_function(d));
    Table t{stability_header, {}};
    t.header.push_back("xi_n");
    json rows = json::array();
    for (std::size_t k = 0; k < check.deviation.size(); ++k) {
        const unsigned n = static_cast<unsigned>(k + 1);
        const double xi = xi_transform(c.a, n);
        rows.push_back(json{{"n", n}, {"xi_n", xi}, {"sup_error", check.deviation[k]}});
        t.rows.push_back({std::to_string(n), "", "", number(check.deviation[k]), number(xi)});
    }
    j["rows"] = rows;
    j["max_deviation"] = check.max_deviation;
    return {j, t};
}

inline std::optional<MeasureSpace> optional_space(const CommandConfig& c) {
    if (c.space_path.empty()) return std::nullopt;
    return io::load_space(c.space_path);
}

inline Output test_sets(const CommandConfig& c) {
    const auto override_space = optional_space(c);
    const auto* sp = override_space ? &*override_space : nullptr;
    const auto a = io::load_sample(require_path(c.input, "--input"), sp);
    const auto b = io::load_sample(require_path(c.input_b, "--input-b"), sp ? sp : &a.space);
    const TestResult r =
        permutation_test(a.space, a.sample, b.sample, PermutationOptions{c.n_permutations, c.seed, c.exhaustive});
    write_replicates_csv(c.replicates_csv, r);
    json j = test_result_json("test sets", r);
    j["sample_size"] = a.sample.observations.size();
    return {j, std::nullopt};
}

using RealVectors = std::vector<std::vector<double>>;

inline RealVectors load_vectors(const std::string& path, const CommandConfig& c) {
    const json j = io::read_json_file(path);
    io::detail::check_schema(j);
    if (j.is_object() && j.contains("vectors")) {
        const json& arr = j["vectors"];
        require(arr.is_array(), ErrorCode::ParseError, "'vectors' must be an array of arrays");
        RealVectors out;
        for (const auto& v : arr) out.push_back(io::detail::number_array(v, "vectors"));
        return out;
    }
    require(!c.partition.empty(), ErrorCode::InvalidParameter,
            "set samples need --partition to be reduced to cell vectors");
    const auto override_space = optional_space(c);
    const auto loaded = io::load_sample(path, override_space ? &*override_space : nullptr);
    const CellPartition partition = io::parse_partition(io::read_json_file(c.partition), loaded.space);
    if (c.measure_variant) return discretize_measure(loaded.space, partition, loaded.sample);
    RealVectors out;
    for (const auto& v : discretize(partition, loaded.sample)) out.emplace_back(v.bits.begin(), v.bits.end());
    return out;
}

inline Output test_vectors(const CommandConfig& c) {
    const RealVectors a = load_vectors(require_path(c.input, "--input"), c);
    const RealVectors b = load_vectors(require_path(c.input_b, "--input-b"), c);
    const TestResult r = vector_permutation_test(std::span<const std::vector<double>>(a),
                                                 std::span<const std::vector<double>>(b),
                                                 PermutationOptions{c.n_permutations, c.seed, c.exhaustive}, c.exponent);
    write_replicates_csv(c.replicates_csv, r);
    json j = test_result_json("test vectors", r);
    j["exponent"] = c.exponent;
    j["sample_size"] = a.size();
    return {j, std::nullopt};
}

inline Output test_discretize(const CommandConfig& c) {
    const auto override_space = optional_space(c);
    const auto loaded = io::load_sample(require_path(c.input, "--input"), override_space ? &*override_space : nullptr);
    const CellPartition partition =
        io::parse_partition(io::read_json_file(require_path(c.partition, "--partition")), loaded.space);
    json j = base_report("test discretize");
    json vectors = json::array();
    Table t{{}, {}};
    for (std::size_t l = 0; l < partition.size(); ++l) t.header.push_back("cell_" + std::to_string(l + 1));
    if (c.measure_variant) {
        const auto vs = discretize_measure(loaded.space, partition, loaded.sample);
        for (const auto& v : vs) {
            vectors.push_back(v);
            std::vector<std::string> row;
            for (double x : v) row.push_back(number(x));
            t.rows.push_back(row);
        }
        j["semantics"] = "measure";
        j["cell_means"] = cell_means(vs);
    } else {
        const auto vs = discretize(partition, loaded.sample);
        for (const auto& v : vs) {
            vectors.push_back(std::vector<int>(v.bits.begin(), v.bits.end()));
            std::vector<std::string> row;
            for (auto bit : v.bits) row.push_back(std::to_string(bit));
            t.rows.push_back(row);
        }
        j["semantics"] = "nonempty_intersection";
        j["cell_means"] = cell_means(vs);
    }
    j["vectors"] = vectors;
    return {j, t};
}

inline Output test_simulate(const CommandConfig& c, bool power) {
    const MeasureSpace space = require_space(c);
    const DiscreteRandomSet da = load_distribution(require_path(c.input, "--input"), space);
    const DiscreteRandomSet db = power ? load_distribution(require_path(c.input_b, "--input-b"), space) : da;
    SimulationConfig sim{c.sample_size, c.n_permutations, c.trials, c.significance, c.seed, std::nullopt};
    if (!c.partition.empty()) sim.partition = io::parse_partition(io::read_json_file(c.partition), space);
    const SimulationSummary s = simulate_rejection_rate(space, da, db, sim);
    json j = base_report(power ? "test simulate-power" : "test simulate-level");
    j["statistic"] = sim.partition ? "vectors" : "sets";
    j["sample_size"] = sim.sample_size;
    j["n_permutations"] = sim.n_permutations;
    j["trials"] = s.trials;
    j["significance"] = sim.significance;
    j["seed"] = sim.seed;
    j["rng"] = rng_name;
    j["rejections"] = s.rejections;
    j["rejection_rate"] = s.rejection_rate();
    j["p_value_summary"] = quantile_summary(s.p_values);
    return {j, std::nullopt};
}

inline void emit(const Output& result, const CommandConfig& c, std::ostream& out) {
    std::string text;
    if (c.format == "csv") {
        require(result.table.has_value(), ErrorCode::InvalidParameter,
                "command '" + c.command + "' has no tabular output; use --format json");
        text = result.table->to_csv();
    } else {
        require(c.format == "json", ErrorCode::InvalidParameter, "--format must be json or csv");
        text = result.report.dump(2) + "\n";
    }
    if (c.out.empty()) {
        out << text;
        return;
    }
    // Write next to the target and move into place so failures never leave
    // a partial report behind.
    const std::string tmp = c.out + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        require(static_cast<bool>(os), ErrorCode::IoError, "cannot write " + c.out);
        os << text;
        require(static_cast<bool>(os), ErrorCode::IoError, "cannot write " + c.out);
    }
    std::filesystem::rename(tmp, c.out);
}

inline void report_error(std::ostream& err, const std::string& code, const std::string& message) {
    err << json{{"error", {{"code", code}, {"message", message}}}}.dump() << "\n";
}

}  // namespace detail

/// Runs one command. Returns the process exit status: 0 on success, 1 on a
/// library or input error, 2 on a usage error. Errors are reported on `err`
/// as {"error": {"code": ..., "message": ...}}.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CommandConfig c;
    std::function<detail::Output()> action;

    CLI::App app{"Distances, stability analysis and two-sample tests for random sets on finite measure spaces",
                 "randset"};
    app.require_subcommand(1);

    auto common = [&](CLI::App* sub) {
        sub->add_option("--out", c.out, "Write the report to this file instead of stdout");
        sub->add_option("--format", c.format, "Output format: json or csv")->capture_default_str();
    };
    auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& desc, auto fn) {
        CLI::App* sub = parent->add_subcommand(name, desc);
        common(sub);
        sub->callback([&c, &action, fn, full = parent->get_name() + " " + name] {
            c.command = full;
            action = [&c, fn] { return fn(c); };
        });
        return sub;
    };

    CLI::App* space = app.add_subcommand("space", "Ground space files")->require_subcommand(1);
    leaf(space, "validate", "Check a space file", detail::space_validate)
        ->add_option("--space", c.space_path, "Space file")->required();

    CLI::App* distance = app.add_subcommand("distance", "Kernels and distances")->require_subcommand(1);
    {
        auto* sets = leaf(distance, "sets", "Distances between two sets", detail::distance_sets);
        sets->add_option("--space", c.space_path, "Space file")->required();
        sets->add_option("--input", c.input, "First set file")->required();
        sets->add_option("--input-b", c.input_b, "Second set file")->required();
        sets->add_option("--alpha", c.alpha, "Metric exponent alpha > 0")->capture_default_str();

        auto* dists = leaf(distance, "dists", "N-distances between two distributions", detail::distance_dists);
        dists->add_option("--space", c.space_path, "Space file")->required();
        dists->add_option("--input", c.input, "First distribution file")->required();
        dists->add_option("--input-b", c.input_b, "Second distribution file")->required();
        dists->add_option("--p", c.p, "Order p >= 1 or 'inf'")->capture_default_str();
    }

    {
        auto* proj = app.add_subcommand("project", "Best approximation of a set by a disjoint event system");
        common(proj);
        proj->add_option("--space", c.space_path, "Space file")->required();
        proj->add_option("--input", c.input, "Set file")->required();
        proj->add_option("--input-b", c.input_b, "System file {\"sets\": [...]}")->required();
        proj->callback([&] {
            c.command = "project";
            action = [&c] { return detail::project_cmd(c); };
        });
    }

    CLI::App* stability = app.add_subcommand("stability", "Stability under intersection powers")->require_subcommand(1);
    {
        auto* check = leaf(stability, "check", "Check stability and report kappa_n", detail::stability_check);
        check->add_option("--space", c.space_path, "Space file")->required();
        check->add_option("--input", c.input, "Distribution file")->required();
        check->add_option("--n-max", c.n_max, "Largest power (default 5)");

        auto* t1 = leaf(stability, "t1", "Convergence of f^n to the core indicator", detail::stability_t1);
        t1->add_option("--space", c.space_path, "Space file")->required();
        t1->add_option("--input", c.input, "Distribution file")->required();
        t1->add_option("--n-max", c.n_max, "Largest power (default 20)");

        auto* t2 = leaf(stability, "t2", "Normalized convergence to a stable component", detail::stability_t2);
        t2->add_option("--space", c.space_path, "Space file")->required();
        t2->add_option("--input", c.input, "Distribution of A")->required();
        t2->add_option("--input-b", c.input_b, "Stable distribution B")->required();
        t2->add_option("--decomposition", c.decomposition, "File {\"p1\", \"p2\", \"h\": {\"values\"}}")->required();
        t2->add_option("--n-max", c.n_max, "Largest power (default 30)");

        auto* t3 = leaf(stability, "t3", "xi-stability of a geometric chain", detail::stability_t3);
        t3->add_option("--space", c.space_path, "Space file")->required();
        t3->add_option("--input", c.input, "Chain file {\"chain\": [...]}")->required();
        t3->add_option("--a", c.a, "Parameter a in (0, 1)")->capture_default_str();
        t3->add_option("--n-max", c.n_max, "Largest power (default 10)");
    }

    CLI::App* test = app.add_subcommand("test", "Two-sample permutation tests")->require_subcommand(1);
    {
        auto perm = [&](CLI::App* sub) {
            sub->add_option("--n-permutations", c.n_permutations, "Number of random re-splits")->capture_default_str();
            sub->add_option("--seed", c.seed, "Seed")->capture_default_str();
        };
        auto* sets = leaf(test, "sets", "Permutation test on set samples", detail::test_sets);
        sets->add_option("--space", c.space_path, "Space file (overrides the samples' reference)");
        sets->add_option("--input", c.input, "First sample file")->required();
        sets->add_option("--input-b", c.input_b, "Second sample file")->required();
        sets->add_flag("--exhaustive", c.exhaustive, "Enumerate all splits (C(2n,n) <= 100000)");
        sets->add_option("--replicates-csv", c.replicates_csv, "Write all replicate statistics to CSV");
        perm(sets);

        auto* vectors = leaf(test, "vectors", "Permutation test on cell vectors", detail::test_vectors);
        vectors->add_option("--space", c.space_path, "Space file (overrides the samples' reference)");
        vectors->add_option("--input", c.input, "First vector or sample file")->required();
        vectors->add_option("--input-b", c.input_b, "Second vector or sample file")->required();
        vectors->add_option("--partition", c.partition, "Partition file for set samples");
        vectors->add_option("--exponent", c.exponent, "Distance exponent in (0, 2)")->capture_default_str();
        vectors->add_flag("--measure-variant", c.measure_variant, "Use mu(A ∩ C)/mu(C) instead of nonemptiness");
        vectors->add_flag("--exhaustive", c.exhaustive, "Enumerate all splits (C(2n,n) <= 100000)");
        vectors->add_option("--replicates-csv", c.replicates_csv, "Write all replicate statistics to CSV");
        perm(vectors);

        auto* disc = leaf(test, "discretize", "Reduce a set sample to cell vectors", detail::test_discretize);
        disc->add_option("--space", c.space_path, "Space file (overrides the sample's reference)");
        disc->add_option("--input", c.input, "Sample file")->required();
        disc->add_option("--partition", c.partition, "Partition file")->required();
        disc->add_flag("--measure-variant", c.measure_variant, "Use mu(A ∩ C)/mu(C) instead of nonemptiness");

        auto simulate = [&](CLI::App* sub) {
            sub->add_option("--space", c.space_path, "Space file")->required();
            sub->add_option("--partition", c.partition, "Test cell vectors over this partition");
            sub->add_option("--sample-size", c.sample_size, "Observations per sample")->capture_default_str();
            sub->add_option("--trials", c.trials, "Number of simulated data sets")->capture_default_str();
            sub->add_option("--significance", c.significance, "Rejection threshold on p")->capture_default_str();
            perm(sub);
        };
        auto* level = leaf(test, "simulate-level", "Rejection rate when both samples share a law",
                           [](const CommandConfig& cfg) { return detail::test_simulate(cfg, false); });
        level->add_option("--input", c.input, "Distribution file")->required();
        simulate(level);

        auto* power = leaf(test, "simulate-power", "Rejection rate under an alternative",
                           [](const CommandConfig& cfg) { return detail::test_simulate(cfg, true); });
        power->add_option("--input", c.input, "Distribution of the first sample")->required();
        power->add_option("--input-b", c.input_b, "Distribution of the second sample")->required();
        simulate(power);
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        detail::report_error(err, "UsageError", e.what());
        return 2;
    }

    try {
        detail::Output result = action();
        detail::emit(result, c, out);
        return 0;
    } catch (const Error& e) {
        detail::report_error(err, std::string(to_string(e.code())), e.detail());
    } catch (const std::exception& e) {
        detail::report_error(err, "InternalError", e.what());
    }
    return 1;
}

}  // namespace randset::cli
