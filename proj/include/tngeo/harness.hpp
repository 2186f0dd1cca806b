#ifndef TNGEO_HARNESS_HPP
#define TNGEO_HARNESS_HPP

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "tngeo/optimizer.hpp"

namespace tngeo {

struct GeometryChoice {
    GeometrySpec spec; // chi is overwritten per sweep cell
    bool compact = false;
};

/// Full description of one sweep: target scenario, geometry x chi grid,
/// trial count, seeds and optimizer settings. Loaded from a JSON file.
struct ExperimentConfig {
    std::uint32_t n = 8;
    std::size_t p = 2;
    TargetProvenance::Scenario target_scenario = TargetProvenance::Scenario::FullRandom;
    std::uint64_t target_seed = 1;
    GeometrySpec target_spec; // hidden_tn only
    std::vector<GeometryChoice> geometries;
    std::vector<std::size_t> chi_values;
    int trials_per_cell = 10;
    double success_threshold = 1e-3;
    std::uint64_t base_seed = 0;
    OptimConfig optim;
    int workers = 1;
    bool record_timings = false; // real wall_ms forfeits byte-reproducible output
    std::size_t memory_ceiling = kDefaultMemoryCeiling;

    void validate() const {
        if (trials_per_cell < 1) throw ConfigError("trials_per_cell must be >= 1");
        if (geometries.empty()) throw ConfigError("geometries must be nonempty");
        if (chi_values.empty()) throw ConfigError("chi_values must be nonempty");
        for (std::size_t i = 1; i < chi_values.size(); ++i)
            if (chi_values[i] <= chi_values[i - 1])
                throw ConfigError("chi_values must be sorted ascending");
        optim.validate();
    }
};

struct SweepRow {
    std::string geometry;
    bool compact = false;
    std::uint32_t n = 0;
    std::size_t chi = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    double final_infidelity = 0.0;
    int iterations = 0;
    double wall_ms = 0.0;
    std::size_t largest_tensor = 0;
    std::size_t total_elems = 0;
    int diameter = 0;
    std::string converged_reason;
};

using SweepTable = std::vector<SweepRow>;

// --- JSON (de)serialization ------------------------------------------------

inline Family family_from_tag(const std::string& tag) {
    if (tag == "mps") return Family::MPS;
    if (tag == "antenna") return Family::Antenna;
    if (tag == "balanced") return Family::Balanced;
    if (tag == "star") return Family::Star;
    if (tag == "peps") return Family::PEPS;
    if (tag == "dense") return Family::Dense;
    throw ConfigError("unknown geometry family '" + tag + "'");
}

inline nlohmann::ordered_json spec_to_json(const GeometrySpec& s) {
    nlohmann::ordered_json j;
    j["family"] = family_tag(s.family);
    j["n"] = s.n;
    j["chi"] = s.chi;
    j["p"] = s.p;
    if (s.family == Family::Star) j["k"] = s.star_k;
    if (s.family == Family::PEPS) {
        if (s.peps_rows) j["rows"] = s.peps_rows;
        if (s.peps_cols) j["cols"] = s.peps_cols;
    }
    return j;
}

inline GeometrySpec spec_from_json(const nlohmann::json& j, std::uint32_t default_n,
                                   std::size_t default_p) {
    if (!j.contains("family")) throw ConfigError("geometry entry needs a 'family'");
    GeometrySpec s;
    s.family = family_from_tag(j.at("family").get<std::string>());
    s.n = j.value("n", default_n);
    s.p = j.value("p", default_p);
    s.chi = j.value("chi", std::size_t{1});
    s.star_k = j.value("k", std::uint32_t{1});
    s.peps_rows = j.value("rows", std::uint32_t{0});
    s.peps_cols = j.value("cols", std::uint32_t{0});
    s.validate();
    return s;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    try {
        cfg.n = j.at("n").get<std::uint32_t>();
        cfg.p = j.value("p", std::size_t{2});

        const auto& jt = j.at("target");
        const std::string kind = jt.at("kind").get<std::string>();
        cfg.target_seed = jt.value("seed", std::uint64_t{1});
        if (kind == "full_random") {
            cfg.target_scenario = TargetProvenance::Scenario::FullRandom;
        } else if (kind == "hidden_tn") {
            cfg.target_scenario = TargetProvenance::Scenario::HiddenTN;
            cfg.target_spec = spec_from_json(jt.at("spec"), cfg.n, cfg.p);
            cfg.target_spec.n = cfg.n;
            cfg.target_spec.p = cfg.p;
        } else {
            throw ConfigError("target.kind must be 'full_random' or 'hidden_tn'");
        }

        for (const auto& jg : j.at("geometries")) {
            GeometryChoice gc;
            gc.spec = spec_from_json(jg, cfg.n, cfg.p);
            gc.spec.n = cfg.n;
            gc.spec.p = cfg.p;
            gc.compact = jg.value("compact", false);
            cfg.geometries.push_back(gc);
        }
        cfg.chi_values = j.at("chi_values").get<std::vector<std::size_t>>();
        cfg.trials_per_cell = j.value("trials_per_cell", 10);
        cfg.success_threshold = j.value("success_threshold", 1e-3);
        cfg.base_seed = j.value("base_seed", std::uint64_t{0});
        cfg.workers = j.value("workers", 1);
        cfg.record_timings = j.value("record_timings", false);
        cfg.memory_ceiling = j.value("memory_ceiling", kDefaultMemoryCeiling);
        if (j.contains("optim")) {
            const auto& jo = j.at("optim");
            cfg.optim.memory_pairs = jo.value("memory_pairs", cfg.optim.memory_pairs);
            cfg.optim.max_iters = jo.value("max_iters", cfg.optim.max_iters);
            cfg.optim.grad_tol = jo.value("grad_tol", cfg.optim.grad_tol);
            cfg.optim.loss_tol = jo.value("loss_tol", cfg.optim.loss_tol);
            cfg.optim.loss_tol_window = jo.value("loss_tol_window", cfg.optim.loss_tol_window);
            cfg.optim.wolfe_c1 = jo.value("wolfe_c1", cfg.optim.wolfe_c1);
            cfg.optim.wolfe_c2 = jo.value("wolfe_c2", cfg.optim.wolfe_c2);
            cfg.optim.max_line_search_steps =
                jo.value("max_line_search_steps", cfg.optim.max_line_search_steps);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed experiment config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

inline TargetState make_target(const ExperimentConfig& cfg) {
    if (cfg.target_scenario == TargetProvenance::Scenario::FullRandom)
        return generate_full_random(cfg.n, cfg.p, cfg.target_seed, cfg.memory_ceiling);
    return generate_hidden_tn(cfg.target_spec, cfg.target_seed, cfg.memory_ceiling);
}

// --- sweep ------------------------------------------------------------------

namespace detail {

inline std::uint64_t cell_seed(const ExperimentConfig& cfg, const GeometryChoice& g,
                               std::size_t chi) {
    const GeometrySpec s = g.spec.resolved();
    return derive_seed({cfg.base_seed, static_cast<std::uint64_t>(s.family), s.star_k,
                        (static_cast<std::uint64_t>(s.peps_rows) << 16) | s.peps_cols,
                        g.compact ? 1ull : 0ull, chi, cfg.n, cfg.p});
}

inline int worker_count(const ExperimentConfig& cfg) {
    int w = cfg.workers;
    if (const char* env = std::getenv("TNGEO_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) w = static_cast<int>(v);
    }
    return std::max(w, 1);
}

} // namespace detail

/// Runs every (geometry, chi, trial) cell against one shared target. Trials
/// execute on a worker pool but rows come back in canonical cell order with
/// per-trial seeds derived from (base_seed, cell, trial), so the output is
/// identical for any worker count.
inline SweepTable sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const TargetState target = make_target(cfg);

    struct Job {
        GeometryChoice choice;
        std::size_t chi = 0;
        int trial = 0;
        std::uint64_t seed = 0;
    };
    std::vector<Job> jobs;
    for (const GeometryChoice& g : cfg.geometries) {
        for (std::size_t chi : cfg.chi_values) {
            const std::uint64_t cs = detail::cell_seed(cfg, g, chi);
            for (int t = 0; t < cfg.trials_per_cell; ++t)
                jobs.push_back({g, chi, t, derive_seed({cs, static_cast<std::uint64_t>(t)})});
        }
    }

    SweepTable table(jobs.size());
    std::atomic<std::size_t> next{0};
    auto run_job = [&](std::size_t i) {
        const Job& job = jobs[i];
        GeometrySpec spec = job.choice.spec;
        spec.n = cfg.n;
        spec.p = cfg.p;
        spec.chi = job.chi;

        SweepRow row;
        row.geometry = spec.name();
        row.compact = job.choice.compact;
        row.n = cfg.n;
        row.chi = job.chi;
        row.trial = job.trial;
        row.seed = job.seed;
        try {
            const TrialResult tr =
                run_trial(target, spec, job.choice.compact, job.seed, cfg.optim,
                          cfg.memory_ceiling);
            row.final_infidelity = tr.final_infidelity;
            row.iterations = tr.iterations_used;
            row.wall_ms = cfg.record_timings ? tr.wall_ms : 0.0;
            row.largest_tensor = tr.metrics.largest_tensor;
            row.total_elems = tr.metrics.total_elems;
            row.diameter = tr.metrics.diameter;
            row.converged_reason = to_string(tr.converged);
        } catch (const std::exception& e) {
            row.final_infidelity = std::numeric_limits<double>::quiet_NaN();
            row.converged_reason = "Error";
            std::cerr << "trial failed (" << row.geometry << " chi=" << row.chi << " trial "
                      << row.trial << "): " << e.what() << "\n";
        }
        table[i] = std::move(row);
    };

    const int workers = std::min<int>(detail::worker_count(cfg),
                                      static_cast<int>(jobs.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) run_job(i);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= jobs.size()) return;
                    run_job(i);
                }
            });
        for (std::thread& th : pool) th.join();
    }
    return table;
}

// --- CSV / JSONL -------------------------------------------------------------

inline constexpr const char* kSweepCsvHeader =
    "geometry,compact,n,chi,trial,seed,final_infidelity,iterations,wall_ms,"
    "largest_tensor,total_elems,diameter,converged_reason";

namespace detail {

/// 17 significant digits: round-trips any f64 and prints identically for
/// identical values.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

inline std::string to_csv(const SweepTable& table) {
    std::string out = kSweepCsvHeader;
    out += '\n';
    for (const SweepRow& r : table) {
        out += r.geometry;
        out += ',';
        out += r.compact ? "true" : "false";
        out += ',';
        out += std::to_string(r.n);
        out += ',';
        out += std::to_string(r.chi);
        out += ',';
        out += std::to_string(r.trial);
        out += ',';
        out += std::to_string(r.seed);
        out += ',';
        out += detail::fmt_double(r.final_infidelity);
        out += ',';
        out += std::to_string(r.iterations);
        out += ',';
        out += detail::fmt_double(r.wall_ms);
        out += ',';
        out += std::to_string(r.largest_tensor);
        out += ',';
        out += std::to_string(r.total_elems);
        out += ',';
        out += std::to_string(r.diameter);
        out += ',';
        out += r.converged_reason;
        out += '\n';
    }
    return out;
}

inline void write_csv(const std::filesystem::path& path, const SweepTable& table) {
    std::ofstream out(path, std::ios::binary); // LF line endings everywhere
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << to_csv(table);
}

inline std::string to_jsonl(const SweepTable& table) {
    std::string out;
    for (const SweepRow& r : table) {
        nlohmann::ordered_json j;
        j["geometry"] = r.geometry;
        j["compact"] = r.compact;
        j["n"] = r.n;
        j["chi"] = r.chi;
        j["trial"] = r.trial;
        j["seed"] = r.seed;
        j["final_infidelity"] = r.final_infidelity;
        j["iterations"] = r.iterations;
        j["wall_ms"] = r.wall_ms;
        j["largest_tensor"] = r.largest_tensor;
        j["total_elems"] = r.total_elems;
        j["diameter"] = r.diameter;
        j["converged_reason"] = r.converged_reason;
        out += j.dump();
        out += '\n';
    }
    return out;
}

inline void write_jsonl(const std::filesystem::path& path, const SweepTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << to_jsonl(table);
}

inline SweepTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kSweepCsvHeader)
        throw ConfigError(path.string() + " does not look like a sweep CSV");

    SweepTable table;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) f.push_back(field);
        if (f.size() != 13) throw ConfigError("malformed sweep CSV row: " + line);
        SweepRow r;
        r.geometry = f[0];
        r.compact = f[1] == "true";
        r.n = static_cast<std::uint32_t>(std::stoul(f[2]));
        r.chi = std::stoull(f[3]);
        r.trial = std::stoi(f[4]);
        r.seed = std::stoull(f[5]);
        r.final_infidelity = std::strtod(f[6].c_str(), nullptr);
        r.iterations = std::stoi(f[7]);
        r.wall_ms = std::strtod(f[8].c_str(), nullptr);
        r.largest_tensor = std::stoull(f[9]);
        r.total_elems = std::stoull(f[10]);
        r.diameter = std::stoi(f[11]);
        r.converged_reason = f[12];
        table.push_back(std::move(r));
    }
    return table;
}

// --- aggregation -------------------------------------------------------------

struct GroupSummary {
    std::string geometry;
    bool compact = false;
    std::size_t chi = 0;
    int trials = 0;
    double best_infidelity = 0.0;
    double median_infidelity = 0.0;
    double success_rate = 0.0;
    double mean_iterations = 0.0;
    double mean_wall_ms = 0.0;
};

/// Per (geometry, compact, chi) group, in first-appearance order: best and
/// lower-median infidelity (order statistics, as the orders of magnitude
/// skew an arithmetic mean), success rate against `threshold`, mean
/// iteration count and mean wall time. Failed trials count as infidelity
/// +inf. Groups that end up empty are skipped with a warning.
inline std::vector<GroupSummary> report(const SweepTable& table, double threshold) {
    if (table.empty()) throw ConfigError("report of an empty sweep table");

    struct Key {
        std::string geometry;
        bool compact;
        std::size_t chi;
        bool operator==(const Key& o) const {
            return geometry == o.geometry && compact == o.compact && chi == o.chi;
        }
    };
    std::vector<Key> order;
    std::vector<std::vector<const SweepRow*>> groups;
    for (const SweepRow& r : table) {
        const Key k{r.geometry, r.compact, r.chi};
        std::size_t gi = 0;
        for (; gi < order.size(); ++gi)
            if (order[gi] == k) break;
        if (gi == order.size()) {
            order.push_back(k);
            groups.emplace_back();
        }
        groups[gi].push_back(&r);
    }

    std::vector<GroupSummary> out;
    for (std::size_t gi = 0; gi < order.size(); ++gi) {
        const auto& rows = groups[gi];
        if (rows.empty()) {
            std::cerr << "warning: empty group " << order[gi].geometry << "\n";
            continue;
        }
        std::vector<double> inf;
        inf.reserve(rows.size());
        double iter_sum = 0.0, wall_sum = 0.0;
        int successes = 0;
        for (const SweepRow* r : rows) {
            const double v = std::isfinite(r->final_infidelity)
                                 ? r->final_infidelity
                                 : std::numeric_limits<double>::infinity();
            inf.push_back(v);
            if (v < threshold) ++successes;
            iter_sum += r->iterations;
            wall_sum += r->wall_ms;
        }
        std::sort(inf.begin(), inf.end());
        GroupSummary s;
        s.geometry = order[gi].geometry;
        s.compact = order[gi].compact;
        s.chi = order[gi].chi;
        s.trials = static_cast<int>(rows.size());
        s.best_infidelity = inf.front();
        s.median_infidelity = inf[(inf.size() - 1) / 2]; // lower median
        s.success_rate = static_cast<double>(successes) / static_cast<double>(rows.size());
        s.mean_iterations = iter_sum / static_cast<double>(rows.size());
        s.mean_wall_ms = wall_sum / static_cast<double>(rows.size());
        out.push_back(std::move(s));
    }
    return out;
}

inline std::string summary_to_csv(const std::vector<GroupSummary>& summaries) {
    std::string out =
        "geometry,compact,chi,trials,best_infidelity,median_infidelity,success_rate,"
        "mean_iterations,mean_wall_ms\n";
    for (const GroupSummary& s : summaries) {
        out += s.geometry;
        out += ',';
        out += s.compact ? "true" : "false";
        out += ',';
        out += std::to_string(s.chi);
        out += ',';
        out += std::to_string(s.trials);
        out += ',';
        out += detail::fmt_double(s.best_infidelity);
        out += ',';
        out += detail::fmt_double(s.median_infidelity);
        out += ',';
        out += detail::fmt_double(s.success_rate);
        out += ',';
        out += detail::fmt_double(s.mean_iterations);
        out += ',';
        out += detail::fmt_double(s.mean_wall_ms);
        out += '\n';
    }
    return out;
}

inline void print_report(std::ostream& os, const std::vector<GroupSummary>& summaries) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-10s %-8s %6s %7s %13s %13s %9s %10s %11s", "geometry",
                  "compact", "chi", "trials", "best_inf", "median_inf", "success", "mean_iter",
                  "mean_ms");
    os << buf << "\n";
    for (const GroupSummary& s : summaries) {
        std::snprintf(buf, sizeof buf, "%-10s %-8s %6zu %7d %13.4e %13.4e %9.2f %10.1f %11.1f",
                      s.geometry.c_str(), s.compact ? "true" : "false", s.chi, s.trials,
                      s.best_infidelity, s.median_infidelity, s.success_rate, s.mean_iterations,
                      s.mean_wall_ms);
        os << buf << "\n";
    }
}

} // namespace tngeo

#endif // TNGEO_HARNESS_HPP
