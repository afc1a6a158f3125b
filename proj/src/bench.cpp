#include "jcj/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace jcj {

namespace {

ElectionConfig bench_config(Backend backend, unsigned n, unsigned group_bits, uint64_t seed,
                            bool canonical) {
    ElectionConfig config;
    config.election_id = to_bytes("bench");
    config.candidates = {"alpha", "beta"};
    config.threshold = 1;
    config.tallier_count = 1;
    config.backend = backend;
    config.seed = seed;
    config.group_bits = group_bits;
    config.mix_servers = 1;
    config.shadow_rounds = 4;  // evidence is not posted during benchmarks
    config.canonical_counts = canonical;
    config.scenario.honest = n;
    return config;
}

double run_cell(Backend backend, unsigned n, unsigned group_bits, uint64_t seed, bool canonical,
                TallyResult* result) {
    Scenario scenario = generate_scenario(bench_config(backend, n, group_bits, seed, canonical));
    auto t0 = std::chrono::steady_clock::now();
    *result = run_tally(scenario.election, /*post_evidence=*/false);
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

uint64_t quadratic_pets(const std::vector<unsigned>& sizes) {
    uint64_t total = 0;
    for (unsigned n : sizes) {
        total += static_cast<uint64_t>(n) * (n - 1) / 2 + static_cast<uint64_t>(n) * n;
    }
    return total;
}

}  // namespace

double fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw std::invalid_argument("slope fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : points) {
        if (x <= 0 || y <= 0) throw std::invalid_argument("slope fit needs positive values");
        double lx = std::log(x);
        double ly = std::log(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double m = static_cast<double>(points.size());
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

BenchOutcome run_bench(const BenchOptions& options) {
    if (options.sizes.empty()) throw std::invalid_argument("bench: no sizes given");
    for (size_t i = 1; i < options.sizes.size(); i++) {
        if (options.sizes[i] < options.sizes[i - 1]) {
            throw std::invalid_argument("bench: sizes must be ascending");
        }
    }

    BenchOutcome out;
    out.group_bits_used = options.group_bits;

    // Calibrate the per-PET cost and step the group down while the projected
    // quadratic sweep would blow the budget.
    bool has_quadratic = false;
    for (Backend b : options.backends) has_quadratic |= (b == Backend::quadratic);
    if (has_quadratic && options.auto_downgrade) {
        const unsigned ladder[] = {2048, 1024, 512, 256, 128, 64};
        uint64_t total_pets = quadratic_pets(options.sizes);
        for (unsigned bits : ladder) {
            if (bits > options.group_bits) continue;
            out.group_bits_used = bits;
            TallyResult probe;
            double ms = run_cell(Backend::quadratic, 4, bits, options.seed, options.canonical,
                                 &probe);
            double per_pet_ms = ms / static_cast<double>(probe.counters.pet_count);
            double projected = per_pet_ms * static_cast<double>(total_pets) * 1.3 / 1000.0;
            if (projected <= options.budget_seconds * 0.85) break;
        }
    }

    auto sweep_start = std::chrono::steady_clock::now();
    std::map<std::string, std::vector<std::pair<double, double>>> slope_points;
    for (Backend backend : options.backends) {
        for (unsigned rep = 0; rep < options.repetitions; rep++) {
            for (unsigned n : options.sizes) {
                uint64_t seed = options.seed + rep;
                TallyResult result;
                double ms = run_cell(backend, n, out.group_bits_used, seed, options.canonical,
                                     &result);
                BenchRow row;
                row.backend = backend_name(backend);
                row.n = n;
                row.roll = n;
                row.pet_count = result.counters.pet_count;
                row.hash_eval_count = result.counters.hash_eval_count;
                row.wall_time_ms = ms;
                row.seed = seed;
                out.rows.push_back(row);
                if (rep == 0 && n > 0) {
                    double count = backend == Backend::linear
                                       ? static_cast<double>(result.counters.hash_eval_count)
                                       : static_cast<double>(result.counters.pet_count);
                    if (count > 0) {
                        slope_points[backend_name(backend)].emplace_back(static_cast<double>(n),
                                                                         count);
                    }
                }
            }
        }
    }
    out.total_wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - sweep_start).count();

    for (const auto& [backend, points] : slope_points) {
        if (points.size() >= 2) out.slopes[backend] = fit_loglog_slope(points);
    }
    return out;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::string out = "backend,n,roll,pet_count,hash_eval_count,wall_time_ms,seed\n";
    char buf[256];
    for (const BenchRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%u,%u,%llu,%llu,%.3f,%llu\n", r.backend.c_str(), r.n,
                      r.roll, static_cast<unsigned long long>(r.pet_count),
                      static_cast<unsigned long long>(r.hash_eval_count), r.wall_time_ms,
                      static_cast<unsigned long long>(r.seed));
        out += buf;
    }
    return out;
}

}  // namespace jcj
