#ifndef JCJ_BENCH_HPP_
#define JCJ_BENCH_HPP_

#include "jcj/tally.hpp"

namespace jcj {

struct BenchRow {
    std::string backend;
    unsigned n = 0;     // ballots
    unsigned roll = 0;  // |L|
    uint64_t pet_count = 0;
    uint64_t hash_eval_count = 0;
    double wall_time_ms = 0.0;
    uint64_t seed = 0;
};

struct BenchOptions {
    std::vector<unsigned> sizes;  // ascending ballot counts, |L| = n
    std::vector<Backend> backends{Backend::quadratic, Backend::linear};
    unsigned repetitions = 1;
    uint64_t seed = 1;
    unsigned group_bits = 2048;
    bool canonical = true;
    // The quadratic sweep is projected from a calibration run; if it would
    // exceed the budget the group steps down (counts are group-size
    // independent).
    double budget_seconds = 600.0;
    bool auto_downgrade = true;
};

struct BenchOutcome {
    std::vector<BenchRow> rows;
    // fitted log-log slope of the backend's characteristic count column
    // (pet_count for quadratic, hash_eval_count for linear)
    std::map<std::string, double> slopes;
    unsigned group_bits_used = 0;
    double total_wall_seconds = 0.0;
};

BenchOutcome run_bench(const BenchOptions& options);

// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

// header: backend,n,roll,pet_count,hash_eval_count,wall_time_ms,seed
std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace jcj

#endif
