// jcjvote: run JCJ-style elections end to end, audit transcripts, produce
// complexity benchmark data, and demonstrate the credential-probe attack.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "jcj/bench.hpp"
#include "jcj/serial.hpp"
#include "jcj/tally.hpp"

using namespace jcj;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

json result_report(const TallyResult& result, const std::vector<std::string>& candidates) {
    json tally = json::object();
    for (size_t i = 0; i < candidates.size(); i++) tally[candidates[i]] = result.tally[i];
    return json{{"tally", tally},
                {"proof_rejected", result.proof_rejected},
                {"duplicates_removed", result.duplicates_removed},
                {"invalid_credential_removed", result.invalid_credential_removed},
                {"eligibility_removed", result.eligibility_removed},
                {"spoiled", result.spoiled},
                {"counters",
                 {{"pet", result.counters.pet_count},
                  {"hash_eval", result.counters.hash_eval_count},
                  {"mix", result.counters.mix_count},
                  {"decrypt", result.counters.decrypt_count},
                  {"exponentiation", result.counters.exponentiation_count}}}};
}

int cmd_run(const std::string& config_path, const std::string& out_path,
            const std::string& report_path, uint64_t* seed_override,
            std::string* backend_override, bool canonical) {
    ElectionConfig config;
    try {
        config = load_config(config_path);
        if (seed_override) config.seed = *seed_override;
        if (backend_override) config.backend = backend_from_name(*backend_override);
        config.canonical_counts = canonical;
        config.validate();
    } catch (const ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return kExitUsage;
    }

    Scenario scenario = generate_scenario(config);
    TallyResult result = run_tally(scenario.election);
    save_entries(scenario.election.board().entries(), out_path);

    json report = result_report(result, config.candidates);
    json expected = json::object();
    for (size_t i = 0; i < config.candidates.size(); i++) {
        expected[config.candidates[i]] = scenario.truth.tally[i];
    }
    report["expected_tally"] = expected;
    report["transcript"] = out_path;
    std::ofstream rf(report_path);
    rf << report.dump(2) << "\n";

    std::cout << "backend: " << backend_name(config.backend) << "\n";
    for (size_t i = 0; i < config.candidates.size(); i++) {
        std::cout << config.candidates[i] << ": " << result.tally[i] << "\n";
    }
    std::cout << "ballots rejected (proofs): " << result.proof_rejected
              << ", duplicates removed: " << result.duplicates_removed
              << ", invalid credentials: " << result.invalid_credential_removed << "\n";
    std::cout << "transcript: " << out_path << "\nreport: " << report_path << "\n";

    bool matches = result.tally == scenario.truth.tally;
    if (!matches) {
        std::cerr << "tally does not match the plaintext bookkeeping oracle\n";
        return kExitFailure;
    }
    return kExitOk;
}

int cmd_scenario_gen(const std::string& config_path, const std::string& out_path,
                     const std::string& truth_path) {
    ElectionConfig config;
    try {
        config = load_config(config_path);
    } catch (const ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return kExitUsage;
    }
    Scenario scenario = generate_scenario(config);
    save_entries(scenario.election.board().entries(), out_path);
    json truth{{"tally", scenario.truth.tally},
               {"ballots_posted", scenario.truth.ballots_posted},
               {"expected_duplicates_removed", scenario.truth.expected_duplicates_removed},
               {"expected_invalid_removed", scenario.truth.expected_invalid_removed},
               {"expected_stuffed_removed", scenario.truth.expected_stuffed_removed},
               {"fake_ballots", scenario.truth.fake_ballot_indices},
               {"real_ballots", scenario.truth.real_ballot_indices}};
    std::ofstream tf(truth_path);
    tf << truth.dump(2) << "\n";
    std::cout << "scenario board: " << out_path << " (" << scenario.truth.ballots_posted
              << " ballots)\nground truth: " << truth_path << "\n";
    return kExitOk;
}

int cmd_audit(const std::string& transcript_path) {
    std::vector<BoardEntry> entries;
    try {
        entries = load_entries(transcript_path);
    } catch (const std::exception& ex) {
        std::cerr << "cannot load transcript: " << ex.what() << "\n";
        return kExitUsage;
    }
    AuditReport report = audit_transcript(entries);
    if (report.ok) {
        std::cout << "audit: PASS (" << entries.size() << " entries, recomputed tally";
        for (uint64_t x : report.recomputed_tally) std::cout << " " << x;
        std::cout << ")\n";
        return kExitOk;
    }
    std::cout << "audit: FAIL\n";
    for (const std::string& f : report.failures) std::cout << "  - " << f << "\n";
    return kExitFailure;
}

int cmd_bench(const std::string& sizes_csv, const std::string& backends_csv, unsigned reps,
              uint64_t seed, unsigned group_bits, double budget, const std::string& out_path,
              bool canonical) {
    BenchOptions options;
    options.repetitions = reps;
    options.seed = seed;
    options.group_bits = group_bits;
    options.budget_seconds = budget;
    options.canonical = canonical;
    try {
        options.sizes.clear();
        for (std::string item; std::getline(std::istringstream(sizes_csv), item);) break;
        std::istringstream ss(sizes_csv);
        for (std::string item; std::getline(ss, item, ',');) {
            options.sizes.push_back(static_cast<unsigned>(std::stoul(item)));
        }
        options.backends.clear();
        std::istringstream bs(backends_csv);
        for (std::string item; std::getline(bs, item, ',');) {
            options.backends.push_back(backend_from_name(item));
        }
    } catch (const std::exception& ex) {
        std::cerr << "bench options: " << ex.what() << "\n";
        return kExitUsage;
    }

    BenchOutcome outcome = run_bench(options);
    std::string csv = bench_csv(outcome.rows);
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        std::ofstream out(out_path);
        out << csv;
        std::cout << "wrote " << outcome.rows.size() << " rows to " << out_path << "\n";
    }
    std::cout << "group bits used: " << outcome.group_bits_used << " (sweep "
              << outcome.total_wall_seconds << " s)\n";
    for (const auto& [backend, slope] : outcome.slopes) {
        const char* column = backend == "linear" ? "hash_eval_count" : "pet_count";
        std::cout << "log-log slope, " << backend << " " << column << ": " << slope << "\n";
    }
    return kExitOk;
}

int cmd_attack_demo(uint64_t seed) {
    json verdicts;
    auto verdict_name = [](ProbeVerdict v) {
        switch (v) {
            case ProbeVerdict::registered: return "registered";
            case ProbeVerdict::unregistered: return "unregistered";
            case ProbeVerdict::inconclusive: return "inconclusive";
            case ProbeVerdict::not_applicable: return "not-applicable";
        }
        return "?";
    };

    auto demo_config = [&](Backend backend, uint64_t s) {
        ElectionConfig config;
        config.election_id = to_bytes("attack-demo");
        config.candidates = {"alpha", "beta"};
        config.threshold = 2;
        config.tallier_count = 3;
        config.backend = backend;
        config.seed = s;
        config.group_bits = 64;
        config.mix_servers = 1;
        config.shadow_rounds = 8;
        config.scenario.honest = 5;
        return config;
    };

    std::cout << "Smith/Weber weeding publishes every credential raised to one shared secret\n"
                 "exponent Z. A coercer who was handed a credential sigma casts ballots for\n"
                 "sigma and sigma^w: the blinded table then contains the pair (b, b^w), which\n"
                 "identifies the coercer's entries, and b appears in the blinded roll exactly\n"
                 "when sigma is registered.\n\n";

    for (bool real : {true, false}) {
        Scenario s = generate_scenario(demo_config(Backend::smith_weber, seed + (real ? 0 : 1)));
        Election& e = s.election;
        std::vector<VoterSecret> extra = e.register_voters(1);
        Drbg fake = Drbg::from_seed(seed).child(real ? "real" : "fake");
        Bigint sigma = real ? extra[0].sigma_classical : random_element(e.params(), fake);
        if (real) e.cast_vote(extra[0], 0);
        ProbeHandle probe = probe_cast(e, sigma);
        run_tally(e);
        ProbeVerdict v = probe_evaluate(e, probe);
        verdicts["smith_weber"][real ? "real" : "fake"] = verdict_name(v);
        std::cout << "smith_weber, " << (real ? "real" : "fake") << " credential probe -> "
                  << verdict_name(v) << "\n";
    }

    std::cout << "\nThe linear backend publishes keyed digests under fresh keys per stage; no\n"
                 "multiplicative relation survives the keyed hash, so the same probe strategy\n"
                 "finds no (b, b^w) pair.\n\n";

    for (bool real : {true, false}) {
        Scenario s = generate_scenario(demo_config(Backend::linear, seed + (real ? 2 : 3)));
        Election& e = s.election;
        std::vector<VoterSecret> extra = e.register_voters(1);
        Drbg fake = Drbg::from_seed(seed).child(real ? "real-l" : "fake-l");
        Bytes sigma = real ? extra[0].sigma_fhe : fake.bytes(kFheCredentialBytes);
        if (real) e.cast_vote(extra[0], 0);
        ProbeHandle probe = probe_cast_linear(e, sigma);
        run_tally(e);
        ProbeVerdict v = probe_evaluate(e, probe);
        verdicts["linear"][real ? "real" : "fake"] = verdict_name(v);
        std::cout << "linear, " << (real ? "real" : "fake") << " credential probe -> "
                  << verdict_name(v) << "\n";
    }

    std::cout << "\nThe quadratic backend publishes no blinded values at all; the probe has\n"
                 "nothing to scan.\n\n";
    verdicts["quadratic"] = verdict_name(ProbeVerdict::not_applicable);
    std::cout << "quadratic -> " << verdict_name(ProbeVerdict::not_applicable) << "\n";

    std::cout << "\n" << verdicts.dump() << "\n";

    bool expected = verdicts["smith_weber"]["real"] == "registered" &&
                    verdicts["smith_weber"]["fake"] == "unregistered" &&
                    verdicts["linear"]["real"] == "inconclusive" &&
                    verdicts["linear"]["fake"] == "inconclusive";
    return expected ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"JCJ coercion-resistant voting: quadratic PET weeding, linear-time weeding via "
                 "homomorphic keyed hashing, and the Smith/Weber variant with its probe attack"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path = "transcript.jsonl";
    std::string report_path;
    uint64_t seed = 0;
    bool seed_set = false;
    std::string backend;
    bool canonical = true;

    CLI::App* run = app.add_subcommand("run", "run one election end to end");
    run->add_option("--config", config_path, "election config JSON")->required();
    run->add_option("--out", out_path, "transcript output path");
    run->add_option("--report", report_path, "tally report JSON path");
    run->add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
        seed_set = true;
    });
    run->add_option("--backend", backend, "override the config backend");
    run->add_flag("--canonical-counts,!--no-canonical-counts", canonical,
                  "canonical operation counting (no early exit)")
        ->default_val(true);

    std::string sizes_csv = "50,100,200,400";
    std::string backends_csv = "quadratic,linear";
    unsigned reps = 1;
    uint64_t bench_seed = 1;
    unsigned group_bits = 2048;
    double budget = 600.0;
    std::string csv_out;
    CLI::App* bench = app.add_subcommand("bench", "complexity sweep, CSV + fitted slopes");
    bench->add_option("--sizes", sizes_csv, "comma-separated ballot counts");
    bench->add_option("--backends", backends_csv, "comma-separated backends");
    bench->add_option("--reps", reps, "repetitions per cell");
    bench->add_option("--seed", bench_seed, "base seed");
    bench->add_option("--group-bits", group_bits, "requested group size");
    bench->add_option("--budget-seconds", budget, "wall budget for the quadratic sweep");
    bench->add_option("--out", csv_out, "CSV output path (stdout when omitted)");
    bench->add_flag("--canonical-counts,!--no-canonical-counts", canonical,
                    "canonical operation counting")
        ->default_val(true);

    std::string transcript_path;
    CLI::App* audit = app.add_subcommand("audit", "verify a transcript end to end");
    audit->add_option("transcript", transcript_path, "transcript JSONL path")->required();

    uint64_t demo_seed = 7;
    CLI::App* attack = app.add_subcommand("attack-demo", "credential probe against each backend");
    attack->add_option("--seed", demo_seed, "demo seed");

    std::string truth_path = "ground_truth.json";
    CLI::App* gen = app.add_subcommand("scenario-gen", "generate a scenario board without tallying");
    gen->add_option("--config", config_path, "election config JSON")->required();
    gen->add_option("--out", out_path, "board output path");
    gen->add_option("--truth", truth_path, "ground truth JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*run) {
            if (report_path.empty()) report_path = out_path + ".report.json";
            return cmd_run(config_path, out_path, report_path, seed_set ? &seed : nullptr,
                           backend.empty() ? nullptr : &backend, canonical);
        }
        if (*bench) {
            return cmd_bench(sizes_csv, backends_csv, reps, bench_seed, group_bits, budget,
                             csv_out, canonical);
        }
        if (*audit) return cmd_audit(transcript_path);
        if (*attack) return cmd_attack_demo(demo_seed);
        if (*gen) return cmd_scenario_gen(config_path, out_path, truth_path);
    } catch (const ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}
