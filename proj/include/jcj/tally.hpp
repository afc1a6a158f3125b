#ifndef JCJ_TALLY_HPP_
#define JCJ_TALLY_HPP_

#include "jcj/protocol.hpp"

namespace jcj {

// Exact operation accounting. In canonical mode (no early exit) the counts
// are a deterministic function of (scenario, backend):
//   pet_count(quadratic)        = n'(n'-1)/2 + n'' * |L|
//   hash_eval_count(linear)     = n' + n'' + |L|
// with n' the proof-valid ballots and n'' the post-dedup ballots.
struct OpCounters {
    uint64_t pet_count = 0;
    uint64_t hash_eval_count = 0;
    uint64_t mix_count = 0;      // server passes over a list batch
    uint64_t decrypt_count = 0;  // threshold decryptions (classical or oracle)
    uint64_t exponentiation_count = 0;
};

struct TallyResult {
    std::vector<uint64_t> tally;  // per candidate
    uint64_t proof_rejected = 0;
    uint64_t duplicates_removed = 0;
    uint64_t invalid_credential_removed = 0;
    uint64_t eligibility_removed = 0;
    uint64_t spoiled = 0;  // decrypted vote not on the slate (FHE path)
    OpCounters counters;
    // Simulation bookkeeping, never posted: original board indices of the
    // ballots whose votes were counted (tracked through the mixes). Used by
    // the coercion-mechanics checks.
    std::vector<uint64_t> counted_ballot_indices;
};

// Stage-by-stage weeding evidence. Up to the mix the indices are board
// indices; after the mix they are positions in the mixed lists.
struct WeedingStage {
    std::string name;
    std::vector<uint64_t> surviving;
};

struct WeedingReport {
    std::vector<WeedingStage> stages;
};

class TallyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The three backends. Evidence for every step is posted to the board unless
// post_evidence is false (benchmark harness; counters are unaffected).
TallyResult tally_quadratic(Election& election, bool post_evidence = true);
TallyResult tally_linear(Election& election, bool post_evidence = true);
TallyResult tally_smith_weber(Election& election, bool post_evidence = true);
TallyResult run_tally(Election& election, bool post_evidence = true);

// Preimage-bound eligibility weeding: checks every attestation-valid ballot's
// encrypted preimage against its encrypted credential; ballots without a
// valid preimage are flagged as possible stuffing. Linear backend only.
struct EligibilityOutcome {
    std::vector<uint64_t> retained;  // board indices
    std::vector<uint64_t> flagged;
};

EligibilityOutcome eligibility_weed(Election& election, bool post_evidence = true);

// Transcript auditor: re-verifies the chain, every proof, PET, mix batch and
// attestation, recomputes the weeding and the tally from published evidence
// only, and compares against the posted result.
struct AuditReport {
    bool ok = false;
    std::vector<std::string> failures;
    std::vector<uint64_t> recomputed_tally;
};

AuditReport audit_transcript(const std::vector<BoardEntry>& entries);

// Smith/Weber credential probe: the coercer casts ballots with sigma and
// sigma^w, then looks for the pair (b, b^w) among the published blinded
// values and reads off whether b matched a roll entry.
struct ProbeHandle {
    Bigint sigma;      // classical candidate credential
    Bytes sigma_fhe;   // linear-backend candidate credential
    Bigint w;          // known probe exponent
    uint64_t ballot_a = 0;
    uint64_t ballot_b = 0;
};

enum class ProbeVerdict { registered, unregistered, inconclusive, not_applicable };

// Casts the probe pair during the voting phase.
ProbeHandle probe_cast(Election& election, const Bigint& sigma_candidate);
ProbeHandle probe_cast_linear(Election& election, const Bytes& sigma_candidate);

// Scans the published tally evidence after run_tally.
ProbeVerdict probe_evaluate(const Election& election, const ProbeHandle& probe);

}  // namespace jcj

#endif
