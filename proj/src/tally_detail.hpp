#ifndef JCJ_TALLY_DETAIL_HPP_
#define JCJ_TALLY_DETAIL_HPP_

// Internals shared between the tally backends and the transcript auditor.
// Not part of the public surface.

#include <functional>

#include "jcj/serial.hpp"
#include "jcj/tally.hpp"

namespace jcj::detail {

using nlohmann::json;

struct ClassicalBallot {
    uint64_t index = 0;
    ElGamalCiphertext e1;
    ElGamalCiphertext e2;
};

struct FheBallot {
    uint64_t index = 0;
    FheCiphertext e1;
    FheCiphertext e2;
    bool has_preimage = false;
    FheCiphertext preimage;
};

// Parses and fully verifies one ballot payload; false means the ballot is
// discarded at step 1.
bool verify_classical_ballot_payload(const GroupParams& params, const Bigint& h,
                                     const std::vector<Bigint>& slate, const ProofContext& ctx,
                                     const json& payload, uint64_t index, ClassicalBallot* out);
bool verify_fhe_ballot_payload(const GroupParams& params, const Bigint& oracle_key,
                               const Bytes& election_id, const json& payload, uint64_t index,
                               FheBallot* out);

struct ShareEvidence {
    unsigned tallier = 0;
    Bigint share;
    LinearProof proof;
};

struct DecryptionEvidence {
    ElGamalCiphertext ct;
    std::vector<ShareEvidence> shares;
    Bigint plaintext;
};

DecryptionEvidence decrypt_with_evidence(const GroupParams& params, const ThresholdShares& shares,
                                         const ElGamalCiphertext& ct, const ProofContext& ctx,
                                         Drbg& rng);
bool verify_decryption_evidence(const GroupParams& params, const std::vector<Bigint>& commitments,
                                unsigned threshold, const DecryptionEvidence& ev,
                                const ProofContext& ctx);
json decryption_evidence_to_json(const DecryptionEvidence& ev);
DecryptionEvidence decryption_evidence_from_json(const json& j);

json counters_to_json(const OpCounters& c);
OpCounters counters_from_json(const json& j);
json report_to_json(const WeedingReport& report);
WeedingReport report_from_json(const json& j);
json result_to_json(const TallyResult& res, Backend backend, bool canonical);

// Duplicate resolution: each equality group keeps its first or last member
// (positions are posting order).
std::vector<size_t> dedup_select(size_t n, const std::function<size_t(size_t)>& group_of,
                                 DuplicatePolicy policy);

size_t candidate_of(const std::vector<Bigint>& slate, const Bigint& plaintext);
size_t candidate_of_bytes(const std::vector<Bytes>& slate, const Bytes& plaintext);

}  // namespace jcj::detail

#endif
