#ifndef JCJ_SERIAL_HPP_
#define JCJ_SERIAL_HPP_

#include "json.hpp"
#include "jcj/elgamal.hpp"
#include "jcj/fhe_oracle.hpp"
#include "jcj/mixnet.hpp"
#include "jcj/nizk.hpp"
#include "jcj/pet.hpp"

// JSON wire forms for everything that lands in board payloads. Big numbers
// are lowercase hex, byte strings base64, digests hex. nlohmann::json keeps
// keys sorted, so dumped payload bytes are deterministic.

namespace jcj::serial {

using nlohmann::json;

json ciphertext_to_json(const ElGamalCiphertext& ct);
ElGamalCiphertext ciphertext_from_json(const json& j);

json fhe_ciphertext_to_json(const FheCiphertext& ct);
FheCiphertext fhe_ciphertext_from_json(const json& j);

json linear_proof_to_json(const LinearProof& p);
LinearProof linear_proof_from_json(const json& j);

json or_proof_to_json(const OrProof& p);
OrProof or_proof_from_json(const json& j);

json pet_to_json(const PetTranscript& t);
PetTranscript pet_from_json(const json& j);

json oracle_record_to_json(const OracleRecord& r);
OracleRecord oracle_record_from_json(const json& j);

json group_to_json(const GroupParams& g);
GroupParams group_from_json(const json& j);

// Mix batches serialize without the simulation-only composed permutation.
json elgamal_mix_to_json(const ElGamalMixBatch& b);
ElGamalMixBatch elgamal_mix_from_json(const json& j);

json fhe_mix_to_json(const FheMixBatch& b);
FheMixBatch fhe_mix_from_json(const json& j);

inline Bytes payload_bytes(const json& j) { return to_bytes(j.dump()); }
json parse_payload(const Bytes& payload);

}  // namespace jcj::serial

#endif
