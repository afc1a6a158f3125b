#ifndef JCJ_FHE_ORACLE_HPP_
#define JCJ_FHE_ORACLE_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "jcj/group.hpp"
#include "jcj/nizk.hpp"

namespace jcj {

// Ideal-functionality stand-in for a threshold FHE scheme. Ciphertexts are
// authenticated encryptions under an oracle-internal key, so their bytes
// reveal nothing and plaintext equality is not decidable from the outside.
// Homomorphic evaluations happen on the oracle's plaintext shadow and every
// decryption or evaluation is logged with a signed attestation that stands
// in for a ZK proof of correct decryption. The public surface of this class
// is the substitution boundary for a real FHE backend.

enum class FheTag : uint8_t { credential = 1, vote = 2, hash_digest = 3, preimage = 4, key = 5,
                              boolean = 6 };

std::string fhe_tag_name(FheTag tag);

struct FheCiphertext {
    Bytes blob;  // nonce || AEAD ciphertext || tag
    FheTag tag = FheTag::credential;
    uint64_t rerand_count = 0;

    bool operator==(const FheCiphertext&) const = default;
};

Digest fhe_ct_digest(const FheCiphertext& ct);

struct HashKey {
    uint32_t id = 0;
    FheCiphertext encrypted_key;  // E(k), published; key material never leaves the oracle
};

// One row of the oracle transcript. `result` carries the public output of
// the operation (decrypted plaintext, equality verdict); the attestation is
// a Schnorr signature by the oracle over the canonical row encoding.
struct OracleRecord {
    uint64_t sequence = 0;
    std::string op;  // keygen | encrypt | rerandomize | eval-hash | decrypt | refusal | peq | preimage-eq
    std::vector<Digest> inputs;
    std::vector<Digest> outputs;
    Bytes result;
    std::vector<unsigned> approvals;
    SchnorrSignature attestation;
};

Bytes oracle_record_message(const OracleRecord& rec);
bool verify_oracle_record(const GroupParams& params, const Bigint& oracle_key,
                          const OracleRecord& rec);

class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OracleRefusal : public OracleError {
public:
    using OracleError::OracleError;
};

// The public credential-derivation hash used by the eligibility mode:
// sigma = credential_hash(x). 16-byte output, matching credential width.
Bytes credential_hash(const Bytes& preimage);
constexpr size_t kFheCredentialBytes = 16;
constexpr size_t kKeyedHashBytes = 16;  // 128-bit keyed digests

class FheOracle {
public:
    // Attestations are signed over `sig_group`; t-of-n approvals gate every
    // decryption. All oracle-internal randomness comes from `rng`.
    FheOracle(GroupParams sig_group, unsigned threshold, unsigned count, Drbg rng);

    const Bigint& attestation_key() const { return attest_key_.public_key; }
    unsigned threshold() const { return threshold_; }
    unsigned count() const { return count_; }

    FheCiphertext encrypt(const Bytes& plaintext, FheTag tag);
    FheCiphertext rerandomize(const FheCiphertext& ct);

    // Jointly sampled keyed-hash key; E(k) is published with the id.
    HashKey new_hash_key();

    struct Evaluation {
        FheCiphertext ct;
        OracleRecord record;
    };

    // E(h_k(sigma)) for an encrypted credential; deterministic per (k, sigma).
    Evaluation eval_keyed_hash(const FheCiphertext& credential, uint32_t key_id);

    // E(1) iff credential_hash(preimage plaintext) equals the credential.
    Evaluation eval_hash_preimage_eq(const FheCiphertext& preimage,
                                     const FheCiphertext& credential);

    struct Decryption {
        Bytes plaintext;
        OracleRecord record;
    };
    // Requires >= threshold distinct approvals; refusals are logged and throw.
    Decryption threshold_decrypt(const FheCiphertext& ct, const std::vector<unsigned>& approvals);

    // Signed statement that two ciphertexts hold the same plaintext (used by
    // the mix verifier on opened shadow links).
    OracleRecord attest_equal_plaintext(const FheCiphertext& a, const FheCiphertext& b,
                                        const std::vector<unsigned>& approvals);

    // Plaintext-knowledge attestation for a ballot pair, bound to the
    // election id. Stands in for the ballot NIZKs of the classical path.
    OracleRecord attest_ballot(const FheCiphertext& vote, const FheCiphertext& credential,
                               const Bytes& election_id);

    const std::vector<OracleRecord>& transcript() const { return transcript_; }
    uint64_t hash_eval_count() const { return hash_evals_; }
    uint64_t decrypt_count() const { return decrypts_; }

    // Test-only plaintext shadow access used by the functional-correctness
    // property checks; never consulted by protocol code.
    Bytes shadow_decrypt_for_test(const FheCiphertext& ct) const { return open(ct); }

private:
    Bytes open(const FheCiphertext& ct) const;  // AEAD decrypt, throws on forgery
    FheCiphertext seal(const Bytes& plaintext, FheTag tag, uint64_t rerand_count);
    OracleRecord& log(OracleRecord rec);
    void require_approvals(const std::vector<unsigned>& approvals, const char* op,
                           const std::vector<Digest>& inputs);

    GroupParams sig_group_;
    unsigned threshold_;
    unsigned count_;
    Drbg rng_;
    Bytes aead_key_;
    SigningKey attest_key_;
    std::map<uint32_t, Bytes> hash_keys_;
    uint32_t next_key_id_ = 1;
    uint64_t nonce_counter_ = 0;
    uint64_t sequence_ = 0;
    uint64_t hash_evals_ = 0;
    uint64_t decrypts_ = 0;
    std::vector<OracleRecord> transcript_;
};

}  // namespace jcj

#endif
