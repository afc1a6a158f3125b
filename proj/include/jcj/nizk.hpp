#ifndef JCJ_NIZK_HPP_
#define JCJ_NIZK_HPP_

#include <string>
#include <vector>

#include "jcj/elgamal.hpp"
#include "jcj/group.hpp"

namespace jcj {

// Every challenge is derived from the election identifier and a statement
// label (strong Fiat-Shamir: the full statement is hashed, not just the
// commitments).
struct ProofContext {
    Bytes election_id;
    std::string label;
};

// Knowledge of witnesses (e_1..e_k) such that for every equation j:
//   targets[j] = prod_i bases[j][i] ^ e_i  (mod p)
// This one relation covers all the sigma protocols used here: plaintext
// knowledge for ballots, exponent consistency inside PETs, decryption-share
// correctness, and the per-candidate branches of the membership proof.
struct LinearStatement {
    std::string label;                       // domain separation per proof type
    std::vector<std::vector<Bigint>> bases;  // one row per equation
    std::vector<Bigint> targets;             // one per equation
    size_t witness_count = 0;
};

struct LinearProof {
    std::vector<Bigint> commitments;  // one per equation
    Bigint challenge;
    std::vector<Bigint> responses;  // one per witness
};

// Disjunction: exactly one branch statement holds; challenges of all
// branches sum to the master challenge mod q.
struct OrProof {
    std::vector<LinearProof> branches;
};

LinearProof prove_linear(const GroupParams& params, const LinearStatement& st,
                         const std::vector<Bigint>& witnesses, const ProofContext& ctx,
                         Drbg& rng);
bool verify_linear(const GroupParams& params, const LinearStatement& st, const LinearProof& proof,
                   const ProofContext& ctx);

OrProof prove_or(const GroupParams& params, const std::vector<LinearStatement>& branches,
                 size_t true_branch, const std::vector<Bigint>& witnesses, const ProofContext& ctx,
                 Drbg& rng);
bool verify_or(const GroupParams& params, const std::vector<LinearStatement>& branches,
               const OrProof& proof, const ProofContext& ctx);

// --- statement builders ---

// Knowledge of the encryption randomness of a two-generator ciphertext
// (u = g1^a and v = g2^a), which pins the plaintext w * h^-a.
LinearStatement plaintext_knowledge_statement(const GroupParams& params,
                                              const ElGamalCiphertext& ct);

// power = base^z componentwise across all three components, same z.
LinearStatement exponent_consistency_statement(const ElGamalCiphertext& base,
                                               const ElGamalCiphertext& power);

// d = u^{x1} v^{x2} for the (x1, x2) committed in h_i = g1^{x1} g2^{x2}.
LinearStatement share_decryption_statement(const GroupParams& params, const Bigint& commitment,
                                           const ElGamalCiphertext& ct, const Bigint& share);

// ct encrypts the given plaintext with some randomness r.
LinearStatement encryption_of_statement(const GroupParams& params, const Bigint& h,
                                        const ElGamalCiphertext& ct, const Bigint& plaintext);

// Membership proof: ct encrypts one of the slate elements (OR over
// encryption_of_statement branches, proof size linear in the slate).
OrProof prove_membership(const GroupParams& params, const Bigint& h, const ElGamalCiphertext& ct,
                         const std::vector<Bigint>& slate, size_t choice, const Bigint& randomness,
                         const ProofContext& ctx, Drbg& rng);
bool verify_membership(const GroupParams& params, const Bigint& h, const ElGamalCiphertext& ct,
                       const std::vector<Bigint>& slate, const OrProof& proof,
                       const ProofContext& ctx);

// --- Schnorr signatures over the election group (used by board authorities) ---

struct SchnorrSignature {
    Bigint challenge;
    Bigint response;
};

struct SigningKey {
    Bigint secret;
    Bigint public_key;  // g1^secret
};

SigningKey signature_keygen(const GroupParams& params, Drbg& rng);
SchnorrSignature sign_message(const GroupParams& params, const SigningKey& key, const Bytes& msg);
bool verify_signature(const GroupParams& params, const Bigint& public_key,
                      const SchnorrSignature& sig, const Bytes& msg);

// serialization to canonical bytes (feeds board payloads)
void write_linear_proof(ByteWriter& w, const LinearProof& proof);

}  // namespace jcj

#endif
