#ifndef JCJ_PET_HPP_
#define JCJ_PET_HPP_

#include <vector>

#include "jcj/elgamal.hpp"
#include "jcj/nizk.hpp"

namespace jcj {

// Distributed plaintext equivalence test. The talliers blind the quotient
// ciphertext ct_a / ct_b with secret exponents and threshold-decrypt the
// result: the plaintext is the identity iff the two inputs encrypt the same
// message, and a uniform non-identity element otherwise.
struct PetBlind {
    unsigned tallier = 0;        // 1-based share index
    ElGamalCiphertext blinded;   // quotient ^ z_i
    LinearProof proof;           // exponent consistency across all three components
};

struct PetShare {
    unsigned tallier = 0;
    Bigint share;       // decryption share on the combined blinded quotient
    LinearProof proof;  // consistency with the published share commitment
};

struct PetTranscript {
    ElGamalCiphertext input_a;
    ElGamalCiphertext input_b;
    ElGamalCiphertext quotient;  // input_a / input_b, componentwise
    std::vector<PetBlind> blinds;
    ElGamalCiphertext blinded;  // product of all contributions
    std::vector<PetShare> shares;
    Bigint plaintext;  // decrypted blinded quotient
    bool verdict = false;
};

// Runs the full PET among all talliers. The combined blinding exponent is
// kept nonzero so the identity-plaintext verdict is exact even in tiny test
// groups (the simulation holds all tallier secrets, so this check is free).
PetTranscript run_pet(const GroupParams& params, const ThresholdShares& shares,
                      const ElGamalCiphertext& ct_a, const ElGamalCiphertext& ct_b,
                      const ProofContext& ctx, Drbg& rng);

// Public verification: recomputes the quotient, checks every blinding proof,
// the product, every decryption-share proof against the commitments, the
// threshold combination, and the verdict. No secret inputs.
bool verify_pet(const GroupParams& params, const std::vector<Bigint>& share_commitments,
                unsigned threshold, const PetTranscript& t, const ProofContext& ctx);

void write_pet_transcript(ByteWriter& w, const PetTranscript& t);

}  // namespace jcj

#endif
