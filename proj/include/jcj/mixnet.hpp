#ifndef JCJ_MIXNET_HPP_
#define JCJ_MIXNET_HPP_

#include <vector>

#include "jcj/elgamal.hpp"
#include "jcj/fhe_oracle.hpp"

namespace jcj {

// Verifiable re-encryption mix for one or two parallel ciphertext lists
// (vote/credential pairs mix in lockstep under one secret permutation per
// server). Verification is by cut-and-choose shadow mixes: each server
// publishes `shadow_rounds` independent shadow mixes and a Fiat-Shamir bit
// per round opens each one either toward the input or toward the output, so
// a plaintext-set change survives with probability 2^-rounds.
//
// Convention throughout: dest[l][i] = reencrypt(src[l][perm[i]], rand[l][i]).

using CipherLists = std::vector<std::vector<ElGamalCiphertext>>;
using FheLists = std::vector<std::vector<FheCiphertext>>;

// Test hook: forces the primary permutation to identity and (for ElGamal)
// the primary re-encryption randomness to zero. Shadows stay random, so the
// batch still verifies.
struct MixHook {
    bool identity_permutation = false;
    bool zero_randomness = false;
};

struct ElGamalShadow {
    CipherLists lists;
    int opened_side = -1;  // 0: input->shadow, 1: shadow->output
    std::vector<uint32_t> perm;
    std::vector<std::vector<Bigint>> randomness;  // [list][item]
};

struct ElGamalServerMix {
    CipherLists output;
    std::vector<ElGamalShadow> shadows;
};

struct ElGamalMixBatch {
    CipherLists input;
    std::vector<ElGamalServerMix> servers;
    unsigned shadow_rounds = 0;
    // simulation bookkeeping only (never serialized): output[i] = input[composed[i]]
    std::vector<uint32_t> composed_permutation;
};

ElGamalMixBatch mix_elgamal(const GroupParams& params, const Bigint& h, CipherLists input,
                            unsigned servers, unsigned shadow_rounds, Drbg& rng,
                            const MixHook* hook = nullptr);
bool verify_elgamal_mix(const GroupParams& params, const Bigint& h, const ElGamalMixBatch& batch);

struct FheShadow {
    FheLists lists;
    int opened_side = -1;
    std::vector<uint32_t> perm;
    // plaintext-equality attestations for the opened links, [list][item]
    std::vector<std::vector<OracleRecord>> links;
};

struct FheServerMix {
    FheLists output;
    std::vector<FheShadow> shadows;
};

struct FheMixBatch {
    FheLists input;
    std::vector<FheServerMix> servers;
    unsigned shadow_rounds = 0;
    std::vector<uint32_t> composed_permutation;  // simulation bookkeeping only
};

FheMixBatch mix_fhe(FheOracle& oracle, FheLists input, unsigned servers, unsigned shadow_rounds,
                    const std::vector<unsigned>& approvals, Drbg& rng);
bool verify_fhe_mix(const GroupParams& params, const Bigint& oracle_key, const FheMixBatch& batch);

}  // namespace jcj

#endif
