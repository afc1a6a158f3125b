#include "jcj/pet.hpp"

#include <stdexcept>

namespace jcj {

PetTranscript run_pet(const GroupParams& params, const ThresholdShares& shares,
                      const ElGamalCiphertext& ct_a, const ElGamalCiphertext& ct_b,
                      const ProofContext& ctx, Drbg& rng) {
    PetTranscript t;
    t.input_a = ct_a;
    t.input_b = ct_b;
    t.quotient = ct_div(params, ct_a, ct_b);

    // Draw tallier exponents; resample until the combined exponent is
    // nonzero mod q, otherwise the blinded quotient would collapse to the
    // identity and fake an equality verdict.
    std::vector<Bigint> exponents;
    Bigint sum = 0;
    for (unsigned i = 0; i < shares.count; i++) {
        exponents.push_back(rng.nonzero_below(params.q));
        sum = (sum + exponents.back()) % params.q;
    }
    while (sum == 0) {
        sum = (sum - exponents.back()) % params.q;
        if (sum < 0) sum += params.q;
        exponents.back() = rng.nonzero_below(params.q);
        sum = (sum + exponents.back()) % params.q;
    }

    t.blinded = {1, 1, 1};
    for (unsigned i = 0; i < shares.count; i++) {
        PetBlind blind;
        blind.tallier = shares.shares[i].index;
        blind.blinded = ct_pow(params, t.quotient, exponents[i]);
        blind.proof = prove_linear(params, exponent_consistency_statement(t.quotient, blind.blinded),
                                   {exponents[i]}, ctx, rng);
        t.blinded = ct_mul(params, t.blinded, blind.blinded);
        t.blinds.push_back(std::move(blind));
    }

    std::vector<std::pair<unsigned, Bigint>> combine_input;
    for (unsigned i = 0; i < shares.count; i++) {
        const TallierShare& s = shares.shares[i];
        PetShare ps;
        ps.tallier = s.index;
        ps.share = decryption_share(params, s, t.blinded);
        ps.proof = prove_linear(
            params, share_decryption_statement(params, shares.commitments[i], t.blinded, ps.share),
            {s.x1, s.x2}, ctx, rng);
        if (combine_input.size() < shares.threshold) combine_input.emplace_back(s.index, ps.share);
        t.shares.push_back(std::move(ps));
    }

    t.plaintext = combine_shares(params, t.blinded, combine_input);
    t.verdict = (t.plaintext == 1);
    return t;
}

bool verify_pet(const GroupParams& params, const std::vector<Bigint>& share_commitments,
                unsigned threshold, const PetTranscript& t, const ProofContext& ctx) {
    if (t.quotient != ct_div(params, t.input_a, t.input_b)) return false;
    if (t.blinds.empty() || t.shares.size() < threshold) return false;

    ElGamalCiphertext product{1, 1, 1};
    for (const PetBlind& blind : t.blinds) {
        if (!verify_linear(params, exponent_consistency_statement(t.quotient, blind.blinded),
                           blind.proof, ctx)) {
            return false;
        }
        product = ct_mul(params, product, blind.blinded);
    }
    if (product != t.blinded) return false;

    std::vector<std::pair<unsigned, Bigint>> combine_input;
    for (const PetShare& ps : t.shares) {
        if (ps.tallier == 0 || ps.tallier > share_commitments.size()) return false;
        if (!verify_linear(params,
                           share_decryption_statement(params, share_commitments[ps.tallier - 1],
                                                      t.blinded, ps.share),
                           ps.proof, ctx)) {
            return false;
        }
        if (combine_input.size() < threshold) combine_input.emplace_back(ps.tallier, ps.share);
    }
    if (combine_input.size() < threshold) return false;
    if (combine_shares(params, t.blinded, combine_input) != t.plaintext) return false;
    return t.verdict == (t.plaintext == 1);
}

void write_pet_transcript(ByteWriter& w, const PetTranscript& t) {
    write_ciphertext(w, t.input_a);
    write_ciphertext(w, t.input_b);
    write_ciphertext(w, t.quotient);
    w.u32be(static_cast<uint32_t>(t.blinds.size()));
    for (const PetBlind& b : t.blinds) {
        w.u32be(b.tallier);
        write_ciphertext(w, b.blinded);
        write_linear_proof(w, b.proof);
    }
    write_ciphertext(w, t.blinded);
    w.u32be(static_cast<uint32_t>(t.shares.size()));
    for (const PetShare& s : t.shares) {
        w.u32be(s.tallier);
        write_int(w, s.share);
        write_linear_proof(w, s.proof);
    }
    write_int(w, t.plaintext);
    w.u8(t.verdict ? 1 : 0);
}

}  // namespace jcj
