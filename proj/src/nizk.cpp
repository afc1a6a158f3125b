#include "jcj/nizk.hpp"

#include <stdexcept>

namespace jcj {

namespace {

void write_statement(ByteWriter& w, const LinearStatement& st) {
    w.blob(st.label);
    w.u32be(static_cast<uint32_t>(st.bases.size()));
    w.u32be(static_cast<uint32_t>(st.witness_count));
    for (size_t j = 0; j < st.bases.size(); j++) {
        for (const Bigint& b : st.bases[j]) write_int(w, b);
        write_int(w, st.targets[j]);
    }
}

Bigint challenge_for(const GroupParams& params, const LinearStatement& st,
                     const std::vector<Bigint>& commitments, const ProofContext& ctx) {
    ByteWriter w;
    w.blob(std::string_view("jcj/nizk/v1"));
    w.blob(ctx.election_id);
    w.blob(ctx.label);
    write_statement(w, st);
    for (const Bigint& t : commitments) write_int(w, t);
    return hash_to_scalar(params.q, w.bytes());
}

bool statement_well_formed(const GroupParams& params, const LinearStatement& st) {
    if (st.bases.size() != st.targets.size() || st.bases.empty()) return false;
    for (size_t j = 0; j < st.bases.size(); j++) {
        if (st.bases[j].size() != st.witness_count) return false;
        for (const Bigint& b : st.bases[j]) {
            if (!in_subgroup(params, b)) return false;
        }
        if (!in_subgroup(params, st.targets[j])) return false;
    }
    return true;
}

Bigint eval_row(const GroupParams& params, const std::vector<Bigint>& bases,
                const std::vector<Bigint>& exps) {
    Bigint acc = 1;
    for (size_t i = 0; i < bases.size(); i++) {
        acc = mulmod(acc, modpow(bases[i], exps[i], params.p), params.p);
    }
    return acc;
}

// Simulated branch for OR composition: pick (challenge, responses) at random
// and derive the commitment that makes the verification equation hold.
LinearProof simulate_branch(const GroupParams& params, const LinearStatement& st, Drbg& rng) {
    LinearProof proof;
    proof.challenge = rng.below(params.q);
    for (size_t i = 0; i < st.witness_count; i++) proof.responses.push_back(rng.below(params.q));
    for (size_t j = 0; j < st.bases.size(); j++) {
        Bigint lhs = eval_row(params, st.bases[j], proof.responses);
        Bigint tc = modpow(st.targets[j], proof.challenge, params.p);
        proof.commitments.push_back(mulmod(lhs, modinv(tc, params.p), params.p));
    }
    return proof;
}

Bigint or_master_challenge(const GroupParams& params, const std::vector<LinearStatement>& branches,
                           const std::vector<LinearProof>& proofs, const ProofContext& ctx) {
    ByteWriter w;
    w.blob(std::string_view("jcj/nizk/or/v1"));
    w.blob(ctx.election_id);
    w.blob(ctx.label);
    w.u32be(static_cast<uint32_t>(branches.size()));
    for (const LinearStatement& st : branches) write_statement(w, st);
    for (const LinearProof& p : proofs) {
        for (const Bigint& t : p.commitments) write_int(w, t);
    }
    return hash_to_scalar(params.q, w.bytes());
}

}  // namespace

LinearProof prove_linear(const GroupParams& params, const LinearStatement& st,
                         const std::vector<Bigint>& witnesses, const ProofContext& ctx,
                         Drbg& rng) {
    if (witnesses.size() != st.witness_count) {
        throw std::invalid_argument("prove_linear: witness count mismatch");
    }
    std::vector<Bigint> blinds;
    for (size_t i = 0; i < st.witness_count; i++) blinds.push_back(rng.below(params.q));

    LinearProof proof;
    for (size_t j = 0; j < st.bases.size(); j++) {
        proof.commitments.push_back(eval_row(params, st.bases[j], blinds));
    }
    proof.challenge = challenge_for(params, st, proof.commitments, ctx);
    for (size_t i = 0; i < st.witness_count; i++) {
        proof.responses.push_back((blinds[i] + proof.challenge * witnesses[i]) % params.q);
    }
    return proof;
}

bool verify_linear(const GroupParams& params, const LinearStatement& st, const LinearProof& proof,
                   const ProofContext& ctx) {
    if (!statement_well_formed(params, st)) return false;
    if (proof.commitments.size() != st.bases.size()) return false;
    if (proof.responses.size() != st.witness_count) return false;
    for (const Bigint& t : proof.commitments) {
        if (!in_subgroup(params, t)) return false;
    }
    if (proof.challenge != challenge_for(params, st, proof.commitments, ctx)) return false;
    for (size_t j = 0; j < st.bases.size(); j++) {
        Bigint lhs = eval_row(params, st.bases[j], proof.responses);
        Bigint rhs = mulmod(proof.commitments[j],
                            modpow(st.targets[j], proof.challenge, params.p), params.p);
        if (lhs != rhs) return false;
    }
    return true;
}

OrProof prove_or(const GroupParams& params, const std::vector<LinearStatement>& branches,
                 size_t true_branch, const std::vector<Bigint>& witnesses, const ProofContext& ctx,
                 Drbg& rng) {
    if (true_branch >= branches.size()) throw std::invalid_argument("prove_or: branch out of range");
    const LinearStatement& real = branches[true_branch];
    if (witnesses.size() != real.witness_count) {
        throw std::invalid_argument("prove_or: witness count mismatch");
    }

    OrProof proof;
    proof.branches.resize(branches.size());
    std::vector<Bigint> blinds;
    for (size_t i = 0; i < real.witness_count; i++) blinds.push_back(rng.below(params.q));

    for (size_t b = 0; b < branches.size(); b++) {
        if (b == true_branch) {
            for (size_t j = 0; j < real.bases.size(); j++) {
                proof.branches[b].commitments.push_back(eval_row(params, real.bases[j], blinds));
            }
        } else {
            proof.branches[b] = simulate_branch(params, branches[b], rng);
        }
    }

    Bigint master = or_master_challenge(params, branches, proof.branches, ctx);
    Bigint sum = 0;
    for (size_t b = 0; b < branches.size(); b++) {
        if (b != true_branch) sum = (sum + proof.branches[b].challenge) % params.q;
    }
    Bigint c = (master - sum) % params.q;
    if (c < 0) c += params.q;
    proof.branches[true_branch].challenge = c;
    for (size_t i = 0; i < real.witness_count; i++) {
        proof.branches[true_branch].responses.push_back((blinds[i] + c * witnesses[i]) % params.q);
    }
    return proof;
}

bool verify_or(const GroupParams& params, const std::vector<LinearStatement>& branches,
               const OrProof& proof, const ProofContext& ctx) {
    if (proof.branches.size() != branches.size() || branches.empty()) return false;
    Bigint sum = 0;
    for (size_t b = 0; b < branches.size(); b++) {
        const LinearStatement& st = branches[b];
        const LinearProof& p = proof.branches[b];
        if (!statement_well_formed(params, st)) return false;
        if (p.commitments.size() != st.bases.size() || p.responses.size() != st.witness_count) {
            return false;
        }
        for (size_t j = 0; j < st.bases.size(); j++) {
            Bigint lhs = eval_row(params, st.bases[j], p.responses);
            Bigint rhs =
                mulmod(p.commitments[j], modpow(st.targets[j], p.challenge, params.p), params.p);
            if (lhs != rhs) return false;
        }
        sum = (sum + p.challenge) % params.q;
    }
    return sum == or_master_challenge(params, branches, proof.branches, ctx);
}

LinearStatement plaintext_knowledge_statement(const GroupParams& params,
                                              const ElGamalCiphertext& ct) {
    LinearStatement st;
    st.label = "plaintext-knowledge";
    st.witness_count = 1;
    st.bases = {{params.g1}, {params.g2}};
    st.targets = {ct.u, ct.v};
    return st;
}

LinearStatement exponent_consistency_statement(const ElGamalCiphertext& base,
                                               const ElGamalCiphertext& power) {
    LinearStatement st;
    st.label = "exponent-consistency";
    st.witness_count = 1;
    st.bases = {{base.u}, {base.v}, {base.w}};
    st.targets = {power.u, power.v, power.w};
    return st;
}

LinearStatement share_decryption_statement(const GroupParams& params, const Bigint& commitment,
                                           const ElGamalCiphertext& ct, const Bigint& share) {
    LinearStatement st;
    st.label = "share-decryption";
    st.witness_count = 2;
    st.bases = {{params.g1, params.g2}, {ct.u, ct.v}};
    st.targets = {commitment, share};
    return st;
}

LinearStatement encryption_of_statement(const GroupParams& params, const Bigint& h,
                                        const ElGamalCiphertext& ct, const Bigint& plaintext) {
    LinearStatement st;
    st.label = "encryption-of";
    st.witness_count = 1;
    st.bases = {{params.g1}, {params.g2}, {h}};
    st.targets = {ct.u, ct.v, mulmod(ct.w, modinv(plaintext, params.p), params.p)};
    return st;
}

namespace {
std::vector<LinearStatement> membership_branches(const GroupParams& params, const Bigint& h,
                                                 const ElGamalCiphertext& ct,
                                                 const std::vector<Bigint>& slate) {
    std::vector<LinearStatement> branches;
    branches.reserve(slate.size());
    for (const Bigint& c : slate) branches.push_back(encryption_of_statement(params, h, ct, c));
    return branches;
}
}  // namespace

OrProof prove_membership(const GroupParams& params, const Bigint& h, const ElGamalCiphertext& ct,
                         const std::vector<Bigint>& slate, size_t choice, const Bigint& randomness,
                         const ProofContext& ctx, Drbg& rng) {
    if (choice >= slate.size()) throw std::invalid_argument("prove_membership: choice out of range");
    return prove_or(params, membership_branches(params, h, ct, slate), choice, {randomness}, ctx,
                    rng);
}

bool verify_membership(const GroupParams& params, const Bigint& h, const ElGamalCiphertext& ct,
                       const std::vector<Bigint>& slate, const OrProof& proof,
                       const ProofContext& ctx) {
    return verify_or(params, membership_branches(params, h, ct, slate), proof, ctx);
}

SigningKey signature_keygen(const GroupParams& params, Drbg& rng) {
    SigningKey key;
    key.secret = rng.nonzero_below(params.q);
    key.public_key = modpow(params.g1, key.secret, params.p);
    return key;
}

SchnorrSignature sign_message(const GroupParams& params, const SigningKey& key, const Bytes& msg) {
    // deterministic nonce bound to key and message
    ByteWriter nw;
    nw.blob(std::string_view("jcj/schnorr/nonce"));
    write_int(nw, key.secret);
    nw.blob(msg);
    Bigint k = Drbg::from_key(nw.bytes()).nonzero_below(params.q);
    Bigint r = modpow(params.g1, k, params.p);

    ByteWriter cw;
    cw.blob(std::string_view("jcj/schnorr/v1"));
    write_int(cw, key.public_key);
    write_int(cw, r);
    cw.blob(msg);
    SchnorrSignature sig;
    sig.challenge = hash_to_scalar(params.q, cw.bytes());
    sig.response = (k + sig.challenge * key.secret) % params.q;
    return sig;
}

bool verify_signature(const GroupParams& params, const Bigint& public_key,
                      const SchnorrSignature& sig, const Bytes& msg) {
    if (!in_subgroup(params, public_key)) return false;
    Bigint r = mulmod(modpow(params.g1, sig.response, params.p),
                      modinv(modpow(public_key, sig.challenge, params.p), params.p), params.p);
    ByteWriter cw;
    cw.blob(std::string_view("jcj/schnorr/v1"));
    write_int(cw, public_key);
    write_int(cw, r);
    cw.blob(msg);
    return sig.challenge == hash_to_scalar(params.q, cw.bytes());
}

void write_linear_proof(ByteWriter& w, const LinearProof& proof) {
    w.u32be(static_cast<uint32_t>(proof.commitments.size()));
    for (const Bigint& t : proof.commitments) write_int(w, t);
    write_int(w, proof.challenge);
    w.u32be(static_cast<uint32_t>(proof.responses.size()));
    for (const Bigint& z : proof.responses) write_int(w, z);
}

}  // namespace jcj
