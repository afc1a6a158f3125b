#include "jcj/tally.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "tally_detail.hpp"

namespace jcj {

using nlohmann::json;
using serial::payload_bytes;

namespace detail {

bool verify_classical_ballot_payload(const GroupParams& params, const Bigint& h,
                                     const std::vector<Bigint>& slate, const ProofContext& ctx,
                                     const json& payload, uint64_t index, ClassicalBallot* out) {
    try {
        ClassicalBallot b;
        b.index = index;
        b.e1 = serial::ciphertext_from_json(payload.at("e1"));
        b.e2 = serial::ciphertext_from_json(payload.at("e2"));
        LinearProof cred = serial::linear_proof_from_json(payload.at("proof_cred"));
        OrProof vote = serial::or_proof_from_json(payload.at("proof_vote"));
        if (!verify_linear(params, plaintext_knowledge_statement(params, b.e2), cred, ctx)) {
            return false;
        }
        if (!verify_membership(params, h, b.e1, slate, vote, ctx)) return false;
        if (!in_subgroup(params, b.e2.w)) return false;
        *out = std::move(b);
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

bool verify_fhe_ballot_payload(const GroupParams& params, const Bigint& oracle_key,
                               const Bytes& election_id, const json& payload, uint64_t index,
                               FheBallot* out) {
    try {
        FheBallot b;
        b.index = index;
        b.e1 = serial::fhe_ciphertext_from_json(payload.at("e1"));
        b.e2 = serial::fhe_ciphertext_from_json(payload.at("e2"));
        OracleRecord att = serial::oracle_record_from_json(payload.at("attestation"));
        bool ok = att.op == "ballot-pok" && att.inputs.size() == 2 &&
                  att.inputs[0] == fhe_ct_digest(b.e1) && att.inputs[1] == fhe_ct_digest(b.e2) &&
                  att.result == election_id && b.e1.tag == FheTag::vote &&
                  b.e2.tag == FheTag::credential &&
                  verify_oracle_record(params, oracle_key, att);
        if (!ok) return false;
        if (payload.contains("preimage") && !payload.at("preimage").is_null()) {
            b.preimage = serial::fhe_ciphertext_from_json(payload.at("preimage"));
            b.has_preimage = true;
        }
        *out = std::move(b);
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

DecryptionEvidence decrypt_with_evidence(const GroupParams& params, const ThresholdShares& shares,
                                         const ElGamalCiphertext& ct, const ProofContext& ctx,
                                         Drbg& rng) {
    DecryptionEvidence ev;
    ev.ct = ct;
    std::vector<std::pair<unsigned, Bigint>> combine_input;
    for (unsigned i = 0; i < shares.count; i++) {
        const TallierShare& s = shares.shares[i];
        ShareEvidence se;
        se.tallier = s.index;
        se.share = decryption_share(params, s, ct);
        se.proof = prove_linear(
            params, share_decryption_statement(params, shares.commitments[i], ct, se.share),
            {s.x1, s.x2}, ctx, rng);
        if (combine_input.size() < shares.threshold) combine_input.emplace_back(s.index, se.share);
        ev.shares.push_back(std::move(se));
    }
    ev.plaintext = combine_shares(params, ct, combine_input);
    return ev;
}

bool verify_decryption_evidence(const GroupParams& params, const std::vector<Bigint>& commitments,
                                unsigned threshold, const DecryptionEvidence& ev,
                                const ProofContext& ctx) {
    if (ev.shares.size() < threshold) return false;
    std::vector<std::pair<unsigned, Bigint>> combine_input;
    for (const ShareEvidence& se : ev.shares) {
        if (se.tallier == 0 || se.tallier > commitments.size()) return false;
        if (!verify_linear(params,
                           share_decryption_statement(params, commitments[se.tallier - 1], ev.ct,
                                                      se.share),
                           se.proof, ctx)) {
            return false;
        }
        if (combine_input.size() < threshold) combine_input.emplace_back(se.tallier, se.share);
    }
    return combine_shares(params, ev.ct, combine_input) == ev.plaintext;
}

json decryption_evidence_to_json(const DecryptionEvidence& ev) {
    json shares = json::array();
    for (const ShareEvidence& se : ev.shares) {
        shares.push_back(json{{"tallier", se.tallier},
                              {"share", int_to_hex(se.share)},
                              {"proof", serial::linear_proof_to_json(se.proof)}});
    }
    return json{{"ct", serial::ciphertext_to_json(ev.ct)},
                {"shares", shares},
                {"plaintext", int_to_hex(ev.plaintext)}};
}

DecryptionEvidence decryption_evidence_from_json(const json& j) {
    DecryptionEvidence ev;
    ev.ct = serial::ciphertext_from_json(j.at("ct"));
    for (const auto& s : j.at("shares")) {
        ShareEvidence se;
        se.tallier = s.at("tallier").get<unsigned>();
        se.share = hex_to_int(s.at("share").get<std::string>());
        se.proof = serial::linear_proof_from_json(s.at("proof"));
        ev.shares.push_back(std::move(se));
    }
    ev.plaintext = hex_to_int(j.at("plaintext").get<std::string>());
    return ev;
}

json counters_to_json(const OpCounters& c) {
    return json{{"pet", c.pet_count},
                {"hash_eval", c.hash_eval_count},
                {"mix", c.mix_count},
                {"decrypt", c.decrypt_count},
                {"exp", c.exponentiation_count}};
}

OpCounters counters_from_json(const json& j) {
    OpCounters c;
    c.pet_count = j.at("pet").get<uint64_t>();
    c.hash_eval_count = j.at("hash_eval").get<uint64_t>();
    c.mix_count = j.at("mix").get<uint64_t>();
    c.decrypt_count = j.at("decrypt").get<uint64_t>();
    c.exponentiation_count = j.at("exp").get<uint64_t>();
    return c;
}

json report_to_json(const WeedingReport& report) {
    json stages = json::array();
    for (const WeedingStage& s : report.stages) {
        stages.push_back(json{{"name", s.name}, {"surviving", s.surviving}});
    }
    return json{{"type", "weeding-report"}, {"stages", stages}};
}

WeedingReport report_from_json(const json& j) {
    WeedingReport report;
    for (const auto& s : j.at("stages")) {
        report.stages.push_back(
            {s.at("name").get<std::string>(), s.at("surviving").get<std::vector<uint64_t>>()});
    }
    return report;
}

json result_to_json(const TallyResult& res, Backend backend, bool canonical) {
    return json{{"type", "result"},
                {"backend", backend_name(backend)},
                {"canonical", canonical},
                {"tally", res.tally},
                {"proof_rejected", res.proof_rejected},
                {"duplicates_removed", res.duplicates_removed},
                {"invalid_credential_removed", res.invalid_credential_removed},
                {"eligibility_removed", res.eligibility_removed},
                {"spoiled", res.spoiled},
                {"counters", counters_to_json(res.counters)}};
}

std::vector<size_t> dedup_select(size_t n, const std::function<size_t(size_t)>& group_of,
                                 DuplicatePolicy policy) {
    std::map<size_t, std::vector<size_t>> groups;
    for (size_t i = 0; i < n; i++) groups[group_of(i)].push_back(i);
    std::vector<size_t> keep;
    for (const auto& [g, members] : groups) {
        keep.push_back(policy == DuplicatePolicy::keep_first ? members.front() : members.back());
    }
    std::sort(keep.begin(), keep.end());
    return keep;
}

size_t candidate_of(const std::vector<Bigint>& slate, const Bigint& plaintext) {
    for (size_t j = 0; j < slate.size(); j++) {
        if (slate[j] == plaintext) return j;
    }
    return slate.size();
}

size_t candidate_of_bytes(const std::vector<Bytes>& slate, const Bytes& plaintext) {
    for (size_t j = 0; j < slate.size(); j++) {
        if (slate[j] == plaintext) return j;
    }
    return slate.size();
}

}  // namespace detail

using detail::ClassicalBallot;
using detail::FheBallot;

namespace {

struct UnionFind {
    std::vector<size_t> parent;
    explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    size_t find(size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(size_t a, size_t b) { parent[find(a)] = find(b); }
};

class EvidencePoster {
public:
    EvidencePoster(Election& election, bool enabled) : election_(election), enabled_(enabled) {}

    void operator()(EntryKind kind, const json& payload) const {
        if (!enabled_) return;
        election_.board().append(kind, payload_bytes(payload), "tallier:1",
                                 &election_.author_keys().at("tallier:1"));
    }

private:
    Election& election_;
    bool enabled_;
};

std::vector<ClassicalBallot> collect_classical_ballots(const Election& e, uint64_t* rejected) {
    ProofContext ctx{e.config().election_id, "ballot"};
    std::vector<ClassicalBallot> out;
    for (const BoardEntry* entry : e.board().query(EntryKind::ballot)) {
        ClassicalBallot b;
        bool ok = false;
        try {
            ok = detail::verify_classical_ballot_payload(e.params(), e.tallier_key().h, e.slate(),
                                                         ctx, serial::parse_payload(entry->payload),
                                                         entry->index, &b);
        } catch (const std::exception&) {
            ok = false;
        }
        if (ok) {
            out.push_back(std::move(b));
        } else {
            (*rejected)++;
        }
    }
    return out;
}

std::vector<FheBallot> collect_fhe_ballots(const Election& e, uint64_t* rejected) {
    std::vector<FheBallot> out;
    for (const BoardEntry* entry : e.board().query(EntryKind::ballot)) {
        FheBallot b;
        bool ok = false;
        try {
            ok = detail::verify_fhe_ballot_payload(e.params(), e.oracle()->attestation_key(),
                                                   e.config().election_id,
                                                   serial::parse_payload(entry->payload),
                                                   entry->index, &b);
        } catch (const std::exception&) {
            ok = false;
        }
        if (ok) {
            out.push_back(std::move(b));
        } else {
            (*rejected)++;
        }
    }
    return out;
}

std::vector<ElGamalCiphertext> collect_classical_roll(const Election& e) {
    std::vector<ElGamalCiphertext> out;
    for (const BoardEntry* entry : e.board().query(EntryKind::roll)) {
        try {
            json j = serial::parse_payload(entry->payload);
            out.push_back(serial::ciphertext_from_json(j.at("s")));
        } catch (const std::exception& ex) {
            throw TallyError("roll entry at board index " + std::to_string(entry->index) +
                             " unparsable: " + ex.what());
        }
    }
    return out;
}

std::vector<FheCiphertext> collect_fhe_roll(const Election& e) {
    std::vector<FheCiphertext> out;
    for (const BoardEntry* entry : e.board().query(EntryKind::roll)) {
        try {
            json j = serial::parse_payload(entry->payload);
            out.push_back(serial::fhe_ciphertext_from_json(j.at("s")));
        } catch (const std::exception& ex) {
            throw TallyError("roll entry at board index " + std::to_string(entry->index) +
                             " unparsable: " + ex.what());
        }
    }
    return out;
}

// Eligibility core shared by tally_linear and the standalone operation.
EligibilityOutcome run_eligibility(Election& e, std::vector<FheBallot>& ballots,
                                   const EvidencePoster& post, OpCounters& counters) {
    FheOracle* oracle = e.oracle();
    std::vector<unsigned> approvals = e.all_tallier_approvals();
    EligibilityOutcome outcome;
    std::vector<FheBallot> retained;
    for (FheBallot& b : ballots) {
        if (!b.has_preimage) {
            post(EntryKind::hash_post, json{{"type", "eligibility"},
                                            {"ballot", b.index},
                                            {"eq", nullptr},
                                            {"decrypt", nullptr},
                                            {"verdict", false}});
            outcome.flagged.push_back(b.index);
            continue;
        }
        FheOracle::Evaluation eq = oracle->eval_hash_preimage_eq(b.preimage, b.e2);
        FheOracle::Decryption dec = oracle->threshold_decrypt(eq.ct, approvals);
        counters.decrypt_count++;
        bool verdict = dec.plaintext == Bytes{1};
        post(EntryKind::hash_post,
             json{{"type", "eligibility"},
                  {"ballot", b.index},
                  {"eq_ct", serial::fhe_ciphertext_to_json(eq.ct)},
                  {"eq", serial::oracle_record_to_json(eq.record)},
                  {"decrypt", serial::oracle_record_to_json(dec.record)},
                  {"verdict", verdict}});
        if (verdict) {
            outcome.retained.push_back(b.index);
            retained.push_back(std::move(b));
        } else {
            outcome.flagged.push_back(b.index);
        }
    }
    ballots = std::move(retained);
    return outcome;
}

std::vector<uint64_t> indices_of(const std::vector<ClassicalBallot>& b) {
    std::vector<uint64_t> out;
    out.reserve(b.size());
    for (const ClassicalBallot& x : b) out.push_back(x.index);
    return out;
}

std::vector<uint64_t> indices_of(const std::vector<FheBallot>& b) {
    std::vector<uint64_t> out;
    out.reserve(b.size());
    for (const FheBallot& x : b) out.push_back(x.index);
    return out;
}

}  // namespace

// ------------------------------------------------------------- quadratic

TallyResult tally_quadratic(Election& e, bool post_evidence) {
    if (e.config().backend != Backend::quadratic) {
        throw TallyError("tally_quadratic: election configured for another backend");
    }
    TallyResult res;
    res.tally.assign(e.slate().size(), 0);
    ExpCountScope exp_scope(&res.counters.exponentiation_count);
    const GroupParams& params = e.params();
    const bool canonical = e.config().canonical_counts;
    EvidencePoster post(e, post_evidence);
    Drbg trng = e.tally_rng();
    ProofContext ctx{e.config().election_id, "tally"};
    WeedingReport report;

    // step 1: proof verification
    std::vector<ClassicalBallot> ballots = collect_classical_ballots(e, &res.proof_rejected);
    report.stages.push_back({"proof-valid", indices_of(ballots)});

    // step 2: pairwise PETs over credential ciphertexts
    size_t n = ballots.size();
    UnionFind uf(n);
    uint64_t pair_counter = 0;
    for (size_t i = 0; i < n; i++) {
        for (size_t j = i + 1; j < n; j++) {
            if (!canonical && uf.find(i) == uf.find(j)) continue;  // already known equal
            Drbg prng = trng.child("pet-dedup", pair_counter++);
            PetTranscript t = run_pet(params, e.shares(), ballots[i].e2, ballots[j].e2, ctx, prng);
            res.counters.pet_count++;
            res.counters.decrypt_count++;
            if (t.verdict) uf.unite(i, j);
            post(EntryKind::pet, json{{"type", "pet"},
                                      {"stage", "dedup"},
                                      {"left", ballots[i].index},
                                      {"right", ballots[j].index},
                                      {"pet", serial::pet_to_json(t)}});
        }
    }
    std::vector<size_t> kept = detail::dedup_select(
        n, [&](size_t i) { return uf.find(i); }, e.config().duplicate_policy);
    res.duplicates_removed = n - kept.size();
    std::vector<ClassicalBallot> weeded;
    for (size_t i : kept) weeded.push_back(ballots[i]);
    report.stages.push_back({"dedup", indices_of(weeded)});

    // step 3: paired mix of (votes, credentials)
    CipherLists pair_lists(2);
    for (const ClassicalBallot& b : weeded) {
        pair_lists[0].push_back(b.e1);
        pair_lists[1].push_back(b.e2);
    }
    Drbg mrng = trng.child("mix-ballots");
    ElGamalMixBatch ballot_mix = mix_elgamal(params, e.tallier_key().h, pair_lists,
                                             e.config().mix_servers, e.config().shadow_rounds,
                                             mrng);
    res.counters.mix_count += e.config().mix_servers;
    post(EntryKind::mix, json{{"type", "mix"},
                              {"target", "ballots"},
                              {"batch", serial::elgamal_mix_to_json(ballot_mix)}});
    const std::vector<ElGamalCiphertext>& mixed_votes = ballot_mix.servers.back().output[0];
    const std::vector<ElGamalCiphertext>& mixed_creds = ballot_mix.servers.back().output[1];

    // step 4: mix the roll, then PET every ballot credential against it
    std::vector<ElGamalCiphertext> roll = collect_classical_roll(e);
    Drbg rrng = trng.child("mix-roll");
    ElGamalMixBatch roll_mix = mix_elgamal(params, e.tallier_key().h, {roll},
                                           e.config().mix_servers, e.config().shadow_rounds, rrng);
    res.counters.mix_count += e.config().mix_servers;
    post(EntryKind::mix,
         json{{"type", "mix"}, {"target", "roll"}, {"batch", serial::elgamal_mix_to_json(roll_mix)}});
    const std::vector<ElGamalCiphertext>& mixed_roll = roll_mix.servers.back().output[0];

    size_t n2 = mixed_creds.size();
    size_t rolln = mixed_roll.size();
    std::vector<bool> roll_used(rolln, false);
    std::vector<size_t> surviving_positions;
    uint64_t roll_pair_counter = 0;
    if (canonical) {
        std::vector<std::vector<bool>> match(n2, std::vector<bool>(rolln, false));
        for (size_t bi = 0; bi < n2; bi++) {
            for (size_t rj = 0; rj < rolln; rj++) {
                Drbg prng = trng.child("pet-roll", roll_pair_counter++);
                PetTranscript t =
                    run_pet(params, e.shares(), mixed_creds[bi], mixed_roll[rj], ctx, prng);
                res.counters.pet_count++;
                res.counters.decrypt_count++;
                match[bi][rj] = t.verdict;
                post(EntryKind::pet, json{{"type", "pet"},
                                          {"stage", "roll-match"},
                                          {"ballot", bi},
                                          {"roll", rj},
                                          {"pet", serial::pet_to_json(t)}});
            }
        }
        for (size_t bi = 0; bi < n2; bi++) {
            for (size_t rj = 0; rj < rolln; rj++) {
                if (match[bi][rj] && !roll_used[rj]) {
                    roll_used[rj] = true;
                    surviving_positions.push_back(bi);
                    break;
                }
            }
        }
    } else {
        for (size_t bi = 0; bi < n2; bi++) {
            for (size_t rj = 0; rj < rolln; rj++) {
                if (roll_used[rj]) continue;
                Drbg prng = trng.child("pet-roll", roll_pair_counter++);
                PetTranscript t =
                    run_pet(params, e.shares(), mixed_creds[bi], mixed_roll[rj], ctx, prng);
                res.counters.pet_count++;
                res.counters.decrypt_count++;
                post(EntryKind::pet, json{{"type", "pet"},
                                          {"stage", "roll-match"},
                                          {"ballot", bi},
                                          {"roll", rj},
                                          {"pet", serial::pet_to_json(t)}});
                if (t.verdict) {
                    roll_used[rj] = true;
                    surviving_positions.push_back(bi);
                    break;
                }
            }
        }
    }
    res.invalid_credential_removed = n2 - surviving_positions.size();
    report.stages.push_back({"roll-match", std::vector<uint64_t>(surviving_positions.begin(),
                                                                 surviving_positions.end())});

    // step 5: threshold-decrypt the surviving votes
    uint64_t decrypt_counter = 0;
    for (size_t pos : surviving_positions) {
        Drbg drng = trng.child("vote-decrypt", decrypt_counter++);
        detail::DecryptionEvidence ev =
            detail::decrypt_with_evidence(params, e.shares(), mixed_votes[pos], ctx, drng);
        res.counters.decrypt_count++;
        post(EntryKind::decryption, json{{"type", "vote-decryption"},
                                         {"position", pos},
                                         {"evidence", detail::decryption_evidence_to_json(ev)}});
        size_t cand = detail::candidate_of(e.slate(), ev.plaintext);
        if (cand < res.tally.size()) {
            res.tally[cand]++;
        } else {
            res.spoiled++;
        }
        res.counted_ballot_indices.push_back(weeded[ballot_mix.composed_permutation[pos]].index);
    }
    std::sort(res.counted_ballot_indices.begin(), res.counted_ballot_indices.end());

    post(EntryKind::decryption, detail::report_to_json(report));
    post(EntryKind::result, detail::result_to_json(res, Backend::quadratic, canonical));
    return res;
}

// ---------------------------------------------------------------- linear

TallyResult tally_linear(Election& e, bool post_evidence) {
    if (e.config().backend != Backend::linear) {
        throw TallyError("tally_linear: election configured for another backend");
    }
    FheOracle* oracle = e.oracle();
    if (oracle == nullptr) throw TallyError("tally_linear: no oracle");
    TallyResult res;
    res.tally.assign(e.slate().size(), 0);
    ExpCountScope exp_scope(&res.counters.exponentiation_count);
    EvidencePoster post(e, post_evidence);
    std::vector<unsigned> approvals = e.all_tallier_approvals();
    Drbg trng = e.tally_rng();
    WeedingReport report;

    // step 1: attestation verification
    std::vector<FheBallot> ballots = collect_fhe_ballots(e, &res.proof_rejected);
    report.stages.push_back({"proof-valid", indices_of(ballots)});

    // eligibility weeding happens before the hashing stages
    if (e.config().eligibility_mode) {
        EligibilityOutcome outcome = run_eligibility(e, ballots, post, res.counters);
        res.eligibility_removed = outcome.flagged.size();
        report.stages.push_back({"eligibility", outcome.retained});
    }

    // step 2: keyed hashes under a fresh key, duplicates via hash table
    HashKey k1 = oracle->new_hash_key();
    post(EntryKind::hash_post,
         json{{"type", "hash-key"},
              {"stage", 1},
              {"key_id", k1.id},
              {"encrypted_key", serial::fhe_ciphertext_to_json(k1.encrypted_key)}});
    std::vector<std::string> digests;
    for (const FheBallot& b : ballots) {
        FheOracle::Evaluation eval = oracle->eval_keyed_hash(b.e2, k1.id);
        res.counters.hash_eval_count++;
        FheOracle::Decryption dec = oracle->threshold_decrypt(eval.ct, approvals);
        res.counters.decrypt_count++;
        digests.push_back(hex_encode(dec.plaintext));
        post(EntryKind::hash_post, json{{"type", "hash-post"},
                                        {"stage", 1},
                                        {"ballot", b.index},
                                        {"digest_ct", serial::fhe_ciphertext_to_json(eval.ct)},
                                        {"eval", serial::oracle_record_to_json(eval.record)},
                                        {"decrypt", serial::oracle_record_to_json(dec.record)},
                                        {"digest", digests.back()}});
    }
    std::map<std::string, size_t> digest_group;
    for (const std::string& d : digests) digest_group.emplace(d, digest_group.size());
    std::vector<size_t> kept = detail::dedup_select(
        ballots.size(), [&](size_t i) { return digest_group.at(digests[i]); },
        e.config().duplicate_policy);
    res.duplicates_removed = ballots.size() - kept.size();
    std::vector<FheBallot> weeded;
    for (size_t i : kept) weeded.push_back(ballots[i]);
    report.stages.push_back({"dedup", indices_of(weeded)});

    // step 3: paired mix of survivors, mix of the roll
    FheLists pair_lists(2);
    for (const FheBallot& b : weeded) {
        pair_lists[0].push_back(b.e1);
        pair_lists[1].push_back(b.e2);
    }
    Drbg mrng = trng.child("mix-ballots");
    FheMixBatch ballot_mix = mix_fhe(*oracle, pair_lists, e.config().mix_servers,
                                     e.config().shadow_rounds, approvals, mrng);
    res.counters.mix_count += e.config().mix_servers;
    post(EntryKind::mix, json{{"type", "mix"},
                              {"target", "ballots"},
                              {"batch", serial::fhe_mix_to_json(ballot_mix)}});
    const std::vector<FheCiphertext>& mixed_votes = ballot_mix.servers.back().output[0];
    const std::vector<FheCiphertext>& mixed_creds = ballot_mix.servers.back().output[1];

    std::vector<FheCiphertext> roll = collect_fhe_roll(e);
    Drbg rrng = trng.child("mix-roll");
    FheMixBatch roll_mix =
        mix_fhe(*oracle, {roll}, e.config().mix_servers, e.config().shadow_rounds, approvals, rrng);
    res.counters.mix_count += e.config().mix_servers;
    post(EntryKind::mix,
         json{{"type", "mix"}, {"target", "roll"}, {"batch", serial::fhe_mix_to_json(roll_mix)}});
    const std::vector<FheCiphertext>& mixed_roll = roll_mix.servers.back().output[0];

    // step 4: rehash both sides under a new key, match against the roll
    HashKey k2 = oracle->new_hash_key();
    post(EntryKind::hash_post,
         json{{"type", "hash-key"},
              {"stage", 2},
              {"key_id", k2.id},
              {"encrypted_key", serial::fhe_ciphertext_to_json(k2.encrypted_key)}});
    auto hash_list = [&](const std::vector<FheCiphertext>& list, const char* side) {
        std::vector<std::string> out;
        for (size_t i = 0; i < list.size(); i++) {
            FheOracle::Evaluation eval = oracle->eval_keyed_hash(list[i], k2.id);
            res.counters.hash_eval_count++;
            FheOracle::Decryption dec = oracle->threshold_decrypt(eval.ct, approvals);
            res.counters.decrypt_count++;
            out.push_back(hex_encode(dec.plaintext));
            post(EntryKind::hash_post,
                 json{{"type", "hash-post"},
                      {"stage", 2},
                      {"side", side},
                      {"position", i},
                      {"digest_ct", serial::fhe_ciphertext_to_json(eval.ct)},
                      {"eval", serial::oracle_record_to_json(eval.record)},
                      {"decrypt", serial::oracle_record_to_json(dec.record)},
                      {"digest", out.back()}});
        }
        return out;
    };
    std::vector<std::string> ballot_digests = hash_list(mixed_creds, "ballot");
    std::vector<std::string> roll_digests = hash_list(mixed_roll, "roll");

    std::map<std::string, std::vector<size_t>> roll_available;
    for (size_t j = 0; j < roll_digests.size(); j++) roll_available[roll_digests[j]].push_back(j);
    std::vector<size_t> surviving_positions;
    for (size_t i = 0; i < ballot_digests.size(); i++) {
        auto it = roll_available.find(ballot_digests[i]);
        if (it != roll_available.end() && !it->second.empty()) {
            it->second.erase(it->second.begin());  // each roll digest usable once
            surviving_positions.push_back(i);
        }
    }
    res.invalid_credential_removed = ballot_digests.size() - surviving_positions.size();
    report.stages.push_back({"roll-match", std::vector<uint64_t>(surviving_positions.begin(),
                                                                 surviving_positions.end())});

    // step 5: verifiable decryption of the surviving votes
    for (size_t pos : surviving_positions) {
        FheOracle::Decryption dec = oracle->threshold_decrypt(mixed_votes[pos], approvals);
        res.counters.decrypt_count++;
        post(EntryKind::decryption,
             json{{"type", "vote-decryption"},
                  {"position", pos},
                  {"vote_ct", serial::fhe_ciphertext_to_json(mixed_votes[pos])},
                  {"decrypt", serial::oracle_record_to_json(dec.record)},
                  {"plaintext", base64_encode(dec.plaintext)}});
        size_t cand = detail::candidate_of_bytes(e.slate_fhe(), dec.plaintext);
        if (cand < res.tally.size()) {
            res.tally[cand]++;
        } else {
            res.spoiled++;
        }
        res.counted_ballot_indices.push_back(weeded[ballot_mix.composed_permutation[pos]].index);
    }
    std::sort(res.counted_ballot_indices.begin(), res.counted_ballot_indices.end());

    post(EntryKind::decryption, detail::report_to_json(report));
    post(EntryKind::result,
         detail::result_to_json(res, Backend::linear, e.config().canonical_counts));
    return res;
}

EligibilityOutcome eligibility_weed(Election& e, bool post_evidence) {
    if (e.config().backend != Backend::linear || !e.config().eligibility_mode) {
        throw TallyError("eligibility_weed: requires linear backend with eligibility mode");
    }
    uint64_t rejected = 0;
    std::vector<FheBallot> ballots = collect_fhe_ballots(e, &rejected);
    EvidencePoster post(e, post_evidence);
    OpCounters scratch;
    return run_eligibility(e, ballots, post, scratch);
}

// ----------------------------------------------------------- smith-weber

TallyResult tally_smith_weber(Election& e, bool post_evidence) {
    if (e.config().backend != Backend::smith_weber) {
        throw TallyError("tally_smith_weber: election configured for another backend");
    }
    TallyResult res;
    res.tally.assign(e.slate().size(), 0);
    ExpCountScope exp_scope(&res.counters.exponentiation_count);
    const GroupParams& params = e.params();
    EvidencePoster post(e, post_evidence);
    Drbg trng = e.tally_rng();
    ProofContext ctx{e.config().election_id, "tally"};
    WeedingReport report;

    std::vector<ClassicalBallot> ballots = collect_classical_ballots(e, &res.proof_rejected);
    report.stages.push_back({"proof-valid", indices_of(ballots)});

    // One jointly shared blinding exponent: every tallier raises the running
    // ciphertext to its z_i, so all credentials see the same Z. This single
    // exponent is exactly what the probe attack exploits.
    std::vector<Bigint> blind_exponents;
    for (unsigned i = 1; i <= e.config().tallier_count; i++) {
        Drbg zr = trng.child("sw-blind", i);
        blind_exponents.push_back(zr.nonzero_below(params.q));
    }

    uint64_t blind_counter = 0;
    auto blind_credential = [&](const ElGamalCiphertext& ct, const char* target,
                                uint64_t ref) -> Bigint {
        Drbg brng = trng.child("sw-chain", blind_counter++);
        json chain = json::array();
        ElGamalCiphertext current = ct;
        for (unsigned i = 0; i < blind_exponents.size(); i++) {
            ElGamalCiphertext next = ct_pow(params, current, blind_exponents[i]);
            LinearProof proof = prove_linear(params, exponent_consistency_statement(current, next),
                                             {blind_exponents[i]}, ctx, brng);
            chain.push_back(json{{"tallier", i + 1},
                                 {"ct", serial::ciphertext_to_json(next)},
                                 {"proof", serial::linear_proof_to_json(proof)}});
            current = next;
        }
        detail::DecryptionEvidence ev =
            detail::decrypt_with_evidence(params, e.shares(), current, ctx, brng);
        res.counters.decrypt_count++;
        post(EntryKind::decryption, json{{"type", "blinded-credential"},
                                         {"target", target},
                                         {"ref", ref},
                                         {"chain", chain},
                                         {"evidence", detail::decryption_evidence_to_json(ev)}});
        return ev.plaintext;
    };

    std::vector<Bigint> ballot_blinded;
    for (const ClassicalBallot& b : ballots) {
        ballot_blinded.push_back(blind_credential(b.e2, "ballot", b.index));
    }
    std::vector<ElGamalCiphertext> roll = collect_classical_roll(e);
    std::vector<Bigint> roll_blinded;
    for (size_t j = 0; j < roll.size(); j++) {
        roll_blinded.push_back(blind_credential(roll[j], "roll", j));
    }

    // hash-table weeding on the blinded values, linear time
    std::map<std::string, size_t> blinded_group;
    std::vector<std::string> keys;
    for (const Bigint& b : ballot_blinded) {
        keys.push_back(int_to_hex(b));
        blinded_group.emplace(keys.back(), blinded_group.size());
    }
    std::vector<size_t> kept = detail::dedup_select(
        ballots.size(), [&](size_t i) { return blinded_group.at(keys[i]); },
        e.config().duplicate_policy);
    res.duplicates_removed = ballots.size() - kept.size();
    std::vector<ClassicalBallot> weeded;
    std::vector<std::string> weeded_keys;
    for (size_t i : kept) {
        weeded.push_back(ballots[i]);
        weeded_keys.push_back(keys[i]);
    }
    report.stages.push_back({"dedup", indices_of(weeded)});

    std::map<std::string, std::vector<size_t>> roll_available;
    for (size_t j = 0; j < roll_blinded.size(); j++) {
        roll_available[int_to_hex(roll_blinded[j])].push_back(j);
    }
    std::vector<ClassicalBallot> matched;
    for (size_t i = 0; i < weeded.size(); i++) {
        auto it = roll_available.find(weeded_keys[i]);
        if (it != roll_available.end() && !it->second.empty()) {
            it->second.erase(it->second.begin());
            matched.push_back(weeded[i]);
        }
    }
    res.invalid_credential_removed = weeded.size() - matched.size();
    report.stages.push_back({"roll-match", indices_of(matched)});

    // mix the surviving votes, then decrypt and count
    CipherLists vote_list(1);
    for (const ClassicalBallot& b : matched) vote_list[0].push_back(b.e1);
    Drbg mrng = trng.child("mix-votes");
    ElGamalMixBatch vote_mix = mix_elgamal(params, e.tallier_key().h, vote_list,
                                           e.config().mix_servers, e.config().shadow_rounds, mrng);
    res.counters.mix_count += e.config().mix_servers;
    post(EntryKind::mix, json{{"type", "mix"},
                              {"target", "votes"},
                              {"batch", serial::elgamal_mix_to_json(vote_mix)}});
    const std::vector<ElGamalCiphertext>& mixed_votes = vote_mix.servers.back().output[0];

    uint64_t decrypt_counter = 0;
    for (size_t pos = 0; pos < mixed_votes.size(); pos++) {
        Drbg drng = trng.child("vote-decrypt", decrypt_counter++);
        detail::DecryptionEvidence ev =
            detail::decrypt_with_evidence(params, e.shares(), mixed_votes[pos], ctx, drng);
        res.counters.decrypt_count++;
        post(EntryKind::decryption, json{{"type", "vote-decryption"},
                                         {"position", pos},
                                         {"evidence", detail::decryption_evidence_to_json(ev)}});
        size_t cand = detail::candidate_of(e.slate(), ev.plaintext);
        if (cand < res.tally.size()) {
            res.tally[cand]++;
        } else {
            res.spoiled++;
        }
        res.counted_ballot_indices.push_back(matched[vote_mix.composed_permutation[pos]].index);
    }
    std::sort(res.counted_ballot_indices.begin(), res.counted_ballot_indices.end());

    post(EntryKind::decryption, detail::report_to_json(report));
    post(EntryKind::result,
         detail::result_to_json(res, Backend::smith_weber, e.config().canonical_counts));
    return res;
}

TallyResult run_tally(Election& e, bool post_evidence) {
    switch (e.config().backend) {
        case Backend::quadratic: return tally_quadratic(e, post_evidence);
        case Backend::linear: return tally_linear(e, post_evidence);
        case Backend::smith_weber: return tally_smith_weber(e, post_evidence);
    }
    throw TallyError("unknown backend");
}

// ------------------------------------------------------------------ probe

ProbeHandle probe_cast(Election& e, const Bigint& sigma_candidate) {
    ProbeHandle probe;
    probe.sigma = sigma_candidate;
    Drbg wr = Drbg::from_seed(e.config().seed).child("probe-w");
    probe.w = wr.below(e.params().q - 2) + 2;  // avoid the trivial exponents 0 and 1
    Bigint sigma_w = modpow(sigma_candidate, probe.w, e.params().p);
    probe.ballot_a = e.cast_with_classical_credential(sigma_candidate, 0);
    probe.ballot_b = e.cast_with_classical_credential(sigma_w, 0);
    return probe;
}

ProbeHandle probe_cast_linear(Election& e, const Bytes& sigma_candidate) {
    ProbeHandle probe;
    probe.sigma_fhe = sigma_candidate;
    Drbg wr = Drbg::from_seed(e.config().seed).child("probe-w");
    probe.w = wr.below(e.params().q - 2) + 2;
    // mechanical translation of the exponent trick to byte credentials
    Bigint as_int = bytes_to_int(sigma_candidate);
    Bytes raised = int_to_bytes(modpow(as_int, probe.w, e.params().p));
    raised.resize(kFheCredentialBytes);

    FheOracle* oracle = e.oracle();
    auto cast = [&](const Bytes& sigma) {
        FheCiphertext e1 = oracle->encrypt(e.slate_fhe()[0], FheTag::vote);
        FheCiphertext e2 = oracle->encrypt(sigma, FheTag::credential);
        OracleRecord att = oracle->attest_ballot(e1, e2, e.config().election_id);
        json p{{"type", "ballot"},
               {"e1", serial::fhe_ciphertext_to_json(e1)},
               {"e2", serial::fhe_ciphertext_to_json(e2)},
               {"attestation", serial::oracle_record_to_json(att)}};
        return e.board().append(EntryKind::ballot, payload_bytes(p), "anonymous", nullptr).index;
    };
    probe.ballot_a = cast(sigma_candidate);
    probe.ballot_b = cast(raised);
    return probe;
}

ProbeVerdict probe_evaluate(const Election& e, const ProbeHandle& probe) {
    const GroupParams& params = e.params();
    if (e.config().backend == Backend::quadratic) {
        // no blinded values are published; the PET transcripts leak nothing
        // beyond per-pair equality
        return ProbeVerdict::not_applicable;
    }

    std::vector<Bigint> ballot_values;
    std::set<std::string> roll_values;
    if (e.config().backend == Backend::smith_weber) {
        for (const BoardEntry* entry : e.board().query(EntryKind::decryption)) {
            json j = serial::parse_payload(entry->payload);
            if (j.value("type", "") != "blinded-credential") continue;
            Bigint value = hex_to_int(j.at("evidence").at("plaintext").get<std::string>());
            if (j.at("target").get<std::string>() == "ballot") {
                ballot_values.push_back(value);
            } else {
                roll_values.insert(int_to_hex(value));
            }
        }
    } else {
        for (const BoardEntry* entry : e.board().query(EntryKind::hash_post)) {
            json j = serial::parse_payload(entry->payload);
            if (j.value("type", "") != "hash-post") continue;
            if (j.at("stage").get<int>() == 1) {
                ballot_values.push_back(hex_to_int(j.at("digest").get<std::string>()));
            } else if (j.value("side", "") == "roll") {
                roll_values.insert(j.at("digest").get<std::string>());
            }
        }
    }

    // exhaustive scan for the planted multiplicative relation y = x^w
    for (size_t i = 0; i < ballot_values.size(); i++) {
        if (ballot_values[i] == 0) continue;
        Bigint raised = modpow(ballot_values[i], probe.w, params.p);
        for (size_t j = 0; j < ballot_values.size(); j++) {
            if (i == j) continue;
            if (ballot_values[j] == raised) {
                return roll_values.count(int_to_hex(ballot_values[i]))
                           ? ProbeVerdict::registered
                           : ProbeVerdict::unregistered;
            }
        }
    }
    return ProbeVerdict::inconclusive;
}

}  // namespace jcj
