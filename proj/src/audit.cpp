#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "tally_detail.hpp"

// Transcript auditor: everything here works from published board entries
// only. No tallier, registrar or oracle secrets are touched; decryptions are
// recombined from published shares or checked against oracle attestations.

namespace jcj {

using detail::ClassicalBallot;
using detail::FheBallot;
using nlohmann::json;

namespace {

struct Ctx {
    const std::vector<BoardEntry>& entries;
    PublicElection pub;
    AuditReport& rep;
    ProofContext ballot_ctx;
    ProofContext tally_ctx;

    std::vector<const BoardEntry*> rolls;
    std::vector<const BoardEntry*> ballots;
    std::vector<const BoardEntry*> pets;
    std::vector<const BoardEntry*> mixes;
    std::vector<const BoardEntry*> hash_posts;
    std::vector<const BoardEntry*> decryptions;

    json result_payload;
    WeedingReport posted_report;
    bool canonical = true;

    void fail(const std::string& msg) { rep.failures.push_back(msg); }
    bool failed() const { return !rep.failures.empty(); }
};

json parse_or_fail(Ctx& ctx, const BoardEntry& e, const char* what) {
    try {
        return serial::parse_payload(e.payload);
    } catch (const std::exception& ex) {
        ctx.fail(std::string(what) + " payload unparsable at index " + std::to_string(e.index) +
                 ": " + ex.what());
        return json();
    }
}

bool same_stage(Ctx& ctx, const char* name, const std::vector<uint64_t>& recomputed,
                size_t stage_pos) {
    if (stage_pos >= ctx.posted_report.stages.size()) {
        ctx.fail(std::string("weeding report missing stage ") + name);
        return false;
    }
    const WeedingStage& stage = ctx.posted_report.stages[stage_pos];
    if (stage.name != name) {
        ctx.fail("weeding report stage " + std::to_string(stage_pos) + " is '" + stage.name +
                 "', expected '" + name + "'");
        return false;
    }
    if (stage.surviving != recomputed) {
        ctx.fail(std::string("weeding report stage '") + name + "' does not match the evidence");
        return false;
    }
    return true;
}

// Replays duplicate resolution exactly as the tally does.
std::vector<size_t> replay_dedup(size_t n, const std::function<size_t(size_t)>& group_of,
                                 DuplicatePolicy policy) {
    return detail::dedup_select(n, group_of, policy);
}

struct MixExpectation {
    std::string target;
    size_t lists = 0;
};

// ------------------------------------------------------------- quadratic

void audit_quadratic(Ctx& ctx) {
    uint64_t rejected = 0;
    std::vector<ClassicalBallot> valid;
    std::map<uint64_t, const ClassicalBallot*> by_index;
    for (const BoardEntry* e : ctx.ballots) {
        ClassicalBallot b;
        json j = parse_or_fail(ctx, *e, "ballot");
        if (j.is_null() ||
            !detail::verify_classical_ballot_payload(ctx.pub.params, ctx.pub.public_key,
                                                     ctx.pub.slate, ctx.ballot_ctx, j, e->index,
                                                     &b)) {
            rejected++;
            continue;
        }
        valid.push_back(std::move(b));
    }
    for (const ClassicalBallot& b : valid) by_index[b.index] = &b;
    std::vector<uint64_t> valid_indices;
    for (const ClassicalBallot& b : valid) valid_indices.push_back(b.index);
    same_stage(ctx, "proof-valid", valid_indices, 0);

    std::vector<ElGamalCiphertext> roll;
    for (const BoardEntry* e : ctx.rolls) {
        json j = parse_or_fail(ctx, *e, "roll");
        if (j.is_null()) return;
        try {
            roll.push_back(serial::ciphertext_from_json(j.at("s")));
        } catch (const std::exception&) {
            ctx.fail("roll entry at index " + std::to_string(e->index) + " malformed");
            return;
        }
    }

    // index the PET evidence
    std::map<std::pair<uint64_t, uint64_t>, PetTranscript> dedup_pets;
    std::map<std::pair<uint64_t, uint64_t>, PetTranscript> roll_pets;
    for (const BoardEntry* e : ctx.pets) {
        json j = parse_or_fail(ctx, *e, "pet");
        if (j.is_null()) return;
        PetTranscript t;
        try {
            t = serial::pet_from_json(j.at("pet"));
        } catch (const std::exception&) {
            ctx.fail("pet payload malformed at index " + std::to_string(e->index));
            return;
        }
        if (!verify_pet(ctx.pub.params, ctx.pub.share_commitments, ctx.pub.threshold, t,
                        ctx.tally_ctx)) {
            ctx.fail("pet transcript fails verification at index " + std::to_string(e->index));
            return;
        }
        std::string stage = j.value("stage", "");
        if (stage == "dedup") {
            dedup_pets[{j.at("left").get<uint64_t>(), j.at("right").get<uint64_t>()}] = t;
        } else if (stage == "roll-match") {
            roll_pets[{j.at("ballot").get<uint64_t>(), j.at("roll").get<uint64_t>()}] = t;
        } else {
            ctx.fail("pet entry with unknown stage at index " + std::to_string(e->index));
            return;
        }
    }

    // step 2 replay
    size_t n = valid.size();
    std::vector<size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<size_t(size_t)> find = [&](size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    size_t used_dedup_pets = 0;
    for (size_t i = 0; i < n; i++) {
        for (size_t j = i + 1; j < n; j++) {
            if (!ctx.canonical && find(i) == find(j)) continue;
            auto it = dedup_pets.find({valid[i].index, valid[j].index});
            if (it == dedup_pets.end()) {
                ctx.fail("missing dedup PET for ballots " + std::to_string(valid[i].index) +
                         "," + std::to_string(valid[j].index));
                return;
            }
            const PetTranscript& t = it->second;
            if (t.input_a != valid[i].e2 || t.input_b != valid[j].e2) {
                ctx.fail("dedup PET inputs do not match board ballots " +
                         std::to_string(valid[i].index) + "," + std::to_string(valid[j].index));
                return;
            }
            used_dedup_pets++;
            if (t.verdict) parent[find(i)] = find(j);
        }
    }
    if (used_dedup_pets != dedup_pets.size()) {
        ctx.fail("unexpected extra dedup PET evidence");
        return;
    }
    std::vector<size_t> kept = replay_dedup(
        n, [&](size_t i) { return find(i); }, ctx.pub.duplicate_policy);
    std::vector<ClassicalBallot> weeded;
    std::vector<uint64_t> weeded_indices;
    for (size_t i : kept) {
        weeded.push_back(valid[i]);
        weeded_indices.push_back(valid[i].index);
    }
    same_stage(ctx, "dedup", weeded_indices, 1);

    // step 3/4 mixes
    if (ctx.mixes.size() != 2) {
        ctx.fail("expected two mix entries, found " + std::to_string(ctx.mixes.size()));
        return;
    }
    json jm0 = parse_or_fail(ctx, *ctx.mixes[0], "mix");
    json jm1 = parse_or_fail(ctx, *ctx.mixes[1], "mix");
    if (jm0.is_null() || jm1.is_null()) return;
    if (jm0.value("target", "") != "ballots" || jm1.value("target", "") != "roll") {
        ctx.fail("mix entries have unexpected targets");
        return;
    }
    ElGamalMixBatch ballot_mix;
    ElGamalMixBatch roll_mix;
    try {
        ballot_mix = serial::elgamal_mix_from_json(jm0.at("batch"));
        roll_mix = serial::elgamal_mix_from_json(jm1.at("batch"));
    } catch (const std::exception&) {
        ctx.fail("mix batch malformed");
        return;
    }
    CipherLists expected_pair(2);
    for (const ClassicalBallot& b : weeded) {
        expected_pair[0].push_back(b.e1);
        expected_pair[1].push_back(b.e2);
    }
    if (ballot_mix.input != expected_pair) {
        ctx.fail("ballot mix input does not match the weeded ballots");
        return;
    }
    if (roll_mix.input != CipherLists{roll}) {
        ctx.fail("roll mix input does not match the posted roll");
        return;
    }
    if (ballot_mix.servers.size() != ctx.pub.mix_servers ||
        roll_mix.servers.size() != ctx.pub.mix_servers ||
        ballot_mix.shadow_rounds != ctx.pub.shadow_rounds ||
        roll_mix.shadow_rounds != ctx.pub.shadow_rounds) {
        ctx.fail("mix batch shape does not match the election parameters");
        return;
    }
    if (!verify_elgamal_mix(ctx.pub.params, ctx.pub.public_key, ballot_mix)) {
        ctx.fail("ballot mix fails verification");
        return;
    }
    if (!verify_elgamal_mix(ctx.pub.params, ctx.pub.public_key, roll_mix)) {
        ctx.fail("roll mix fails verification");
        return;
    }
    const std::vector<ElGamalCiphertext>& mixed_votes = ballot_mix.servers.back().output[0];
    const std::vector<ElGamalCiphertext>& mixed_creds = ballot_mix.servers.back().output[1];
    const std::vector<ElGamalCiphertext>& mixed_roll = roll_mix.servers.back().output[0];

    // step 4 replay
    size_t n2 = mixed_creds.size();
    size_t rolln = mixed_roll.size();
    std::vector<bool> roll_used(rolln, false);
    std::vector<uint64_t> surviving;
    size_t used_roll_pets = 0;
    auto need_pet = [&](size_t bi, size_t rj, bool* verdict) -> bool {
        auto it = roll_pets.find({bi, rj});
        if (it == roll_pets.end()) {
            ctx.fail("missing roll-match PET for positions " + std::to_string(bi) + "," +
                     std::to_string(rj));
            return false;
        }
        const PetTranscript& t = it->second;
        if (t.input_a != mixed_creds[bi] || t.input_b != mixed_roll[rj]) {
            ctx.fail("roll-match PET inputs do not match the mixed lists at " +
                     std::to_string(bi) + "," + std::to_string(rj));
            return false;
        }
        used_roll_pets++;
        *verdict = t.verdict;
        return true;
    };
    if (ctx.canonical) {
        std::vector<std::vector<bool>> match(n2, std::vector<bool>(rolln, false));
        for (size_t bi = 0; bi < n2; bi++) {
            for (size_t rj = 0; rj < rolln; rj++) {
                bool verdict = false;
                if (!need_pet(bi, rj, &verdict)) return;
                match[bi][rj] = verdict;
            }
        }
        for (size_t bi = 0; bi < n2; bi++) {
            for (size_t rj = 0; rj < rolln; rj++) {
                if (match[bi][rj] && !roll_used[rj]) {
                    roll_used[rj] = true;
                    surviving.push_back(bi);
                    break;
                }
            }
        }
    } else {
        for (size_t bi = 0; bi < n2; bi++) {
            for (size_t rj = 0; rj < rolln; rj++) {
                if (roll_used[rj]) continue;
                bool verdict = false;
                if (!need_pet(bi, rj, &verdict)) return;
                if (verdict) {
                    roll_used[rj] = true;
                    surviving.push_back(bi);
                    break;
                }
            }
        }
    }
    if (used_roll_pets != roll_pets.size()) {
        ctx.fail("unexpected extra roll-match PET evidence");
        return;
    }
    same_stage(ctx, "roll-match", surviving, 2);

    // step 5 decryptions and the recount
    std::map<uint64_t, detail::DecryptionEvidence> votes;
    for (const BoardEntry* e : ctx.decryptions) {
        json j = parse_or_fail(ctx, *e, "decryption");
        if (j.is_null()) return;
        if (j.value("type", "") != "vote-decryption") continue;
        try {
            votes[j.at("position").get<uint64_t>()] =
                detail::decryption_evidence_from_json(j.at("evidence"));
        } catch (const std::exception&) {
            ctx.fail("vote decryption malformed at index " + std::to_string(e->index));
            return;
        }
    }
    if (votes.size() != surviving.size()) {
        ctx.fail("vote decryption count does not match the surviving set");
        return;
    }
    std::vector<uint64_t> recount(ctx.pub.slate.size(), 0);
    uint64_t spoiled = 0;
    for (uint64_t pos : surviving) {
        auto it = votes.find(pos);
        if (it == votes.end()) {
            ctx.fail("missing vote decryption for position " + std::to_string(pos));
            return;
        }
        const detail::DecryptionEvidence& ev = it->second;
        if (ev.ct != mixed_votes[pos]) {
            ctx.fail("vote decryption ciphertext mismatch at position " + std::to_string(pos));
            return;
        }
        if (!detail::verify_decryption_evidence(ctx.pub.params, ctx.pub.share_commitments,
                                                ctx.pub.threshold, ev, ctx.tally_ctx)) {
            ctx.fail("vote decryption evidence fails at position " + std::to_string(pos));
            return;
        }
        size_t cand = detail::candidate_of(ctx.pub.slate, ev.plaintext);
        if (cand < recount.size()) {
            recount[cand]++;
        } else {
            spoiled++;
        }
    }
    ctx.rep.recomputed_tally = recount;

    // posted result must match the recomputation
    OpCounters posted = detail::counters_from_json(ctx.result_payload.at("counters"));
    uint64_t expected_pets = dedup_pets.size() + roll_pets.size();
    if (posted.pet_count != expected_pets) ctx.fail("posted pet_count mismatch");
    if (posted.hash_eval_count != 0) ctx.fail("posted hash_eval_count mismatch");
    if (posted.mix_count != 2ull * ctx.pub.mix_servers) ctx.fail("posted mix_count mismatch");
    if (posted.decrypt_count != expected_pets + surviving.size()) {
        ctx.fail("posted decrypt_count mismatch");
    }
    if (ctx.canonical &&
        expected_pets != n * (n - 1) / 2 + n2 * rolln) {
        ctx.fail("canonical PET count does not match the closed form");
    }
    if (ctx.result_payload.at("tally").get<std::vector<uint64_t>>() != recount) {
        ctx.fail("posted tally does not match the recomputed tally");
    }
    if (ctx.result_payload.at("proof_rejected").get<uint64_t>() != rejected) {
        ctx.fail("posted proof_rejected mismatch");
    }
    if (ctx.result_payload.at("duplicates_removed").get<uint64_t>() != n - weeded.size()) {
        ctx.fail("posted duplicates_removed mismatch");
    }
    if (ctx.result_payload.at("invalid_credential_removed").get<uint64_t>() !=
        n2 - surviving.size()) {
        ctx.fail("posted invalid_credential_removed mismatch");
    }
    if (ctx.result_payload.at("spoiled").get<uint64_t>() != spoiled) {
        ctx.fail("posted spoiled count mismatch");
    }
}

// ---------------------------------------------------------------- linear

struct HashPostRow {
    FheCiphertext digest_ct;
    OracleRecord eval;
    OracleRecord decrypt;
    std::string digest;
};

bool parse_hash_post(Ctx& ctx, const json& j, HashPostRow* out) {
    try {
        out->digest_ct = serial::fhe_ciphertext_from_json(j.at("digest_ct"));
        out->eval = serial::oracle_record_from_json(j.at("eval"));
        out->decrypt = serial::oracle_record_from_json(j.at("decrypt"));
        out->digest = j.at("digest").get<std::string>();
        return true;
    } catch (const std::exception&) {
        ctx.fail("hash-post payload malformed");
        return false;
    }
}

bool check_hash_row(Ctx& ctx, const HashPostRow& row, const FheCiphertext& credential,
                    uint32_t key_id, const std::string& where) {
    const Bigint& okey = *ctx.pub.oracle_key;
    ByteWriter kw;
    kw.u32be(key_id);
    bool ok = row.eval.op == "eval-hash" && row.eval.inputs.size() == 1 &&
              row.eval.inputs[0] == fhe_ct_digest(credential) && row.eval.outputs.size() == 1 &&
              row.eval.outputs[0] == fhe_ct_digest(row.digest_ct) && row.eval.result == kw.bytes() &&
              verify_oracle_record(ctx.pub.params, okey, row.eval);
    if (!ok) {
        ctx.fail("keyed-hash evaluation record fails at " + where);
        return false;
    }
    std::set<unsigned> distinct(row.decrypt.approvals.begin(), row.decrypt.approvals.end());
    ok = row.decrypt.op == "decrypt" && row.decrypt.inputs.size() == 1 &&
         row.decrypt.inputs[0] == fhe_ct_digest(row.digest_ct) &&
         hex_encode(row.decrypt.result) == row.digest && distinct.size() >= ctx.pub.threshold &&
         verify_oracle_record(ctx.pub.params, okey, row.decrypt);
    if (!ok) {
        ctx.fail("digest decryption record fails at " + where);
        return false;
    }
    return true;
}

void audit_linear(Ctx& ctx) {
    if (!ctx.pub.oracle_key) {
        ctx.fail("linear transcript without an oracle key");
        return;
    }
    const Bigint& okey = *ctx.pub.oracle_key;

    uint64_t rejected = 0;
    std::vector<FheBallot> valid;
    for (const BoardEntry* e : ctx.ballots) {
        FheBallot b;
        json j = parse_or_fail(ctx, *e, "ballot");
        if (j.is_null() ||
            !detail::verify_fhe_ballot_payload(ctx.pub.params, okey, ctx.pub.election_id, j,
                                               e->index, &b)) {
            rejected++;
            continue;
        }
        valid.push_back(std::move(b));
    }
    std::vector<uint64_t> valid_indices;
    for (const FheBallot& b : valid) valid_indices.push_back(b.index);
    same_stage(ctx, "proof-valid", valid_indices, 0);
    size_t stage_cursor = 1;

    // group the hash-post entries by type
    std::vector<std::pair<const BoardEntry*, json>> hash_rows;
    std::map<int, uint32_t> stage_keys;
    std::vector<std::pair<uint64_t, json>> eligibility_rows;
    for (const BoardEntry* e : ctx.hash_posts) {
        json j = parse_or_fail(ctx, *e, "hash-post");
        if (j.is_null()) return;
        std::string type = j.value("type", "");
        if (type == "hash-key") {
            stage_keys[j.at("stage").get<int>()] = j.at("key_id").get<uint32_t>();
        } else if (type == "hash-post") {
            hash_rows.emplace_back(e, std::move(j));
        } else if (type == "eligibility") {
            eligibility_rows.emplace_back(j.at("ballot").get<uint64_t>(), std::move(j));
        } else {
            ctx.fail("unknown hash-post type at index " + std::to_string(e->index));
            return;
        }
    }

    // eligibility weeding replay
    if (ctx.pub.eligibility_mode) {
        std::map<uint64_t, const json*> rows;
        for (const auto& [idx, j] : eligibility_rows) rows[idx] = &j;
        std::vector<FheBallot> retained;
        std::vector<uint64_t> retained_indices;
        for (const FheBallot& b : valid) {
            auto it = rows.find(b.index);
            if (it == rows.end()) {
                ctx.fail("missing eligibility row for ballot " + std::to_string(b.index));
                return;
            }
            const json& j = *it->second;
            bool verdict = j.at("verdict").get<bool>();
            if (j.at("eq").is_null()) {
                if (b.has_preimage) {
                    ctx.fail("eligibility row skips a ballot that carries a preimage");
                    return;
                }
                if (verdict) {
                    ctx.fail("eligibility verdict true without a preimage check");
                    return;
                }
                continue;
            }
            OracleRecord eq;
            OracleRecord dec;
            FheCiphertext eq_ct;
            try {
                eq = serial::oracle_record_from_json(j.at("eq"));
                dec = serial::oracle_record_from_json(j.at("decrypt"));
                eq_ct = serial::fhe_ciphertext_from_json(j.at("eq_ct"));
            } catch (const std::exception&) {
                ctx.fail("eligibility row malformed for ballot " + std::to_string(b.index));
                return;
            }
            bool ok = eq.op == "preimage-eq" && eq.inputs.size() == 2 && b.has_preimage &&
                      eq.inputs[0] == fhe_ct_digest(b.preimage) &&
                      eq.inputs[1] == fhe_ct_digest(b.e2) && eq.outputs.size() == 1 &&
                      eq.outputs[0] == fhe_ct_digest(eq_ct) &&
                      verify_oracle_record(ctx.pub.params, okey, eq);
            if (!ok) {
                ctx.fail("eligibility equality record fails for ballot " + std::to_string(b.index));
                return;
            }
            ok = dec.op == "decrypt" && dec.inputs.size() == 1 &&
                 dec.inputs[0] == fhe_ct_digest(eq_ct) &&
                 dec.result == Bytes{static_cast<uint8_t>(verdict ? 1 : 0)} &&
                 verify_oracle_record(ctx.pub.params, okey, dec);
            if (!ok) {
                ctx.fail("eligibility decryption record fails for ballot " +
                         std::to_string(b.index));
                return;
            }
            if (verdict) {
                retained.push_back(b);
                retained_indices.push_back(b.index);
            }
        }
        if (!same_stage(ctx, "eligibility", retained_indices, stage_cursor++)) return;
        valid = std::move(retained);
    }

    if (!stage_keys.count(1) || !stage_keys.count(2) || stage_keys[1] == stage_keys[2]) {
        ctx.fail("stage hash keys missing or not fresh per stage");
        return;
    }

    // stage-1 rows in ballot order
    std::map<uint64_t, const json*> stage1_rows;
    std::vector<std::pair<std::string, const json*>> stage2_ballot_rows;
    std::vector<std::pair<std::string, const json*>> stage2_roll_rows;
    for (const auto& [e, j] : hash_rows) {
        if (j.at("stage").get<int>() == 1) {
            stage1_rows[j.at("ballot").get<uint64_t>()] = &j;
        } else {
            const std::string side = j.at("side").get<std::string>();
            if (side == "ballot") {
                stage2_ballot_rows.emplace_back(side, &j);
            } else {
                stage2_roll_rows.emplace_back(side, &j);
            }
        }
    }
    if (stage1_rows.size() != valid.size()) {
        ctx.fail("stage-1 hash rows do not cover the valid ballots exactly");
        return;
    }
    std::vector<std::string> digests;
    for (const FheBallot& b : valid) {
        auto it = stage1_rows.find(b.index);
        if (it == stage1_rows.end()) {
            ctx.fail("missing stage-1 hash row for ballot " + std::to_string(b.index));
            return;
        }
        HashPostRow row;
        if (!parse_hash_post(ctx, *it->second, &row)) return;
        if (!check_hash_row(ctx, row, b.e2, stage_keys[1],
                            "stage-1 ballot " + std::to_string(b.index))) {
            return;
        }
        digests.push_back(row.digest);
    }

    std::map<std::string, size_t> digest_group;
    for (const std::string& d : digests) digest_group.emplace(d, digest_group.size());
    std::vector<size_t> kept = replay_dedup(
        valid.size(), [&](size_t i) { return digest_group.at(digests[i]); },
        ctx.pub.duplicate_policy);
    std::vector<FheBallot> weeded;
    std::vector<uint64_t> weeded_indices;
    for (size_t i : kept) {
        weeded.push_back(valid[i]);
        weeded_indices.push_back(valid[i].index);
    }
    if (!same_stage(ctx, "dedup", weeded_indices, stage_cursor++)) return;

    // mixes
    if (ctx.mixes.size() != 2) {
        ctx.fail("expected two mix entries, found " + std::to_string(ctx.mixes.size()));
        return;
    }
    json jm0 = parse_or_fail(ctx, *ctx.mixes[0], "mix");
    json jm1 = parse_or_fail(ctx, *ctx.mixes[1], "mix");
    if (jm0.is_null() || jm1.is_null()) return;
    if (jm0.value("target", "") != "ballots" || jm1.value("target", "") != "roll") {
        ctx.fail("mix entries have unexpected targets");
        return;
    }
    FheMixBatch ballot_mix;
    FheMixBatch roll_mix;
    try {
        ballot_mix = serial::fhe_mix_from_json(jm0.at("batch"));
        roll_mix = serial::fhe_mix_from_json(jm1.at("batch"));
    } catch (const std::exception&) {
        ctx.fail("mix batch malformed");
        return;
    }
    FheLists expected_pair(2);
    for (const FheBallot& b : weeded) {
        expected_pair[0].push_back(b.e1);
        expected_pair[1].push_back(b.e2);
    }
    std::vector<FheCiphertext> roll;
    for (const BoardEntry* e : ctx.rolls) {
        json j = parse_or_fail(ctx, *e, "roll");
        if (j.is_null()) return;
        try {
            roll.push_back(serial::fhe_ciphertext_from_json(j.at("s")));
        } catch (const std::exception&) {
            ctx.fail("roll entry at index " + std::to_string(e->index) + " malformed");
            return;
        }
    }
    if (ballot_mix.input != expected_pair) {
        ctx.fail("ballot mix input does not match the weeded ballots");
        return;
    }
    if (roll_mix.input != FheLists{roll}) {
        ctx.fail("roll mix input does not match the posted roll");
        return;
    }
    if (ballot_mix.servers.size() != ctx.pub.mix_servers ||
        roll_mix.servers.size() != ctx.pub.mix_servers ||
        ballot_mix.shadow_rounds != ctx.pub.shadow_rounds ||
        roll_mix.shadow_rounds != ctx.pub.shadow_rounds) {
        ctx.fail("mix batch shape does not match the election parameters");
        return;
    }
    if (!verify_fhe_mix(ctx.pub.params, okey, ballot_mix)) {
        ctx.fail("ballot mix fails verification");
        return;
    }
    if (!verify_fhe_mix(ctx.pub.params, okey, roll_mix)) {
        ctx.fail("roll mix fails verification");
        return;
    }
    const std::vector<FheCiphertext>& mixed_votes = ballot_mix.servers.back().output[0];
    const std::vector<FheCiphertext>& mixed_creds = ballot_mix.servers.back().output[1];
    const std::vector<FheCiphertext>& mixed_roll = roll_mix.servers.back().output[0];

    // stage-2 rows
    auto check_stage2 = [&](const std::vector<std::pair<std::string, const json*>>& rows,
                            const std::vector<FheCiphertext>& list, const char* side,
                            std::vector<std::string>* out) -> bool {
        if (rows.size() != list.size()) {
            ctx.fail(std::string("stage-2 ") + side + " rows do not cover the mixed list");
            return false;
        }
        std::map<uint64_t, const json*> by_pos;
        for (const auto& [s, j] : rows) by_pos[j->at("position").get<uint64_t>()] = j;
        for (size_t i = 0; i < list.size(); i++) {
            auto it = by_pos.find(i);
            if (it == by_pos.end()) {
                ctx.fail(std::string("missing stage-2 row for ") + side + " position " +
                         std::to_string(i));
                return false;
            }
            HashPostRow row;
            if (!parse_hash_post(ctx, *it->second, &row)) return false;
            if (!check_hash_row(ctx, row, list[i], stage_keys[2],
                                std::string("stage-2 ") + side + " " + std::to_string(i))) {
                return false;
            }
            out->push_back(row.digest);
        }
        return true;
    };
    std::vector<std::string> ballot_digests;
    std::vector<std::string> roll_digests;
    if (!check_stage2(stage2_ballot_rows, mixed_creds, "ballot", &ballot_digests)) return;
    if (!check_stage2(stage2_roll_rows, mixed_roll, "roll", &roll_digests)) return;

    std::map<std::string, std::vector<size_t>> roll_available;
    for (size_t j = 0; j < roll_digests.size(); j++) roll_available[roll_digests[j]].push_back(j);
    std::vector<uint64_t> surviving;
    for (size_t i = 0; i < ballot_digests.size(); i++) {
        auto it = roll_available.find(ballot_digests[i]);
        if (it != roll_available.end() && !it->second.empty()) {
            it->second.erase(it->second.begin());
            surviving.push_back(i);
        }
    }
    if (!same_stage(ctx, "roll-match", surviving, stage_cursor++)) return;

    // vote decryptions and recount
    std::map<uint64_t, json> votes;
    for (const BoardEntry* e : ctx.decryptions) {
        json j = parse_or_fail(ctx, *e, "decryption");
        if (j.is_null()) return;
        if (j.value("type", "") != "vote-decryption") continue;
        votes[j.at("position").get<uint64_t>()] = std::move(j);
    }
    if (votes.size() != surviving.size()) {
        ctx.fail("vote decryption count does not match the surviving set");
        return;
    }
    std::vector<uint64_t> recount(ctx.pub.slate_fhe.size(), 0);
    uint64_t spoiled = 0;
    for (uint64_t pos : surviving) {
        auto it = votes.find(pos);
        if (it == votes.end()) {
            ctx.fail("missing vote decryption for position " + std::to_string(pos));
            return;
        }
        FheCiphertext vote_ct;
        OracleRecord dec;
        Bytes plaintext;
        try {
            vote_ct = serial::fhe_ciphertext_from_json(it->second.at("vote_ct"));
            dec = serial::oracle_record_from_json(it->second.at("decrypt"));
            plaintext = base64_decode(it->second.at("plaintext").get<std::string>());
        } catch (const std::exception&) {
            ctx.fail("vote decryption malformed at position " + std::to_string(pos));
            return;
        }
        std::set<unsigned> distinct(dec.approvals.begin(), dec.approvals.end());
        bool ok = vote_ct == mixed_votes[pos] && dec.op == "decrypt" && dec.inputs.size() == 1 &&
                  dec.inputs[0] == fhe_ct_digest(vote_ct) && dec.result == plaintext &&
                  distinct.size() >= ctx.pub.threshold &&
                  verify_oracle_record(ctx.pub.params, okey, dec);
        if (!ok) {
            ctx.fail("vote decryption fails at position " + std::to_string(pos));
            return;
        }
        size_t cand = detail::candidate_of_bytes(ctx.pub.slate_fhe, plaintext);
        if (cand < recount.size()) {
            recount[cand]++;
        } else {
            spoiled++;
        }
    }
    ctx.rep.recomputed_tally = recount;

    OpCounters posted = detail::counters_from_json(ctx.result_payload.at("counters"));
    uint64_t expected_hashes = stage1_rows.size() + ballot_digests.size() + roll_digests.size();
    if (posted.pet_count != 0) ctx.fail("posted pet_count mismatch");
    if (posted.hash_eval_count != expected_hashes) ctx.fail("posted hash_eval_count mismatch");
    if (posted.mix_count != 2ull * ctx.pub.mix_servers) ctx.fail("posted mix_count mismatch");
    if (ctx.result_payload.at("tally").get<std::vector<uint64_t>>() != recount) {
        ctx.fail("posted tally does not match the recomputed tally");
    }
    if (ctx.result_payload.at("proof_rejected").get<uint64_t>() != rejected) {
        ctx.fail("posted proof_rejected mismatch");
    }
    if (ctx.result_payload.at("duplicates_removed").get<uint64_t>() !=
        digests.size() - weeded.size()) {
        ctx.fail("posted duplicates_removed mismatch");
    }
    if (ctx.result_payload.at("invalid_credential_removed").get<uint64_t>() !=
        ballot_digests.size() - surviving.size()) {
        ctx.fail("posted invalid_credential_removed mismatch");
    }
    if (ctx.result_payload.at("spoiled").get<uint64_t>() != spoiled) {
        ctx.fail("posted spoiled count mismatch");
    }
}

// ----------------------------------------------------------- smith-weber

void audit_smith_weber(Ctx& ctx) {
    uint64_t rejected = 0;
    std::vector<ClassicalBallot> valid;
    for (const BoardEntry* e : ctx.ballots) {
        ClassicalBallot b;
        json j = parse_or_fail(ctx, *e, "ballot");
        if (j.is_null() ||
            !detail::verify_classical_ballot_payload(ctx.pub.params, ctx.pub.public_key,
                                                     ctx.pub.slate, ctx.ballot_ctx, j, e->index,
                                                     &b)) {
            rejected++;
            continue;
        }
        valid.push_back(std::move(b));
    }
    std::vector<uint64_t> valid_indices;
    for (const ClassicalBallot& b : valid) valid_indices.push_back(b.index);
    same_stage(ctx, "proof-valid", valid_indices, 0);

    std::vector<ElGamalCiphertext> roll;
    for (const BoardEntry* e : ctx.rolls) {
        json j = parse_or_fail(ctx, *e, "roll");
        if (j.is_null()) return;
        try {
            roll.push_back(serial::ciphertext_from_json(j.at("s")));
        } catch (const std::exception&) {
            ctx.fail("roll entry at index " + std::to_string(e->index) + " malformed");
            return;
        }
    }

    // blinded-credential chains
    std::map<std::pair<std::string, uint64_t>, json> blind_rows;
    std::map<uint64_t, json> votes;
    for (const BoardEntry* e : ctx.decryptions) {
        json j = parse_or_fail(ctx, *e, "decryption");
        if (j.is_null()) return;
        std::string type = j.value("type", "");
        if (type == "blinded-credential") {
            blind_rows[{j.at("target").get<std::string>(), j.at("ref").get<uint64_t>()}] =
                std::move(j);
        } else if (type == "vote-decryption") {
            votes[j.at("position").get<uint64_t>()] = std::move(j);
        }
    }

    auto check_chain = [&](const ElGamalCiphertext& base, const std::string& target, uint64_t ref,
                           Bigint* blinded) -> bool {
        auto it = blind_rows.find({target, ref});
        if (it == blind_rows.end()) {
            ctx.fail("missing blinded credential for " + target + " " + std::to_string(ref));
            return false;
        }
        const json& j = it->second;
        ElGamalCiphertext current = base;
        try {
            const json& chain = j.at("chain");
            if (chain.size() != ctx.pub.tallier_count) {
                ctx.fail("blinding chain has wrong length for " + target + " " +
                         std::to_string(ref));
                return false;
            }
            for (const auto& link : chain) {
                ElGamalCiphertext next = serial::ciphertext_from_json(link.at("ct"));
                LinearProof proof = serial::linear_proof_from_json(link.at("proof"));
                if (!verify_linear(ctx.pub.params, exponent_consistency_statement(current, next),
                                   proof, ctx.tally_ctx)) {
                    ctx.fail("blinding chain proof fails for " + target + " " +
                             std::to_string(ref));
                    return false;
                }
                current = next;
            }
            detail::DecryptionEvidence ev =
                detail::decryption_evidence_from_json(j.at("evidence"));
            if (ev.ct != current) {
                ctx.fail("blinded decryption input mismatch for " + target + " " +
                         std::to_string(ref));
                return false;
            }
            if (!detail::verify_decryption_evidence(ctx.pub.params, ctx.pub.share_commitments,
                                                    ctx.pub.threshold, ev, ctx.tally_ctx)) {
                ctx.fail("blinded decryption evidence fails for " + target + " " +
                         std::to_string(ref));
                return false;
            }
            *blinded = ev.plaintext;
            return true;
        } catch (const std::exception&) {
            ctx.fail("blinded credential row malformed for " + target + " " + std::to_string(ref));
            return false;
        }
    };

    std::vector<std::string> keys;
    for (const ClassicalBallot& b : valid) {
        Bigint blinded;
        if (!check_chain(b.e2, "ballot", b.index, &blinded)) return;
        keys.push_back(int_to_hex(blinded));
    }
    std::vector<std::string> roll_keys;
    for (size_t j = 0; j < roll.size(); j++) {
        Bigint blinded;
        if (!check_chain(roll[j], "roll", j, &blinded)) return;
        roll_keys.push_back(int_to_hex(blinded));
    }
    if (blind_rows.size() != valid.size() + roll.size()) {
        ctx.fail("unexpected extra blinded-credential evidence");
        return;
    }

    std::map<std::string, size_t> blinded_group;
    for (const std::string& k : keys) blinded_group.emplace(k, blinded_group.size());
    std::vector<size_t> kept = replay_dedup(
        valid.size(), [&](size_t i) { return blinded_group.at(keys[i]); },
        ctx.pub.duplicate_policy);
    std::vector<ClassicalBallot> weeded;
    std::vector<std::string> weeded_keys;
    std::vector<uint64_t> weeded_indices;
    for (size_t i : kept) {
        weeded.push_back(valid[i]);
        weeded_keys.push_back(keys[i]);
        weeded_indices.push_back(valid[i].index);
    }
    same_stage(ctx, "dedup", weeded_indices, 1);

    std::map<std::string, std::vector<size_t>> roll_available;
    for (size_t j = 0; j < roll_keys.size(); j++) roll_available[roll_keys[j]].push_back(j);
    std::vector<ClassicalBallot> matched;
    std::vector<uint64_t> matched_indices;
    for (size_t i = 0; i < weeded.size(); i++) {
        auto it = roll_available.find(weeded_keys[i]);
        if (it != roll_available.end() && !it->second.empty()) {
            it->second.erase(it->second.begin());
            matched.push_back(weeded[i]);
            matched_indices.push_back(weeded[i].index);
        }
    }
    same_stage(ctx, "roll-match", matched_indices, 2);

    // vote mix
    if (ctx.mixes.size() != 1) {
        ctx.fail("expected one mix entry, found " + std::to_string(ctx.mixes.size()));
        return;
    }
    json jm = parse_or_fail(ctx, *ctx.mixes[0], "mix");
    if (jm.is_null()) return;
    if (jm.value("target", "") != "votes") {
        ctx.fail("mix entry has unexpected target");
        return;
    }
    ElGamalMixBatch vote_mix;
    try {
        vote_mix = serial::elgamal_mix_from_json(jm.at("batch"));
    } catch (const std::exception&) {
        ctx.fail("mix batch malformed");
        return;
    }
    CipherLists expected(1);
    for (const ClassicalBallot& b : matched) expected[0].push_back(b.e1);
    if (vote_mix.input != expected) {
        ctx.fail("vote mix input does not match the matched ballots");
        return;
    }
    if (vote_mix.servers.size() != ctx.pub.mix_servers ||
        vote_mix.shadow_rounds != ctx.pub.shadow_rounds) {
        ctx.fail("mix batch shape does not match the election parameters");
        return;
    }
    if (!verify_elgamal_mix(ctx.pub.params, ctx.pub.public_key, vote_mix)) {
        ctx.fail("vote mix fails verification");
        return;
    }
    const std::vector<ElGamalCiphertext>& mixed_votes = vote_mix.servers.back().output[0];

    if (votes.size() != mixed_votes.size()) {
        ctx.fail("vote decryption count does not match the mixed votes");
        return;
    }
    std::vector<uint64_t> recount(ctx.pub.slate.size(), 0);
    uint64_t spoiled = 0;
    for (size_t pos = 0; pos < mixed_votes.size(); pos++) {
        auto it = votes.find(pos);
        if (it == votes.end()) {
            ctx.fail("missing vote decryption for position " + std::to_string(pos));
            return;
        }
        detail::DecryptionEvidence ev;
        try {
            ev = detail::decryption_evidence_from_json(it->second.at("evidence"));
        } catch (const std::exception&) {
            ctx.fail("vote decryption malformed at position " + std::to_string(pos));
            return;
        }
        if (ev.ct != mixed_votes[pos]) {
            ctx.fail("vote decryption ciphertext mismatch at position " + std::to_string(pos));
            return;
        }
        if (!detail::verify_decryption_evidence(ctx.pub.params, ctx.pub.share_commitments,
                                                ctx.pub.threshold, ev, ctx.tally_ctx)) {
            ctx.fail("vote decryption evidence fails at position " + std::to_string(pos));
            return;
        }
        size_t cand = detail::candidate_of(ctx.pub.slate, ev.plaintext);
        if (cand < recount.size()) {
            recount[cand]++;
        } else {
            spoiled++;
        }
    }
    ctx.rep.recomputed_tally = recount;

    OpCounters posted = detail::counters_from_json(ctx.result_payload.at("counters"));
    if (posted.pet_count != 0) ctx.fail("posted pet_count mismatch");
    if (posted.hash_eval_count != 0) ctx.fail("posted hash_eval_count mismatch");
    if (posted.mix_count != ctx.pub.mix_servers) ctx.fail("posted mix_count mismatch");
    if (posted.decrypt_count != valid.size() + roll.size() + mixed_votes.size()) {
        ctx.fail("posted decrypt_count mismatch");
    }
    if (ctx.result_payload.at("tally").get<std::vector<uint64_t>>() != recount) {
        ctx.fail("posted tally does not match the recomputed tally");
    }
    if (ctx.result_payload.at("proof_rejected").get<uint64_t>() != rejected) {
        ctx.fail("posted proof_rejected mismatch");
    }
    if (ctx.result_payload.at("duplicates_removed").get<uint64_t>() !=
        valid.size() - weeded.size()) {
        ctx.fail("posted duplicates_removed mismatch");
    }
    if (ctx.result_payload.at("invalid_credential_removed").get<uint64_t>() !=
        weeded.size() - matched.size()) {
        ctx.fail("posted invalid_credential_removed mismatch");
    }
    if (ctx.result_payload.at("spoiled").get<uint64_t>() != spoiled) {
        ctx.fail("posted spoiled count mismatch");
    }
}

}  // namespace

AuditReport audit_transcript(const std::vector<BoardEntry>& entries) {
    AuditReport rep;
    if (entries.empty() || entries[0].kind != EntryKind::param) {
        rep.failures.push_back("transcript does not start with a param entry");
        return rep;
    }
    PublicElection pub;
    try {
        pub = parse_param_payload(entries[0].payload);
    } catch (const std::exception& ex) {
        rep.failures.push_back(std::string("param payload unparsable: ") + ex.what());
        return rep;
    }
    std::string why;
    if (!validate_params(pub.params, &why)) {
        rep.failures.push_back("group parameters invalid: " + why);
        return rep;
    }

    Ctx ctx{entries, std::move(pub), rep, {}, {}};
    ctx.ballot_ctx = {ctx.pub.election_id, "ballot"};
    ctx.tally_ctx = {ctx.pub.election_id, "tally"};

    ChainCheck chain = verify_chain(ctx.pub.params, entries, ctx.pub.author_keys);
    if (!chain.ok) {
        ctx.fail("chain verification failed at index " + std::to_string(chain.first_bad_index) +
                 ": " + chain.why);
        return rep;
    }

    size_t param_count = 0;
    std::vector<const BoardEntry*> results;
    for (const BoardEntry& e : entries) {
        switch (e.kind) {
            case EntryKind::param: param_count++; break;
            case EntryKind::roll: ctx.rolls.push_back(&e); break;
            case EntryKind::ballot: ctx.ballots.push_back(&e); break;
            case EntryKind::pet: ctx.pets.push_back(&e); break;
            case EntryKind::mix: ctx.mixes.push_back(&e); break;
            case EntryKind::hash_post: ctx.hash_posts.push_back(&e); break;
            case EntryKind::decryption: ctx.decryptions.push_back(&e); break;
            case EntryKind::result: results.push_back(&e); break;
        }
    }
    if (param_count != 1) {
        ctx.fail("expected exactly one param entry");
        return rep;
    }
    // phase completeness: the transcript must end with the result entry
    if (results.size() != 1 || results[0]->index != entries.back().index) {
        ctx.fail("transcript must contain exactly one result entry, as the final entry");
        return rep;
    }
    ctx.result_payload = parse_or_fail(ctx, *results[0], "result");
    if (ctx.result_payload.is_null()) return rep;
    if (backend_from_name(ctx.result_payload.value("backend", "")) != ctx.pub.backend) {
        ctx.fail("result backend does not match the election parameters");
        return rep;
    }
    ctx.canonical = ctx.result_payload.value("canonical", true);

    const BoardEntry* report_entry = nullptr;
    for (const BoardEntry* e : ctx.decryptions) {
        json j = parse_or_fail(ctx, *e, "decryption");
        if (j.is_null()) return rep;
        if (j.value("type", "") == "weeding-report") {
            if (report_entry != nullptr) {
                ctx.fail("transcript contains more than one weeding report");
                return rep;
            }
            report_entry = e;
            try {
                ctx.posted_report = detail::report_from_json(j);
            } catch (const std::exception&) {
                ctx.fail("weeding report malformed");
                return rep;
            }
        }
    }
    if (report_entry == nullptr) {
        ctx.fail("transcript lacks a weeding report");
        return rep;
    }
    std::erase(ctx.decryptions, report_entry);

    try {
        switch (ctx.pub.backend) {
            case Backend::quadratic: audit_quadratic(ctx); break;
            case Backend::linear: audit_linear(ctx); break;
            case Backend::smith_weber: audit_smith_weber(ctx); break;
        }
    } catch (const std::exception& ex) {
        ctx.fail(std::string("audit aborted: ") + ex.what());
    }

    rep.ok = rep.failures.empty();
    return rep;
}

}  // namespace jcj
