#include "jcj/protocol.hpp"

#include <algorithm>
#include <fstream>

#include "jcj/serial.hpp"

namespace jcj {

using nlohmann::json;
using serial::payload_bytes;

std::string backend_name(Backend b) {
    switch (b) {
        case Backend::quadratic: return "quadratic";
        case Backend::linear: return "linear";
        case Backend::smith_weber: return "smith_weber";
    }
    throw ConfigError("unknown backend");
}

Backend backend_from_name(const std::string& name) {
    for (Backend b : {Backend::quadratic, Backend::linear, Backend::smith_weber}) {
        if (backend_name(b) == name) return b;
    }
    throw ConfigError("unknown backend: " + name);
}

std::string policy_name(DuplicatePolicy p) {
    return p == DuplicatePolicy::keep_first ? "keep_first" : "keep_last";
}

DuplicatePolicy policy_from_name(const std::string& name) {
    if (name == "keep_first") return DuplicatePolicy::keep_first;
    if (name == "keep_last") return DuplicatePolicy::keep_last;
    throw ConfigError("unknown duplicate_policy: " + name);
}

void ElectionConfig::validate() const {
    if (election_id.empty()) throw ConfigError("election_id must not be empty");
    if (candidates.empty()) throw ConfigError("need at least one candidate");
    for (size_t i = 0; i < candidates.size(); i++) {
        for (size_t j = i + 1; j < candidates.size(); j++) {
            if (candidates[i] == candidates[j]) throw ConfigError("duplicate candidate name");
        }
    }
    if (threshold < 1 || threshold > tallier_count) throw ConfigError("need 1 <= threshold <= talliers");
    if (registrar_count < 1) throw ConfigError("need at least one registrar");
    if (group_bits < 16) throw ConfigError("group_bits must be >= 16");
    if (mix_servers < 1) throw ConfigError("need at least one mix server");
    if (shadow_rounds < 1 || shadow_rounds > 256) throw ConfigError("shadow_rounds in [1,256]");
    if (eligibility_mode && backend != Backend::linear) {
        throw ConfigError("eligibility_mode requires the linear backend");
    }
    if (scenario.stuffed > 0 && !eligibility_mode) {
        throw ConfigError("stuffed ballots require eligibility_mode");
    }
}

ElectionConfig config_from_json(const json& j) {
    ElectionConfig c;
    try {
        c.election_id = to_bytes(j.at("election_id").get<std::string>());
        c.candidates = j.at("candidates").get<std::vector<std::string>>();
        c.threshold = j.at("talliers").at("threshold").get<unsigned>();
        c.tallier_count = j.at("talliers").at("count").get<unsigned>();
        c.registrar_count = j.value("registrars", 1u);
        c.backend = backend_from_name(j.at("backend").get<std::string>());
        c.duplicate_policy = policy_from_name(j.value("duplicate_policy", "keep_last"));
        c.seed = j.at("seed").get<uint64_t>();
        c.group_bits = j.value("group_bits", 64u);
        c.eligibility_mode = j.value("eligibility_mode", false);
        c.mix_servers = j.value("mix_servers", 2u);
        c.shadow_rounds = j.value("shadow_rounds", 16u);
        c.canonical_counts = j.value("canonical_counts", true);
        if (j.contains("scenario")) {
            const json& s = j["scenario"];
            c.scenario.honest = s.value("honest", 0u);
            c.scenario.duplicate = s.value("duplicate", 0u);
            c.scenario.invalid = s.value("invalid", 0u);
            c.scenario.coerced = s.value("coerced", 0u);
            c.scenario.stuffed = s.value("stuffed", 0u);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config schema error: ") + e.what());
    }
    c.validate();
    return c;
}

json config_to_json(const ElectionConfig& c) {
    return json{{"election_id", to_string(c.election_id)},
                {"candidates", c.candidates},
                {"talliers", {{"threshold", c.threshold}, {"count", c.tallier_count}}},
                {"registrars", c.registrar_count},
                {"backend", backend_name(c.backend)},
                {"duplicate_policy", policy_name(c.duplicate_policy)},
                {"seed", c.seed},
                {"group_bits", c.group_bits},
                {"eligibility_mode", c.eligibility_mode},
                {"mix_servers", c.mix_servers},
                {"shadow_rounds", c.shadow_rounds},
                {"canonical_counts", c.canonical_counts},
                {"scenario",
                 {{"honest", c.scenario.honest},
                  {"duplicate", c.scenario.duplicate},
                  {"invalid", c.scenario.invalid},
                  {"coerced", c.scenario.coerced},
                  {"stuffed", c.scenario.stuffed}}}};
}

ElectionConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return config_from_json(j);
}

Election::Election(ElectionConfig config, GroupParams params)
    : config_(std::move(config)),
      params_(std::move(params)),
      rng_(Drbg::from_seed(config_.seed).child(to_string(config_.election_id))) {}

Election Election::setup(const ElectionConfig& config) {
    config.validate();

    ByteWriter seedw;
    seedw.blob(config.election_id);
    seedw.u64be(config.seed);
    GroupParams params = generate_params(config.group_bits, seedw.bytes());

    Election e(config, params);
    Drbg keyrng = e.rng_.child("tallier-keygen");
    e.tallier_key_ = keygen(e.params_, keyrng);
    Drbg dealer = e.rng_.child("dealer");
    e.shares_ = deal_shares(e.params_, e.tallier_key_, config.threshold, config.tallier_count,
                            dealer);

    for (unsigned i = 1; i <= config.registrar_count; i++) {
        Drbg r = e.rng_.child("sign-registrar", i);
        e.author_keys_["registrar:" + std::to_string(i)] = signature_keygen(e.params_, r);
    }
    for (unsigned i = 1; i <= config.tallier_count; i++) {
        Drbg r = e.rng_.child("sign-tallier", i);
        e.author_keys_["tallier:" + std::to_string(i)] = signature_keygen(e.params_, r);
    }

    // Candidate identifiers hashed into the group; a retry counter keeps the
    // encodings distinct even in tiny test groups.
    for (size_t j = 0; j < config.candidates.size(); j++) {
        Bytes name = to_bytes(config.candidates[j]);
        Bigint enc;
        for (uint32_t retry = 0;; retry++) {
            ByteWriter w;
            w.blob(name);
            if (retry > 0) w.u32be(retry);
            enc = hash_to_group(e.params_, "candidate", w.bytes());
            if (std::find(e.slate_.begin(), e.slate_.end(), enc) == e.slate_.end()) break;
        }
        e.slate_.push_back(enc);
        e.slate_fhe_.push_back(name);
    }

    if (config.backend == Backend::linear) {
        e.oracle_ = std::make_unique<FheOracle>(e.params_, config.threshold, config.tallier_count,
                                                e.rng_.child("fhe-oracle"));
    }

    e.board_ = std::make_unique<Board>(e.params_);

    json authors;
    for (const auto& [name, key] : e.author_keys_) authors[name] = int_to_hex(key.public_key);
    json slate = json::array();
    for (const Bigint& s : e.slate_) slate.push_back(int_to_hex(s));
    json slate_fhe = json::array();
    for (const Bytes& s : e.slate_fhe_) slate_fhe.push_back(base64_encode(s));
    json commitments = json::array();
    for (const Bigint& c : e.shares_.commitments) commitments.push_back(int_to_hex(c));

    json param{{"type", "param"},
               {"election_id", base64_encode(config.election_id)},
               {"group", serial::group_to_json(e.params_)},
               {"pk", int_to_hex(e.tallier_key_.h)},
               {"commitments", commitments},
               {"threshold", config.threshold},
               {"tallier_count", config.tallier_count},
               {"candidates", config.candidates},
               {"slate", slate},
               {"slate_fhe", slate_fhe},
               {"backend", backend_name(config.backend)},
               {"duplicate_policy", policy_name(config.duplicate_policy)},
               {"eligibility", config.eligibility_mode},
               {"mix_servers", config.mix_servers},
               {"shadow_rounds", config.shadow_rounds},
               {"authors", authors},
               {"oracle_key", e.oracle_ ? json(int_to_hex(e.oracle_->attestation_key())) : json()}};
    e.board_->append(EntryKind::param, payload_bytes(param), "tallier:1",
                     &e.author_keys_.at("tallier:1"));
    return e;
}

ProofContext Election::proof_context() const { return {config_.election_id, "ballot"}; }

std::vector<unsigned> Election::all_tallier_approvals() const {
    std::vector<unsigned> out;
    for (unsigned i = 1; i <= config_.tallier_count; i++) out.push_back(i);
    return out;
}

std::vector<VoterSecret> Election::register_voters(unsigned count) {
    std::vector<VoterSecret> out;
    out.reserve(count);
    for (unsigned k = 0; k < count; k++) {
        unsigned voter = next_voter_++;
        Drbg vr = rng_.child("credential", voter);
        VoterSecret secret;
        secret.voter = voter;

        json payload{{"type", "roll"}, {"voter", voter}};
        if (config_.backend == Backend::linear) {
            if (config_.eligibility_mode) {
                secret.preimage = vr.bytes(kFheCredentialBytes);
                secret.sigma_fhe = credential_hash(secret.preimage);
            } else {
                secret.sigma_fhe = vr.bytes(kFheCredentialBytes);
            }
            payload["s"] = serial::fhe_ciphertext_to_json(
                oracle_->encrypt(secret.sigma_fhe, FheTag::credential));
        } else {
            secret.sigma_classical = random_element(params_, vr);
            payload["s"] = serial::ciphertext_to_json(
                encrypt(params_, tallier_key_.h, secret.sigma_classical, vr.below(params_.q)));
        }

        std::string registrar =
            "registrar:" + std::to_string(1 + voter % config_.registrar_count);
        board_->append(EntryKind::roll, payload_bytes(payload), registrar,
                       &author_keys_.at(registrar));
        out.push_back(std::move(secret));
    }
    return out;
}

Bytes Election::classical_credential_bytes(const Bigint& sigma) const {
    return int_to_bytes(sigma);
}

uint64_t Election::post_ballot_classical(const Bigint& sigma, size_t choice) {
    Drbg rng = rng_.child("ballot", ballot_counter_++);
    Bigint a1 = rng.below(params_.q);
    Bigint a2 = rng.below(params_.q);
    ElGamalCiphertext e1 = encrypt(params_, tallier_key_.h, slate_[choice], a1);
    ElGamalCiphertext e2 = encrypt(params_, tallier_key_.h, sigma, a2);

    ProofContext ctx = proof_context();
    LinearProof proof_cred =
        prove_linear(params_, plaintext_knowledge_statement(params_, e2), {a2}, ctx, rng);
    OrProof proof_vote =
        prove_membership(params_, tallier_key_.h, e1, slate_, choice, a1, ctx, rng);

    json payload{{"type", "ballot"},
                 {"e1", serial::ciphertext_to_json(e1)},
                 {"e2", serial::ciphertext_to_json(e2)},
                 {"proof_cred", serial::linear_proof_to_json(proof_cred)},
                 {"proof_vote", serial::or_proof_to_json(proof_vote)}};
    return board_->append(EntryKind::ballot, payload_bytes(payload), "anonymous", nullptr).index;
}

uint64_t Election::post_ballot_fhe(const Bytes& sigma, const Bytes* preimage, size_t choice) {
    ballot_counter_++;  // keeps per-ballot child derivations unique across backends
    FheCiphertext e1 = oracle_->encrypt(slate_fhe_[choice], FheTag::vote);
    FheCiphertext e2 = oracle_->encrypt(sigma, FheTag::credential);
    OracleRecord attestation = oracle_->attest_ballot(e1, e2, config_.election_id);

    json payload{{"type", "ballot"},
                 {"e1", serial::fhe_ciphertext_to_json(e1)},
                 {"e2", serial::fhe_ciphertext_to_json(e2)},
                 {"attestation", serial::oracle_record_to_json(attestation)}};
    if (config_.eligibility_mode) {
        if (preimage != nullptr) {
            payload["preimage"] =
                serial::fhe_ciphertext_to_json(oracle_->encrypt(*preimage, FheTag::preimage));
        } else {
            payload["preimage"] = nullptr;
        }
    }
    return board_->append(EntryKind::ballot, payload_bytes(payload), "anonymous", nullptr).index;
}

uint64_t Election::cast_vote(const VoterSecret& voter, size_t choice) {
    if (choice >= slate_.size()) throw ConfigError("cast_vote: choice not in slate");
    if (config_.backend == Backend::linear) {
        return post_ballot_fhe(voter.sigma_fhe,
                               config_.eligibility_mode ? &voter.preimage : nullptr, choice);
    }
    return post_ballot_classical(voter.sigma_classical, choice);
}

Election::CoercedCast Election::cast_coerced(const VoterSecret& voter, size_t coercer_choice,
                                             size_t real_choice) {
    if (coercer_choice >= slate_.size() || real_choice >= slate_.size()) {
        throw ConfigError("cast_coerced: choice not in slate");
    }
    CoercedCast out;
    out.fake.voter = voter.voter;
    Drbg fr = rng_.child("fake-credential", ballot_counter_);
    if (config_.backend == Backend::linear) {
        // the fake credential is sampled exactly like a real one
        if (config_.eligibility_mode) {
            out.fake.preimage = fr.bytes(kFheCredentialBytes);
            out.fake.sigma_fhe = credential_hash(out.fake.preimage);
        } else {
            out.fake.sigma_fhe = fr.bytes(kFheCredentialBytes);
        }
        out.fake_ballot = post_ballot_fhe(
            out.fake.sigma_fhe, config_.eligibility_mode ? &out.fake.preimage : nullptr,
            coercer_choice);
        out.real_ballot = cast_vote(voter, real_choice);
    } else {
        out.fake.sigma_classical = random_element(params_, fr);
        out.fake_ballot = post_ballot_classical(out.fake.sigma_classical, coercer_choice);
        out.real_ballot = cast_vote(voter, real_choice);
    }
    return out;
}

uint64_t Election::cast_with_fake_credential(size_t choice) {
    if (choice >= slate_.size()) throw ConfigError("cast: choice not in slate");
    Drbg fr = rng_.child("unregistered-credential", ballot_counter_);
    if (config_.backend == Backend::linear) {
        Bytes sigma;
        Bytes preimage;
        if (config_.eligibility_mode) {
            preimage = fr.bytes(kFheCredentialBytes);
            sigma = credential_hash(preimage);
        } else {
            sigma = fr.bytes(kFheCredentialBytes);
        }
        return post_ballot_fhe(sigma, config_.eligibility_mode ? &preimage : nullptr, choice);
    }
    Bigint sigma = random_element(params_, fr);
    return post_ballot_classical(sigma, choice);
}

uint64_t Election::cast_with_classical_credential(const Bigint& sigma, size_t choice) {
    if (config_.backend == Backend::linear) {
        throw ConfigError("cast_with_classical_credential: classical backends only");
    }
    if (choice >= slate_.size()) throw ConfigError("cast: choice not in slate");
    return post_ballot_classical(sigma, choice);
}

uint64_t Election::cast_stuffed(const VoterSecret& target, size_t choice) {
    if (config_.backend != Backend::linear || !config_.eligibility_mode) {
        throw ConfigError("cast_stuffed: requires linear backend with eligibility mode");
    }
    if (choice >= slate_.size()) throw ConfigError("cast: choice not in slate");
    // colluding authorities know sigma from registration but not the
    // voter-held preimage; they can only attach junk
    Drbg jr = rng_.child("stuffed-preimage", ballot_counter_++);
    Bytes junk = jr.bytes(kFheCredentialBytes);
    return post_ballot_fhe(target.sigma_fhe, &junk, choice);
}

namespace {

struct CastEvent {
    enum Kind { honest, duplicate_first, duplicate_second, invalid, coerced, stuffed } kind;
    unsigned voter = 0;  // index into the registered voter list where applicable
    size_t choice = 0;
    size_t second_choice = 0;  // coerced: the coercer's choice
};

}  // namespace

Scenario generate_scenario(const ElectionConfig& config) {
    const ScenarioSpec& spec = config.scenario;
    Election election = Election::setup(config);
    unsigned registered = spec.honest + spec.duplicate + spec.coerced + spec.stuffed;
    std::vector<VoterSecret> voters = election.register_voters(registered);

    Drbg plan = Drbg::from_seed(config.seed).child("scenario-plan");
    size_t n_cand = config.candidates.size();
    auto pick = [&]() { return static_cast<size_t>(plan.below(Bigint(n_cand)).get_ui()); };

    std::vector<CastEvent> events;
    unsigned v = 0;
    for (unsigned i = 0; i < spec.honest; i++, v++) {
        events.push_back({CastEvent::honest, v, pick(), 0});
    }
    for (unsigned i = 0; i < spec.duplicate; i++, v++) {
        events.push_back({CastEvent::duplicate_first, v, pick(), 0});
        events.push_back({CastEvent::duplicate_second, v, pick(), 0});
    }
    unsigned coerced_base = v;
    for (unsigned i = 0; i < spec.coerced; i++, v++) {
        events.push_back({CastEvent::coerced, v, pick(), pick()});
    }
    unsigned stuffed_base = v;
    for (unsigned i = 0; i < spec.stuffed; i++, v++) {
        events.push_back({CastEvent::stuffed, v, pick(), 0});
    }
    for (unsigned i = 0; i < spec.invalid; i++) {
        events.push_back({CastEvent::invalid, 0, pick(), 0});
    }
    (void)coerced_base;
    (void)stuffed_base;

    for (size_t i = events.size(); i > 1; i--) {
        size_t j = static_cast<size_t>(plan.below(Bigint(static_cast<unsigned long>(i))).get_ui());
        std::swap(events[i - 1], events[j]);
    }

    GroundTruth truth;
    truth.tally.assign(n_cand, 0);
    // duplicate resolution depends on posting order, so resolve per voter as
    // events execute
    std::map<unsigned, std::vector<size_t>> duplicate_choices_in_order;

    for (const CastEvent& ev : events) {
        switch (ev.kind) {
            case CastEvent::honest:
                election.cast_vote(voters[ev.voter], ev.choice);
                truth.tally[ev.choice]++;
                truth.ballots_posted++;
                break;
            case CastEvent::duplicate_first:
            case CastEvent::duplicate_second:
                election.cast_vote(voters[ev.voter], ev.choice);
                duplicate_choices_in_order[ev.voter].push_back(ev.choice);
                truth.ballots_posted++;
                break;
            case CastEvent::invalid:
                election.cast_with_fake_credential(ev.choice);
                truth.expected_invalid_removed++;
                truth.ballots_posted++;
                break;
            case CastEvent::coerced: {
                auto cast = election.cast_coerced(voters[ev.voter], ev.second_choice, ev.choice);
                truth.tally[ev.choice]++;
                truth.expected_invalid_removed++;  // the fake ballot dies at roll match
                truth.fake_ballot_indices.push_back(cast.fake_ballot);
                truth.real_ballot_indices.push_back(cast.real_ballot);
                truth.ballots_posted += 2;
                break;
            }
            case CastEvent::stuffed:
                election.cast_stuffed(voters[ev.voter], ev.choice);
                truth.expected_stuffed_removed++;
                truth.ballots_posted++;
                break;
        }
    }

    for (const auto& [voter, choices] : duplicate_choices_in_order) {
        size_t kept = (config.duplicate_policy == DuplicatePolicy::keep_first) ? choices.front()
                                                                               : choices.back();
        truth.tally[kept]++;
        truth.expected_duplicates_removed += choices.size() - 1;
    }

    return Scenario{std::move(election), std::move(truth)};
}

PublicElection parse_param_payload(const Bytes& payload) {
    json j = serial::parse_payload(payload);
    if (j.value("type", "") != "param") throw ConfigError("not a param payload");
    PublicElection pub;
    pub.params = serial::group_from_json(j.at("group"));
    pub.election_id = base64_decode(j.at("election_id").get<std::string>());
    pub.public_key = hex_to_int(j.at("pk").get<std::string>());
    for (const auto& c : j.at("commitments")) {
        pub.share_commitments.push_back(hex_to_int(c.get<std::string>()));
    }
    pub.threshold = j.at("threshold").get<unsigned>();
    pub.tallier_count = j.at("tallier_count").get<unsigned>();
    pub.candidates = j.at("candidates").get<std::vector<std::string>>();
    for (const auto& s : j.at("slate")) pub.slate.push_back(hex_to_int(s.get<std::string>()));
    for (const auto& s : j.at("slate_fhe")) {
        pub.slate_fhe.push_back(base64_decode(s.get<std::string>()));
    }
    pub.backend = backend_from_name(j.at("backend").get<std::string>());
    pub.duplicate_policy = policy_from_name(j.at("duplicate_policy").get<std::string>());
    pub.eligibility_mode = j.at("eligibility").get<bool>();
    pub.mix_servers = j.at("mix_servers").get<unsigned>();
    pub.shadow_rounds = j.at("shadow_rounds").get<unsigned>();
    for (const auto& [name, key] : j.at("authors").items()) {
        pub.author_keys[name] = hex_to_int(key.get<std::string>());
    }
    if (!j.at("oracle_key").is_null()) {
        pub.oracle_key = hex_to_int(j.at("oracle_key").get<std::string>());
    }
    return pub;
}

}  // namespace jcj
