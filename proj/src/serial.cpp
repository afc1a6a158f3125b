#include "jcj/serial.hpp"

namespace jcj::serial {

json ciphertext_to_json(const ElGamalCiphertext& ct) {
    return json{{"u", int_to_hex(ct.u)}, {"v", int_to_hex(ct.v)}, {"w", int_to_hex(ct.w)}};
}

ElGamalCiphertext ciphertext_from_json(const json& j) {
    return {hex_to_int(j.at("u").get<std::string>()), hex_to_int(j.at("v").get<std::string>()),
            hex_to_int(j.at("w").get<std::string>())};
}

json fhe_ciphertext_to_json(const FheCiphertext& ct) {
    return json{{"blob", base64_encode(ct.blob)},
                {"tag", fhe_tag_name(ct.tag)},
                {"rerand", ct.rerand_count}};
}

FheCiphertext fhe_ciphertext_from_json(const json& j) {
    FheCiphertext ct;
    ct.blob = base64_decode(j.at("blob").get<std::string>());
    std::string tag = j.at("tag").get<std::string>();
    for (FheTag t : {FheTag::credential, FheTag::vote, FheTag::hash_digest, FheTag::preimage,
                     FheTag::key, FheTag::boolean}) {
        if (fhe_tag_name(t) == tag) ct.tag = t;
    }
    ct.rerand_count = j.at("rerand").get<uint64_t>();
    return ct;
}

json linear_proof_to_json(const LinearProof& p) {
    json commitments = json::array();
    for (const Bigint& t : p.commitments) commitments.push_back(int_to_hex(t));
    json responses = json::array();
    for (const Bigint& z : p.responses) responses.push_back(int_to_hex(z));
    return json{{"t", commitments}, {"c", int_to_hex(p.challenge)}, {"z", responses}};
}

LinearProof linear_proof_from_json(const json& j) {
    LinearProof p;
    for (const auto& t : j.at("t")) p.commitments.push_back(hex_to_int(t.get<std::string>()));
    p.challenge = hex_to_int(j.at("c").get<std::string>());
    for (const auto& z : j.at("z")) p.responses.push_back(hex_to_int(z.get<std::string>()));
    return p;
}

json or_proof_to_json(const OrProof& p) {
    json branches = json::array();
    for (const LinearProof& b : p.branches) branches.push_back(linear_proof_to_json(b));
    return json{{"branches", branches}};
}

OrProof or_proof_from_json(const json& j) {
    OrProof p;
    for (const auto& b : j.at("branches")) p.branches.push_back(linear_proof_from_json(b));
    return p;
}

json pet_to_json(const PetTranscript& t) {
    json blinds = json::array();
    for (const PetBlind& b : t.blinds) {
        blinds.push_back(json{{"tallier", b.tallier},
                              {"blinded", ciphertext_to_json(b.blinded)},
                              {"proof", linear_proof_to_json(b.proof)}});
    }
    json shares = json::array();
    for (const PetShare& s : t.shares) {
        shares.push_back(json{{"tallier", s.tallier},
                              {"share", int_to_hex(s.share)},
                              {"proof", linear_proof_to_json(s.proof)}});
    }
    return json{{"a", ciphertext_to_json(t.input_a)},
                {"b", ciphertext_to_json(t.input_b)},
                {"quotient", ciphertext_to_json(t.quotient)},
                {"blinds", blinds},
                {"blinded", ciphertext_to_json(t.blinded)},
                {"shares", shares},
                {"plaintext", int_to_hex(t.plaintext)},
                {"verdict", t.verdict}};
}

PetTranscript pet_from_json(const json& j) {
    PetTranscript t;
    t.input_a = ciphertext_from_json(j.at("a"));
    t.input_b = ciphertext_from_json(j.at("b"));
    t.quotient = ciphertext_from_json(j.at("quotient"));
    for (const auto& b : j.at("blinds")) {
        PetBlind blind;
        blind.tallier = b.at("tallier").get<unsigned>();
        blind.blinded = ciphertext_from_json(b.at("blinded"));
        blind.proof = linear_proof_from_json(b.at("proof"));
        t.blinds.push_back(std::move(blind));
    }
    t.blinded = ciphertext_from_json(j.at("blinded"));
    for (const auto& s : j.at("shares")) {
        PetShare share;
        share.tallier = s.at("tallier").get<unsigned>();
        share.share = hex_to_int(s.at("share").get<std::string>());
        share.proof = linear_proof_from_json(s.at("proof"));
        t.shares.push_back(std::move(share));
    }
    t.plaintext = hex_to_int(j.at("plaintext").get<std::string>());
    t.verdict = j.at("verdict").get<bool>();
    return t;
}

json oracle_record_to_json(const OracleRecord& r) {
    json inputs = json::array();
    for (const Digest& d : r.inputs) inputs.push_back(digest_hex(d));
    json outputs = json::array();
    for (const Digest& d : r.outputs) outputs.push_back(digest_hex(d));
    return json{{"seq", r.sequence},
                {"op", r.op},
                {"inputs", inputs},
                {"outputs", outputs},
                {"result", base64_encode(r.result)},
                {"approvals", r.approvals},
                {"sig", {{"c", int_to_hex(r.attestation.challenge)},
                         {"s", int_to_hex(r.attestation.response)}}}};
}

OracleRecord oracle_record_from_json(const json& j) {
    OracleRecord r;
    r.sequence = j.at("seq").get<uint64_t>();
    r.op = j.at("op").get<std::string>();
    for (const auto& d : j.at("inputs")) r.inputs.push_back(digest_from_hex(d.get<std::string>()));
    for (const auto& d : j.at("outputs")) r.outputs.push_back(digest_from_hex(d.get<std::string>()));
    r.result = base64_decode(j.at("result").get<std::string>());
    for (const auto& a : j.at("approvals")) r.approvals.push_back(a.get<unsigned>());
    r.attestation = {hex_to_int(j.at("sig").at("c").get<std::string>()),
                     hex_to_int(j.at("sig").at("s").get<std::string>())};
    return r;
}

json group_to_json(const GroupParams& g) {
    return json{{"p", int_to_hex(g.p)},
                {"q", int_to_hex(g.q)},
                {"g1", int_to_hex(g.g1)},
                {"g2", int_to_hex(g.g2)}};
}

GroupParams group_from_json(const json& j) {
    GroupParams g;
    g.p = hex_to_int(j.at("p").get<std::string>());
    g.q = hex_to_int(j.at("q").get<std::string>());
    g.g1 = hex_to_int(j.at("g1").get<std::string>());
    g.g2 = hex_to_int(j.at("g2").get<std::string>());
    return g;
}

namespace {

json cipher_lists_to_json(const CipherLists& lists) {
    json out = json::array();
    for (const auto& list : lists) {
        json l = json::array();
        for (const ElGamalCiphertext& ct : list) l.push_back(ciphertext_to_json(ct));
        out.push_back(std::move(l));
    }
    return out;
}

CipherLists cipher_lists_from_json(const json& j) {
    CipherLists out;
    for (const auto& l : j) {
        std::vector<ElGamalCiphertext> list;
        for (const auto& ct : l) list.push_back(ciphertext_from_json(ct));
        out.push_back(std::move(list));
    }
    return out;
}

json fhe_lists_to_json(const FheLists& lists) {
    json out = json::array();
    for (const auto& list : lists) {
        json l = json::array();
        for (const FheCiphertext& ct : list) l.push_back(fhe_ciphertext_to_json(ct));
        out.push_back(std::move(l));
    }
    return out;
}

FheLists fhe_lists_from_json(const json& j) {
    FheLists out;
    for (const auto& l : j) {
        std::vector<FheCiphertext> list;
        for (const auto& ct : l) list.push_back(fhe_ciphertext_from_json(ct));
        out.push_back(std::move(list));
    }
    return out;
}

}  // namespace

json elgamal_mix_to_json(const ElGamalMixBatch& b) {
    json servers = json::array();
    for (const ElGamalServerMix& server : b.servers) {
        json shadows = json::array();
        for (const ElGamalShadow& sh : server.shadows) {
            json rand_lists = json::array();
            for (const auto& list : sh.randomness) {
                json rl = json::array();
                for (const Bigint& r : list) rl.push_back(int_to_hex(r));
                rand_lists.push_back(std::move(rl));
            }
            shadows.push_back(json{{"lists", cipher_lists_to_json(sh.lists)},
                                   {"side", sh.opened_side},
                                   {"perm", sh.perm},
                                   {"rand", rand_lists}});
        }
        servers.push_back(
            json{{"output", cipher_lists_to_json(server.output)}, {"shadows", shadows}});
    }
    return json{{"input", cipher_lists_to_json(b.input)},
                {"servers", servers},
                {"rounds", b.shadow_rounds}};
}

ElGamalMixBatch elgamal_mix_from_json(const json& j) {
    ElGamalMixBatch b;
    b.input = cipher_lists_from_json(j.at("input"));
    b.shadow_rounds = j.at("rounds").get<unsigned>();
    for (const auto& s : j.at("servers")) {
        ElGamalServerMix server;
        server.output = cipher_lists_from_json(s.at("output"));
        for (const auto& sh : s.at("shadows")) {
            ElGamalShadow shadow;
            shadow.lists = cipher_lists_from_json(sh.at("lists"));
            shadow.opened_side = sh.at("side").get<int>();
            shadow.perm = sh.at("perm").get<std::vector<uint32_t>>();
            for (const auto& rl : sh.at("rand")) {
                std::vector<Bigint> list;
                for (const auto& r : rl) list.push_back(hex_to_int(r.get<std::string>()));
                shadow.randomness.push_back(std::move(list));
            }
            server.shadows.push_back(std::move(shadow));
        }
        b.servers.push_back(std::move(server));
    }
    return b;
}

json fhe_mix_to_json(const FheMixBatch& b) {
    json servers = json::array();
    for (const FheServerMix& server : b.servers) {
        json shadows = json::array();
        for (const FheShadow& sh : server.shadows) {
            json link_lists = json::array();
            for (const auto& list : sh.links) {
                json ll = json::array();
                for (const OracleRecord& rec : list) ll.push_back(oracle_record_to_json(rec));
                link_lists.push_back(std::move(ll));
            }
            shadows.push_back(json{{"lists", fhe_lists_to_json(sh.lists)},
                                   {"side", sh.opened_side},
                                   {"perm", sh.perm},
                                   {"links", link_lists}});
        }
        servers.push_back(json{{"output", fhe_lists_to_json(server.output)}, {"shadows", shadows}});
    }
    return json{{"input", fhe_lists_to_json(b.input)},
                {"servers", servers},
                {"rounds", b.shadow_rounds}};
}

FheMixBatch fhe_mix_from_json(const json& j) {
    FheMixBatch b;
    b.input = fhe_lists_from_json(j.at("input"));
    b.shadow_rounds = j.at("rounds").get<unsigned>();
    for (const auto& s : j.at("servers")) {
        FheServerMix server;
        server.output = fhe_lists_from_json(s.at("output"));
        for (const auto& sh : s.at("shadows")) {
            FheShadow shadow;
            shadow.lists = fhe_lists_from_json(sh.at("lists"));
            shadow.opened_side = sh.at("side").get<int>();
            shadow.perm = sh.at("perm").get<std::vector<uint32_t>>();
            for (const auto& ll : sh.at("links")) {
                std::vector<OracleRecord> list;
                for (const auto& rec : ll) list.push_back(oracle_record_from_json(rec));
                shadow.links.push_back(std::move(list));
            }
            server.shadows.push_back(std::move(shadow));
        }
        b.servers.push_back(std::move(server));
    }
    return b;
}

json parse_payload(const Bytes& payload) { return json::parse(jcj::to_string(payload)); }

}  // namespace jcj::serial
