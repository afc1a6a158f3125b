#include "jcj/mixnet.hpp"

#include <stdexcept>

namespace jcj {

namespace {

std::vector<uint32_t> random_permutation(size_t n, Drbg& rng) {
    std::vector<uint32_t> perm(n);
    for (size_t i = 0; i < n; i++) perm[i] = static_cast<uint32_t>(i);
    for (size_t i = n; i > 1; i--) {
        size_t j = static_cast<size_t>(rng.below(Bigint(static_cast<unsigned long>(i))).get_ui());
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

bool is_permutation(const std::vector<uint32_t>& perm, size_t n) {
    if (perm.size() != n) return false;
    std::vector<bool> seen(n, false);
    for (uint32_t v : perm) {
        if (v >= n || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

std::vector<uint32_t> invert(const std::vector<uint32_t>& perm) {
    std::vector<uint32_t> inv(perm.size());
    for (size_t i = 0; i < perm.size(); i++) inv[perm[i]] = static_cast<uint32_t>(i);
    return inv;
}

void write_elgamal_lists(ByteWriter& w, const CipherLists& lists) {
    w.u32be(static_cast<uint32_t>(lists.size()));
    for (const auto& list : lists) {
        w.u32be(static_cast<uint32_t>(list.size()));
        for (const ElGamalCiphertext& ct : list) write_ciphertext(w, ct);
    }
}

void write_fhe_lists(ByteWriter& w, const FheLists& lists) {
    w.u32be(static_cast<uint32_t>(lists.size()));
    for (const auto& list : lists) {
        w.u32be(static_cast<uint32_t>(list.size()));
        for (const FheCiphertext& ct : list) w.raw(digest_bytes(fhe_ct_digest(ct)));
    }
}

// One challenge bit per shadow round, bound to everything the server
// committed to. Rounds are capped at 256 (one SHA-256 digest of bits).
template <typename Lists, typename WriteFn>
std::vector<int> challenge_bits(std::string_view domain, size_t server, const Lists& input,
                                const Lists& output, const std::vector<Lists>& shadows,
                                unsigned rounds, WriteFn&& write_lists) {
    ByteWriter w;
    w.blob(domain);
    w.u64be(server);
    write_lists(w, input);
    write_lists(w, output);
    w.u32be(static_cast<uint32_t>(shadows.size()));
    for (const Lists& s : shadows) write_lists(w, s);
    Digest d = sha256(w.bytes());
    std::vector<int> bits(rounds);
    for (unsigned i = 0; i < rounds; i++) bits[i] = (d[i / 8] >> (i % 8)) & 1;
    return bits;
}

void check_mix_input(const CipherLists& input, unsigned servers, unsigned rounds) {
    if (input.empty() || input.size() > 2) {
        throw std::invalid_argument("mix: expected one or two lists");
    }
    for (const auto& list : input) {
        if (list.size() != input[0].size()) throw std::invalid_argument("mix: length mismatch");
    }
    if (servers < 1) throw std::invalid_argument("mix: need at least one server");
    if (rounds < 1 || rounds > 256) throw std::invalid_argument("mix: shadow rounds in [1,256]");
}

}  // namespace

ElGamalMixBatch mix_elgamal(const GroupParams& params, const Bigint& h, CipherLists input,
                            unsigned servers, unsigned shadow_rounds, Drbg& rng,
                            const MixHook* hook) {
    check_mix_input(input, servers, shadow_rounds);
    size_t n = input[0].size();
    size_t nlists = input.size();

    ElGamalMixBatch batch;
    batch.input = input;
    batch.shadow_rounds = shadow_rounds;
    batch.composed_permutation.resize(n);
    std::vector<uint32_t> composed(n);
    for (size_t i = 0; i < n; i++) composed[i] = static_cast<uint32_t>(i);

    CipherLists current = std::move(input);
    for (unsigned s = 0; s < servers; s++) {
        Drbg srng = rng.child("mix-server", s);
        ElGamalServerMix server;

        std::vector<uint32_t> primary_perm = random_permutation(n, srng);
        std::vector<std::vector<Bigint>> primary_rand(nlists, std::vector<Bigint>(n));
        if (hook && hook->identity_permutation) {
            for (size_t i = 0; i < n; i++) primary_perm[i] = static_cast<uint32_t>(i);
        }
        server.output.assign(nlists, {});
        for (size_t l = 0; l < nlists; l++) {
            server.output[l].resize(n);
            for (size_t i = 0; i < n; i++) {
                primary_rand[l][i] =
                    (hook && hook->zero_randomness) ? Bigint(0) : srng.below(params.q);
                server.output[l][i] =
                    reencrypt(params, h, current[l][primary_perm[i]], primary_rand[l][i]);
            }
        }

        // shadows committed before the challenge
        std::vector<ElGamalShadow> shadows(shadow_rounds);
        std::vector<CipherLists> shadow_lists(shadow_rounds);
        std::vector<std::vector<uint32_t>> shadow_perm(shadow_rounds);
        std::vector<std::vector<std::vector<Bigint>>> shadow_rand(shadow_rounds);
        for (unsigned r = 0; r < shadow_rounds; r++) {
            shadow_perm[r] = random_permutation(n, srng);
            shadow_rand[r].assign(nlists, std::vector<Bigint>(n));
            shadow_lists[r].assign(nlists, {});
            for (size_t l = 0; l < nlists; l++) {
                shadow_lists[r][l].resize(n);
                for (size_t i = 0; i < n; i++) {
                    shadow_rand[r][l][i] = srng.below(params.q);
                    shadow_lists[r][l][i] =
                        reencrypt(params, h, current[l][shadow_perm[r][i]], shadow_rand[r][l][i]);
                }
            }
        }

        std::vector<int> bits = challenge_bits("jcj/mix/elgamal/v1", s, current, server.output,
                                               shadow_lists, shadow_rounds, write_elgamal_lists);
        for (unsigned r = 0; r < shadow_rounds; r++) {
            ElGamalShadow& sh = shadows[r];
            sh.lists = std::move(shadow_lists[r]);
            sh.opened_side = bits[r];
            if (bits[r] == 0) {
                sh.perm = shadow_perm[r];
                sh.randomness = shadow_rand[r];
            } else {
                // open shadow -> output: tau[i] = rho^-1[pi[i]], randomness
                // difference makes output a re-encryption of the shadow
                std::vector<uint32_t> rho_inv = invert(shadow_perm[r]);
                sh.perm.resize(n);
                sh.randomness.assign(nlists, std::vector<Bigint>(n));
                for (size_t i = 0; i < n; i++) {
                    uint32_t tau = rho_inv[primary_perm[i]];
                    sh.perm[i] = tau;
                    for (size_t l = 0; l < nlists; l++) {
                        Bigint delta = (primary_rand[l][i] - shadow_rand[r][l][tau]) % params.q;
                        if (delta < 0) delta += params.q;
                        sh.randomness[l][i] = delta;
                    }
                }
            }
        }
        server.shadows = std::move(shadows);
        current = server.output;
        std::vector<uint32_t> next(n);
        for (size_t i = 0; i < n; i++) next[i] = composed[primary_perm[i]];
        composed = std::move(next);
        batch.servers.push_back(std::move(server));
    }
    batch.composed_permutation = std::move(composed);
    return batch;
}

bool verify_elgamal_mix(const GroupParams& params, const Bigint& h, const ElGamalMixBatch& batch) {
    if (batch.input.empty() || batch.servers.empty()) return false;
    size_t n = batch.input[0].size();
    size_t nlists = batch.input.size();

    const CipherLists* current = &batch.input;
    for (size_t s = 0; s < batch.servers.size(); s++) {
        const ElGamalServerMix& server = batch.servers[s];
        if (server.output.size() != nlists) return false;
        for (const auto& list : server.output) {
            if (list.size() != n) return false;
        }
        if (server.shadows.size() != batch.shadow_rounds) return false;

        std::vector<CipherLists> shadow_lists;
        shadow_lists.reserve(server.shadows.size());
        for (const ElGamalShadow& sh : server.shadows) shadow_lists.push_back(sh.lists);
        std::vector<int> bits = challenge_bits("jcj/mix/elgamal/v1", s, *current, server.output,
                                               shadow_lists, batch.shadow_rounds,
                                               write_elgamal_lists);

        for (unsigned r = 0; r < batch.shadow_rounds; r++) {
            const ElGamalShadow& sh = server.shadows[r];
            if (sh.opened_side != bits[r]) return false;
            if (!is_permutation(sh.perm, n)) return false;
            if (sh.lists.size() != nlists || sh.randomness.size() != nlists) return false;
            const CipherLists& src = (sh.opened_side == 0) ? *current : sh.lists;
            const CipherLists& dest = (sh.opened_side == 0) ? sh.lists : server.output;
            for (size_t l = 0; l < nlists; l++) {
                if (sh.lists[l].size() != n || sh.randomness[l].size() != n) return false;
                for (size_t i = 0; i < n; i++) {
                    if (dest[l][i] !=
                        reencrypt(params, h, src[l][sh.perm[i]], sh.randomness[l][i])) {
                        return false;
                    }
                }
            }
        }
        current = &server.output;
    }
    return true;
}

FheMixBatch mix_fhe(FheOracle& oracle, FheLists input, unsigned servers, unsigned shadow_rounds,
                    const std::vector<unsigned>& approvals, Drbg& rng) {
    if (input.empty() || input.size() > 2) {
        throw std::invalid_argument("mix: expected one or two lists");
    }
    for (const auto& list : input) {
        if (list.size() != input[0].size()) throw std::invalid_argument("mix: length mismatch");
        for (const FheCiphertext& ct : list) {
            if (ct.tag != list[0].tag) throw std::invalid_argument("mix: mixed tags in one list");
        }
    }
    if (servers < 1 || shadow_rounds < 1 || shadow_rounds > 256) {
        throw std::invalid_argument("mix: bad server or round count");
    }
    size_t n = input[0].size();
    size_t nlists = input.size();

    FheMixBatch batch;
    batch.input = input;
    batch.shadow_rounds = shadow_rounds;
    std::vector<uint32_t> composed(n);
    for (size_t i = 0; i < n; i++) composed[i] = static_cast<uint32_t>(i);

    FheLists current = std::move(input);
    for (unsigned s = 0; s < servers; s++) {
        Drbg srng = rng.child("mix-server", s);
        FheServerMix server;

        std::vector<uint32_t> primary_perm = random_permutation(n, srng);
        server.output.assign(nlists, {});
        for (size_t l = 0; l < nlists; l++) {
            server.output[l].reserve(n);
            for (size_t i = 0; i < n; i++) {
                server.output[l].push_back(oracle.rerandomize(current[l][primary_perm[i]]));
            }
        }

        std::vector<FheLists> shadow_lists(shadow_rounds);
        std::vector<std::vector<uint32_t>> shadow_perm(shadow_rounds);
        for (unsigned r = 0; r < shadow_rounds; r++) {
            shadow_perm[r] = random_permutation(n, srng);
            shadow_lists[r].assign(nlists, {});
            for (size_t l = 0; l < nlists; l++) {
                shadow_lists[r][l].reserve(n);
                for (size_t i = 0; i < n; i++) {
                    shadow_lists[r][l].push_back(oracle.rerandomize(current[l][shadow_perm[r][i]]));
                }
            }
        }

        std::vector<int> bits = challenge_bits("jcj/mix/fhe/v1", s, current, server.output,
                                               shadow_lists, shadow_rounds, write_fhe_lists);
        server.shadows.resize(shadow_rounds);
        for (unsigned r = 0; r < shadow_rounds; r++) {
            FheShadow& sh = server.shadows[r];
            sh.lists = std::move(shadow_lists[r]);
            sh.opened_side = bits[r];
            sh.links.assign(nlists, {});
            if (bits[r] == 0) {
                sh.perm = shadow_perm[r];
                for (size_t l = 0; l < nlists; l++) {
                    for (size_t i = 0; i < n; i++) {
                        sh.links[l].push_back(oracle.attest_equal_plaintext(
                            current[l][sh.perm[i]], sh.lists[l][i], approvals));
                    }
                }
            } else {
                std::vector<uint32_t> rho_inv = invert(shadow_perm[r]);
                sh.perm.resize(n);
                for (size_t i = 0; i < n; i++) sh.perm[i] = rho_inv[primary_perm[i]];
                for (size_t l = 0; l < nlists; l++) {
                    for (size_t i = 0; i < n; i++) {
                        sh.links[l].push_back(oracle.attest_equal_plaintext(
                            sh.lists[l][sh.perm[i]], server.output[l][i], approvals));
                    }
                }
            }
        }
        current = server.output;
        std::vector<uint32_t> next(n);
        for (size_t i = 0; i < n; i++) next[i] = composed[primary_perm[i]];
        composed = std::move(next);
        batch.servers.push_back(std::move(server));
    }
    batch.composed_permutation = std::move(composed);
    return batch;
}

bool verify_fhe_mix(const GroupParams& params, const Bigint& oracle_key, const FheMixBatch& batch) {
    if (batch.input.empty() || batch.servers.empty()) return false;
    size_t n = batch.input[0].size();
    size_t nlists = batch.input.size();

    const FheLists* current = &batch.input;
    for (size_t s = 0; s < batch.servers.size(); s++) {
        const FheServerMix& server = batch.servers[s];
        if (server.output.size() != nlists) return false;
        for (const auto& list : server.output) {
            if (list.size() != n) return false;
        }
        if (server.shadows.size() != batch.shadow_rounds) return false;

        std::vector<FheLists> shadow_lists;
        shadow_lists.reserve(server.shadows.size());
        for (const FheShadow& sh : server.shadows) shadow_lists.push_back(sh.lists);
        std::vector<int> bits = challenge_bits("jcj/mix/fhe/v1", s, *current, server.output,
                                               shadow_lists, batch.shadow_rounds, write_fhe_lists);

        for (unsigned r = 0; r < batch.shadow_rounds; r++) {
            const FheShadow& sh = server.shadows[r];
            if (sh.opened_side != bits[r]) return false;
            if (!is_permutation(sh.perm, n)) return false;
            if (sh.lists.size() != nlists || sh.links.size() != nlists) return false;
            const FheLists& src = (sh.opened_side == 0) ? *current : sh.lists;
            const FheLists& dest = (sh.opened_side == 0) ? sh.lists : server.output;
            for (size_t l = 0; l < nlists; l++) {
                if (sh.lists[l].size() != n || sh.links[l].size() != n) return false;
                for (size_t i = 0; i < n; i++) {
                    const OracleRecord& link = sh.links[l][i];
                    if (link.op != "peq" || link.result != Bytes{1}) return false;
                    if (link.inputs.size() != 2 ||
                        link.inputs[0] != fhe_ct_digest(src[l][sh.perm[i]]) ||
                        link.inputs[1] != fhe_ct_digest(dest[l][i])) {
                        return false;
                    }
                    if (!verify_oracle_record(params, oracle_key, link)) return false;
                }
            }
        }
        current = &server.output;
    }
    return true;
}

}  // namespace jcj
