#include "jcj/group.hpp"

#include <map>

namespace jcj {

namespace {

// Embedded standard safe primes. 2048 is the RFC 3526 MODP group 14 prime;
// the smaller ones were fixed once from a hash-seeded search so that desk
// runs do not pay a prime search on every election.
const std::map<unsigned, const char*>& embedded_primes() {
    static const std::map<unsigned, const char*> table = {
        {256, "9AC0157EC89D2B7B7BCBC9E3D4146E1864B5D480639373D68973E7C018731CDF"},
        {512,
         "C20BA23FDA9F81A8654F80D38C9FF059FEE2729333C939C270F2689CD75F9188"
         "45F0FCCC3E54C3EF6076F6442F24BA5289990ECCA79FCA6A0E5EF807A41DBD0B"},
        {1024,
         "E76DF130E55EE9FCDA1495B60B0140894AFD58A53F8529AF2081F0EDB7A2FAB3"
         "04F77F7AB7540ADAAF3C1661E2E7BAFA498E2D65BC14232932BC8DAC162DF362"
         "2E8CE802329B2BEB1FC0860A17B9C2BF9CD84EA01C6ED7C372199FB5FD1A67A0"
         "3ECF97836CD2B5F87BC214D26DA360DF8AC2E62450AA89E3504C582FD9CA4D1B"},
        {2048,
         "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
         "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
         "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
         "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05"
         "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB"
         "9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
         "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718"
         "3995497CEA956AE515D2261898FA051015728E5A8AACAA68FFFFFFFFFFFFFFFF"},
    };
    return table;
}

bool is_probable_prime(const Bigint& n) {
    return mpz_probab_prime_p(n.get_mpz_t(), 32) != 0;
}

}  // namespace

Bigint hash_to_group(const GroupParams& params, std::string_view domain, const Bytes& input) {
    // Map hash output into [2, p-1] and square it: p = 2q+1 with p = 3 mod 4,
    // so every square other than 1 has order exactly q.
    size_t nbytes = (mpz_sizeinbase(params.p.get_mpz_t(), 2) + 7) / 8 + 8;
    for (uint32_t counter = 0;; counter++) {
        ByteWriter w;
        w.blob(std::string_view("jcj/hash-to-group"));
        w.blob(domain);
        w.blob(input);
        w.u32be(counter);
        Drbg stream = Drbg::from_key(w.bytes());
        Bigint x = bytes_to_int(stream.bytes(nbytes)) % (params.p - 3) + 2;
        Bigint e = mulmod(x, x, params.p);
        if (e != 1) return e;
    }
}

GroupParams generate_params(unsigned bit_length, const Bytes& seed) {
    if (bit_length < 16) throw GroupError("generate_params: bit_length must be >= 16");

    GroupParams params;
    auto it = embedded_primes().find(bit_length);
    if (it != embedded_primes().end()) {
        params.p = hex_to_int(it->second);
        params.q = (params.p - 1) / 2;
        // Both embedded-prime families have 2 as a quadratic residue
        // (p = 7 mod 8 for RFC 3526) or fall back to 4 = 2^2.
        Bigint two = 2;
        params.g1 = (modpow(two, params.q, params.p) == 1) ? two : Bigint(4);
    } else {
        // Seeded search: draw q candidates until q and 2q+1 are both prime.
        Drbg search = Drbg::from_key(seed).child("param-search", bit_length);
        const int kMaxAttempts = 400000;
        bool found = false;
        for (int i = 0; i < kMaxAttempts && !found; i++) {
            Bigint q = search.below(Bigint(1) << (bit_length - 1));
            mpz_setbit(q.get_mpz_t(), bit_length - 2);  // force size
            mpz_setbit(q.get_mpz_t(), 0);               // force odd
            if (!is_probable_prime(q)) continue;
            Bigint p = 2 * q + 1;
            if (!is_probable_prime(p)) continue;
            params.p = p;
            params.q = q;
            found = true;
        }
        if (!found) throw GroupError("generate_params: no safe prime found within bounded attempts");
        params.g1 = 4;  // 2^2, always order q for p = 3 mod 4
    }

    ByteWriter g2seed;
    g2seed.blob(seed);
    write_int(g2seed, params.p);
    params.g2 = hash_to_group(params, "g2", g2seed.bytes());
    if (params.g2 == params.g1) {
        g2seed.blob(std::string_view("retry"));
        params.g2 = hash_to_group(params, "g2", g2seed.bytes());
    }
    return params;
}

bool validate_params(const GroupParams& params, std::string* why) {
    auto fail = [&](const char* msg) {
        if (why) *why = msg;
        return false;
    };
    if (params.p <= 3 || !is_probable_prime(params.p)) return fail("p not prime");
    if (params.q <= 1 || !is_probable_prime(params.q)) return fail("q not prime");
    if (params.p != 2 * params.q + 1) return fail("p != 2q+1");
    for (const Bigint* g : {&params.g1, &params.g2}) {
        if (*g <= 1 || *g >= params.p) return fail("generator out of range");
        if (modpow(*g, params.q, params.p) != 1) return fail("generator order not q");
    }
    if (params.g1 == params.g2) return fail("g1 == g2");
    return true;
}

bool in_subgroup(const GroupParams& params, const Bigint& x) {
    if (x <= 0 || x >= params.p) return false;
    return modpow(x, params.q, params.p) == 1;
}

Bigint random_element(const GroupParams& params, Drbg& rng) {
    return modpow(params.g1, rng.below(params.q), params.p);
}

Bigint hash_to_scalar(const Bigint& q, const Bytes& input) {
    return bytes_to_int(digest_bytes(sha256(input))) % q;
}

}  // namespace jcj
