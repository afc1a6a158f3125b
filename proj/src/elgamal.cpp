#include "jcj/elgamal.hpp"

#include <stdexcept>

namespace jcj {

Bigint public_key_for(const GroupParams& params, const Bigint& x1, const Bigint& x2) {
    return mulmod(modpow(params.g1, x1, params.p), modpow(params.g2, x2, params.p), params.p);
}

KeyPair keygen(const GroupParams& params, Drbg& rng) {
    KeyPair key;
    // reject the degenerate all-zero key; h = 1 would make every ciphertext
    // carry its plaintext in the clear
    do {
        key.x1 = rng.below(params.q);
        key.x2 = rng.below(params.q);
    } while (key.x1 == 0 && key.x2 == 0);
    key.h = public_key_for(params, key.x1, key.x2);
    return key;
}

ElGamalCiphertext encrypt(const GroupParams& params, const Bigint& h, const Bigint& m,
                          const Bigint& r) {
    if (!in_subgroup(params, m)) {
        throw std::invalid_argument("encrypt: message not in the order-q subgroup");
    }
    ElGamalCiphertext ct;
    ct.u = modpow(params.g1, r, params.p);
    ct.v = modpow(params.g2, r, params.p);
    ct.w = mulmod(m, modpow(h, r, params.p), params.p);
    return ct;
}

ElGamalCiphertext reencrypt(const GroupParams& params, const Bigint& h,
                            const ElGamalCiphertext& ct, const Bigint& r) {
    ElGamalCiphertext blank = encrypt(params, h, Bigint(1), r);
    return ct_mul(params, ct, blank);
}

Bigint decrypt(const GroupParams& params, const Bigint& x1, const Bigint& x2,
               const ElGamalCiphertext& ct) {
    Bigint mask = mulmod(modpow(ct.u, x1, params.p), modpow(ct.v, x2, params.p), params.p);
    return mulmod(ct.w, modinv(mask, params.p), params.p);
}

ElGamalCiphertext ct_mul(const GroupParams& params, const ElGamalCiphertext& a,
                         const ElGamalCiphertext& b) {
    return {mulmod(a.u, b.u, params.p), mulmod(a.v, b.v, params.p), mulmod(a.w, b.w, params.p)};
}

ElGamalCiphertext ct_div(const GroupParams& params, const ElGamalCiphertext& a,
                         const ElGamalCiphertext& b) {
    return {mulmod(a.u, modinv(b.u, params.p), params.p),
            mulmod(a.v, modinv(b.v, params.p), params.p),
            mulmod(a.w, modinv(b.w, params.p), params.p)};
}

ElGamalCiphertext ct_pow(const GroupParams& params, const ElGamalCiphertext& ct, const Bigint& e) {
    return {modpow(ct.u, e, params.p), modpow(ct.v, e, params.p), modpow(ct.w, e, params.p)};
}

void write_ciphertext(ByteWriter& w, const ElGamalCiphertext& ct) {
    write_int(w, ct.u);
    write_int(w, ct.v);
    write_int(w, ct.w);
}

namespace {
Bigint poly_eval(const std::vector<Bigint>& coeffs, unsigned x, const Bigint& q) {
    Bigint acc = 0;
    Bigint xpow = 1;
    for (const Bigint& c : coeffs) {
        acc = (acc + c * xpow) % q;
        xpow = (xpow * x) % q;
    }
    return acc;
}
}  // namespace

ThresholdShares deal_shares(const GroupParams& params, const KeyPair& key, unsigned threshold,
                            unsigned count, Drbg& rng) {
    if (threshold < 1 || threshold > count) {
        throw std::invalid_argument("deal_shares: need 1 <= t <= n");
    }
    std::vector<Bigint> poly1{key.x1}, poly2{key.x2};
    for (unsigned i = 1; i < threshold; i++) {
        poly1.push_back(rng.below(params.q));
        poly2.push_back(rng.below(params.q));
    }
    ThresholdShares out;
    out.threshold = threshold;
    out.count = count;
    for (unsigned i = 1; i <= count; i++) {
        TallierShare s;
        s.index = i;
        s.x1 = poly_eval(poly1, i, params.q);
        s.x2 = poly_eval(poly2, i, params.q);
        out.commitments.push_back(public_key_for(params, s.x1, s.x2));
        out.shares.push_back(std::move(s));
    }
    return out;
}

Bigint decryption_share(const GroupParams& params, const TallierShare& share,
                        const ElGamalCiphertext& ct) {
    return mulmod(modpow(ct.u, share.x1, params.p), modpow(ct.v, share.x2, params.p), params.p);
}

Bigint lagrange_at_zero(const Bigint& q, const std::vector<unsigned>& indices, unsigned index) {
    Bigint num = 1, den = 1;
    Bigint xi = index;
    for (unsigned j : indices) {
        if (j == index) continue;
        Bigint xj = j;
        num = mulmod(num, xj % q, q);
        Bigint diff = (xj - xi) % q;
        if (diff < 0) diff += q;
        den = mulmod(den, diff, q);
    }
    return mulmod(num, modinv(den, q), q);
}

Bigint combine_shares(const GroupParams& params, const ElGamalCiphertext& ct,
                      const std::vector<std::pair<unsigned, Bigint>>& shares) {
    std::vector<unsigned> indices;
    indices.reserve(shares.size());
    for (const auto& [idx, d] : shares) indices.push_back(idx);
    Bigint mask = 1;
    for (const auto& [idx, d] : shares) {
        mask = mulmod(mask, modpow(d, lagrange_at_zero(params.q, indices, idx), params.p), params.p);
    }
    return mulmod(ct.w, modinv(mask, params.p), params.p);
}

}  // namespace jcj
