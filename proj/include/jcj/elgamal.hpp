#ifndef JCJ_ELGAMAL_HPP_
#define JCJ_ELGAMAL_HPP_

#include <vector>

#include "jcj/group.hpp"

namespace jcj {

// Modified two-generator ElGamal: public key h = g1^x1 * g2^x2, ciphertext
// (u, v, w) = (g1^r, g2^r, m * h^r). Component order is canonical here.
struct ElGamalCiphertext {
    Bigint u;
    Bigint v;
    Bigint w;

    bool operator==(const ElGamalCiphertext&) const = default;
};

struct KeyPair {
    Bigint x1;
    Bigint x2;
    Bigint h;
};

struct PublicKey {
    Bigint h;
};

KeyPair keygen(const GroupParams& params, Drbg& rng);
Bigint public_key_for(const GroupParams& params, const Bigint& x1, const Bigint& x2);

ElGamalCiphertext encrypt(const GroupParams& params, const Bigint& h, const Bigint& m,
                          const Bigint& r);
ElGamalCiphertext reencrypt(const GroupParams& params, const Bigint& h,
                            const ElGamalCiphertext& ct, const Bigint& r);
Bigint decrypt(const GroupParams& params, const Bigint& x1, const Bigint& x2,
               const ElGamalCiphertext& ct);

// Componentwise product / quotient: homomorphic multiply and divide.
ElGamalCiphertext ct_mul(const GroupParams& params, const ElGamalCiphertext& a,
                         const ElGamalCiphertext& b);
ElGamalCiphertext ct_div(const GroupParams& params, const ElGamalCiphertext& a,
                         const ElGamalCiphertext& b);
// Componentwise exponentiation (u^e, v^e, w^e).
ElGamalCiphertext ct_pow(const GroupParams& params, const ElGamalCiphertext& ct, const Bigint& e);

void write_ciphertext(ByteWriter& w, const ElGamalCiphertext& ct);

// Trusted-dealer threshold sharing of (x1, x2): two degree-(t-1) polynomials,
// share i evaluated at i+1, public commitments h_i = g1^{x1_i} g2^{x2_i}.
struct TallierShare {
    unsigned index = 0;  // 1-based evaluation point
    Bigint x1;
    Bigint x2;
};

struct ThresholdShares {
    unsigned threshold = 0;
    unsigned count = 0;
    std::vector<TallierShare> shares;       // secret, one per tallier
    std::vector<Bigint> commitments;        // public h_i, aligned with shares
};

ThresholdShares deal_shares(const GroupParams& params, const KeyPair& key, unsigned threshold,
                            unsigned count, Drbg& rng);

// d_i = u^{x1_i} * v^{x2_i}
Bigint decryption_share(const GroupParams& params, const TallierShare& share,
                        const ElGamalCiphertext& ct);

// Lagrange coefficient at zero for evaluation point `index` within `indices`.
Bigint lagrange_at_zero(const Bigint& q, const std::vector<unsigned>& indices, unsigned index);

// Combine t decryption shares (index, d_i) into the plaintext.
Bigint combine_shares(const GroupParams& params, const ElGamalCiphertext& ct,
                      const std::vector<std::pair<unsigned, Bigint>>& shares);

}  // namespace jcj

#endif
