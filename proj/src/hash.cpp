#include "jcj/hash.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <cstring>
#include <stdexcept>

namespace jcj {

Digest sha256(const Bytes& data) {
    Digest out;
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != out.size()) {
        throw std::runtime_error("sha256 failed");
    }
    return out;
}

Bytes hmac_sha256(const Bytes& key, const Bytes& data) {
    Bytes out(32);
    unsigned int len = 0;
    if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(), data.size(),
             out.data(), &len) == nullptr ||
        len != 32) {
        throw std::runtime_error("hmac-sha256 failed");
    }
    return out;
}

std::string digest_hex(const Digest& d) { return hex_encode(digest_bytes(d)); }

Digest digest_from_hex(std::string_view s) {
    Bytes b = hex_decode(s);
    if (b.size() != 32) throw std::invalid_argument("digest: wrong length");
    Digest d;
    std::memcpy(d.data(), b.data(), 32);
    return d;
}

Drbg Drbg::from_seed(uint64_t seed) {
    ByteWriter w;
    w.blob(std::string_view("jcj/drbg/seed"));
    w.u64be(seed);
    return Drbg(sha256(w.bytes()));
}

Drbg Drbg::from_key(const Bytes& key_material) {
    ByteWriter w;
    w.blob(std::string_view("jcj/drbg/key"));
    w.blob(key_material);
    return Drbg(sha256(w.bytes()));
}

Drbg Drbg::child(std::string_view label) const {
    ByteWriter w;
    w.blob(std::string_view("jcj/drbg/child"));
    w.raw(Bytes(key_.begin(), key_.end()));
    w.blob(label);
    return Drbg(sha256(w.bytes()));
}

Drbg Drbg::child(std::string_view label, uint64_t index) const {
    ByteWriter w;
    w.blob(std::string_view("jcj/drbg/child-i"));
    w.raw(Bytes(key_.begin(), key_.end()));
    w.blob(label);
    w.u64be(index);
    return Drbg(sha256(w.bytes()));
}

void Drbg::fill(uint8_t* out, size_t n) {
    while (n > 0) {
        if (avail_ == 0) {
            ByteWriter w;
            w.raw(Bytes(key_.begin(), key_.end()));
            w.u64be(counter_++);
            block_ = sha256(w.bytes());
            avail_ = block_.size();
        }
        size_t take = n < avail_ ? n : avail_;
        std::memcpy(out, block_.data() + (block_.size() - avail_), take);
        avail_ -= take;
        out += take;
        n -= take;
    }
}

Bytes Drbg::bytes(size_t n) {
    Bytes out(n);
    fill(out.data(), n);
    return out;
}

uint64_t Drbg::next_u64() {
    uint8_t b[8];
    fill(b, 8);
    uint64_t v = 0;
    for (int i = 0; i < 8; i++) v = (v << 8) | b[i];
    return v;
}

Bigint Drbg::below(const Bigint& bound) {
    if (sgn(bound) <= 0) throw std::invalid_argument("Drbg::below: bound must be positive");
    size_t nbytes = (mpz_sizeinbase(bound.get_mpz_t(), 2) + 7) / 8 + 8;
    Bigint v = bytes_to_int(bytes(nbytes));
    return v % bound;
}

Bigint Drbg::nonzero_below(const Bigint& bound) {
    if (bound <= 1) throw std::invalid_argument("Drbg::nonzero_below: bound must exceed 1");
    Bigint v = below(bound - 1);
    return v + 1;
}

}  // namespace jcj
