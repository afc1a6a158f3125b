#include "jcj/fhe_oracle.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <set>

namespace jcj {

namespace {
constexpr size_t kNonceBytes = 12;
constexpr size_t kAeadTagBytes = 16;

struct EvpCipherCtx {
    EVP_CIPHER_CTX* ctx;
    EvpCipherCtx() : ctx(EVP_CIPHER_CTX_new()) {
        if (!ctx) throw OracleError("EVP_CIPHER_CTX_new failed");
    }
    ~EvpCipherCtx() { EVP_CIPHER_CTX_free(ctx); }
};

Bytes aead_seal(const Bytes& key, const Bytes& nonce, const Bytes& aad, const Bytes& pt) {
    EvpCipherCtx c;
    Bytes out(pt.size() + kAeadTagBytes);
    int len = 0;
    if (EVP_EncryptInit_ex(c.ctx, EVP_aes_256_gcm(), nullptr, key.data(), nonce.data()) != 1 ||
        EVP_EncryptUpdate(c.ctx, nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1 ||
        EVP_EncryptUpdate(c.ctx, out.data(), &len, pt.data(), static_cast<int>(pt.size())) != 1) {
        throw OracleError("AEAD seal failed");
    }
    int total = len;
    if (EVP_EncryptFinal_ex(c.ctx, out.data() + total, &len) != 1) {
        throw OracleError("AEAD seal failed");
    }
    total += len;
    if (EVP_CIPHER_CTX_ctrl(c.ctx, EVP_CTRL_GCM_GET_TAG, kAeadTagBytes, out.data() + total) != 1) {
        throw OracleError("AEAD tag failed");
    }
    out.resize(total + kAeadTagBytes);
    return out;
}

Bytes aead_open(const Bytes& key, const Bytes& nonce, const Bytes& aad, const Bytes& sealed) {
    if (sealed.size() < kAeadTagBytes) throw OracleError("ciphertext too short");
    EvpCipherCtx c;
    Bytes tag(sealed.end() - kAeadTagBytes, sealed.end());
    Bytes body(sealed.begin(), sealed.end() - kAeadTagBytes);
    Bytes out(body.size());
    int len = 0;
    if (EVP_DecryptInit_ex(c.ctx, EVP_aes_256_gcm(), nullptr, key.data(), nonce.data()) != 1 ||
        EVP_DecryptUpdate(c.ctx, nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1 ||
        EVP_DecryptUpdate(c.ctx, out.data(), &len, body.data(), static_cast<int>(body.size())) != 1) {
        throw OracleError("AEAD open failed");
    }
    int total = len;
    if (EVP_CIPHER_CTX_ctrl(c.ctx, EVP_CTRL_GCM_SET_TAG, kAeadTagBytes, tag.data()) != 1 ||
        EVP_DecryptFinal_ex(c.ctx, out.data() + total, &len) != 1) {
        throw OracleError("AEAD open failed: forged or corrupted ciphertext");
    }
    out.resize(total + len);
    return out;
}
}  // namespace

std::string fhe_tag_name(FheTag tag) {
    switch (tag) {
        case FheTag::credential: return "credential";
        case FheTag::vote: return "vote";
        case FheTag::hash_digest: return "hash-digest";
        case FheTag::preimage: return "preimage";
        case FheTag::key: return "key";
        case FheTag::boolean: return "boolean";
    }
    throw OracleError("unknown fhe tag");
}

Digest fhe_ct_digest(const FheCiphertext& ct) {
    ByteWriter w;
    w.blob(std::string_view("jcj/fhe-ct"));
    w.u8(static_cast<uint8_t>(ct.tag));
    w.blob(ct.blob);
    return sha256(w.bytes());
}

Bytes credential_hash(const Bytes& preimage) {
    ByteWriter w;
    w.blob(std::string_view("jcj/credential-derive"));
    w.blob(preimage);
    Digest d = sha256(w.bytes());
    return Bytes(d.begin(), d.begin() + kFheCredentialBytes);
}

Bytes oracle_record_message(const OracleRecord& rec) {
    ByteWriter w;
    w.blob(std::string_view("jcj/oracle-record/v1"));
    w.u64be(rec.sequence);
    w.blob(rec.op);
    w.u32be(static_cast<uint32_t>(rec.inputs.size()));
    for (const Digest& d : rec.inputs) w.raw(digest_bytes(d));
    w.u32be(static_cast<uint32_t>(rec.outputs.size()));
    for (const Digest& d : rec.outputs) w.raw(digest_bytes(d));
    w.blob(rec.result);
    w.u32be(static_cast<uint32_t>(rec.approvals.size()));
    for (unsigned a : rec.approvals) w.u32be(a);
    return w.take();
}

bool verify_oracle_record(const GroupParams& params, const Bigint& oracle_key,
                          const OracleRecord& rec) {
    return verify_signature(params, oracle_key, rec.attestation, oracle_record_message(rec));
}

FheOracle::FheOracle(GroupParams sig_group, unsigned threshold, unsigned count, Drbg rng)
    : sig_group_(std::move(sig_group)), threshold_(threshold), count_(count), rng_(std::move(rng)) {
    if (threshold_ < 1 || threshold_ > count_) throw OracleError("fhe_keygen: need 1 <= t <= n");
    aead_key_ = rng_.bytes(32);
    Drbg sig_rng = rng_.child("attest-key");
    attest_key_ = signature_keygen(sig_group_, sig_rng);
    OracleRecord rec;
    rec.op = "keygen";
    ByteWriter w;
    w.u32be(threshold_);
    w.u32be(count_);
    rec.result = w.take();
    log(std::move(rec));
}

OracleRecord& FheOracle::log(OracleRecord rec) {
    rec.sequence = sequence_++;
    rec.attestation = sign_message(sig_group_, attest_key_, oracle_record_message(rec));
    transcript_.push_back(std::move(rec));
    return transcript_.back();
}

FheCiphertext FheOracle::seal(const Bytes& plaintext, FheTag tag, uint64_t rerand_count) {
    FheCiphertext ct;
    ct.tag = tag;
    ct.rerand_count = rerand_count;
    Bytes nonce = rng_.bytes(kNonceBytes - 8);
    ByteWriter nw;
    nw.raw(nonce);
    nw.u64be(nonce_counter_++);  // counter suffix rules out nonce reuse
    Bytes aad{static_cast<uint8_t>(tag)};
    ct.blob = nw.take();
    Bytes sealed = aead_seal(aead_key_, ct.blob, aad, plaintext);
    ct.blob.insert(ct.blob.end(), sealed.begin(), sealed.end());
    return ct;
}

Bytes FheOracle::open(const FheCiphertext& ct) const {
    if (ct.blob.size() < kNonceBytes) throw OracleError("malformed ciphertext");
    Bytes nonce(ct.blob.begin(), ct.blob.begin() + kNonceBytes);
    Bytes sealed(ct.blob.begin() + kNonceBytes, ct.blob.end());
    Bytes aad{static_cast<uint8_t>(ct.tag)};
    return aead_open(aead_key_, nonce, aad, sealed);
}

FheCiphertext FheOracle::encrypt(const Bytes& plaintext, FheTag tag) {
    FheCiphertext ct = seal(plaintext, tag, 0);
    OracleRecord rec;
    rec.op = "encrypt";
    rec.outputs.push_back(fhe_ct_digest(ct));
    log(std::move(rec));
    return ct;
}

FheCiphertext FheOracle::rerandomize(const FheCiphertext& ct) {
    // Logged with the output digest only: linking input to output here would
    // publish the mix permutations.
    FheCiphertext out = seal(open(ct), ct.tag, ct.rerand_count + 1);
    OracleRecord rec;
    rec.op = "rerandomize";
    rec.outputs.push_back(fhe_ct_digest(out));
    log(std::move(rec));
    return out;
}

HashKey FheOracle::new_hash_key() {
    HashKey key;
    key.id = next_key_id_++;
    Bytes material = rng_.bytes(32);
    hash_keys_[key.id] = material;
    key.encrypted_key = seal(material, FheTag::key, 0);
    OracleRecord rec;
    rec.op = "hash-keygen";
    rec.outputs.push_back(fhe_ct_digest(key.encrypted_key));
    ByteWriter w;
    w.u32be(key.id);
    rec.result = w.take();
    log(std::move(rec));
    return key;
}

FheOracle::Evaluation FheOracle::eval_keyed_hash(const FheCiphertext& credential,
                                                 uint32_t key_id) {
    if (credential.tag != FheTag::credential) {
        throw OracleError("eval_keyed_hash: input not tagged credential");
    }
    auto it = hash_keys_.find(key_id);
    if (it == hash_keys_.end()) throw OracleError("eval_keyed_hash: unregistered key");
    Bytes sigma = open(credential);
    Bytes digest = hmac_sha256(it->second, sigma);
    digest.resize(kKeyedHashBytes);
    FheCiphertext out = seal(digest, FheTag::hash_digest, 0);
    hash_evals_++;
    OracleRecord rec;
    rec.op = "eval-hash";
    rec.inputs.push_back(fhe_ct_digest(credential));
    rec.outputs.push_back(fhe_ct_digest(out));
    ByteWriter w;
    w.u32be(key_id);
    rec.result = w.take();
    return {std::move(out), log(std::move(rec))};
}

FheOracle::Evaluation FheOracle::eval_hash_preimage_eq(const FheCiphertext& preimage,
                                                       const FheCiphertext& credential) {
    if (preimage.tag != FheTag::preimage || credential.tag != FheTag::credential) {
        throw OracleError("eval_hash_preimage_eq: tag mismatch");
    }
    bool equal = credential_hash(open(preimage)) == open(credential);
    FheCiphertext out = seal(Bytes{static_cast<uint8_t>(equal ? 1 : 0)}, FheTag::boolean, 0);
    OracleRecord rec;
    rec.op = "preimage-eq";
    rec.inputs.push_back(fhe_ct_digest(preimage));
    rec.inputs.push_back(fhe_ct_digest(credential));
    rec.outputs.push_back(fhe_ct_digest(out));
    return {std::move(out), log(std::move(rec))};
}

void FheOracle::require_approvals(const std::vector<unsigned>& approvals, const char* op,
                                  const std::vector<Digest>& inputs) {
    std::set<unsigned> distinct;
    for (unsigned a : approvals) {
        if (a >= 1 && a <= count_) distinct.insert(a);
    }
    if (distinct.size() < threshold_) {
        OracleRecord rec;
        rec.op = "refusal";
        rec.inputs = inputs;
        rec.result = to_bytes(op);
        rec.approvals = approvals;
        log(std::move(rec));
        throw OracleRefusal(std::string(op) + ": insufficient approvals");
    }
}

FheOracle::Decryption FheOracle::threshold_decrypt(const FheCiphertext& ct,
                                                   const std::vector<unsigned>& approvals) {
    std::vector<Digest> inputs{fhe_ct_digest(ct)};
    require_approvals(approvals, "decrypt", inputs);
    Decryption out;
    out.plaintext = open(ct);
    decrypts_++;
    OracleRecord rec;
    rec.op = "decrypt";
    rec.inputs = inputs;
    rec.result = out.plaintext;
    rec.approvals = approvals;
    out.record = log(std::move(rec));
    return out;
}

OracleRecord FheOracle::attest_ballot(const FheCiphertext& vote, const FheCiphertext& credential,
                                      const Bytes& election_id) {
    if (vote.tag != FheTag::vote || credential.tag != FheTag::credential) {
        throw OracleError("attest_ballot: tag mismatch");
    }
    // The voter hands the oracle its plaintexts at encryption time, so the
    // ideal functionality can certify plaintext knowledge directly.
    open(vote);
    open(credential);
    OracleRecord rec;
    rec.op = "ballot-pok";
    rec.inputs.push_back(fhe_ct_digest(vote));
    rec.inputs.push_back(fhe_ct_digest(credential));
    rec.result = election_id;
    return log(std::move(rec));
}

OracleRecord FheOracle::attest_equal_plaintext(const FheCiphertext& a, const FheCiphertext& b,
                                               const std::vector<unsigned>& approvals) {
    std::vector<Digest> inputs{fhe_ct_digest(a), fhe_ct_digest(b)};
    require_approvals(approvals, "peq", inputs);
    bool equal = (a.tag == b.tag) && open(a) == open(b);
    OracleRecord rec;
    rec.op = "peq";
    rec.inputs = inputs;
    rec.result = Bytes{static_cast<uint8_t>(equal ? 1 : 0)};
    rec.approvals = approvals;
    return log(std::move(rec));
}

}  // namespace jcj
