#ifndef JCJ_BYTES_HPP_
#define JCJ_BYTES_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace jcj {

using Bytes = std::vector<uint8_t>;

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

inline std::string to_string(const Bytes& b) {
    return std::string(b.begin(), b.end());
}

// Canonical length-prefixed writer. Every variable-length field is preceded
// by a 4-byte big-endian length so concatenations are unambiguous. This is
// the encoding that feeds all hashes (Fiat-Shamir, board chaining) and must
// stay bit-exact across implementations.
class ByteWriter {
public:
    void u8(uint8_t v) { buf_.push_back(v); }

    void u32be(uint32_t v) {
        buf_.push_back(static_cast<uint8_t>(v >> 24));
        buf_.push_back(static_cast<uint8_t>(v >> 16));
        buf_.push_back(static_cast<uint8_t>(v >> 8));
        buf_.push_back(static_cast<uint8_t>(v));
    }

    void u64be(uint64_t v) {
        u32be(static_cast<uint32_t>(v >> 32));
        u32be(static_cast<uint32_t>(v));
    }

    // length-prefixed blob
    void blob(const Bytes& b) {
        u32be(static_cast<uint32_t>(b.size()));
        buf_.insert(buf_.end(), b.begin(), b.end());
    }

    void blob(std::string_view s) {
        u32be(static_cast<uint32_t>(s.size()));
        buf_.insert(buf_.end(), s.begin(), s.end());
    }

    // raw bytes, no prefix (only for fixed-width fields like digests)
    void raw(const Bytes& b) { buf_.insert(buf_.end(), b.begin(), b.end()); }

    const Bytes& bytes() const { return buf_; }
    Bytes take() { return std::move(buf_); }

private:
    Bytes buf_;
};

std::string hex_encode(const Bytes& b);
Bytes hex_decode(std::string_view s);  // throws std::invalid_argument on bad input

std::string base64_encode(const Bytes& b);
Bytes base64_decode(std::string_view s);  // throws std::invalid_argument on bad input

}  // namespace jcj

#endif
