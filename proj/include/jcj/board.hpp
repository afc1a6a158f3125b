#ifndef JCJ_BOARD_HPP_
#define JCJ_BOARD_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jcj/group.hpp"
#include "jcj/nizk.hpp"

namespace jcj {

enum class EntryKind { param, roll, ballot, pet, mix, hash_post, decryption, result };

std::string kind_name(EntryKind kind);
EntryKind kind_from_name(const std::string& name);

// Append-only hash-chained record. entry_hash covers prev_hash, index, kind
// and payload; authorities sign entry_hash, ballots are posted anonymously
// (the anonymous channel is assumed, not implemented).
struct BoardEntry {
    uint64_t index = 0;
    EntryKind kind = EntryKind::param;
    Bytes payload;
    Digest prev_hash{};
    Digest entry_hash{};
    std::string author;
    std::optional<SchnorrSignature> signature;
};

Digest chain_hash(const Digest& prev, uint64_t index, EntryKind kind, const Bytes& payload);

class BoardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Board {
public:
    explicit Board(GroupParams params) : params_(std::move(params)) {}

    // Authorization: voters post ballots anonymously and nothing else;
    // registrars post roll and param entries; talliers post evidence kinds.
    const BoardEntry& append(EntryKind kind, Bytes payload, const std::string& author,
                             const SigningKey* key);

    const std::vector<BoardEntry>& entries() const { return entries_; }
    std::vector<const BoardEntry*> query(EntryKind kind) const;

    // Streams every append to a JSON Lines file; throws on write failure.
    void attach_sink(const std::string& path);

    const GroupParams& params() const { return params_; }

private:
    GroupParams params_;
    std::vector<BoardEntry> entries_;
    std::string sink_path_;
};

struct ChainCheck {
    bool ok = true;
    uint64_t first_bad_index = 0;
    std::string why;
};

// Verifies hashes, index contiguity, author/kind policy, and authority
// signatures against the given registry (author id -> Schnorr public key).
// A truncated-but-intact prefix verifies; completeness is the auditor's job.
ChainCheck verify_chain(const GroupParams& params, const std::vector<BoardEntry>& entries,
                        const std::map<std::string, Bigint>& author_keys);

bool author_may_post(const std::string& author, EntryKind kind);

// JSON Lines persistence: one entry per line, payload base64, digests as
// lowercase hex. Loading re-derives nothing; bytes round-trip exactly.
void save_entries(const std::vector<BoardEntry>& entries, const std::string& path);
std::vector<BoardEntry> load_entries(const std::string& path);

std::string entry_to_jsonl(const BoardEntry& entry);
BoardEntry entry_from_jsonl(const std::string& line);

}  // namespace jcj

#endif
