#include "jcj/board.hpp"

#include <fstream>

#include "json.hpp"

namespace jcj {

using nlohmann::json;

std::string kind_name(EntryKind kind) {
    switch (kind) {
        case EntryKind::param: return "param";
        case EntryKind::roll: return "roll";
        case EntryKind::ballot: return "ballot";
        case EntryKind::pet: return "pet";
        case EntryKind::mix: return "mix";
        case EntryKind::hash_post: return "hash-post";
        case EntryKind::decryption: return "decryption";
        case EntryKind::result: return "result";
    }
    throw BoardError("unknown entry kind");
}

EntryKind kind_from_name(const std::string& name) {
    for (EntryKind k : {EntryKind::param, EntryKind::roll, EntryKind::ballot, EntryKind::pet,
                        EntryKind::mix, EntryKind::hash_post, EntryKind::decryption,
                        EntryKind::result}) {
        if (kind_name(k) == name) return k;
    }
    throw BoardError("unknown entry kind: " + name);
}

Digest chain_hash(const Digest& prev, uint64_t index, EntryKind kind, const Bytes& payload) {
    ByteWriter w;
    w.raw(Bytes(prev.begin(), prev.end()));
    w.u64be(index);
    w.blob(kind_name(kind));
    w.blob(payload);
    return sha256(w.bytes());
}

bool author_may_post(const std::string& author, EntryKind kind) {
    if (author == "anonymous") return kind == EntryKind::ballot;
    if (author.starts_with("registrar:")) {
        return kind == EntryKind::roll || kind == EntryKind::param;
    }
    if (author.starts_with("tallier:")) {
        switch (kind) {
            case EntryKind::param:
            case EntryKind::pet:
            case EntryKind::mix:
            case EntryKind::hash_post:
            case EntryKind::decryption:
            case EntryKind::result:
                return true;
            default:
                return false;
        }
    }
    return false;
}

const BoardEntry& Board::append(EntryKind kind, Bytes payload, const std::string& author,
                                const SigningKey* key) {
    if (!author_may_post(author, kind)) {
        throw BoardError("author '" + author + "' may not post kind '" + kind_name(kind) + "'");
    }
    if (author != "anonymous" && key == nullptr) {
        throw BoardError("authority entries must be signed");
    }
    BoardEntry entry;
    entry.index = entries_.size();
    entry.kind = kind;
    entry.payload = std::move(payload);
    entry.prev_hash = entries_.empty() ? Digest{} : entries_.back().entry_hash;
    entry.entry_hash = chain_hash(entry.prev_hash, entry.index, entry.kind, entry.payload);
    entry.author = author;
    if (key != nullptr) {
        entry.signature =
            sign_message(params_, *key, Bytes(entry.entry_hash.begin(), entry.entry_hash.end()));
    }
    entries_.push_back(std::move(entry));

    if (!sink_path_.empty()) {
        std::ofstream out(sink_path_, std::ios::app);
        if (!out || !(out << entry_to_jsonl(entries_.back()) << "\n")) {
            throw BoardError("board persistence failure: " + sink_path_);
        }
    }
    return entries_.back();
}

std::vector<const BoardEntry*> Board::query(EntryKind kind) const {
    std::vector<const BoardEntry*> out;
    for (const BoardEntry& e : entries_) {
        if (e.kind == kind) out.push_back(&e);
    }
    return out;
}

void Board::attach_sink(const std::string& path) {
    sink_path_ = path;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw BoardError("cannot open board sink: " + path);
    for (const BoardEntry& e : entries_) out << entry_to_jsonl(e) << "\n";
    if (!out) throw BoardError("board persistence failure: " + path);
}

ChainCheck verify_chain(const GroupParams& params, const std::vector<BoardEntry>& entries,
                        const std::map<std::string, Bigint>& author_keys) {
    Digest prev{};
    for (size_t i = 0; i < entries.size(); i++) {
        const BoardEntry& e = entries[i];
        auto fail = [&](const std::string& why) {
            return ChainCheck{false, e.index, why};
        };
        if (e.index != i) return fail("index not contiguous");
        if (e.prev_hash != prev) return fail("prev_hash mismatch");
        if (e.entry_hash != chain_hash(e.prev_hash, e.index, e.kind, e.payload)) {
            return fail("entry_hash mismatch");
        }
        if (!author_may_post(e.author, e.kind)) return fail("author not authorized for kind");
        if (e.author != "anonymous") {
            if (!e.signature) return fail("missing authority signature");
            auto it = author_keys.find(e.author);
            if (it == author_keys.end()) return fail("unknown authority: " + e.author);
            if (!verify_signature(params, it->second, *e.signature,
                                  Bytes(e.entry_hash.begin(), e.entry_hash.end()))) {
                return fail("bad signature");
            }
        }
        prev = e.entry_hash;
    }
    return {};
}

std::string entry_to_jsonl(const BoardEntry& entry) {
    json j;
    j["index"] = entry.index;
    j["kind"] = kind_name(entry.kind);
    j["payload"] = base64_encode(entry.payload);
    j["prev_hash"] = digest_hex(entry.prev_hash);
    j["entry_hash"] = digest_hex(entry.entry_hash);
    j["author"] = entry.author;
    if (entry.signature) {
        j["signature"] = {{"c", int_to_hex(entry.signature->challenge)},
                          {"s", int_to_hex(entry.signature->response)}};
    } else {
        j["signature"] = nullptr;
    }
    return j.dump();
}

BoardEntry entry_from_jsonl(const std::string& line) {
    json j = json::parse(line);
    BoardEntry e;
    e.index = j.at("index").get<uint64_t>();
    e.kind = kind_from_name(j.at("kind").get<std::string>());
    e.payload = base64_decode(j.at("payload").get<std::string>());
    e.prev_hash = digest_from_hex(j.at("prev_hash").get<std::string>());
    e.entry_hash = digest_from_hex(j.at("entry_hash").get<std::string>());
    e.author = j.at("author").get<std::string>();
    if (!j.at("signature").is_null()) {
        e.signature = SchnorrSignature{hex_to_int(j["signature"].at("c").get<std::string>()),
                                       hex_to_int(j["signature"].at("s").get<std::string>())};
    }
    return e;
}

void save_entries(const std::vector<BoardEntry>& entries, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw BoardError("cannot open " + path);
    for (const BoardEntry& e : entries) out << entry_to_jsonl(e) << "\n";
    if (!out) throw BoardError("write failure: " + path);
}

std::vector<BoardEntry> load_entries(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BoardError("cannot open " + path);
    std::vector<BoardEntry> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(entry_from_jsonl(line));
    }
    return out;
}

}  // namespace jcj
