#ifndef JCJ_PROTOCOL_HPP_
#define JCJ_PROTOCOL_HPP_

#include <memory>
#include <optional>

#include "json.hpp"
#include "jcj/board.hpp"
#include "jcj/fhe_oracle.hpp"
#include "jcj/mixnet.hpp"
#include "jcj/pet.hpp"

namespace jcj {

enum class Backend { quadratic, linear, smith_weber };
enum class DuplicatePolicy { keep_first, keep_last };

std::string backend_name(Backend b);
Backend backend_from_name(const std::string& name);
std::string policy_name(DuplicatePolicy p);
DuplicatePolicy policy_from_name(const std::string& name);

struct ScenarioSpec {
    unsigned honest = 0;
    unsigned duplicate = 0;  // voters casting two ballots with the same credential
    unsigned invalid = 0;    // ballots with fresh unregistered credentials
    unsigned coerced = 0;    // fake-credential ballot followed by a real one
    unsigned stuffed = 0;    // registered credential, no valid preimage (eligibility mode)
};

struct ElectionConfig {
    Bytes election_id;
    std::vector<std::string> candidates;
    unsigned threshold = 1;
    unsigned tallier_count = 1;
    unsigned registrar_count = 1;
    Backend backend = Backend::quadratic;
    DuplicatePolicy duplicate_policy = DuplicatePolicy::keep_last;
    uint64_t seed = 0;
    unsigned group_bits = 64;
    bool eligibility_mode = false;
    unsigned mix_servers = 2;
    unsigned shadow_rounds = 16;
    bool canonical_counts = true;  // no early exit in the weeding loops
    ScenarioSpec scenario;

    void validate() const;  // throws ConfigError
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

ElectionConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ElectionConfig& config);
ElectionConfig load_config(const std::string& path);

// A voter's private registration state. sigma is a group element on the
// classical backends and an opaque byte string on the FHE backend; the
// preimage is only set in eligibility mode (sigma = credential_hash(x)).
struct VoterSecret {
    unsigned voter = 0;
    Bigint sigma_classical;
    Bytes sigma_fhe;
    Bytes preimage;
};

// Desk-scale simulation of one election: all roles live in this object and
// everything public goes through the bulletin board.
class Election {
public:
    static Election setup(const ElectionConfig& config);

    // Registration: posts one signed roll entry per voter and hands the
    // credential back to the (simulated) voter over the assumed untappable
    // channel.
    std::vector<VoterSecret> register_voters(unsigned count);

    // Honest cast; refuses locally if the choice is not in the slate.
    uint64_t cast_vote(const VoterSecret& voter, size_t choice);

    struct CoercedCast {
        VoterSecret fake;      // handed to the coercer, uniform and independent
        uint64_t fake_ballot;  // board index of the coercer's ballot
        uint64_t real_ballot;  // board index of the voter's later real ballot
    };
    CoercedCast cast_coerced(const VoterSecret& voter, size_t coercer_choice, size_t real_choice);

    // Ballot with an arbitrary (typically unregistered) credential.
    uint64_t cast_with_fake_credential(size_t choice);
    uint64_t cast_with_classical_credential(const Bigint& sigma, size_t choice);

    // Malicious-authority stuffing: a registered credential lifted from the
    // registration records, with no valid preimage. Linear backend only.
    uint64_t cast_stuffed(const VoterSecret& target, size_t choice);

    const ElectionConfig& config() const { return config_; }
    const GroupParams& params() const { return params_; }
    const KeyPair& tallier_key() const { return tallier_key_; }
    const ThresholdShares& shares() const { return shares_; }
    const std::vector<Bigint>& slate() const { return slate_; }
    const std::vector<Bytes>& slate_fhe() const { return slate_fhe_; }
    Board& board() { return *board_; }
    const Board& board() const { return *board_; }
    FheOracle* oracle() { return oracle_.get(); }
    const FheOracle* oracle() const { return oracle_.get(); }
    ProofContext proof_context() const;
    Drbg tally_rng() const { return rng_.child("tally"); }
    std::vector<unsigned> all_tallier_approvals() const;

    const std::map<std::string, SigningKey>& author_keys() const { return author_keys_; }
    const SigningKey& tallier_signer() const { return author_keys_.at("tallier:1"); }

private:
    Election(ElectionConfig config, GroupParams params);

    Bytes classical_credential_bytes(const Bigint& sigma) const;
    uint64_t post_ballot_classical(const Bigint& sigma, size_t choice);
    uint64_t post_ballot_fhe(const Bytes& sigma, const Bytes* preimage, size_t choice);

    ElectionConfig config_;
    GroupParams params_;
    KeyPair tallier_key_;
    ThresholdShares shares_;
    std::vector<Bigint> slate_;      // hash-to-group encodings, classical
    std::vector<Bytes> slate_fhe_;   // candidate identifier bytes, FHE path
    std::map<std::string, SigningKey> author_keys_;
    std::unique_ptr<Board> board_;
    std::unique_ptr<FheOracle> oracle_;
    Drbg rng_;
    unsigned next_voter_ = 0;
    uint64_t ballot_counter_ = 0;
};

// Plaintext-level expectation for one generated scenario, computed by pure
// bookkeeping: this is the independent oracle every backend is checked
// against and it never touches the tallying code.
struct GroundTruth {
    std::vector<uint64_t> tally;
    uint64_t ballots_posted = 0;
    uint64_t expected_duplicates_removed = 0;
    uint64_t expected_invalid_removed = 0;
    uint64_t expected_stuffed_removed = 0;
    std::vector<uint64_t> fake_ballot_indices;  // coerced fake ballots (board indices)
    std::vector<uint64_t> real_ballot_indices;  // matching real ballots
};

struct Scenario {
    Election election;
    GroundTruth truth;
};

// Deterministic per (config, config.scenario): registers every voter, casts
// all ballots in one seeded shuffled order, and returns the plaintext
// bookkeeping result.
Scenario generate_scenario(const ElectionConfig& config);

// Param payload introspection (used by the auditor and the CLI, which hold
// only the transcript).
struct PublicElection {
    GroupParams params;
    Bytes election_id;
    Bigint public_key;
    std::vector<Bigint> share_commitments;
    unsigned threshold = 0;
    unsigned tallier_count = 0;
    std::vector<std::string> candidates;
    std::vector<Bigint> slate;
    std::vector<Bytes> slate_fhe;
    Backend backend = Backend::quadratic;
    DuplicatePolicy duplicate_policy = DuplicatePolicy::keep_last;
    bool eligibility_mode = false;
    unsigned mix_servers = 0;
    unsigned shadow_rounds = 0;
    std::map<std::string, Bigint> author_keys;
    std::optional<Bigint> oracle_key;
};

PublicElection parse_param_payload(const Bytes& payload);

}  // namespace jcj

#endif
