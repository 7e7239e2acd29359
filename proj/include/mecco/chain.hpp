#pragma once

// In-process emulation of the blockchain access-control layer: keyed
// accounts, signed transactions, the access-control contract, and a
// hash-chained ledger sealed by round-robin proof-of-authority miners.
//
// Hashing is SHA-256 and signatures are Ed25519 (libsodium). Every hashed or
// signed structure goes through the canonical little-endian, length-prefixed
// encoding documented in docs/ledger_format.md.

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mecco/errors.hpp"

namespace mecco::chain {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;
using PublicKey = std::array<std::uint8_t, 32>;
using SecretKey = std::array<std::uint8_t, 64>;
using Signature = std::array<std::uint8_t, 64>;

Digest sha256(ByteView data);
Digest sha256(std::string_view text);
std::string to_hex(ByteView data);

struct Account {
  PublicKey public_key{};
  SecretKey secret_key{};
  std::uint64_t next_nonce = 1;

  Signature sign(ByteView message) const;
};

// Deterministic Ed25519 keypair derived from SHA-256 of the seed.
Account new_account(std::uint64_t seed);

bool verify_signature(const PublicKey& pk, ByteView message, const Signature& sig);

enum class TxKind : std::uint8_t { OffloadRequest = 1, Registration = 2, PenaltyNotice = 3 };

const char* to_string(TxKind kind);

struct Transaction {
  PublicKey sender_pk{};
  std::string device_id;
  TxKind kind = TxKind::OffloadRequest;
  Bytes payload;
  std::uint64_t nonce = 0;
  Signature signature{};

  // Canonical encoding of every field except the signature.
  Bytes signing_bytes() const;
  Bytes serialize() const;
  static Transaction deserialize(ByteView bytes);

  bool signature_valid() const;
  friend bool operator==(const Transaction&, const Transaction&) = default;
};

// Projection of the sender key straight from the wire bytes; the signature is
// not checked here.
PublicKey get_sender_public_key(ByteView serialized_tx);
inline const PublicKey& get_sender_public_key(const Transaction& tx) { return tx.sender_pk; }

// Signs with the account key and consumes one nonce.
Transaction build_offload_tx(Account& acct, const std::string& device_id, const Digest& payload_digest);

enum class RegistrationOp : std::uint8_t { AddMd = 1, DeleteMd = 2 };

// Admin transactions driving AddMD / DeleteMD. Payload is op byte + target key.
Transaction build_registration_tx(Account& admin, RegistrationOp op, const PublicKey& target,
                                  const std::string& device_id);

// Issued by the admin against a denied request; payload is the digest of the
// request's serialization.
Transaction build_penalty_tx(Account& admin, const Transaction& denied_request);

struct PolicyTable {
  PublicKey admin_pk{};
  std::map<PublicKey, std::set<std::string>> entries;

  bool contains(const PublicKey& pk) const { return entries.contains(pk); }
  bool lookup(const PublicKey& pk, const std::string& device_id) const;
  friend bool operator==(const PolicyTable&, const PolicyTable&) = default;
};

// AddMD. Throws AuthorizationError (table untouched) unless the transaction is
// a valid admin-signed AddMD registration for exactly (pk, device_id).
PolicyTable contract_add_md(const Transaction& admin_signed, const PublicKey& pk,
                            const std::string& device_id, PolicyTable table);

// DeleteMD. Removing an absent key is a successful no-op.
PolicyTable contract_delete_md(const Transaction& admin_signed, const PublicKey& pk, PolicyTable table);

// Applies a registration transaction by decoding its payload.
PolicyTable apply_registration(const Transaction& admin_signed, PolicyTable table);

enum class Verdict { Granted, Denied };

// Which verification branch produced a denial.
enum class DenialReason { None, WrongKind, BadSignature, UnknownKey, UnknownDevice };

struct AccessResult {
  Verdict verdict = Verdict::Denied;
  std::string message;  // "Successful!" or "Failed"
  bool penalty_issued = false;
  DenialReason reason = DenialReason::None;
};

// Contract-side verification; a pure function of (tx, table).
AccessResult verify_request(const Transaction& tx, const PolicyTable& table);

// The full request path: the manager extracts the sender key from the raw
// transaction, the contract verifies it, and the admin emits a penalty notice
// on denial.
class AccessControl {
 public:
  explicit AccessControl(Account admin) : admin_(std::move(admin)) {}

  struct Outcome {
    AccessResult result;
    PublicKey requester{};
    Transaction request;
    std::optional<Transaction> penalty;
  };

  // Decode failures propagate as DecodeError.
  Outcome process(ByteView raw_tx, const PolicyTable& table);

  Account& admin() { return admin_; }
  const PublicKey& admin_pk() const { return admin_.public_key; }

 private:
  Account admin_;
};

struct Block {
  std::uint64_t height = 0;
  Digest prev_hash{};
  Digest tx_root{};
  std::uint64_t timestamp = 0;  // logical clock
  std::string miner_id;
  Digest block_hash{};
  std::vector<Transaction> transactions;

  Bytes serialize() const;
  static Block deserialize(ByteView bytes);
  friend bool operator==(const Block&, const Block&) = default;
};

Digest compute_tx_root(std::span<const Transaction> txs);
Digest compute_block_hash(std::uint64_t height, const Digest& prev_hash, const Digest& tx_root,
                          std::uint64_t timestamp, const std::string& miner_id);

// First-come first-served intake queue. submit() may be called from any
// thread; draining is done by the single mining coordinator.
class TxPool {
 public:
  std::uint64_t submit(Transaction tx);
  std::vector<Transaction> drain();
  std::size_t size() const;
  bool empty() const { return size() == 0; }

 private:
  mutable std::mutex mu_;
  std::deque<Transaction> queue_;
  std::uint64_t arrivals_ = 0;
};

class Ledger {
 public:
  explicit Ledger(std::vector<std::string> miners = {"miner-0"});

  const std::vector<Block>& blocks() const { return blocks_; }
  std::vector<Block>& mutable_blocks() { return blocks_; }
  const std::vector<std::string>& miners() const { return miners_; }
  const std::vector<std::string>& rejection_log() const { return rejections_; }
  std::uint64_t height() const { return blocks_.back().height; }
  const Block& tip() const { return blocks_.back(); }

  // Highest committed nonce for the sender, 0 when none.
  std::uint64_t last_nonce(const PublicKey& pk) const;

  // Used by mine_block and the file loader only.
  void append(Block block) { blocks_.push_back(std::move(block)); }
  void log_rejection(std::string line) { rejections_.push_back(std::move(line)); }
  void reset_blocks(std::vector<Block> blocks) { blocks_ = std::move(blocks); }

 private:
  std::vector<std::string> miners_;
  std::vector<Block> blocks_;
  std::vector<std::string> rejections_;
};

Block make_genesis_block();

// Drains the pool and seals one block by the next miner in rotation.
// Transactions with bad signatures or stale nonces are logged and left out.
// Returns nullopt (ledger unchanged) when nothing valid remains.
std::optional<Block> mine_block(TxPool& pool, Ledger& ledger);

// Re-verifies every hash, link, height, miner rotation, signature and nonce
// sequence from genesis.
bool verify_chain(const Ledger& ledger);

// Policy table obtained by replaying committed admin registrations.
PolicyTable replay_policy_table(const Ledger& ledger, const PublicKey& admin_pk);

struct LedgerStats {
  std::uint64_t height = 0;
  std::size_t registrations = 0;
  std::size_t granted = 0;  // committed offload requests
  std::size_t denied = 0;   // committed penalty notices
};

LedgerStats ledger_stats(const Ledger& ledger);

// Ledger file: 8-byte magic, then one record per block of
// u32 little-endian length followed by the block serialization.
Bytes encode_ledger(const Ledger& ledger);
Ledger decode_ledger(ByteView bytes, std::vector<std::string> miners);
void save_ledger(const std::filesystem::path& path, const Ledger& ledger);
void append_block_to_file(const std::filesystem::path& path, const Block& block);
Ledger load_ledger(const std::filesystem::path& path, std::vector<std::string> miners);

}  // namespace mecco::chain
