#include <fstream>
#include <iterator>
#include <map>

#include "chain_codec.hpp"
#include "mecco/chain.hpp"

namespace mecco::chain {

namespace {

constexpr std::array<std::uint8_t, 8> kLedgerMagic = {'M', 'E', 'C', 'C', 'O', 'L', 'G', '1'};

void write_header(detail::Writer& w, std::uint64_t height, const Digest& prev, const Digest& root,
                  std::uint64_t timestamp, const std::string& miner) {
  w.u64(height);
  w.fixed(prev);
  w.fixed(root);
  w.u64(timestamp);
  w.str(miner);
}

}  // namespace

Digest compute_tx_root(std::span<const Transaction> txs) {
  detail::Writer w;
  w.u32(static_cast<std::uint32_t>(txs.size()));
  for (const auto& tx : txs) w.bytes(tx.serialize());
  return sha256(w.take());
}

Digest compute_block_hash(std::uint64_t height, const Digest& prev_hash, const Digest& tx_root,
                          std::uint64_t timestamp, const std::string& miner_id) {
  detail::Writer w;
  write_header(w, height, prev_hash, tx_root, timestamp, miner_id);
  return sha256(w.take());
}

Bytes Block::serialize() const {
  detail::Writer w;
  write_header(w, height, prev_hash, tx_root, timestamp, miner_id);
  w.fixed(block_hash);
  w.u32(static_cast<std::uint32_t>(transactions.size()));
  for (const auto& tx : transactions) w.bytes(tx.serialize());
  return w.take();
}

Block Block::deserialize(ByteView bytes) {
  detail::Reader r(bytes);
  Block b;
  b.height = r.u64();
  b.prev_hash = r.fixed<32>();
  b.tx_root = r.fixed<32>();
  b.timestamp = r.u64();
  b.miner_id = r.str();
  b.block_hash = r.fixed<32>();
  const std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::size_t at = r.offset();
    ByteView raw = r.bytes();
    try {
      b.transactions.push_back(Transaction::deserialize(raw));
    } catch (const DecodeError& e) {
      throw DecodeError(std::string("transaction ") + std::to_string(i) + ": " + e.what(), at);
    }
  }
  r.expect_end();
  return b;
}

std::uint64_t TxPool::submit(Transaction tx) {
  std::lock_guard lock(mu_);
  queue_.push_back(std::move(tx));
  return arrivals_++;
}

std::vector<Transaction> TxPool::drain() {
  std::lock_guard lock(mu_);
  std::vector<Transaction> out(std::make_move_iterator(queue_.begin()),
                               std::make_move_iterator(queue_.end()));
  queue_.clear();
  return out;
}

std::size_t TxPool::size() const {
  std::lock_guard lock(mu_);
  return queue_.size();
}

Block make_genesis_block() {
  Block g;
  g.height = 0;
  g.prev_hash = Digest{};
  g.tx_root = compute_tx_root({});
  g.timestamp = 0;
  g.miner_id = "genesis";
  g.block_hash = compute_block_hash(g.height, g.prev_hash, g.tx_root, g.timestamp, g.miner_id);
  return g;
}

Ledger::Ledger(std::vector<std::string> miners) : miners_(std::move(miners)) {
  if (miners_.empty()) throw ValidationError("at least one miner is required");
  blocks_.push_back(make_genesis_block());
}

std::uint64_t Ledger::last_nonce(const PublicKey& pk) const {
  std::uint64_t last = 0;
  for (const auto& b : blocks_)
    for (const auto& tx : b.transactions)
      if (tx.sender_pk == pk) last = std::max(last, tx.nonce);
  return last;
}

std::optional<Block> mine_block(TxPool& pool, Ledger& ledger) {
  std::vector<Transaction> pending = pool.drain();
  if (pending.empty()) return std::nullopt;

  std::map<PublicKey, std::uint64_t> nonce_floor;
  std::vector<Transaction> accepted;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    Transaction& tx = pending[i];
    auto [it, fresh] = nonce_floor.try_emplace(tx.sender_pk, 0);
    if (fresh) it->second = ledger.last_nonce(tx.sender_pk);
    if (!tx.signature_valid()) {
      ledger.log_rejection("arrival " + std::to_string(i) + ": signature does not verify");
      continue;
    }
    if (tx.nonce <= it->second) {
      ledger.log_rejection("arrival " + std::to_string(i) + ": stale nonce " + std::to_string(tx.nonce));
      continue;
    }
    it->second = tx.nonce;
    accepted.push_back(std::move(tx));
  }
  if (accepted.empty()) return std::nullopt;

  const Block& tip = ledger.tip();
  Block b;
  b.height = tip.height + 1;
  b.prev_hash = tip.block_hash;
  b.transactions = std::move(accepted);
  b.tx_root = compute_tx_root(b.transactions);
  b.timestamp = tip.timestamp + 1;
  b.miner_id = ledger.miners()[(b.height - 1) % ledger.miners().size()];
  b.block_hash = compute_block_hash(b.height, b.prev_hash, b.tx_root, b.timestamp, b.miner_id);
  ledger.append(b);
  return b;
}

bool verify_chain(const Ledger& ledger) {
  const auto& blocks = ledger.blocks();
  if (blocks.empty()) return false;
  if (blocks.front() != make_genesis_block()) return false;

  std::map<PublicKey, std::uint64_t> last_nonce;
  for (std::size_t i = 1; i < blocks.size(); ++i) {
    const Block& b = blocks[i];
    const Block& prev = blocks[i - 1];
    if (b.height != prev.height + 1) return false;
    if (b.prev_hash != prev.block_hash) return false;
    if (b.timestamp <= prev.timestamp) return false;
    if (b.transactions.empty()) return false;
    if (!ledger.miners().empty() && b.miner_id != ledger.miners()[(b.height - 1) % ledger.miners().size()])
      return false;
    if (b.tx_root != compute_tx_root(b.transactions)) return false;
    if (b.block_hash != compute_block_hash(b.height, b.prev_hash, b.tx_root, b.timestamp, b.miner_id))
      return false;
    for (const auto& tx : b.transactions) {
      if (!tx.signature_valid()) return false;
      std::uint64_t& floor = last_nonce[tx.sender_pk];
      if (tx.nonce <= floor) return false;
      floor = tx.nonce;
    }
  }
  return true;
}

PolicyTable replay_policy_table(const Ledger& ledger, const PublicKey& admin_pk) {
  PolicyTable table;
  table.admin_pk = admin_pk;
  for (const auto& b : ledger.blocks())
    for (const auto& tx : b.transactions)
      if (tx.kind == TxKind::Registration && tx.sender_pk == admin_pk)
        table = apply_registration(tx, std::move(table));
  return table;
}

LedgerStats ledger_stats(const Ledger& ledger) {
  LedgerStats s;
  s.height = ledger.height();
  for (const auto& b : ledger.blocks()) {
    for (const auto& tx : b.transactions) {
      switch (tx.kind) {
        case TxKind::Registration: ++s.registrations; break;
        case TxKind::OffloadRequest: ++s.granted; break;
        case TxKind::PenaltyNotice: ++s.denied; break;
      }
    }
  }
  return s;
}

Bytes encode_ledger(const Ledger& ledger) {
  Bytes out(kLedgerMagic.begin(), kLedgerMagic.end());
  for (const auto& b : ledger.blocks()) {
    detail::Writer w;
    w.bytes(b.serialize());
    Bytes rec = w.take();
    out.insert(out.end(), rec.begin(), rec.end());
  }
  return out;
}

Ledger decode_ledger(ByteView bytes, std::vector<std::string> miners) {
  detail::Reader r(bytes);
  if (r.fixed<8>() != kLedgerMagic) throw DecodeError("bad ledger magic", 0);
  std::vector<Block> blocks;
  while (r.offset() < bytes.size()) {
    const std::size_t at = r.offset();
    ByteView rec = r.bytes();
    try {
      blocks.push_back(Block::deserialize(rec));
    } catch (const DecodeError& e) {
      throw DecodeError(std::string("block record: ") + e.what(), at);
    }
  }
  if (blocks.empty()) throw DecodeError("ledger has no genesis block", r.offset());
  Ledger ledger(std::move(miners));
  ledger.reset_blocks(std::move(blocks));
  return ledger;
}

void save_ledger(const std::filesystem::path& path, const Ledger& ledger) {
  const Bytes data = encode_ledger(ledger);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write ledger file " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

void append_block_to_file(const std::filesystem::path& path, const Block& block) {
  detail::Writer w;
  w.bytes(block.serialize());
  const Bytes rec = w.take();
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot append to ledger file " + path.string());
  out.write(reinterpret_cast<const char*>(rec.data()), static_cast<std::streamsize>(rec.size()));
}

Ledger load_ledger(const std::filesystem::path& path, std::vector<std::string> miners) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read ledger file " + path.string());
  const Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_ledger(data, std::move(miners));
}

}  // namespace mecco::chain
