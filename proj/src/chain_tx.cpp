#include <sodium.h>

#include <cstring>
#include <stdexcept>

#include "chain_codec.hpp"
#include "mecco/chain.hpp"

namespace mecco::chain {

namespace {

void ensure_sodium() {
  static const bool ready = [] { return sodium_init() >= 0; }();
  if (!ready) throw std::runtime_error("libsodium initialisation failed");
}

constexpr const char* kGranted = "Successful!";
constexpr const char* kFailed = "Failed";

}  // namespace

Digest sha256(ByteView data) {
  ensure_sodium();
  Digest d{};
  crypto_hash_sha256(d.data(), data.data(), data.size());
  return d;
}

Digest sha256(std::string_view text) {
  return sha256(ByteView{reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::string to_hex(ByteView data) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

Signature Account::sign(ByteView message) const {
  ensure_sodium();
  Signature sig{};
  crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), secret_key.data());
  return sig;
}

Account new_account(std::uint64_t seed) {
  ensure_sodium();
  detail::Writer w;
  w.str("mecco-account");
  w.u64(seed);
  const Digest key_seed = sha256(w.take());
  Account acct;
  crypto_sign_seed_keypair(acct.public_key.data(), acct.secret_key.data(), key_seed.data());
  return acct;
}

bool verify_signature(const PublicKey& pk, ByteView message, const Signature& sig) {
  ensure_sodium();
  return crypto_sign_verify_detached(sig.data(), message.data(), message.size(), pk.data()) == 0;
}

const char* to_string(TxKind kind) {
  switch (kind) {
    case TxKind::OffloadRequest: return "offload_request";
    case TxKind::Registration: return "registration";
    case TxKind::PenaltyNotice: return "penalty_notice";
  }
  return "?";
}

Bytes Transaction::signing_bytes() const {
  detail::Writer w;
  w.fixed(sender_pk);
  w.str(device_id);
  w.u8(static_cast<std::uint8_t>(kind));
  w.bytes(payload);
  w.u64(nonce);
  return w.take();
}

Bytes Transaction::serialize() const {
  Bytes out = signing_bytes();
  out.insert(out.end(), signature.begin(), signature.end());
  return out;
}

namespace {

Transaction read_tx(detail::Reader& r) {
  Transaction tx;
  tx.sender_pk = r.fixed<32>();
  tx.device_id = r.str();
  const std::size_t kind_at = r.offset();
  const std::uint8_t kind = r.u8();
  if (kind < 1 || kind > 3) throw DecodeError("unknown transaction kind", kind_at);
  tx.kind = static_cast<TxKind>(kind);
  ByteView payload = r.bytes();
  tx.payload.assign(payload.begin(), payload.end());
  tx.nonce = r.u64();
  tx.signature = r.fixed<64>();
  return tx;
}

}  // namespace

Transaction Transaction::deserialize(ByteView bytes) {
  detail::Reader r(bytes);
  Transaction tx = read_tx(r);
  r.expect_end();
  return tx;
}

bool Transaction::signature_valid() const {
  return verify_signature(sender_pk, signing_bytes(), signature);
}

PublicKey get_sender_public_key(ByteView serialized_tx) {
  // Full decode so that truncated or malformed bytes are rejected up front.
  return Transaction::deserialize(serialized_tx).sender_pk;
}

namespace {

Transaction sign_new(Account& acct, std::string device_id, TxKind kind, Bytes payload) {
  Transaction tx;
  tx.sender_pk = acct.public_key;
  tx.device_id = std::move(device_id);
  tx.kind = kind;
  tx.payload = std::move(payload);
  tx.nonce = acct.next_nonce++;
  tx.signature = acct.sign(tx.signing_bytes());
  return tx;
}

Bytes registration_payload(RegistrationOp op, const PublicKey& target) {
  Bytes p;
  p.push_back(static_cast<std::uint8_t>(op));
  p.insert(p.end(), target.begin(), target.end());
  return p;
}

}  // namespace

Transaction build_offload_tx(Account& acct, const std::string& device_id, const Digest& payload_digest) {
  if (device_id.empty()) throw ValidationError("device id must not be empty");
  return sign_new(acct, device_id, TxKind::OffloadRequest, Bytes(payload_digest.begin(), payload_digest.end()));
}

Transaction build_registration_tx(Account& admin, RegistrationOp op, const PublicKey& target,
                                  const std::string& device_id) {
  if (op == RegistrationOp::AddMd && device_id.empty())
    throw ValidationError("device id must not be empty");
  return sign_new(admin, device_id, TxKind::Registration, registration_payload(op, target));
}

Transaction build_penalty_tx(Account& admin, const Transaction& denied_request) {
  const Digest d = sha256(denied_request.serialize());
  return sign_new(admin, denied_request.device_id, TxKind::PenaltyNotice, Bytes(d.begin(), d.end()));
}

bool PolicyTable::lookup(const PublicKey& pk, const std::string& device_id) const {
  auto it = entries.find(pk);
  return it != entries.end() && it->second.contains(device_id);
}

namespace {

void require_admin(const Transaction& tx, const PolicyTable& table) {
  if (tx.kind != TxKind::Registration)
    throw AuthorizationError("not a registration transaction");
  if (tx.sender_pk != table.admin_pk) throw AuthorizationError("signer is not the contract admin");
  if (!tx.signature_valid()) throw AuthorizationError("admin signature does not verify");
}

void require_payload(const Transaction& tx, RegistrationOp op, const PublicKey& pk) {
  if (tx.payload != registration_payload(op, pk))
    throw AuthorizationError("transaction does not authorise this operation");
}

}  // namespace

PolicyTable contract_add_md(const Transaction& admin_signed, const PublicKey& pk,
                            const std::string& device_id, PolicyTable table) {
  require_admin(admin_signed, table);
  require_payload(admin_signed, RegistrationOp::AddMd, pk);
  if (device_id.empty() || admin_signed.device_id != device_id)
    throw AuthorizationError("transaction does not authorise this device id");
  table.entries[pk].insert(device_id);
  return table;
}

PolicyTable contract_delete_md(const Transaction& admin_signed, const PublicKey& pk, PolicyTable table) {
  require_admin(admin_signed, table);
  require_payload(admin_signed, RegistrationOp::DeleteMd, pk);
  table.entries.erase(pk);
  return table;
}

PolicyTable apply_registration(const Transaction& admin_signed, PolicyTable table) {
  const Bytes& p = admin_signed.payload;
  if (p.size() != 33) throw AuthorizationError("malformed registration payload");
  PublicKey target{};
  std::memcpy(target.data(), p.data() + 1, target.size());
  switch (static_cast<RegistrationOp>(p[0])) {
    case RegistrationOp::AddMd:
      return contract_add_md(admin_signed, target, admin_signed.device_id, std::move(table));
    case RegistrationOp::DeleteMd:
      return contract_delete_md(admin_signed, target, std::move(table));
  }
  throw AuthorizationError("unknown registration operation");
}

AccessResult verify_request(const Transaction& tx, const PolicyTable& table) {
  auto deny = [](DenialReason why) { return AccessResult{Verdict::Denied, kFailed, true, why}; };
  if (tx.kind != TxKind::OffloadRequest) return deny(DenialReason::WrongKind);
  if (!tx.signature_valid()) return deny(DenialReason::BadSignature);
  if (!table.contains(tx.sender_pk)) return deny(DenialReason::UnknownKey);
  if (!table.lookup(tx.sender_pk, tx.device_id)) return deny(DenialReason::UnknownDevice);
  return {Verdict::Granted, kGranted, false, DenialReason::None};
}

AccessControl::Outcome AccessControl::process(ByteView raw_tx, const PolicyTable& table) {
  Outcome out;
  // Pre-processing by the manager, then decoding of the device id.
  out.requester = get_sender_public_key(raw_tx);
  out.request = Transaction::deserialize(raw_tx);
  out.result = verify_request(out.request, table);
  if (out.result.penalty_issued) out.penalty = build_penalty_tx(admin_, out.request);
  return out;
}

}  // namespace mecco::chain
