#include "relayabc/auth.hpp"

#include <sodium.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace relayabc {

namespace {

void ensure_sodium() {
  static const int status = sodium_init();
  if (status < 0) {
    throw std::runtime_error("libsodium initialisation failed");
  }
}

// 32 bytes of key material bound to (purpose, seed, node).
std::array<std::uint8_t, 32> derive_seed_bytes(std::string_view purpose, std::uint64_t seed, NodeId node) {
  std::array<std::uint8_t, 32> out{};
  crypto_generichash_state state;
  crypto_generichash_init(&state, nullptr, 0, out.size());
  crypto_generichash_update(&state, reinterpret_cast<const unsigned char*>(purpose.data()), purpose.size());
  std::uint8_t buf[12];
  for (int k = 0; k < 8; ++k) buf[k] = static_cast<std::uint8_t>(seed >> (8 * k));
  for (int k = 0; k < 4; ++k) buf[8 + k] = static_cast<std::uint8_t>(node >> (8 * k));
  crypto_generichash_update(&state, buf, sizeof buf);
  crypto_generichash_final(&state, out.data(), out.size());
  return out;
}

void check_value(double value) {
  if (std::isnan(value)) {
    throw std::invalid_argument("refusing to sign NaN");
  }
}

class KeyedHashScheme final : public SignatureScheme {
 public:
  KeyedHashScheme() { ensure_sodium(); }

  SchemeKind kind() const noexcept override { return SchemeKind::KeyedHash; }

  KeyPair derive_key_pair(NodeId node, std::uint64_t seed) const override {
    const auto key = derive_seed_bytes("relayabc/hmac-sha256", seed, node);
    KeyPair pair;
    pair.node = node;
    pair.signing = {node, {key.begin(), key.end()}};
    pair.verification = {node, {key.begin(), key.end()}};
    return pair;
  }

  Signature sign(const SigningKey& key, NodeId origin, double value, Marker marker) const override {
    check_value(value);
    const auto msg = encode_signed_triple(origin, value, marker);
    std::array<std::uint8_t, crypto_auth_hmacsha256_BYTES> tag{};
    crypto_auth_hmacsha256_state state;
    crypto_auth_hmacsha256_init(&state, key.secret.data(), key.secret.size());
    crypto_auth_hmacsha256_update(&state, msg.data(), msg.size());
    crypto_auth_hmacsha256_final(&state, tag.data());
    return Signature(tag);
  }

  bool verify(const VerificationKey& key, NodeId origin, double value, Marker marker,
              const Signature& sig) const noexcept override {
    if (sig.size() != crypto_auth_hmacsha256_BYTES || key.owner != origin || std::isnan(value)) {
      return false;
    }
    const auto msg = encode_signed_triple(origin, value, marker);
    std::array<std::uint8_t, crypto_auth_hmacsha256_BYTES> tag{};
    crypto_auth_hmacsha256_state state;
    crypto_auth_hmacsha256_init(&state, key.bytes.data(), key.bytes.size());
    crypto_auth_hmacsha256_update(&state, msg.data(), msg.size());
    crypto_auth_hmacsha256_final(&state, tag.data());
    return sodium_memcmp(tag.data(), sig.bytes().data(), tag.size()) == 0;
  }
};

class Ed25519Scheme final : public SignatureScheme {
 public:
  Ed25519Scheme() { ensure_sodium(); }

  SchemeKind kind() const noexcept override { return SchemeKind::Ed25519; }

  KeyPair derive_key_pair(NodeId node, std::uint64_t seed) const override {
    const auto seed_bytes = derive_seed_bytes("relayabc/ed25519", seed, node);
    std::array<std::uint8_t, crypto_sign_PUBLICKEYBYTES> pk{};
    std::array<std::uint8_t, crypto_sign_SECRETKEYBYTES> sk{};
    crypto_sign_seed_keypair(pk.data(), sk.data(), seed_bytes.data());
    KeyPair pair;
    pair.node = node;
    pair.signing = {node, {sk.begin(), sk.end()}};
    pair.verification = {node, {pk.begin(), pk.end()}};
    return pair;
  }

  Signature sign(const SigningKey& key, NodeId origin, double value, Marker marker) const override {
    check_value(value);
    if (key.secret.size() != crypto_sign_SECRETKEYBYTES) {
      throw std::invalid_argument("malformed ed25519 signing key");
    }
    const auto msg = encode_signed_triple(origin, value, marker);
    std::array<std::uint8_t, crypto_sign_BYTES> sig{};
    crypto_sign_detached(sig.data(), nullptr, msg.data(), msg.size(), key.secret.data());
    return Signature(sig);
  }

  bool verify(const VerificationKey& key, NodeId origin, double value, Marker marker,
              const Signature& sig) const noexcept override {
    if (sig.size() != crypto_sign_BYTES || key.bytes.size() != crypto_sign_PUBLICKEYBYTES ||
        key.owner != origin || std::isnan(value)) {
      return false;
    }
    const auto msg = encode_signed_triple(origin, value, marker);
    return crypto_sign_verify_detached(sig.bytes().data(), msg.data(), msg.size(), key.bytes.data()) == 0;
  }
};

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Signature::Signature(std::span<const std::uint8_t> bytes) {
  if (bytes.size() > kMaxSize) {
    throw std::invalid_argument("signature longer than " + std::to_string(kMaxSize) + " bytes");
  }
  std::copy(bytes.begin(), bytes.end(), data_.begin());
  size_ = static_cast<std::uint8_t>(bytes.size());
}

std::string Signature::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * size_);
  for (std::size_t k = 0; k < size_; ++k) {
    out.push_back(kDigits[data_[k] >> 4]);
    out.push_back(kDigits[data_[k] & 0xF]);
  }
  return out;
}

Signature Signature::from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0 || hex.size() / 2 > kMaxSize) {
    throw std::invalid_argument("bad signature hex length");
  }
  std::array<std::uint8_t, kMaxSize> buf{};
  for (std::size_t k = 0; k < hex.size() / 2; ++k) {
    const int hi = hex_digit(hex[2 * k]);
    const int lo = hex_digit(hex[2 * k + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("bad signature hex digit");
    buf[k] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return Signature(std::span<const std::uint8_t>(buf.data(), hex.size() / 2));
}

bool operator==(const Signature& a, const Signature& b) noexcept {
  return a.size_ == b.size_ && std::equal(a.data_.begin(), a.data_.begin() + a.size_, b.data_.begin());
}

bool operator<(const Signature& a, const Signature& b) noexcept {
  return std::lexicographical_compare(a.data_.begin(), a.data_.begin() + a.size_, b.data_.begin(),
                                      b.data_.begin() + b.size_);
}

std::string_view scheme_name(SchemeKind kind) {
  return kind == SchemeKind::KeyedHash ? "keyed_hash" : "ed25519";
}

SchemeKind scheme_from_name(std::string_view name) {
  if (name == "keyed_hash") return SchemeKind::KeyedHash;
  if (name == "ed25519") return SchemeKind::Ed25519;
  throw std::invalid_argument("unknown signature scheme: " + std::string(name));
}

std::unique_ptr<SignatureScheme> make_scheme(SchemeKind kind) {
  if (kind == SchemeKind::Ed25519) return std::make_unique<Ed25519Scheme>();
  return std::make_unique<KeyedHashScheme>();
}

std::array<std::uint8_t, 20> encode_signed_triple(NodeId origin, double value, Marker marker) {
  std::array<std::uint8_t, 20> out{};
  const auto bits = std::bit_cast<std::uint64_t>(value);
  const auto mbits = static_cast<std::uint64_t>(marker);
  for (int k = 0; k < 4; ++k) out[k] = static_cast<std::uint8_t>(origin >> (8 * k));
  for (int k = 0; k < 8; ++k) out[4 + k] = static_cast<std::uint8_t>(bits >> (8 * k));
  for (int k = 0; k < 8; ++k) out[12 + k] = static_cast<std::uint8_t>(mbits >> (8 * k));
  return out;
}

Verifier::Verifier(std::shared_ptr<const SignatureScheme> scheme, std::vector<VerificationKey> keys)
    : scheme_(std::move(scheme)), keys_(std::move(keys)) {}

bool Verifier::verify(NodeId origin, double value, Marker marker, const Signature& sig) const noexcept {
  if (origin >= keys_.size()) return false;
  return scheme_->verify(keys_[origin], origin, value, marker, sig);
}

namespace {

std::vector<KeyPair> derive_all(const SignatureScheme& scheme, std::size_t n, std::uint64_t seed) {
  std::vector<KeyPair> pairs;
  pairs.reserve(n);
  for (NodeId i = 0; i < n; ++i) pairs.push_back(scheme.derive_key_pair(i, seed));
  return pairs;
}

std::vector<VerificationKey> public_keys(const std::vector<KeyPair>& pairs) {
  std::vector<VerificationKey> keys;
  keys.reserve(pairs.size());
  for (const auto& p : pairs) keys.push_back(p.verification);
  return keys;
}

}  // namespace

KeyRing::KeyRing(SchemeKind kind, std::size_t node_count, std::uint64_t seed)
    : scheme_(make_scheme(kind)),
      pairs_(derive_all(*scheme_, node_count, seed)),
      verifier_(scheme_, public_keys(pairs_)) {}

Signature KeyRing::sign(NodeId node, double value, Marker marker) const {
  return scheme_->sign(signing_key(node), node, value, marker);
}

}  // namespace relayabc
