#pragma once

// Signatures binding (origin, value, iteration marker) triples to node
// identities. The value is signed through its IEEE-754 bit pattern, so a one
// ulp change invalidates the signature.

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relayabc/graph.hpp"

namespace relayabc {

using Marker = std::int64_t;

class Signature {
 public:
  static constexpr std::size_t kMaxSize = 64;

  Signature() = default;
  explicit Signature(std::span<const std::uint8_t> bytes);

  std::span<const std::uint8_t> bytes() const noexcept { return {data_.data(), size_}; }
  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  std::string to_hex() const;
  /// Throws std::invalid_argument on odd length, bad digits or oversize input.
  static Signature from_hex(std::string_view hex);

  friend bool operator==(const Signature& a, const Signature& b) noexcept;
  friend bool operator<(const Signature& a, const Signature& b) noexcept;

 private:
  std::array<std::uint8_t, kMaxSize> data_{};
  std::uint8_t size_ = 0;
};

struct SigningKey {
  NodeId owner = 0;
  std::vector<std::uint8_t> secret;
};

struct VerificationKey {
  NodeId owner = 0;
  std::vector<std::uint8_t> bytes;
};

struct KeyPair {
  NodeId node = 0;
  SigningKey signing;
  VerificationKey verification;
};

enum class SchemeKind {
  KeyedHash,  // HMAC-SHA256 per node, simulator acts as trusted verifier
  Ed25519,    // real public-key signatures
};

std::string_view scheme_name(SchemeKind kind);
/// Throws std::invalid_argument for unknown names.
SchemeKind scheme_from_name(std::string_view name);

class SignatureScheme {
 public:
  virtual ~SignatureScheme() = default;

  virtual SchemeKind kind() const noexcept = 0;
  /// Deterministic key material for `node` derived from a run seed.
  virtual KeyPair derive_key_pair(NodeId node, std::uint64_t seed) const = 0;
  /// Throws std::invalid_argument for NaN values.
  virtual Signature sign(const SigningKey& key, NodeId origin, double value, Marker marker) const = 0;
  /// Never throws; malformed signatures verify false.
  virtual bool verify(const VerificationKey& key, NodeId origin, double value, Marker marker,
                      const Signature& sig) const noexcept = 0;
};

std::unique_ptr<SignatureScheme> make_scheme(SchemeKind kind);

/// Canonical signed message: origin (u32 LE) | value bits (u64 LE) | marker (i64 LE).
std::array<std::uint8_t, 20> encode_signed_triple(NodeId origin, double value, Marker marker);

/// Verification service shared by every node: all verification keys, no
/// signing keys.
class Verifier {
 public:
  Verifier(std::shared_ptr<const SignatureScheme> scheme, std::vector<VerificationKey> keys);

  bool verify(NodeId origin, double value, Marker marker, const Signature& sig) const noexcept;
  std::size_t node_count() const noexcept { return keys_.size(); }

 private:
  std::shared_ptr<const SignatureScheme> scheme_;
  std::vector<VerificationKey> keys_;
};

/// Key material for one run. Honest signing keys never leave this object
/// except through `signing_key`, which the scheduler only calls for honest
/// nodes it drives and for each byzantine node's own key.
class KeyRing {
 public:
  KeyRing(SchemeKind kind, std::size_t node_count, std::uint64_t seed);

  const SignatureScheme& scheme() const noexcept { return *scheme_; }
  const Verifier& verifier() const noexcept { return verifier_; }
  const SigningKey& signing_key(NodeId node) const { return pairs_.at(node).signing; }
  const VerificationKey& verification_key(NodeId node) const { return pairs_.at(node).verification; }

  Signature sign(NodeId node, double value, Marker marker) const;

 private:
  std::shared_ptr<const SignatureScheme> scheme_;
  std::vector<KeyPair> pairs_;
  Verifier verifier_;
};

}  // namespace relayabc
