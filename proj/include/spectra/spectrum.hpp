#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace spectra {

// An element of N extended with a single point at infinity.
class ExtNat {
 public:
  constexpr ExtNat() = default;
  constexpr ExtNat(std::uint64_t v) : value_(v) {}  // NOLINT: implicit by design
  static constexpr ExtNat infinity() {
    ExtNat e;
    e.inf_ = true;
    return e;
  }
  constexpr bool is_infinite() const { return inf_; }
  constexpr bool is_finite() const { return !inf_; }
  // Precondition: finite.
  std::uint64_t value() const;

  friend constexpr bool operator==(const ExtNat&, const ExtNat&) = default;
  friend constexpr std::strong_ordering operator<=>(const ExtNat& a, const ExtNat& b) {
    if (a.inf_ != b.inf_) return a.inf_ ? std::strong_ordering::greater : std::strong_ordering::less;
    if (a.inf_) return std::strong_ordering::equal;
    return a.value_ <=> b.value_;
  }
  friend ExtNat operator+(ExtNat a, ExtNat b) {
    if (a.inf_ || b.inf_) return infinity();
    return ExtNat(a.value_ + b.value_);
  }

  std::string to_string() const;
  nlohmann::json to_json() const;
  static ExtNat from_json(const nlohmann::json& j);

 private:
  std::uint64_t value_ = 0;
  bool inf_ = false;
};

struct Tail {
  std::uint64_t start = 0;
  std::uint64_t period = 1;
  friend bool operator==(const Tail&, const Tail&) = default;
};

// Canonical representation of an ultimately periodic subset of N∞:
// a finite sporadic part, an optional arithmetic progression tail and a
// flag for infinity. Instances are always canonical; use canonicalize to
// build one from arbitrary data.
class SpectrumRep {
 public:
  enum class Kind { Empty, Set };

  static SpectrumRep empty();
  static SpectrumRep canonicalize(std::vector<std::uint64_t> sporadic, std::optional<Tail> tail,
                                  bool has_infinity);
  static SpectrumRep from_json(const nlohmann::json& j);

  Kind kind() const { return kind_; }
  bool is_empty() const { return kind_ == Kind::Empty; }
  const std::vector<std::uint64_t>& sporadic() const { return sporadic_; }
  const std::optional<Tail>& tail() const { return tail_; }
  bool has_infinity() const { return has_infinity_; }

  bool member(ExtNat v) const;
  // Least finite element, if any.
  std::optional<std::uint64_t> min_finite() const;
  // Bound above which membership is decided by the tail alone.
  std::uint64_t stable_bound() const;

  // Triple form (S, M, α) with S ⊆ N∞ and M, α ∈ N∞. A set without a
  // finite tail uses α = 0: M = ∞ when infinity is a member, otherwise M
  // is the largest finite element. Throws DomainError on the empty set.
  struct Triple {
    std::vector<ExtNat> s;
    ExtNat m;
    ExtNat alpha;
  };
  Triple to_triple() const;

  nlohmann::json to_json() const;
  std::string to_string() const;

  friend bool operator==(const SpectrumRep&, const SpectrumRep&) = default;

 private:
  Kind kind_ = Kind::Empty;
  std::vector<std::uint64_t> sporadic_;
  std::optional<Tail> tail_;
  bool has_infinity_ = false;
};

// Subsemigroup of (N∞, +) generated by the given elements; the empty set
// generates the empty set.
SpectrumRep from_generators(const std::vector<ExtNat>& generators);

// A finite generating set; throws NotASemigroup when rep is not closed.
std::vector<ExtNat> generators(const SpectrumRep& rep);

// Exact closure test. probe_bound additionally drives a brute-force sweep
// over pairs below the bound that cross-checks the closed-form argument;
// 0 selects the default 4·(M + max sporadic + α).
bool is_closed_under_addition(const SpectrumRep& rep, std::uint64_t probe_bound = 0);

}  // namespace spectra
