#include "spectra/spectrum.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "spectra/errors.hpp"

namespace spectra {

std::uint64_t ExtNat::value() const {
  if (inf_) throw DomainError("value() requested on infinity");
  return value_;
}

std::string ExtNat::to_string() const { return inf_ ? "inf" : std::to_string(value_); }

nlohmann::json ExtNat::to_json() const {
  if (inf_) return "inf";
  return value_;
}

ExtNat ExtNat::from_json(const nlohmann::json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") return infinity();
  if (j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0))
    return ExtNat(j.get<std::uint64_t>());
  throw DomainError("expected a natural number or \"inf\"");
}

SpectrumRep SpectrumRep::empty() { return SpectrumRep(); }

SpectrumRep SpectrumRep::canonicalize(std::vector<std::uint64_t> sporadic, std::optional<Tail> tail,
                                      bool has_infinity) {
  std::sort(sporadic.begin(), sporadic.end());
  sporadic.erase(std::unique(sporadic.begin(), sporadic.end()), sporadic.end());

  SpectrumRep rep;
  if (tail) {
    if (tail->period == 0) throw DomainError("tail period must be at least 1");
    std::uint64_t m = tail->start;
    const std::uint64_t a = tail->period;
    auto on_progression = [&](std::uint64_t v) { return v >= m && (v - m) % a == 0; };

    // Sporadic values at or beyond the tail start that are off the
    // progression force the tail to start later.
    std::optional<std::uint64_t> last_off;
    for (auto v : sporadic)
      if (v >= m && !on_progression(v)) last_off = v;
    if (last_off) {
      const std::uint64_t new_m = m + a * ((*last_off - m) / a + 1);
      for (std::uint64_t v = m; v < new_m; v += a) sporadic.push_back(v);
      m = new_m;
      std::sort(sporadic.begin(), sporadic.end());
      sporadic.erase(std::unique(sporadic.begin(), sporadic.end()), sporadic.end());
    }
    std::erase_if(sporadic, [&](std::uint64_t v) { return v >= m; });

    // Pull the start down while the previous progression value is present
    // and nothing else lies in between.
    while (m >= a) {
      const std::uint64_t prev = m - a;
      auto it = std::lower_bound(sporadic.begin(), sporadic.end(), prev);
      if (it == sporadic.end() || *it != prev) break;
      if (std::next(it) != sporadic.end() && *std::next(it) < m) break;
      sporadic.erase(it);
      m = prev;
    }
    rep.tail_ = Tail{m, a};
  } else if (sporadic.empty() && !has_infinity) {
    return empty();
  }
  rep.kind_ = Kind::Set;
  rep.sporadic_ = std::move(sporadic);
  rep.has_infinity_ = has_infinity;
  return rep;
}

bool SpectrumRep::member(ExtNat v) const {
  if (kind_ == Kind::Empty) return false;
  if (v.is_infinite()) return has_infinity_;
  const auto x = v.value();
  if (std::binary_search(sporadic_.begin(), sporadic_.end(), x)) return true;
  return tail_ && x >= tail_->start && (x - tail_->start) % tail_->period == 0;
}

std::optional<std::uint64_t> SpectrumRep::min_finite() const {
  if (kind_ == Kind::Empty) return std::nullopt;
  if (!sporadic_.empty()) return sporadic_.front();
  if (tail_) return tail_->start;
  return std::nullopt;
}

std::uint64_t SpectrumRep::stable_bound() const {
  if (tail_) return tail_->start;
  return sporadic_.empty() ? 0 : sporadic_.back() + 1;
}

SpectrumRep::Triple SpectrumRep::to_triple() const {
  if (kind_ == Kind::Empty) throw DomainError("the empty set has no (S, M, alpha) form");
  Triple t;
  for (auto v : sporadic_) t.s.emplace_back(v);
  if (tail_) {
    if (has_infinity_) t.s.push_back(ExtNat::infinity());
    t.m = ExtNat(tail_->start);
    t.alpha = ExtNat(tail_->period);
  } else if (has_infinity_) {
    t.m = ExtNat::infinity();
    t.alpha = ExtNat(0);
  } else {
    // A finite set: the largest element becomes the degenerate progression.
    t.m = t.s.back();
    t.s.pop_back();
    t.alpha = ExtNat(0);
  }
  return t;
}

nlohmann::json SpectrumRep::to_json() const {
  if (kind_ == Kind::Empty) return {{"status", "empty"}};
  nlohmann::json j;
  j["status"] = "ok";
  j["sporadic"] = sporadic_;
  if (tail_)
    j["tail"] = {{"start", tail_->start}, {"period", tail_->period}};
  else
    j["tail"] = nullptr;
  j["infinity"] = has_infinity_;
  return j;
}

SpectrumRep SpectrumRep::from_json(const nlohmann::json& j) {
  if (j.at("status") == "empty") return empty();
  std::optional<Tail> tail;
  if (j.contains("tail") && !j.at("tail").is_null())
    tail = Tail{j.at("tail").at("start").get<std::uint64_t>(),
                j.at("tail").at("period").get<std::uint64_t>()};
  return canonicalize(j.at("sporadic").get<std::vector<std::uint64_t>>(), tail,
                      j.at("infinity").get<bool>());
}

std::string SpectrumRep::to_string() const {
  if (kind_ == Kind::Empty) return "{}";
  std::vector<std::string> parts;
  for (auto v : sporadic_) parts.push_back(std::to_string(v));
  if (tail_) {
    if (tail_->period == 1)
      parts.push_back(fmt::format("[{},inf[", tail_->start));
    else
      parts.push_back(fmt::format("{}+{}N", tail_->start, tail_->period));
  }
  if (has_infinity_) parts.push_back("inf");
  return "{" + fmt::format("{}", fmt::join(parts, ", ")) + "}";
}

SpectrumRep from_generators(const std::vector<ExtNat>& gens) {
  bool zero = false;
  bool inf = false;
  std::vector<std::uint64_t> pos;
  for (const auto& g : gens) {
    if (g.is_infinite())
      inf = true;
    else if (g.value() == 0)
      zero = true;
    else
      pos.push_back(g.value());
  }
  std::sort(pos.begin(), pos.end());
  pos.erase(std::unique(pos.begin(), pos.end()), pos.end());

  std::vector<std::uint64_t> sporadic;
  if (zero) sporadic.push_back(0);
  if (pos.empty()) return SpectrumRep::canonicalize(sporadic, std::nullopt, inf);

  std::uint64_t d = 0;
  for (auto g : pos) d = std::gcd(d, g);
  std::vector<std::uint64_t> reduced;
  for (auto g : pos) reduced.push_back(g / d);
  const std::uint64_t amin = reduced.front();
  const std::uint64_t amax = reduced.back();
  constexpr std::uint64_t kMaxTable = 50'000'000;
  if (amin > kMaxTable / amax) throw BudgetExceeded("generators too large for the semigroup table");
  // For coprime generators every value beyond (amin-1)(amax-1) is reachable.
  const std::uint64_t limit = amin * amax + amax + 1;
  std::vector<char> reach(limit + 1, 0);
  reach[0] = 1;
  for (std::uint64_t x = 1; x <= limit; ++x)
    for (auto g : reduced) {
      if (g > x) break;
      if (reach[x - g]) {
        reach[x] = 1;
        break;
      }
    }
  std::uint64_t conductor = 1;
  std::uint64_t run = 0;
  for (std::uint64_t x = 1; x <= limit; ++x) {
    run = reach[x] ? run + 1 : 0;
    if (run == amin) {
      conductor = x - amin + 1;
      break;
    }
  }
  for (std::uint64_t x = 1; x < conductor; ++x)
    if (reach[x]) sporadic.push_back(x * d);
  return SpectrumRep::canonicalize(sporadic, Tail{conductor * d, d}, inf);
}

std::vector<ExtNat> generators(const SpectrumRep& rep) {
  if (!is_closed_under_addition(rep)) throw NotASemigroup("set is not closed under addition");
  std::vector<ExtNat> out;
  if (rep.is_empty()) return out;
  for (auto v : rep.sporadic()) out.emplace_back(v);
  if (const auto& t = rep.tail()) {
    if (t->start == 0) {
      out.emplace_back(0);
      out.emplace_back(t->period);
    } else {
      // Closure forces the period to divide the start, so the window
      // [M, 2M] of progression values generates the whole tail.
      const std::uint64_t q = t->start / t->period;
      for (std::uint64_t k = 0; k <= q; ++k) out.emplace_back(t->start + k * t->period);
    }
  }
  if (rep.has_infinity()) out.push_back(ExtNat::infinity());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool is_closed_under_addition(const SpectrumRep& rep, std::uint64_t probe_bound) {
  if (rep.is_empty()) return true;
  const auto& s = rep.sporadic();
  const auto& tail = rep.tail();
  bool closed = true;
  for (std::size_t i = 0; i < s.size() && closed; ++i)
    for (std::size_t j = i; j < s.size(); ++j)
      if (!rep.member(ExtNat(s[i] + s[j]))) {
        closed = false;
        break;
      }
  if (closed && tail) {
    // Two tail values sum into the tail iff the period divides the start;
    // a sporadic value shifts the tail residue unless it is a multiple of
    // the period.
    if (tail->start % tail->period != 0) closed = false;
    for (auto v : s)
      if (v % tail->period != 0) closed = false;
  }

  // Brute-force sweep below the probe bound as an independent check.
  std::uint64_t bound = probe_bound;
  if (bound == 0) {
    bound = 4 * (rep.stable_bound() + (s.empty() ? 0 : s.back()) + (tail ? tail->period : 1));
    bound = std::max<std::uint64_t>(bound, 8);
  }
  bound = std::min<std::uint64_t>(bound, 4096);
  std::vector<std::uint64_t> members;
  for (std::uint64_t x = 0; x <= bound; ++x)
    if (rep.member(ExtNat(x))) members.push_back(x);
  bool probe_closed = true;
  for (std::size_t i = 0; i < members.size() && probe_closed; ++i)
    for (std::size_t j = i; j < members.size(); ++j) {
      const auto sum = members[i] + members[j];
      if (sum > bound) break;
      if (!rep.member(ExtNat(sum))) {
        probe_closed = false;
        break;
      }
    }
  return closed && probe_closed;
}

}  // namespace spectra
