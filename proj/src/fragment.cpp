#include "spectra/fragment.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace spectra {

namespace {

constexpr std::array<std::pair<Fragment, std::string_view>, 15> kNames{{
    {Fragment::DLLiteCore, "DL-Lite_core"},
    {Fragment::DLLiteF, "DL-Lite_F"},
    {Fragment::EL, "EL"},
    {Fragment::ELI, "ELI"},
    {Fragment::ELF, "ELF"},
    {Fragment::ELBot, "EL_bot"},
    {Fragment::ELIF, "ELIF"},
    {Fragment::ELIBot, "ELI_bot"},
    {Fragment::ELFBot, "ELF_bot"},
    {Fragment::ELIFBot, "ELIF_bot"},
    {Fragment::ALC, "ALC"},
    {Fragment::ALCI, "ALCI"},
    {Fragment::ALCFStar, "ALCF*"},
    {Fragment::ALCF, "ALCF"},
    {Fragment::ALCIF, "ALCIF"},
}};

bool is_dllite(Fragment f) { return f == Fragment::DLLiteCore || f == Fragment::DLLiteF; }

bool is_el_concept(const Concept& c, bool inverse) {
  switch (c.kind()) {
    case Concept::Kind::Top:
    case Concept::Kind::Name:
      return true;
    case Concept::Kind::And:
      return std::all_of(c.operands().begin(), c.operands().end(),
                         [&](const Concept& op) { return is_el_concept(op, inverse); });
    case Concept::Kind::Exists:
      return (inverse || !c.role().inverse) && is_el_concept(c.child(), inverse);
    case Concept::Kind::Not:
      return false;
  }
  return false;
}

bool is_basic(const Concept& c) {
  return c.is_name() || (c.kind() == Concept::Kind::Exists && c.child().is_top());
}

bool dllite_admits(const Axiom& ax, bool functionality) {
  if (ax.is_functionality()) return functionality && ax.unqualified();
  const auto& l = ax.lhs;
  const auto& r = ax.rhs;
  if (is_basic(l) && is_basic(r)) return true;
  if (is_basic(l) && (r.is_bot() || (r.kind() == Concept::Kind::Not && is_basic(r.child())))) return true;
  if (l.kind() == Concept::Kind::And && l.operands().size() == 2 && r.is_bot())
    return is_basic(l.operands()[0]) && is_basic(l.operands()[1]);
  return false;
}

bool el_admits(const Axiom& ax, FragmentFeatures ft) {
  if (ax.is_functionality()) {
    return ft.functionality && (ft.inverse || !ax.role.inverse) && is_el_concept(ax.guard(), ft.inverse) &&
           is_el_concept(ax.filler(), ft.inverse);
  }
  if (!is_el_concept(ax.lhs, ft.inverse)) return false;
  if (ax.rhs.is_bot()) return ft.bottom;
  return is_el_concept(ax.rhs, ft.inverse);
}

bool alc_admits(const Axiom& ax, Fragment f) {
  const bool inverse = f == Fragment::ALCI || f == Fragment::ALCIF;
  if (!inverse && (ax.lhs.uses_inverse() || ax.rhs.uses_inverse())) return false;
  if (!ax.is_functionality()) return true;
  switch (f) {
    case Fragment::ALC:
    case Fragment::ALCI:
      return false;
    case Fragment::ALCFStar:
      return ax.unqualified() && !ax.role.inverse;
    case Fragment::ALCF:
      return !ax.role.inverse;
    default:
      return true;
  }
}

bool admits_axiom(Fragment f, const Axiom& ax) {
  if (is_dllite(f)) return dllite_admits(ax, f == Fragment::DLLiteF);
  if (is_alc_family(f)) return alc_admits(ax, f);
  return el_admits(ax, features(f));
}

}  // namespace

const std::vector<Fragment>& fragment_order() {
  static const std::vector<Fragment> order = [] {
    std::vector<Fragment> v;
    for (const auto& [f, _] : kNames) v.push_back(f);
    return v;
  }();
  return order;
}

std::string to_string(Fragment f) {
  for (const auto& [g, name] : kNames)
    if (g == f) return std::string(name);
  return "?";
}

std::optional<Fragment> fragment_from_string(std::string_view s) {
  for (const auto& [g, name] : kNames)
    if (name == s) return g;
  return std::nullopt;
}

FragmentFeatures features(Fragment f) {
  switch (f) {
    case Fragment::DLLiteCore: return {true, false, true};
    case Fragment::DLLiteF: return {true, true, true};
    case Fragment::EL: return {false, false, false};
    case Fragment::ELI: return {true, false, false};
    case Fragment::ELF: return {false, true, false};
    case Fragment::ELBot: return {false, false, true};
    case Fragment::ELIF: return {true, true, false};
    case Fragment::ELIBot: return {true, false, true};
    case Fragment::ELFBot: return {false, true, true};
    case Fragment::ELIFBot: return {true, true, true};
    case Fragment::ALC: return {false, false, true};
    case Fragment::ALCI: return {true, false, true};
    case Fragment::ALCFStar: return {false, true, true};
    case Fragment::ALCF: return {false, true, true};
    case Fragment::ALCIF: return {true, true, true};
  }
  return {};
}

bool is_horn(Fragment f) { return !is_alc_family(f); }

bool is_alc_family(Fragment f) {
  return f == Fragment::ALC || f == Fragment::ALCI || f == Fragment::ALCFStar || f == Fragment::ALCF ||
         f == Fragment::ALCIF;
}

bool admits(Fragment f, const KB& kb) {
  return std::all_of(kb.tbox.begin(), kb.tbox.end(), [&](const Axiom& ax) { return admits_axiom(f, ax); });
}

bool fragment_leq(Fragment a, Fragment b) {
  if (a == b) return true;
  const auto fa = features(a);
  const auto fb = features(b);
  auto covers = [&] {
    return (!fa.inverse || fb.inverse) && (!fa.functionality || fb.functionality) && (!fa.bottom || fb.bottom);
  };
  if (is_dllite(a)) {
    if (is_dllite(b)) return a == Fragment::DLLiteCore;
    if (b == Fragment::ALCFStar || b == Fragment::ALCF) return false;
    return covers();
  }
  if (is_dllite(b)) return false;
  if (is_alc_family(a) && !is_alc_family(b)) return false;
  if (is_alc_family(a)) {
    if (a == Fragment::ALCF && b == Fragment::ALCFStar) return false;
    return covers();
  }
  // a is in the EL family; qualified functionality excludes ALCF*.
  if (b == Fragment::ALCFStar && fa.functionality) return false;
  return covers();
}

Fragment detect_fragment(const KB& kb) {
  for (auto f : fragment_order())
    if (admits(f, kb)) return f;
  return Fragment::ALCIF;
}

}  // namespace spectra
