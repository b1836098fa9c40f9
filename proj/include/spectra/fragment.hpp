#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spectra/kb.hpp"

namespace spectra {

enum class Fragment {
  DLLiteCore,
  DLLiteF,
  EL,
  ELI,
  ELF,
  ELBot,
  ELIF,
  ELIBot,
  ELFBot,
  ELIFBot,
  ALC,
  ALCI,
  ALCFStar,
  ALCF,
  ALCIF,
};

// Fragments in the fixed order used to break ties between incomparable
// candidates; detection returns the first fragment admitting every axiom.
const std::vector<Fragment>& fragment_order();

std::string to_string(Fragment f);
std::optional<Fragment> fragment_from_string(std::string_view s);

struct FragmentFeatures {
  bool inverse = false;
  bool functionality = false;
  bool bottom = false;
};
FragmentFeatures features(Fragment f);

// True for the DL-Lite and EL families, whose TBoxes normalize into Horn
// clauses.
bool is_horn(Fragment f);
bool is_alc_family(Fragment f);

// True if every axiom of kb is admitted by f.
bool admits(Fragment f, const KB& kb);
// Lattice order: a ≤ b iff every TBox of a is a TBox of b.
bool fragment_leq(Fragment a, Fragment b);
Fragment detect_fragment(const KB& kb);

}  // namespace spectra
