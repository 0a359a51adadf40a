#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "expansion.hpp"
#include "rational.hpp"
#include "sequences.hpp"

namespace storsion {

struct CorpusEntry {
  std::string id;
  json seq_spec;
  json elem_spec;
};

/// Deterministic test corpus: three passes over the grid of 5 ratio rules x
/// 5 support shapes x 2 digit-value rules (150 structured elements), then 50
/// random reduced rationals. A given (seed, size) always yields byte-identical
/// specs; size truncates or cycles the enumeration.
std::vector<CorpusEntry> generate_corpus(std::uint64_t seed, int size);

json corpus_manifest(const std::vector<CorpusEntry>& entries, std::uint64_t seed);

}  // namespace storsion
