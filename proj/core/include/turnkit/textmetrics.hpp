#pragma once

#include "turnkit/rational.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace turnkit {

/// Normalized tokens: non-empty, no internal whitespace. Produce only via
/// normalize_tokenize.
using TokenSequence = std::vector<std::string>;

/// Normalization pipeline, applied in order:
///   1. Unicode NFKC
///   2. lowercase (full Unicode case folding via ICU, root locale)
///   3. strip punctuation from the fixed set: ASCII punctuation plus
///      U+3002 U+3001 U+FF0C U+FF1F U+FF01 U+FF1A U+FF1B U+201C U+201D
///      U+2018 U+2019 U+FF08 U+FF09 U+300A U+300B
///      (stripped characters separate tokens)
///   4. each CJK unified-ideograph codepoint becomes its own token
///   5. remaining runs split on whitespace
/// Empty input yields an empty sequence.
TokenSequence normalize_tokenize(std::string_view text);

/// Minimal token edit distance with unit substitution/deletion/insertion costs.
int edit_distance(const TokenSequence& reference, const TokenSequence& hypothesis);

/// (S+D+I)/N with N = reference length. When N == 0: 0 if the hypothesis is
/// also empty, 1 otherwise.
Rational wer(const TokenSequence& reference, const TokenSequence& hypothesis);

} // namespace turnkit
