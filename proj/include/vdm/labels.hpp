#pragma once

#include <cstdint>
#include <vector>

namespace vdm {

/// Branch tag per memory-window slot: X = no pending interaction, Y = pending
/// lowering on the left of the state, Z = pending raising on the right.
enum class Trit : std::uint8_t { X = 0, Y = 1, Z = 2 };

std::int64_t pow3(int m);

/// Slot s (1-based, s = 1..M) occupies base-3 digit s-1 of the label index.
/// The all-X label is index 0 and holds the physical state.
std::int64_t label_encode(const std::vector<Trit>& trits);
std::vector<Trit> label_decode(std::int64_t index, int m);

/// Trit at slot s of label index (s = 1..M).
Trit label_digit(std::int64_t index, int slot);

/// Label with Y and Z swapped in every slot; pairs conjugate blocks.
std::int64_t label_swap_yz(std::int64_t index, int m);

}  // namespace vdm
