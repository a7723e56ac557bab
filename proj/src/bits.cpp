#include "cardlab/bits.hpp"

#include <bit>

namespace cardlab {

unsigned bits_for_count(u64 count) {
  if (count <= 1) return 0;
  return static_cast<unsigned>(std::bit_width(count - 1));
}

}  // namespace cardlab
