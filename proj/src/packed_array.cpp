#include "slbf/packed_array.hpp"

#include <stdexcept>

namespace slbf {

PackedArray::PackedArray(std::size_t count, unsigned width)
    : count_(count), width_(width), mask_(width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1) {
  if (width > 64) throw std::invalid_argument("PackedArray width must be at most 64");
  // One spare word lets get/set read the straddling word unconditionally.
  words_.assign((count * width + 63) / 64 + 1, 0);
}

void PackedArray::assign_words(std::span<const std::uint64_t> words) {
  if (words.size() != words_.size()) throw std::invalid_argument("PackedArray word count mismatch");
  words_.assign(words.begin(), words.end());
}

}  // namespace slbf
