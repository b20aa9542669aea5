#include "rescomm/engine/rng.hpp"

namespace rescomm {

std::uint64_t CounterRng::mix(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t CounterRng::at(std::uint64_t index) const noexcept {
  // Two rounds so that neighbouring seeds and neighbouring counters never
  // land on the same input of the final mix.
  return mix(key_ ^ mix(index * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

double CounterRng::uniform_at(std::uint64_t index) const noexcept {
  return static_cast<double>(at(index) >> 11) * 0x1.0p-53;
}

}  // namespace rescomm
