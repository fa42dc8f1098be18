#include "chargegrid/leaves.hpp"

#include <array>

namespace chargegrid {

namespace {
constexpr std::array<int, 8> kLeafCounts{3, 6, 10, 13, 1, 6, 9, 8};
}

std::string to_string(LeafId id) {
  return "L" + std::to_string(id.event) + "," + std::to_string(id.index);
}

int leaf_count(Event e) { return kLeafCounts[event_index(e) - 1]; }

std::vector<LeafId> leaves_of(Event e) {
  std::vector<LeafId> out;
  for (int i = 1; i <= leaf_count(e); ++i) out.push_back({event_index(e), i});
  return out;
}

int leaf_flat_index(LeafId id) {
  if (id.event < 1 || id.event > 8 || id.index < 1 || id.index > kLeafCounts[id.event - 1])
    throw ParameterError("unknown leaf " + to_string(id));
  int base = 0;
  for (int e = 1; e < id.event; ++e) base += kLeafCounts[e - 1];
  return base + id.index - 1;
}

int total_leaf_count() {
  int n = 0;
  for (int c : kLeafCounts) n += c;
  return n;
}

bool leaf_never_passes(LeafId id) {
  if (id.event == 4) return id.index == 2 || id.index == 4;
  if (id.event == 8) return id.index == 1 || id.index == 2 || id.index == 4;
  return false;
}

}  // namespace chargegrid
