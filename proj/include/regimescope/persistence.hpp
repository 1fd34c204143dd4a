#pragma once

#include <limits>
#include <vector>

#include "regimescope/filtration.hpp"

namespace regimescope::ph {

inline constexpr double kInfiniteDeath = std::numeric_limits<double>::infinity();

struct PersistencePair {
  double birth = 0.0;
  double death = 0.0;  // kInfiniteDeath for features alive at eps_max
  int dim = 0;         // 0 or 1

  double persistence() const { return death - birth; }
  bool infinite() const { return death == kInfiniteDeath; }

  friend bool operator==(const PersistencePair&, const PersistencePair&) = default;
};

// Pairs sorted by (dim, birth, death); zero-persistence pairs are dropped.
struct PersistenceDiagram {
  std::vector<PersistencePair> pairs;

  std::size_t count(int dim) const;
  std::vector<PersistencePair> dim_pairs(int dim) const;
};

void sort_pairs(std::vector<PersistencePair>& pairs);

// Boundary-matrix column reduction over Z2 with the clearing optimization:
// triangle columns are reduced first, and every edge paired there is skipped
// in the edge pass. Emits dim-0 and dim-1 pairs; features alive at eps_max
// get infinite death.
PersistenceDiagram persistence(const FilteredComplex& complex);

// Elder-rule union-find computation of the dim-0 part only. Must agree with
// the dim-0 pairs of persistence() exactly.
PersistenceDiagram h0_union_find(const FilteredComplex& complex);

}  // namespace regimescope::ph
