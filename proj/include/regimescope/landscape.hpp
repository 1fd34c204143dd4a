#pragma once

#include <vector>

#include "regimescope/persistence.hpp"

namespace regimescope::landscape {

// Uniform evaluation grid eps_k = eps_max * k / (num_samples - 1), k = 0..num_samples-1.
// Every landscape and contour entering one comparison must share the same grid.
struct EpsGrid {
  double eps_max = 3.0;
  std::size_t num_samples = 2001;

  void validate() const;
  double step() const { return eps_max / static_cast<double>(num_samples - 1); }
  double value(std::size_t k) const { return eps_max * static_cast<double>(k) /
                                             static_cast<double>(num_samples - 1); }
  std::vector<double> values() const;

  friend bool operator==(const EpsGrid&, const EpsGrid&) = default;
};

// Sampled envelope functions lambda_1 >= lambda_2 >= ... >= lambda_M pointwise.
// An empty diagram still yields one all-zero envelope so lambda_1 always exists.
struct Landscape {
  EpsGrid grid;
  std::vector<std::vector<double>> envelopes;
  int dim = 1;

  const std::vector<double>& lambda(std::size_t m) const { return envelopes.at(m - 1); }
};

struct Contour {
  EpsGrid grid;
  std::vector<double> values;
  std::size_t truncation = 1;
};

struct LandscapeStats {
  double overlap_mean = 0.0;           // mean count of positive envelopes over supp(lambda_1)
  double max_half_persistence = 0.0;   // max over the grid of lambda_1
};

// Tent function of one birth-death pair: max(P/2 - |eps - H|, 0) with
// P = d - b and H = (b + d)/2. Callers replace infinite deaths by eps_max
// before evaluation.
double persistence_function(double birth, double death, double eps);

// Order-statistic landscape of the dim-d pairs of a diagram. Pairs with
// persistence < noise_floor are dropped first; infinite deaths are truncated
// to grid.eps_max before tent construction.
Landscape build_landscape(const ph::PersistenceDiagram& diagram, int dim, const EpsGrid& grid,
                          double noise_floor = 0.0);

// Pointwise mean of the first m_prime envelopes; absent envelopes count as 0,
// so the divisor is always m_prime.
Contour contour(const Landscape& landscape, std::size_t m_prime);

// Discrete Lp norm of (a - b) by trapezoid quadrature; p = infinity gives the
// max absolute difference.
double lp_norm(const Contour& a, const Contour& b, double p);

LandscapeStats landscape_stats(const Landscape& landscape);

}  // namespace regimescope::landscape
