#pragma once

#include <span>
#include <vector>

#include "anderson/lanczos.hpp"

namespace anderson {

/// Candidate rescaling exponents a, an arithmetic mesh.
struct Mesh {
  double min = 0.05;
  double step = 0.05;
  double max = 2.0;
  std::vector<double> values() const;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0; // sum of squared fit errors
};

/// Ordinary least squares of D^n against x_n = n^{-a} for n = crop..n_max
/// (n = 0 is always excluded; x is undefined there). The intercept is the
/// extrapolated value at x = 0, i.e. n -> infinity. Requires >= 3 points.
LineFit rescale_fit(std::span<const double> series, int crop, double a);

/// Minimum y-intercept over the lines through consecutive points in
/// rescaled coordinates: the worst-case extrapolation, an underestimate of
/// the limit for convex data. Runs of exactly equal distances count as one
/// point (see the implementation note). Requires >= 2 points after crop;
/// a constant series yields the constant.
double worst_case_intercept(std::span<const double> series, int crop, double a);

/// Result of the mesh search for the best rescaling exponent.
struct RescaleFit {
  double a = 0.0;
  double slope = 0.0;
  double y = 0.0;        // best-fit intercept at x = 0
  double L = 0.0;        // worst-case consecutive-pair intercept
  double residual = 0.0;
  bool usable = false;          // a >= 0.1
  bool concave_at_floor = false; // mesh floor fit curved the wrong way
  int crop = 0;
};

/// Picks the mesh exponent with the smallest least-squares residual, ties
/// broken toward larger a (the faster-decay, conservative extrapolation).
/// A trial is usable only when the winner satisfies a >= 0.1; when the mesh
/// floor wins, the rescaled data is additionally tested for concavity (a
/// concave graph yields no usable lower bound).
RescaleFit optimal_a(std::span<const double> series, int crop,
                     const Mesh& mesh = {});

inline RescaleFit optimal_a(const DistanceSeries& series, int crop,
                            const Mesh& mesh = {}) {
  return optimal_a(std::span<const double>(series.values), crop, mesh);
}

/// Quadratic-in-x fit used to classify mesh-floor trials: concave when the
/// quadratic coefficient is negative with magnitude above 3x its standard
/// error.
bool concave_in_rescaled_coords(std::span<const double> series, int crop,
                                double a);

/// Pointwise arithmetic mean of several realizations (equal c and n_max).
DistanceSeries average_series(std::span<const DistanceSeries> series);

/// Per-realization summary fed into the ensemble criterion.
struct FitSummary {
  bool usable = false;
  double y = 0.0;
  double L = 0.0;
};

struct CriterionThresholds {
  double l_min = 0.9;       // required worst-case intercept
  double gap = 5e-3;        // allowed y - L
  double fraction = 0.9;    // required fraction of passing realizations
};

struct CriterionVerdict {
  double c = 0.0;
  int n_realizations = 0;
  double fraction_usable = 0.0;  // share of realizations with a usable a
  double fraction_passing = 0.0; // usable and L > l_min and y - L <= gap
  double min_y = 0.0;            // minima over usable realizations
  double min_L = 0.0;
  bool has_minima = false;       // false when no realization was usable
  bool delocalized = false;
};

/// Ensemble criterion for one disorder value: delocalized when at least
/// `fraction` of the realizations are usable with L > l_min and y - L within
/// the gap.
CriterionVerdict evaluate_criterion(std::span<const FitSummary> results, double c,
                                    const CriterionThresholds& thresholds = {});

} // namespace anderson
