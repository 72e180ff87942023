#include "anderson/lanczos.hpp"

#include <cmath>
#include <utility>

namespace anderson {

namespace {

// w <- w - a*v - b*u over w's active box, returning ||w|| of the result.
// u and v may have smaller supports; their stored zeros make the extra reads
// exact. Fusing the update with the norm saves one sweep per step.
double orthogonalize_and_norm(Field& w, double a, const Field& v, double b,
                              const Field& u) {
  const LatticeSpec& spec = w.spec();
  const int ext = detail::box_extent(spec, w.active_radius());
  double* wp = w.data();
  const double* vp = v.data();
  const double* up = u.data();
  const std::int64_t len = 2 * static_cast<std::int64_t>(ext) + 1;
  double acc = 0.0;
  auto run_row = [&](std::int64_t base) {
    for (std::int64_t i = 0; i < len; ++i) {
      const double x = wp[base + i] - a * vp[base + i] - b * up[base + i];
      wp[base + i] = x;
      acc += x * x;
    }
  };
  if (spec.d() == 2) {
    for (int x = -ext; x <= ext; ++x) run_row(spec.offset_of({x, -ext, 0}));
  } else {
    for (int x = -ext; x <= ext; ++x)
      for (int y = -ext; y <= ext; ++y) run_row(spec.offset_of({x, y, -ext}));
  }
  return std::sqrt(acc);
}

} // namespace

DistanceSeries probe(const Potential& pot, const Coord& source,
                     const Coord& target, int n_max,
                     const ProbeOptions& options) {
  const LatticeSpec& spec = pot.spec();
  if (n_max < 0) throw DomainError("probe: n_max must be >= 0");
  if (!spec.contains(source) || !spec.contains(target))
    throw DomainError("probe: source or target outside lattice");
  if (source == target) throw DomainError("probe: source and target must differ");

  DistanceSeries series;
  series.d = spec.d();
  series.M = spec.M();
  series.c = pot.c();
  series.seed = pot.seed();
  series.convention = pot.convention();
  series.source = source;
  series.target = target;
  series.n_max = n_max;
  series.values.reserve(static_cast<std::size_t>(n_max) + 1);
  series.alpha.reserve(static_cast<std::size_t>(n_max));
  series.beta.reserve(static_cast<std::size_t>(n_max));

  const std::int64_t target_offset = spec.offset_of(target);

  Field v_prev(spec);                       // v_{k-1}
  Field v_curr = delta_field(spec, source); // v_k
  Field work(spec);                         // receives H v_k
  double beta_prev = 0.0;
  double dist_sq = 1.0;

  for (int k = 0; k <= n_max; ++k) {
    if (options.observer) options.observer(k, v_curr);
    const double ck = v_curr.data()[target_offset];
    dist_sq -= ck * ck;
    if (dist_sq < 0.0) dist_sq = 0.0; // rounding can overshoot by ~1e-15
    series.values.push_back(std::sqrt(dist_sq));
    if (k == n_max) break;

    if (apply(pot, v_curr, work, options.truncation)) series.truncation_flag = true;
    const double alpha = inner(work, v_curr);
    const double beta_next =
        orthogonalize_and_norm(work, alpha, v_curr, beta_prev, v_prev);
    series.alpha.push_back(alpha);

    // ||H v_k||^2 = alpha^2 + beta_k^2 + beta_{k+1}^2 by orthonormality of
    // the recurrence, so no extra norm sweep is needed for the breakdown
    // scale.
    const double h_norm = std::sqrt(alpha * alpha + beta_prev * beta_prev +
                                    beta_next * beta_next);
    if (beta_next <= options.breakdown_rtol * h_norm) {
      series.breakdown_step = k;
      const double last = series.values.back();
      while (static_cast<int>(series.values.size()) <= n_max)
        series.values.push_back(last);
      break;
    }
    series.beta.push_back(beta_next);
    scale(1.0 / beta_next, work);

    Field recycled = std::move(v_prev);
    v_prev = std::move(v_curr);
    v_curr = std::move(work);
    work = std::move(recycled);
    beta_prev = beta_next;
  }
  return series;
}

std::pair<DistanceSeries, KrylovBasis> probe_with_basis(
    const Potential& pot, const Coord& source, const Coord& target, int n_max,
    const ProbeOptions& options, std::int64_t max_basis_bytes) {
  const std::int64_t bytes = pot.spec().total_sites() *
                             (static_cast<std::int64_t>(n_max) + 1) *
                             static_cast<std::int64_t>(sizeof(double));
  if (bytes > max_basis_bytes)
    throw SizingError("krylov basis requires " + std::to_string(bytes) +
                      " bytes, budget is " + std::to_string(max_basis_bytes) +
                      " bytes");
  KrylovBasis basis;
  basis.columns.reserve(static_cast<std::size_t>(n_max) + 1);
  ProbeOptions opts = options;
  StepObserver outer = options.observer;
  opts.observer = [&basis, &outer](int k, const Field& v) {
    basis.columns.push_back(v);
    if (outer) outer(k, v);
  };
  DistanceSeries series = probe(pot, source, target, n_max, opts);
  return {std::move(series), std::move(basis)};
}

double ortho_diagnostic(const KrylovBasis& basis) {
  const std::size_t n = basis.columns.size();
  if (n == 0) throw DomainError("ortho_diagnostic: empty basis");
  std::vector<double> row_sum(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double g = inner(basis.columns[i], basis.columns[j]) -
                       (i == j ? 1.0 : 0.0);
      const double a = std::abs(g);
      row_sum[i] += a;
      if (j != i) row_sum[j] += a;
    }
  }
  double q = 0.0;
  for (double r : row_sum)
    if (r > q) q = r;
  return q;
}

} // namespace anderson
