#include "cdpr/scalar_min.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace cdpr {

double QuarticCoeffs::magnitude(double a) const {
  const double x = std::abs(a);
  return (((std::abs(d4) * x + std::abs(d3)) * x + std::abs(d2)) * x + std::abs(d1)) * x +
         std::abs(d0);
}

namespace {

constexpr double kTieRatio = 1e-12;

struct Poly3 {
  double a3, a2, a1, a0;
  double operator()(double x) const { return ((a3 * x + a2) * x + a1) * x + a0; }
  double slope(double x) const { return (3.0 * a3 * x + 2.0 * a2) * x + a1; }
};

void push_root(CubicRoots& out, double r) {
  if (std::isfinite(r) && out.count < out.values.size()) out.values[out.count++] = r;
}

void polish_and_collapse(const Poly3& p, CubicRoots& out) {
  for (std::size_t k = 0; k < out.count; ++k) {
    double& r = out.values[k];
    const double s = p.slope(r);
    if (s != 0.0) {
      const double next = r - p(r) / s;
      if (std::isfinite(next) && std::abs(p(next)) <= std::abs(p(r))) r = next;
    }
  }
  std::sort(out.values.begin(), out.values.begin() + static_cast<std::ptrdiff_t>(out.count));
  std::size_t kept = 0;
  for (std::size_t k = 0; k < out.count; ++k) {
    const double r = out.values[k];
    if (kept > 0) {
      const double prev = out.values[kept - 1];
      if (std::abs(r - prev) <= 1e-12 * std::max(1.0, std::abs(r))) {
        if (std::abs(p(r)) < std::abs(p(prev))) out.values[kept - 1] = r;
        continue;
      }
    }
    out.values[kept++] = r;
  }
  out.count = kept;
}

void solve_linear(double a1, double a0, CubicRoots& out) {
  const double scale = std::max(std::abs(a1), std::abs(a0));
  if (scale == 0.0) {
    out.identically_zero = true;
    return;
  }
  if (std::abs(a1) < kDegeneracyRatio * scale) return;  // nonzero constant
  push_root(out, -a0 / a1);
}

void solve_quadratic(double a2, double a1, double a0, CubicRoots& out) {
  const double scale = std::max({std::abs(a2), std::abs(a1), std::abs(a0)});
  if (scale == 0.0 || std::abs(a2) < kDegeneracyRatio * scale) {
    solve_linear(a1, a0, out);
    return;
  }
  const double disc = a1 * a1 - 4.0 * a2 * a0;
  if (disc < 0.0) return;
  if (disc == 0.0) {
    push_root(out, -a1 / (2.0 * a2));
    return;
  }
  // Cancellation-free pair of roots.
  const double q = -0.5 * (a1 + std::copysign(std::sqrt(disc), a1));
  push_root(out, q / a2);
  if (q != 0.0) push_root(out, a0 / q);
}

void solve_monic_cubic(double a3, double a2, double a1, double a0, CubicRoots& out) {
  const double a = a2 / a3;
  const double b = a1 / a3;
  const double c = a0 / a3;
  const double q = (a * a - 3.0 * b) / 9.0;
  const double r = (2.0 * a * a * a - 9.0 * a * b + 27.0 * c) / 54.0;
  const double q3 = q * q * q;
  const double shift = a / 3.0;
  if (q > 0.0 && r * r <= q3 * (1.0 + 1e-12)) {
    // Three real roots.
    const double ratio = std::clamp(r / std::sqrt(q3), -1.0, 1.0);
    const double theta = std::acos(ratio);
    const double amp = -2.0 * std::sqrt(q);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    push_root(out, amp * std::cos(theta / 3.0) - shift);
    push_root(out, amp * std::cos((theta + two_pi) / 3.0) - shift);
    push_root(out, amp * std::cos((theta - two_pi) / 3.0) - shift);
  } else {
    const double big = -std::copysign(std::cbrt(std::abs(r) + std::sqrt(r * r - q3)), r);
    const double small = big != 0.0 ? q / big : 0.0;
    push_root(out, big + small - shift);
  }
}

CubicRoots solve_cubic_impl(double a3, double a2, double a1, double a0, bool allow_demotion) {
  CubicRoots out;
  const double scale = std::max({std::abs(a3), std::abs(a2), std::abs(a1), std::abs(a0)});
  if (scale == 0.0) {
    out.identically_zero = true;
    return out;
  }
  const bool demote = allow_demotion ? std::abs(a3) < kDegeneracyRatio * scale : a3 == 0.0;
  if (demote) {
    solve_quadratic(a2, a1, a0, out);
  } else {
    solve_monic_cubic(a3, a2, a1, a0, out);
    if (out.count == 0 && allow_demotion == false) {
      // Overflow in the monic form; nothing finite was produced.
      return solve_cubic_impl(a3, a2, a1, a0, true);
    }
  }
  polish_and_collapse(Poly3{a3, a2, a1, a0}, out);
  return out;
}

// Roots of phi'. When d4 > 0 the far stationary points of a quartic with a
// relatively tiny quartic term still matter, so the degree is kept.
CubicRoots stationary_points(const QuarticCoeffs& c) {
  return solve_cubic_impl(4.0 * c.d4, 3.0 * c.d3, 2.0 * c.d2, c.d1, !(c.d4 > 0.0));
}

template <class Value, class Magnitude>
ScalarMin pick_best(std::span<const double> candidates, Value value, Magnitude magnitude) {
  ScalarMin best{0.0, std::numeric_limits<double>::infinity()};
  double best_mag = 0.0;
  bool first = true;
  for (double a : candidates) {
    const double v = value(a);
    const double mag = magnitude(a);
    if (first) {
      best = {a, v};
      best_mag = mag;
      first = false;
      continue;
    }
    const double tie = kTieRatio * std::max(mag, best_mag);
    bool take;
    if (v < best.value - tie) {
      take = true;
    } else if (v > best.value + tie) {
      take = false;
    } else {
      const double abs_a = std::abs(a), abs_b = std::abs(best.arg);
      take = abs_a < abs_b || (abs_a == abs_b && a < best.arg);
    }
    if (take) {
      best = {a, v};
      best_mag = mag;
    }
  }
  return best;
}

ScalarMin pick_best(std::span<const double> candidates, const QuarticCoeffs& c) {
  return pick_best(
      candidates, [&](double a) { return c(a); }, [&](double a) { return c.magnitude(a); });
}

}  // namespace

CubicRoots solve_cubic(double a3, double a2, double a1, double a0) {
  return solve_cubic_impl(a3, a2, a1, a0, true);
}

ScalarMin minimize_quartic(const QuarticCoeffs& c) {
  if (!(c.d4 >= 0.0)) throw std::domain_error("minimize_quartic: negative quartic term");
  if (c.d4 == 0.0) {
    if (c.d3 != 0.0 || c.d2 < 0.0 || (c.d2 == 0.0 && c.d1 != 0.0)) {
      throw std::domain_error("minimize_quartic: polynomial is unbounded below");
    }
    if (c.d2 == 0.0) return {0.0, c.d0};
  }
  const CubicRoots roots = stationary_points(c);
  if (roots.identically_zero || roots.count == 0) return {0.0, c.d0};
  return pick_best(roots.roots(), c);
}

ScalarMin minimize_quartic_interval(const QuarticCoeffs& c, double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("minimize_quartic_interval: empty interval");
  std::vector<double> candidates{lo, hi};
  const CubicRoots roots = stationary_points(c);
  if (roots.identically_zero) candidates.push_back(std::clamp(0.0, lo, hi));
  for (double r : roots.roots()) {
    if (r > lo && r < hi) candidates.push_back(r);
  }
  return pick_best(candidates, c);
}

ScalarMin fost(double u4, double u3, double u2, double u1, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("fost: tau must be non-negative");
  if (!(u4 >= 0.0)) throw std::invalid_argument("fost: u4 must be non-negative");
  if (u4 == 0.0) {
    if (u3 != 0.0 || u2 < 0.0 || (u2 == 0.0 && std::abs(u1) > tau)) {
      throw std::domain_error("fost: objective is unbounded below");
    }
    if (u2 == 0.0) return {0.0, 0.0};
  }
  const QuarticCoeffs smooth{u4, u3, u2, u1, 0.0};
  auto psi = [&](double b) { return smooth(b) + tau * std::abs(b); };
  auto mag = [&](double b) { return smooth.magnitude(b) + tau * std::abs(b); };

  std::vector<double> candidates{0.0};
  const bool keep_degree = u4 > 0.0;
  const CubicRoots pos = solve_cubic_impl(4.0 * u4, 3.0 * u3, 2.0 * u2, u1 + tau, !keep_degree);
  for (double r : pos.roots()) {
    if (r > 0.0) candidates.push_back(r);
  }
  const CubicRoots neg = solve_cubic_impl(4.0 * u4, 3.0 * u3, 2.0 * u2, u1 - tau, !keep_degree);
  for (double r : neg.roots()) {
    if (r < 0.0) candidates.push_back(r);
  }
  return pick_best(candidates, psi, mag);
}

QuarticCoeffs direction_coeffs(std::span<const cplx> z, std::span<const cplx> w,
                               std::span<const double> b) {
  if (z.size() != w.size() || z.size() != b.size()) {
    throw std::invalid_argument("direction_coeffs: length mismatch");
  }
  QuarticCoeffs c;
  for (std::size_t m = 0; m < z.size(); ++m) {
    const double c2 = std::norm(w[m]);
    const double c1 = 2.0 * (z[m].real() * w[m].real() + z[m].imag() * w[m].imag());
    const double r = std::norm(z[m]) - b[m];
    c.d4 += c2 * c2;
    c.d3 += 2.0 * c2 * c1;
    c.d2 += c1 * c1 + 2.0 * c2 * r;
    c.d1 += 2.0 * c1 * r;
    c.d0 += r * r;
  }
  return c;
}

CoordinateQuartic assemble_coordinate(const MeasurementEnsemble& ens, SolverState& state,
                                      std::size_t i) {
  const std::size_t n = ens.signal_length();
  if (i >= 2 * n) throw std::out_of_range("coordinate index out of range");
  const bool imag = i >= n;
  const auto col = ens.vectors().column(imag ? i - n : i);
  const auto b = ens.intensities();
  const std::size_t count = col.size();

  // Deferred cache update from the previous step, fused into this pass.
  const cplx* pending_col = nullptr;
  cplx pending_step{0.0, 0.0};
  if (state.pending) {
    const auto p = *state.pending;
    const bool p_imag = p.index >= n;
    pending_col = ens.vectors().column(p_imag ? p.index - n : p.index).data();
    pending_step = p_imag ? cplx{0.0, p.delta} : cplx{p.delta, 0.0};
    state.pending.reset();
    ++state.updates_since_refresh;
    state.work.entry_touches += count;
  }

  CoordinateQuartic out;
  QuarticCoeffs& c = out.coeffs;
  double err_lin = 0.0, err_sq = 0.0;
  for (std::size_t m = 0; m < count; ++m) {
    cplx& zm = state.z[m];
    if (pending_col) zm += pending_step * std::conj(pending_col[m]);
    const cplx a = col[m];
    const cplx t = zm * a;
    // c1 = 2 e_i^T Abar_m xbar: Re(z a) on the real half, Im(z a) on the imaginary half.
    const double c1 = 2.0 * (imag ? t.imag() : t.real());
    const double c2 = std::norm(a);
    const double c0 = std::norm(zm);
    const double r = c0 - b[m];
    c.d4 += c2 * c2;
    c.d3 += 2.0 * c2 * c1;
    c.d2 += c1 * c1 + 2.0 * c2 * r;
    c.d1 += 2.0 * c1 * r;
    c.d0 += r * r;
    const double s = c0 + std::abs(b[m]);
    err_lin += std::abs(r) * s;
    err_sq += s * s;
  }
  state.work.row_touches += count;
  state.work.entry_touches += count;

  const double u = (8.0 + static_cast<double>(state.updates_since_refresh)) *
                   std::numeric_limits<double>::epsilon();
  out.eval_error = 2.0 * u * err_lin + u * u * err_sq + 4.0 * u * c.d0;
  return out;
}

}  // namespace cdpr
