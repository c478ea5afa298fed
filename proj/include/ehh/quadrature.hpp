// Tensor-product quadrature over [0,1]^d.
//
// The deterministic rule is composite Gauss-Legendre, refined by doubling
// the panel count until two successive levels agree. Work is split into
// slices along the first axis; each slice is summed sequentially and the
// slice totals are reduced pairwise, so the result does not depend on the
// number of worker threads.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

namespace ehh::quadrature {

using Complex = std::complex<double>;

enum class Rule { gauss_legendre, monte_carlo };

struct QuadSpec {
  Rule rule = Rule::gauss_legendre;
  int base_panels = 2;
  int nodes_per_panel = 8;
  double kappa_scaling = 0.25;
  double rel_tol = 1e-3;
  double abs_tol = 1e-15;
  int max_refinements = 4;
  std::int64_t mc_samples = 1'000'000;
  std::int64_t mc_inner_samples = 4096;
  std::uint64_t mc_seed = 20240601;
  int threads = 1;
  // false: return the last level with converged = false instead of throwing
  bool strict = true;

  void validate() const;
  /// Panels per axis at refinement level 0.
  int panels(double kappa) const;
};

struct RefinementStep {
  int panels;        // per axis; sample count per axis for monte-carlo
  double magnitude;  // |value|
  double diff;       // |value - previous|, or the sampling error estimate
};

template <class V>
struct QuadResult {
  V value{};
  double err_est = 0.0;
  bool converged = false;
  std::vector<RefinementStep> trace;
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, std::vector<RefinementStep> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<RefinementStep>& trace() const { return trace_; }

 private:
  std::vector<RefinementStep> trace_;
};

std::string format_trace(const std::vector<RefinementStep>& trace);

/// Composite Gauss-Legendre abscissae and weights on [0,1].
struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
};

/// Gauss-Legendre nodes/weights on [-1,1], cached.
const Rule1D& gauss_legendre(int n);
Rule1D composite_gl(int panels, int nodes_per_panel);

// ------------------------------------------------------------ value ops

template <class V>
struct ValueOps;

template <>
struct ValueOps<Complex> {
  static Complex zero() { return {0.0, 0.0}; }
  static void axpy(Complex& acc, double w, const Complex& v) { acc += w * v; }
  static Complex add(const Complex& a, const Complex& b) { return a + b; }
  static double norm(const Complex& v) { return std::abs(v); }
  static double dist(const Complex& a, const Complex& b) { return std::abs(a - b); }
};

template <std::size_t M>
struct ValueOps<std::array<Complex, M>> {
  using V = std::array<Complex, M>;
  static V zero() {
    V v;
    v.fill(Complex{0.0, 0.0});
    return v;
  }
  static void axpy(V& acc, double w, const V& v) {
    for (std::size_t i = 0; i < M; ++i) acc[i] += w * v[i];
  }
  static V add(const V& a, const V& b) {
    V out;
    for (std::size_t i = 0; i < M; ++i) out[i] = a[i] + b[i];
    return out;
  }
  static double norm(const V& v) {
    double s = 0.0;
    for (const auto& c : v) s += std::norm(c);
    return std::sqrt(s);
  }
  static double dist(const V& a, const V& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < M; ++i) s += std::norm(a[i] - b[i]);
    return std::sqrt(s);
  }
};

namespace detail {

/// Runs body(i) for i in [0, n) on up to `threads` workers, static blocks.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

template <class V>
V pairwise_sum(const std::vector<V>& parts, std::size_t lo, std::size_t hi) {
  if (hi - lo == 0) return ValueOps<V>::zero();
  if (hi - lo == 1) return parts[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return ValueOps<V>::add(pairwise_sum(parts, lo, mid), pairwise_sum(parts, mid, hi));
}

template <class V>
V pairwise_sum(const std::vector<V>& parts) {
  return pairwise_sum(parts, 0, parts.size());
}

inline std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= b;
  return r;
}

/// Sum over axes d..D-1 with the leading coordinates already set in x.
/// Nesting the sums axis by axis keeps rounding at O(D n eps).
template <class V, std::size_t D, std::size_t d, class F>
V tensor_rest(const F& f, const Rule1D& r, std::array<double, D>& x) {
  if constexpr (d == D) {
    return f(static_cast<const std::array<double, D>&>(x));
  } else {
    V acc = ValueOps<V>::zero();
    for (std::size_t k = 0; k < r.x.size(); ++k) {
      x[d] = r.x[k];
      ValueOps<V>::axpy(acc, r.w[k], tensor_rest<V, D, d + 1>(f, r, x));
    }
    return acc;
  }
}

/// Sum over the tensor grid with the first coordinate fixed at node i0.
template <class V, std::size_t D, class F>
V tensor_slice(const F& f, const Rule1D& r, std::size_t i0) {
  std::array<double, D> x{};
  x[0] = r.x[i0];
  V acc = ValueOps<V>::zero();
  ValueOps<V>::axpy(acc, r.w[i0], tensor_rest<V, D, 1>(f, r, x));
  return acc;
}

/// Full tensor sum, sequential.
template <class V, std::size_t D, class F>
V tensor_sum(const F& f, const Rule1D& r) {
  V acc = ValueOps<V>::zero();
  for (std::size_t i = 0; i < r.x.size(); ++i)
    acc = ValueOps<V>::add(acc, tensor_slice<V, D>(f, r, i));
  return acc;
}

template <class V>
struct McSlice {
  V sum;
  double var;  // collapsed-strata variance contribution
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

/// Stratified jittered sampling, one point per cell of an m^D grid,
/// restricted to first-axis stratum i0. Neighbouring cells are paired for
/// the variance estimate.
template <class V, std::size_t D, class F>
McSlice<V> mc_slice(const F& f, std::size_t m, std::size_t i0, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t cells = ipow(m, D - 1);
  const double h = 1.0 / static_cast<double>(m);
  const double vol = 1.0 / static_cast<double>(ipow(m, D));
  V acc = ValueOps<V>::zero();
  double var = 0.0;
  V prev = ValueOps<V>::zero();
  std::array<double, D> x{};
  for (std::size_t flat = 0; flat < cells; ++flat) {
    x[0] = (static_cast<double>(i0) + u(rng)) * h;
    std::size_t rem = flat;
    for (std::size_t d = D - 1; d >= 1; --d) {
      const std::size_t k = rem % m;
      rem /= m;
      x[d] = (static_cast<double>(k) + u(rng)) * h;
    }
    const V v = f(x);
    ValueOps<V>::axpy(acc, vol, v);
    if (flat % 2 == 1) {
      const double dv = vol * ValueOps<V>::dist(v, prev);
      var += dv * dv;
    }
    prev = v;
  }
  return {acc, var};
}

template <class V, std::size_t D, class F>
McSlice<V> mc_sum_sequential(const F& f, std::size_t m, std::uint64_t seed) {
  V acc = ValueOps<V>::zero();
  double var = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    auto s = mc_slice<V, D>(f, m, i, mix_seed(seed, i));
    acc = ValueOps<V>::add(acc, s.sum);
    var += s.var;
  }
  return {acc, var};
}

std::size_t mc_per_axis(std::int64_t samples, std::size_t dims);

template <class V>
bool close_enough(const QuadSpec& spec, const V& cur, const V& prev, double& diff) {
  diff = ValueOps<V>::dist(cur, prev);
  return diff <= std::max(spec.rel_tol * ValueOps<V>::norm(cur), spec.abs_tol);
}

template <class V>
QuadResult<V> finish_unconverged(const QuadSpec& spec, QuadResult<V> res) {
  if (spec.strict) {
    throw NonConvergence("quadrature did not converge: " + format_trace(res.trace), res.trace);
  }
  res.converged = false;
  return res;
}

}  // namespace detail

/// Integrates f over [0,1]^D. f takes std::array<double, D> and returns V
/// (Complex or std::array<Complex, M>). It must be safe to call
/// concurrently.
template <std::size_t D, class F,
          class V = std::invoke_result_t<const F&, const std::array<double, D>&>>
QuadResult<V> integrate(const F& f, const QuadSpec& spec, double kappa) {
  static_assert(D >= 1 && D <= 6, "dimension out of range");
  spec.validate();
  QuadResult<V> res;

  if (spec.rule == Rule::monte_carlo) {
    const std::size_t m = detail::mc_per_axis(spec.mc_samples, D);
    std::vector<detail::McSlice<V>> parts(m);
    detail::parallel_for(m, spec.threads, [&](std::size_t i) {
      parts[i] = detail::mc_slice<V, D>(f, m, i, detail::mix_seed(spec.mc_seed, i));
    });
    std::vector<V> sums(m);
    double var = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      sums[i] = parts[i].sum;
      var += parts[i].var;
    }
    res.value = detail::pairwise_sum(sums);
    res.err_est = std::sqrt(var);
    res.converged = true;
    res.trace.push_back({static_cast<int>(m), ValueOps<V>::norm(res.value), res.err_est});
    return res;
  }

  const int p0 = spec.panels(kappa);
  V prev{};
  for (int level = 0; level <= spec.max_refinements; ++level) {
    const int panels = p0 << level;
    const Rule1D r = composite_gl(panels, spec.nodes_per_panel);
    std::vector<V> parts(r.x.size());
    detail::parallel_for(r.x.size(), spec.threads,
                         [&](std::size_t i) { parts[i] = detail::tensor_slice<V, D>(f, r, i); });
    const V cur = detail::pairwise_sum(parts);
    double diff = ValueOps<V>::norm(cur);
    bool ok = false;
    if (level > 0) ok = detail::close_enough(spec, cur, prev, diff);
    res.trace.push_back({panels, ValueOps<V>::norm(cur), diff});
    res.value = cur;
    res.err_est = diff;
    if (ok) {
      res.converged = true;
      return res;
    }
    prev = cur;
  }
  return detail::finish_unconverged(spec, std::move(res));
}

/// Jittered stratified rule: one uniform point per cell of [0,1] split
/// into m cells, weights 1/m.
Rule1D jittered_rule(std::size_t m, std::uint64_t seed);

/// Outer integral over [0,1]^DO where the integrand at each outer node
/// needs an inner quadrature. make(inner_rule) returns the outer integrand
/// xo -> Complex built on that 1-d inner rule; this lets callers tabulate
/// inner-node data once per level. Both levels refine together. In
/// monte-carlo mode the inner rule is jittered and drawn per outer slice.
template <std::size_t DO, class Make>
QuadResult<Complex> integrate_outer_inner(const Make& make, const QuadSpec& spec, double kappa,
                                          std::size_t inner_dims = 1) {
  spec.validate();
  QuadResult<Complex> res;

  if (spec.rule == Rule::monte_carlo) {
    const std::size_t mo = detail::mc_per_axis(spec.mc_samples, DO);
    const std::size_t mi = detail::mc_per_axis(spec.mc_inner_samples, inner_dims);
    std::vector<detail::McSlice<Complex>> parts(mo);
    detail::parallel_for(mo, spec.threads, [&](std::size_t i) {
      const std::uint64_t slice_seed = detail::mix_seed(spec.mc_seed, i);
      const auto outer = make(jittered_rule(mi, detail::mix_seed(slice_seed, 0x5eed)));
      parts[i] = detail::mc_slice<Complex, DO>(outer, mo, i, slice_seed);
    });
    std::vector<Complex> sums(mo);
    double var = 0.0;
    for (std::size_t i = 0; i < mo; ++i) {
      sums[i] = parts[i].sum;
      var += parts[i].var;
    }
    res.value = detail::pairwise_sum(sums);
    res.err_est = std::sqrt(var);
    res.converged = true;
    res.trace.push_back({static_cast<int>(mo), std::abs(res.value), res.err_est});
    return res;
  }

  const int p0 = spec.panels(kappa);
  Complex prev{};
  for (int level = 0; level <= spec.max_refinements; ++level) {
    const int panels = p0 << level;
    const Rule1D r = composite_gl(panels, spec.nodes_per_panel);
    const auto outer = make(r);
    std::vector<Complex> parts(r.x.size());
    detail::parallel_for(r.x.size(), spec.threads, [&](std::size_t i) {
      parts[i] = detail::tensor_slice<Complex, DO>(outer, r, i);
    });
    const Complex cur = detail::pairwise_sum(parts);
    double diff = std::abs(cur);
    bool ok = false;
    if (level > 0) ok = detail::close_enough(spec, cur, prev, diff);
    res.trace.push_back({panels, std::abs(cur), diff});
    res.value = cur;
    res.err_est = diff;
    if (ok) {
      res.converged = true;
      return res;
    }
    prev = cur;
  }
  return detail::finish_unconverged(spec, std::move(res));
}

/// Outer integral over [0,1]^DO of combine(xo, inner(xo)), where inner(xo)
/// is the integral over [0,1]^DI of f(xo, xi). combine is where pointwise
/// absolute values go.
template <std::size_t DO, std::size_t DI, class F, class G,
          class V = std::invoke_result_t<const F&, const std::array<double, DO>&,
                                         const std::array<double, DI>&>>
QuadResult<Complex> integrate_nested(const F& f, const G& combine, const QuadSpec& spec,
                                     double kappa) {
  auto make = [&](const Rule1D& r) {
    return [&f, &combine, r](const std::array<double, DO>& xo) -> Complex {
      auto g = [&](const std::array<double, DI>& xi) { return f(xo, xi); };
      return combine(xo, detail::tensor_sum<V, DI>(g, r));
    };
  };
  return integrate_outer_inner<DO>(make, spec, kappa, DI);
}

}  // namespace ehh::quadrature
