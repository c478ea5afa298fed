#include "ehh/quadrature.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <numbers>

namespace ehh::quadrature {

void QuadSpec::validate() const {
  if (base_panels < 1) throw std::invalid_argument("base_panels must be >= 1");
  if (nodes_per_panel < 4 || nodes_per_panel > 16)
    throw std::invalid_argument("nodes_per_panel must be in 4..16");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");
  if (!(abs_tol >= 0.0)) throw std::invalid_argument("abs_tol must be nonnegative");
  if (!(kappa_scaling >= 0.0)) throw std::invalid_argument("kappa_scaling must be nonnegative");
  if (max_refinements < 1 || max_refinements > 8)
    throw std::invalid_argument("max_refinements must be in 1..8");
  if (rule == Rule::monte_carlo && (mc_samples < 1 || mc_inner_samples < 1))
    throw std::invalid_argument("monte-carlo sample counts must be positive");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

int QuadSpec::panels(double kappa) const {
  const double scaled = std::ceil(kappa_scaling * kappa);
  return base_panels * std::max(1, static_cast<int>(scaled));
}

std::string format_trace(const std::vector<RefinementStep>& trace) {
  std::string out;
  for (const auto& s : trace) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "[panels=%d |I|=%.6g diff=%.3g]", s.panels, s.magnitude,
                  s.diff);
    out += buf;
  }
  return out;
}

const Rule1D& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, Rule1D> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  Rule1D r;
  r.x.resize(static_cast<std::size_t>(n));
  r.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      // n >= 1: p1 = P_n, p0 = P_{n-1}
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x[static_cast<std::size_t>(i)] = -z;
    r.x[static_cast<std::size_t>(n - 1 - i)] = z;
    r.w[static_cast<std::size_t>(i)] = w;
    r.w[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) r.x[static_cast<std::size_t>(n / 2)] = 0.0;
  return cache.emplace(n, std::move(r)).first->second;
}

Rule1D composite_gl(int panels, int nodes_per_panel) {
  const Rule1D& g = gauss_legendre(nodes_per_panel);
  Rule1D r;
  const double h = 1.0 / panels;
  r.x.reserve(static_cast<std::size_t>(panels * nodes_per_panel));
  r.w.reserve(r.x.capacity());
  for (int p = 0; p < panels; ++p) {
    const double a = p * h;
    for (std::size_t k = 0; k < g.x.size(); ++k) {
      r.x.push_back(a + 0.5 * h * (g.x[k] + 1.0));
      r.w.push_back(0.5 * h * g.w[k]);
    }
  }
  return r;
}

Rule1D jittered_rule(std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Rule1D r;
  r.x.resize(m);
  r.w.assign(m, 1.0 / static_cast<double>(m));
  for (std::size_t k = 0; k < m; ++k) r.x[k] = (static_cast<double>(k) + u(rng)) / static_cast<double>(m);
  return r;
}

namespace detail {

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  const std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n);
  if (t <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(t);
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (std::size_t w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      try {
        const std::size_t lo = n * w / t, hi = n * (w + 1) / t;
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finaliser
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::size_t mc_per_axis(std::int64_t samples, std::size_t dims) {
  auto m = static_cast<std::size_t>(
      std::floor(std::pow(static_cast<double>(samples), 1.0 / static_cast<double>(dims)) + 1e-9));
  return std::max<std::size_t>(m, 2);
}

}  // namespace detail

}  // namespace ehh::quadrature
