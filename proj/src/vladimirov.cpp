#include "ultracoral/vladimirov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ultracoral/sym_eigen.hpp"

namespace ultracoral {

namespace {

bool is_integral(double x) { return x == std::floor(x); }

double ipow(double base, long long n) {
  double result = 1.0;
  double b = base;
  while (n > 0) {
    if (n & 1) result *= b;
    b *= b;
    n >>= 1;
  }
  return result;
}

long long llpow(long long base, int n) {
  long long r = 1;
  for (int k = 0; k < n; ++k) r *= base;
  return r;
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("vladimirov: alpha must be > 0");
}

}  // namespace

double vladimirov_kappa(long long p, double alpha) {
  check_alpha(alpha);
  double pd = static_cast<double>(p);
  return (std::pow(pd, alpha) - 1.0) / (1.0 - std::pow(pd, -alpha - 1.0));
}

double vladimirov_mu(long long p, double alpha) {
  check_alpha(alpha);
  double pd = static_cast<double>(p);
  return std::pow(pd, alpha) * (pd - 1.0) / (std::pow(pd, alpha + 1.0) - 1.0);
}

double level_coupling(long long p, double alpha, int k) {
  if (is_integral(alpha))
    return ipow(static_cast<double>(p), static_cast<long long>(alpha + 1.0) * k);
  return std::pow(static_cast<double>(p), (alpha + 1.0) * k);
}

GeneratorMatrix build_generator(long long p, int m, double alpha) {
  IndexLattice lattice(p, m);  // validates p, m, compartment cap
  check_alpha(alpha);
  if (static_cast<std::size_t>(lattice.size) > GeneratorMatrix::kDenseCap)
    throw std::invalid_argument("build_generator: size cap exceeded for the dense matrix");

  GeneratorMatrix gen;
  gen.p = p;
  gen.m = m;
  gen.alpha = alpha;
  gen.kappa = vladimirov_kappa(p, alpha);
  gen.mu = vladimirov_mu(p, alpha);
  gen.size = static_cast<std::size_t>(lattice.size);
  gen.entries.assign(gen.size * gen.size, 0.0);

  const double scale = gen.kappa * ipow(1.0 / static_cast<double>(p), m);
  std::vector<double> coupling(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k)
    coupling[static_cast<std::size_t>(k)] = scale * level_coupling(p, alpha, k);

  const long long n = lattice.size;
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (long long j = 0; j < n; ++j) {
      if (j == i) continue;
      double value = coupling[static_cast<std::size_t>(divergence_level(i, j, p, m))];
      gen.entries[static_cast<std::size_t>(i * n + j)] = value;
      row_sum += value;
    }
    gen.entries[static_cast<std::size_t>(i * n + i)] = -row_sum;
  }
  return gen;
}

std::vector<double> apply_dense(const GeneratorMatrix& gen, std::span<const double> x) {
  if (x.size() != gen.size) throw std::invalid_argument("apply_dense: dimension mismatch");
  std::vector<double> y(gen.size);
  for (std::size_t i = 0; i < gen.size; ++i) {
    double acc = 0.0;
    const double* row = gen.entries.data() + i * gen.size;
    for (std::size_t j = 0; j < gen.size; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
  return y;
}

std::vector<double> apply_dense_parallel(const GeneratorMatrix& gen,
                                         std::span<const double> x) {
  if (x.size() != gen.size) throw std::invalid_argument("apply_dense: dimension mismatch");
  std::vector<double> y(gen.size);
  const long long n = static_cast<long long>(gen.size);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    double acc = 0.0;
    const double* row = gen.entries.data() + static_cast<std::size_t>(i) * gen.size;
    for (std::size_t j = 0; j < gen.size; ++j) acc += row[j] * x[j];
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

namespace {

struct FastPlan {
  long long p;
  int m;
  std::size_t n;
  double scale;                  // kappa * p^-m
  std::vector<double> coupling;  // p^(k(alpha+1)), k = 0..m-1
  double diag;                   // c: the coupling sum against x = 1
  std::vector<long long> pk;     // p^k, k = 0..m
};

FastPlan make_plan(long long p, int m, double alpha) {
  IndexLattice lattice(p, m);
  check_alpha(alpha);
  FastPlan plan;
  plan.p = p;
  plan.m = m;
  plan.n = static_cast<std::size_t>(lattice.size);
  plan.scale = vladimirov_kappa(p, alpha) * ipow(1.0 / static_cast<double>(p), m);
  plan.coupling.resize(static_cast<std::size_t>(m));
  plan.pk.resize(static_cast<std::size_t>(m) + 1);
  for (int k = 0; k <= m; ++k) plan.pk[static_cast<std::size_t>(k)] = llpow(p, k);
  double diag = 0.0;
  for (int k = 0; k < m; ++k) {
    plan.coupling[static_cast<std::size_t>(k)] = level_coupling(p, alpha, k);
    // count of indices at divergence level exactly k: p^(m-k) - p^(m-k-1)
    double count = static_cast<double>(plan.pk[static_cast<std::size_t>(m - k)] -
                                       plan.pk[static_cast<std::size_t>(m - k - 1)]);
    diag += plan.coupling[static_cast<std::size_t>(k)] * count;
  }
  plan.diag = plan.scale * diag;
  return plan;
}

// S[k][q] = sum of x_j over the ball {j : j = q mod p^k}; S[m] is x itself
std::vector<std::vector<double>> ball_sums(const FastPlan& plan, std::span<const double> x) {
  std::vector<std::vector<double>> s(static_cast<std::size_t>(plan.m) + 1);
  s[static_cast<std::size_t>(plan.m)].assign(x.begin(), x.end());
  for (int k = plan.m - 1; k >= 0; --k) {
    const auto& fine = s[static_cast<std::size_t>(k + 1)];
    auto& coarse = s[static_cast<std::size_t>(k)];
    long long pk = plan.pk[static_cast<std::size_t>(k)];
    coarse.assign(static_cast<std::size_t>(pk), 0.0);
    for (long long q = 0; q < pk; ++q) {
      double acc = 0.0;
      for (long long c = 0; c < plan.p; ++c)
        acc += fine[static_cast<std::size_t>(q + c * pk)];
      coarse[static_cast<std::size_t>(q)] = acc;
    }
  }
  return s;
}

}  // namespace

std::vector<double> apply_fast(long long p, int m, double alpha,
                               std::span<const double> x, bool parallel) {
  FastPlan plan = make_plan(p, m, alpha);
  if (x.size() != plan.n) throw std::invalid_argument("apply_fast: dimension mismatch");
  auto sums = ball_sums(plan, x);

  std::vector<double> y(plan.n);
  auto eval = [&](long long i) {
    double acc = 0.0;
    for (int k = 0; k < plan.m; ++k) {
      long long pk = plan.pk[static_cast<std::size_t>(k)];
      long long pk1 = plan.pk[static_cast<std::size_t>(k + 1)];
      double shell = sums[static_cast<std::size_t>(k)][static_cast<std::size_t>(i % pk)] -
                     sums[static_cast<std::size_t>(k + 1)][static_cast<std::size_t>(i % pk1)];
      acc += plan.coupling[static_cast<std::size_t>(k)] * shell;
    }
    y[static_cast<std::size_t>(i)] =
        plan.scale * acc - plan.diag * x[static_cast<std::size_t>(i)];
  };

  const long long n = static_cast<long long>(plan.n);
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) eval(i);
  } else {
    for (long long i = 0; i < n; ++i) eval(i);
  }
  return y;
}

std::vector<double> apply_fast(long long p, int m, double alpha,
                               std::span<const double> x) {
  return apply_fast(p, m, alpha, x, x.size() >= 4096);
}

std::vector<SpectrumLine> expected_spectrum(long long p, int m, double alpha) {
  check_alpha(alpha);
  if (m < 0) throw std::invalid_argument("expected_spectrum: m must be >= 0");
  double mu = vladimirov_mu(p, alpha);
  std::vector<SpectrumLine> lines;
  for (int r = 0; r > -m; --r) {
    double lambda;
    if (is_integral(alpha))
      lambda = ipow(static_cast<double>(p), static_cast<long long>(alpha) * (1 - r));
    else
      lambda = std::pow(static_cast<double>(p), (1.0 - r) * alpha);
    lines.push_back({-(lambda - mu), (p - 1) * llpow(p, -r)});
  }
  lines.push_back({0.0, 1});
  std::sort(lines.begin(), lines.end(),
            [](const SpectrumLine& a, const SpectrumLine& b) {
              return a.eigenvalue < b.eigenvalue;
            });
  return lines;
}

namespace {

// generator rebuilt in double-double, same formula as build_generator
std::vector<DD> build_generator_dd(long long p, int m, double alpha, std::size_t n) {
  DD pd(static_cast<double>(p));
  bool integral = is_integral(alpha);
  long long ai = static_cast<long long>(alpha);

  DD p_alpha = integral ? dd_ipow(pd, ai) : DD(std::pow(static_cast<double>(p), alpha));
  DD p_alpha1 = integral ? dd_ipow(pd, ai + 1) : DD(std::pow(static_cast<double>(p), alpha + 1.0));
  DD kappa = (p_alpha - DD(1.0)) / (DD(1.0) - DD(1.0) / p_alpha1);
  DD scale = kappa / dd_ipow(pd, m);

  std::vector<DD> coupling(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    if (integral)
      coupling[static_cast<std::size_t>(k)] = scale * dd_ipow(pd, (ai + 1) * k);
    else
      coupling[static_cast<std::size_t>(k)] =
          scale * DD(std::pow(static_cast<double>(p), (alpha + 1.0) * k));
  }

  std::vector<DD> a(n * n, DD(0.0));
  for (std::size_t i = 0; i < n; ++i) {
    DD row_sum(0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      int k = divergence_level(static_cast<long long>(i), static_cast<long long>(j), p, m);
      a[i * n + j] = coupling[static_cast<std::size_t>(k)];
      row_sum += a[i * n + j];
    }
    a[i * n + i] = -row_sum;
  }
  return a;
}

std::vector<DD> expected_spectrum_dd(long long p, int m, double alpha) {
  DD pd(static_cast<double>(p));
  bool integral = is_integral(alpha);
  long long ai = static_cast<long long>(alpha);
  DD p_alpha = integral ? dd_ipow(pd, ai) : DD(std::pow(static_cast<double>(p), alpha));
  DD p_alpha1 = integral ? dd_ipow(pd, ai + 1) : DD(std::pow(static_cast<double>(p), alpha + 1.0));
  DD mu = p_alpha * (pd - DD(1.0)) / (p_alpha1 - DD(1.0));

  std::vector<DD> values;
  values.push_back(DD(0.0));
  for (int r = 0; r > -m; --r) {
    DD lambda = integral
                    ? dd_ipow(pd, ai * (1 - r))
                    : DD(std::pow(static_cast<double>(p), (1.0 - r) * alpha));
    DD eig = -(lambda - mu);
    long long mult = (p - 1) * llpow(p, -r);
    for (long long c = 0; c < mult; ++c) values.push_back(eig);
  }
  std::sort(values.begin(), values.end());
  return values;
}

}  // namespace

std::vector<SpectrumCheck> verify_spectrum(long long p, int m, double alpha) {
  IndexLattice lattice(p, m);
  if (lattice.size > 1024)
    throw std::invalid_argument("verify_spectrum: supported up to 1024 compartments");
  std::size_t n = static_cast<std::size_t>(lattice.size);

  std::vector<DD> a = build_generator_dd(p, m, alpha, n);
  std::vector<DD> computed = symmetric_eigenvalues(std::move(a), n);
  std::vector<DD> expected = expected_spectrum_dd(p, m, alpha);

  auto lines = expected_spectrum(p, m, alpha);
  std::vector<SpectrumCheck> checks;
  checks.reserve(lines.size());
  std::size_t pos = 0;
  for (const auto& line : lines) {
    SpectrumCheck check{0.0, line.eigenvalue, line.multiplicity, 0.0};
    for (long long c = 0; c < line.multiplicity; ++c, ++pos) {
      double err = abs(computed[pos] - expected[pos]).to_double();
      if (err > check.abs_error) check.abs_error = err;
      if (c == 0) check.computed = computed[pos].to_double();
    }
    checks.push_back(check);
  }
  return checks;
}

DiffusionOperator::DiffusionOperator(long long p, int m, double alpha)
    : p_(p), m_(m), alpha_(alpha) {
  IndexLattice lattice(p, m);
  check_alpha(alpha);
  n_ = static_cast<std::size_t>(lattice.size);
  if (n_ <= kFastThreshold) dense_ = build_generator(p, m, alpha).entries;
}

void DiffusionOperator::apply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != n_ || y.size() != n_)
    throw std::invalid_argument("DiffusionOperator::apply: dimension mismatch");
  if (!dense_.empty()) {
    for (std::size_t i = 0; i < n_; ++i) {
      double acc = 0.0;
      const double* row = dense_.data() + i * n_;
      for (std::size_t j = 0; j < n_; ++j) acc += row[j] * x[j];
      y[i] = acc;
    }
    return;
  }
  auto result = apply_fast(p_, m_, alpha_, x);
  std::copy(result.begin(), result.end(), y.begin());
}

}  // namespace ultracoral
