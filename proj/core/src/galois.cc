#include "pirdsn/galois.h"

#include <algorithm>
#include <string>

namespace pirdsn::galois {
namespace {

bool IsPrime(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

void RequireDistinctAbscissae(std::span<const EvaluationPoint> points) {
  std::set<std::uint32_t> seen;
  for (const auto& pt : points) {
    if (!seen.insert(pt.x.value).second) {
      throw std::domain_error("duplicate evaluation abscissa " +
                              std::to_string(pt.x.value));
    }
  }
}

// Solves A x = b over GF(p) by Gauss-Jordan elimination. Free variables are
// set to zero. Returns nullopt if the system is inconsistent.
std::optional<std::vector<FieldElement>> SolveLinear(
    const PrimeField& f, std::vector<std::vector<FieldElement>> a,
    std::vector<FieldElement> b, std::size_t unknowns) {
  const std::size_t rows = a.size();
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < unknowns && r < rows; ++c) {
    std::size_t pivot = r;
    while (pivot < rows && a[pivot][c].value == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(a[pivot], a[r]);
    std::swap(b[pivot], b[r]);
    const FieldElement inv = f.Inv(a[r][c]);
    for (std::size_t j = c; j < unknowns; ++j) a[r][j] = f.Mul(a[r][j], inv);
    b[r] = f.Mul(b[r], inv);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c].value == 0) continue;
      const FieldElement factor = a[i][c];
      for (std::size_t j = c; j < unknowns; ++j) {
        a[i][j] = f.Sub(a[i][j], f.Mul(factor, a[r][j]));
      }
      b[i] = f.Sub(b[i], f.Mul(factor, b[r]));
    }
    pivot_col.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < rows; ++i) {
    if (b[i].value != 0) return std::nullopt;
  }
  std::vector<FieldElement> x(unknowns, FieldElement{0});
  for (std::size_t i = 0; i < pivot_col.size(); ++i) x[pivot_col[i]] = b[i];
  return x;
}

std::set<std::uint32_t> Disagreements(const PrimeField& f,
                                      const Polynomial& poly,
                                      std::span<const EvaluationPoint> points) {
  std::set<std::uint32_t> out;
  for (const auto& pt : points) {
    if (!(poly.Evaluate(f, pt.x) == pt.y)) out.insert(pt.x.value);
  }
  return out;
}

}  // namespace

PrimeField::PrimeField(std::uint32_t modulus) : p_(modulus) {
  if (!IsPrime(modulus)) {
    throw std::invalid_argument("field modulus must be prime, got " +
                                std::to_string(modulus));
  }
}

FieldElement PrimeField::Inv(FieldElement a) const {
  if (a.value == 0) throw std::domain_error("inverse of zero");
  // Extended Euclid on (a, p).
  std::int64_t old_r = a.value, r = p_;
  std::int64_t old_s = 1, s = 0;
  while (r != 0) {
    const std::int64_t q = old_r / r;
    std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
    std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
  }
  std::int64_t inv = old_s % static_cast<std::int64_t>(p_);
  if (inv < 0) inv += p_;
  return {static_cast<std::uint32_t>(inv)};
}

FieldElement PrimeField::Pow(FieldElement a, std::uint64_t e) const {
  FieldElement result = One();
  while (e > 0) {
    if (e & 1) result = Mul(result, a);
    a = Mul(a, a);
    e >>= 1;
  }
  return result;
}

FieldElement PrimeField::Random(RandomSource& rng) const {
  return {static_cast<std::uint32_t>(rng.Uniform(p_))};
}

Polynomial Polynomial::Random(const PrimeField& f, int degree,
                              FieldElement constant, RandomSource& rng) {
  std::vector<FieldElement> c(static_cast<std::size_t>(degree) + 1);
  c[0] = constant;
  for (int i = 1; i <= degree; ++i) c[i] = f.Random(rng);
  return Polynomial(std::move(c));
}

FieldElement Polynomial::Evaluate(const PrimeField& f, FieldElement x) const {
  FieldElement acc{0};
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = f.Add(f.Mul(acc, x), *it);
  }
  return acc;
}

Polynomial Add(const PrimeField& f, const Polynomial& a, const Polynomial& b) {
  const std::size_t n =
      std::max(a.coefficients().size(), b.coefficients().size());
  std::vector<FieldElement> c(n);
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = f.Add(a.coefficient(i), b.coefficient(i));
  }
  return Polynomial(std::move(c));
}

Polynomial Mul(const PrimeField& f, const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return Polynomial();
  const auto& ac = a.coefficients();
  const auto& bc = b.coefficients();
  std::vector<FieldElement> c(ac.size() + bc.size() - 1, FieldElement{0});
  for (std::size_t i = 0; i < ac.size(); ++i) {
    for (std::size_t j = 0; j < bc.size(); ++j) {
      c[i + j] = f.Add(c[i + j], f.Mul(ac[i], bc[j]));
    }
  }
  return Polynomial(std::move(c));
}

DivisionResult Divide(const PrimeField& f, const Polynomial& num,
                      const Polynomial& den) {
  if (den.is_zero()) throw std::domain_error("polynomial division by zero");
  std::vector<FieldElement> rem = num.coefficients();
  const auto& d = den.coefficients();
  const int dd = den.degree();
  if (num.degree() < dd) return {Polynomial(), num};
  std::vector<FieldElement> quot(rem.size() - d.size() + 1, FieldElement{0});
  const FieldElement lead_inv = f.Inv(d.back());
  for (int i = static_cast<int>(rem.size()) - 1; i >= dd; --i) {
    const FieldElement q = f.Mul(rem[i], lead_inv);
    quot[i - dd] = q;
    if (q.value == 0) continue;
    for (int j = 0; j <= dd; ++j) {
      rem[i - dd + j] = f.Sub(rem[i - dd + j], f.Mul(q, d[j]));
    }
  }
  return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
}

FieldElement LagrangeEvalAtZero(const PrimeField& f,
                                std::span<const EvaluationPoint> points) {
  if (points.empty()) throw std::domain_error("no evaluation points");
  RequireDistinctAbscissae(points);
  FieldElement acc{0};
  for (std::size_t i = 0; i < points.size(); ++i) {
    FieldElement num = f.One();
    FieldElement den = f.One();
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (i == j) continue;
      num = f.Mul(num, points[j].x);
      den = f.Mul(den, f.Sub(points[j].x, points[i].x));
    }
    acc = f.Add(acc, f.Mul(points[i].y, f.Div(num, den)));
  }
  return acc;
}

Polynomial Interpolate(const PrimeField& f,
                       std::span<const EvaluationPoint> points) {
  if (points.empty()) throw std::domain_error("no evaluation points");
  RequireDistinctAbscissae(points);
  Polynomial result;
  for (std::size_t i = 0; i < points.size(); ++i) {
    Polynomial basis(std::vector<FieldElement>{f.One()});
    FieldElement den = f.One();
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (i == j) continue;
      basis = Mul(f, basis, Polynomial({f.Neg(points[j].x), f.One()}));
      den = f.Mul(den, f.Sub(points[i].x, points[j].x));
    }
    const FieldElement scale = f.Div(points[i].y, den);
    std::vector<FieldElement> c = basis.coefficients();
    for (auto& v : c) v = f.Mul(v, scale);
    result = Add(f, result, Polynomial(std::move(c)));
  }
  return result;
}

int MaxCorrectableErrors(int k, int t) {
  if (k <= t) return -1;
  return (k - t - 1) / 2;
}

std::optional<DecodeResult> BerlekampWelchDecode(
    const PrimeField& f, std::span<const EvaluationPoint> points, int t,
    int max_errors) {
  if (t < 0 || max_errors < 0) {
    throw std::invalid_argument("negative degree bound or error budget");
  }
  const int k = static_cast<int>(points.size());
  if (k < t + 2 * max_errors + 1) {
    throw std::invalid_argument("too few points for the requested error budget");
  }
  RequireDistinctAbscissae(points);

  // Fast path: the first t+1 points determine a candidate; accept it if the
  // remaining points agree.
  {
    Polynomial candidate = Interpolate(f, points.first(t + 1));
    if (candidate.degree() <= t) {
      auto errs = Disagreements(f, candidate, points);
      if (errs.empty()) return DecodeResult{std::move(candidate), {}};
    }
  }
  if (max_errors == 0) return std::nullopt;

  // Unknowns: E(x) = x^e + sum_{l<e} e_l x^l, Q(x) = sum_{j<=t+e} q_j x^j.
  // Equations: Q(x_i) - y_i * sum_{l<e} e_l x_i^l = y_i * x_i^e.
  const int e = max_errors;
  const std::size_t q_terms = static_cast<std::size_t>(t + e + 1);
  const std::size_t unknowns = static_cast<std::size_t>(e) + q_terms;
  std::vector<std::vector<FieldElement>> a(
      points.size(), std::vector<FieldElement>(unknowns));
  std::vector<FieldElement> b(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [x, y] = points[i];
    FieldElement pw = f.One();
    for (int l = 0; l < e; ++l) {
      a[i][l] = f.Neg(f.Mul(y, pw));
      pw = f.Mul(pw, x);
    }
    b[i] = f.Mul(y, pw);  // pw == x^e here
    FieldElement qp = f.One();
    for (std::size_t j = 0; j < q_terms; ++j) {
      a[i][e + j] = qp;
      qp = f.Mul(qp, x);
    }
  }
  auto solution = SolveLinear(f, std::move(a), std::move(b), unknowns);
  if (!solution) return std::nullopt;

  std::vector<FieldElement> e_coeffs(solution->begin(), solution->begin() + e);
  e_coeffs.push_back(f.One());
  std::vector<FieldElement> q_coeffs(solution->begin() + e, solution->end());
  const auto [quot, rem] =
      Divide(f, Polynomial(std::move(q_coeffs)), Polynomial(std::move(e_coeffs)));
  if (!rem.is_zero() || quot.degree() > t) return std::nullopt;

  auto errors = Disagreements(f, quot, points);
  if (static_cast<int>(errors.size()) > max_errors) return std::nullopt;
  return DecodeResult{quot, std::move(errors)};
}

}  // namespace pirdsn::galois
