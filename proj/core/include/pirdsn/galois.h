#ifndef PIRDSN_GALOIS_H_
#define PIRDSN_GALOIS_H_

// Arithmetic over GF(p), polynomials, Lagrange interpolation and
// Berlekamp-Welch unique decoding of Reed-Solomon codewords.

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

namespace pirdsn::galois {

// Default deployment modulus: the Fermat prime 2^16 + 1. Every pair of bytes
// (a value < 2^16) embeds injectively.
inline constexpr std::uint32_t kDefaultModulus = 65537;

struct FieldElement {
  std::uint32_t value = 0;
  friend bool operator==(FieldElement, FieldElement) = default;
};

// Minimal randomness interface so galois stays independent of Rng.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual std::uint64_t Uniform(std::uint64_t bound) = 0;
};

class PrimeField {
 public:
  // `modulus` must be prime; primality is checked by trial division.
  explicit PrimeField(std::uint32_t modulus = kDefaultModulus);

  std::uint32_t modulus() const { return p_; }

  FieldElement Element(std::uint64_t v) const {
    return {static_cast<std::uint32_t>(v % p_)};
  }
  FieldElement Zero() const { return {0}; }
  FieldElement One() const { return {1}; }

  FieldElement Add(FieldElement a, FieldElement b) const {
    std::uint32_t s = a.value + b.value;
    return {s >= p_ ? s - p_ : s};
  }
  FieldElement Sub(FieldElement a, FieldElement b) const {
    return {a.value >= b.value ? a.value - b.value : a.value + p_ - b.value};
  }
  FieldElement Neg(FieldElement a) const {
    return {a.value == 0 ? 0 : p_ - a.value};
  }
  FieldElement Mul(FieldElement a, FieldElement b) const {
    return {static_cast<std::uint32_t>(
        (static_cast<std::uint64_t>(a.value) * b.value) % p_)};
  }
  // Throws std::domain_error for a == 0.
  FieldElement Inv(FieldElement a) const;
  FieldElement Div(FieldElement a, FieldElement b) const {
    return Mul(a, Inv(b));
  }
  FieldElement Pow(FieldElement a, std::uint64_t e) const;

  FieldElement Random(RandomSource& rng) const;

  friend bool operator==(const PrimeField&, const PrimeField&) = default;

 private:
  std::uint32_t p_;
};

// Coefficients lowest degree first.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<FieldElement> coeffs)
      : coeffs_(std::move(coeffs)) {
    Normalize();
  }

  static Polynomial Random(const PrimeField& f, int degree,
                           FieldElement constant, RandomSource& rng);

  // -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<FieldElement>& coefficients() const { return coeffs_; }
  FieldElement coefficient(std::size_t i) const {
    return i < coeffs_.size() ? coeffs_[i] : FieldElement{0};
  }

  FieldElement Evaluate(const PrimeField& f, FieldElement x) const;

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void Normalize() {
    while (!coeffs_.empty() && coeffs_.back().value == 0) coeffs_.pop_back();
  }
  std::vector<FieldElement> coeffs_;
};

Polynomial Add(const PrimeField& f, const Polynomial& a, const Polynomial& b);
Polynomial Mul(const PrimeField& f, const Polynomial& a, const Polynomial& b);

struct DivisionResult {
  Polynomial quotient;
  Polynomial remainder;
};
// Throws std::domain_error when dividing by the zero polynomial.
DivisionResult Divide(const PrimeField& f, const Polynomial& num,
                      const Polynomial& den);

struct EvaluationPoint {
  FieldElement x;
  FieldElement y;
};

// f(0) for the unique polynomial of degree <= |points|-1 through `points`.
// Throws std::domain_error on duplicate abscissae or an empty input.
FieldElement LagrangeEvalAtZero(const PrimeField& f,
                                std::span<const EvaluationPoint> points);

// Full coefficient form of the interpolating polynomial.
Polynomial Interpolate(const PrimeField& f,
                       std::span<const EvaluationPoint> points);

struct DecodeResult {
  Polynomial polynomial;
  // Abscissae of the points that disagree with `polynomial`.
  std::set<std::uint32_t> error_positions;
};

// Largest number of errors Berlekamp-Welch corrects with `k` points and
// degree bound `t`: floor((k - t - 1) / 2), or -1 if k <= t.
int MaxCorrectableErrors(int k, int t);

// Recovers the degree <= t polynomial that agrees with all but at most
// `max_errors` of `points`. Requires |points| >= t + 2*max_errors + 1 and
// pairwise distinct abscissae (std::invalid_argument / std::domain_error
// otherwise). Returns nullopt when no such polynomial exists.
std::optional<DecodeResult> BerlekampWelchDecode(
    const PrimeField& f, std::span<const EvaluationPoint> points, int t,
    int max_errors);

}  // namespace pirdsn::galois

#endif  // PIRDSN_GALOIS_H_
