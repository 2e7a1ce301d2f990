#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "perc3d/errors.hpp"
#include "perc3d/exact.hpp"

namespace perc3d {

// Monic cubic x^3 + a2 x^2 + a1 x + a0.
struct CubicPolynomial {
  BigInt a2;
  BigInt a1;
  BigInt a0;

  Rational operator()(const Rational& x) const {
    return ((x + Rational(a2)) * x + Rational(a1)) * x + Rational(a0);
  }
  BigInt operator()(const BigInt& x) const { return ((x + a2) * x + a1) * x + a0; }
};

// det(xI - M) from the trace, the principal 2x2 minors and the determinant.
inline CubicPolynomial characteristic_polynomial(const Matrix3& m) {
  const BigInt trace = m[0][0] + m[1][1] + m[2][2];
  const BigInt minors = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) +
                        (m[0][0] * m[2][2] - m[0][2] * m[2][0]) +
                        (m[1][1] * m[2][2] - m[1][2] * m[2][1]);
  const BigInt det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  return {-trace, minors, -det};
}

struct DominantEigenvalue {
  double value = 0.0;
  double sixth_root = 0.0;
};

// Power iteration in long double. Diagnostic only; the rigorous statement
// comes from verify_threshold.
inline DominantEigenvalue dominant_eigenvalue(const Matrix3& m, double rel_tol = 1e-9,
                                              int max_iter = 100000) {
  std::array<std::array<long double, 3>, 3> a{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (m[i][j] < 0) throw NumericError("power iteration needs a non-negative matrix");
      a[i][j] = m[i][j].convert_to<long double>();
    }
  }
  std::array<long double, 3> x{1.0L, 1.0L, 1.0L};
  long double lambda = 0.0L;
  int settled = 0;
  for (int it = 0; it < max_iter; ++it) {
    std::array<long double, 3> y{};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) y[i] += a[i][j] * x[j];
    }
    const long double norm = std::max({y[0], y[1], y[2]});
    if (norm == 0.0L) return {0.0, 0.0};
    for (auto& v : y) v /= norm;
    const long double change = std::fabs(norm - lambda);
    lambda = norm;
    x = y;
    // Stop well below the requested tolerance since the step-to-step change
    // underestimates the remaining error for slowly converging spectra.
    if (change <= 1e-3L * rel_tol * lambda) {
      if (++settled >= 3) {
        const double value = static_cast<double>(lambda);
        return {value, std::pow(value, 1.0 / 6.0)};
      }
    } else {
      settled = 0;
    }
  }
  throw NumericError("power iteration did not converge");
}

struct SignRecord {
  std::string label;
  Rational point;
  Rational value;
  int sign = 0;
};

struct ThresholdCertificate {
  CubicPolynomial polynomial;
  std::vector<SignRecord> evaluations;
  Rational bound_point;       // (100/3)^6
  Rational threshold;         // 3/100
  Rational trivial_threshold; // 1/54
  DominantEigenvalue eigen;

  // Every value is exact except the eigenvalue diagnostics.
  std::string render() const {
    std::ostringstream out;
    out << "characteristic polynomial: x^3 + (" << polynomial.a2 << ") x^2 + ("
        << polynomial.a1 << ") x + (" << polynomial.a0 << ")\n";
    out << "a2 = " << polynomial.a2 << "\n";
    out << "a1 = " << polynomial.a1 << "\n";
    out << "a0 = " << polynomial.a0 << "\n";
    for (const auto& e : evaluations) {
      out << "f(" << e.label << ") = " << e.value << "  sign=" << (e.sign > 0 ? "+" : "-");
      if (boost::multiprecision::denominator(e.value) != 1) {
        out << "  (~" << format_scientific(e.value, 6) << ")";
      }
      out << "\n";
    }
    out << "sign pattern (+,-,+) with positive leading coefficient: three real roots, "
           "largest < "
        << bound_point << "\n";
    out << "block-open threshold p0 = " << threshold << "\n";
    out << "trivial threshold (1/degree) = " << trivial_threshold << "\n";
    out << "dominant eigenvalue ~ " << eigen.value << "  sixth root ~ " << eigen.sixth_root
        << "  (1/sixth root ~ " << 1.0 / eigen.sixth_root << ")\n";
    return out.str();
  }
};

inline int sign_of(const Rational& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

// Evaluates det(xI - M) exactly at 0, 250000 and (100/3)^6 = 10^12/729. The
// pattern (+, -, +) puts one root below 0, one in (0, 250000) and one in
// (250000, (100/3)^6), so the spectral radius is below (100/3)^6 and paths of
// independent blocks die out whenever a block is open with probability below
// 3/100.
inline ThresholdCertificate verify_threshold(const Matrix3& m) {
  ThresholdCertificate cert;
  cert.polynomial = characteristic_polynomial(m);
  cert.bound_point = Rational(pow_big(100, 6), pow_big(3, 6));
  cert.threshold = Rational(3, 100);
  cert.trivial_threshold = Rational(1, 54);
  const std::array<std::pair<std::string, Rational>, 3> points = {
      std::pair<std::string, Rational>{"0", Rational(0)},
      {"250000", Rational(250000)},
      {"(100/3)^6", cert.bound_point}};
  const std::array<int, 3> expected{1, -1, 1};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Rational value = cert.polynomial(points[i].second);
    cert.evaluations.push_back({points[i].first, points[i].second, value, sign_of(value)});
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (cert.evaluations[i].sign != expected[i]) {
      throw CertificationFailure("characteristic polynomial has the wrong sign at " +
                                 cert.evaluations[i].label);
    }
  }
  cert.eigen = dominant_eigenvalue(m);
  return cert;
}

}  // namespace perc3d
