#pragma once

#include <cstddef>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "perc3d/errors.hpp"
#include "perc3d/exact.hpp"

namespace perc3d {

enum class Direction { lower, upper };

inline std::string_view to_string(Direction d) {
  return d == Direction::lower ? "lower" : "upper";
}

inline Direction parse_direction(std::string_view text) {
  if (text == "lower") return Direction::lower;
  if (text == "upper") return Direction::upper;
  throw DomainError("direction must be 'lower' or 'upper', got '" + std::string(text) + "'");
}

struct CertificationConstant {
  std::string_view name;
  std::string_view value_text;
  std::string_view citation;

  Rational value() const { return parse_rational(value_text); }
};

// Block-open probability below which no infinite cluster of independent
// blocks exists (certified by the verify-threshold computation).
inline constexpr CertificationConstant kLowerP0{
    "p0_lower", "3/100",
    "transfer-matrix bound: largest root of det(xI - M_6) is below (100/3)^6, so block "
    "paths in the independence lattice die out when a block is open w.p. < 3/100"};

// Bond-open probability above which a 1-independent bond model on Z^2
// percolates.
inline constexpr CertificationConstant kUpperP0{
    "p0_upper", "8639/10000",
    "Balister, Bollobas & Walters: a 1-independent bond percolation measure on Z^2 with "
    "every bond open w.p. >= 0.8639 percolates"};

inline const CertificationConstant& default_p0(Direction d) {
  return d == Direction::lower ? kLowerP0 : kUpperP0;
}

// Exact binomial probabilities for Bin(N, p) with rational p = a/b, kept as
// integer numerators over the common denominator b^N.
class BinomialTable {
 public:
  BinomialTable(std::size_t trials, const Rational& p) : trials_(trials) {
    if (p < 0 || p > 1) throw DomainError("binomial probability must lie in [0, 1]");
    const BigInt a = boost::multiprecision::numerator(p);
    const BigInt b = boost::multiprecision::denominator(p);
    const BigInt q = b - a;
    const auto n = static_cast<unsigned>(trials);
    denominator_ = pow_big(b, n);
    numerators_.resize(trials + 1);
    // C(N, i) a^i q^(N-i), built from both ends to avoid division.
    std::vector<BigInt> a_pow(trials + 1);
    std::vector<BigInt> q_pow(trials + 1);
    a_pow[0] = 1;
    q_pow[0] = 1;
    for (std::size_t i = 1; i <= trials; ++i) {
      a_pow[i] = a_pow[i - 1] * a;
      q_pow[i] = q_pow[i - 1] * q;
    }
    BigInt choose = 1;
    for (std::size_t i = 0; i <= trials; ++i) {
      numerators_[i] = choose * a_pow[i] * q_pow[trials - i];
      choose = choose * (trials - i) / (i + 1);
    }
  }

  std::size_t trials() const { return trials_; }

  Rational leq(std::size_t m) const {
    check(m);
    BigInt sum = 0;
    for (std::size_t i = 0; i <= m; ++i) sum += numerators_[i];
    return Rational(sum, denominator_);
  }

  Rational geq(std::size_t m) const {
    check(m);
    BigInt sum = 0;
    for (std::size_t i = m; i <= trials_; ++i) sum += numerators_[i];
    return Rational(sum, denominator_);
  }

 private:
  void check(std::size_t m) const {
    if (m > trials_) throw DomainError("success threshold exceeds the number of trials");
  }

  std::size_t trials_;
  BigInt denominator_;
  std::vector<BigInt> numerators_;
};

// P(X <= m) for X ~ Bin(N, p), exactly.
inline Rational binom_tail_leq(std::size_t n, std::size_t m, const Rational& p) {
  if (m > n) throw DomainError("success threshold exceeds the number of trials");
  return BinomialTable(n, p).leq(m);
}

// P(X >= m) for X ~ Bin(N, p), exactly.
inline Rational binom_tail_geq(std::size_t n, std::size_t m, const Rational& p) {
  if (m > n) throw DomainError("success threshold exceeds the number of trials");
  return BinomialTable(n, p).geq(m);
}

struct ConfidencePlan {
  Direction direction = Direction::lower;
  std::size_t trials = 0;
  // Lower: certify iff successes <= m. Upper: certify iff successes >= m.
  std::size_t m = 0;
  Rational p0;
  Rational tail;
  Rational alpha;
  Rational budget;

  std::string render() const {
    std::ostringstream out;
    out << "direction: " << to_string(direction) << "\n";
    out << "trials: " << trials << "\n";
    out << "alpha: " << format_exact(alpha) << "\n";
    out << "p0: " << format_exact(p0) << "\n";
    out << "per-side budget: " << format_exact(budget) << "\n";
    out << "threshold m: " << m << "  (certify iff successes "
        << (direction == Direction::lower ? "<=" : ">=") << " " << m << ")\n";
    out << "tail: " << (direction == Direction::lower ? "P(X <= m)" : "P(X >= m)")
        << " = " << format_scientific(tail, 7) << "\n";
    out << "tail (exact): " << tail << "\n";
    return out.str();
  }
};

// Splits the miss probability 1 - alpha evenly between the two sides. Lower:
// largest m with P(X <= m | p0) < budget. Upper: smallest m with
// P(X >= m | p0) < budget.
inline ConfidencePlan plan(Direction direction, std::size_t trials, const Rational& alpha,
                           const Rational& p0) {
  if (alpha <= 0 || alpha >= 1) throw DomainError("alpha must lie strictly between 0 and 1");
  ConfidencePlan out;
  out.direction = direction;
  out.trials = trials;
  out.alpha = alpha;
  out.p0 = p0;
  out.budget = (Rational(1) - alpha) / 2;
  const BinomialTable table(trials, p0);
  if (direction == Direction::lower) {
    bool found = false;
    for (std::size_t m = 0; m <= trials; ++m) {
      const Rational tail = table.leq(m);
      if (!(tail < out.budget)) break;
      out.m = m;
      out.tail = tail;
      found = true;
    }
    if (!found) {
      throw InfeasiblePlan("no success threshold certifies " + std::to_string(trials) +
                           " lower-bound trials at this confidence");
    }
    return out;
  }
  for (std::size_t m = trials + 1; m-- > 0;) {
    const Rational tail = table.geq(m);
    if (!(tail < out.budget)) {
      if (m == trials) break;
      return out;
    }
    out.m = m;
    out.tail = tail;
    if (m == 0) return out;
  }
  throw InfeasiblePlan("no success threshold certifies " + std::to_string(trials) +
                       " upper-bound trials at this confidence");
}

inline ConfidencePlan plan(Direction direction, std::size_t trials, const Rational& alpha) {
  return plan(direction, trials, alpha, default_p0(direction).value());
}

struct RunSummary {
  Rational p;
  std::size_t trials = 0;
  std::size_t successes = 0;
};

struct Verdict {
  Rational p_lo;
  Rational p_hi;
  Rational alpha;
  ConfidencePlan lower_plan;
  ConfidencePlan upper_plan;
  RunSummary lower_run;
  RunSummary upper_run;
  bool lower_certified = false;
  bool upper_certified = false;
  std::vector<std::string> warnings;

  bool certified() const { return lower_certified && upper_certified; }
};

// Lower side passes iff at most plan.m blocks were open; upper side passes iff
// at least plan.m rectangles met the event. A failed side reports the trivial
// bound (0 below, 1 above).
inline Verdict verdict(const RunSummary& lower_run, const RunSummary& upper_run,
                       const Rational& alpha, const Rational& p0_lower,
                       const Rational& p0_upper) {
  for (const auto* run : {&lower_run, &upper_run}) {
    if (run->successes > run->trials) {
      throw ContractError("run reports more successes than trials");
    }
    if (run->p < 0 || run->p > 1) throw ContractError("run probability outside [0, 1]");
  }
  Verdict v;
  v.alpha = alpha;
  v.lower_run = lower_run;
  v.upper_run = upper_run;
  v.lower_plan = plan(Direction::lower, lower_run.trials, alpha, p0_lower);
  v.upper_plan = plan(Direction::upper, upper_run.trials, alpha, p0_upper);
  v.lower_certified = lower_run.successes <= v.lower_plan.m;
  v.upper_certified = upper_run.successes >= v.upper_plan.m;
  v.p_lo = v.lower_certified ? lower_run.p : Rational(0);
  v.p_hi = v.upper_certified ? upper_run.p : Rational(1);
  if (!v.lower_certified) {
    v.warnings.push_back("lower side failed: " + std::to_string(lower_run.successes) +
                         " open blocks exceed the threshold " + std::to_string(v.lower_plan.m) +
                         "; reporting the trivial lower bound 0");
  }
  if (!v.upper_certified) {
    v.warnings.push_back("upper side failed: " + std::to_string(upper_run.successes) +
                         " successes are below the threshold " +
                         std::to_string(v.upper_plan.m) + "; reporting the trivial upper bound 1");
  }
  if (v.p_lo > v.p_hi) {
    throw ContractError("lower-bound probability exceeds upper-bound probability");
  }
  return v;
}

inline Verdict verdict(const RunSummary& lower_run, const RunSummary& upper_run,
                       const Rational& alpha) {
  return verdict(lower_run, upper_run, alpha, kLowerP0.value(), kUpperP0.value());
}

}  // namespace perc3d
