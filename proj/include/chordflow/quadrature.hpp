#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace chordflow {

// Neumaier-compensated accumulator. Order of add() calls fixes the result bit-for-bit.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre rule with n points (Newton iteration on P_n).
GaussRule gauss_legendre(int n);

// Same rule mapped to [a, b].
GaussRule gauss_legendre(int n, double a, double b);

// Periodic trapezoid sum with a |s|^beta singularity sitting on node `center`.
//
// samples[j] is the integrand at s_j = (j - center) * step (wrapped to one period);
// the value at the singular node is ignored. `g0` is the limit of f(s)/|s|^beta
// at s = 0. The generalized Euler-Maclaurin expansion of the punctured trapezoid sum
// is removed through the s^4 term of the smooth factor, estimated from the three
// nearest node pairs.
struct SingularWeights {
  explicit SingularWeights(double beta);
  double beta;
  double zeta0;  // zeta(-beta)
  double zeta2;  // zeta(-beta - 2)
  double zeta4;  // zeta(-beta - 4)
};

double singular_periodic_trapezoid(std::span<const double> samples, std::size_t center,
                                   double step, const SingularWeights& sw, double g0);

}  // namespace chordflow
