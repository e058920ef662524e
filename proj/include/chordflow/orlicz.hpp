#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chordflow {

// The Orlicz function phi : (0, inf) -> (0, inf) together with
// psi(s) = integral_0^s dt / phi(t).
//
// Families:
//   power  phi(s) = a s^{1-p}, p > 0        psi(s) = s^p / (a p)
//   sum    phi(s) = sum_k a_k s^{e_k}, a_k > 0
//   table  monotone cubic interpolation of log phi over log s, power-law tails
//   exp    phi(s) = e^{k s}, k > 0          psi(s) = (1 - e^{-k s}) / k
//
// Construction rejects any phi whose reciprocal is not integrable at 0
// (PsiDivergentAtZero): psi would not exist.
class OrliczPhi {
 public:
  enum class Family { Power, Sum, Table, Exp };

  static OrliczPhi power(double p, double coef = 1.0);
  static OrliczPhi sum(const std::vector<OrliczPhi>& terms);
  static OrliczPhi table(std::vector<double> s, std::vector<double> phi);
  static OrliczPhi exponential(double rate);

  Family family() const { return family_; }
  // Exponent p of the power family.
  double power_p() const { return 1.0 - exponents_.at(0); }
  std::string descriptor() const { return descriptor_; }

  double operator()(double s) const;
  // d phi / ds
  double derivative(double s) const;

  bool has_closed_form_psi() const { return family_ == Family::Power || family_ == Family::Exp; }
  std::optional<double> psi_closed_form(double s) const;
  // psi by numerical quadrature regardless of closed-form availability.
  double psi_quadrature(double s) const;

  bool psi_finite_at_zero() const { return true; }
  bool psi_diverges_at_infinity() const { return diverges_; }

 private:
  friend OrliczPhi make_phi(std::string_view descriptor);
  OrliczPhi() = default;
  void finish();
  // 1/phi ~ small_coef^{-1} s^{-small_exp} as s -> 0
  double small_coef_ = 1.0;
  double small_exp_ = 0.0;

  Family family_ = Family::Power;
  std::string descriptor_;
  std::vector<double> coefs_;
  std::vector<double> exponents_;
  double rate_ = 0.0;
  // table data in log-log space
  std::vector<double> log_s_, log_phi_, slopes_;
  bool diverges_ = false;
};

// Parses `power:p=<x>[,a=<c>]`, `exp:k=<x>`, `table:<path>` (CSV rows s,phi),
// `sum:<spec>+<spec>...`.
OrliczPhi make_phi(std::string_view descriptor);

// psi(s); closed form when available, adaptive quadrature otherwise.
double psi_eval(const OrliczPhi& phi, double s);

struct PhiReport {
  bool positive = true;
  bool psi_finite_at_zero = true;
  bool psi_diverges = true;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Positivity on log-spaced samples over [1e-6, 1e6], finiteness of psi near 0,
// and growth of psi(10^k) for k = 0..6.
PhiReport validate(const OrliczPhi& phi);

}  // namespace chordflow
