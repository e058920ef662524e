#include "chordflow/orlicz.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <fstream>
#include <sstream>

#include "chordflow/errors.hpp"

namespace chordflow {

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Fritsch-Carlson slopes for a monotonicity-preserving cubic Hermite interpolant.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  std::vector<double> delta(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) delta[k] = (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
  if (n == 2) {
    d[0] = d[1] = delta[0];
    return d;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (delta[k - 1] * delta[k] <= 0.0) {
      d[k] = 0.0;
    } else {
      const double h0 = x[k] - x[k - 1];
      const double h1 = x[k + 1] - x[k];
      const double w1 = 2.0 * h1 + h0;
      const double w2 = h1 + 2.0 * h0;
      d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
  }
  d[0] = delta[0];
  d[n - 1] = delta[n - 2];
  return d;
}

}  // namespace

OrliczPhi OrliczPhi::power(double p, double coef) {
  if (!(p > 0.0)) {
    throw Error(ErrorCode::PsiDivergentAtZero,
                "power family needs p > 0 so that 1/phi = s^(p-1) is integrable at 0 (p = " +
                    fmt_double(p) + ")");
  }
  if (!(coef > 0.0)) throw Error(ErrorCode::NotPositive, "power coefficient must be positive");
  OrliczPhi phi;
  phi.family_ = Family::Power;
  phi.coefs_ = {coef};
  phi.exponents_ = {1.0 - p};
  phi.descriptor_ = "power:p=" + fmt_double(p) + (coef != 1.0 ? ",a=" + fmt_double(coef) : "");
  phi.small_coef_ = coef;
  phi.small_exp_ = 1.0 - p;
  phi.finish();
  return phi;
}

OrliczPhi OrliczPhi::sum(const std::vector<OrliczPhi>& terms) {
  if (terms.empty()) throw Error(ErrorCode::InvalidConfig, "empty sum");
  OrliczPhi phi;
  phi.family_ = Family::Sum;
  std::string desc = "sum:";
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const auto& t = terms[k];
    if (t.family_ != Family::Power && t.family_ != Family::Sum) {
      throw Error(ErrorCode::InvalidConfig, "sum terms must be power functions");
    }
    phi.coefs_.insert(phi.coefs_.end(), t.coefs_.begin(), t.coefs_.end());
    phi.exponents_.insert(phi.exponents_.end(), t.exponents_.begin(), t.exponents_.end());
    std::string td = t.descriptor_;
    if (td.rfind("sum:", 0) == 0) td = td.substr(4);
    desc += (k ? "+" : "") + td;
  }
  phi.descriptor_ = desc;
  // The smallest exponent dominates as s -> 0.
  std::size_t lead = 0;
  for (std::size_t k = 1; k < phi.exponents_.size(); ++k) {
    if (phi.exponents_[k] < phi.exponents_[lead]) lead = k;
  }
  phi.small_exp_ = phi.exponents_[lead];
  phi.small_coef_ = 0.0;
  for (std::size_t k = 0; k < phi.exponents_.size(); ++k) {
    if (phi.exponents_[k] == phi.small_exp_) phi.small_coef_ += phi.coefs_[k];
  }
  if (phi.small_exp_ >= 1.0) {
    throw Error(ErrorCode::PsiDivergentAtZero, "1/phi is not integrable at 0 for " + desc);
  }
  phi.finish();
  return phi;
}

OrliczPhi OrliczPhi::table(std::vector<double> s, std::vector<double> values) {
  if (s.size() != values.size() || s.size() < 2) {
    throw Error(ErrorCode::InvalidConfig, "table needs at least two (s, phi) rows");
  }
  std::vector<std::size_t> order(s.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return s[a] < s[b]; });
  OrliczPhi phi;
  phi.family_ = Family::Table;
  for (std::size_t k : order) {
    if (!(s[k] > 0.0)) throw Error(ErrorCode::NotPositive, "table abscissae must be positive");
    if (!(values[k] > 0.0)) throw Error(ErrorCode::NotPositive, "table phi values must be positive");
    if (!phi.log_s_.empty() && std::log(s[k]) <= phi.log_s_.back()) {
      throw Error(ErrorCode::InvalidConfig, "table abscissae must be distinct");
    }
    phi.log_s_.push_back(std::log(s[k]));
    phi.log_phi_.push_back(std::log(values[k]));
  }
  phi.slopes_ = pchip_slopes(phi.log_s_, phi.log_phi_);
  const double m0 = (phi.log_phi_[1] - phi.log_phi_[0]) / (phi.log_s_[1] - phi.log_s_[0]);
  phi.small_exp_ = m0;
  phi.small_coef_ = std::exp(phi.log_phi_[0] - m0 * phi.log_s_[0]);
  if (m0 >= 1.0) {
    throw Error(ErrorCode::PsiDivergentAtZero,
                "tabulated phi grows like s^" + fmt_double(m0) + " near 0; 1/phi not integrable");
  }
  phi.descriptor_ = "table";
  phi.finish();
  return phi;
}

OrliczPhi OrliczPhi::exponential(double rate) {
  if (!(rate > 0.0)) throw Error(ErrorCode::InvalidConfig, "exp rate must be positive");
  OrliczPhi phi;
  phi.family_ = Family::Exp;
  phi.rate_ = rate;
  phi.small_coef_ = 1.0;
  phi.small_exp_ = 0.0;
  phi.descriptor_ = "exp:k=" + fmt_double(rate);
  phi.finish();
  return phi;
}

void OrliczPhi::finish() { diverges_ = validate(*this).psi_diverges; }

double OrliczPhi::operator()(double s) const {
  switch (family_) {
    case Family::Power:
    case Family::Sum: {
      double v = 0.0;
      for (std::size_t k = 0; k < coefs_.size(); ++k) v += coefs_[k] * std::pow(s, exponents_[k]);
      return v;
    }
    case Family::Exp:
      return std::exp(rate_ * s);
    case Family::Table: {
      const double x = std::log(s);
      const std::size_t n = log_s_.size();
      if (x <= log_s_.front()) {
        return std::exp(log_phi_[0] + small_exp_ * (x - log_s_[0]));
      }
      if (x >= log_s_.back()) {
        const double m = (log_phi_[n - 1] - log_phi_[n - 2]) / (log_s_[n - 1] - log_s_[n - 2]);
        return std::exp(log_phi_[n - 1] + m * (x - log_s_[n - 1]));
      }
      const auto it = std::upper_bound(log_s_.begin(), log_s_.end(), x);
      const std::size_t k = static_cast<std::size_t>(it - log_s_.begin()) - 1;
      const double hk = log_s_[k + 1] - log_s_[k];
      const double t = (x - log_s_[k]) / hk;
      const double t2 = t * t;
      const double t3 = t2 * t;
      const double y = (2 * t3 - 3 * t2 + 1) * log_phi_[k] + (t3 - 2 * t2 + t) * hk * slopes_[k] +
                       (-2 * t3 + 3 * t2) * log_phi_[k + 1] + (t3 - t2) * hk * slopes_[k + 1];
      return std::exp(y);
    }
  }
  return 0.0;
}

double OrliczPhi::derivative(double s) const {
  switch (family_) {
    case Family::Power:
    case Family::Sum: {
      double v = 0.0;
      for (std::size_t k = 0; k < coefs_.size(); ++k) {
        v += coefs_[k] * exponents_[k] * std::pow(s, exponents_[k] - 1.0);
      }
      return v;
    }
    case Family::Exp:
      return rate_ * std::exp(rate_ * s);
    case Family::Table: {
      const double eps = 1e-6;
      return ((*this)(s * (1.0 + eps)) - (*this)(s * (1.0 - eps))) / (2.0 * eps * s);
    }
  }
  return 0.0;
}

std::optional<double> OrliczPhi::psi_closed_form(double s) const {
  if (family_ == Family::Power) {
    const double p = 1.0 - exponents_[0];
    return std::pow(s, p) / (coefs_[0] * p);
  }
  if (family_ == Family::Exp) return -std::expm1(-rate_ * s) / rate_;
  return std::nullopt;
}

double OrliczPhi::psi_quadrature(double s) const {
  if (!(s > 0.0)) throw Error(ErrorCode::NotPositive, "psi needs s > 0");
  // Below `start` 1/phi is replaced by its leading power law.
  double start;
  if (family_ == Family::Table) {
    start = std::exp(log_s_.front());
  } else {
    start = 1e-8;
    if (family_ == Family::Sum) {
      // push the cut-off down until the subleading terms are negligible
      for (std::size_t k = 0; k < exponents_.size(); ++k) {
        const double gap = exponents_[k] - small_exp_;
        if (gap <= 0.0) continue;
        const double cut = std::pow(1e-13 * small_coef_ / coefs_[k], 1.0 / gap);
        start = std::min(start, std::max(cut, 1e-300));
      }
    }
  }
  const double a = std::min(s, start);
  const double tail = std::pow(a, 1.0 - small_exp_) / (small_coef_ * (1.0 - small_exp_));
  if (s <= start) return tail;
  auto integrand = [this](double t) {
    const double x = std::exp(t);
    return x / (*this)(x);
  };
  double err = 0.0;
  double l1 = 0.0;
  const double body = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, std::log(start), std::log(s), 20, 1e-14, &err, &l1);
  if (!std::isfinite(body) || err > 1e-10 * std::max(1.0, l1)) {
    throw Error(ErrorCode::QuadratureFailure,
                "psi quadrature did not converge (error estimate " + fmt_double(err) + ")");
  }
  return tail + body;
}

double psi_eval(const OrliczPhi& phi, double s) {
  if (!(s > 0.0)) throw Error(ErrorCode::NotPositive, "psi needs s > 0");
  if (auto v = phi.psi_closed_form(s)) return *v;
  return phi.psi_quadrature(s);
}

PhiReport validate(const OrliczPhi& phi) {
  PhiReport report;
  for (int k = 0; k <= 120; ++k) {
    const double s = std::pow(10.0, -6.0 + 0.1 * k);
    const double v = phi(s);
    if (!(v > 0.0)) {
      report.positive = false;
      report.violations.push_back("phi(" + fmt_double(s) + ") = " + fmt_double(v) + " is not positive");
      break;
    }
  }
  if (!report.positive) return report;

  double prev = 0.0;
  double prev_inc = 0.0;
  bool grows = true;
  for (int k = 0; k <= 6; ++k) {
    double v;
    try {
      v = psi_eval(phi, std::pow(10.0, k));
    } catch (const Error&) {
      report.psi_finite_at_zero = false;
      report.violations.push_back("psi could not be evaluated");
      return report;
    }
    if (!std::isfinite(v)) {
      report.psi_finite_at_zero = false;
      report.violations.push_back("psi is not finite");
      return report;
    }
    if (k > 0) {
      const double inc = v - prev;
      if (!(inc > 0.0)) grows = false;
      if (k > 1 && inc < 0.5 * prev_inc) grows = false;
      prev_inc = inc;
    }
    prev = v;
  }
  report.psi_diverges = grows;
  if (!grows) report.violations.push_back("psi(s) appears bounded as s -> infinity");
  return report;
}

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

double parse_number(const std::string& text, std::string_view context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidConfig, "bad number '" + text + "' in " + std::string(context));
  }
}

// key=value pairs separated by commas.
double named_value(const std::string& body, const std::string& key, std::optional<double> fallback,
                   std::string_view context) {
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) continue;
    if (trim(item.substr(0, eq)) == key) return parse_number(trim(item.substr(eq + 1)), context);
  }
  if (fallback) return *fallback;
  throw Error(ErrorCode::InvalidConfig, "missing '" + key + "=' in " + std::string(context));
}

}  // namespace

OrliczPhi make_phi(std::string_view descriptor) {
  const std::string desc = trim(descriptor);
  const auto colon = desc.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::InvalidConfig, "phi descriptor needs a family prefix: " + desc);
  }
  const std::string family = desc.substr(0, colon);
  const std::string body = desc.substr(colon + 1);
  if (family == "power") {
    return OrliczPhi::power(named_value(body, "p", std::nullopt, desc),
                            named_value(body, "a", 1.0, desc));
  }
  if (family == "exp") return OrliczPhi::exponential(named_value(body, "k", 1.0, desc));
  if (family == "sum") {
    // split on '+' that starts a new family name (exponents may contain "e+")
    std::vector<OrliczPhi> terms;
    std::size_t start = 0;
    for (std::size_t k = 0; k <= body.size(); ++k) {
      if (k == body.size() || (body[k] == '+' && k + 1 < body.size() &&
                               std::isalpha(static_cast<unsigned char>(body[k + 1])))) {
        terms.push_back(make_phi(body.substr(start, k - start)));
        start = k + 1;
      }
    }
    return OrliczPhi::sum(terms);
  }
  if (family == "table") {
    std::ifstream in(body);
    if (!in) throw Error(ErrorCode::Io, "cannot open phi table " + body);
    std::vector<double> s, v;
    std::string line;
    while (std::getline(in, line)) {
      line = trim(line);
      if (line.empty() || line[0] == '#') continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) continue;
      const std::string a = trim(line.substr(0, comma));
      const std::string b = trim(line.substr(comma + 1));
      if (!a.empty() && std::isalpha(static_cast<unsigned char>(a[0]))) continue;  // header
      s.push_back(parse_number(a, body));
      v.push_back(parse_number(b, body));
    }
    OrliczPhi phi = OrliczPhi::table(std::move(s), std::move(v));
    phi.descriptor_ = desc;
    return phi;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown phi family '" + family + "'");
}

}  // namespace chordflow
