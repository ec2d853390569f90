#include "bergman/divergence.hpp"

#include <cmath>
#include <sstream>

#include "bergman/errors.hpp"
#include "bergman/primitive_moment.hpp"

namespace bergman {

namespace {

template <class T>
const T* find_piece(std::span<const Primitive> pieces) {
  for (const auto& p : pieces)
    if (const auto* x = std::get_if<T>(&p)) return x;
  return nullptr;
}

// integral of y^a over (lo, hi), 0 < lo < hi
double power_integral(int a, double lo, double hi) {
  if (a == -1) return std::log(hi / lo);
  return (std::pow(hi, a + 1) - std::pow(lo, a + 1)) / (a + 1);
}

}  // namespace

double DivergenceCertificate::lower_bound(double cutoff) const {
  if (kind == Kind::tail_growth) {
    if (cutoff <= start) return 0.0;
    if (exponent == 0.0) return constant * (cutoff - start);
    return constant * (std::exp(exponent * cutoff) - std::exp(exponent * start)) / exponent;
  }
  if (cutoff >= start) return 0.0;
  return constant * power_integral(static_cast<int>(exponent), cutoff, start);
}

DivergenceCertificate divergence_certificate(const MultiIndex& alpha, int m,
                                             std::span<const Primitive> pieces) {
  if (alpha.nonnegative() && alpha.degree() <= m)
    throw ValidationError("alpha " + alpha.str() + " lies in I_m; its moment is finite");
  DivergenceCertificate cert;
  cert.alpha = alpha;
  std::ostringstream msg;

  int negative = -1;
  for (std::size_t j = 0; j < alpha.size(); ++j)
    if (alpha[j] <= -1) {
      negative = static_cast<int>(j);
      break;
    }

  if (negative < 0) {
    const auto* tail = find_piece<TailRegion>(pieces);
    if (!tail) throw MissingPrimitive("no tail region to certify divergence");
    const int n = tail->n;
    if (static_cast<int>(alpha.size()) != n) throw ValidationError("alpha has the wrong length");
    // in tail coordinates the integrand is >= e^{-b} n V0 e^{2(|a|-m-1)u}
    const double b = 2.0 * (alpha.degree() + n);
    cert.kind = DivergenceCertificate::Kind::tail_growth;
    cert.constant = std::exp(-b) * n * tail_section_volume(n);
    cert.exponent = 2.0 * (alpha.degree() - m - 1);
    cert.start = tail->R;
    msg << "tail integrand >= " << cert.constant << " * exp(" << cert.exponent
        << " u) on u > " << cert.start << ", exponent >= 0";
  } else {
    const auto* shell = find_piece<LogSimplexShell>(pieces);
    if (!shell) throw MissingPrimitive("no log-simplex shell to certify divergence");
    const int n = shell->n;
    if (static_cast<int>(alpha.size()) != n) throw ValidationError("alpha has the wrong length");
    // Inside the y-image of the shell sits the product of the transverse box
    // y_i in (lo, hi) for i != j and the face slab 0 < y_j < delta.
    const double top = shell->c * shell->s0, mu = shell->mu;
    const double lo = (mu + (1.0 - mu) / 4.0) * top / (n - 1);
    const double hi = (mu + (1.0 - mu) / 2.0) * top / (n - 1);
    double transverse = std::pow(2.0, -n);
    for (int i = 0; i < n; ++i)
      if (i != negative) transverse *= power_integral(alpha[i], lo, hi);
    cert.kind = DivergenceCertificate::Kind::simplex_face;
    cert.coordinate = static_cast<std::size_t>(negative);
    cert.constant = transverse;
    cert.exponent = alpha[negative];
    cert.start = (1.0 - mu) * top / 4.0;
    msg << "simplex-shell integrand >= " << cert.constant << " * y_" << negative << "^("
        << alpha[negative] << ") on 0 < y < " << cert.start << ", exponent <= -1";
  }
  cert.description = msg.str();
  return cert;
}

}  // namespace bergman
