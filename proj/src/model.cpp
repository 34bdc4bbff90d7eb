#include "rdlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rdlab/errors.hpp"

namespace rdlab {

int alpha_d(int d) {
  if (d < 1) throw ConfigError("dimension must be at least 1");
  return std::max(4, 2 * static_cast<int>(std::floor(d / 4.0 + 0.5)));
}

namespace {

void check_a(double a) {
  if (!(a > 0.5 && a < 1.0)) throw ConfigError("sampling exponent a must lie in (1/2, 1)");
}

double term1(int d) { return 4.0 + d / 2.0; }
double term2(int d, double a) { return (2.0 - a * d) / (2.0 * a - 1.0); }
double term3(int d, double a) { return d * (1.0 + a) / (2.0 * (1.0 - a)); }

}  // namespace

double s_star(int d, double a) {
  check_a(a);
  return std::max({term1(d), term2(d, a), term3(d, a)});
}

double s_star_piecewise(int d, double a) {
  check_a(a);
  if (d <= 2 || (d == 3 && a < 2.0 / 3.0))
    return std::max({term1(d), term2(d, a), term3(d, a)});
  if (d == 3) return std::max(term1(d), term3(d, a));
  return term3(d, a);
}

SequenceBundle rate_sequences(const RateParams& rp) {
  check_a(rp.a);
  if (!(rp.s > 0)) throw ConfigError("smoothness s must be positive");
  if (!(rp.N > 1)) throw ConfigError("sample count must exceed 1");
  SequenceBundle b;
  const double denom = 2.0 * rp.s + rp.d;
  b.D = std::pow(rp.N, -rp.a);
  b.eps = std::pow(rp.N, -rp.s / denom);
  b.eps1 = std::pow(rp.N, -(rp.s - 1) / denom);
  b.eps2 = std::pow(rp.N, -(rp.s - 2) / denom);
  b.eps3 = std::pow(rp.N, -(rp.s - 3) / denom);
  b.xi = b.eps;
  b.E = b.eps * b.eps + b.eps2 * b.D + b.eps3 * std::pow(b.D, 1.5);
  b.V = rp.N * b.eps * b.eps + rp.N * std::pow(b.eps, 4) / b.D +
        rp.N * rp.N * b.eps2 * b.eps2 * b.D * b.D +
        rp.N * rp.N * b.eps3 * b.eps3 * std::pow(b.D, 3) + rp.N * rp.N * std::pow(b.D, 4);
  return b;
}

RemarkReport check_remark_conditions(int d, double a, double s) {
  check_a(a);
  RemarkReport rep;
  if (d <= 2 || (d == 3 && a <= 2.0 / 3.0))
    rep.threshold = term2(d, a);
  else
    rep.threshold = 0.0;
  rep.ok = s > rep.threshold;
  std::ostringstream os;
  os << "d=" << d << " a=" << a << ": need s > " << rep.threshold << ", have s=" << s << " -> "
     << (rep.ok ? "ok" : "violated");
  rep.detail = os.str();
  return rep;
}

double link_phi(double x, double f_min) {
  if (!(f_min > 0.0 && f_min < 1.0)) throw ConfigError("f_min must lie in (0,1)");
  return f_min + (1.0 - f_min) * std::exp(x);
}

double link_phi_inverse(double y, double f_min) {
  if (!(f_min > 0.0 && f_min < 1.0)) throw ConfigError("f_min must lie in (0,1)");
  if (!(y > f_min)) throw ConfigError("link inverse needs y > f_min");
  return std::log((y - f_min) / (1.0 - f_min));
}

LinkedField::LinkedField(FieldPtr w, CutoffField chi, double f_min)
    : w_(std::move(w)), chi_(std::move(chi)), f_min_(f_min) {
  if (!w_) throw ConfigError("linked field: null w");
  if (!(f_min_ > 0.0 && f_min_ < 1.0)) throw ConfigError("f_min must lie in (0,1)");
}

double LinkedField::value(std::span<const double> x) const {
  double c = chi_.value(x);
  if (c == 0.0) return 1.0;  // phi(0) exactly
  return link_phi(c * w_->value(x), f_min_);
}

FieldPtr compose_field(FieldPtr w, const CutoffField& chi, double f_min) {
  return std::make_shared<LinkedField>(std::move(w), chi, f_min);
}

bool is_in_model_class(const ScalarField& f, const NestedRegions& regions, double tol) {
  const int d = regions.domain.dim;
  const int m = 41;
  Vec lo(d), hi(d), x(d);
  if (regions.domain.kind == DomainSpec::Kind::rectangle) {
    lo = regions.domain.lower;
    hi = regions.domain.upper;
  } else {
    for (int i = 0; i < d; ++i) {
      lo[i] = regions.domain.center[i] - regions.domain.radius;
      hi[i] = regions.domain.center[i] + regions.domain.radius;
    }
  }
  std::vector<int> c(d, 0);
  while (true) {
    for (int i = 0; i < d; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * c[i] / (m - 1.0);
    if (contains(regions.domain, x) && !regions.in_O0(x) && std::abs(f.value(x) - 1.0) > tol)
      return false;
    int axis = d - 1;
    while (axis >= 0 && ++c[axis] >= m) c[axis--] = 0;
    if (axis < 0) break;
  }
  return true;
}

namespace {

// f_eps = 1 + gamma * sum eps_ell psi_{J,ell}; supports are disjoint, so at
// most one bump is live at any x and lookup is O(d).
class AssouadMemberField final : public ScalarField {
 public:
  AssouadMemberField(AssouadFamily fam, std::vector<int> signs)
      : fam_(std::move(fam)), signs_(std::move(signs)) {}
  int dim() const override { return fam_.d; }
  double value(std::span<const double> x) const override {
    const int sup = 2 * fam_.family->p - 1;
    std::size_t ell = 0;
    for (int i = 0; i < fam_.d; ++i) {
      double t = std::ldexp(x[i], fam_.J) - fam_.r0[i];
      if (t <= 0.0) return 1.0;
      int cell = static_cast<int>(t) / fam_.spacing;
      if (cell >= fam_.per_axis || t - cell * fam_.spacing >= sup) return 1.0;
      ell = ell * static_cast<std::size_t>(fam_.per_axis) + static_cast<std::size_t>(cell);
    }
    return 1.0 + fam_.gamma * signs_[ell] * fam_.bump_value(ell, x);
  }

 private:
  AssouadFamily fam_;
  std::vector<int> signs_;
};

}  // namespace

std::size_t AssouadFamily::size() const {
  std::size_t n = 1;
  for (int i = 0; i < d; ++i) n *= static_cast<std::size_t>(per_axis);
  return n;
}

std::vector<int> AssouadFamily::bump_r(std::size_t ell) const {
  std::vector<int> r(d);
  for (int i = d - 1; i >= 0; --i) {
    r[i] = r0[i] + spacing * static_cast<int>(ell % static_cast<std::size_t>(per_axis));
    ell /= static_cast<std::size_t>(per_axis);
  }
  return r;
}

double AssouadFamily::bump_value(std::size_t ell, std::span<const double> x) const {
  auto r = bump_r(ell);
  double v = std::exp2(0.5 * J * d);
  for (int i = 0; i < d; ++i) {
    v *= family->eval_psi(std::ldexp(x[i], J) - r[i]);
    if (v == 0.0) return 0.0;
  }
  return v;
}

FieldPtr AssouadFamily::member(std::span<const int> signs) const {
  if (signs.size() != size()) throw ConfigError("sign vector length mismatch");
  for (int s : signs)
    if (s != 1 && s != -1) throw ConfigError("signs must be +1 or -1");
  return std::make_shared<AssouadMemberField>(*this, std::vector<int>(signs.begin(), signs.end()));
}

AssouadFamily build_assouad_family(const NestedRegions& regions, FamilyPtr family, double s,
                                   double N, const DomainSpec& cube, double gamma_scale,
                                   double J_scale, double f_min, double holder_budget) {
  if (!family) throw ConfigError("assouad family: null wavelet family");
  if (cube.kind != DomainSpec::Kind::rectangle)
    throw ConfigError("assouad family: the carrier must be a rectangle");
  const int d = regions.domain.dim;
  if (cube.dim != d) throw ConfigError("assouad family: dimension mismatch");
  // carrier must sit inside the core region K: check every corner
  {
    Vec corner(d);
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
      for (int i = 0; i < d; ++i)
        corner[i] = (mask & (1u << i)) ? cube.upper[i] : cube.lower[i];
      if (!regions.in_K(corner))
        throw ConfigError("assouad family: carrier cube must lie inside K");
    }
  }

  AssouadFamily fam;
  fam.family = std::move(family);
  fam.d = d;
  fam.cube_lo = cube.lower;
  fam.cube_hi = cube.upper;
  fam.gamma = gamma_scale * std::pow(N, -0.5);
  fam.J = std::max(0, static_cast<int>(std::lround(
                          std::log2(J_scale * std::pow(N, 1.0 / (2.0 * s + d))))));

  const int p = fam.family->p;
  const int sup = 2 * p - 1;
  fam.spacing = 2 * p;  // one empty dyadic cell between bumps: strict disjointness
  // per-axis: first support starts at the first integer >= 2^J * lo
  double side = cube.upper[0] - cube.lower[0];
  for (int i = 0; i < d; ++i)
    side = std::min(side, cube.upper[i] - cube.lower[i]);
  int count = static_cast<int>(
      std::floor((std::ldexp(side, fam.J) - sup) / fam.spacing)) + 1;
  if (count < 1)
    throw ConfigError("assouad family: no room for a single bump at level " +
                      std::to_string(fam.J) + "; enlarge the cube or N");
  fam.per_axis = count;
  fam.r0.resize(d);
  for (int i = 0; i < d; ++i)
    fam.r0[i] = static_cast<int>(std::ceil(std::ldexp(cube.lower[i], fam.J)));
  // confirm the last support fits on every axis
  for (int i = 0; i < d; ++i) {
    double last_hi = std::ldexp(
        static_cast<double>(fam.r0[i] + (count - 1) * fam.spacing + sup), -fam.J);
    if (last_hi > cube.upper[i] + 1e-12)
      throw ConfigError("assouad family: bump layout exceeds the carrier cube");
  }

  double psi_sup = 0.0;
  for (double v : fam.family->psi) psi_sup = std::max(psi_sup, std::abs(v));
  fam.sup_amplitude = fam.gamma * std::exp2(0.5 * fam.J * d) * std::pow(psi_sup, d);

  // membership guards: stay well above f_min pointwise, and keep the
  // smoothness proxy gamma * 2^{J(s+d/2)} under the stated budget
  if (1.0 - fam.sup_amplitude < 2.0 * f_min) {
    std::ostringstream os;
    os << "assouad family: inf f = " << 1.0 - fam.sup_amplitude << " < 2 f_min = "
       << 2.0 * f_min << "; shrink gamma_scale";
    throw ConfigError(os.str());
  }
  double proxy = fam.gamma * std::exp2(fam.J * (s + d / 2.0));
  if (proxy > holder_budget) {
    std::ostringstream os;
    os << "assouad family: smoothness proxy " << proxy << " exceeds budget " << holder_budget
       << "; shrink gamma_scale or J_scale";
    throw ConfigError(os.str());
  }
  return fam;
}

}  // namespace rdlab
