#include "rdlab/wavelet.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "rdlab/errors.hpp"

namespace rdlab {

namespace {

// Published Daubechies low-pass filters (extremal phase), sum = sqrt(2).
const std::vector<std::vector<double>> kFilters = {
    // p = 2
    {4.82962913144534156e-01, 8.36516303737807831e-01, 2.24143868042013417e-01,
     -1.29409522551260370e-01},
    // p = 3
    {3.32670552950082854e-01, 8.06891509311093102e-01, 4.59877502118491543e-01,
     -1.35011020010255056e-01, -8.54412738820268663e-02, 3.52262918857095472e-02},
    // p = 4
    {2.30377813308896146e-01, 7.14846570552914784e-01, 6.30880767929858810e-01,
     -2.79837694168586885e-02, -1.87034811719092281e-01, 3.08413818355607154e-02,
     3.28830116668851272e-02, -1.05974017850690005e-02},
    // p = 5
    {1.60102397974194427e-01, 6.03829269797195090e-01, 7.24308528437778154e-01,
     1.38428145901318661e-01, -2.42294887066388159e-01, -3.22448695846412892e-02,
     7.75714938400453163e-02, -6.24149021279867076e-03, -1.25807519990821775e-02,
     3.33572528547380160e-03},
    // p = 6
    {1.11540743350109203e-01, 4.94623890398452781e-01, 7.51133908021097585e-01,
     3.15250351709203402e-01, -2.26264693965436525e-01, -1.29766867567265465e-01,
     9.75016055873179355e-02, 2.75228655303039124e-02, -3.15820393174861408e-02,
     5.53842201161356697e-04, 4.77725751094545004e-03, -1.07730108530846376e-03},
    // p = 7
    {7.78520540850090592e-02, 3.96539319481917452e-01, 7.29132090846238090e-01,
     4.69782287405200172e-01, -1.43906003928559983e-01, -2.24036184993877813e-01,
     7.13092192668246805e-02, 8.06126091510810522e-02, -3.80299369350147465e-02,
     -1.65745416306679640e-02, 1.25509985560990651e-02, 4.29577972921290187e-04,
     -1.80164070404746548e-03, 3.53713799974512272e-04},
    // p = 8
    {5.44158422431479313e-02, 3.12871590914536424e-01, 6.75630736297730072e-01,
     5.85354683654399244e-01, -1.58291052567411765e-02, -2.84015542962032075e-01,
     4.72484573850436636e-04, 1.28747426620574867e-01, -1.73693010018497150e-02,
     -4.40882539308446869e-02, 1.39810279174141898e-02, 8.74609404741456126e-03,
     -4.87035299345681041e-03, -3.91740373377223413e-04, 6.75449406451288049e-04,
     -1.17476784124898758e-04},
    // p = 9
    {3.80779473639100766e-02, 2.43834674612780383e-01, 6.04823123690521602e-01,
     6.57288078051574187e-01, 1.33197385824705444e-01, -2.93273783279731248e-01,
     -9.68407832231300975e-02, 1.48540749338256645e-01, 3.07256814793459149e-02,
     -6.76328290614073152e-02, 2.50947114837166423e-04, 2.23616621237022750e-02,
     -4.72320475775916265e-03, -4.28150368246817733e-03, 1.84764688305850120e-03,
     2.30385763523384759e-04, -2.51963188943007954e-04, 3.93473203163205882e-05},
    // p = 10
    {2.66700579005353620e-02, 1.88176800077579559e-01, 5.27201188931555653e-01,
     6.88459039453785060e-01, 2.81172343661433843e-01, -2.49846424326450711e-01,
     -1.95946274377463536e-01, 1.27369340335073800e-01, 9.30573646031715995e-02,
     -7.13941471664592403e-02, -2.94575368220178803e-02, 3.32126740591836556e-02,
     3.60655356692643394e-03, -1.07331754833228047e-02, 1.39535174704325817e-03,
     1.99240529518101856e-03, -6.85856694957963343e-04, -1.16466855129164710e-04,
     9.35886703198622654e-05, -1.32642028944878542e-05}};

// Per-axis quadrature resolution 2^(J + kQuadExtra): the contract floor is
// J+4; two extra dyadic levels buy coefficient accuracy ~1e-5 on the roughest
// (low-order) families at negligible cost in the sizes used here.
constexpr int kQuadExtra = 6;

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::uint64_t pack_key(int level, unsigned kind, std::span<const int> r) {
  std::uint64_t key = (static_cast<std::uint64_t>(level) << 4) | kind;
  for (int v : r) {
    std::uint64_t u = static_cast<std::uint64_t>(v + 4096);
    key = (key << 13) | (u & 0x1fff);
  }
  return key;
}

}  // namespace

double WaveletFamily::eval(const std::vector<double>& table, double x) const {
  if (x <= 0.0 || x >= support_len()) return 0.0;
  double t = std::ldexp(x, table_depth);  // x / step
  auto i = static_cast<std::size_t>(t);
  if (i + 1 >= table.size()) return 0.0;
  double w = t - static_cast<double>(i);
  return table[i] + w * (table[i + 1] - table[i]);
}

double WaveletFamily::phi_moment(int k) const {
  // Two-scale recursion; exact up to round-off.
  std::vector<double> m(k + 1);
  m[0] = 1.0;
  for (int q = 1; q <= k; ++q) {
    double s = 0.0;
    for (std::size_t l = 0; l < h.size(); ++l)
      for (int j = 0; j < q; ++j)
        s += h[l] * binom(q, j) * std::pow(static_cast<double>(l), q - j) * m[j];
    m[q] = s / (std::sqrt(2.0) * (std::exp2(q) - 1.0));
  }
  return m[k];
}

double WaveletFamily::psi_moment(int k) const {
  std::vector<double> m(k + 1);
  for (int j = 0; j <= k; ++j) m[j] = phi_moment(j);
  const int n = static_cast<int>(h.size());
  double s = 0.0;
  for (int l = 0; l < n; ++l) {
    double g = ((l & 1) ? -1.0 : 1.0) * h[n - 1 - l];
    for (int j = 0; j <= k; ++j)
      s += g * binom(k, j) * std::pow(static_cast<double>(l), k - j) * m[j];
  }
  return s * std::sqrt(2.0) / std::exp2(k + 1);
}

FamilyPtr build_family(int p, int table_depth) {
  if (p < 2 || p > 10) throw ConfigError("wavelet order p must be in 2..10");
  if (table_depth < 4 || table_depth > 20) throw ConfigError("table depth must be in 4..20");

  auto fam = std::make_shared<WaveletFamily>();
  fam->p = p;
  fam->table_depth = table_depth;
  fam->h = kFilters[static_cast<std::size_t>(p - 2)];

  double sum = 0.0;
  for (double v : fam->h) sum += v;
  if (std::abs(sum - std::sqrt(2.0)) > 1e-12)
    throw NumericError("filter table corrupt: coefficients do not sum to sqrt(2)");

  const int L = 2 * p;       // filter length
  const int sup = 2 * p - 1; // support length of phi and psi
  const double rt2 = std::sqrt(2.0);

  // Values at interior integers: the two-scale relation restricted to the
  // integer lattice is an eigenproblem; solve (A - I)v = 0 together with the
  // normalization sum(v) = 1 as one least-squares system.
  const int ni = sup - 1;  // interior integers 1..2p-2
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(ni + 1, ni);
  for (int i = 1; i <= ni; ++i) {
    for (int j = 1; j <= ni; ++j) {
      int k = 2 * i - j;
      double a = (k >= 0 && k < L) ? rt2 * fam->h[static_cast<std::size_t>(k)] : 0.0;
      M(i - 1, j - 1) = a - (i == j ? 1.0 : 0.0);
    }
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ni + 1);
  M.row(ni).setOnes();
  rhs(ni) = 1.0;
  Eigen::VectorXd v = M.colPivHouseholderQr().solve(rhs);
  if ((M * v - rhs).norm() > 1e-10)
    throw NumericError("cascade eigenproblem did not solve to tolerance");

  const std::size_t n = static_cast<std::size_t>(sup) * (1u << table_depth) + 1;
  auto& phi = fam->phi;
  phi.assign(n, 0.0);
  const std::size_t unit = 1u << table_depth;  // index stride of one integer
  for (int j = 1; j <= ni; ++j) phi[static_cast<std::size_t>(j) * unit] = v(j - 1);

  // Dyadic refinement: each pass fills the odd multiples of 2^-m from the
  // coarser grid via the two-scale relation.
  for (int m = 1; m <= table_depth; ++m) {
    std::size_t stride = unit >> m;
    for (std::size_t i = stride; i < n; i += 2 * stride) {
      double acc = 0.0;
      for (int k = 0; k < L; ++k) {
        std::size_t j = 2 * i - static_cast<std::size_t>(k) * unit;
        if (2 * i >= static_cast<std::size_t>(k) * unit && j < n) acc += fam->h[k] * phi[j];
      }
      phi[i] = rt2 * acc;
    }
  }

  auto& psi = fam->psi;
  psi.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = 0; k < L; ++k) {
      std::size_t off = static_cast<std::size_t>(k) * unit;
      if (2 * i >= off && 2 * i - off < n) {
        double g = ((k & 1) ? -1.0 : 1.0) * fam->h[static_cast<std::size_t>(L - 1 - k)];
        acc += g * phi[2 * i - off];
      }
    }
    psi[i] = rt2 * acc;
  }
  return fam;
}

std::string kind_string(unsigned kind, int d) {
  std::string s(static_cast<std::size_t>(d), 's');
  for (int i = 0; i < d; ++i)
    if (kind & (1u << i)) s[static_cast<std::size_t>(i)] = 'w';
  return s;
}

unsigned kind_from_string(const std::string& s) {
  unsigned k = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == 'w')
      k |= 1u << i;
    else if (s[i] != 's')
      throw ConfigError("kind pattern must consist of 's'/'w'");
  }
  return k;
}

namespace {

void axis_range(const DomainSpec& region, int axis, int level, int sup, int& rmin, int& rmax) {
  double lo, hi;
  if (region.kind == DomainSpec::Kind::rectangle) {
    lo = region.lower[axis];
    hi = region.upper[axis];
  } else {
    lo = region.center[axis] - region.radius;
    hi = region.center[axis] + region.radius;
  }
  double scale = std::exp2(level);
  rmin = static_cast<int>(std::floor(scale * lo - sup)) + 1;
  rmax = static_cast<int>(std::ceil(scale * hi)) - 1;
}

bool box_meets_open_region(const DomainSpec& region, std::span<const double> lo,
                           std::span<const double> hi) {
  if (region.kind == DomainSpec::Kind::rectangle) {
    for (int i = 0; i < region.dim; ++i)
      if (!(lo[i] < region.upper[i] && hi[i] > region.lower[i])) return false;
    return true;
  }
  double d2 = 0.0;
  for (int i = 0; i < region.dim; ++i) {
    double c = std::clamp(region.center[i], lo[i], hi[i]);
    double t = region.center[i] - c;
    d2 += t * t;
  }
  return d2 < region.radius * region.radius;
}

bool box_inside_closed_region(const DomainSpec& region, std::span<const double> lo,
                              std::span<const double> hi) {
  if (region.kind == DomainSpec::Kind::rectangle) {
    for (int i = 0; i < region.dim; ++i)
      if (lo[i] < region.lower[i] || hi[i] > region.upper[i]) return false;
    return true;
  }
  double d2 = 0.0;
  for (int i = 0; i < region.dim; ++i) {
    double t = std::max(std::abs(region.center[i] - lo[i]), std::abs(hi[i] - region.center[i]));
    d2 += t * t;
  }
  return d2 <= region.radius * region.radius;
}

}  // namespace

int minimal_feasible_J0(const WaveletFamily& family, const NestedRegions& regions) {
  // Gap between O_0 and the complement of O_0^delta is delta/2 (per axis for
  // rectangles, radial for balls); supports must fit inside it.
  double need = regions.delta / 2.0;
  double diam_factor = regions.domain.kind == DomainSpec::Kind::ball
                           ? std::sqrt(static_cast<double>(regions.domain.dim))
                           : 1.0;
  int j = 0;
  while (family.support_len() * diam_factor * std::exp2(-j) > need) {
    ++j;
    if (j > 40) throw ConfigError("no feasible base level for these regions");
  }
  return j;
}

BasisPtr build_basis(FamilyPtr family, const NestedRegions& regions, int J0, int J) {
  if (!family) throw ConfigError("build_basis: null family");
  if (J < J0) throw ConfigError("build_basis: J must be >= J0");
  int jmin = minimal_feasible_J0(*family, regions);
  if (J0 < jmin)
    throw ConfigError("base level J0=" + std::to_string(J0) +
                      " infeasible for these regions; minimal feasible J0 is " +
                      std::to_string(jmin));

  auto basis = std::make_shared<BasisSpec>();
  basis->family = family;
  basis->regions = regions;
  basis->J0 = J0;
  basis->J = J;

  const int d = regions.domain.dim;
  const int sup = static_cast<int>(family->support_len());
  Vec blo(d), bhi(d);

  auto emit_level = [&](int level, std::size_t& level_count) {
    std::vector<int> rmin(d), rmax(d), r(d);
    for (int i = 0; i < d; ++i) axis_range(regions.O0, i, level, sup, rmin[i], rmax[i]);
    unsigned kind_first = (level == J0) ? 0u : 1u;
    unsigned kind_last = (1u << d) - 1;
    for (unsigned kind = kind_first; kind <= kind_last; ++kind) {
      r = rmin;
      while (true) {
        for (int i = 0; i < d; ++i) {
          blo[i] = std::ldexp(static_cast<double>(r[i]), -level);
          bhi[i] = std::ldexp(static_cast<double>(r[i] + sup), -level);
        }
        if (box_meets_open_region(regions.O0, blo, bhi)) {
          if (!box_inside_closed_region(regions.O0_delta, blo, bhi))
            throw NumericError("basis support escapes the enlarged region; J0 check is wrong");
          basis->indices.push_back(TensorIndex{level, kind, r});
          ++level_count;
        }
        int axis = d - 1;
        while (axis >= 0 && ++r[axis] > rmax[axis]) r[axis--] = rmin[axis];
        if (axis < 0) break;
      }
    }
  };

  for (int level = J0; level <= J; ++level) {
    std::size_t c = 0;
    emit_level(level, c);
    basis->count_per_level.push_back(c);
  }

  for (std::size_t i = 0; i < basis->indices.size(); ++i) {
    const auto& ix = basis->indices[i];
    basis->lookup[pack_key(ix.level, ix.kind, ix.r)] = static_cast<std::uint32_t>(i);
  }
  return basis;
}

void support_box(const BasisSpec& basis, const TensorIndex& idx, std::span<double> lo,
                 std::span<double> hi) {
  const int sup = static_cast<int>(basis.family->support_len());
  for (std::size_t i = 0; i < idx.r.size(); ++i) {
    lo[i] = std::ldexp(static_cast<double>(idx.r[i]), -idx.level);
    hi[i] = std::ldexp(static_cast<double>(idx.r[i] + sup), -idx.level);
  }
}

double evaluate(const BasisSpec& basis, const TensorIndex& idx, std::span<const double> x) {
  const WaveletFamily& fam = *basis.family;
  const double scale = std::exp2(idx.level);
  double v = std::exp2(0.5 * idx.level * static_cast<double>(basis.dim()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    double t = scale * x[i] - idx.r[i];
    v *= (idx.kind & (1u << i)) ? fam.eval_psi(t) : fam.eval_phi(t);
    if (v == 0.0) return 0.0;
  }
  return v;
}

void sparse_row(const BasisSpec& basis, std::span<const double> x,
                std::vector<std::pair<std::uint32_t, double>>& out) {
  out.clear();
  const WaveletFamily& fam = *basis.family;
  const int d = basis.dim();
  const int sup = static_cast<int>(fam.support_len());
  std::vector<int> kmin(d), r(d);
  // Per-axis evaluations cache: phi/psi at the (sup+1) candidate offsets.
  std::vector<double> fphi(static_cast<std::size_t>(d) * (sup + 1));
  std::vector<double> fpsi(static_cast<std::size_t>(d) * (sup + 1));

  for (int level = basis.J0; level <= basis.J; ++level) {
    const double scale = std::exp2(level);
    const double amp = std::exp2(0.5 * level * d);
    int ncand = 0;
    for (int i = 0; i < d; ++i) {
      double t = scale * x[i];
      int lo = static_cast<int>(std::ceil(t)) - sup;
      int hi = static_cast<int>(std::floor(t));
      kmin[i] = lo;
      ncand = hi - lo + 1;  // same width every axis: sup or sup+1
      for (int k = 0; k <= hi - lo; ++k) {
        double arg = t - (lo + k);
        fphi[static_cast<std::size_t>(i) * (sup + 1) + k] = fam.eval_phi(arg);
        fpsi[static_cast<std::size_t>(i) * (sup + 1) + k] = fam.eval_psi(arg);
      }
    }
    unsigned kind_first = (level == basis.J0) ? 0u : 1u;
    unsigned kind_last = (1u << d) - 1;
    for (unsigned kind = kind_first; kind <= kind_last; ++kind) {
      std::vector<int> c(d, 0);
      while (true) {
        double v = amp;
        for (int i = 0; i < d; ++i) {
          const auto* tab = (kind & (1u << i)) ? fpsi.data() : fphi.data();
          v *= tab[static_cast<std::size_t>(i) * (sup + 1) + c[i]];
          if (v == 0.0) break;
        }
        if (v != 0.0) {
          for (int i = 0; i < d; ++i) r[i] = kmin[i] + c[i];
          auto it = basis.lookup.find(pack_key(level, kind, r));
          if (it != basis.lookup.end()) out.emplace_back(it->second, v);
        }
        int axis = d - 1;
        while (axis >= 0 && ++c[axis] >= ncand) c[axis--] = 0;
        if (axis < 0) break;
      }
    }
  }
}

namespace {

// Midpoint rule over a box with per-axis step 2^-(J+4).
template <typename F>
double midpoint_box(std::span<const double> lo, std::span<const double> hi, int Jq, F&& f) {
  const int d = static_cast<int>(lo.size());
  const double h = std::exp2(-Jq);
  std::vector<int> n(d);
  std::vector<int> c(d, 0);
  double cell = 1.0;
  for (int i = 0; i < d; ++i) {
    n[i] = std::max(1, static_cast<int>(std::lround((hi[i] - lo[i]) / h)));
    cell *= (hi[i] - lo[i]) / n[i];
  }
  Vec x(static_cast<std::size_t>(d));
  double acc = 0.0;
  while (true) {
    for (int i = 0; i < d; ++i)
      x[i] = lo[i] + (hi[i] - lo[i]) * (c[i] + 0.5) / n[i];
    acc += f(std::span<const double>(x));
    int axis = d - 1;
    while (axis >= 0 && ++c[axis] >= n[axis]) c[axis--] = 0;
    if (axis < 0) break;
  }
  return acc * cell;
}

}  // namespace

CoeffVector project(const BasisSpec& basis,
                    const std::function<double(std::span<const double>)>& g) {
  CoeffVector c(basis.size());
  const int d = basis.dim();
  Vec lo(d), hi(d);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const TensorIndex& idx = basis.indices[i];
    support_box(basis, idx, lo, hi);
    c[i] = midpoint_box(lo, hi, basis.J + kQuadExtra, [&](std::span<const double> x) {
      return g(x) * evaluate(basis, idx, x);
    });
  }
  return c;
}

double synthesize_at(const BasisSpec& basis, const CoeffVector& c, std::span<const double> x) {
  static thread_local std::vector<std::pair<std::uint32_t, double>> row;
  sparse_row(basis, x, row);
  double v = 0.0;
  for (const auto& [i, val] : row) v += c[i] * val;
  return v;
}

double quad_inner(const BasisSpec& basis, const TensorIndex& a, const TensorIndex& b) {
  const int d = basis.dim();
  Vec alo(d), ahi(d), blo(d), bhi(d), lo(d), hi(d);
  support_box(basis, a, alo, ahi);
  support_box(basis, b, blo, bhi);
  for (int i = 0; i < d; ++i) {
    lo[i] = std::max(alo[i], blo[i]);
    hi[i] = std::min(ahi[i], bhi[i]);
    if (!(lo[i] < hi[i])) return 0.0;
  }
  return midpoint_box(lo, hi, basis.J + kQuadExtra, [&](std::span<const double> x) {
    return evaluate(basis, a, x) * evaluate(basis, b, x);
  });
}

double besov_coeff_norm(const BasisSpec& basis, const CoeffVector& c, double s) {
  if (c.size() != basis.size()) throw ConfigError("coefficient vector length mismatch");
  double m = 0.0;
  const double d = basis.dim();
  for (std::size_t i = 0; i < c.size(); ++i) {
    double w = std::exp2(basis.indices[i].level * (s + d / 2.0));
    m = std::max(m, w * std::abs(c[i]));
  }
  return m;
}

WaveletSumField::WaveletSumField(BasisPtr basis, CoeffVector c, double base)
    : basis_(std::move(basis)), c_(std::move(c)), base_(base) {
  if (!basis_ || c_.size() != basis_->size())
    throw ConfigError("wavelet sum field: coefficient/basis size mismatch");
}

double WaveletSumField::value(std::span<const double> x) const {
  return base_ + synthesize_at(*basis_, c_, x);
}

std::shared_ptr<WaveletSumField> bar_project(BasisPtr basis, const ScalarField& f) {
  const NestedRegions& reg = basis->regions;
  const int d = reg.domain.dim;
  // The field must equal 1 between the perturbation support and the boundary.
  const int m = 33;
  std::vector<int> c(d, 0);
  Vec lo(d), hi(d), x(d);
  if (reg.domain.kind == DomainSpec::Kind::rectangle) {
    lo = reg.domain.lower;
    hi = reg.domain.upper;
  } else {
    for (int i = 0; i < d; ++i) {
      lo[i] = reg.domain.center[i] - reg.domain.radius;
      hi[i] = reg.domain.center[i] + reg.domain.radius;
    }
  }
  while (true) {
    for (int i = 0; i < d; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * c[i] / (m - 1.0);
    // Span members legitimately spill into the enlargement, so the sanity
    // check runs outside O_0^delta where every basis support vanishes.
    if (contains(reg.domain, x) && !reg.in_O0_delta(x) && std::abs(f.value(x) - 1.0) > 1e-8)
      throw ConfigError("field is not identically 1 outside the enlarged support region");
    int axis = d - 1;
    while (axis >= 0 && ++c[axis] >= m) c[axis--] = 0;
    if (axis < 0) break;
  }
  CoeffVector coeffs =
      project(*basis, [&](std::span<const double> y) { return f.value(y) - 1.0; });
  return std::make_shared<WaveletSumField>(basis, std::move(coeffs), 1.0);
}

}  // namespace rdlab
