#include "qdcascade/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qdc {

namespace {

using Mat3 = RateMatrix;

Mat3 _identity() {
  Mat3 m{};
  m[0][0] = m[1][1] = m[2][2] = 1.0;
  return m;
}

Mat3 _mul(const Mat3& a, const Mat3& b) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      const double aik = a[i][k];
      if (aik == 0.0) continue;
      for (int j = 0; j < 3; ++j) r[i][j] += aik * b[k][j];
    }
  return r;
}

Mat3 _add(const Mat3& a, const Mat3& b, double sb = 1.0) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = a[i][j] + sb * b[i][j];
  return r;
}

Mat3 _scale(const Mat3& a, double s) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = a[i][j] * s;
  return r;
}

std::array<double, 3> _apply(const Mat3& m, const std::array<double, 3>& v) {
  std::array<double, 3> r{};
  for (int i = 0; i < 3; ++i)
    r[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
  return r;
}

double _norm_inf(const Mat3& m) {
  double n = 0;
  for (int i = 0; i < 3; ++i) {
    double row = std::abs(m[i][0]) + std::abs(m[i][1]) + std::abs(m[i][2]);
    n = std::max(n, row);
  }
  return n;
}

// Solve a 3x3 linear system by Gaussian elimination with partial pivoting.
std::array<double, 3> _solve3(Mat3 a, std::array<double, 3> rhs) {
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-300)
      throw std::runtime_error("singular 3x3 system");
    std::swap(a[col], a[piv]);
    std::swap(rhs[col], rhs[piv]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (int c = col; c < 3; ++c) a[r][c] -= f * a[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  return {rhs[0] / a[0][0], rhs[1] / a[1][1], rhs[2] / a[2][2]};
}

// Scaling-and-squaring [6/6] Pade approximant of exp(A).
Mat3 _expm_pade(const Mat3& a_in) {
  static const double c[7] = {1.0,         1.0 / 2.0,    5.0 / 44.0,
                              1.0 / 66.0,  1.0 / 792.0,  1.0 / 15840.0,
                              1.0 / 665280.0};
  const double norm = _norm_inf(a_in);
  int s = 0;
  if (norm > 0.5) s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Mat3 a = _scale(a_in, std::ldexp(1.0, -s));
  const Mat3 a2 = _mul(a, a);
  const Mat3 a4 = _mul(a2, a2);
  const Mat3 a6 = _mul(a4, a2);
  const Mat3 id = _identity();
  // U = A (c1 I + c3 A^2 + c5 A^4); V = c0 I + c2 A^2 + c4 A^4 + c6 A^6.
  Mat3 u = _scale(id, c[1]);
  u = _add(u, a2, c[3]);
  u = _add(u, a4, c[5]);
  u = _mul(a, u);
  Mat3 v = _scale(id, c[0]);
  v = _add(v, a2, c[2]);
  v = _add(v, a4, c[4]);
  v = _add(v, a6, c[6]);
  const Mat3 num = _add(v, u, 1.0);
  const Mat3 den = _add(v, u, -1.0);
  // Solve den * X = num column by column.
  Mat3 x{};
  for (int j = 0; j < 3; ++j) {
    const std::array<double, 3> col = {num[0][j], num[1][j], num[2][j]};
    const auto sol = _solve3(den, col);
    for (int i = 0; i < 3; ++i) x[i][j] = sol[i];
  }
  for (int k = 0; k < s; ++k) x = _mul(x, x);
  return x;
}

Populations _clamp_unit(const std::array<double, 3>& v) {
  Populations p;
  for (int i = 0; i < 3; ++i) {
    double e = v[i];
    if (e < 0 && e > -1e-9) e = 0;
    if (e > 1 && e < 1 + 1e-9) e = 1;
    p[i] = e;
  }
  return p;
}

}  // namespace

Propagator::Propagator(const RateMatrix& m) : m_(m) {
  // A generator's columns sum to zero, so 0 is always an eigenvalue; the two
  // others solve lambda^2 + c2 lambda + c1 = 0.
  const double tr = m[0][0] + m[1][1] + m[2][2];
  const double minors = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) +
                        (m[0][0] * m[2][2] - m[0][2] * m[2][0]) +
                        (m[1][1] * m[2][2] - m[1][2] * m[2][1]);
  const double c2 = -tr;
  const double c1 = minors;
  const double disc = c2 * c2 - 4.0 * c1;
  if (disc <= 0) return;  // complex or defective: Pade route
  const double root = std::sqrt(disc);
  // Numerically stable quadratic roots.
  const double q = -0.5 * (c2 + (c2 >= 0 ? root : -root));
  lam1_ = q;
  lam2_ = (q != 0.0) ? c1 / q : 0.0;
  if (std::abs(lam1_ - lam2_) < 1e-12 || std::abs(lam1_) < 1e-12 ||
      std::abs(lam2_) < 1e-12)
    return;
  // Sylvester projectors: exp(Mt) = P0 + e^{l1 t} P1 + e^{l2 t} P2.
  const Mat3 id = _identity();
  const Mat3 m_l1 = _add(m_, _scale(id, lam1_), -1.0);
  const Mat3 m_l2 = _add(m_, _scale(id, lam2_), -1.0);
  pr0_ = _scale(_mul(m_l1, m_l2), 1.0 / (lam1_ * lam2_));
  pr1_ = _scale(_mul(m_, m_l2), 1.0 / (lam1_ * (lam1_ - lam2_)));
  pr2_ = _scale(_mul(m_, m_l1), 1.0 / (lam2_ * (lam2_ - lam1_)));
  spectral_ = true;
}

RateMatrix Propagator::matrix(double dt) const {
  if (dt < 0) throw std::invalid_argument("propagate: dt must be >= 0");
  if (dt == 0) return _identity();
  if (!spectral_) return _expm_pade(_scale(m_, dt));
  const double e1 = std::exp(lam1_ * dt);
  const double e2 = std::exp(lam2_ * dt);
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      r[i][j] = pr0_[i][j] + e1 * pr1_[i][j] + e2 * pr2_[i][j];
  return r;
}

Populations Propagator::apply(const Populations& p, double dt) const {
  const Mat3 e = matrix(dt);
  return _clamp_unit(_apply(e, {p.g, p.x, p.xx}));
}

Populations propagate(const RateMatrix& m, const Populations& p0, double dt) {
  return Propagator(m).apply(p0, dt);
}

Trajectory evolve_cycles(const DeviceParams& params, const DriveWaveform& w,
                         const Populations& p0, int n_cycles,
                         int samples_per_cycle) {
  params.validate();
  w.validate();
  p0.validate();
  if (n_cycles < 1)
    throw std::invalid_argument("evolve_cycles: n_cycles must be >= 1");
  if (samples_per_cycle < 1)
    throw std::invalid_argument("evolve_cycles: samples_per_cycle must be >= 1");

  const CycleSegments segs = cycle_segments(w);
  std::vector<Propagator> props;
  for (double p : segs.pumps) props.emplace_back(generator(params, p));

  // Sample offsets within one cycle: uniform grid plus segment bounds.
  std::vector<double> offs;
  for (int j = 0; j < samples_per_cycle; ++j)
    offs.push_back(w.period * j / samples_per_cycle);
  offs.insert(offs.end(), segs.bounds.begin(), segs.bounds.end() - 1);
  std::sort(offs.begin(), offs.end());
  offs.erase(std::unique(offs.begin(), offs.end(),
                         [](double a, double b) { return b - a < 1e-9; }),
             offs.end());

  Trajectory traj;
  traj.times.reserve(static_cast<size_t>(n_cycles) * offs.size() + 1);
  Populations state = p0;
  for (int cyc = 0; cyc < n_cycles; ++cyc) {
    const double t0 = cyc * w.period;
    Populations seg_state = state;
    size_t seg = 0;
    for (double u : offs) {
      while (seg + 1 < segs.bounds.size() - 1 && u >= segs.bounds[seg + 1]) {
        seg_state = props[seg].apply(
            seg_state, segs.bounds[seg + 1] - segs.bounds[seg]);
        ++seg;
      }
      traj.times.push_back(t0 + u);
      traj.states.push_back(props[seg].apply(seg_state, u - segs.bounds[seg]));
    }
    // Advance to the end of the cycle.
    while (seg < props.size()) {
      seg_state =
          props[seg].apply(seg_state, segs.bounds[seg + 1] - segs.bounds[seg]);
      ++seg;
    }
    state = seg_state;
  }
  traj.times.push_back(n_cycles * w.period);
  traj.states.push_back(state);
  return traj;
}

Populations periodic_steady_state(const DeviceParams& params,
                                  const DriveWaveform& w) {
  params.validate();
  w.validate();
  const CycleSegments segs = cycle_segments(w);
  Mat3 phi = _identity();
  for (size_t i = 0; i < segs.pumps.size(); ++i) {
    const Propagator prop(generator(params, segs.pumps[i]));
    phi = _mul(prop.matrix(segs.bounds[i + 1] - segs.bounds[i]), phi);
  }

  const auto residual = [&phi](const std::array<double, 3>& v) {
    const auto pv = _apply(phi, v);
    double r = 0;
    for (int i = 0; i < 3; ++i) r = std::max(r, std::abs(pv[i] - v[i]));
    return r;
  };

  // Direct solve: two rows of (Phi - I) plus the normalization row.
  std::array<double, 3> v{};
  bool direct_ok = true;
  try {
    Mat3 a{};
    for (int j = 0; j < 3; ++j) {
      a[0][j] = phi[0][j] - (j == 0 ? 1.0 : 0.0);
      a[1][j] = phi[1][j] - (j == 1 ? 1.0 : 0.0);
      a[2][j] = 1.0;
    }
    v = _solve3(a, {0.0, 0.0, 1.0});
    for (double e : v)
      if (!(e > -1e-9)) direct_ok = false;
  } catch (const std::runtime_error&) {
    direct_ok = false;
  }

  if (!direct_ok || residual(v) > 1e-10) {
    // Power iteration: Phi is column-stochastic, so the fixed point is the
    // dominant eigenvector and iteration from any probability vector works.
    v = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    for (int it = 0; it < 200000; ++it) {
      v = _apply(phi, v);
      const double s = v[0] + v[1] + v[2];
      for (auto& e : v) e /= s;
      if (residual(v) < 1e-13) break;
    }
  }

  if (residual(v) > 1e-10)
    throw std::runtime_error("periodic_steady_state: fixed point residual > 1e-10");
  return _clamp_unit(v);
}

Populations dc_steady_state(const DeviceParams& params, double pump) {
  params.validate();
  if (pump < 0)
    throw std::invalid_argument("dc_steady_state: pump must be >= 0");
  if (pump == 0) return Populations{1.0, 0.0, 0.0};
  if (params.tunnel_rate == 0) {
    const double a = params.a();
    const double b = params.b();
    const double px = 1.0 / (b / pump + 1.0 + pump / a);
    return Populations{(b / pump) * px, px, (pump / a) * px};
  }
  const RateMatrix m = generator(params, pump);
  Mat3 a{};
  for (int j = 0; j < 3; ++j) {
    a[0][j] = m[0][j];
    a[1][j] = m[1][j];
    a[2][j] = 1.0;
  }
  return _clamp_unit(_solve3(a, {0.0, 0.0, 1.0}));
}

}  // namespace qdc
