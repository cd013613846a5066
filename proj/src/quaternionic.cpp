#include "freeprod/quaternionic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>

#include "freeprod/error.hpp"

namespace freeprod {

namespace {

using std::numbers::pi;
using Eigen::VectorXd;
constexpr cplx I{0.0, 1.0};
constexpr double inside_threshold = 1e-10;
constexpr double seed_b = 0.0316227766016838;  // |b|^2 = 1e-3

struct Solution {
  VectorXd x;
  bool converged = false;
};

// Gauss-Newton with minimum-norm SVD steps: the b sector has a U(1) gauge
// freedom, so the Jacobian is rank deficient on the solution manifold.
Solution gauss_newton(const std::function<VectorXd(const VectorXd&)>& f, VectorXd x, int max_iterations,
                      double tolerance, const std::function<bool(const VectorXd&)>& give_up = {}) {
  VectorXd r = f(x);
  double norm = r.norm();
  const auto n = x.size();
  Eigen::MatrixXd J(r.size(), n);
  for (int it = 0; it < max_iterations; ++it) {
    if (!std::isfinite(norm)) return {x, false};
    if (norm <= tolerance) return {x, true};
    if (give_up && give_up(x)) return {x, false};
    for (Eigen::Index k = 0; k < n; ++k) {
      const double h = 1e-7 * (1.0 + std::abs(x[k]));
      VectorXd xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      J.col(k) = (f(xp) - f(xm)) / (2.0 * h);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    const VectorXd step = svd.solve(r);
    double lambda = 1.0;
    bool moved = false;
    while (lambda > 1e-4) {
      const VectorXd trial = x - lambda * step;
      const VectorXd rt = f(trial);
      const double nt = rt.norm();
      if (std::isfinite(nt) && nt < norm * (1.0 - 1e-4 * lambda)) {
        x = trial;
        r = rt;
        norm = nt;
        moved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!moved) return {x, norm <= 1e3 * tolerance};
  }
  return {x, norm <= tolerance};
}

cplx at(const VectorXd& x, int k) { return {x[2 * k], x[2 * k + 1]}; }

void put(VectorXd& x, int k, cplx v) {
  x[2 * k] = v.real();
  x[2 * k + 1] = v.imag();
}

// Twist c with c^2 = z/|z|.
cplx twist(cplx z) { return std::exp(I * (0.5 * std::arg(z))); }

// [X]^L = U X U^dagger and [X]^R = U^dagger X U with U = diag(c^(1/2), conj(c)^(1/2)).
Quaternion left(const Quaternion& x, cplx c) {
  Quaternion y = x;
  y(0, 1) *= c;
  y(1, 0) *= std::conj(c);
  return y;
}

Quaternion right(const Quaternion& x, cplx c) {
  Quaternion y = x;
  y(0, 1) *= std::conj(c);
  y(1, 0) *= c;
  return y;
}

Quaternion z_matrix(cplx z) {
  Quaternion m = Quaternion::Zero();
  m(0, 0) = z;
  m(1, 1) = std::conj(z);
  return m;
}

struct ProductSystem {
  const GaussianQR& a;
  const GaussianQR& b;
  cplx z;
  cplx c;

  // M = Z - [R_A(G_B)]^L [R_B(G_A)]^R, the inverse of G_AB.
  Quaternion m(cplx ga, cplx ba, cplx gb, cplx bb, Quaternion* p = nullptr, Quaternion* q = nullptr) const {
    const Quaternion P = left(a.r_transform(make_quaternion(gb, bb)), c);
    const Quaternion Q = right(b.r_transform(make_quaternion(ga, ba)), c);
    if (p) *p = P;
    if (q) *q = Q;
    return z_matrix(z) - P * Q;
  }

  // M [G_A]^R = P and [G_B]^L M = Q, upper row of each.
  VectorXd residual(cplx ga, cplx ba, cplx gb, cplx bb, bool with_b) const {
    Quaternion P, Q;
    const Quaternion M = m(ga, ba, gb, bb, &P, &Q);
    const Quaternion e1 = M * right(make_quaternion(ga, ba), c) - P;
    const Quaternion e2 = left(make_quaternion(gb, bb), c) * M - Q;
    VectorXd r(with_b ? 8 : 4);
    r.head<4>() << e1(0, 0).real(), e1(0, 0).imag(), e2(0, 0).real(), e2(0, 0).imag();
    if (with_b) {
      r[4] = e1(0, 1).real();
      r[5] = e1(0, 1).imag();
      r[6] = e2(0, 1).real();
      r[7] = e2(0, 1).imag();
    }
    return r;
  }
};

struct PointState {
  cplx ga, ba, gb, bb;
  bool inside = false;
  bool converged = false;
};

std::optional<PointState> solve_trivial(const ProductSystem& s, cplx ga, cplx gb) {
  VectorXd x(4);
  put(x, 0, ga);
  put(x, 1, gb);
  const auto r = gauss_newton([&](const VectorXd& v) { return s.residual(at(v, 0), 0.0, at(v, 1), 0.0, false); }, x,
                              60, 1e-13);
  if (!r.converged) return std::nullopt;
  return PointState{at(r.x, 0), 0.0, at(r.x, 1), 0.0, false, true};
}

std::optional<PointState> solve_nontrivial(const ProductSystem& s, const PointState& seed, int max_iterations) {
  VectorXd x(8);
  put(x, 0, seed.ga);
  put(x, 1, seed.ba);
  put(x, 2, seed.gb);
  put(x, 3, seed.bb);
  const auto collapsed = [](const VectorXd& v) {
    return std::norm(at(v, 1)) < 1e-14 || std::norm(at(v, 3)) < 1e-14;
  };
  const auto r = gauss_newton(
      [&](const VectorXd& v) { return s.residual(at(v, 0), at(v, 1), at(v, 2), at(v, 3), true); }, x,
      max_iterations, 1e-12, collapsed);
  if (!r.converged) return std::nullopt;
  PointState out{at(r.x, 0), at(r.x, 1), at(r.x, 2), at(r.x, 3), true, true};
  if (std::norm(out.ba) <= inside_threshold || std::norm(out.bb) <= inside_threshold) return std::nullopt;
  return out;
}

// Determinant of the b-linearisation at a trivial solution, in the variables
// (conj(c) b_A, c b_B) where it is real. Negative means b = 0 is unstable.
double trivial_b_determinant(const GaussianQR& a, const GaussianQR& b, cplx z, const PointState& s) {
  const cplx pa = a.q + a.sigma * a.sigma * a.tau * s.gb;
  const cplx pb = b.q + b.sigma * b.sigma * b.tau * s.ga;
  const double m2 = std::norm(z - pa * pb);
  const double sa2 = a.sigma * a.sigma, sb2 = b.sigma * b.sigma;
  return (m2 - sb2 * std::norm(pa)) * (m2 - sa2 * std::norm(pb)) - sa2 * sb2 * std::norm(z);
}

cplx trivial_single_green(const GaussianQR& a, cplx z) {
  // g = 1/(z - q - sigma^2 tau g): the root that behaves as 1/(z - q).
  const cplx w = z - a.q;
  const double k = a.sigma * a.sigma * a.tau;
  if (k == 0.0) return 1.0 / w;
  const cplx root = std::sqrt(w * w - 4.0 * k);
  const cplx g1 = (w - root) / (2.0 * k), g2 = (w + root) / (2.0 * k);
  return std::abs(g1) <= std::abs(g2) ? g1 : g2;
}

void fill_density(PlanarField& field) {
  const int n = field.grid.points;
  field.rho.assign(field.g.size(), 0.0);
  for (int j = 1; j + 1 < n; ++j)
    for (int i = 1; i + 1 < n; ++i) field.rho[field.index(i, j)] = density_from_field(field, i, j);
}

// The lattice origin has no twist; take the radial limit from its neighbours.
void patch_origin(PlanarField& field, int i0, int j0) {
  const auto k = field.index(i0, j0);
  const std::array<std::size_t, 4> nb{field.index(i0 - 1, j0), field.index(i0 + 1, j0), field.index(i0, j0 - 1),
                                      field.index(i0, j0 + 1)};
  cplx g = 0.0;
  double b = 0.0;
  int inside = 0;
  for (auto m : nb) {
    g += 0.25 * field.g[m];
    b += 0.25 * field.b_sq[m];
    inside += field.inside[m];
  }
  field.g[k] = g;
  field.b_sq[k] = b;
  field.inside[k] = inside >= 2;
  field.resolved[k] = 1;
}

PlanarField empty_field(const GridSpec& grid) {
  if (grid.points < 5 || !(grid.half_width > 0.0)) throw Error(ErrorCode::invalid_argument, "grid too small");
  PlanarField f;
  f.grid = grid;
  const auto n = static_cast<std::size_t>(grid.points) * grid.points;
  f.g.assign(n, 0.0);
  f.b_sq.assign(n, 0.0);
  f.inside.assign(n, 0);
  f.resolved.assign(n, 0);
  return f;
}

std::optional<std::pair<int, int>> origin_index(const GridSpec& grid) {
  const double t = grid.half_width / grid.h();
  const int i = static_cast<int>(std::lround(t));
  if (std::abs(t - i) > 1e-9 || i <= 0 || i >= grid.points - 1) return std::nullopt;
  return std::make_pair(i, i);
}

// One inside component; outside may be the exterior plus at most one hole.
void check_topology(const PlanarField& f) {
  const int n = f.grid.points;
  const auto components = [&](char want) {
    std::vector<int> label(f.inside.size(), -1);
    int count = 0;
    std::vector<std::pair<int, int>> stack;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        if (f.inside[f.index(i, j)] != want || label[f.index(i, j)] >= 0) continue;
        stack.push_back({i, j});
        label[f.index(i, j)] = count;
        while (!stack.empty()) {
          const auto [a, b] = stack.back();
          stack.pop_back();
          const int da[4] = {1, -1, 0, 0}, db[4] = {0, 0, 1, -1};
          for (int d = 0; d < 4; ++d) {
            const int x = a + da[d], y = b + db[d];
            if (x < 0 || y < 0 || x >= n || y >= n) continue;
            const auto k = f.index(x, y);
            if (f.inside[k] == want && label[k] < 0) {
              label[k] = count;
              stack.push_back({x, y});
            }
          }
        }
        ++count;
      }
    return count;
  };
  const int in = components(1);
  const int out = components(0);
  if (in > 1 || out > 2) {
    std::ostringstream msg;
    msg << "inside region has " << in << " components and " << out << " outside components";
    throw Error(ErrorCode::mask_inconsistency, msg.str());
  }
}

}  // namespace

Quaternion make_quaternion(cplx g, cplx b) {
  Quaternion m;
  m << g, I * b, I * std::conj(b), std::conj(g);
  return m;
}

Quaternion QuaternionicGreen::matrix() const { return make_quaternion(g, b); }

Quaternion GaussianQR::r_transform(const Quaternion& g) const {
  const double s2 = sigma * sigma;
  Quaternion r;
  r << q + s2 * tau * g(0, 0), s2 * g(0, 1), s2 * g(1, 0), std::conj(q) + s2 * tau * g(1, 1);
  return r;
}

void GaussianQR::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw Error(ErrorCode::invalid_argument, "sigma must be >= 0");
  if (!(tau >= -1.0 && tau <= 1.0)) throw Error(ErrorCode::invalid_argument, "tau must lie in [-1, 1]");
}

GaussianQR ginibre_qr() { return {0.0, 1.0, 0.0}; }
GaussianQR gue_qr() { return {0.0, 1.0, 1.0}; }

GaussianQR parse_gaussian_qr(std::string_view text) {
  std::string s(text);
  if (s == "ginibre") return ginibre_qr();
  if (s == "gue") return gue_qr();
  GaussianQR a = ginibre_qr();
  if (s.rfind("elliptic:", 0) == 0) {
    a.tau = std::stod(s.substr(9));
    a.validate();
    return a;
  }
  std::stringstream in(s);
  std::string item;
  try {
    while (std::getline(in, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::invalid_argument, "expected key=value in '" + item + "'");
      const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
      if (key == "q") {
        // "1", "1+0.5i", "-0.5i"
        const auto ipos = value.find('i');
        if (ipos == std::string::npos) {
          a.q = std::stod(value);
        } else {
          const std::string body = value.substr(0, ipos);
          const auto split = body.find_last_of("+-");
          if (split == std::string::npos || split == 0) {
            a.q = cplx(0.0, body.empty() || body == "+" ? 1.0 : body == "-" ? -1.0 : std::stod(body));
          } else {
            a.q = cplx(std::stod(body.substr(0, split)), std::stod(body.substr(split)));
          }
        }
      } else if (key == "s" || key == "sigma") {
        a.sigma = std::stod(value);
      } else if (key == "tau") {
        a.tau = std::stod(value);
      } else {
        throw Error(ErrorCode::invalid_argument, "unknown factor key '" + key + "'");
      }
    }
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::invalid_argument, "cannot parse factor '" + s + "'");
  }
  a.validate();
  return a;
}

std::string describe(const GaussianQR& a) {
  std::ostringstream out;
  out << "q=" << a.q.real();
  if (a.q.imag() != 0.0) out << (a.q.imag() > 0 ? "+" : "") << a.q.imag() << "i";
  out << ",s=" << a.sigma << ",tau=" << a.tau;
  return out.str();
}

QuaternionicGreen qgreen_from_qr(const GaussianQR& a, cplx z) {
  a.validate();
  if (z == 0.0) throw Error(ErrorCode::invalid_argument, "z = 0 is handled by the radial limit");
  const cplx trivial = trivial_single_green(a, z);
  if (a.sigma == 0.0) return {trivial, 0.0};
  // G M = 1 with M = Z - R(G), upper row.
  const auto residual = [&](const VectorXd& v) {
    const Quaternion G = make_quaternion(at(v, 0), at(v, 1));
    const Quaternion e = G * (z_matrix(z) - a.r_transform(G)) - Quaternion::Identity();
    VectorXd r(4);
    r << e(0, 0).real(), e(0, 0).imag(), e(0, 1).real(), e(0, 1).imag();
    return r;
  };
  for (double b0 : {1.0 / a.sigma, seed_b / a.sigma, 0.5 / a.sigma}) {
    VectorXd x(4);
    put(x, 0, trivial);
    put(x, 1, b0);
    const auto r = gauss_newton(residual, x, 80, 1e-13);
    if (r.converged && std::norm(at(r.x, 1)) > inside_threshold) return {at(r.x, 0), at(r.x, 1)};
  }
  VectorXd x(4);
  put(x, 0, trivial);
  put(x, 1, 0.0);
  const auto r = gauss_newton(residual, x, 80, 1e-13);
  if (!r.converged) {
    std::ostringstream msg;
    msg << "no solution at z=" << z;
    throw Error(ErrorCode::newton_divergence, msg.str());
  }
  return {at(r.x, 0), 0.0};
}

int PlanarField::unresolved_count() const {
  return static_cast<int>(std::count(resolved.begin(), resolved.end(), 0));
}

double PlanarField::mass() const {
  return std::accumulate(rho.begin(), rho.end(), 0.0) * grid.h() * grid.h();
}

double PlanarField::mass_where(const std::function<bool(cplx)>& keep) const {
  double total = 0.0;
  for (int j = 0; j < grid.points; ++j)
    for (int i = 0; i < grid.points; ++i)
      if (keep(grid.point(i, j))) total += rho[index(i, j)];
  return total * grid.h() * grid.h();
}

PlanarField qsingle_solve(const GaussianQR& a, const GridSpec& grid) {
  auto field = empty_field(grid);
  const int n = grid.points;
  const auto origin = origin_index(grid);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (origin && origin->first == i && origin->second == j) continue;
      const auto k = field.index(i, j);
      try {
        const auto q = qgreen_from_qr(a, grid.point(i, j));
        field.g[k] = q.g;
        field.b_sq[k] = std::norm(q.b);
        field.inside[k] = field.b_sq[k] > inside_threshold;
        field.resolved[k] = 1;
      } catch (const Error&) {
      }
    }
  if (origin) patch_origin(field, origin->first, origin->second);
  fill_density(field);
  return field;
}

PlanarField qmultiply_solve(const GaussianQR& a, const GaussianQR& b, const GridSpec& grid) {
  a.validate();
  b.validate();
  auto field = empty_field(grid);
  const int n = grid.points;
  const auto origin = origin_index(grid);

  // Sweep inward: each point is seeded by an already solved, farther neighbour.
  std::vector<std::pair<int, int>> order;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (!(origin && origin->first == i && origin->second == j)) order.push_back({i, j});
  std::stable_sort(order.begin(), order.end(), [&](const auto& p, const auto& q) {
    return std::abs(grid.point(p.first, p.second)) > std::abs(grid.point(q.first, q.second));
  });

  std::vector<PointState> state(field.g.size());
  const auto store = [&](std::size_t k, const ProductSystem& sys, const PointState& s) {
    state[k] = s;
    field.resolved[k] = 1;
    field.inside[k] = s.inside;
    field.b_sq[k] = s.inside ? std::norm(s.ba) : 0.0;
    field.g[k] = sys.m(s.ga, s.ba, s.gb, s.bb).inverse()(0, 0);
  };
  const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
  for (const auto& [i, j] : order) {
    const cplx z = grid.point(i, j);
    const ProductSystem sys{a, b, z, twist(z)};
    const PointState* trivial_seed = nullptr;
    const PointState* inside_seed = nullptr;
    for (int d = 0; d < 4; ++d) {
      const int x = i + di[d], y = j + dj[d];
      if (x < 0 || y < 0 || x >= n || y >= n) continue;
      const auto& s = state[field.index(x, y)];
      if (!s.converged) continue;
      if (s.inside && !inside_seed) inside_seed = &s;
      if (!trivial_seed) trivial_seed = &s;
    }

    std::optional<PointState> trivial;
    if (trivial_seed && !trivial_seed->inside) trivial = solve_trivial(sys, trivial_seed->ga, trivial_seed->gb);
    if (!trivial) {
      // Far field: G_A ~ q_A / z and so on.
      trivial = solve_trivial(sys, a.q / z, b.q / z);
    }

    std::optional<PointState> found;
    if (inside_seed) found = solve_nontrivial(sys, *inside_seed, 60);
    if (!found && trivial && (inside_seed || trivial_b_determinant(a, b, z, *trivial) < 0.0)) {
      for (double b0 : {seed_b, 0.5, 1.0}) {
        PointState seed = *trivial;
        seed.ba = b0;
        seed.bb = b0;
        if ((found = solve_nontrivial(sys, seed, 60))) break;
      }
    }

    const auto k = field.index(i, j);
    if (found) {
      store(k, sys, *found);
    } else if (trivial) {
      store(k, sys, *trivial);
    }
  }

  // The cold start only finds part of the support; grow it outward from every
  // inside point until no neighbour admits a non-trivial solution.
  std::vector<std::pair<int, int>> frontier;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (field.inside[field.index(i, j)]) frontier.push_back({i, j});
  while (!frontier.empty()) {
    const auto [i, j] = frontier.back();
    frontier.pop_back();
    const auto& from = state[field.index(i, j)];
    for (int d = 0; d < 4; ++d) {
      const int x = i + di[d], y = j + dj[d];
      if (x < 0 || y < 0 || x >= n || y >= n) continue;
      const auto k = field.index(x, y);
      if (field.inside[k] || (origin && origin->first == x && origin->second == y)) continue;
      const cplx z = grid.point(x, y);
      const ProductSystem sys{a, b, z, twist(z)};
      auto found = solve_nontrivial(sys, from, 60);
      if (!found) {
        PointState seed = from;
        seed.ba = seed.bb = seed_b;
        found = solve_nontrivial(sys, seed, 60);
      }
      if (!found) continue;
      store(k, sys, *found);
      frontier.push_back({x, y});
    }
  }
  if (origin) patch_origin(field, origin->first, origin->second);
  fill_density(field);
  check_topology(field);
  return field;
}

GridSpec default_grid(const GaussianQR& a, const GaussianQR& b, int points) {
  // Spectral radius bound from the ellipse semi-axes, refined by a coarse solve.
  const double bound = (std::abs(a.q) + a.sigma * (1.0 + std::abs(a.tau))) *
                       (std::abs(b.q) + b.sigma * (1.0 + std::abs(b.tau)));
  const GridSpec coarse{1.25 * std::max(bound, 1e-3), 49};
  const auto field = qmultiply_solve(a, b, coarse);
  double radius = 0.0;
  for (int j = 0; j < coarse.points; ++j)
    for (int i = 0; i < coarse.points; ++i)
      if (field.inside[field.index(i, j)]) radius = std::max(radius, std::abs(coarse.point(i, j)));
  radius = (radius > 0.0) ? radius + coarse.h() : bound;
  return {1.25 * radius, points};
}

double density_from_field(const PlanarField& field, int i, int j) {
  const int n = field.grid.points;
  if (i < 1 || j < 1 || i > n - 2 || j > n - 2) {
    std::ostringstream msg;
    msg << "(" << i << ", " << j << ") is on the lattice border";
    throw Error(ErrorCode::boundary_point, msg.str());
  }
  const double h = field.grid.h();
  const double dx = (field.g[field.index(i + 1, j)].real() - field.g[field.index(i - 1, j)].real()) / (2.0 * h);
  const double dy = (-field.g[field.index(i, j + 1)].imag() + field.g[field.index(i, j - 1)].imag()) / (2.0 * h);
  return (dx + dy) / (2.0 * pi);
}

bool Contour::contains(cplx z) const {
  bool in = false;
  for (const auto& loop : loops) {
    const std::size_t m = loop.size();
    for (std::size_t p = 0, q = m - 1; p < m; q = p++) {
      const cplx a = loop[p], b = loop[q];
      if ((a.imag() > z.imag()) != (b.imag() > z.imag()) &&
          z.real() < (b.real() - a.real()) * (z.imag() - a.imag()) / (b.imag() - a.imag()) + a.real())
        in = !in;
    }
  }
  return in;
}

std::size_t Contour::vertex_count() const {
  std::size_t total = 0;
  for (const auto& loop : loops) total += loop.size();
  return total;
}

double Contour::max_distance_to(const std::function<double(cplx)>& distance) const {
  double worst = 0.0;
  for (const auto& loop : loops)
    for (cplx v : loop) worst = std::max(worst, distance(v));
  return worst;
}

Contour support_contour(const PlanarField& field) {
  const int n = field.grid.points;
  const double h = field.grid.h();
  const auto in = [&](int i, int j) { return field.inside[field.index(i, j)] != 0; };
  // Crossing on the lattice edge between an inside point p and an outside
  // neighbour: extrapolate |b|^2 linearly from p and the next point inward.
  const auto crossing = [&](int pi_, int pj, int oi, int oj) {
    const int di = oi - pi_, dj = oj - pj;
    const double s1 = field.b_sq[field.index(pi_, pj)];
    double t = 0.5;
    const int qi = pi_ - di, qj = pj - dj;
    if (qi >= 0 && qj >= 0 && qi < n && qj < n && in(qi, qj)) {
      const double s2 = field.b_sq[field.index(qi, qj)];
      if (s2 > s1) t = std::clamp(s1 / (s2 - s1), 0.0, 1.0);
    }
    return field.grid.point(pi_, pj) + cplx(di * t * h, dj * t * h);
  };
  // Edge keys: horizontal edge (i,j)-(i+1,j) -> 2*index, vertical (i,j)-(i,j+1) -> 2*index+1.
  std::map<long, cplx> points;
  const auto edge_point = [&](int i, int j, bool vertical) {
    const long key = 2L * static_cast<long>(field.index(i, j)) + (vertical ? 1 : 0);
    if (!points.count(key)) {
      const int oi = vertical ? i : i + 1, oj = vertical ? j + 1 : j;
      points[key] = in(i, j) ? crossing(i, j, oi, oj) : crossing(oi, oj, i, j);
    }
    return key;
  };
  std::multimap<long, long> links;
  const auto link = [&](long a, long b) {
    links.insert({a, b});
    links.insert({b, a});
  };
  for (int j = 0; j + 1 < n; ++j)
    for (int i = 0; i + 1 < n; ++i) {
      const bool c0 = in(i, j), c1 = in(i + 1, j), c2 = in(i + 1, j + 1), c3 = in(i, j + 1);
      const int mask = c0 | (c1 << 1) | (c2 << 2) | (c3 << 3);
      if (mask == 0 || mask == 15) continue;
      // Cell edges: bottom, right, top, left.
      const auto bottom = [&] { return edge_point(i, j, false); };
      const auto rightE = [&] { return edge_point(i + 1, j, true); };
      const auto top = [&] { return edge_point(i, j + 1, false); };
      const auto leftE = [&] { return edge_point(i, j, true); };
      std::vector<long> crossings;
      if (c0 != c1) crossings.push_back(bottom());
      if (c1 != c2) crossings.push_back(rightE());
      if (c2 != c3) crossings.push_back(top());
      if (c3 != c0) crossings.push_back(leftE());
      if (crossings.size() == 2) {
        link(crossings[0], crossings[1]);
      } else if (crossings.size() == 4) {
        // Saddle: keep the inside corners joined (c0,c2 or c1,c3 diagonal).
        if (c0) {
          link(crossings[0], crossings[1]);
          link(crossings[2], crossings[3]);
        } else {
          link(crossings[0], crossings[3]);
          link(crossings[1], crossings[2]);
        }
      }
    }
  Contour contour;
  std::map<long, bool> used;
  for (const auto& [start, unused] : points) {
    (void)unused;
    if (used[start]) continue;
    std::vector<cplx> loop;
    long prev = -1, cur = start;
    bool closed = false;
    while (true) {
      used[cur] = true;
      loop.push_back(points[cur]);
      const auto range = links.equal_range(cur);
      long next = -1;
      for (auto it = range.first; it != range.second; ++it)
        if (it->second != prev && !(loop.size() == 1 && used[it->second])) {
          next = it->second;
          break;
        }
      if (next == start) {
        closed = true;
        break;
      }
      if (next < 0 || used[next]) break;
      prev = cur;
      cur = next;
    }
    if (!closed) throw Error(ErrorCode::open_contour, "the |b|^2 = 0 level set leaves the grid");
    contour.loops.push_back(std::move(loop));
  }
  return contour;
}

ClosedFormProduct closed_form_product(std::string_view kind) {
  if (kind == "ginibre*ginibre" || kind == "elliptic*elliptic" || kind == "gue*gue") {
    return {std::string(kind),
            [](cplx z) {
              const double r = std::abs(z);
              return (r > 0.0 && r <= 1.0) ? 1.0 / (2.0 * pi * r) : 0.0;
            },
            1.0};
  }
  throw Error(ErrorCode::unknown_catalog_entry, "no closed form for '" + std::string(kind) + "'");
}

std::vector<cplx> limacon_outline(int points) {
  std::vector<cplx> out;
  out.reserve(points);
  for (int k = 0; k < points; ++k) {
    const double phi = 2.0 * pi * k / points;
    out.push_back(std::polar(1.0 + 2.0 * std::cos(phi), phi));
  }
  return out;
}

double limacon_distance(cplx z) {
  // Coarse scan, then golden-section refinement around the best sample.
  const auto d = [&](double phi) { return std::abs(std::polar(1.0 + 2.0 * std::cos(phi), phi) - z); };
  constexpr int samples = 4096;
  int best = 0;
  double best_d = d(0.0);
  for (int k = 1; k < samples; ++k) {
    const double v = d(2.0 * pi * k / samples);
    if (v < best_d) {
      best_d = v;
      best = k;
    }
  }
  double lo = 2.0 * pi * (best - 1) / samples, hi = 2.0 * pi * (best + 1) / samples;
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 60; ++it) {
    const double m1 = hi - ratio * (hi - lo), m2 = lo + ratio * (hi - lo);
    (d(m1) < d(m2) ? hi : lo) = (d(m1) < d(m2) ? m2 : m1);
  }
  return std::min(best_d, d(0.5 * (lo + hi)));
}

}  // namespace freeprod
