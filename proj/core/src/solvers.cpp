#include "holderlab/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "holderlab/error.hpp"

namespace holderlab {

namespace {

// |u|^e with exact fast paths; pow(x, 0) == 1 and pow(x, 1) == x in IEEE
// arithmetic, so the fast paths do not change results.
inline double abs_pow(double u, double e) {
  const double a = std::abs(u);
  if (e == 0.0) return 1.0;
  if (e == 1.0) return a;
  if (e == 2.0) return a * a;
  return std::pow(a, e);
}

inline double grad_factor(double g2, double eps2, double half_exp) {
  if (half_exp == 0.0) return 1.0;
  const double s = g2 + eps2;
  if (half_exp == 0.5) return std::sqrt(s);
  if (half_exp == 1.0) return s;
  return std::pow(s, half_exp);
}

struct Flux {
  double m;
  double m_exp;     // m - 1
  double half_exp;  // (p - 2)/2
  double eps2;

  double diffusivity(double u_face, double g2) const {
    return m * abs_pow(u_face, m_exp) * grad_factor(g2, eps2, half_exp);
  }
};

Flux make_flux(const EquationParams& params, double eps) {
  return {params.m, params.m - 1.0, 0.5 * (params.p - 2.0), eps * eps};
}

[[noreturn]] void blow_up(std::int64_t step, double t) {
  std::ostringstream os;
  os << "non-finite value at step " << step << " (t = " << t << ")";
  throw Error(ErrorKind::BlowUp, os.str());
}

// One explicit step on a line. u has nx entries; faces has nx-1.
void step_1d(std::vector<double>& u, std::vector<double>& faces, const Flux& flux, double dx,
             double dt, BoundaryKind bc, const std::vector<double>* src) {
  const int nx = static_cast<int>(u.size());
  const double inv_dx = 1.0 / dx;
  const double half_exp = flux.half_exp;
  for (int j = 0; j < nx - 1; ++j) {
    const double g = (u[j + 1] - u[j]) * inv_dx;
    const double uf = 0.5 * (u[j] + u[j + 1]);
    faces[j] = flux.diffusivity(uf, half_exp == 0.0 ? 0.0 : g * g) * g;
  }
  const double ratio = dt * inv_dx;
  if (bc == BoundaryKind::Periodic) {
    const double left0 = faces[nx - 2];
    for (int j = nx - 2; j >= 1; --j) {
      u[j] += ratio * (faces[j] - faces[j - 1]) + (src ? dt * (*src)[j] : 0.0);
    }
    u[0] += ratio * (faces[0] - left0) + (src ? dt * (*src)[0] : 0.0);
    u[nx - 1] = u[0];
    return;
  }
  for (int j = 1; j < nx - 1; ++j) {
    u[j] += ratio * (faces[j] - faces[j - 1]) + (src ? dt * (*src)[j] : 0.0);
  }
}

struct Grid2 {
  int n;
  double dx, dy;
  BoundaryKind bc;
  int idx(int i, int j) const { return j * n + i; }
  // Neighbor index along an axis with periodic wrap on the unique nodes 0..n-2.
  int wrap(int i) const {
    const int period = n - 1;
    return ((i % period) + period) % period;
  }
};

double centered_dy(const std::vector<double>& u, const Grid2& g, int i, int j) {
  if (g.bc == BoundaryKind::Periodic) {
    return (u[g.idx(i, g.wrap(j + 1))] - u[g.idx(i, g.wrap(j - 1))]) / (2.0 * g.dy);
  }
  if (j == 0) return (u[g.idx(i, 1)] - u[g.idx(i, 0)]) / g.dy;
  if (j == g.n - 1) return (u[g.idx(i, j)] - u[g.idx(i, j - 1)]) / g.dy;
  return (u[g.idx(i, j + 1)] - u[g.idx(i, j - 1)]) / (2.0 * g.dy);
}

double centered_dx(const std::vector<double>& u, const Grid2& g, int i, int j) {
  if (g.bc == BoundaryKind::Periodic) {
    return (u[g.idx(g.wrap(i + 1), j)] - u[g.idx(g.wrap(i - 1), j)]) / (2.0 * g.dx);
  }
  if (i == 0) return (u[g.idx(1, j)] - u[g.idx(0, j)]) / g.dx;
  if (i == g.n - 1) return (u[g.idx(i, j)] - u[g.idx(i - 1, j)]) / g.dx;
  return (u[g.idx(i + 1, j)] - u[g.idx(i - 1, j)]) / (2.0 * g.dx);
}

// Fluxes through the x-faces (i+1/2, j) and y-faces (i, j+1/2).
void fluxes_2d(const std::vector<double>& u, const Grid2& g, const Flux& flux,
               std::vector<double>& fx, std::vector<double>& fy) {
  const int n = g.n;
  const bool need_tangential = flux.half_exp != 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n - 1; ++i) {
      const double gx = (u[g.idx(i + 1, j)] - u[g.idx(i, j)]) / g.dx;
      double g2 = gx * gx;
      if (need_tangential) {
        const double gy = 0.5 * (centered_dy(u, g, i, j) + centered_dy(u, g, i + 1, j));
        g2 += gy * gy;
      }
      const double uf = 0.5 * (u[g.idx(i, j)] + u[g.idx(i + 1, j)]);
      fx[g.idx(i, j)] = flux.diffusivity(uf, g2) * gx;
    }
  }
  for (int j = 0; j < n - 1; ++j) {
    for (int i = 0; i < n; ++i) {
      const double gy = (u[g.idx(i, j + 1)] - u[g.idx(i, j)]) / g.dy;
      double g2 = gy * gy;
      if (need_tangential) {
        const double gx = 0.5 * (centered_dx(u, g, i, j) + centered_dx(u, g, i, j + 1));
        g2 += gx * gx;
      }
      const double uf = 0.5 * (u[g.idx(i, j)] + u[g.idx(i, j + 1)]);
      fy[g.idx(i, j)] = flux.diffusivity(uf, g2) * gy;
    }
  }
}

double divergence_2d(const std::vector<double>& fx, const std::vector<double>& fy, const Grid2& g,
                     int i, int j) {
  int im = i - 1, jm = j - 1;
  if (g.bc == BoundaryKind::Periodic) {
    im = g.wrap(i - 1);
    jm = g.wrap(j - 1);
  }
  return (fx[g.idx(i, j)] - fx[g.idx(im, j)]) / g.dx + (fy[g.idx(i, j)] - fy[g.idx(i, jm)]) / g.dy;
}

void step_2d(std::vector<double>& u, std::vector<double>& fx, std::vector<double>& fy,
             const Grid2& g, const Flux& flux, double dt, const std::vector<double>* src) {
  fluxes_2d(u, g, flux, fx, fy);
  const int n = g.n;
  if (g.bc == BoundaryKind::Periodic) {
    std::vector<double> next = u;
    for (int j = 0; j < n - 1; ++j) {
      for (int i = 0; i < n - 1; ++i) {
        next[g.idx(i, j)] += dt * divergence_2d(fx, fy, g, i, j) +
                             (src ? dt * (*src)[g.idx(i, j)] : 0.0);
      }
    }
    for (int j = 0; j < n - 1; ++j) next[g.idx(n - 1, j)] = next[g.idx(0, j)];
    for (int i = 0; i < n; ++i) next[g.idx(i, n - 1)] = next[g.idx(i, 0)];
    u.swap(next);
    return;
  }
  for (int j = 1; j < n - 1; ++j) {
    for (int i = 1; i < n - 1; ++i) {
      u[g.idx(i, j)] += dt * divergence_2d(fx, fy, g, i, j) +
                        (src ? dt * (*src)[g.idx(i, j)] : 0.0);
    }
  }
}

void apply_boundary(std::vector<double>& u, const GridSpec& grid, const SolverConfig& cfg,
                    double t) {
  const int nx = grid.nx;
  if (cfg.boundary == BoundaryKind::Periodic) return;
  auto value = [&](int i, int j) {
    if (cfg.boundary == BoundaryKind::DirichletZero) return 0.0;
    return cfg.boundary_values({grid.x_at(i), grid.y_at(j), t});
  };
  if (grid.dim == 1) {
    u[0] = value(0, 0);
    u[nx - 1] = value(nx - 1, 0);
    return;
  }
  for (int i = 0; i < nx; ++i) {
    u[i] = value(i, 0);
    u[static_cast<std::size_t>(nx - 1) * nx + i] = value(i, nx - 1);
  }
  for (int j = 0; j < nx; ++j) {
    u[static_cast<std::size_t>(j) * nx] = value(0, j);
    u[static_cast<std::size_t>(j) * nx + nx - 1] = value(nx - 1, j);
  }
}

struct Bounds {
  double field = 0.0;
  double grad = 0.0;
  bool finite = true;
};

Bounds measure_bounds(const std::vector<double>& u, const GridSpec& grid) {
  Bounds b;
  const int nx = grid.nx;
  for (double v : u) {
    if (!std::isfinite(v)) {
      b.finite = false;
      return b;
    }
    b.field = std::max(b.field, std::abs(v));
  }
  const double dx = grid.dx();
  if (grid.dim == 1) {
    for (int j = 0; j < nx - 1; ++j) b.grad = std::max(b.grad, std::abs(u[j + 1] - u[j]) / dx);
    return b;
  }
  const double dy = grid.dy();
  for (int j = 0; j < nx; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t c = static_cast<std::size_t>(j) * nx + i;
      const double gx = i + 1 < nx ? (u[c + 1] - u[c]) / dx : 0.0;
      const double gy = j + 1 < nx ? (u[c + nx] - u[c]) / dy : 0.0;
      b.grad = std::max(b.grad, std::sqrt(gx * gx + gy * gy));
    }
  }
  return b;
}

}  // namespace

std::string_view to_string(BoundaryKind kind) noexcept {
  switch (kind) {
    case BoundaryKind::DirichletFromOracle: return "dirichlet-oracle";
    case BoundaryKind::DirichletZero: return "dirichlet-zero";
    case BoundaryKind::Periodic: return "periodic";
  }
  return "unknown";
}

std::optional<BoundaryKind> boundary_kind_from_string(std::string_view name) {
  if (name == "dirichlet-oracle") return BoundaryKind::DirichletFromOracle;
  if (name == "dirichlet-zero") return BoundaryKind::DirichletZero;
  if (name == "periodic") return BoundaryKind::Periodic;
  return std::nullopt;
}

void SolverConfig::validate() const {
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "cfl_safety must lie in (0, 1]");
  }
  if (!(flux_regularization_eps >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "flux_regularization_eps must be >= 0");
  }
  if (max_steps <= 0) throw Error(ErrorKind::InvalidArgument, "max_steps must be positive");
  if (boundary == BoundaryKind::DirichletFromOracle && !boundary_values) {
    throw Error(ErrorKind::InvalidArgument, "DirichletFromOracle needs boundary_values");
  }
}

double stable_dt(const GridSpec& grid, double field_bound, double grad_bound,
                 const EquationParams& params, const SolverConfig& cfg) {
  if (!(field_bound >= 0.0) || !(grad_bound >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "stable_dt bounds must be >= 0");
  }
  const Flux flux = make_flux(params, cfg.flux_regularization_eps);
  const double d_max = flux.diffusivity(field_bound, grad_bound * grad_bound);
  const double h = grid.dim == 2 ? std::min(grid.dx(), grid.dy()) : grid.dx();
  if (!(d_max > 0.0)) return cfg.cfl_safety * h * h;
  return cfg.cfl_safety * h * h / (2.0 * grid.dim * d_max);
}

SpaceTimeField solve(const EquationParams& params, const SourceTerm& source,
                     std::span<const double> initial, const GridSpec& grid,
                     const SolverConfig& cfg, SolveStats* stats) {
  params.validate();
  grid.validate();
  cfg.validate();
  if (initial.size() != grid.nodes_per_level()) {
    throw Error(ErrorKind::InvalidArgument, "initial level has the wrong number of nodes");
  }
  const Flux flux = make_flux(params, cfg.flux_regularization_eps);
  const double linearization = std::max(1.0, params.p - 1.0);
  const std::size_t npl = grid.nodes_per_level();

  std::vector<double> u(initial.begin(), initial.end());
  for (double v : u) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "initial data is not finite");
  }
  if (cfg.boundary == BoundaryKind::DirichletZero) apply_boundary(u, grid, cfg, grid.t.lo);

  std::vector<double> out;
  out.reserve(grid.size());
  out.insert(out.end(), u.begin(), u.end());

  std::vector<double> faces(grid.dim == 1 ? grid.nx - 1 : 0);
  std::vector<double> fx(grid.dim == 2 ? npl : 0), fy(grid.dim == 2 ? npl : 0);
  const Grid2 g2{grid.nx, grid.dx(), grid.dy(), cfg.boundary};
  std::vector<double> src_level;
  const bool has_source = !source.is_zero();
  if (has_source) src_level.resize(npl);

  SolveStats st;
  st.min_dt = std::numeric_limits<double>::infinity();
  double t = grid.t.lo;
  for (int k = 1; k < grid.nt; ++k) {
    const double t_out = grid.t_at(k);
    while (t < t_out) {
      const Bounds b = measure_bounds(u, grid);
      if (!b.finite) blow_up(st.steps, t);
      double dt = stable_dt(grid, b.field, b.grad, params, cfg) / linearization;
      if (!(dt > 0.0)) blow_up(st.steps, t);
      bool last = false;
      if (t + dt >= t_out - 1e-12 * std::max(1.0, std::abs(t_out))) {
        dt = t_out - t;
        last = true;
      }
      if (has_source) {
        std::size_t idx = 0;
        for (int j = 0; j < grid.ny(); ++j) {
          for (int i = 0; i < grid.nx; ++i, ++idx) {
            src_level[idx] = source.eval_node(grid, {grid.x_at(i), grid.y_at(j), t});
          }
        }
      }
      if (grid.dim == 1) {
        step_1d(u, faces, flux, grid.dx(), dt, cfg.boundary, has_source ? &src_level : nullptr);
      } else {
        step_2d(u, fx, fy, g2, flux, dt, has_source ? &src_level : nullptr);
      }
      t = last ? t_out : t + dt;
      if (cfg.boundary == BoundaryKind::DirichletFromOracle) apply_boundary(u, grid, cfg, t);
      ++st.steps;
      st.min_dt = std::min(st.min_dt, dt);
      st.max_dt = std::max(st.max_dt, dt);
      if (st.steps > cfg.max_steps) {
        std::ostringstream os;
        os << "exceeded max_steps = " << cfg.max_steps << " at t = " << t;
        throw Error(ErrorKind::UnstableConfig, os.str());
      }
    }
    for (double v : u) {
      if (!std::isfinite(v)) blow_up(st.steps, t);
    }
    out.insert(out.end(), u.begin(), u.end());
  }
  if (stats) *stats = st;
  return SpaceTimeField(grid, std::move(out), "u",
                        std::string("solve:") + std::string(to_string(params.cls)));
}

SpaceTimeField solve(const EquationParams& params, const SourceTerm& source,
                     const Expression& initial, const GridSpec& grid, const SolverConfig& cfg,
                     SolveStats* stats) {
  std::vector<double> init(grid.nodes_per_level());
  std::size_t idx = 0;
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx; ++i, ++idx) {
      init[idx] = initial({grid.x_at(i), grid.y_at(j), grid.t.lo});
      if (!std::isfinite(init[idx])) {
        throw Error(ErrorKind::EvaluationFailure, "initial expression is not finite on the grid");
      }
    }
  }
  return solve(params, source, init, grid, cfg, stats);
}

ResidualReport residual(const SpaceTimeField& field, const EquationParams& params,
                        const SourceTerm& source, double flux_regularization_eps) {
  const GridSpec& grid = field.grid();
  if (grid.nx < 3 || grid.nt < 3) {
    throw Error(ErrorKind::GridTooCoarse, "residual needs >= 3 nodes per axis and in time");
  }
  const Flux flux = make_flux(params, flux_regularization_eps);
  const double dt = grid.dt();
  ResidualReport rep;
  rep.dx = grid.dx();
  rep.dt = dt;
  const int nx = grid.nx;
  std::vector<double> u(grid.nodes_per_level());
  std::vector<double> faces(nx - 1);
  std::vector<double> fx, fy;
  const Grid2 g2{nx, grid.dx(), grid.dy(), BoundaryKind::DirichletZero};
  if (grid.dim == 2) {
    fx.resize(u.size());
    fy.resize(u.size());
  }
  for (int k = 1; k < grid.nt - 1; ++k) {
    const auto lvl = field.level(k);
    std::copy(lvl.begin(), lvl.end(), u.begin());
    const auto prev = field.level(k - 1);
    const auto next = field.level(k + 1);
    const double t = grid.t_at(k);
    auto update = [&](std::size_t c, double div, double x, double y) {
      const double ut = (next[c] - prev[c]) / (2.0 * dt);
      const double f = source.is_zero() ? 0.0 : source.eval_node(grid, {x, y, t});
      const double res = std::abs(ut - div - f);
      if (res > rep.max_residual) {
        rep.max_residual = res;
        rep.location = {x, y, t};
      }
    };
    if (grid.dim == 1) {
      for (int j = 0; j < nx - 1; ++j) {
        const double g = (u[j + 1] - u[j]) / grid.dx();
        faces[j] = flux.diffusivity(0.5 * (u[j] + u[j + 1]), g * g) * g;
      }
      for (int j = 1; j < nx - 1; ++j) {
        update(j, (faces[j] - faces[j - 1]) / grid.dx(), grid.x_at(j), 0.0);
      }
    } else {
      fluxes_2d(u, g2, flux, fx, fy);
      for (int j = 1; j < nx - 1; ++j) {
        for (int i = 1; i < nx - 1; ++i) {
          update(static_cast<std::size_t>(j) * nx + i, divergence_2d(fx, fy, g2, i, j),
                 grid.x_at(i), grid.y_at(j));
        }
      }
    }
  }
  return rep;
}

}  // namespace holderlab
