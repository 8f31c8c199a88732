/// \file problems.hpp
/// \brief Deterministic structured-grid problem generators: a mixed-Poisson
/// saddle point (RT0 x P0 on uniform quads), an Oseen lid-driven cavity on a
/// MAC staggered grid with PCD auxiliary operators, and a small fixed
/// three-field algebraic system.
///
/// All generators are pure functions of (n, parameters, seed); random data
/// comes from the SplitMix64 stream, so dumps are byte-identical across runs.

#pragma once

#include <array>
#include <filesystem>

#include "pctk/layout.hpp"
#include "pctk/mtx_io.hpp"
#include "pctk/pc.hpp"

namespace pctk {

/// Two-point flux approximation Laplacian on the n x n cell grid (5-point
/// stencil, transmissibility 1 between neighbors). Pure Neumann, hence
/// singular, unless the reference cell 0 is pinned (row/col cleared, unit
/// diagonal), which keeps the matrix symmetric positive definite.
inline CsrMatrix tpfa_laplacian(index_t n, bool pin_reference_cell) {
  require(n >= 1, "tpfa_laplacian: n must be >= 1");
  const index_t np = n * n;
  auto cell = [n](index_t i, index_t j) { return j * n + i; };
  std::vector<Triplet> t;
  for (index_t j = 0; j < n; ++j) {
    for (index_t i = 0; i < n; ++i) {
      const index_t c = cell(i, j);
      if (i + 1 < n) {
        const index_t nb = cell(i + 1, j);
        t.push_back({c, c, 1.0});
        t.push_back({nb, nb, 1.0});
        t.push_back({c, nb, -1.0});
        t.push_back({nb, c, -1.0});
      }
      if (j + 1 < n) {
        const index_t nb = cell(i, j + 1);
        t.push_back({c, c, 1.0});
        t.push_back({nb, nb, 1.0});
        t.push_back({c, nb, -1.0});
        t.push_back({nb, c, -1.0});
      }
    }
  }
  if (pin_reference_cell) {
    std::vector<Triplet> kept;
    kept.reserve(t.size());
    for (const Triplet& e : t)
      if (e.row != 0 && e.col != 0) kept.push_back(e);
    kept.push_back({0, 0, 1.0});
    t = std::move(kept);
  }
  return CsrMatrix::from_triplets(np, np, std::move(t));
}

// ---------------------------------------------------------------------------
// Mixed Poisson
// ---------------------------------------------------------------------------

/// Saddle-point system [[A, B^T], [B, O]] (q p)^T = (0 g)^T on the unit
/// square, n x n cells: A is the RT0 flux mass matrix (boundary fluxes
/// eliminated by the zero-normal-flux condition), B the cell-wise signed
/// divergence, g a seeded uniform[-1,1] cell forcing, mean-corrected so the
/// singular-consistent system is compatible. S_dg is the TPFA cell Laplacian
/// with pinned reference cell, the user Schur preconditioning matrix.
struct MixedPoissonSystem {
  SplittableMatrix K;  // fields "q" (flux), "p" (pressure)
  DenseVector b;
  CsrMatrix S_dg;
  index_t n = 0;
  double h = 0.0;
};

inline MixedPoissonSystem gen_mixed_poisson(index_t n, std::uint64_t seed) {
  require(n >= 1, "gen_mixed_poisson: n must be >= 1");
  require(n >= 2,
          "gen_mixed_poisson: n=1 leaves no interior edges once boundary fluxes are "
          "eliminated (degenerate system)");
  const double h = 1.0 / static_cast<double>(n);
  const index_t n_q = 2 * n * (n - 1);
  const index_t n_p = n * n;
  const index_t N = n_q + n_p;

  // interior vertical edges (x-flux): i = 1..n-1, j = 0..n-1, line-major in j
  auto vid = [n](index_t i, index_t j) { return j * (n - 1) + (i - 1); };
  // interior horizontal edges (y-flux): i = 0..n-1, j = 1..n-1
  auto hid = [n](index_t i, index_t j) { return n * (n - 1) + i * (n - 1) + (j - 1); };
  auto cid = [n, n_q](index_t i, index_t j) { return n_q + j * n + i; };

  const double mass_diag = h * h / 3.0;   // per adjacent cell
  const double mass_cross = h * h / 6.0;  // facing parallel edges of one cell

  std::vector<Triplet> t;
  for (index_t j = 0; j < n; ++j) {
    for (index_t i = 0; i < n; ++i) {
      // x-direction edge dofs of cell (i,j)
      const bool has_w = i >= 1;
      const bool has_e = i + 1 <= n - 1;
      if (has_w) t.push_back({vid(i, j), vid(i, j), mass_diag});
      if (has_e) t.push_back({vid(i + 1, j), vid(i + 1, j), mass_diag});
      if (has_w && has_e) {
        t.push_back({vid(i, j), vid(i + 1, j), mass_cross});
        t.push_back({vid(i + 1, j), vid(i, j), mass_cross});
      }
      // y-direction edge dofs
      const bool has_s = j >= 1;
      const bool has_n = j + 1 <= n - 1;
      if (has_s) t.push_back({hid(i, j), hid(i, j), mass_diag});
      if (has_n) t.push_back({hid(i, j + 1), hid(i, j + 1), mass_diag});
      if (has_s && has_n) {
        t.push_back({hid(i, j), hid(i, j + 1), mass_cross});
        t.push_back({hid(i, j + 1), hid(i, j), mass_cross});
      }
      // divergence rows (and their transpose in the flux equations)
      const index_t c = cid(i, j);
      auto couple = [&t, c](index_t edge, double v) {
        t.push_back({c, edge, v});
        t.push_back({edge, c, v});
      };
      if (has_e) couple(vid(i + 1, j), h);
      if (has_w) couple(vid(i, j), -h);
      if (has_n) couple(hid(i, j + 1), h);
      if (has_s) couple(hid(i, j), -h);
    }
  }

  MixedPoissonSystem sys;
  sys.n = n;
  sys.h = h;
  sys.K = SplittableMatrix(CsrMatrix::from_triplets(N, N, std::move(t)),
                           make_contiguous_layout({{"q", n_q}, {"p", n_p}}));
  sys.b.assign(static_cast<std::size_t>(N), 0.0);
  SplitMix64 rng(seed);
  for (index_t c = 0; c < n_p; ++c) sys.b[n_q + c] = rng.next_pm1();
  // two-pass mean correction keeps the residual sum at rounding level
  for (int pass = 0; pass < 2; ++pass) {
    double s = 0.0;
    for (index_t c = 0; c < n_p; ++c) s += sys.b[n_q + c];
    const double m = s / static_cast<double>(n_p);
    for (index_t c = 0; c < n_p; ++c) sys.b[n_q + c] -= m;
  }
  sys.S_dg = tpfa_laplacian(n, /*pin_reference_cell=*/true);
  return sys;
}

// ---------------------------------------------------------------------------
// Oseen lid-driven cavity
// ---------------------------------------------------------------------------

/// Frozen advection wind: an analytic divergence-free vortex with zero normal
/// component on the cavity walls.
inline std::array<double, 2> cavity_wind(double x, double y) {
  const double pi = 3.14159265358979323846;
  return {std::sin(pi * x) * std::cos(pi * y), -std::cos(pi * x) * std::sin(pi * y)};
}

/// MAC staggered-grid Oseen system -nu Lap(v) + (w . grad) v + grad p = f,
/// div v = 0, with unit tangential lid velocity on the top wall and no-slip
/// elsewhere. First-order upwinding for convection; tangential boundary
/// values enter through mirror ghosts. The pressure is pinned at reference
/// cell 0 (symmetrically), so K is nonsingular. The "v" field concatenates
/// the interior x-face and y-face velocity unknowns.
struct OseenSystem {
  SplittableMatrix K;  // fields "v" (velocity), "p" (pressure)
  DenseVector b;
  PcdContext pcd;
  index_t n = 0;
  double viscosity = 0.0;
  double wind_scale = 1.0;
  DenseVector body_force;  // f at the velocity unknowns (seeded)
};

inline OseenSystem gen_oseen_cavity(index_t n, double viscosity, std::uint64_t seed,
                                    double wind_scale = 1.0) {
  require(n >= 4, "gen_oseen_cavity: n must be >= 4");
  require(viscosity > 0.0, "gen_oseen_cavity: viscosity must be positive");
  const double h = 1.0 / static_cast<double>(n);
  const double nu = viscosity;
  const index_t n_u = n * (n - 1);
  const index_t n_v = n * (n - 1);
  const index_t n_vel = n_u + n_v;
  const index_t n_p = n * n;
  const index_t N = n_vel + n_p;
  const double lid = 1.0;

  auto uid = [n](index_t i, index_t j) { return j * (n - 1) + (i - 1); };  // i=1..n-1, j=0..n-1
  auto vid = [n, n_u](index_t i, index_t j) { return n_u + i * (n - 1) + (j - 1); };  // i=0..n-1, j=1..n-1
  auto pid = [n, n_vel](index_t i, index_t j) { return n_vel + j * n + i; };

  std::vector<Triplet> t;
  DenseVector b(static_cast<std::size_t>(N), 0.0);
  DenseVector f(static_cast<std::size_t>(n_vel), 0.0);
  SplitMix64 rng(seed);
  for (index_t k = 0; k < n_vel; ++k) f[k] = rng.next_pm1();

  // u-momentum (x velocity at vertical interior faces)
  for (index_t j = 0; j < n; ++j) {
    for (index_t i = 1; i <= n - 1; ++i) {
      const index_t row = uid(i, j);
      const double x = static_cast<double>(i) * h;
      const double y = (static_cast<double>(j) + 0.5) * h;
      const auto w = cavity_wind(x, y);
      const double w1 = wind_scale * w[0];
      const double w2 = wind_scale * w[1];
      double diag = 4.0 * nu;
      double rhs = h * h * f[row];
      // diffusion neighbors; E/W are normal-direction wall points (value 0),
      // N/S tangential walls handled by mirror ghosts
      if (i - 1 >= 1) t.push_back({row, uid(i - 1, j), -nu});
      if (i + 1 <= n - 1) t.push_back({row, uid(i + 1, j), -nu});
      if (j - 1 >= 0)
        t.push_back({row, uid(i, j - 1), -nu});
      else
        diag += nu;  // ghost below bottom wall (u_wall = 0)
      if (j + 1 <= n - 1) {
        t.push_back({row, uid(i, j + 1), -nu});
      } else {
        diag += nu;  // ghost above the lid
        rhs += 2.0 * nu * lid;
      }
      // upwind convection, x-direction (neighbors are interior or wall points)
      const double ax = h * w1;
      if (ax >= 0.0) {
        diag += ax;
        if (i - 1 >= 1) t.push_back({row, uid(i - 1, j), -ax});
      } else {
        diag -= ax;
        if (i + 1 <= n - 1) t.push_back({row, uid(i + 1, j), ax});
      }
      // upwind convection, y-direction (mirror ghosts at tangential walls)
      const double ay = h * w2;
      if (ay >= 0.0) {
        diag += ay;
        if (j - 1 >= 0)
          t.push_back({row, uid(i, j - 1), -ay});
        else
          diag += ay;  // ghost: u_S = -u
      } else {
        diag -= ay;
        if (j + 1 <= n - 1) {
          t.push_back({row, uid(i, j + 1), ay});
        } else {
          diag -= ay;            // ghost: u_N = 2*lid - u
          rhs -= 2.0 * ay * lid;
        }
      }
      // pressure gradient
      t.push_back({row, pid(i, j), h});
      t.push_back({row, pid(i - 1, j), -h});
      t.push_back({row, row, diag});
      b[row] = rhs;
    }
  }

  // v-momentum (y velocity at horizontal interior faces)
  for (index_t j = 1; j <= n - 1; ++j) {
    for (index_t i = 0; i < n; ++i) {
      const index_t row = vid(i, j);
      const double x = (static_cast<double>(i) + 0.5) * h;
      const double y = static_cast<double>(j) * h;
      const auto w = cavity_wind(x, y);
      const double w1 = wind_scale * w[0];
      const double w2 = wind_scale * w[1];
      double diag = 4.0 * nu;
      double rhs = h * h * f[row];
      if (i - 1 >= 0)
        t.push_back({row, vid(i - 1, j), -nu});
      else
        diag += nu;  // ghost past the left wall (v_wall = 0)
      if (i + 1 <= n - 1)
        t.push_back({row, vid(i + 1, j), -nu});
      else
        diag += nu;  // right wall ghost
      if (j - 1 >= 1) t.push_back({row, vid(i, j - 1), -nu});
      if (j + 1 <= n - 1) t.push_back({row, vid(i, j + 1), -nu});
      const double ax = h * w1;
      if (ax >= 0.0) {
        diag += ax;
        if (i - 1 >= 0)
          t.push_back({row, vid(i - 1, j), -ax});
        else
          diag += ax;  // ghost: v_W = -v
      } else {
        diag -= ax;
        if (i + 1 <= n - 1)
          t.push_back({row, vid(i + 1, j), ax});
        else
          diag -= ax;  // ghost: v_E = -v
      }
      const double ay = h * w2;
      if (ay >= 0.0) {
        diag += ay;
        if (j - 1 >= 1) t.push_back({row, vid(i, j - 1), -ay});
      } else {
        diag -= ay;
        if (j + 1 <= n - 1) t.push_back({row, vid(i, j + 1), ay});
      }
      t.push_back({row, pid(i, j), h});
      t.push_back({row, pid(i, j - 1), -h});
      t.push_back({row, row, diag});
      b[row] = rhs;
    }
  }

  // continuity rows: transpose of the pressure gradient
  for (index_t j = 0; j < n; ++j) {
    for (index_t i = 0; i < n; ++i) {
      const index_t row = pid(i, j);
      if (i >= 1) t.push_back({row, uid(i, j), h});
      if (i + 1 <= n - 1) t.push_back({row, uid(i + 1, j), -h});
      if (j >= 1) t.push_back({row, vid(i, j), h});
      if (j + 1 <= n - 1) t.push_back({row, vid(i, j + 1), -h});
    }
  }

  // symmetric pressure pin at reference cell 0
  const index_t p0 = pid(0, 0);
  {
    std::vector<Triplet> kept;
    kept.reserve(t.size());
    for (const Triplet& e : t)
      if (e.row != p0 && e.col != p0) kept.push_back(e);
    kept.push_back({p0, p0, 1.0});
    t = std::move(kept);
    b[p0] = 0.0;
  }

  OseenSystem sys;
  sys.n = n;
  sys.viscosity = nu;
  sys.wind_scale = wind_scale;
  sys.body_force = std::move(f);
  sys.K = SplittableMatrix(CsrMatrix::from_triplets(N, N, std::move(t)),
                           make_contiguous_layout({{"v", n_vel}, {"p", n_p}}));
  sys.b = std::move(b);

  // PCD operators on the pressure space, boundary treatment folded in:
  // Ap pinned TPFA Laplacian; Mp cell-area mass; Fp = nu * Laplacian +
  // upwind cell convection, pinned to match. The enclosed wind has zero
  // normal component on the walls, so no inflow adjustment arises.
  {
    std::vector<Triplet> mp;
    for (index_t c = 0; c < n_p; ++c) mp.push_back({c, c, h * h});
    sys.pcd.Mp = CsrMatrix::from_triplets(n_p, n_p, std::move(mp));
    sys.pcd.Ap = tpfa_laplacian(n, /*pin_reference_cell=*/true);

    auto cell = [n](index_t i, index_t j) { return j * n + i; };
    std::vector<Triplet> fp;
    for (index_t j = 0; j < n; ++j) {
      for (index_t i = 0; i < n; ++i) {
        const index_t c = cell(i, j);
        auto upwind_face = [&](index_t nb, double wn_out) {
          const double flux = h * wn_out;  // outflow from c across the face
          if (flux >= 0.0) {
            fp.push_back({c, c, flux});
            fp.push_back({nb, c, -flux});
          } else {
            fp.push_back({c, nb, flux});
            fp.push_back({nb, nb, -flux});
          }
        };
        if (i + 1 < n) {
          const auto w = cavity_wind((static_cast<double>(i) + 1.0) * h,
                                     (static_cast<double>(j) + 0.5) * h);
          upwind_face(cell(i + 1, j), wind_scale * w[0]);
        }
        if (j + 1 < n) {
          const auto w = cavity_wind((static_cast<double>(i) + 0.5) * h,
                                     (static_cast<double>(j) + 1.0) * h);
          upwind_face(cell(i, j + 1), wind_scale * w[1]);
        }
        if (i + 1 < n) {
          fp.push_back({c, c, nu});
          fp.push_back({cell(i + 1, j), cell(i + 1, j), nu});
          fp.push_back({c, cell(i + 1, j), -nu});
          fp.push_back({cell(i + 1, j), c, -nu});
        }
        if (j + 1 < n) {
          fp.push_back({c, c, nu});
          fp.push_back({cell(i, j + 1), cell(i, j + 1), nu});
          fp.push_back({c, cell(i, j + 1), -nu});
          fp.push_back({cell(i, j + 1), c, -nu});
        }
      }
    }
    std::vector<Triplet> kept;
    for (const Triplet& e : fp)
      if (e.row != 0 && e.col != 0) kept.push_back(e);
    kept.push_back({0, 0, 1.0});
    sys.pcd.Fp = CsrMatrix::from_triplets(n_p, n_p, std::move(kept));
  }
  return sys;
}

// ---------------------------------------------------------------------------
// Elementary algebraic demo
// ---------------------------------------------------------------------------

/// Fixed, well-conditioned 9x9 three-field system (field sizes 4, 3, 2) used
/// to demonstrate runtime solver reconfiguration and non-adjacent field
/// grouping. The entries are frozen; data/algebraic_demo/ holds the dumped
/// fixture the tests compare against.
struct AlgebraicDemo {
  SplittableMatrix K;  // fields "f0", "f1", "f2"
  DenseVector b;
};

inline AlgebraicDemo gen_algebraic_demo() {
  const std::vector<Triplet> t = {
      // f0 diagonal block
      {0, 0, 10.0}, {1, 1, 11.0}, {2, 2, 12.0}, {3, 3, 13.0},
      {0, 1, 2.0}, {1, 0, 1.0}, {1, 2, 2.0}, {2, 3, -1.0}, {3, 2, 1.0},
      // f1 diagonal block
      {4, 4, 14.0}, {5, 5, 15.0}, {6, 6, 16.0},
      {4, 5, 2.0}, {5, 6, -1.0}, {6, 4, 1.0},
      // f2 diagonal block
      {7, 7, 9.0}, {8, 8, 8.0}, {7, 8, 2.0}, {8, 7, -1.0},
      // cross-field couplings
      {0, 4, 1.0}, {5, 1, -1.0},   // f0-f1
      {2, 7, 1.0}, {8, 3, 1.0},    // f0-f2
      {4, 8, -1.0}, {7, 5, 1.0},   // f1-f2
  };
  AlgebraicDemo demo;
  demo.K = SplittableMatrix(CsrMatrix::from_triplets(9, 9, t),
                            make_contiguous_layout({{"f0", 4}, {"f1", 3}, {"f2", 2}}));
  demo.b = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0};
  return demo;
}

// ---------------------------------------------------------------------------
// Dump / load
// ---------------------------------------------------------------------------

/// Writes K.mtx, K.layout.json, b.mtx and any auxiliary matrices (<name>.mtx)
/// into dir. Square operators only (one sidecar serves rows and columns).
inline void dump_system(const std::string& dir, const SplittableMatrix& K,
                        const DenseVector& b,
                        const std::vector<std::pair<std::string, const CsrMatrix*>>& aux = {}) {
  require(K.matrix.nrows() == K.matrix.ncols(), "dump_system: operator must be square");
  std::filesystem::create_directories(dir);
  write_matrix_market(dir + "/K.mtx", K.matrix);
  write_layout_json(dir + "/K.layout.json", K.row_layout);
  write_vector_mtx(dir + "/b.mtx", b);
  for (const auto& [name, mat] : aux) write_matrix_market(dir + "/" + name + ".mtx", *mat);
}

struct LoadedSystem {
  SplittableMatrix K;
  DenseVector b;
};

inline LoadedSystem load_system(const std::string& matrix_path,
                                const std::string& layout_path,
                                const std::string& rhs_path) {
  CsrMatrix A = read_matrix_market(matrix_path);
  BlockLayout layout = read_layout_json(layout_path);
  require(A.nrows() == A.ncols(),
          detail::strfmt("%s: operator is %d x %d, not square", matrix_path.c_str(),
                         A.nrows(), A.ncols()));
  require(layout.global_size() == A.nrows(),
          detail::strfmt("%s: layout covers %d dofs but the operator has %d rows",
                         layout_path.c_str(), layout.global_size(), A.nrows()));
  DenseVector b = read_vector(rhs_path);
  require(static_cast<index_t>(b.size()) == A.nrows(),
          detail::strfmt("%s: rhs has %zu entries, operator has %d rows",
                         rhs_path.c_str(), b.size(), A.nrows()));
  LoadedSystem sys;
  sys.K = SplittableMatrix(std::move(A), layout, layout);
  sys.b = std::move(b);
  return sys;
}

}  // namespace pctk
