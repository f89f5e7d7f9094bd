#include "vgp/vgp_search.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <fmt/format.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multifit_nlinear.h>
#include <gsl/gsl_multimin.h>

#include "vgp/diagnostics.hpp"
#include "vgp/errors.hpp"
#include "vgp/pmr.hpp"
#include "vgp/vgp_check.hpp"

namespace vgp {

UnitCellParams UnitCellParams::uniform(double h0, double h1, double h2, bool diagonal) {
  UnitCellParams p;
  p.bonds.assign(diagonal ? 5 : 4, CellBond{h0, h1, h2});
  return p;
}

std::vector<double> UnitCellParams::to_vector() const {
  std::vector<double> v;
  for (const auto& b : bonds) v.insert(v.end(), {b.h0, b.h1, b.h2});
  return v;
}

UnitCellParams UnitCellParams::from_vector(const std::vector<double>& v) {
  if (v.size() != 12 && v.size() != 15)
    throw ValidationError(fmt::format("unit cell needs 12 or 15 parameters, got {}", v.size()));
  UnitCellParams p;
  p.bonds.resize(v.size() / 3);
  for (std::size_t b = 0; b < p.bonds.size(); ++b) p.bonds[b] = {v[3 * b], v[3 * b + 1], v[3 * b + 2]};
  return p;
}

namespace {

// D R_Z-twisted: D (cos a_i - i sin a_i Z_i)(cos a_j - i sin a_j Z_j), as coefficients of
// {1, Z_i, Z_j, Z_iZ_j}.
void add_bond(OperatorBuilder& ops, int i, int j, const CellBond& b, double ai, double aj) {
  const cplx I(0.0, 1.0);
  const std::array<cplx, 4> d = {b.h0, I * b.h1, I * b.h1, b.h2};
  const double ci = std::cos(ai), si = std::sin(ai), cj = std::cos(aj), sj = std::sin(aj);
  const std::array<cplx, 4> r = {ci * cj, -I * si * cj, -I * ci * sj, -si * sj};
  std::array<cplx, 4> out{};
  for (int a = 0; a < 4; ++a)
    for (int c = 0; c < 4; ++c) out[a ^ c] += d[a] * r[c];
  const Mask bi = Mask{1} << i, bj = Mask{1} << j;
  for (int k = 0; k < 4; ++k) {
    const Mask z = ((k & 1) ? bi : 0) | ((k & 2) ? bj : 0);
    ops.add_zx(out[k], z, bi | bj);
  }
}

}  // namespace

PauliSum tile_periodic(const UnitCellParams& params, int nx, int ny) {
  if (nx < 1 || ny < 1) throw ValidationError("tile_periodic: tiling counts must be positive");
  if (params.bonds.size() != 4 && params.bonds.size() != 5)
    throw ValidationError("tile_periodic: unit cell needs 4 or 5 bonds");
  const int w = 2 * nx, h = 2 * ny;
  if (w * h > 32) throw GuardError("spin_count", fmt::format("tiling has {} spins, above 32", w * h));
  auto site = [w](int x, int y) { return x + w * y; };
  auto angle = [&](int x, int y) { return params.rz_angles[(x % 2) + 2 * (y % 2)]; };
  OperatorBuilder ops(w * h);
  auto bond = [&](int x0, int y0, int x1, int y1, const CellBond& b) {
    add_bond(ops, site(x0, y0), site(x1, y1), b, angle(x0, y0), angle(x1, y1));
  };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (x + 1 < w || w >= 3) bond(x, y, (x + 1) % w, y, params.bonds[y % 2]);
      if (y + 1 < h || h >= 3) bond(x, y, x, (y + 1) % h, params.bonds[2 + x % 2]);
    }
  if (params.has_diagonal())
    for (int cy = 0; cy < ny; ++cy)
      for (int cx = 0; cx < nx; ++cx) bond(2 * cx, 2 * cy, 2 * cx + 1, 2 * cy + 1, params.bonds[4]);
  return ops.build(1e-12);
}

double unit_cell_f_eta(const UnitCellParams& params) {
  return f_eta(to_dense(tile_periodic(params, 1, 1)), 1.0).relative;
}

std::pair<double, double> bond_norm_range(const UnitCellParams& params) {
  double lo = INFINITY, hi = 0.0;
  for (const auto& b : params.bonds) {
    const double n = std::sqrt(b.h0 * b.h0 + 2.0 * b.h1 * b.h1 + b.h2 * b.h2);
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }
  return {lo, hi};
}

bool is_degenerate(const UnitCellParams& params) {
  const auto [lo, hi] = bond_norm_range(params);
  return hi < 1e-6 || lo < 1e-3 * hi;
}

namespace {

struct NmContext {
  std::size_t n = 0;
};

double nm_objective(const gsl_vector* x, void* ctx) {
  const auto* c = static_cast<const NmContext*>(ctx);
  std::vector<double> v(c->n);
  for (std::size_t i = 0; i < c->n; ++i) v[i] = gsl_vector_get(x, i);
  const double f = unit_cell_f_eta(UnitCellParams::from_vector(v));
  return std::isfinite(f) ? std::max(f, 0.0) : 1e300;
}

std::pair<std::vector<double>, double> nelder_mead(std::vector<double> x0, double step, int max_iters,
                                                   double target) {
  NmContext ctx{x0.size()};
  gsl_multimin_function fn{&nm_objective, x0.size(), &ctx};
  gsl_vector* x = gsl_vector_alloc(x0.size());
  gsl_vector* ss = gsl_vector_alloc(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) gsl_vector_set(x, i, x0[i]);
  gsl_vector_set_all(ss, step);
  gsl_multimin_fminimizer* s =
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, x0.size());
  gsl_multimin_fminimizer_set(s, &fn, x, ss);
  for (int it = 0; it < max_iters; ++it) {
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    if (s->fval < target) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-13) == GSL_SUCCESS) break;
  }
  std::vector<double> best(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) best[i] = gsl_vector_get(s->x, i);
  const double fbest = s->fval;
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(ss);
  gsl_vector_free(x);
  return {best, fbest};
}

// Residual per closed walk of the cell graph: sqrt(2|W|) sin(theta/2), whose square is
// the walk's term in f_vgp. Walks are stored by X-mask so they survive vanishing bonds.
struct PhaseFit {
  std::size_t n_params = 0;
  std::vector<std::pair<State, std::vector<Mask>>> walks;
};

int phase_residuals(const gsl_vector* x, void* ctx, gsl_vector* f) {
  const auto* pf = static_cast<const PhaseFit*>(ctx);
  std::vector<double> v(pf->n_params);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = gsl_vector_get(x, i);
  const PMRForm p = pmr_decompose(tile_periodic(UnitCellParams::from_vector(v), 1, 1));
  std::map<Mask, int> index;
  for (int j = 0; j < static_cast<int>(p.offdiag.size()); ++j) index[p.offdiag[j].x_mask] = j;
  gsl_vector_set_zero(f);
  for (std::size_t c = 0; c < pf->walks.size(); ++c) {
    State z = pf->walks[c].first;
    cplx w = 1.0;
    for (Mask m : pf->walks[c].second) {
      const auto it = index.find(m);
      if (it == index.end()) {
        w = 0.0;
        break;
      }
      const Edge e = edge_weight(p, it->second, z);
      w *= e.weight;
      z = e.to;
    }
    if (w == cplx(0.0, 0.0)) continue;
    const double theta = std::arg(pf->walks[c].second.size() % 2 ? -w : w);
    gsl_vector_set(f, c, std::sqrt(2.0 * std::abs(w)) * std::sin(theta / 2.0));
  }
  return GSL_SUCCESS;
}

std::vector<double> polish_phases(const std::vector<double>& x0) {
  PhaseFit pf;
  pf.n_params = x0.size();
  const PMRForm p = pmr_decompose(tile_periodic(UnitCellParams::from_vector(x0), 1, 1));
  for (const auto& c : all_cycles(p, 16)) {
    if (c.q() < 3) continue;
    std::vector<Mask> masks;
    for (int j : c.indices) masks.push_back(p.offdiag[j].x_mask);
    pf.walks.push_back({c.start, std::move(masks)});
  }
  if (pf.walks.empty()) return x0;
  const std::size_t n = std::max(pf.walks.size(), x0.size());
  gsl_multifit_nlinear_fdf fdf{};
  fdf.f = &phase_residuals;
  fdf.df = nullptr;
  fdf.fvv = nullptr;
  fdf.n = n;
  fdf.p = x0.size();
  fdf.params = &pf;
  gsl_multifit_nlinear_parameters params = gsl_multifit_nlinear_default_parameters();
  gsl_multifit_nlinear_workspace* w =
      gsl_multifit_nlinear_alloc(gsl_multifit_nlinear_trust, &params, n, x0.size());
  gsl_vector* x = gsl_vector_alloc(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) gsl_vector_set(x, i, x0[i]);
  std::vector<double> out = x0;
  if (gsl_multifit_nlinear_init(x, &fdf, w) == GSL_SUCCESS) {
    int info = 0;
    gsl_multifit_nlinear_driver(200, 1e-15, 1e-15, 0.0, nullptr, nullptr, &info, w);
    const gsl_vector* sol = gsl_multifit_nlinear_position(w);
    for (std::size_t i = 0; i < x0.size(); ++i) out[i] = gsl_vector_get(sol, i);
  }
  gsl_vector_free(x);
  gsl_multifit_nlinear_free(w);
  return out;
}

}  // namespace

OptimizeResult optimize_unit_cell(const UnitCellParams& init, const OptimizeOptions& opts, Rng& rng) {
  gsl_set_error_handler_off();
  OptimizeResult best;
  best.params = init;
  best.f_eta = unit_cell_f_eta(init);
  best.degenerate = is_degenerate(init);
  best.converged = best.f_eta < opts.tol && !best.degenerate;
  if (best.converged) return best;
  bool have_nondegenerate = !best.degenerate;

  std::vector<double> start = init.to_vector();
  for (int r = 0; r <= opts.max_restarts; ++r) {
    if (r > 0)
      for (double& v : start) v = rng.normal();
    auto [x, f] = nelder_mead(start, 0.5, opts.max_iters, opts.tol * 1e-3);
    for (int again = 0; again < 2 && f >= opts.tol * 1e-3; ++again)
      std::tie(x, f) = nelder_mead(x, 0.05, opts.max_iters, opts.tol * 1e-3);
    if (opts.polish) {
      const auto y = polish_phases(x);
      const double fy = unit_cell_f_eta(UnitCellParams::from_vector(y));
      if (fy <= f) {
        x = y;
        f = fy;
      }
    }
    UnitCellParams cand = UnitCellParams::from_vector(x);
    const bool degenerate = is_degenerate(cand);
    const bool better = (!degenerate && (!have_nondegenerate || f < best.f_eta)) ||
                        (degenerate && !have_nondegenerate && f < best.f_eta);
    if (better) {
      best.params = cand;
      best.f_eta = f;
      best.degenerate = degenerate;
      have_nondegenerate = have_nondegenerate || !degenerate;
    }
    best.restarts = r;
    if (!degenerate && f < opts.tol) break;
  }
  best.params.rz_angles = init.rz_angles;
  best.converged = best.f_eta < opts.tol && !best.degenerate;
  return best;
}

UnitCellParams apply_rz_rotation(const UnitCellParams& params, Rng& rng) {
  UnitCellParams out = params;
  for (double& a : out.rz_angles) a = 2.0 * std::numbers::pi * rng.uniform();
  return out;
}

InstanceResult evaluate_cell(const UnitCellParams& rotated, const ConjectureOptions& opts) {
  InstanceResult r;
  r.unit_f_eta = unit_cell_f_eta(rotated);
  r.unit_pass = r.unit_f_eta < opts.tol && !is_degenerate(rotated);
  bool all = true;
  for (const auto& t : opts.tilings) {
    const PauliSum h = tile_periodic(rotated, t.nx, t.ny);
    if (h.n_spins() <= opts.dense_cap) {
      const double f = f_eta(to_dense(h, opts.dense_cap), 1.0).relative;
      r.tiled_f_eta.push_back(f);
      r.tiled_violation.push_back(-1.0);
      all = all && f < opts.tol;
    } else {
      const auto v = check_gauge_consistency(pmr_decompose(h), opts.gauge_tol);
      r.tiled_f_eta.push_back(-1.0);
      r.tiled_violation.push_back(v.max_violation);
      all = all && v.vgp;
    }
  }
  r.tiled_pass = r.unit_pass && all;
  return r;
}

ConjectureReport verify_conjecture(const ConjectureOptions& opts, std::uint64_t seed) {
  ConjectureReport rep;
  rep.tol = opts.tol;
  for (int a = 0; a < opts.max_attempts && rep.instances < opts.instances; ++a) {
    const std::uint64_t s = mix_seed(seed + static_cast<std::uint64_t>(a));
    Rng rng(s);
    ++rep.attempts;
    std::vector<double> x0(12);
    for (double& v : x0) v = rng.normal();
    const auto opt = optimize_unit_cell(UnitCellParams::from_vector(x0), opts.optimize, rng);
    if (!opt.converged) continue;
    ++rep.instances;
    rep.seeds.push_back(s);
    InstanceResult r = evaluate_cell(apply_rz_rotation(opt.params, rng), opts);
    r.seed = s;
    r.unit_pass = r.unit_pass && opt.f_eta < opts.tol;
    r.tiled_pass = r.tiled_pass && r.unit_pass;
    rep.unit_pass += r.unit_pass;
    rep.tiled_pass += r.tiled_pass;
    for (double f : r.tiled_f_eta) rep.max_tiled_f_eta = std::max(rep.max_tiled_f_eta, f);
    for (double g : r.tiled_violation) rep.max_gauge_violation = std::max(rep.max_gauge_violation, g);
    rep.results.push_back(std::move(r));
  }
  return rep;
}

nlohmann::json to_json(const ConjectureReport& r) {
  return {{"attempts", r.attempts},
          {"instances", r.instances},
          {"unit_pass", r.unit_pass},
          {"tiled_pass", r.tiled_pass},
          {"max_tiled_f_eta", r.max_tiled_f_eta},
          {"max_gauge_violation", r.max_gauge_violation},
          {"tol", r.tol},
          {"seeds", r.seeds}};
}

}  // namespace vgp
