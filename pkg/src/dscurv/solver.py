"""Damped-Newton homotopy continuation for the prescribed-curvature equation.

The discrete residual at a node is

    Phi(u, t) = f(lam[A(u)]) - psi_t(xi, u, tau(u)),

where f is the normalized symmetric root of order k and psi_t the
convex deformation from the solvable reference prescription (t = 0) to
the target (t = 1).  The t = 0 start is the umbilic slice u = lam with
lam cosh^p(lam) = 1, which solves the equation exactly: the slice has
all principal curvatures tanh(lam) and tilt cosh(lam), so the reference
value is cosh^p(lam) * lam * tanh(lam) = tanh(lam).

The Jacobian is the exact derivative of the *discrete* residual,
assembled by central differencing over the stencil footprint.  Columns
whose footprints do not overlap are perturbed together (greedy graph
coloring), so one assembly costs about two residual evaluations per
color regardless of grid size; the sparse matrix is then factorized
directly.  Each Newton trial step must be spacelike, node-wise
admissible, and reduce the residual sup-norm, otherwise the step is
backtracked; each accepted homotopy step must additionally pass the a
priori bound monitors, otherwise the step size is halved.  Everything
on the solve path is deterministic: same config, grid, and prescription
reproduce bit-identical traces.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (AdmissibilityError, ContinuationError,
                     InternalConsistencyError, NewtonError, SpacelikeError)
from .geometry import induced_geometry_unchecked, _cholesky_factors
from .monitor import check_bounds
from .prescription import HomotopyPrescription, ReferencePrescription, scan_barriers
from .symmetric import (elementary_symmetric_all, normalized_root,
                        normalized_root_gradient)

# Fixed covector directions for the ellipticity diagnostic (deterministic
# stand-ins for random draws; the solve path must not consume RNG state).
_ELLIPTICITY_COVECTORS = ((1.0, 0.0), (0.0, 1.0), (0.8, 0.6),
                          (-0.6, 0.8), (0.36, -0.933))


@dataclass
class SolverConfig:
    """Tolerances and step controls for the continuation solver."""

    k: int = 2
    p: float = 2.0
    tol_newton: float = 1e-10
    max_newton: int = 30
    dt_init: float = 0.1
    dt_min: float = 1e-3
    dt_max: float = 0.5
    backtrack_factor: float = 0.5
    backtrack_min: float = 1e-4
    grow_factor: float = 1.5
    fast_iters: int = 4
    c_tau: float = 50.0
    c_a: float = 50.0
    fd_step: float = 2e-7
    jacobian_check_every: int = 10

    def __post_init__(self):
        if self.tol_newton <= 0.0:
            raise ValueError("tol_newton must be positive")
        if not 0.0 < self.dt_min <= self.dt_init <= self.dt_max <= 1.0:
            raise ValueError("need 0 < dt_min <= dt_init <= dt_max <= 1")
        if self.k < 1:
            raise ValueError("curvature order k must be >= 1")
        if self.p < 1.0:
            raise ValueError("reference power p must be >= 1")


@dataclass
class NewtonResult:
    u: np.ndarray
    iterations: int
    residual_norm: float
    history: list


@dataclass
class StepRecord:
    t: float
    iters: int
    residual: float
    min_u: float
    max_u: float
    max_tau: float
    max_abs_A: float


@dataclass
class HomotopyState:
    """Solution and full trace of a continuation run."""

    u: np.ndarray
    t: float
    residual_norm: float
    newton_iters: int
    monitor: object
    step_history: list = field(default_factory=list)


def initial_constant(p):
    """The unique lam in (0, 1) with lam * cosh^p(lam) = 1, by bisection.

    Existence bracket: x cosh^p(x) vanishes at 0 and exceeds 1 at x = 1;
    the function is strictly increasing, so the root is unique.
    """
    if p < 1.0:
        raise ValueError("reference power p must be >= 1")

    def phi(x):
        return x * np.cosh(x) ** p - 1.0

    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if phi(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    lam = 0.5 * (lo + hi)
    if abs(phi(lam)) > 1e-14:
        raise InternalConsistencyError(
            f"bisection for the start radius stalled at residual {phi(lam):.3e}")
    return lam


def zeroth_coefficient_at_start(p):
    """Zeroth-order coefficient c of the linearization at the t = 0 start.

    Evaluates the closed form at u = initial_constant(p); the start
    identity u cosh^{p-2}(u) = cosh^{-2}(u) makes both surviving terms
    negative, and c < 0 is what makes the start linearization
    invertible.  A non-negative value is a fatal configuration error.
    """
    u = initial_constant(p)
    ch, sh, th = np.cosh(u), np.sinh(u), np.tanh(u)
    c = (ch ** -2.0 - ch ** p * th - u * ch ** (p - 2.0)
         - p * ch ** (p - 1.0) * u * th * sh)
    if c >= 0.0:
        raise InternalConsistencyError(
            f"start linearization coefficient c = {c:.6g} is not negative")
    return float(c)


def _eig_vectors_2x2(M, eigs):
    """Orthonormal eigenvectors for symmetric 2x2 fields, paired with the
    ascending eigenvalues; robust when the off-diagonal entry vanishes."""
    a, b, c = M[..., 0, 0], M[..., 0, 1], M[..., 1, 1]
    hi = eigs[..., 1]
    v0 = np.stack([b, hi - a], axis=-1)
    v1 = np.stack([hi - c, b], axis=-1)
    pick = np.abs(hi - a) >= np.abs(hi - c)
    v = np.where(pick[..., None], v0, v1)
    norm = np.linalg.norm(v, axis=-1)
    degenerate = norm < 1e-300
    v = np.where(degenerate[..., None], np.stack(
        [np.ones_like(a), np.zeros_like(a)], axis=-1), v)
    v /= np.linalg.norm(v, axis=-1)[..., None]
    w_hi = v
    w_lo = np.stack([-v[..., 1], v[..., 0]], axis=-1)
    return w_lo, w_hi


def curvature_derivative_matrix(geom, k):
    """dF/dA_ij per node: the second-order coefficient of the linearized
    operator (up to the positive factor tau/cosh(u)).  Positive definite
    exactly where the eigenvalues sit inside Gamma_k."""
    eigs = geom.shape_eigs
    grad = normalized_root_gradient(eigs, k)
    dim = eigs.shape[-1]
    if dim == 1:
        (l00,) = _cholesky_factors(geom.g, 1)
        return (grad[..., 0] / l00 ** 2)[..., None, None]
    l00, l10, l11 = _cholesky_factors(geom.g, 2)
    w_lo, w_hi = _eig_vectors_2x2(geom.shape_sym, eigs)
    P = (grad[..., 0, None, None] * w_lo[..., :, None] * w_lo[..., None, :]
         + grad[..., 1, None, None] * w_hi[..., :, None] * w_hi[..., None, :])
    i00 = 1.0 / l00
    i10 = -l10 / (l00 * l11)
    i11 = 1.0 / l11
    inv_l = np.zeros_like(P)
    inv_l[..., 0, 0] = i00
    inv_l[..., 1, 0] = i10
    inv_l[..., 1, 1] = i11
    return np.einsum("...ki,...kl,...lj->...ij", inv_l, P, inv_l)


def ellipticity_margin(geom, k):
    """Smallest contraction of dF/dA with the fixed covector set."""
    fij = curvature_derivative_matrix(geom, k)
    dim = fij.shape[-1]
    worst = np.inf
    for zeta in _ELLIPTICITY_COVECTORS[: 1 if dim == 1 else None]:
        z = np.asarray(zeta[:dim])
        q = np.einsum("i,...ij,j->...", z, fij, z)
        worst = min(worst, float(q.min()))
    return worst


class ContinuationSolver:
    """Driver for Newton solves and homotopy continuation on one grid.

    Immutable problem data (grid, target prescription, config) are bound
    at construction; per-call state lives on the stack, so instances can
    be shared by concurrent read-only callers.
    """

    def __init__(self, grid, target, config=None, barriers=None):
        self.grid = grid
        self.config = config or SolverConfig()
        if self.config.k > grid.dim:
            raise ValueError(
                f"curvature order k={self.config.k} needs k <= n={grid.dim}")
        self.target = target
        self.homotopy = HomotopyPrescription(target, self.config.p, 0.0)
        self.barriers = barriers
        self.coords = grid.coords()
        self._coloring = None
        # fail fast if the start linearization is unusable
        self.start_radius = initial_constant(self.config.p)
        self.start_coefficient = zeroth_coefficient_at_start(self.config.p)

    # -- residual -------------------------------------------------------

    def _geometry(self, u):
        u = self.grid.check_field(u)
        if np.any(u <= 0.0):
            raise AdmissibilityError(
                np.flatnonzero((u <= 0.0).ravel()).tolist(),
                "graph value must stay positive")
        return induced_geometry_unchecked(u, self.grid)

    def residual_with_geometry(self, u, t):
        geom = self._geometry(u)
        k = self.config.k
        sig = elementary_symmetric_all(geom.shape_eigs, k)[..., 1:]
        member = np.all(sig > 0.0, axis=-1)
        if not member.all():
            raise AdmissibilityError(np.flatnonzero(~member.ravel()).tolist())
        f = normalized_root(geom.shape_eigs, k)
        ev = self.homotopy.at(t).evaluate(geom.u, self.coords, geom.tau)
        return f - ev.psi, geom

    def residual(self, u, t):
        """Node-wise Phi(u, t); raises SpacelikeError / AdmissibilityError
        with node ids on infeasible input (consumed by the line search)."""
        res, _ = self.residual_with_geometry(u, t)
        return res

    # -- sparse Jacobian --------------------------------------------------

    def _build_coloring(self):
        table = self.grid.stencil_table()
        n = self.grid.node_count
        rows_of = [[] for _ in range(n)]
        for m, cols in enumerate(table):
            for q in cols:
                rows_of[q].append(m)
        colors = np.full(n, -1, dtype=int)
        for q in range(n):
            taken = set()
            for m in rows_of[q]:
                for q2 in table[m]:
                    if colors[q2] >= 0:
                        taken.add(colors[q2])
            color = 0
            while color in taken:
                color += 1
            colors[q] = color
        groups = []
        for color in range(colors.max() + 1):
            cols = np.flatnonzero(colors == color)
            rows_cat = np.concatenate([rows_of[q] for q in cols])
            counts = np.array([len(rows_of[q]) for q in cols])
            col_rep = np.repeat(cols, counts)
            groups.append((cols, rows_cat, col_rep, counts))
        self._coloring = groups
        self._fd_scale = self._column_fd_scales(rows_of)
        return groups

    def _column_fd_scales(self, rows_of):
        """Per-column multiplier for the FD step.

        Rows near the poles carry stencil weights ~ sigma^{theta,theta} /
        dtheta^2, far above the interior scale; the optimal central-
        difference step for a column shrinks like that weight to the
        power -2/3 (truncation grows with the weight cubed, roundoff
        with the weight).  Everything here is deterministic grid data.
        """
        grid = self.grid
        if grid.dim == 1:
            return np.ones(grid.node_count)
        w_node = (1.0 / grid.dphi ** 2
                  + grid.sigma_inv[..., 1, 1] / grid.dtheta ** 2).ravel()
        w_base = 1.0 / grid.dphi ** 2 + 1.0 / grid.dtheta ** 2
        omega = np.ones(grid.node_count)
        for q, rows in enumerate(rows_of):
            omega[q] = max(1.0, max(w_node[m] for m in rows) / w_base)
        return omega ** (-2.0 / 3.0)

    def jacobian(self, u, t):
        """Exact Jacobian of the discrete residual at (u, t), column-wise
        central differences grouped by stencil coloring; returns CSR.

        Also runs the ellipticity diagnostic: the second-order
        coefficient block must contract positively with covectors at
        every admissible node, otherwise the geometry pipeline is
        broken and an InternalConsistencyError is raised.
        """
        u = self.grid.check_field(u)
        geom = self._geometry(u)
        margin = ellipticity_margin(geom, self.config.k)
        if margin <= 0.0:
            raise InternalConsistencyError(
                f"non-elliptic second-order block (margin {margin:.3e}) "
                "at an admissible node")
        groups = self._coloring or self._build_coloring()
        n = self.grid.node_count
        base = u.ravel()
        eps_all = self.config.fd_step * (1.0 + np.abs(base)) * self._fd_scale
        rows_idx, cols_idx, data = [], [], []
        for cols, rows_cat, col_rep, counts in groups:
            step = np.zeros(n)
            step[cols] = eps_all[cols]
            r_plus = self.residual((base + step).reshape(self.grid.shape), t).ravel()
            r_minus = self.residual((base - step).reshape(self.grid.shape), t).ravel()
            diff = r_plus - r_minus
            eps_rep = np.repeat(eps_all[cols], counts)
            rows_idx.append(rows_cat)
            cols_idx.append(col_rep)
            data.append(diff[rows_cat] / (2.0 * eps_rep))
        matrix = sp.coo_matrix(
            (np.concatenate(data),
             (np.concatenate(rows_idx), np.concatenate(cols_idx))),
            shape=(n, n))
        return matrix.tocsr()

    def directional_derivative_check(self, u, t, v=None, eps=1e-6, tol=1e-5):
        """Compare the assembled Jacobian against a directional difference
        of the residual along a fixed smooth field.

        The error is measured row-relative (against sum_q |J_mq v_q|
        per row, floored by the global scale): rows touching the pole
        rings legitimately carry stencil weights hundreds of times the
        interior scale, and a single global normalization would only
        measure those rows.  Returns the worst relative error; raises
        InternalConsistencyError beyond tol.
        """
        u = self.grid.check_field(u)
        if v is None:
            v = 1.0 + 0.5 * np.cos(self.coords[0]) * np.ones(self.grid.shape)
        jac = self.jacobian(u, t)
        vflat = v.ravel()
        jv = jac.dot(vflat)
        fd = (self.residual(u + eps * v, t) - self.residual(u - eps * v, t)).ravel()
        fd /= 2.0 * eps
        row_scale = np.abs(jac).dot(np.abs(vflat))
        row_scale = np.maximum(row_scale, max(np.max(np.abs(jv)), 1e-30))
        err = float(np.max(np.abs(jv - fd) / row_scale))
        if err > tol:
            raise InternalConsistencyError(
                f"Jacobian directional check failed: relative error {err:.3e}")
        return err

    # -- Newton ----------------------------------------------------------

    def newton_solve(self, u0, t):
        """Damped Newton with backtracking from u0 at fixed t.

        A trial step is accepted only if it is spacelike, node-wise
        admissible, and reduces the residual sup-norm.  Raises
        NewtonError (carrying the best iterate) when the iteration cap
        or the minimal damping is hit.
        """
        cfg = self.config
        u = self.grid.check_field(u0).copy()
        try:
            res = self.residual(u, t)
        except (SpacelikeError, AdmissibilityError) as exc:
            raise NewtonError(f"initial iterate infeasible: {exc}") from exc
        rnorm = float(np.max(np.abs(res)))
        history = [rnorm]
        for iteration in range(1, cfg.max_newton + 1):
            if rnorm <= cfg.tol_newton:
                return NewtonResult(u, iteration - 1, rnorm, history)
            jac = self.jacobian(u, t)
            delta = spla.splu(jac.tocsc()).solve(-res.ravel())
            delta = delta.reshape(self.grid.shape)
            alpha = 1.0
            while True:
                trial = u + alpha * delta
                try:
                    trial_res = self.residual(trial, t)
                    trial_norm = float(np.max(np.abs(trial_res)))
                except (SpacelikeError, AdmissibilityError):
                    trial_norm = None
                if trial_norm is not None and trial_norm < rnorm:
                    break
                alpha *= cfg.backtrack_factor
                if alpha < cfg.backtrack_min:
                    raise NewtonError("line search stalled below minimal step",
                                      best_u=u, residual_norm=rnorm,
                                      iterations=iteration - 1)
            u, res, rnorm = trial, trial_res, trial_norm
            history.append(rnorm)
        if rnorm <= cfg.tol_newton:
            return NewtonResult(u, cfg.max_newton, rnorm, history)
        raise NewtonError(f"no convergence in {cfg.max_newton} iterations",
                          best_u=u, residual_norm=rnorm,
                          iterations=cfg.max_newton)

    # -- homotopy ---------------------------------------------------------

    def _monitor(self, u, geom=None):
        if geom is None:
            geom = self._geometry(u)
        return check_bounds(geom, u, self.barriers, self.config.c_tau,
                            self.config.c_a, self.config.k)

    def run(self, t_final=1.0, u0=None):
        """Follow the homotopy from the exact start at t = 0 to t_final.

        Steps adapt: halve on Newton or monitor failure (down to dt_min,
        then ContinuationError carrying the trace), grow on fast
        convergence up to dt_max.  Every accepted state satisfies the
        residual tolerance and all bound monitors.
        """
        cfg = self.config
        if self.barriers is None:
            raise ValueError("barriers must be set before running the homotopy")
        if u0 is None:
            u0 = np.full(self.grid.shape, self.start_radius)
        history = []
        accepted = 0

        def accept(u, t, result):
            nonlocal accepted
            res, geom = self.residual_with_geometry(u, t)
            monitor = self._monitor(u, geom)
            record = StepRecord(
                t=t, iters=result.iterations,
                residual=result.residual_norm,
                min_u=float(u.min()), max_u=float(u.max()),
                max_tau=float(geom.tau.max()), max_abs_A=float(geom.abs_A.max()))
            accepted += 1
            if cfg.jacobian_check_every > 0 and (
                    accepted == 1 or accepted % cfg.jacobian_check_every == 0):
                self.directional_derivative_check(u, t)
            return monitor, record

        result = self.newton_solve(u0, 0.0)
        monitor, record = accept(result.u, 0.0, result)
        if not monitor.all_ok:
            raise ContinuationError(
                "bound monitors failed at the homotopy start",
                state=HomotopyState(result.u, 0.0, result.residual_norm,
                                    result.iterations, monitor, [record]))
        history.append(record)
        u, t = result.u, 0.0
        last = result

        dt = cfg.dt_init
        while t < t_final - 1e-14:
            t_next = min(t + dt, t_final)
            try:
                trial = self.newton_solve(u, t_next)
                trial_monitor, record = accept(trial.u, t_next, trial)
                failed = not trial_monitor.all_ok
            except NewtonError:
                failed = True
            if failed:
                dt *= 0.5
                if dt < cfg.dt_min:
                    raise ContinuationError(
                        f"stalled at t = {t:.6f}: step size fell below "
                        f"dt_min = {cfg.dt_min}",
                        state=HomotopyState(u, t, last.residual_norm,
                                            last.iterations, monitor, history))
                continue
            u, t, last, monitor = trial.u, t_next, trial, trial_monitor
            history.append(record)
            if trial.iterations <= cfg.fast_iters:
                dt = min(dt * cfg.grow_factor, cfg.dt_max)
        return HomotopyState(u, t, last.residual_norm, last.iterations,
                             monitor, history)


def combined_barriers(target, p, r_range, resolution=400, dim=2, n_xi=24):
    """Barrier radii valid along the whole deformation: the scan of the
    target and of the reference prescription, combined by min/max."""
    scan_t = scan_barriers(target, r_range, resolution, dim, n_xi)
    scan_r = scan_barriers(ReferencePrescription(p), r_range, resolution, dim, n_xi)
    if not (scan_t.found and scan_r.found):
        return None, (scan_t, scan_r)
    return (min(scan_t.R1, scan_r.R1), max(scan_t.R2, scan_r.R2)), (scan_t, scan_r)


def run_homotopy(target, grid, config=None, barriers=None, t_final=1.0,
                 r_range=(0.05, 2.5)):
    """One-call continuation: scan barriers (if not given), then follow
    the homotopy to t_final.  The caller is responsible for auditing the
    target's structural conditions beforehand."""
    config = config or SolverConfig()
    if barriers is None:
        barriers, _ = combined_barriers(target, config.p, r_range, dim=grid.dim)
        if barriers is None:
            raise ValueError("no barrier radii found on the scan range; "
                             "run scan_barriers for the sign pattern")
    solver = ContinuationSolver(grid, target, config, barriers=barriers)
    return solver.run(t_final=t_final)
