"""Self-contained log-barrier interior-point solver.

All block subproblems reduce to one canonical concave maximization:

    maximize    c'x + sum_t w_t * log(a_t'x + b_t) + const        (w_t > 0)
    subject to  A x + b <= 0                                       (affine)
                ||Sx_r x - tx_r||^2-ish quadratic rows <= 0        (quad)
                e_r'x + f_r - w_r * log(g_r'x + h_r) <= 0          (log row)

where each quadratic row is (sx'x - tx)^2 + (sy'x - ty)^2 + a'x + b <= 0
(two squared linear forms cover range cones and speed limits).  The solver
follows the standard path: damped Newton centering of

    phi_t(x) = -t * objective(x) - sum_r log(-g_r(x))

with backtracking line search, geometric increase of t, and termination when
the duality-gap bound m/t drops below ``solver_tol``.  A phase-I lift
(minimize the max constraint value) recovers a strictly feasible start when
the caller's warm start sits on a constraint boundary.

Everything is deterministic: no randomness, ordered sparse assembly, SuperLU
factorization.

Canonical text dump grammar (one item per line, 9 significant digits)::

    SUBPROBLEM <name> VARS <n>
    VAR <index> <name>
    OBJ CONST <c>
    OBJ LIN <index> <coef>
    OBJ LOG <weight> : <coef>*x<index> ... + <const>
    AFF <name> : <coef>*x<index> ... + <const> <= 0
    QUAD <name> : sq(<coef>*x<index> ... - <t>) + sq(...) + <lin> + <const> <= 0
    LOG <name> : <lin> + <const> - <weight>*log(<lin> + <const>) <= 0
    START <index> <value>
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

__all__ = [
    "AffineRows",
    "QuadRows",
    "LogRows",
    "Objective",
    "ConvexSubproblem",
    "SolveResult",
    "solve",
    "dump",
]


@dataclass
class AffineRows:
    """Rows a'x + b <= 0."""

    A: sp.csr_matrix
    b: np.ndarray
    label: str = "aff"

    @property
    def m(self) -> int:
        return self.b.size

    def value(self, x):
        return self.A @ x + self.b

    def with_slack_column(self):
        col = sp.csr_matrix(-np.ones((self.m, 1)))
        return replace(self, A=sp.hstack([self.A, col], format="csr"))


@dataclass
class QuadRows:
    """Rows (sx'x - tx)^2 + (sy'x - ty)^2 + a'x + b <= 0."""

    Sx: sp.csr_matrix
    tx: np.ndarray
    Sy: sp.csr_matrix
    ty: np.ndarray
    A: sp.csr_matrix
    b: np.ndarray
    label: str = "quad"

    @property
    def m(self) -> int:
        return self.b.size

    def value(self, x):
        rx = self.Sx @ x - self.tx
        ry = self.Sy @ x - self.ty
        return rx * rx + ry * ry + self.A @ x + self.b

    def with_slack_column(self):
        zero = sp.csr_matrix((self.m, 1))
        col = sp.csr_matrix(-np.ones((self.m, 1)))
        return replace(self,
                       Sx=sp.hstack([self.Sx, zero], format="csr"),
                       Sy=sp.hstack([self.Sy, zero], format="csr"),
                       A=sp.hstack([self.A, col], format="csr"))


@dataclass
class LogRows:
    """Rows a'x + b - w * log(c'x + d) <= 0 with w > 0."""

    A: sp.csr_matrix
    b: np.ndarray
    w: np.ndarray
    Cm: sp.csr_matrix
    d: np.ndarray
    label: str = "log"

    @property
    def m(self) -> int:
        return self.b.size

    def arg(self, x):
        return self.Cm @ x + self.d

    def value(self, x):
        return self.A @ x + self.b - self.w * np.log(self.arg(x))

    def with_slack_column(self):
        zero = sp.csr_matrix((self.m, 1))
        col = sp.csr_matrix(-np.ones((self.m, 1)))
        return replace(self,
                       A=sp.hstack([self.A, col], format="csr"),
                       Cm=sp.hstack([self.Cm, zero], format="csr"))


@dataclass
class Objective:
    """c'x + sum_t w_t log(Alog_t' x + blog_t) + const."""

    c: np.ndarray
    w: np.ndarray = field(default_factory=lambda: np.zeros(0))
    Alog: sp.csr_matrix | None = None
    blog: np.ndarray = field(default_factory=lambda: np.zeros(0))
    const: float = 0.0

    def value(self, x) -> float:
        out = float(self.c @ x) + self.const
        if self.w.size:
            out += float(self.w @ np.log(self.Alog @ x + self.blog))
        return out


@dataclass
class ConvexSubproblem:
    """One canonical concave program plus a warm start and variable names."""

    n: int
    objective: Objective
    affine: AffineRows | None
    quad: QuadRows | None
    logrows: LogRows | None
    x0: np.ndarray
    var_names: dict[str, np.ndarray] = field(default_factory=dict)
    name: str = "subproblem"

    def groups(self):
        return [g for g in (self.affine, self.quad, self.logrows)
                if g is not None and g.m]

    @property
    def m(self) -> int:
        return sum(g.m for g in self.groups())


@dataclass
class SolveResult:
    x: np.ndarray
    objective_value: float
    status: str              # "optimal" | "max_iter" | "infeasible"
    kkt_residual: float      # duality-gap bound at termination
    newton_iters: int
    message: str = ""


# -- barrier internals --------------------------------------------------------

def _feasible(prob: ConvexSubproblem, x: np.ndarray, margin: float = 0.0) -> bool:
    for g in prob.groups():
        if isinstance(g, LogRows) and np.min(g.arg(x), initial=np.inf) <= 0:
            return False
        if np.max(g.value(x), initial=-np.inf) >= -margin:
            return False
    obj = prob.objective
    if obj.w.size and np.min(obj.Alog @ x + obj.blog) <= 0:
        return False
    return True


def _phi(prob: ConvexSubproblem, x: np.ndarray, t: float) -> float:
    val = -t * prob.objective.value(x)
    for g in prob.groups():
        val -= float(np.log(-g.value(x)).sum())
    return val


def _grad_hess(prob: ConvexSubproblem, x: np.ndarray, t: float):
    n = prob.n
    grad = -t * prob.objective.c.copy()
    blocks = []
    obj = prob.objective
    if obj.w.size:
        r = obj.Alog @ x + obj.blog
        grad -= t * (obj.Alog.T @ (obj.w / r))
        blocks.append(obj.Alog.T @ sp.diags(t * obj.w / r ** 2) @ obj.Alog)
    for g in prob.groups():
        s = -g.value(x)
        if isinstance(g, AffineRows):
            G = g.A
            blocks.append(G.T @ sp.diags(1.0 / s ** 2) @ G)
        elif isinstance(g, QuadRows):
            rx = g.Sx @ x - g.tx
            ry = g.Sy @ x - g.ty
            G = (sp.diags(2.0 * rx) @ g.Sx + sp.diags(2.0 * ry) @ g.Sy
                 + g.A).tocsr()
            blocks.append(G.T @ sp.diags(1.0 / s ** 2) @ G)
            blocks.append(g.Sx.T @ sp.diags(2.0 / s) @ g.Sx)
            blocks.append(g.Sy.T @ sp.diags(2.0 / s) @ g.Sy)
        else:
            arg = g.arg(x)
            G = (g.A - sp.diags(g.w / arg) @ g.Cm).tocsr()
            blocks.append(G.T @ sp.diags(1.0 / s ** 2) @ G)
            blocks.append(g.Cm.T @ sp.diags(g.w / (s * arg ** 2)) @ g.Cm)
        grad += G.T @ (1.0 / s)
    H = blocks[0]
    for b in blocks[1:]:
        H = H + b
    return grad, H.tocsc()


def _newton(prob: ConvexSubproblem, x: np.ndarray, t: float,
            tol_lambda2: float, max_steps: int, stop_hook=None):
    """Center phi_t from x; returns (x, steps_used, hit_hook)."""
    for step in range(max_steps):
        if stop_hook is not None and stop_hook(x):
            return x, step, True
        grad, H = _grad_hess(prob, x, t)
        # Jacobi equilibration: barrier curvatures span many decades late in
        # the path, and unscaled pivots can degenerate the factorization.
        dh = np.abs(H.diagonal())
        scale = np.where(dh > 0.0, 1.0 / np.sqrt(np.maximum(dh, 1e-300)), 1.0)
        S = sp.diags(scale, format="csc")
        Hs = (S @ H @ S).tocsc()
        gs = scale * grad

        def _solve_scaled(ridge):
            A = Hs if ridge == 0.0 else \
                (Hs + ridge * sp.identity(prob.n, format="csc")).tocsc()
            return scale * splu(A).solve(-gs)

        try:
            d = _solve_scaled(0.0)
        except RuntimeError:
            d = _solve_scaled(1e-12)
        lam2 = float(-grad @ d)
        if not np.isfinite(lam2) or lam2 < 0:
            # numerical breakdown of the factorization; retreat with ridge
            d = _solve_scaled(1e-8)
            lam2 = float(-grad @ d)
            if not np.isfinite(lam2) or lam2 < 0:
                return x, step, False
        if lam2 / 2.0 <= tol_lambda2:
            return x, step, False
        phi0 = _phi(prob, x, t)
        alpha, slope = 1.0, float(grad @ d)
        for _ in range(60):
            cand = x + alpha * d
            if _feasible(prob, cand) and \
                    _phi(prob, cand, t) <= phi0 + 0.25 * alpha * slope:
                x = cand
                break
            alpha *= 0.5
        else:
            return x, step + 1, False   # line search stalled: accept center
    return x, max_steps, False


def _barrier(prob: ConvexSubproblem, x: np.ndarray, solver_tol: float,
             max_iter: int, stop_hook=None):
    m = prob.m
    t = max(1.0, m / max(1.0, abs(prob.objective.value(x))))
    mu = 20.0
    used = 0
    while True:
        tol_l2 = min(1e-2, 1e-9 * (1.0 + t))
        x, steps, hit = _newton(prob, x, t, tol_l2, max_iter - used, stop_hook)
        used += steps
        if hit:
            return x, used, 0.0, "optimal"
        gap = m / t
        if gap <= solver_tol:
            return x, used, gap, "optimal"
        if used >= max_iter:
            return x, used, gap, "max_iter"
        t *= mu


def _phase1(prob: ConvexSubproblem, solver_tol: float, max_iter: int):
    """Find a strictly feasible point, or report infeasibility."""
    worst = max(float(g.value(prob.x0).max()) for g in prob.groups())
    s0 = worst + 1.0
    lift_groups = {}
    for attr in ("affine", "quad", "logrows"):
        g = getattr(prob, attr)
        lift_groups[attr] = g.with_slack_column() if g is not None and g.m else None
    # keep s bounded below so the lifted objective stays coercive
    floor = sp.csr_matrix(([-1.0], ([0], [prob.n])), shape=(1, prob.n + 1))
    fl_row = AffineRows(A=floor, b=np.array([-2.0 * abs(s0) - 1.0]), label="s_floor")
    if lift_groups["affine"] is None:
        lift_groups["affine"] = fl_row
    else:
        a = lift_groups["affine"]
        lift_groups["affine"] = AffineRows(
            A=sp.vstack([a.A, floor], format="csr"),
            b=np.concatenate([a.b, fl_row.b]), label=a.label)
    c = np.zeros(prob.n + 1)
    c[-1] = -1.0
    lifted = ConvexSubproblem(
        n=prob.n + 1,
        objective=Objective(c=c),
        affine=lift_groups["affine"],
        quad=lift_groups["quad"],
        logrows=lift_groups["logrows"],
        x0=np.concatenate([prob.x0, [s0]]),
        name=prob.name + "/phase1",
    )
    margin = 1e-9 * (1.0 + abs(s0))
    x, used, _, status = _barrier(lifted, lifted.x0, solver_tol, max_iter,
                                  stop_hook=lambda z: z[-1] < -margin)
    if x[-1] < -margin / 2 and _feasible(prob, x[:-1]):
        return x[:-1], used, "ok"
    return None, used, "infeasible"


def solve(prob: ConvexSubproblem, solver_tol: float = 1e-6,
          max_iter: int = 200) -> SolveResult:
    """Maximize the canonical program; every returned iterate is strictly
    feasible for the subproblem's own constraints.

    ``max_iter`` caps total Newton steps across phase-I and all centering
    stages.  ``kkt_residual`` is the final duality-gap bound m/t.
    """
    if prob.m == 0:
        raise ValueError("subproblem has no constraints")
    x0 = np.asarray(prob.x0, dtype=float)
    used0 = 0
    if not _feasible(prob, x0, margin=0.0):
        x0, used0, status = _phase1(prob, solver_tol, max_iter)
        if status != "ok":
            return SolveResult(
                x=np.asarray(prob.x0, dtype=float), objective_value=np.nan,
                status="infeasible", kkt_residual=np.inf,
                newton_iters=used0,
                message="no strictly feasible point found")
    x, used, gap, status = _barrier(prob, x0, solver_tol,
                                    max(max_iter - used0, 10))
    return SolveResult(x=x, objective_value=prob.objective.value(x),
                       status=status, kkt_residual=gap,
                       newton_iters=used0 + used)


# -- canonical text dump --------------------------------------------------------

def _fmt(v: float) -> str:
    return f"{v:.9g}"


def _lin_str(row: sp.csr_matrix, const: float) -> str:
    row = row.tocoo()
    terms = [f"{_fmt(v)}*x{j}" for j, v in zip(row.col, row.data)]
    terms.append(_fmt(const))
    return " + ".join(terms)


def dump(prob: ConvexSubproblem) -> str:
    """Human-readable canonical form (grammar in the module docstring)."""
    out = [f"SUBPROBLEM {prob.name} VARS {prob.n}"]
    for name, idx in prob.var_names.items():
        for pos, j in enumerate(np.atleast_1d(idx)):
            out.append(f"VAR {int(j)} {name}[{pos}]")
    obj = prob.objective
    out.append(f"OBJ CONST {_fmt(obj.const)}")
    for j in np.nonzero(obj.c)[0]:
        out.append(f"OBJ LIN {int(j)} {_fmt(obj.c[j])}")
    if obj.w.size:
        for r in range(obj.w.size):
            out.append(f"OBJ LOG {_fmt(obj.w[r])} : "
                       f"{_lin_str(obj.Alog.getrow(r), obj.blog[r])}")
    if prob.affine is not None:
        for r in range(prob.affine.m):
            out.append(f"AFF {prob.affine.label}{r} : "
                       f"{_lin_str(prob.affine.A.getrow(r), prob.affine.b[r])} <= 0")
    if prob.quad is not None:
        q = prob.quad
        for r in range(q.m):
            out.append(
                f"QUAD {q.label}{r} : "
                f"sq({_lin_str(q.Sx.getrow(r), -q.tx[r])}) + "
                f"sq({_lin_str(q.Sy.getrow(r), -q.ty[r])}) + "
                f"{_lin_str(q.A.getrow(r), q.b[r])} <= 0")
    if prob.logrows is not None:
        g = prob.logrows
        for r in range(g.m):
            out.append(
                f"LOG {g.label}{r} : {_lin_str(g.A.getrow(r), g.b[r])} - "
                f"{_fmt(g.w[r])}*log({_lin_str(g.Cm.getrow(r), g.d[r])}) <= 0")
    for j, v in enumerate(prob.x0):
        out.append(f"START {j} {_fmt(v)}")
    return "\n".join(out) + "\n"
