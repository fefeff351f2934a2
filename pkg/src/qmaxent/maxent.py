"""Maximum-entropy state assignment under linear expectation constraints.

The max-entropy state compatible with ``tr(G_k rho) = t_k`` has the
exponential form ``exp(-sum_k mu_k G_k) / Z``. The multipliers minimize the
convex dual ``ln Z(mu) + mu . t`` whose gradient is ``t_k - tr(G_k rho_mu)``.

Constraints on a channel's output, ``tr(O Lambda(rho)) = o``, enter through
the trace dual as ``tr(Lambda*(O) rho) = o``.

Before minimizing, the operators are projected onto the traceless subspace
(normalization is carried by ``Z``), redundant directions are removed through
the Hilbert-Schmidt Gram matrix, and targets sitting on an extreme eigenvalue
of their operator (a population of exactly 0 or 1) are handled by restricting
the problem to the eigenspace they pin down, where the dual has a minimizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .channels import KrausChannel, adjoint_apply, apply, partial_trace_channel
from .entropy import relative_entropy
from .errors import InconsistentInputError, InfeasibleError, InvalidInputError
from .linalg import (
    CoarseGraining,
    expectation,
    gell_mann_basis,
    hermitian,
    orthonormal_basis,
    tensor,
)

CONSTRAINT_TOL = 1e-9
MULTIPLIER_CAP = 1e6
MAX_ITER = 500
GRAM_RANK_TOL = 1e-10
BOUNDARY_TOL = 1e-12
NEWTON_MAX_CONSTRAINTS = 1024
POLISH_STEPS = 4


@dataclass(frozen=True)
class SolverOptions:
    constraint_tol: float = CONSTRAINT_TOL
    multiplier_cap: float = MULTIPLIER_CAP
    max_iter: int = MAX_ITER
    method: str = "auto"  # "newton", "bfgs" or "auto"


@dataclass(frozen=True)
class ConstraintSet:
    """Direct constraints on the input space and constraints routed through channels.

    ``direct`` holds ``(X, x)`` pairs with ``X`` acting on the input space.
    ``routed`` holds ``(O, channel, o)`` triples with ``O`` acting on the
    channel's output space.
    """

    dim: int
    direct: tuple = ()
    routed: tuple = ()

    def __post_init__(self):
        d = int(self.dim)
        if d < 1:
            raise InvalidInputError("constraint dimension must be positive")
        direct = []
        for k, (op, target) in enumerate(self.direct):
            op = hermitian(op, name=f"direct constraint {k}")
            if op.shape != (d, d):
                raise InvalidInputError(f"direct constraint {k} has shape {op.shape}, expected {(d, d)}")
            direct.append((op, _finite_target(target, k)))
        routed = []
        for k, (op, channel, target) in enumerate(self.routed):
            if not isinstance(channel, KrausChannel):
                raise InvalidInputError(f"routed constraint {k} needs a KrausChannel")
            if channel.in_dim != d:
                raise InvalidInputError(f"routed constraint {k}: channel input dimension {channel.in_dim} != {d}")
            op = hermitian(op, name=f"routed constraint {k}")
            if op.shape != (channel.out_dim, channel.out_dim):
                raise InvalidInputError(f"routed constraint {k}: observable does not act on the channel output")
            routed.append((op, channel, _finite_target(target, len(direct) + k)))
        object.__setattr__(self, "dim", d)
        object.__setattr__(self, "direct", tuple(direct))
        object.__setattr__(self, "routed", tuple(routed))

    def __len__(self):
        return len(self.direct) + len(self.routed)

    def __add__(self, other: "ConstraintSet") -> "ConstraintSet":
        if other.dim != self.dim:
            raise InvalidInputError("cannot merge constraint sets on different spaces")
        return ConstraintSet(self.dim, self.direct + other.direct, self.routed + other.routed)


def _finite_target(t, k) -> float:
    t = float(np.real(t))
    if not math.isfinite(t):
        raise InvalidInputError(f"constraint {k} has a non-finite target")
    return t


def pull_back(cs: ConstraintSet) -> list[tuple[np.ndarray, float]]:
    """Express every constraint on the input space; direct ones first."""
    out = [(op, t) for op, t in cs.direct]
    out.extend((adjoint_apply(ch, op), t) for op, ch, t in cs.routed)
    return out


# constraint-set builders -------------------------------------------------------


def population_constraints(basis, rho) -> ConstraintSet:
    """``<a|rho|a> = p_a`` for every basis vector (columns of ``basis``)."""
    b = orthonormal_basis(basis)
    ops = [np.outer(b[:, a], b[:, a].conj()) for a in range(b.shape[1])]
    return ConstraintSet(b.shape[0], tuple((p, expectation(p, rho)) for p in ops))


def coarse_population_constraints(cg: CoarseGraining, rho) -> ConstraintSet:
    """``tr(Pi_i rho) = p_i`` for every block of ``cg``."""
    return ConstraintSet(cg.dim, tuple((p, expectation(p, rho)) for p in cg.projectors))


def tomography_constraints(rho) -> ConstraintSet:
    """Full tomography of ``rho`` through a traceless Hermitian operator basis."""
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    return ConstraintSet(d, tuple((g, expectation(g, rho)) for g in gell_mann_basis(d)))


def routed_tomography_constraints(channel: KrausChannel, rho) -> ConstraintSet:
    """Full tomography of ``channel(rho)`` pulled back to the input."""
    out = apply(channel, rho)
    return ConstraintSet(
        channel.in_dim,
        routed=tuple((g, channel, expectation(g, out)) for g in gell_mann_basis(channel.out_dim)),
    )


def local_tomography_constraints(rho_local, dims: Sequence[int], subsystem="S") -> ConstraintSet:
    """Tomography of one factor of an S (x) E state, routed through the partial trace."""
    d_s, d_e = dims
    channel = partial_trace_channel(d_s, d_e, keep=subsystem)
    rho_local = np.asarray(rho_local, dtype=complex)
    if rho_local.shape != (channel.out_dim, channel.out_dim):
        raise InvalidInputError("local state does not match the kept subsystem")
    return ConstraintSet(
        d_s * d_e,
        routed=tuple((g, channel, expectation(g, rho_local)) for g in gell_mann_basis(channel.out_dim)),
    )


def energy_constraint(h, target: float) -> ConstraintSet:
    h = hermitian(h)
    return ConstraintSet(h.shape[0], ((h, target),))


# dual objective ----------------------------------------------------------------


def _stack(ops) -> np.ndarray:
    return np.stack([np.asarray(o, dtype=complex) for o in ops]) if len(ops) else np.zeros((0, 1, 1), complex)


def _exp_family(mu, g: np.ndarray, d: int):
    """Eigen-data of ``-sum mu_k G_k`` and the normalized exponential state."""
    a = -np.einsum("k,kij->ij", mu, g) if len(mu) else np.zeros((d, d), complex)
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    shift = w[-1]
    e = np.exp(w - shift)
    z = e.sum()
    p = e / z
    log_z = shift + math.log(z)
    rho = (v * p) @ v.conj().T
    return w, v, p, log_z, (rho + rho.conj().T) / 2


def _expectations(g: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return np.real(np.einsum("kij,ji->k", g, rho))


def dual_objective(multipliers, ops) -> tuple[float, np.ndarray]:
    """Dual value ``ln Z(mu) + mu . t`` and its gradient ``t - <G>_mu``.

    ``ops`` is a sequence of ``(G_k, t_k)`` pairs on a common space.
    """
    mu = np.asarray(multipliers, dtype=float)
    if not np.all(np.isfinite(mu)):
        raise InvalidInputError("multipliers must be finite")
    if len(ops) != len(mu):
        raise InvalidInputError("one multiplier per constraint operator is required")
    g = _stack([hermitian(o) for o, _ in ops])
    t = np.array([float(x) for _, x in ops])
    d = g.shape[1]
    _, _, _, log_z, rho = _exp_family(mu, g, d)
    return log_z + float(mu @ t), t - _expectations(g, rho)


def _divided_differences(w: np.ndarray, p: np.ndarray) -> np.ndarray:
    # F_ab = (p_a - p_b) / (w_a - w_b), computed from the larger eigenvalue's side
    hi = np.maximum.outer(w, w)
    lo = np.minimum.outer(w, w)
    p_hi = np.where(w[:, None] >= w[None, :], p[:, None], p[None, :])
    delta = lo - hi
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(delta < -1e-300, np.expm1(delta) / delta, 1.0)
    return p_hi * ratio


def _hessian(g: np.ndarray, w, v, p) -> np.ndarray:
    if not len(g):
        return np.zeros((0, 0))
    gt = np.einsum("ia,kij,jb->kab", v.conj(), g, v)
    f = _divided_differences(w, p)
    flat = gt.reshape(len(g), -1)
    h = np.real(flat.conj() @ (flat * f.reshape(-1)).T)
    mean = np.real(np.einsum("kaa,a->k", gt, p))
    h = h - np.outer(mean, mean)
    return (h + h.T) / 2


# reduction ---------------------------------------------------------------------


@dataclass
class _Reduced:
    basis: np.ndarray | None  # columns spanning the restricted support, None for full space
    ops: np.ndarray  # original operators restricted to the support
    targets: np.ndarray
    red_ops: np.ndarray  # orthonormal traceless directions
    red_targets: np.ndarray
    to_original: np.ndarray  # mu = to_original @ nu


def _restrict(ops: np.ndarray, basis: np.ndarray | None) -> np.ndarray:
    if basis is None:
        return ops
    return np.einsum("ia,kij,jb->kab", basis.conj(), ops, basis)


def _boundary_restriction(ops: np.ndarray, targets: np.ndarray, tol: float):
    """Find the subspace pinned down by targets on an extreme eigenvalue.

    Returns ``None`` when no target sits on the boundary, otherwise the
    columns of an orthonormal basis of the allowed subspace.
    """
    d = ops.shape[1]
    basis = None
    changed = True
    while changed:
        changed = False
        cur = _restrict(ops, basis)
        for k in range(len(cur)):
            w, v = np.linalg.eigh((cur[k] + cur[k].conj().T) / 2)
            scale = max(1.0, float(np.max(np.abs(w))))
            span = w[-1] - w[0]
            if span <= BOUNDARY_TOL * scale:
                continue
            if targets[k] < w[0] - tol or targets[k] > w[-1] + tol:
                raise InfeasibleError(
                    f"constraint {k}: target {float(targets[k]):.12g} outside the operator's range "
                    f"[{float(w[0]):.12g}, {float(w[-1]):.12g}]",
                    constraint=k,
                )
            for ext in (w[0], w[-1]):
                if abs(targets[k] - ext) <= BOUNDARY_TOL * scale:
                    keep = np.abs(w - ext) <= 1e-9 * scale
                    sub = v[:, keep]
                    basis = sub if basis is None else basis @ sub
                    changed = True
                    break
            if changed:
                break
        if basis is not None and basis.shape[1] == 0:
            raise InfeasibleError("boundary targets leave no admissible subspace")
    if basis is not None and basis.shape[1] == d:
        return None
    return basis


def _reduce(ops: np.ndarray, targets: np.ndarray, dim: int, tol: float) -> _Reduced:
    basis = _boundary_restriction(ops, targets, tol) if len(ops) else None
    r_ops = _restrict(ops, basis)
    r = r_ops.shape[1] if len(ops) else dim if basis is None else basis.shape[1]
    if not len(ops):
        return _Reduced(basis, r_ops, targets, np.zeros((0, r, r), complex), np.zeros(0), np.zeros((0, 0)))
    traces = np.real(np.einsum("kii->k", r_ops))
    traceless = r_ops - (traces / r)[:, None, None] * np.eye(r)[None]
    shifted = targets - traces / r
    flat = traceless.reshape(len(ops), -1)
    gram = np.real(flat.conj() @ flat.T)
    lam, vec = np.linalg.eigh((gram + gram.T) / 2)
    top = max(float(lam[-1]), 0.0)
    keep = lam > GRAM_RANK_TOL * max(top, 1.0)
    scale = max(1.0, float(np.linalg.norm(shifted)))
    for j in np.flatnonzero(~keep):
        mismatch = float(vec[:, j] @ shifted)
        if abs(mismatch) > 1e-8 * scale:
            worst = int(np.argmax(np.abs(vec[:, j])))
            raise InfeasibleError(
                f"constraint {worst} contradicts a linearly dependent combination of other constraints "
                f"(mismatch {mismatch:.3e})",
                constraint=worst,
            )
    coeff = vec[:, keep] / np.sqrt(lam[keep])[None, :]
    red_ops = np.einsum("km,kij->mij", coeff, traceless)
    red_targets = coeff.T @ shifted
    return _Reduced(basis, r_ops, targets, red_ops, red_targets, coeff)


# solver ------------------------------------------------------------------------


@dataclass(frozen=True)
class MaxEntSolution:
    """Solved max-entropy state with its multipliers and diagnostics.

    ``multipliers`` follow the constraint order of :func:`pull_back`. When
    boundary targets restricted the problem, ``support_basis`` holds the
    columns spanning the state's support and the exponential form lives on
    that subspace; it is ``None`` otherwise.
    """

    state: np.ndarray
    multipliers: np.ndarray
    log_partition: float
    residuals: np.ndarray
    iterations: int
    converged: bool
    operators: tuple = field(repr=False, default=())
    targets: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0))
    support_basis: np.ndarray | None = field(repr=False, default=None)
    constraint_tol: float = CONSTRAINT_TOL

    @property
    def dim(self) -> int:
        return self.state.shape[0]

    @property
    def max_residual(self) -> float:
        return float(np.max(np.abs(self.residuals))) if len(self.residuals) else 0.0

    def reconstruct(self) -> np.ndarray:
        """Rebuild the state from the stored multipliers."""
        ops = _stack(self.operators) if self.operators else np.zeros((0, self.dim, self.dim), complex)
        restricted = _restrict(ops, self.support_basis) if len(ops) else ops
        r = self.dim if self.support_basis is None else self.support_basis.shape[1]
        _, _, _, _, sigma = _exp_family(self.multipliers, restricted, r)
        if self.support_basis is None:
            return sigma
        b = self.support_basis
        return b @ sigma @ b.conj().T


class _Objective:
    def __init__(self, red_ops: np.ndarray, red_targets: np.ndarray, dim: int):
        self.g = red_ops
        self.t = red_targets
        self.dim = dim

    def __call__(self, nu, hessian=False):
        w, v, p, log_z, rho = _exp_family(nu, self.g, self.dim)
        value = log_z + float(nu @ self.t)
        grad = self.t - _expectations(self.g, rho)
        h = _hessian(self.g, w, v, p) if hessian else None
        return value, grad, h, rho, log_z


def _line_search(obj, nu, f0, g0, step, max_halvings=60):
    slope = float(g0 @ step)
    g0_norm = np.linalg.norm(g0)
    if -slope < 1e-11 * max(1.0, abs(f0)):
        # predicted decrease is below the dual value's roundoff: judge by the gradient
        alpha = 1.0
        for _ in range(8):
            cand = nu + alpha * step
            f1, g1, _, rho1, lz1 = obj(cand)
            if np.linalg.norm(g1) < g0_norm:
                return cand, f1, g1, rho1, lz1
            alpha *= 0.5
        return None
    alpha = 1.0
    for _ in range(max_halvings):
        cand = nu + alpha * step
        f1, g1, _, rho1, lz1 = obj(cand)
        if f1 <= f0 + 1e-4 * alpha * slope:
            return cand, f1, g1, rho1, lz1
        alpha *= 0.5
    # roundoff floor of the dual value: accept a step that still shrinks the gradient
    cand = nu + step
    f1, g1, _, rho1, lz1 = obj(cand)
    if np.linalg.norm(g1) < np.linalg.norm(g0):
        return cand, f1, g1, rho1, lz1
    return None


def solve_mes(cs: ConstraintSet | Sequence, dim: int | None = None, opts: SolverOptions | None = None) -> MaxEntSolution:
    """Maximum-entropy state for a constraint set.

    Args:
        cs: a :class:`ConstraintSet` or an already pulled-back list of
            ``(operator, target)`` pairs.
        dim: Hilbert-space dimension; taken from ``cs`` when omitted.
        opts: solver settings.

    Raises:
        InfeasibleError: targets outside an operator's range, contradictory
            dependent constraints, or multipliers diverging past the cap.
    """
    opts = opts or SolverOptions()
    if isinstance(cs, ConstraintSet):
        pairs = pull_back(cs)
        dim = cs.dim if dim is None else dim
    else:
        pairs = [(hermitian(o), float(t)) for o, t in cs]
        if dim is None:
            if not pairs:
                raise InvalidInputError("dimension required for an empty constraint list")
            dim = pairs[0][0].shape[0]
    if dim is None or dim < 1:
        raise InvalidInputError("dimension must be positive")
    if cs is not None and isinstance(cs, ConstraintSet) and cs.dim != dim:
        raise InvalidInputError("constraint set dimension disagrees with dim")
    ops = _stack([o for o, _ in pairs]) if pairs else np.zeros((0, dim, dim), complex)
    if len(pairs) and ops.shape[1:] != (dim, dim):
        raise InvalidInputError("constraint operators do not match the dimension")
    targets = np.array([t for _, t in pairs], dtype=float)

    red = _reduce(ops, targets, dim, opts.constraint_tol)
    r = dim if red.basis is None else red.basis.shape[1]
    obj = _Objective(red.red_ops, red.red_targets, r)
    n = len(red.red_targets)
    method = opts.method
    if method == "auto":
        method = "newton" if n <= NEWTON_MAX_CONSTRAINTS else "bfgs"
    if method not in ("newton", "bfgs"):
        raise InvalidInputError(f"unknown solver method {opts.method!r}")

    nu = np.zeros(n)
    f, g, h, rho, log_z = obj(nu, hessian=method == "newton")
    inv_h = np.eye(n) * r
    iterations = 0
    converged = False

    def original_residuals(state):
        return red.targets - _expectations(red.ops, state) if len(red.ops) else np.zeros(0)

    res = original_residuals(rho)
    while True:
        if not len(res) or np.max(np.abs(res)) <= opts.constraint_tol:
            converged = True
            break
        if iterations >= opts.max_iter:
            break
        iterations += 1
        if method == "newton":
            try:
                step = -np.linalg.solve(h + 1e-14 * np.eye(n), g)
            except np.linalg.LinAlgError:
                step = -np.linalg.lstsq(h, g, rcond=None)[0]
        else:
            step = -inv_h @ g
        if not np.all(np.isfinite(step)) or float(step @ g) >= 0:
            step = -g * r
        found = _line_search(obj, nu, f, g, step)
        if found is None and method == "bfgs":
            # curvature model failed: plain gradient step
            inv_h = np.eye(n) * r
            found = _line_search(obj, nu, f, g, -g * r)
        if found is None:
            break
        new_nu, f_new, g_new, rho, log_z = found
        if method == "bfgs":
            s = new_nu - nu
            y = g_new - g
            sy = float(s @ y)
            if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
                rho_k = 1.0 / sy
                eye = np.eye(n)
                inv_h = (eye - rho_k * np.outer(s, y)) @ inv_h @ (eye - rho_k * np.outer(y, s)) + rho_k * np.outer(s, s)
            else:
                inv_h = np.eye(n) * r
        nu, f, g = new_nu, f_new, g_new
        if method == "newton":
            _, _, h, _, _ = obj(nu, hessian=True)
        res = original_residuals(rho)
        if np.linalg.norm(nu) > opts.multiplier_cap:
            worst = int(np.argmax(np.abs(res)))
            raise InfeasibleError(
                f"multipliers diverged past {opts.multiplier_cap:g}; constraint {worst} is on the boundary "
                f"or infeasible (residual {res[worst]:.3e})",
                constraint=worst,
            )

    if converged and method == "newton" and n:
        # tolerance met; a few more Newton steps reach roundoff, which gives
        # small eigenvalues relative accuracy (relative entropies need it)
        worst = float(np.max(np.abs(res)))
        for _ in range(POLISH_STEPS):
            if worst == 0.0:
                break
            try:
                step = -np.linalg.solve(h + 1e-14 * np.eye(n), g)
            except np.linalg.LinAlgError:
                break
            cand = nu + step
            f_c, g_c, h_c, rho_c, _ = obj(cand, hessian=True)
            res_c = original_residuals(rho_c)
            worst_c = float(np.max(np.abs(res_c)))
            if not worst_c < worst:
                break
            nu, f, g, h, rho, res, worst = cand, f_c, g_c, h_c, rho_c, res_c, worst_c

    mu = red.to_original @ nu if n else np.zeros(len(pairs))
    if red.basis is None:
        state = rho
        log_partition = _exp_family(mu, ops, dim)[3] if len(pairs) else math.log(dim)
    else:
        b = red.basis
        state = b @ rho @ b.conj().T
        state = (state + state.conj().T) / 2
        log_partition = _exp_family(mu, red.ops, r)[3]
    residuals = targets - _expectations(ops, state) if len(pairs) else np.zeros(0)
    return MaxEntSolution(
        state=state,
        multipliers=mu,
        log_partition=float(log_partition),
        residuals=residuals,
        iterations=iterations,
        converged=converged,
        operators=tuple(o for o, _ in pairs),
        targets=targets,
        support_basis=red.basis,
        constraint_tol=opts.constraint_tol,
    )


def entropy_production(rho, mes: MaxEntSolution, check: bool = True) -> float:
    """Relative entropy of the fully known state to the max-entropy assignment.

    With ``check`` set, ``rho`` must reproduce every target the solution was
    solved for; knowledge that refers to another time (an initial
    environment state, say) needs ``check=False``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != mes.state.shape:
        raise InvalidInputError("state and max-entropy solution live on different spaces")
    if check and mes.operators:
        mismatch = mes.targets - _expectations(_stack(mes.operators), rho)
        worst = int(np.argmax(np.abs(mismatch)))
        if abs(mismatch[worst]) > max(mes.constraint_tol, 1e-9):
            raise InconsistentInputError(
                f"state violates constraint {worst} by {mismatch[worst]:.3e}; it is not the measured state"
            )
    return relative_entropy(rho, mes.state)


def thermal_energy(h, beta: float) -> float:
    w = np.linalg.eigvalsh(hermitian(h))
    x = -beta * w
    p = np.exp(x - x.max())
    return float(p @ w / p.sum())


def solve_beta(h, target_energy: float, tol: float = 1e-10) -> float:
    """Inverse temperature whose Gibbs state of ``h`` has the given mean energy.

    Negative values describe population inversion.

    Raises:
        InfeasibleError: when the target is not strictly inside the spectrum.
    """
    w = np.linalg.eigvalsh(hermitian(h))
    target = float(target_energy)
    spread = w[-1] - w[0]
    scale = max(1.0, float(np.max(np.abs(w))))
    if spread <= 1e-14 * scale or not (w[0] < target < w[-1]):
        raise InfeasibleError(f"energy {float(target):.12g} is not strictly inside ({float(w[0]):.12g}, {float(w[-1]):.12g})")
    if abs(target - w.mean()) <= 1e-15 * scale:
        return 0.0

    def gap(beta):
        return thermal_energy(h, beta) - target

    bound = 1.0 / spread
    while gap(bound) > 0:
        bound *= 2
        if bound > 1e12:
            raise InfeasibleError("energy too close to the ground state to resolve a temperature")
    low = -1.0 / spread
    while gap(low) < 0:
        low *= 2
        if low < -1e12:
            raise InfeasibleError("energy too close to the top of the spectrum to resolve a temperature")
    beta = brentq(gap, low, bound, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    for _ in range(3):
        e = thermal_energy(h, beta)
        x = -beta * w
        p = np.exp(x - x.max())
        p /= p.sum()
        var = float(p @ (w - e) ** 2)
        if var <= 0 or abs(e - target) <= tol * 1e-3:
            break
        beta += (e - target) / var
    return float(beta)


def product_constraints(
    rho_s, rho_e_knowledge: ConstraintSet | None, dims: Sequence[int]
) -> ConstraintSet:
    """Local tomography of ``rho_s`` plus environment constraints lifted to S (x) E.

    Environment constraints given on the environment space are lifted as
    ``I_S (x) X``.
    """
    d_s, d_e = dims
    cs = local_tomography_constraints(rho_s, dims, "S")
    if rho_e_knowledge is not None:
        if rho_e_knowledge.dim != d_e or rho_e_knowledge.routed:
            raise InvalidInputError("environment knowledge must be direct constraints on the environment")
        lifted = tuple((tensor(np.eye(d_s), op), t) for op, t in rho_e_knowledge.direct)
        cs = cs + ConstraintSet(d_s * d_e, lifted)
    return cs


__all__ = [
    "ConstraintSet",
    "MaxEntSolution",
    "SolverOptions",
    "pull_back",
    "dual_objective",
    "solve_mes",
    "solve_beta",
    "entropy_production",
    "population_constraints",
    "coarse_population_constraints",
    "tomography_constraints",
    "routed_tomography_constraints",
    "local_tomography_constraints",
    "energy_constraint",
    "product_constraints",
    "thermal_energy",
]
