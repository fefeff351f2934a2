"""Worked entropy-production scenarios, each checked against its closed form.

Every scenario computes the entropy production twice: once through the
general max-entropy solver and once through the scenario's closed-form
expression. The report keeps both numbers and their absolute difference
(``oracle_deltas``) so that callers and tests can hold the solver to account.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import entropy as ent
from .channels import (
    KrausChannel,
    apply,
    coarse_graining_channel,
    dephasing_channel,
    is_injective,
    stinespring_dilation,
)
from .errors import InvalidInputError, PreconditionError, UnsupportedError
from .linalg import (
    CoarseGraining,
    JointOutcomeTable,
    density_matrix,
    eig_hermitian,
    expectation,
    gell_mann_basis,
    hermitian,
    is_unitary,
    orthonormal_basis,
    partial_trace,
    tensor,
    thermal_state,
    trace_distance,
)
from .maxent import (
    ConstraintSet,
    SolverOptions,
    coarse_population_constraints,
    entropy_production,
    local_tomography_constraints,
    population_constraints,
    routed_tomography_constraints,
    solve_beta,
    solve_mes,
)

DEFAULT_STEPS = 256
SCENARIO_TOL = 1e-7
STATE_FORM_TOL = 1e-9

KNOWLEDGE_GRADES = ("none", "energy", "full_initial", "full_final_local")


def inputs_digest(*items) -> str:
    """SHA-256 over arrays, numbers and strings in a canonical byte form."""
    h = hashlib.sha256()

    def feed(x):
        if isinstance(x, np.ndarray):
            a = np.ascontiguousarray(x, dtype=complex)
            h.update(repr(a.shape).encode())
            h.update(a.tobytes())
        elif isinstance(x, CoarseGraining):
            for b in x.vectors:
                feed(b)
        elif isinstance(x, KrausChannel):
            h.update(x.name.encode())
            for k in x.kraus_ops:
                feed(k)
        elif isinstance(x, EvolutionSpec):
            h.update(repr((x.total_time, x.steps)).encode())
            for t, op in x.hamiltonian_schedule:
                h.update(repr(float(t)).encode())
                feed(op)
        elif isinstance(x, (list, tuple)):
            h.update(b"[")
            for y in x:
                feed(y)
            h.update(b"]")
        elif isinstance(x, float):
            h.update(float(x).hex().encode())
        else:
            h.update(repr(x).encode())
        h.update(b"|")

    for item in items:
        feed(item)
    return h.hexdigest()


@dataclass
class ScenarioReport:
    """Named quantities of one scenario run and their closed-form deltas."""

    scenario_id: str
    inputs_digest: str
    quantities: dict = field(default_factory=dict)
    oracle_deltas: dict = field(default_factory=dict)
    converged: bool = True
    seed: int | None = None
    tolerance: float = SCENARIO_TOL

    @property
    def max_delta(self) -> float:
        finite = [v for v in self.oracle_deltas.values() if math.isfinite(v)]
        if len(finite) < len(self.oracle_deltas):
            return math.inf
        return max(finite, default=0.0)

    def passed(self) -> bool:
        return self.converged and self.max_delta < self.tolerance

    def to_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "inputs_digest": self.inputs_digest,
            "seed": self.seed,
            "converged": self.converged,
            "tolerance": self.tolerance,
            "quantities": {k: _json_float(v) for k, v in self.quantities.items()},
            "oracle_deltas": {k: _json_float(v) for k, v in self.oracle_deltas.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def csv_rows(self, label: str | None = None) -> list[tuple[str, str, str, str, str]]:
        """Rows ``(scenario, quantity, value, oracle_delta, seed)``, floats at 17 digits."""
        name = label or self.scenario_id
        seed = "" if self.seed is None else str(self.seed)
        rows = []
        for key, value in self.quantities.items():
            delta = self.oracle_deltas.get(key)
            rows.append((name, key, format_float(value), "" if delta is None else format_float(delta), seed))
        for key, delta in self.oracle_deltas.items():
            if key not in self.quantities:
                rows.append((name, key, "", format_float(delta), seed))
        return rows


def format_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x + 0.0, ".17g")  # no signed zero


def _json_float(x):
    x = float(x)
    return x if math.isfinite(x) else format_float(x)


# time evolution ----------------------------------------------------------------


@dataclass(frozen=True)
class EvolutionSpec:
    """Hamiltonian schedule ``[(t_0, H_0), (t_1, H_1), ...]`` evolved up to ``total_time``.

    Between schedule points ``H(t)`` is interpolated linearly; before the
    first and after the last point it is held constant.
    """

    hamiltonian_schedule: tuple
    total_time: float
    steps: int = DEFAULT_STEPS

    def __post_init__(self):
        sched = tuple((float(t), hermitian(h, name="Hamiltonian")) for t, h in self.hamiltonian_schedule)
        if not sched:
            raise InvalidInputError("an evolution needs at least one Hamiltonian")
        times = [t for t, _ in sched]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise InvalidInputError("schedule times must be strictly ascending")
        if len({h.shape for _, h in sched}) != 1:
            raise InvalidInputError("all Hamiltonians in a schedule must share one dimension")
        if int(self.steps) < 1:
            raise InvalidInputError("steps must be at least 1")
        if not self.total_time >= 0:
            raise InvalidInputError("total_time must be non-negative")
        object.__setattr__(self, "hamiltonian_schedule", sched)
        object.__setattr__(self, "total_time", float(self.total_time))
        object.__setattr__(self, "steps", int(self.steps))

    @classmethod
    def constant(cls, h, total_time: float, steps: int = 1) -> "EvolutionSpec":
        return cls(((0.0, h),), total_time, steps)

    @property
    def dim(self) -> int:
        return self.hamiltonian_schedule[0][1].shape[0]

    def hamiltonian(self, t: float) -> np.ndarray:
        sched = self.hamiltonian_schedule
        if t <= sched[0][0]:
            return sched[0][1]
        for (t0, h0), (t1, h1) in zip(sched, sched[1:]):
            if t <= t1:
                x = (t - t0) / (t1 - t0)
                return (1 - x) * h0 + x * h1
        return sched[-1][1]


def propagate(spec: EvolutionSpec) -> np.ndarray:
    """Time-ordered propagator as a product of midpoint-rule steps ``exp(-i H dt)``."""
    d = spec.dim
    u = np.eye(d, dtype=complex)
    if spec.total_time == 0:
        return u
    dt = spec.total_time / spec.steps
    for n in range(spec.steps):
        h = spec.hamiltonian((n + 0.5) * dt)
        w, v = eig_hermitian(h)
        step = (v * np.exp(-1j * w * dt)) @ v.conj().T
        u = step @ u
    return u


def evolve(rho, u) -> np.ndarray:
    out = u @ np.asarray(rho, dtype=complex) @ u.conj().T
    return (out + out.conj().T) / 2


def energy_basis(h) -> np.ndarray:
    return eig_hermitian(h).eigenvectors


def energy_coarse_graining(h, block_sizes: Sequence[int]) -> CoarseGraining:
    """Blocks of consecutive energy levels (ascending) of the given sizes."""
    return CoarseGraining.from_basis(energy_basis(h), block_sizes)


# helpers -----------------------------------------------------------------------


def _populations(rho, basis) -> np.ndarray:
    return np.real(np.einsum("ia,ij,ja->a", basis.conj(), rho, basis))


def _dephased(rho, basis) -> np.ndarray:
    p = _populations(rho, basis)
    return (basis * p) @ basis.conj().T


def _check_diagonal(rho, basis, what):
    r = basis.conj().T @ rho @ basis
    off = np.max(np.abs(r - np.diag(np.diag(r)))) if r.shape[0] > 1 else 0.0
    if off > STATE_FORM_TOL:
        raise PreconditionError(f"{what} is not diagonal in the initial basis (coherence {off:.3e})")


def _solve(cs, opts):
    return solve_mes(cs, opts=opts)


# closed systems ----------------------------------------------------------------


def scenario_fine_grained(
    rho0, spec: EvolutionSpec, basis_schedule: tuple | None = None, opts: SolverOptions | None = None
) -> ScenarioReport:
    """Diagonal-entropy production of a unitarily driven closed system.

    The observer measures populations in the instantaneous energy basis at
    the initial and final times (or in the two bases of ``basis_schedule``).
    ``rho0`` must be diagonal in the initial basis.
    """
    rho0 = density_matrix(rho0)
    if basis_schedule is None:
        b0 = energy_basis(spec.hamiltonian(0.0))
        bt = energy_basis(spec.hamiltonian(spec.total_time))
    else:
        b0, bt = (orthonormal_basis(b) for b in basis_schedule)
    _check_diagonal(rho0, b0, "initial state")
    u = propagate(spec)
    rho_t = evolve(rho0, u)

    s_diag_0 = ent.diagonal_entropy(rho0, b0)
    s_diag_t = ent.diagonal_entropy(rho_t, bt)
    sigma_closed = s_diag_t - s_diag_0

    mes_0 = _solve(population_constraints(b0, rho0), opts)
    mes_t = _solve(population_constraints(bt, rho_t), opts)
    sigma_solver = entropy_production(rho_t, mes_t)
    s_vn_0 = ent.von_neumann_entropy(rho0)
    s_vn_t = ent.von_neumann_entropy(rho_t)
    mes_change = ent.von_neumann_entropy(mes_t.state) - ent.von_neumann_entropy(mes_0.state)

    return ScenarioReport(
        "scenario_fine_grained",
        inputs_digest(rho0, spec, b0, bt),
        quantities={
            "sigma_d": sigma_closed,
            "sigma_solver": sigma_solver,
            "diagonal_entropy_initial": s_diag_0,
            "diagonal_entropy_final": s_diag_t,
            "vn_entropy_initial": s_vn_0,
            "vn_entropy_final": s_vn_t,
            "mes_entropy_change": mes_change,
        },
        oracle_deltas={
            "sigma_solver": abs(sigma_solver - sigma_closed),
            "mes_entropy_change": abs(mes_change - sigma_closed),
            "vn_entropy_final": abs(s_vn_t - s_vn_0),
            "mes_state": trace_distance(mes_t.state, _dephased(rho_t, bt)),
        },
        converged=mes_0.converged and mes_t.converged,
    )


def scenario_coarse_grained(
    rho0, cg_schedule: tuple, spec: EvolutionSpec, opts: SolverOptions | None = None
) -> ScenarioReport:
    """Observational-entropy production of a unitarily driven closed system.

    ``cg_schedule`` is the pair ``(initial, final)`` of coarse-grainings;
    ``rho0`` must be block-uniform in the initial one.
    """
    rho0 = density_matrix(rho0)
    cg0, cgt = cg_schedule
    if cg0.dim != rho0.shape[0] or cgt.dim != rho0.shape[0]:
        raise InvalidInputError("coarse-grainings do not match the state dimension")
    uniform = cg0.block_uniform_state(cg0.probabilities(rho0))
    if np.max(np.abs(uniform - rho0)) > STATE_FORM_TOL:
        raise PreconditionError("initial state is not block-uniform in the initial coarse-graining")
    rho_t = evolve(rho0, propagate(spec))

    s_obs_0 = ent.observational_entropy(rho0, cg0)
    s_obs_t = ent.observational_entropy(rho_t, cgt)
    sigma_closed = s_obs_t - s_obs_0

    mes_0 = _solve(coarse_population_constraints(cg0, rho0), opts)
    mes_t = _solve(coarse_population_constraints(cgt, rho_t), opts)
    sigma_solver = entropy_production(rho_t, mes_t)
    mes_change = ent.von_neumann_entropy(mes_t.state) - ent.von_neumann_entropy(mes_0.state)
    s_vn_0 = ent.von_neumann_entropy(rho0)
    s_vn_t = ent.von_neumann_entropy(rho_t)

    return ScenarioReport(
        "scenario_coarse_grained",
        inputs_digest(rho0, cg0, cgt, spec),
        quantities={
            "sigma_obs": sigma_closed,
            "sigma_solver": sigma_solver,
            "observational_entropy_initial": s_obs_0,
            "observational_entropy_final": s_obs_t,
            "vn_entropy_initial": s_vn_0,
            "vn_entropy_final": s_vn_t,
            "mes_entropy_change": mes_change,
        },
        oracle_deltas={
            "sigma_solver": abs(sigma_solver - sigma_closed),
            "mes_entropy_change": abs(mes_change - sigma_closed),
            "vn_entropy_final": abs(s_vn_t - s_vn_0),
            "mes_state": trace_distance(mes_t.state, cgt.block_uniform_state(cgt.probabilities(rho_t))),
        },
        converged=mes_0.converged and mes_t.converged,
    )


# open systems ------------------------------------------------------------------


def _lifted(ops_targets, d_s) -> ConstraintSet:
    ops_targets = list(ops_targets)
    d_e = ops_targets[0][0].shape[0]
    return ConstraintSet(d_s * d_e, tuple((tensor(np.eye(d_s), op), t) for op, t in ops_targets))


def _flux(rho_se, mes_state, dims, ds_e, s_s, s_e) -> float:
    # -dS_E - tr rho_SE (ln rho_S (x) rho_E - ln mes), with tr rho ln(rho_S (x) rho_E) = -S_S - S_E
    return -ds_e + s_s + s_e - ent.cross_entropy(rho_se, mes_state)


def scenario_open_system(
    rho_s0,
    rho_e0,
    u_se,
    knowledge: str | Sequence[str] = KNOWLEDGE_GRADES,
    h_e=None,
    opts: SolverOptions | None = None,
) -> ScenarioReport:
    """Entropy production of a system after a joint unitary with its environment.

    ``knowledge`` picks one or more grades of what the observer knows about
    the environment, on top of full tomography of the final system state:

    * ``none``: nothing,
    * ``energy``: the initial mean energy of ``h_e``,
    * ``full_initial``: the full initial environment state,
    * ``full_final_local``: the full final environment state.

    For each grade the report holds the solver's entropy production, its
    closed form, and the flux that closes ``dS_S = sigma + phi``.
    """
    rho_s0 = density_matrix(rho_s0, name="system state")
    rho_e0 = density_matrix(rho_e0, name="environment state")
    d_s, d_e = rho_s0.shape[0], rho_e0.shape[0]
    dims = (d_s, d_e)
    u = np.asarray(u_se, dtype=complex)
    if u.shape != (d_s * d_e, d_s * d_e) or not is_unitary(u):
        raise PreconditionError("joint evolution must be a unitary on system (x) environment")
    grades = (knowledge,) if isinstance(knowledge, str) else tuple(knowledge)
    for g in grades:
        if g not in KNOWLEDGE_GRADES:
            raise InvalidInputError(f"unknown knowledge grade {g!r}; choose from {KNOWLEDGE_GRADES}")
    if "energy" in grades and h_e is None:
        raise InvalidInputError("the 'energy' grade needs the environment Hamiltonian")

    rho_se = evolve(tensor(rho_s0, rho_e0), u)
    rho_s = partial_trace(rho_se, dims, "S")
    rho_e = partial_trace(rho_se, dims, "E")
    s_s0, s_e0 = ent.von_neumann_entropy(rho_s0), ent.von_neumann_entropy(rho_e0)
    s_s, s_e = ent.von_neumann_entropy(rho_s), ent.von_neumann_entropy(rho_e)
    ds_s, ds_e = s_s - s_s0, s_e - s_e0
    mi = ent.mutual_information(rho_se, dims)
    env_rel = ent.relative_entropy(rho_e, rho_e0)

    q = {"delta_S_system": ds_s, "delta_S_environment": ds_e, "mutual_information": mi,
         "environment_relative_entropy": env_rel}
    deltas = {"vn_entropy_global": abs(ent.von_neumann_entropy(rho_se) - s_s0 - s_e0)}
    converged = True
    system_knowledge = local_tomography_constraints(rho_s, dims, "S")

    for grade in grades:
        check = True
        if grade == "none":
            cs = system_knowledge
            closed_state = tensor(rho_s, np.eye(d_e) / d_e)
        elif grade == "energy":
            h = hermitian(h_e, name="environment Hamiltonian")
            e0 = expectation(h, rho_e0)
            beta0 = solve_beta(h, e0)
            cs = system_knowledge + _lifted([(h, e0)], d_s)
            closed_state = tensor(rho_s, thermal_state(h, beta0))
            check = False
            de_e = expectation(h, rho_e) - e0
            q["beta0"] = beta0
            q["delta_E_environment"] = de_e
            q["thermodynamic_form"] = ds_s + beta0 * de_e
        elif grade == "full_initial":
            cs = system_knowledge + _lifted([(g, expectation(g, rho_e0)) for g in gell_mann_basis(d_e)], d_s)
            closed_state = tensor(rho_s, rho_e0)
            check = False
        else:
            cs = system_knowledge + local_tomography_constraints(rho_e, dims, "E")
            closed_state = tensor(rho_s, rho_e)

        mes = _solve(cs, opts)
        converged = converged and mes.converged
        sigma = entropy_production(rho_se, mes, check=check)
        sigma_closed = ent.relative_entropy(rho_se, closed_state)
        phi = _flux(rho_se, mes.state, dims, ds_e, s_s, s_e)
        q[f"sigma_{grade}"] = sigma
        q[f"sigma_closed_{grade}"] = sigma_closed
        q[f"phi_{grade}"] = phi
        deltas[f"sigma_{grade}"] = abs(sigma - sigma_closed)
        deltas[f"mes_state_{grade}"] = trace_distance(mes.state, closed_state)
        deltas[f"closure_{grade}"] = abs(ds_s - (sigma + phi))
        if grade == "energy" and trace_distance(rho_e0, partial_trace(closed_state, dims, "E")) < STATE_FORM_TOL:
            # initial environment is the Gibbs state at beta0
            deltas["thermodynamic_form"] = abs(sigma - q["thermodynamic_form"])
        if grade == "full_initial":
            deltas["info_decomposition"] = abs(sigma - (env_rel + mi))
        if grade == "full_final_local":
            deltas["mutual_information"] = abs(sigma - mi)

    return ScenarioReport(
        "scenario_open_system",
        inputs_digest(rho_s0, rho_e0, u, grades, h_e if h_e is not None else "no-hamiltonian"),
        quantities=q,
        oracle_deltas=deltas,
        converged=converged,
    )



def _product_form(rho_se0, dims):
    rho_s0 = partial_trace(rho_se0, dims, "S")
    rho_e0 = partial_trace(rho_se0, dims, "E")
    if np.max(np.abs(tensor(rho_s0, rho_e0) - rho_se0)) > STATE_FORM_TOL:
        raise PreconditionError("initial joint state is not a product state")
    return rho_s0, rho_e0


def scenario_joint_coarse(rho_se0, cg_e: CoarseGraining, u_se, opts: SolverOptions | None = None) -> ScenarioReport:
    """Joint versus local coarse measurements of system and environment.

    The system is measured in the eigenbasis of its reduced state and the
    environment with the coarse-graining ``cg_e``, either jointly (outcome
    table ``p_ij``) or separately (marginals only). The gap between the two
    entropy productions is the classical mutual information of ``p_ij``.
    """
    rho_se0 = density_matrix(rho_se0, name="initial joint state")
    d_e = cg_e.dim
    if rho_se0.shape[0] % d_e:
        raise InvalidInputError("environment coarse-graining does not divide the joint dimension")
    d_s = rho_se0.shape[0] // d_e
    dims = (d_s, d_e)
    u = np.asarray(u_se, dtype=complex)
    if u.shape != rho_se0.shape or not is_unitary(u):
        raise PreconditionError("joint evolution must be a unitary on system (x) environment")
    rho_s0, rho_e0 = _product_form(rho_se0, dims)
    if np.max(np.abs(cg_e.block_uniform_state(cg_e.probabilities(rho_e0)) - rho_e0)) > STATE_FORM_TOL:
        raise PreconditionError("initial environment state is not block-uniform in the coarse-graining")

    rho_se = evolve(rho_se0, u)
    rho_s = partial_trace(rho_se, dims, "S")
    rho_e = partial_trace(rho_se, dims, "E")
    bs0 = energy_basis(rho_s0)
    bst = energy_basis(rho_s)
    joint0 = CoarseGraining.fine(bs0).tensor(cg_e)
    joint_t = CoarseGraining.fine(bst).tensor(cg_e)
    table = JointOutcomeTable(joint_t.probabilities(rho_se).reshape(d_s, len(cg_e.ranks)))

    sigma_joint_closed = ent.observational_entropy(rho_se, joint_t) - ent.observational_entropy(rho_se0, joint0)
    ds_obs_s = ent.observational_entropy(rho_s, CoarseGraining.fine(bst)) - ent.observational_entropy(
        rho_s0, CoarseGraining.fine(bs0)
    )
    ds_obs_e = ent.observational_entropy(rho_e, cg_e) - ent.observational_entropy(rho_e0, cg_e)
    sigma_local_closed = ds_obs_s + ds_obs_e
    i_c = ent.classical_mutual_information(table)

    mes_joint = _solve(coarse_population_constraints(joint_t, rho_se), opts)
    local_ops = [tensor(np.outer(bst[:, i], bst[:, i].conj()), np.eye(d_e)) for i in range(d_s)]
    local_ops += [tensor(np.eye(d_s), p) for p in cg_e.projectors]
    mes_local = _solve(ConstraintSet(d_s * d_e, tuple((op, expectation(op, rho_se)) for op in local_ops)), opts)
    sigma_joint = entropy_production(rho_se, mes_joint)
    sigma_local = entropy_production(rho_se, mes_local)
    gap = sigma_local - sigma_joint

    local_state = tensor(rho_s, cg_e.block_uniform_state(cg_e.probabilities(rho_e)))
    return ScenarioReport(
        "scenario_joint_coarse",
        inputs_digest(rho_se0, cg_e, u),
        quantities={
            "sigma_joint": sigma_joint,
            "sigma_local": sigma_local,
            "sigma_joint_closed": sigma_joint_closed,
            "sigma_local_closed": sigma_local_closed,
            "delta_S_obs_system": ds_obs_s,
            "delta_S_obs_environment": ds_obs_e,
            "gap": gap,
            "classical_mutual_information": i_c,
        },
        oracle_deltas={
            "sigma_joint": abs(sigma_joint - sigma_joint_closed),
            "sigma_local": abs(sigma_local - sigma_local_closed),
            "gap": abs(gap - i_c),
            "mes_state_joint": trace_distance(mes_joint.state, joint_t.block_uniform_state(joint_t.probabilities(rho_se))),
            "mes_state_local": trace_distance(mes_local.state, local_state),
        },
        converged=mes_joint.converged and mes_local.converged,
    )


# channels ----------------------------------------------------------------------


def dilation_entropy_change(ch: KrausChannel, rho) -> tuple[float, float]:
    """System entropy change through a channel, evaluated on its dilation.

    The joint output ``U (rho (x) |0><0|) U^dagger`` is compared with the
    product reference ``Lambda(rho) (x) |0><0|`` using the additive logarithm
    of a product, ``ln(a (x) b) = ln a (x) I + I (x) ln b``, with the log of
    the known pure ancilla taken on its support (where it vanishes).

    Returns:
        The entropy change and the largest elementwise deviation between
        the dilation's reduced output and the direct channel output.
    """
    dil = stinespring_dilation(ch)
    joint = dil.joint_output(rho)
    dims = (dil.system_dim, dil.ancilla_dim)
    sys_out = partial_trace(joint, dims, "S")
    anc_out = partial_trace(joint, dims, "E")
    direct = apply(ch, rho)
    value = (
        -ent.von_neumann_entropy(joint)
        + ent.cross_entropy(sys_out, direct, restrict_to_support=True)
        + ent.cross_entropy(anc_out, dil.ancilla_state(), restrict_to_support=True)
    )
    return value, float(np.max(np.abs(sys_out - direct)))


def scenario_one_to_one(ch: KrausChannel, rho, opts: SolverOptions | None = None) -> ScenarioReport:
    """Injective channel: zero entropy production, entropy change via the dilation.

    Full tomography of the output pulls back to a complete set of input
    constraints, so the max-entropy state is the input itself.
    """
    rho = density_matrix(rho)
    if ch.in_dim != ch.out_dim:
        raise UnsupportedError("one-to-one scenario needs a channel with equal input and output dimension")
    if not is_injective(ch):
        raise UnsupportedError(f"channel {ch.name!r} is not injective")
    mes = _solve(routed_tomography_constraints(ch, rho), opts)
    sigma = entropy_production(rho, mes)
    out = apply(ch, rho)
    direct_change = ent.von_neumann_entropy(out) - ent.von_neumann_entropy(rho)
    dilation_change, roundtrip = dilation_entropy_change(ch, rho)
    u = stinespring_dilation(ch).unitary
    return ScenarioReport(
        "scenario_one_to_one",
        inputs_digest(ch, rho),
        quantities={
            "sigma": sigma,
            "entropy_change_direct": direct_change,
            "entropy_change_dilation": dilation_change,
        },
        oracle_deltas={
            "sigma": sigma,
            "entropy_change_dilation": abs(dilation_change - direct_change),
            "mes_state": trace_distance(mes.state, rho),
            "dilation_roundtrip": roundtrip,
            "dilation_unitarity": float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))),
        },
        converged=mes.converged,
    )


def _channel_vs_measurement(scenario_id, ch, measurement_cs, rho, closed_sigma, closed_state, digest, opts):
    mes_channel = _solve(routed_tomography_constraints(ch, rho), opts)
    mes_measure = _solve(measurement_cs, opts)
    sigma_channel = entropy_production(rho, mes_channel)
    sigma_measure = entropy_production(rho, mes_measure)
    return ScenarioReport(
        scenario_id,
        digest,
        quantities={
            "sigma_channel": sigma_channel,
            "sigma_measurement": sigma_measure,
            "sigma_closed": closed_sigma,
        },
        oracle_deltas={
            "sigma_channel": abs(sigma_channel - closed_sigma),
            "sigma_measurement": abs(sigma_measure - closed_sigma),
            "channel_vs_measurement": abs(sigma_channel - sigma_measure),
            "mes_state_channel": trace_distance(mes_channel.state, closed_state),
            "mes_state_measurement": trace_distance(mes_measure.state, closed_state),
        },
        converged=mes_channel.converged and mes_measure.converged,
    )


def scenario_dephasing_channel(basis, rho, opts: SolverOptions | None = None) -> ScenarioReport:
    """Complete dephasing seen through output tomography versus a basis measurement.

    Both routes give the relative entropy of coherence ``S_A(rho) - S(rho)``.
    """
    b = orthonormal_basis(basis)
    rho = density_matrix(rho)
    closed = ent.diagonal_entropy(rho, b) - ent.von_neumann_entropy(rho)
    return _channel_vs_measurement(
        "scenario_dephasing_channel",
        dephasing_channel(b),
        population_constraints(b, rho),
        rho,
        closed,
        _dephased(rho, b),
        inputs_digest(b, rho),
        opts,
    )


def scenario_obs_channel(cg: CoarseGraining, rho, opts: SolverOptions | None = None) -> ScenarioReport:
    """Coarse-graining channel through output tomography versus a coarse measurement."""
    rho = density_matrix(rho)
    closed = ent.observational_entropy(rho, cg) - ent.von_neumann_entropy(rho)
    return _channel_vs_measurement(
        "scenario_obs_channel",
        coarse_graining_channel(cg),
        coarse_population_constraints(cg, rho),
        rho,
        closed,
        cg.block_uniform_state(cg.probabilities(rho)),
        inputs_digest(cg, rho),
        opts,
    )


def scenario_maxent(rho, cs: ConstraintSet, opts: SolverOptions | None = None) -> ScenarioReport:
    """Entropy production of ``rho`` for an arbitrary constraint set, solver only."""
    rho = density_matrix(rho)
    mes = _solve(cs, opts)
    sigma = entropy_production(rho, mes)
    return ScenarioReport(
        "scenario_maxent",
        inputs_digest(rho, [(op, t) for op, t in cs.direct], [(op, ch, t) for op, ch, t in cs.routed]),
        quantities={
            "sigma": sigma,
            "entropy_state": ent.von_neumann_entropy(rho),
            "entropy_mes": ent.von_neumann_entropy(mes.state),
            "log_partition": mes.log_partition,
            "iterations": float(mes.iterations),
        },
        oracle_deltas={
            # identity S(rho || mes) = S(mes) - S(rho) holds for exponential-family states
            "sigma": abs(sigma - (ent.von_neumann_entropy(mes.state) - ent.von_neumann_entropy(rho))),
            "max_residual": mes.max_residual,
            "reconstruction": float(np.max(np.abs(mes.reconstruct() - mes.state))),
        },
        converged=mes.converged,
    )


# registry ----------------------------------------------------------------------


@dataclass(frozen=True)
class ScenarioInfo:
    func: Callable[..., ScenarioReport]
    parameters: tuple
    anchor: str


REGISTRY: dict[str, ScenarioInfo] = {
    "scenario_fine_grained": ScenarioInfo(
        scenario_fine_grained,
        ("state", "evolution", "basis_schedule?"),
        "diagonal entropy production under unitary driving",
    ),
    "scenario_coarse_grained": ScenarioInfo(
        scenario_coarse_grained,
        ("state", "evolution", "coarse_graining_initial", "coarse_graining_final"),
        "observational entropy production under unitary driving",
    ),
    "scenario_open_system": ScenarioInfo(
        scenario_open_system,
        ("system_state", "environment_state", "unitary", "knowledge?", "environment_hamiltonian?"),
        "system-environment entropy production by environment knowledge grade",
    ),
    "scenario_joint_coarse": ScenarioInfo(
        scenario_joint_coarse,
        ("state", "environment_coarse_graining", "unitary"),
        "joint vs local coarse measurement, classical mutual information gap",
    ),
    "scenario_one_to_one": ScenarioInfo(
        scenario_one_to_one,
        ("channel", "state"),
        "one-to-one channels: zero production, entropy change via dilation",
    ),
    "scenario_dephasing_channel": ScenarioInfo(
        scenario_dephasing_channel,
        ("basis", "state"),
        "complete dephasing channel, relative entropy of coherence",
    ),
    "scenario_obs_channel": ScenarioInfo(
        scenario_obs_channel,
        ("coarse_graining", "state"),
        "coarse-graining channel, observational entropy production",
    ),
    "scenario_maxent": ScenarioInfo(
        scenario_maxent,
        ("state", "constraints"),
        "general max-entropy state and relative-entropy production",
    ),
}
