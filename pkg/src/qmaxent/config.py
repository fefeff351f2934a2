"""Declarative run configuration in YAML.

A configuration names the objects a run needs (operators, states, bases,
coarse-grainings, unitaries, channels, constraint sets) and lists the
scenarios to execute on them. Objects refer to each other by name, in any
order. Complex numbers are written as ``[re, im]`` pairs and matrices row by
row; a bare number is a real entry.

Validation collects every problem it finds, each tagged with its path in
the document and, where known, the line and column.
"""

from __future__ import annotations

import copy
import zlib
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import yaml

from .channels import (
    KrausChannel,
    coarse_graining_channel,
    dephasing_channel,
    identity_channel,
    named_one_to_one,
    unitary_channel,
)
from .errors import QMaxEntError
from .linalg import (
    PAULI,
    CoarseGraining,
    computational_basis,
    density_matrix,
    eig_hermitian,
    hermitian,
    is_unitary,
    orthonormal_basis,
    random_density,
    random_hermitian,
    random_unitary,
    tensor,
    thermal_state,
)
from .maxent import (
    CONSTRAINT_TOL,
    MAX_ITER,
    ConstraintSet,
    SolverOptions,
    coarse_population_constraints,
    energy_constraint,
    local_tomography_constraints,
    population_constraints,
    routed_tomography_constraints,
    tomography_constraints,
)
from .scenarios import KNOWLEDGE_GRADES, REGISTRY, SCENARIO_TOL, EvolutionSpec, propagate

SECTIONS = ("operators", "states", "bases", "coarse_grainings", "unitaries", "channels", "constraints")
TOP_LEVEL = ("seed", "output", "tolerances", "dims", *SECTIONS, "scenarios")

# scenario parameter -> section its value names
PARAM_SECTIONS = {
    "state": "states",
    "system_state": "states",
    "environment_state": "states",
    "unitary": "unitaries",
    "channel": "channels",
    "basis": "bases",
    "coarse_graining": "coarse_grainings",
    "coarse_graining_initial": "coarse_grainings",
    "coarse_graining_final": "coarse_grainings",
    "environment_coarse_graining": "coarse_grainings",
    "environment_hamiltonian": "operators",
}


@dataclass(frozen=True)
class ConfigIssue:
    path: str
    message: str
    line: int | None = None
    column: int | None = None

    def __str__(self) -> str:
        where = f" (line {self.line}, column {self.column})" if self.line is not None else ""
        return f"{self.path or '<root>'}{where}: {self.message}"


class ConfigError(QMaxEntError):
    """Raised with every validation issue found in a configuration."""

    def __init__(self, issues: list[ConfigIssue]):
        self.issues = list(issues)
        super().__init__("\n".join(str(i) for i in self.issues))


@dataclass
class ScenarioEntry:
    scenario_id: str
    name: str
    params: dict


@dataclass
class RunConfig:
    """Validated configuration with every named object built."""

    seed: int
    output_dir: str | None
    csv_name: str
    report_name: str
    constraint_tol: float
    scenario_tol: float
    max_iter: int
    dims: dict
    objects: dict  # section -> {name: value}
    scenarios: list
    raw: dict = field(repr=False, default_factory=dict)

    def solver_options(self) -> SolverOptions:
        return SolverOptions(constraint_tol=self.constraint_tol, max_iter=self.max_iter)


class _Issue(Exception):
    def __init__(self, path, message):
        super().__init__(message)
        self.path = path
        self.message = message


class _Broken(Exception):
    """A referenced object failed to build; its own error is already recorded."""


def _fmt_path(path) -> str:
    out = ""
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out


def _marks(node, path=(), out=None) -> dict:
    out = {} if out is None else out
    out[path] = (node.start_mark.line + 1, node.start_mark.column + 1)
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            key = k.value
            out.setdefault(path + (key,), (k.start_mark.line + 1, k.start_mark.column + 1))
            _marks(v, path + (key,), out)
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            _marks(v, path + (i,), out)
    return out


# scalar and literal readers ----------------------------------------------------


def _number(x, path, what="number") -> float:
    # YAML 1.1 reads "1e-9" as a string
    if isinstance(x, bool):
        raise _Issue(path, f"expected a {what}, got a boolean")
    if isinstance(x, (int, float)):
        return float(x)
    if isinstance(x, str):
        try:
            return float(x)
        except ValueError:
            pass
    raise _Issue(path, f"expected a {what}, got {x!r}")


def _int(x, path, what="integer") -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise _Issue(path, f"expected an {what}, got {x!r}")
    return x


def _complex(x, path) -> complex:
    if isinstance(x, list):
        if len(x) != 2:
            raise _Issue(path, "complex numbers are written as [re, im]")
        return complex(_number(x[0], path + (0,)), _number(x[1], path + (1,)))
    return complex(_number(x, path))


def _matrix(x, path) -> np.ndarray:
    if not isinstance(x, list) or not x or not all(isinstance(r, list) for r in x):
        raise _Issue(path, "a matrix is a non-empty list of rows")
    n = len(x[0])
    if any(len(r) != n for r in x):
        raise _Issue(path, "matrix rows have different lengths")
    return np.array([[_complex(v, path + (i, j)) for j, v in enumerate(r)] for i, r in enumerate(x)], dtype=complex)


def _vector(x, path) -> np.ndarray:
    if not isinstance(x, list) or not x:
        raise _Issue(path, "a vector is a non-empty list of entries")
    return np.array([_complex(v, path + (i,)) for i, v in enumerate(x)], dtype=complex)


def matrix_literal(a) -> list:
    """Inverse of the matrix reader: rows of ``[re, im]`` pairs."""
    a = np.asarray(a, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in a]


# builder -----------------------------------------------------------------------


class _Builder:
    def __init__(self, raw: dict, seed: int):
        self.raw = raw
        self.seed = seed
        self.built: dict[str, dict] = {s: {} for s in SECTIONS}
        self.broken: set = set()
        self.active: set = set()
        self.issues: list[tuple[tuple, str]] = []

    # references

    def ref(self, section, name, path):
        if not isinstance(name, str):
            raise _Issue(path, f"expected the name of an entry in '{section}', got {name!r}")
        key = (section, name)
        if key in self.broken:
            raise _Broken()
        if name in self.built[section]:
            return self.built[section][name]
        entries = self.raw.get(section) or {}
        if name not in entries:
            raise _Issue(path, f"unresolved reference: no entry {name!r} in '{section}'")
        if key in self.active:
            raise _Issue(path, f"circular reference through {section}.{name}")
        self.build(section, name)
        if key in self.broken:
            raise _Broken()
        return self.built[section][name]

    def build(self, section, name):
        key = (section, name)
        if name in self.built[section] or key in self.broken:
            return
        self.active.add(key)
        path = (section, name)
        try:
            spec = self.raw[section][name]
            value = getattr(self, "_" + section)(name, spec, path)
            self.built[section][name] = value
        except _Issue as e:
            self.issues.append((e.path, e.message))
            self.broken.add(key)
        except _Broken:
            self.broken.add(key)
        except QMaxEntError as e:
            self.issues.append((path, str(e)))
            self.broken.add(key)
        finally:
            self.active.discard(key)

    def dim(self, x, path) -> int:
        if isinstance(x, str):
            dims = self.raw.get("dims") or {}
            if x not in dims:
                raise _Issue(path, f"unresolved reference: no dimension {x!r} in 'dims'")
            x = dims[x]
        d = _int(x, path, "integer dimension")
        if d < 1:
            raise _Issue(path, "dimensions must be positive")
        return d

    def rng(self, section, name, spec) -> np.random.Generator:
        # independent stream per named object, stable under reordering
        local = spec.get("seed") if isinstance(spec, dict) else None
        key = zlib.crc32(f"{section}/{name}".encode())
        entropy = [self.seed, key] if local is None else [int(local), key]
        return np.random.default_rng(entropy)

    @staticmethod
    def form(spec, path, choices):
        if not isinstance(spec, dict) or not spec:
            raise _Issue(path, f"expected a mapping with one of {sorted(choices)}")
        found = [k for k in spec if k in choices]
        if len(found) != 1:
            raise _Issue(path, f"expected exactly one of {sorted(choices)}, found {found or sorted(spec)}")
        return found[0], spec[found[0]]

    def check_dim(self, value, spec, path, what):
        if isinstance(spec, dict) and "dim" in spec:
            want = self.dim(spec["dim"], path + ("dim",))
            if value.shape[0] != want:
                raise _Issue(path, f"dimension mismatch: {what} has dimension {value.shape[0]}, declared {want}")
        return value

    # sections

    def _operators(self, name, spec, path):
        kind, v = self.form(spec, path, {"matrix", "pauli", "diag", "tensor", "sum", "random"})
        p = path + (kind,)
        if kind == "matrix":
            m = _matrix(v, p)
            if m.shape[0] != m.shape[1]:
                raise _Issue(p, "operator matrix is not square")
            asym = float(np.max(np.abs(m - m.conj().T)))
            if asym > 1e-8:
                raise _Issue(p, f"non-Hermitian literal (asymmetry {asym:.3e})")
            op = hermitian(m)
        elif kind == "pauli":
            if v not in PAULI:
                raise _Issue(p, f"unknown Pauli label {v!r}; choose from {sorted(PAULI)}")
            op = PAULI[v].astype(complex)
        elif kind == "diag":
            if not isinstance(v, list) or not v:
                raise _Issue(p, "diag takes a non-empty list of reals")
            op = np.diag([_number(x, p + (i,)) for i, x in enumerate(v)]).astype(complex)
        elif kind == "tensor":
            op = self._tensor("operators", v, p)
        elif kind == "sum":
            op = self._sum(v, p)
        else:
            v = v if isinstance(v, dict) else {"dim": v}
            d = self.dim(v.get("dim"), p + ("dim",))
            scale = _number(v.get("scale", 1.0), p + ("scale",))
            op = random_hermitian(d, self.rng("operators", name, v), scale)
        return self.check_dim(op, spec, path, "operator")

    def _tensor(self, section, names, path):
        if not isinstance(names, list) or len(names) < 2:
            raise _Issue(path, "tensor takes a list of at least two names")
        out = self.ref(section, names[0], path + (0,))
        for i, n in enumerate(names[1:], 1):
            out = tensor(out, self.ref(section, n, path + (i,)))
        return out

    def _sum(self, terms, path):
        if not isinstance(terms, list) or not terms:
            raise _Issue(path, "sum takes a list of [coefficient, operator] terms")
        total = None
        for i, t in enumerate(terms):
            if not isinstance(t, list) or len(t) != 2:
                raise _Issue(path + (i,), "each sum term is [coefficient, operator]")
            c = _number(t[0], path + (i, 0))
            op = self.ref("operators", t[1], path + (i, 1))
            if total is not None and op.shape != total.shape:
                raise _Issue(path + (i,), f"dimension mismatch: {op.shape[0]} vs {total.shape[0]}")
            total = c * op if total is None else total + c * op
        return total

    def _states(self, name, spec, path):
        kind, v = self.form(spec, path, {"matrix", "pure", "thermal", "maximally_mixed", "random", "diag", "tensor"})
        p = path + (kind,)
        if kind == "matrix":
            rho = density_matrix(_matrix(v, p), name=f"state {name!r}")
        elif kind == "pure":
            psi = _vector(v, p)
            norm = np.linalg.norm(psi)
            if norm < 1e-12:
                raise _Issue(p, "zero vector")
            psi = psi / norm
            rho = np.outer(psi, psi.conj())
        elif kind == "thermal":
            if not isinstance(v, dict) or "hamiltonian" not in v or "beta" not in v:
                raise _Issue(p, "thermal needs 'hamiltonian' and 'beta'")
            h = self.ref("operators", v["hamiltonian"], p + ("hamiltonian",))
            rho = thermal_state(h, _number(v["beta"], p + ("beta",)))
        elif kind == "maximally_mixed":
            d = self.dim(v, p)
            rho = np.eye(d, dtype=complex) / d
        elif kind == "random":
            v = v if isinstance(v, dict) else {"dim": v}
            d = self.dim(v.get("dim"), p + ("dim",))
            rank = v.get("rank")
            if rank is not None:
                rank = _int(rank, p + ("rank",))
                if not 1 <= rank <= d:
                    raise _Issue(p + ("rank",), f"rank must lie in [1, {d}]")
            rho = random_density(d, self.rng("states", name, v), rank)
        elif kind == "diag":
            if not isinstance(v, list) or not v:
                raise _Issue(p, "diag takes a list of populations")
            rho = density_matrix(np.diag([_number(x, p + (i,)) for i, x in enumerate(v)]), name=f"state {name!r}")
        else:
            rho = self._tensor("states", v, p)
        return self.check_dim(rho, spec, path, "state")

    def _bases(self, name, spec, path):
        kind, v = self.form(spec, path, {"computational", "eigenbasis", "matrix", "tensor"})
        p = path + (kind,)
        if kind == "computational":
            b = computational_basis(self.dim(v, p))
        elif kind == "eigenbasis":
            b = eig_hermitian(self.ref("operators", v, p)).eigenvectors
        elif kind == "matrix":
            b = orthonormal_basis(_matrix(v, p))
        else:
            b = self._tensor("bases", v, p)
        return self.check_dim(b, spec, path, "basis")

    def _coarse_grainings(self, name, spec, path):
        kind, v = self.form(spec, path, {"basis", "fine", "tensor"})
        p = path + (kind,)
        if kind == "fine":
            return CoarseGraining.fine(self.ref("bases", v, p))
        if kind == "tensor":
            if not isinstance(v, list) or len(v) != 2:
                raise _Issue(p, "tensor takes two coarse-graining names")
            return self.ref("coarse_grainings", v[0], p + (0,)).tensor(self.ref("coarse_grainings", v[1], p + (1,)))
        b = self.ref("bases", v, p)
        blocks = spec.get("blocks")
        if not isinstance(blocks, list) or not blocks:
            raise _Issue(path + ("blocks",), "coarse-graining needs a non-empty 'blocks' list of sizes")
        sizes = [_int(x, path + ("blocks", i), "block size") for i, x in enumerate(blocks)]
        if sum(sizes) != b.shape[1] or min(sizes) < 1:
            raise _Issue(path + ("blocks",), f"dimension mismatch: block sizes {sizes} do not partition {b.shape[1]}")
        return CoarseGraining.from_basis(b, sizes)

    def _unitaries(self, name, spec, path):
        kind, v = self.form(spec, path, {"matrix", "random", "identity", "gate", "evolution", "tensor"})
        p = path + (kind,)
        if kind == "matrix":
            u = _matrix(v, p)
            if u.shape[0] != u.shape[1] or not is_unitary(u):
                raise _Issue(p, "matrix is not unitary")
        elif kind == "random":
            v = v if isinstance(v, dict) else {"dim": v}
            u = random_unitary(self.dim(v.get("dim"), p + ("dim",)), self.rng("unitaries", name, v))
        elif kind == "identity":
            u = np.eye(self.dim(v, p), dtype=complex)
        elif kind == "gate":
            gates = {
                "cnot": np.eye(4)[[0, 1, 3, 2]],
                "swap": np.eye(4)[[0, 2, 1, 3]],
                "hadamard": np.array([[1, 1], [1, -1]]) / np.sqrt(2),
            }
            if v not in gates:
                raise _Issue(p, f"unknown gate {v!r}; choose from {sorted(gates)}")
            u = gates[v].astype(complex)
        elif kind == "evolution":
            u = propagate(self.evolution(v, p))
        else:
            u = self._tensor("unitaries", v, p)
        return self.check_dim(u, spec, path, "unitary")

    def evolution(self, v, path) -> EvolutionSpec:
        if not isinstance(v, dict) or "schedule" not in v or "total_time" not in v:
            raise _Issue(path, "an evolution needs 'schedule' and 'total_time'")
        sched = v["schedule"]
        if not isinstance(sched, list) or not sched:
            raise _Issue(path + ("schedule",), "schedule is a list of [time, hamiltonian] points")
        points = []
        for i, item in enumerate(sched):
            if not isinstance(item, list) or len(item) != 2:
                raise _Issue(path + ("schedule", i), "each schedule point is [time, hamiltonian]")
            points.append((_number(item[0], path + ("schedule", i, 0)), self.ref("operators", item[1], path + ("schedule", i, 1))))
        if len({h.shape for _, h in points}) != 1:
            raise _Issue(path + ("schedule",), "dimension mismatch between schedule Hamiltonians")
        steps = _int(v.get("steps", 256), path + ("steps",))
        try:
            return EvolutionSpec(tuple(points), _number(v["total_time"], path + ("total_time",)), steps)
        except QMaxEntError as e:
            raise _Issue(path, str(e)) from None

    def _channels(self, name, spec, path):
        kind, v = self.form(spec, path, {"named", "kraus", "dephasing", "coarse_graining", "unitary", "identity"})
        p = path + (kind,)
        if kind == "named":
            return named_one_to_one(v, _number(spec.get("param", 0.0), path + ("param",)))
        if kind == "kraus":
            if not isinstance(v, list) or not v:
                raise _Issue(p, "kraus takes a non-empty list of matrices")
            return KrausChannel(tuple(_matrix(k, p + (i,)) for i, k in enumerate(v)), name=name)
        if kind == "dephasing":
            return dephasing_channel(self.ref("bases", v, p))
        if kind == "coarse_graining":
            return coarse_graining_channel(self.ref("coarse_grainings", v, p))
        if kind == "unitary":
            return unitary_channel(self.ref("unitaries", v, p))
        return identity_channel(self.dim(v, p))

    def _constraints(self, name, spec, path):
        kind, v = self.form(spec, path, {"preset", "literal"})
        if kind == "preset":
            return self._preset(v, spec, path)
        if not isinstance(v, list) or not v:
            raise _Issue(path + ("literal",), "literal takes a list of {operator, target | state, channel?}")
        direct, routed = [], []
        dim = None
        for i, item in enumerate(v):
            p = path + ("literal", i)
            if not isinstance(item, dict) or "operator" not in item:
                raise _Issue(p, "each literal constraint needs an 'operator'")
            op = self.ref("operators", item["operator"], p + ("operator",))
            ch = self.ref("channels", item["channel"], p + ("channel",)) if "channel" in item else None
            if ch is not None and ch.out_dim != op.shape[0]:
                raise _Issue(p, f"dimension mismatch: operator {op.shape[0]} vs channel output {ch.out_dim}")
            in_dim = ch.in_dim if ch is not None else op.shape[0]
            if dim is not None and in_dim != dim:
                raise _Issue(p, f"dimension mismatch: {in_dim} vs {dim}")
            dim = in_dim
            t = self._target(item, op, ch, p)
            (routed.append((op, ch, t)) if ch is not None else direct.append((op, t)))
        return ConstraintSet(dim, tuple(direct), tuple(routed))

    def _target(self, item, op, ch, path):
        has_t, has_s = "target" in item, "state" in item
        if has_t == has_s:
            raise _Issue(path, "give exactly one of 'target' or 'state'")
        if has_t:
            return _number(item["target"], path + ("target",))
        rho = self.ref("states", item["state"], path + ("state",))
        if ch is not None:
            if rho.shape[0] != ch.in_dim:
                raise _Issue(path + ("state",), f"dimension mismatch: state {rho.shape[0]} vs channel input {ch.in_dim}")
            rho = ch(rho)
        if rho.shape != op.shape:
            raise _Issue(path + ("state",), f"dimension mismatch: state {rho.shape[0]} vs operator {op.shape[0]}")
        return float(np.real(np.trace(op @ rho)))

    def _preset(self, kind, spec, path):
        def need(key, section):
            if key not in spec:
                raise _Issue(path, f"preset {kind!r} needs {key!r}")
            return self.ref(section, spec[key], path + (key,))

        def same_dim(a, b, what):
            if a.shape[0] != b.shape[0]:
                raise _Issue(path, f"dimension mismatch: {what} ({a.shape[0]} vs {b.shape[0]})")

        if kind == "population":
            b, rho = need("basis", "bases"), need("state", "states")
            same_dim(b, rho, "basis vs state")
            return population_constraints(b, rho)
        if kind == "coarse_population":
            cg, rho = need("coarse_graining", "coarse_grainings"), need("state", "states")
            if cg.dim != rho.shape[0]:
                raise _Issue(path, f"dimension mismatch: coarse-graining {cg.dim} vs state {rho.shape[0]}")
            return coarse_population_constraints(cg, rho)
        if kind == "energy":
            h = need("hamiltonian", "operators")
            t = self._target(spec, h, None, path)
            return energy_constraint(h, t)
        if kind == "tomography":
            rho = need("state", "states")
            if "channel" in spec:
                ch = need("channel", "channels")
                if ch.in_dim != rho.shape[0]:
                    raise _Issue(path, f"dimension mismatch: channel input {ch.in_dim} vs state {rho.shape[0]}")
                return routed_tomography_constraints(ch, rho)
            return tomography_constraints(rho)
        if kind == "local_tomography":
            rho = need("state", "states")
            dims_raw = spec.get("dims")
            if not isinstance(dims_raw, list) or len(dims_raw) != 2:
                raise _Issue(path + ("dims",), "local_tomography needs dims: [d_S, d_E]")
            dims = [self.dim(x, path + ("dims", i)) for i, x in enumerate(dims_raw)]
            sub = spec.get("subsystem", "S")
            if sub not in ("S", "E"):
                raise _Issue(path + ("subsystem",), "subsystem is 'S' or 'E'")
            if rho.shape[0] != dims[0 if sub == "S" else 1]:
                raise _Issue(path, f"dimension mismatch: local state {rho.shape[0]} vs subsystem {sub}")
            return local_tomography_constraints(rho, dims, sub)
        raise _Issue(
            path + ("preset",),
            f"unknown preset {kind!r}; choose from ['coarse_population', 'energy', 'local_tomography', "
            "'population', 'tomography']",
        )

    # scenarios

    def scenario(self, i, entry):
        path = ("scenarios", i)
        if not isinstance(entry, dict) or "id" not in entry:
            raise _Issue(path, "each scenario needs an 'id'")
        sid = entry["id"]
        if sid not in REGISTRY:
            raise _Issue(path + ("id",), f"unknown scenario {sid!r}; see 'qmaxent list'")
        extra = set(entry) - {"id", "name", "params"}
        if extra:
            raise _Issue(path, f"unknown keys {sorted(extra)}")
        params = entry.get("params") or {}
        if not isinstance(params, dict):
            raise _Issue(path + ("params",), "params must be a mapping")
        declared = REGISTRY[sid].parameters
        required = {p for p in declared if not p.endswith("?")}
        allowed = {p.rstrip("?") for p in declared}
        issues = []
        for p in sorted(required - set(params)):
            issues.append((path + ("params",), f"missing parameter {p!r} for {sid}"))
        for p in sorted(set(params) - allowed):
            issues.append((path + ("params", p), f"unknown parameter for {sid}; expected {sorted(allowed)}"))
        resolved = {}
        for key, value in params.items():
            if key not in allowed:
                continue
            p = path + ("params", key)
            try:
                resolved[key] = self.param(key, value, p)
            except _Issue as e:
                issues.append((e.path, e.message))
            except _Broken:
                issues.append((p, f"references {value!r}, which failed to build"))
            except QMaxEntError as e:
                issues.append((p, str(e)))
        if issues:
            self.issues.extend(issues)
            return None
        name = entry.get("name", f"{sid}#{i}")
        if not isinstance(name, str):
            raise _Issue(path + ("name",), "name must be a string")
        try:
            self.scenario_dims(sid, resolved, path)
        except _Issue as e:
            self.issues.append((e.path, e.message))
            return None
        return ScenarioEntry(sid, name, resolved)

    def param(self, key, value, path):
        if key in PARAM_SECTIONS:
            return self.ref(PARAM_SECTIONS[key], value, path)
        if key == "evolution":
            return self.evolution(value, path)
        if key == "basis_schedule":
            if not isinstance(value, list) or len(value) != 2:
                raise _Issue(path, "basis_schedule is [initial_basis, final_basis]")
            return tuple(self.ref("bases", v, path + (i,)) for i, v in enumerate(value))
        if key == "knowledge":
            grades = [value] if isinstance(value, str) else value
            if not isinstance(grades, list) or not grades:
                raise _Issue(path, "knowledge is a grade or list of grades")
            for j, g in enumerate(grades):
                if g not in KNOWLEDGE_GRADES:
                    raise _Issue(path + (j,) if isinstance(value, list) else path, f"unknown knowledge grade {g!r}; choose from {list(KNOWLEDGE_GRADES)}")
            return tuple(grades)
        if key == "constraints":
            names = [value] if isinstance(value, str) else value
            if not isinstance(names, list) or not names:
                raise _Issue(path, "constraints is a name or list of names")
            sets = [self.ref("constraints", n, path + (j,) if isinstance(value, list) else path) for j, n in enumerate(names)]
            total = sets[0]
            for s in sets[1:]:
                if s.dim != total.dim:
                    raise _Issue(path, f"dimension mismatch between constraint sets ({s.dim} vs {total.dim})")
                total = total + s
            return total
        raise _Issue(path, f"unknown parameter {key!r}")

    def scenario_dims(self, sid, p, path):
        def d(x):
            return x.dim if isinstance(x, (CoarseGraining, EvolutionSpec, ConstraintSet)) else x.shape[0]

        def match(a, b):
            if a in p and b in p:
                da = p[a].in_dim if isinstance(p[a], KrausChannel) else d(p[a])
                db = d(p[b])
                if da != db:
                    raise _Issue(path + ("params",), f"dimension mismatch: {a} is {da}-dimensional, {b} is {db}")

        match("state", "evolution")
        match("state", "basis")
        match("state", "coarse_graining")
        match("state", "coarse_graining_initial")
        match("state", "coarse_graining_final")
        match("channel", "state")
        match("state", "constraints")
        match("environment_state", "environment_hamiltonian")
        if "basis_schedule" in p and "state" in p:
            for b in p["basis_schedule"]:
                if b.shape[0] != d(p["state"]):
                    raise _Issue(path + ("params", "basis_schedule"), "dimension mismatch with the state")
        if sid == "scenario_open_system" and {"system_state", "environment_state", "unitary"} <= set(p):
            n = d(p["system_state"]) * d(p["environment_state"])
            if d(p["unitary"]) != n:
                raise _Issue(path + ("params", "unitary"), f"dimension mismatch: unitary {d(p['unitary'])} vs S (x) E {n}")
        if sid == "scenario_joint_coarse" and {"state", "unitary", "environment_coarse_graining"} <= set(p):
            n, de = d(p["state"]), p["environment_coarse_graining"].dim
            if d(p["unitary"]) != n or n % de:
                raise _Issue(path + ("params",), "dimension mismatch between state, unitary and environment coarse-graining")


def parse_config(text: str, seed: int | None = None) -> RunConfig:
    """Parse and validate configuration text.

    Args:
        text: YAML document.
        seed: overrides the document's ``seed``.

    Returns:
        The validated :class:`RunConfig`.

    Raises:
        ConfigError: with every issue found, each naming its path.
    """
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        raw = yaml.safe_load(text)
    except yaml.MarkedYAMLError as e:
        mark = e.problem_mark
        line, col = (mark.line + 1, mark.column + 1) if mark is not None else (None, None)
        raise ConfigError([ConfigIssue("", f"syntax error: {e.problem}", line, col)]) from None
    except yaml.YAMLError as e:
        raise ConfigError([ConfigIssue("", f"syntax error: {e}")]) from None
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError([ConfigIssue("", "the document must be a mapping")])
    marks = _marks(node) if node is not None else {}

    issues: list[tuple[tuple, str]] = []
    for k in raw:
        if k not in TOP_LEVEL:
            issues.append(((k,), f"unknown section; expected one of {list(TOP_LEVEL)}"))
    if seed is None:
        seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        issues.append((("seed",), "seed must be a non-negative integer"))
        seed = 0
    out = raw.get("output") or {}
    if not isinstance(out, dict):
        issues.append((("output",), "output must be a mapping"))
        out = {}
    tol = raw.get("tolerances") or {}
    if not isinstance(tol, dict):
        issues.append((("tolerances",), "tolerances must be a mapping"))
        tol = {}
    for k in tol:
        if k not in ("constraint", "scenario", "max_iter"):
            issues.append((("tolerances", k), "unknown tolerance; expected constraint, scenario or max_iter"))

    def setting(path, default, kind=float):
        node_ = raw
        for k in path:
            node_ = node_.get(k) if isinstance(node_, dict) else None
            if node_ is None:
                return default
        try:
            v = _int(node_, path) if kind is int else _number(node_, path)
        except _Issue as e:
            issues.append((e.path, e.message))
            return default
        if v < 0 or (kind is float and v == 0):
            issues.append((path, "must be positive"))
            return default
        return v

    constraint_tol = setting(("tolerances", "constraint"), CONSTRAINT_TOL)
    scenario_tol = setting(("tolerances", "scenario"), SCENARIO_TOL)
    max_iter = setting(("tolerances", "max_iter"), MAX_ITER, int)

    dims = raw.get("dims") or {}
    if not isinstance(dims, dict):
        issues.append((("dims",), "dims must be a mapping of names to integers"))
        dims = {}
        raw["dims"] = {}
    for k, v in dims.items():
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            issues.append((("dims", k), "dimension must be a positive integer"))

    b = _Builder(raw, seed)
    for section in SECTIONS:
        entries = raw.get(section)
        if entries is None:
            continue
        if not isinstance(entries, dict):
            issues.append(((section,), "section must be a mapping of names to entries"))
            raw[section] = {}
            continue
        for name in entries:
            b.build(section, name)
    scenarios = []
    sc = raw.get("scenarios")
    if sc is None or sc == []:
        issues.append((("scenarios",), "at least one scenario is required"))
    elif not isinstance(sc, list):
        issues.append((("scenarios",), "scenarios must be a list"))
    else:
        for i, entry in enumerate(sc):
            try:
                s = b.scenario(i, entry)
            except _Issue as e:
                b.issues.append((e.path, e.message))
                continue
            if s is not None:
                scenarios.append(s)
        names = [s.name for s in scenarios]
        for n in sorted({n for n in names if names.count(n) > 1}):
            issues.append((("scenarios",), f"duplicate scenario name {n!r}"))

    issues.extend(b.issues)
    if issues:
        out_issues = []
        seen = set()
        for path, msg in issues:
            if (path, msg) in seen:
                continue
            seen.add((path, msg))
            mark = None
            for cut in range(len(path), -1, -1):
                mark = marks.get(tuple(path[:cut]))
                if mark:
                    break
            line, col = mark if mark else (None, None)
            out_issues.append(ConfigIssue(_fmt_path(path), msg, line, col))
        raise ConfigError(out_issues)

    return RunConfig(
        seed=seed,
        output_dir=out.get("dir"),
        csv_name=str(out.get("csv", "results.csv")),
        report_name=str(out.get("report", "reports.json")),
        constraint_tol=constraint_tol,
        scenario_tol=scenario_tol,
        max_iter=max_iter,
        dims=dict(dims),
        objects=b.built,
        scenarios=scenarios,
        raw=raw,
    )


def _normalize(spec: Any, path: tuple) -> Any:
    # rewrite matrix and vector literals as exact [re, im] pairs
    if isinstance(spec, dict):
        out = {}
        for k, v in spec.items():
            if k in ("matrix",) and isinstance(v, list):
                out[k] = matrix_literal(_matrix(v, path + (k,)))
            elif k == "pure" and isinstance(v, list):
                out[k] = [[float(z.real), float(z.imag)] for z in _vector(v, path + (k,))]
            elif k == "kraus" and isinstance(v, list):
                out[k] = [matrix_literal(_matrix(m, path + (k, i))) for i, m in enumerate(v)]
            else:
                out[k] = _normalize(v, path + (k,))
        return out
    if isinstance(spec, list):
        return [_normalize(v, path + (i,)) for i, v in enumerate(spec)]
    return spec


def emit_config(cfg: RunConfig) -> str:
    """Serialize a parsed configuration back to YAML.

    Literals come out as ``[re, im]`` pairs, so parsing the result yields
    bit-identical matrices.
    """
    raw = copy.deepcopy(cfg.raw)
    raw["seed"] = cfg.seed
    return yaml.safe_dump(_normalize(raw, ()), sort_keys=False, default_flow_style=None)
