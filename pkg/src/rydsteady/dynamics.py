"""Master-equation time evolution and direct steady-state solution.

Two integration engines share the same steppers:

  * a matrix engine evaluating ``-i[H, rho] + sum_n (L_n rho L_n^+
    - {L_n^+ L_n, rho}/2)`` with sparse products, never forming a
    superoperator;
  * for three identical atoms, a reduced engine that vectorizes the
    generator on the atom-permutation-symmetric operator sector
    (46656 -> 8436 coordinates), used automatically when the initial
    state is permutation symmetric.

Steppers: fixed-step classical RK4 (with a conservative stability guard)
and an embedded Dormand-Prince 5(4) pair with PI step-size control for
stiff long-horizon runs.  Both are deterministic: identical inputs give
bit-identical observable streams.

Solvers accept either a :class:`~rydsteady.model.ModelSpec` or a raw
:class:`System` of (Hamiltonian, collapse operators).
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from . import model
from .opalg import (DensityMatrix, Operator, liouvillian_matrix, unvec, vec)

RK4_GUARD = 0.05           # dt <= RK4_GUARD / (max |diag H| + decay scale)
TRACE_DRIFT_FAIL = 1e-6    # per-observation drift that signals instability
RCOND_DEGENERATE = 1e-12
STEADY_RESIDUAL_MAX = 1e-10
EIG_CLIP = 1e-8


class SolverError(RuntimeError):
    """Steady-state or trajectory solver failed its numerical contract."""


@dataclass(frozen=True)
class System:
    """A bare open system: Hamiltonian plus collapse operators."""

    h: Operator
    collapse: tuple

    def __post_init__(self):
        object.__setattr__(self, "collapse", tuple(self.collapse))
        for lop in self.collapse:
            if lop.dims != self.h.dims:
                raise ValueError(
                    f"collapse dims {lop.dims} do not match H dims {self.h.dims}"
                )

    @property
    def dims(self):
        return self.h.dims

    @property
    def dim(self) -> int:
        return self.h.dim


def _as_system(obj) -> tuple[System, object]:
    """Normalize a ModelSpec or System input; returns (system, spec-or-None)."""
    if isinstance(obj, model.ModelSpec):
        return System(model.hamiltonian(obj),
                      tuple(model.collapse_ops(obj))), obj
    if isinstance(obj, System):
        return obj, None
    raise TypeError(f"expected ModelSpec or System, got {type(obj).__name__}")


@dataclass(frozen=True)
class StepperConfig:
    """Integration settings.

    ``rk4-fixed`` uses step ``dt`` (auto-chosen from the stability guard
    when omitted); ``rk-adaptive`` is Dormand-Prince 5(4) with weighted-rms
    error control at (rel_tol, abs_tol).
    """

    kind: str = "rk-adaptive"
    dt: float | None = None
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_steps: int = 20_000_000

    def __post_init__(self):
        if self.kind not in ("rk4-fixed", "rk-adaptive"):
            raise ValueError(f"unknown stepper kind {self.kind!r}")
        if self.dt is not None and not self.dt > 0:
            raise ValueError("dt must be positive")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")


@dataclass
class TrajectoryRecord:
    """Time-stamped observable rows plus the final state."""

    times: np.ndarray                 # us, strictly increasing
    observables: dict                 # name -> real array, one entry per time
    final_state: DensityMatrix
    meta: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return self.observables[name]


# ---------------------------------------------------------------------------
# Right-hand side engines
# ---------------------------------------------------------------------------

def lindblad_rhs(h: Operator, collapse, rho) -> Operator:
    """One evaluation of the generator, matrix-free (sparse products only)."""
    if isinstance(rho, DensityMatrix):
        mat, dims = rho.matrix, rho.dims
    elif isinstance(rho, Operator):
        mat, dims = rho.to_dense(), rho.dims
    else:
        raise TypeError("rho must be an Operator or DensityMatrix")
    if h.dims != dims:
        raise ValueError(f"dimension mismatch: H dims {h.dims}, rho dims {dims}")
    for lop in collapse:
        if lop.dims != dims:
            raise ValueError(f"dimension mismatch: collapse dims {lop.dims}")
    hs = h.to_sparse()
    kay = None
    for lop in collapse:
        ls = lop.to_sparse()
        ldl = ls.conj().T @ ls
        kay = ldl if kay is None else kay + ldl
    a = (-1j) * hs if kay is None else (-1j) * hs - 0.5 * kay.tocsr()
    out = a @ mat
    out += (a @ mat.conj().T).conj().T
    for lop in collapse:
        ls = lop.to_sparse()
        b = ls @ mat
        out += (ls @ b.conj().T).conj().T
    return Operator(out, dims, storage="dense")


def _fast_jump_indep(atoms: int, scale: float):
    """rho-space jump term for per-channel decay: block moves on the
    reshaped (6,)*2*atoms tensor instead of 9*atoms sparse products."""
    sels = []
    for n in range(atoms):
        for exc in (3, 4, 5):
            src = [slice(None)] * (2 * atoms)
            src[n] = exc
            src[atoms + n] = exc
            tgts = []
            for g in (0, 1, 2):
                t = [slice(None)] * (2 * atoms)
                t[n] = g
                t[atoms + n] = g
                tgts.append(tuple(t))
            sels.append((tuple(src), tgts))

    shape = (6,) * (2 * atoms)

    def apply(rho, out):
        rt = rho.reshape(shape)
        ot = out.reshape(shape)
        for src, tgts in sels:
            blk = scale * rt[src]
            for t in tgts:
                ot[t] += blk

    return apply


def _fast_jump_coherent(atoms: int, scale: float):
    """Jump term when the three decay paths into one ground level add
    coherently: the full excited 3x3 block collapses onto each target."""
    shape = (6,) * (2 * atoms)
    sels = []
    for n in range(atoms):
        src = [slice(None)] * (2 * atoms)
        src[n] = slice(3, 6)
        src[atoms + n] = slice(3, 6)
        tgts = []
        for g in (0, 1, 2):
            t = [slice(None)] * (2 * atoms)
            t[n] = g
            t[atoms + n] = g
            tgts.append(tuple(t))
        sels.append((n, tuple(src), tgts))

    def apply(rho, out):
        rt = rho.reshape(shape)
        ot = out.reshape(shape)
        for n, src, tgts in sels:
            blk = scale * rt[src].sum(axis=(n, atoms + n))
            for t in tgts:
                ot[t] += blk

    return apply


class _MatrixEngine:
    """RHS on the density matrix itself; states flattened only for steppers."""

    def __init__(self, system: System, spec: model.ModelSpec | None = None):
        self.dim = system.dim
        kay = None
        for lop in system.collapse:
            m = lop.to_sparse()
            ldl = m.conj().T @ m
            kay = ldl if kay is None else kay + ldl
        a = (-1j) * system.h.to_sparse()
        if kay is not None:
            a = a - 0.5 * kay
        # dense BLAS wins below the sparse-storage threshold
        dense = self.dim <= 64
        self._a = a.toarray() if dense else sp.csr_array(a)
        self._jumps = None
        self._lops = [lop.to_dense() if dense else lop.to_sparse()
                      for lop in system.collapse]
        if spec is not None:
            scale = spec.gamma / 3.0
            if spec.collapse_variant == "independent":
                self._jumps = _fast_jump_indep(spec.atoms, scale)
            elif spec.collapse_variant == "coherent-sum":
                self._jumps = _fast_jump_coherent(spec.atoms, scale)

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        out = self._a @ rho
        out += (self._a @ rho.conj().T).conj().T
        if self._jumps is not None:
            self._jumps(rho, out)
        else:
            for ls in self._lops:
                b = ls @ rho
                out += (ls @ b.conj().T).conj().T
        return out

    def encode(self, rho: np.ndarray) -> np.ndarray:
        return rho.ravel().copy()

    def decode(self, y: np.ndarray) -> np.ndarray:
        return y.reshape(self.dim, self.dim)

    def rhs_flat(self, y: np.ndarray) -> np.ndarray:
        return self.rhs(y.reshape(self.dim, self.dim)).ravel()


def _atom_permutation_index_maps(atoms: int) -> list[np.ndarray]:
    """Basis-index maps for every atom permutation."""
    dim = model.N_LEVELS**atoms
    digits = np.array(
        [[(i // model.N_LEVELS**(atoms - 1 - k)) % model.N_LEVELS
          for k in range(atoms)] for i in range(dim)]
    )
    maps = []
    for perm in itertools.permutations(range(atoms)):
        permuted = digits[:, list(perm)]
        idx = np.zeros(dim, dtype=np.int64)
        for k in range(atoms):
            idx = idx * model.N_LEVELS + permuted[:, k]
        maps.append(idx)
    return maps


def symmetric_sector_basis(atoms: int) -> sp.csr_array:
    """Isometry Q from the permutation-symmetric operator sector to the
    full vec'd operator space (column-stacking).  Columns are normalized
    orbit sums of vec-basis elements; Q^T Q = I.
    """
    dim = model.N_LEVELS**atoms
    maps = _atom_permutation_index_maps(atoms)
    m = np.arange(dim * dim, dtype=np.int64)
    rows = m % dim
    cols = m // dim
    images = np.stack([p[cols] * dim + p[rows] for p in maps])
    reps = images.min(axis=0)
    uniq, orbit_of, counts = np.unique(reps, return_inverse=True,
                                       return_counts=True)
    weights = 1.0 / np.sqrt(counts[orbit_of])
    return sp.csr_array(
        sp.coo_array((weights, (m, orbit_of)), shape=(dim * dim, uniq.size))
    )


class _ReducedEngine:
    """Vectorized generator restricted to the permutation-symmetric sector.

    Valid whenever the model is atom-exchange symmetric (guaranteed by the
    ModelSpec structure) and the initial state is too.
    """

    def __init__(self, system: System, atoms: int):
        self.dim = system.dim
        s = liouvillian_matrix(system.h, system.collapse).data
        if not sp.issparse(s):
            s = sp.csr_array(s)
        self._q = symmetric_sector_basis(atoms)
        self._qt = sp.csr_array(self._q.T)
        self._s_red = sp.csr_array(self._qt @ (s @ self._q))

    @property
    def reduced_dim(self) -> int:
        return self._s_red.shape[0]

    def encode(self, rho: np.ndarray) -> np.ndarray:
        return self._qt @ vec(rho)

    def decode(self, y: np.ndarray) -> np.ndarray:
        return unvec(self._q @ y, self.dim)

    def rhs_flat(self, y: np.ndarray) -> np.ndarray:
        return self._s_red @ y


def is_permutation_symmetric(rho: np.ndarray, atoms: int,
                             tol: float = 1e-12) -> bool:
    maps = _atom_permutation_index_maps(atoms)
    for idx in maps[1:]:
        if np.abs(rho[np.ix_(idx, idx)] - rho).max() > tol:
            return False
    return True


def build_engine(spec_or_system, rho0: np.ndarray | None = None,
                 use_symmetry: bool | None = None):
    """Pick the RHS engine.  The reduced path needs a 3-atom ModelSpec and a
    permutation-symmetric initial state; ``use_symmetry`` forces it on/off.
    """
    system, spec = _as_system(spec_or_system)
    if use_symmetry is None:
        use_symmetry = (
            spec is not None and spec.atoms == 3 and rho0 is not None
            and is_permutation_symmetric(rho0, spec.atoms)
        )
    if use_symmetry:
        if spec is None or spec.atoms != 3:
            raise ValueError("symmetric reduction requires a 3-atom ModelSpec")
        if rho0 is not None and not is_permutation_symmetric(rho0, spec.atoms):
            raise ValueError("initial state is not permutation symmetric")
        return _ReducedEngine(system, spec.atoms)
    return _MatrixEngine(system, spec)


# ---------------------------------------------------------------------------
# Steppers
# ---------------------------------------------------------------------------

def _rk4_advance(rhs, y, t_span, n_steps):
    h = t_span / n_steps
    for _ in range(n_steps):
        k1 = rhs(y)
        k2 = rhs(y + (0.5 * h) * k1)
        k3 = rhs(y + (0.5 * h) * k2)
        k4 = rhs(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


# Dormand-Prince 5(4) tableau; last A row doubles as the 5th-order weights,
# so the 7th stage is the first stage of the next step (FSAL).
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_ERR = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200,
           22 / 525, -1 / 40)

_PI_ALPHA = 0.7 / 5
_PI_BETA = 0.4 / 5
_SAFETY = 0.9
_FAC_MIN = 0.2
_FAC_MAX = 5.0


class _AdaptiveState:
    """Carries step size, PI memory and the FSAL stage across intervals."""

    def __init__(self, rel_tol, abs_tol, max_steps):
        self.rel_tol = rel_tol
        self.abs_tol = abs_tol
        self.max_steps = max_steps
        self.h = None
        self.err_prev = 1.0
        self.f_start = None
        self.steps = 0

    def _error_norm(self, err, y0, y1):
        scale = self.abs_tol + self.rel_tol * np.maximum(np.abs(y0), np.abs(y1))
        return float(np.sqrt(np.mean(np.abs(err / scale) ** 2)))

    def _initial_step(self, rhs, y0, f0, span):
        scale = self.abs_tol + self.rel_tol * np.abs(y0)
        d0 = float(np.sqrt(np.mean(np.abs(y0 / scale) ** 2)))
        d1 = float(np.sqrt(np.mean(np.abs(f0 / scale) ** 2)))
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        h0 = min(h0, span)
        f1 = rhs(y0 + h0 * f0)
        d2 = float(np.sqrt(np.mean(np.abs((f1 - f0) / scale) ** 2))) / h0
        if max(d1, d2) <= 1e-15:
            h1 = max(1e-6, h0 * 1e-3)
        else:
            h1 = (0.01 / max(d1, d2)) ** 0.2
        return min(100 * h0, h1, span)

    def advance(self, rhs, y, t0, t1):
        t = t0
        if self.f_start is None:
            self.f_start = rhs(y)
        if self.h is None:
            self.h = self._initial_step(rhs, y, self.f_start, t1 - t0)
        k = [None] * 7
        k[0] = self.f_start
        while t < t1 - 1e-14 * max(abs(t1), 1.0):
            h = min(self.h, t1 - t)
            clipped = h < self.h
            while True:
                self.steps += 1
                if self.steps > self.max_steps:
                    raise SolverError(
                        f"step-count cap exceeded ({self.max_steps} steps)"
                    )
                for i in range(1, 7):
                    dy = sum(_DP_A[i][j] * k[j] for j in range(i) if _DP_A[i][j])
                    k[i] = rhs(y + h * dy)
                y1 = y + h * sum(a * ki for a, ki in zip(_DP_A[6], k) if a)
                err_vec = h * sum(e * ki for e, ki in zip(_DP_ERR, k) if e)
                err = self._error_norm(err_vec, y, y1)
                if err <= 1.0:
                    fac = _SAFETY * (err ** -_PI_ALPHA if err > 0 else _FAC_MAX) \
                        * self.err_prev**_PI_BETA
                    fac = min(_FAC_MAX, max(_FAC_MIN, fac))
                    if not clipped:
                        self.h = h * fac
                    self.err_prev = max(err, 1e-10)
                    y = y1
                    t += h
                    k[0] = k[6]
                    self.f_start = k[0]
                    break
                h = h * max(_FAC_MIN, _SAFETY * err**-0.2)
                self.h = h
                clipped = False
        return y


# ---------------------------------------------------------------------------
# Observables and evolve
# ---------------------------------------------------------------------------

def _resolve_observables(observables, dim, atoms):
    if observables is None:
        if atoms == 2:
            observables = {"p_psi": "Psi", "p_phi": "Phi",
                           "p_upsilon": "Upsilon", "p_ground": "ground"}
        elif atoms == 3:
            observables = {"p_s3": "S3", "p_ground": "ground"}
        else:
            observables = {}
    resolved = []
    for name, ob in observables.items():
        if isinstance(ob, str):
            if ob in ("ground", "excited"):
                if atoms is None:
                    raise ValueError(
                        f"observable {ob!r} needs a ModelSpec-based run"
                    )
                w = model.ground_manifold_diagonal(atoms)
                resolved.append((name, "diag", w if ob == "ground" else 1.0 - w))
                continue
            if atoms is None:
                raise ValueError(
                    f"label observable {ob!r} needs a ModelSpec-based run"
                )
            ob = model.target_state(ob, atoms)
        if isinstance(ob, tuple) and len(ob) == 2 and ob[0] == "diag":
            resolved.append((name, "diag", np.asarray(ob[1], dtype=float)))
            continue
        v = np.asarray(ob, dtype=np.complex128).ravel()
        if v.size != dim:
            raise ValueError(f"observable {name!r} has wrong dimension")
        resolved.append((name, "state", v))
    return resolved


def _measure(rho, resolved):
    out = {}
    for name, kind, payload in resolved:
        if kind == "diag":
            out[name] = float(np.real(np.sum(payload * np.diagonal(rho))))
        else:
            out[name] = float(np.real(np.vdot(payload, rho @ payload)))
    return out


def rk4_max_dt(spec_or_system) -> float:
    """Stability guard for the fixed stepper: conservative bound from the
    largest diagonal energy plus the decay-rate scale."""
    system, spec = _as_system(spec_or_system)
    h = system.h
    diag = h.data.diagonal() if h.storage == "sparse" else np.diagonal(h.data)
    if spec is not None:
        rate = spec.gamma
    else:
        rate = 0.0
        for lop in system.collapse:
            ldl = lop.to_sparse()
            ldl = (ldl.conj().T @ ldl).diagonal()
            rate = max(rate, float(np.abs(ldl).max()) if ldl.size else 0.0)
    scale = float(np.abs(diag).max()) + rate
    if scale == 0.0:
        return math.inf
    return RK4_GUARD / scale


def evolve(spec_or_system, rho0: DensityMatrix, t_final: float,
           stepper: StepperConfig | None = None,
           observe_every: float | None = None,
           observables: dict | None = None,
           use_symmetry: bool | None = None) -> TrajectoryRecord:
    """Integrate the master equation to ``t_final`` (us), recording the
    requested observables (plus trace and min eigenvalue) every
    ``observe_every`` us.  The state is re-symmetrized and its trace
    renormalized at each observation; drift beyond 1e-6 aborts.
    """
    if not t_final > 0:
        raise ValueError("t_final must be positive")
    if stepper is None:
        stepper = StepperConfig()
    if observe_every is None:
        observe_every = t_final / 200.0
    if not 0 < observe_every <= t_final:
        raise ValueError("observe_every must lie in (0, t_final]")

    system, spec = _as_system(spec_or_system)
    rho = np.array(rho0.matrix if isinstance(rho0, DensityMatrix) else rho0,
                   dtype=np.complex128)
    if rho.shape != (system.dim, system.dim):
        raise ValueError(f"rho0 has shape {rho.shape}, expected "
                         f"({system.dim}, {system.dim})")
    engine = build_engine(spec_or_system, rho, use_symmetry)
    reduced = isinstance(engine, _ReducedEngine)
    resolved = _resolve_observables(observables, system.dim,
                                    spec.atoms if spec is not None else None)

    n_obs = int(math.floor(t_final / observe_every + 1e-9))
    targets = [i * observe_every for i in range(1, n_obs + 1)]
    if not targets or targets[-1] < t_final * (1 - 1e-12):
        targets.append(t_final)

    if stepper.kind == "rk4-fixed":
        dt_max = rk4_max_dt(spec_or_system)
        dt = stepper.dt
        if dt is None:
            dt = min(dt_max, targets[0])
        elif dt > dt_max:
            raise ValueError(
                f"dt={dt:g} exceeds the stability guard {dt_max:g} us "
                f"for this model"
            )
        total_steps = sum(
            max(1, math.ceil((b - a) / dt - 1e-9))
            for a, b in zip([0.0] + targets[:-1], targets)
        )
        if total_steps > stepper.max_steps:
            raise SolverError(
                f"step-count cap exceeded ({total_steps} > {stepper.max_steps})"
            )
        adaptive = None
    else:
        adaptive = _AdaptiveState(stepper.rel_tol, stepper.abs_tol,
                                  stepper.max_steps)
        dt = None

    y = engine.encode(rho)
    times = [0.0]
    columns = {name: [] for name, _, _ in resolved}
    columns["trace"] = []
    columns["min_eig"] = []

    def record(mat):
        for name, v in _measure(mat, resolved).items():
            columns[name].append(v)
        columns["trace"].append(float(np.real(np.trace(mat))))
        columns["min_eig"].append(float(np.linalg.eigvalsh(mat)[0]))

    record(rho)
    mat = rho
    t_prev = 0.0
    steps_taken = 0
    for t_next in targets:
        span = t_next - t_prev
        if adaptive is None:
            n_sub = max(1, math.ceil(span / dt - 1e-9))
            y = _rk4_advance(engine.rhs_flat, y, span, n_sub)
            steps_taken += n_sub
        else:
            y = adaptive.advance(engine.rhs_flat, y, t_prev, t_next)
        mat = engine.decode(y)
        mat = 0.5 * (mat + mat.conj().T)
        tr = float(np.real(np.trace(mat)))
        if abs(tr - 1.0) > TRACE_DRIFT_FAIL:
            raise SolverError(
                f"trace drift {abs(tr - 1.0):.3e} at t={t_next:g} us "
                f"signals an unstable step size"
            )
        times.append(t_next)
        record(mat)
        mat = mat / tr
        y = engine.encode(mat)
        if adaptive is not None:
            adaptive.f_start = None   # state was touched; refresh FSAL stage
        t_prev = t_next

    if adaptive is not None:
        steps_taken = adaptive.steps
    final = DensityMatrix(Operator(mat, system.dims), validate=False)
    return TrajectoryRecord(
        times=np.asarray(times),
        observables={k: np.asarray(v) for k, v in columns.items()},
        final_state=final,
        meta={
            "stepper": stepper.kind,
            "dt": dt,
            "rel_tol": stepper.rel_tol,
            "abs_tol": stepper.abs_tol,
            "steps": steps_taken,
            "engine": "reduced-symmetric" if reduced else "matrix",
        },
    )


# ---------------------------------------------------------------------------
# Steady state
# ---------------------------------------------------------------------------

@dataclass
class SteadyState:
    """Steady-state solve result; iterates as (rho, residual)."""

    rho: DensityMatrix
    residual: float
    unique: bool = True
    rcond: float = float("nan")

    def __iter__(self):
        return iter((self.rho, self.residual))


def _constrained_solve(s_mat: np.ndarray, row: int):
    n = s_mat.shape[0]
    dim = int(round(math.sqrt(n)))
    sc = np.array(s_mat)
    trace_row = np.zeros(n, dtype=complex)
    trace_row[:: dim + 1] = 1.0
    sc[row, :] = trace_row
    b = np.zeros(n, dtype=complex)
    b[row] = 1.0
    anorm = float(np.abs(sc).sum(axis=0).max())
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        try:
            lu, piv = scipy.linalg.lu_factor(sc)
        except scipy.linalg.LinAlgError:
            return None, 0.0, sc, b
    gecon = scipy.linalg.get_lapack_funcs("gecon", (sc,))
    rcond, _ = gecon(lu, anorm)
    rcond = float(rcond)
    if not rcond >= RCOND_DEGENERATE:
        return None, rcond, sc, b
    x = scipy.linalg.lu_solve((lu, piv), b)
    return x, rcond, sc, b


def steady_state(spec_or_system) -> SteadyState:
    """Solve for the stationary state by replacing one row of the
    vectorized generator with the trace constraint.

    Superoperator path, Hilbert dimension <= 64 only (use a long-horizon
    :func:`evolve` above that).  A singular constrained system (degenerate
    steady manifold) is reported with ``unique=False`` and the minimal-norm
    representative is returned.
    """
    system, _ = _as_system(spec_or_system)
    if system.dim > 64:
        raise ValueError(
            f"Hilbert dimension {system.dim} too large for the superoperator "
            f"path; relax with evolve() over a long horizon instead"
        )
    liou = liouvillian_matrix(system.h, system.collapse)
    s_mat = liou.data
    dim = system.dim

    unique = True
    x, rcond, sc, b = _constrained_solve(s_mat, 0)
    if x is None:
        # one retry with a different pinned row before declaring degeneracy
        x, rcond2, sc, b = _constrained_solve(s_mat, (dim + 1) * (dim // 2))
        rcond = max(rcond, rcond2)
        if x is None:
            unique = False
            warnings.warn(
                "steady-state system is singular (degenerate steady "
                "manifold); returning the minimal-norm representative",
                RuntimeWarning, stacklevel=2,
            )
            x, *_ = np.linalg.lstsq(sc, b, rcond=None)

    rho = unvec(x, dim)
    rho = 0.5 * (rho + rho.conj().T)
    evals = np.linalg.eigvalsh(rho)
    if evals[0] < 0.0:
        if evals[0] < -EIG_CLIP and unique:
            raise SolverError(
                f"steady-state solution has eigenvalue {evals[0]:.3e} below "
                f"the positivity floor"
            )
        evals, evecs = np.linalg.eigh(rho)
        rho = (evecs * np.clip(evals, 0.0, None)) @ evecs.conj().T
    rho = rho / np.real(np.trace(rho))

    residual = float(np.linalg.norm(s_mat @ vec(rho)))
    if unique and residual >= STEADY_RESIDUAL_MAX:
        raise SolverError(
            f"steady-state residual {residual:.3e} exceeds "
            f"{STEADY_RESIDUAL_MAX:g}"
        )
    dm = DensityMatrix(Operator(rho, system.dims), validate=False)
    return SteadyState(rho=dm, residual=residual, unique=unique, rcond=rcond)
