"""Entanglement and state-quality measures."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import dynamics, model
from .opalg import DensityMatrix, hermitian_eigenvalues, partial_transpose


@dataclass
class MetricReport:
    """Bundle of measures evaluated on one state."""

    negativity: float | None
    fidelity: dict = field(default_factory=dict)
    populations: dict = field(default_factory=dict)
    purity: float = float("nan")


def negativity(rho: DensityMatrix, subsystem: int = 0) -> float:
    """Entanglement negativity of a bipartite state: half the trace-norm
    excess of the partial transpose, equal to |sum of its negative
    eigenvalues|.  Value 1 for a maximally entangled pair of qutrits.
    """
    if len(rho.dims) != 2:
        raise ValueError(
            f"negativity needs a bipartite state, got dims {rho.dims}"
        )
    if not 0 <= subsystem < 2:
        raise IndexError(f"subsystem {subsystem} invalid for a bipartite state")
    evals = hermitian_eigenvalues(partial_transpose(rho, subsystem))
    return float((np.abs(evals).sum() - 1.0) / 2.0)


def fidelity_pure(rho: DensityMatrix, target: np.ndarray) -> float:
    """Overlap <target| rho |target> with a pure target state."""
    v = np.asarray(target, dtype=np.complex128).ravel()
    m = rho.matrix
    if v.size != m.shape[0]:
        raise ValueError(
            f"dimension mismatch: target {v.size}, state {m.shape[0]}"
        )
    val = complex(np.vdot(v, m @ v))
    if abs(val.imag) > 1e-12:
        raise ValueError(f"fidelity has imaginary part {val.imag:.3e}")
    return float(val.real)


def populations(rho: DensityMatrix, labels) -> dict:
    """Diagonal expectation for each labeled state (product labels and the
    named entangled states are both accepted)."""
    atoms = len(rho.dims)
    out = {}
    for label in labels:
        state = model.target_state(label, atoms)
        out[label] = fidelity_pure(rho, state)
    return out


def purity(rho: DensityMatrix) -> float:
    return rho.purity()


def steady_residual(spec_or_system, rho: DensityMatrix) -> float:
    """Frobenius norm of the generator applied to ``rho``; zero iff
    stationary."""
    system, _ = dynamics._as_system(spec_or_system)
    if system.dims != rho.dims:
        raise ValueError(
            f"dimension mismatch: system dims {system.dims}, rho {rho.dims}"
        )
    out = dynamics.lindblad_rhs(system.h, system.collapse, rho)
    return float(np.linalg.norm(out.data))


def report(spec: model.ModelSpec, rho: DensityMatrix,
           population_labels=None) -> MetricReport:
    """Evaluate the standard metric set for a state under ``spec``.

    Negativity is only defined for the bipartite (two-atom) split.
    """
    neg = negativity(rho) if spec.atoms == 2 else None
    if spec.atoms == 2:
        targets = ("Psi", "Phi", "Upsilon")
    else:
        targets = ("S3",)
    fid = {name: fidelity_pure(rho, model.target_state(name, spec.atoms))
           for name in targets}
    if population_labels is None:
        population_labels = model.ground_labels(spec.atoms)
    pops = populations(rho, population_labels)
    return MetricReport(negativity=neg, fidelity=fid, populations=pops,
                        purity=purity(rho))
