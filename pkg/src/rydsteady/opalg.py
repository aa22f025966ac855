"""Operator-algebra kernel: tensor products, partial transpose/trace,
Hermitian spectra, trace norms, and superoperator vectorization.

Conventions (fixed, internal):
  * Operators carry an ordered list of subsystem dimensions ``dims``;
    the matrix size is ``prod(dims)`` with subsystem 0 slowest
    (standard Kronecker order).
  * Vectorization is column-stacking: ``vec(A B C) = (C^T (x) A) vec(B)``,
    so entry (r, c) of a matrix lands at vec index ``c*D + r``.
  * Storage is dense up to dimension 64 and sparse CSR above, chosen so
    the two-atom problem stays dense while three-atom superoperators are
    never materialized densely.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

DENSE_DIM_MAX = 64

HERM_TOL = 1e-10          # hermitian_eigenvalues input gate
DM_HERM_TOL = 1e-12       # density-matrix hermiticity (max entrywise)
DM_TRACE_TOL = 1e-9
DM_EIG_TOL = -1e-8        # numerical positivity floor


class DimensionError(ValueError):
    """Operator dimensions are inconsistent or incompatible."""


def _auto_storage(dim: int) -> str:
    return "dense" if dim <= DENSE_DIM_MAX else "sparse"


class Operator:
    """Complex square matrix tagged with subsystem dimensions.

    Immutable after construction; safe to share across workers.
    """

    __slots__ = ("data", "dims")

    def __init__(self, data, dims, storage: str = "auto"):
        dims = tuple(int(d) for d in dims)
        size = int(np.prod(dims))
        if sp.issparse(data):
            mat = sp.csr_array(data, dtype=np.complex128)
        else:
            mat = np.asarray(data, dtype=np.complex128)
        if mat.shape != (size, size):
            raise DimensionError(
                f"matrix shape {mat.shape} does not match dims {dims} "
                f"(expected {size}x{size})"
            )
        if storage == "auto":
            storage = _auto_storage(size)
        if storage == "sparse":
            if not sp.issparse(mat):
                mat = sp.csr_array(mat)
        elif storage == "dense":
            if sp.issparse(mat):
                mat = mat.toarray()
            mat = np.ascontiguousarray(mat)
            mat.flags.writeable = False
        else:
            raise ValueError(f"unknown storage {storage!r}")
        object.__setattr__(self, "data", mat)
        object.__setattr__(self, "dims", dims)

    def __setattr__(self, name, value):
        raise AttributeError("Operator is immutable")

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def storage(self) -> str:
        return "sparse" if sp.issparse(self.data) else "dense"

    def to_dense(self) -> np.ndarray:
        if sp.issparse(self.data):
            return self.data.toarray()
        return np.array(self.data)

    def to_sparse(self) -> sp.csr_array:
        if sp.issparse(self.data):
            return self.data
        return sp.csr_array(self.data)

    def dag(self) -> "Operator":
        return Operator(self.data.conj().T, self.dims, self.storage)

    def trace(self) -> complex:
        return complex(self.data.trace())

    def is_hermitian(self, tol: float = HERM_TOL) -> bool:
        diff = self.data - self.data.conj().T
        if sp.issparse(diff):
            dev = abs(diff).max() if diff.nnz else 0.0
        else:
            dev = np.abs(diff).max() if diff.size else 0.0
        return float(dev) <= tol

    def __matmul__(self, other):
        if isinstance(other, Operator):
            if self.dims != other.dims:
                raise DimensionError(f"dims {self.dims} vs {other.dims}")
            return Operator(self.data @ other.data, self.dims, self.storage)
        return self.data @ other

    def __add__(self, other: "Operator") -> "Operator":
        if self.dims != other.dims:
            raise DimensionError(f"dims {self.dims} vs {other.dims}")
        return Operator(self.data + other.data, self.dims)

    def __sub__(self, other: "Operator") -> "Operator":
        if self.dims != other.dims:
            raise DimensionError(f"dims {self.dims} vs {other.dims}")
        return Operator(self.data - other.data, self.dims)

    def __mul__(self, scalar) -> "Operator":
        return Operator(self.data * scalar, self.dims, self.storage)

    __rmul__ = __mul__

    def __repr__(self):
        return f"Operator(dim={self.dim}, dims={self.dims}, {self.storage})"


def identity(dims) -> Operator:
    size = int(np.prod(tuple(dims)))
    if size > DENSE_DIM_MAX:
        return Operator(sp.identity(size, dtype=complex, format="csr"), dims)
    return Operator(np.eye(size), dims)


class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite operator (a state).

    Construction validates Hermiticity (1e-12 entrywise), trace
    (|tr - 1| <= 1e-9) and positivity (min eigenvalue >= -1e-8);
    pass ``validate=False`` only for states already checked upstream.
    """

    __slots__ = ("op", "_trace")

    def __init__(self, op, dims=None, validate: bool = True):
        if not isinstance(op, Operator):
            if dims is None:
                raise ValueError("dims required when passing a raw matrix")
            op = Operator(op, dims, storage="dense")
        elif op.storage == "sparse":
            op = Operator(op.to_dense(), op.dims, storage="dense")
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "_trace", complex(op.trace()))
        if validate:
            self._validate()

    def __setattr__(self, name, value):
        raise AttributeError("DensityMatrix is immutable")

    def _validate(self):
        m = self.op.data
        herm_dev = np.abs(m - m.conj().T).max()
        if herm_dev > DM_HERM_TOL:
            raise ValueError(f"not Hermitian: max deviation {herm_dev:.3e}")
        if abs(self._trace - 1.0) > DM_TRACE_TOL:
            raise ValueError(f"trace {self._trace} not 1 within {DM_TRACE_TOL}")
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo < DM_EIG_TOL:
            raise ValueError(f"negative eigenvalue {lo:.3e} below {DM_EIG_TOL}")

    @classmethod
    def from_vector(cls, state: np.ndarray, dims) -> "DensityMatrix":
        v = np.asarray(state, dtype=np.complex128).ravel()
        v = v / np.linalg.norm(v)
        return cls(Operator(np.outer(v, v.conj()), dims), validate=False)

    @property
    def dims(self):
        return self.op.dims

    @property
    def matrix(self) -> np.ndarray:
        return self.op.data

    @property
    def trace(self) -> complex:
        return self._trace

    def purity(self) -> float:
        m = self.op.data
        return float(np.real(np.vdot(m, m)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.op.data)[0])

    def __repr__(self):
        return f"DensityMatrix(dims={self.dims})"


@dataclass(frozen=True)
class Liouvillian:
    """Vectorized master-equation generator: a D^2 x D^2 matrix S with
    ``S @ vec(rho) = vec(-i[H, rho] + sum_n L_n rho L_n^+ - {L_n^+ L_n, rho}/2)``
    in the column-stacking convention.
    """

    data: object
    dims: tuple = field(default=())

    @property
    def hilbert_dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def storage(self) -> str:
        return "sparse" if sp.issparse(self.data) else "dense"

    def apply(self, rho: np.ndarray) -> np.ndarray:
        d = self.hilbert_dim
        return unvec(self.data @ vec(rho), d)


def vec(m: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return np.asarray(m).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    """Inverse of :func:`vec`."""
    return np.asarray(v).reshape((dim, dim), order="F")


def _dense_and_dims(a):
    if isinstance(a, DensityMatrix):
        return a.op.data, a.op.dims
    if isinstance(a, Operator):
        return a.to_dense(), a.dims
    raise TypeError(f"expected Operator or DensityMatrix, got {type(a).__name__}")


def kron(a: Operator, b: Operator) -> Operator:
    """Tensor product; result dims are the concatenation of the input dims."""
    dims = a.dims + b.dims
    if a.storage == "sparse" or b.storage == "sparse" \
            or a.dim * b.dim > DENSE_DIM_MAX:
        return Operator(sp.kron(a.to_sparse(), b.to_sparse(), format="csr"), dims)
    return Operator(np.kron(a.to_dense(), b.to_dense()), dims)


def partial_transpose(rho, subsystem: int) -> Operator:
    """Transpose one tensor factor: rho -> rho^{T_k}.

    Involutive, trace- and Hermiticity-preserving; the output may have
    negative eigenvalues, hence it is returned as a plain Operator.
    """
    m, dims = _dense_and_dims(rho)
    n = len(dims)
    if not 0 <= subsystem < n:
        raise IndexError(f"subsystem {subsystem} out of range for dims {dims}")
    t = m.reshape(dims + dims)
    t = np.swapaxes(t, subsystem, n + subsystem)
    return Operator(t.reshape(m.shape), dims, storage="dense")


def partial_trace(rho, keep) -> DensityMatrix:
    """Trace out every subsystem not listed in ``keep`` (indices kept in order)."""
    m, dims = _dense_and_dims(rho)
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    if any(k < 0 or k >= n for k in keep):
        raise IndexError(f"keep {keep} out of range for dims {dims}")
    t = m.reshape(dims + dims)
    # contract traced-out row/col axis pairs, highest first to keep axis ids valid
    for k in reversed(range(n)):
        if k not in keep:
            t = np.trace(t, axis1=k, axis2=k + (t.ndim // 2))
    kept = tuple(dims[k] for k in keep)
    size = int(np.prod(kept))
    return DensityMatrix(Operator(t.reshape(size, size), kept), validate=False)


def hermitian_eigenvalues(a) -> np.ndarray:
    """Full real spectrum of a Hermitian operator, ascending."""
    m, _ = _dense_and_dims(a)
    dev = np.abs(m - m.conj().T).max() if m.size else 0.0
    if dev > HERM_TOL:
        raise ValueError(f"input not Hermitian: max deviation {dev:.3e}")
    return np.linalg.eigvalsh(m)


def trace_norm_hermitian(a) -> float:
    """Sum of absolute eigenvalues (trace norm, Hermitian input only)."""
    return float(np.abs(hermitian_eigenvalues(a)).sum())


def liouvillian_matrix(h: Operator, collapse) -> Liouvillian:
    """Build the vectorized generator for Hamiltonian ``h`` and a list of
    collapse operators (hbar = 1).

    Dense for Hilbert dimension <= 64, sparse CSR above.
    """
    dims = h.dims
    for lop in collapse:
        if lop.dims != dims:
            raise DimensionError(
                f"collapse operator dims {lop.dims} do not match {dims}"
            )
    d = h.dim
    hs = h.to_sparse()
    eye = sp.identity(d, dtype=complex, format="csr")
    s = -1j * (sp.kron(eye, hs, format="csr") - sp.kron(hs.T, eye, format="csr"))
    for lop in collapse:
        ls = lop.to_sparse()
        ldl = (ls.conj().T @ ls).tocsr()
        s = s + sp.kron(ls.conj(), ls, format="csr") \
              - 0.5 * sp.kron(eye, ldl, format="csr") \
              - 0.5 * sp.kron(ldl.T, eye, format="csr")
    if d <= DENSE_DIM_MAX:
        return Liouvillian(s.toarray(), dims)
    return Liouvillian(sp.csr_array(s), dims)
