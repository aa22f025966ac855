"""Model construction for two or three driven Rydberg atoms.

Each atom carries three ground levels and three Rydberg levels, ordered
``(gL, g0, gR, eL, e0, eR)``; multi-atom basis indices are lexicographic
with atom 1 slowest.  Single-atom physics:

    * laser drives ``g_i <-> e_i`` with Rabi frequency ``Omega_i`` (no 1/2
      factor in this convention) and common detuning ``-Delta`` on every
      Rydberg level,
    * microwave couplings ``omega_L0`` (gL <-> g0) and ``omega_0R``
      (g0 <-> gR), resonant, possibly complex,
    * spontaneous decay from each Rydberg level to the three ground levels
      with equal branching ``gamma/3``.

Pairs of excited atoms acquire a diagonal interaction shift ``U[i, j]`` on
``|e_i e_j>``; for three atoms the shift is summed over all atom pairs.

Units: all frequencies in rad/us, time in us.  Configuration files quote
laser/microwave/detuning/interaction values in MHz (converted internally by
2*pi) and decay in kHz (plain rate by default, ``gamma_angular`` multiplies
by 2*pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .opalg import DensityMatrix, Operator

TWO_PI = 2.0 * math.pi

LEVELS = ("gL", "g0", "gR", "eL", "e0", "eR")
N_LEVELS = 6
GROUND = (0, 1, 2)
EXCITED = (3, 4, 5)

FLAVORS = ("full", "effective")
COLLAPSE_VARIANTS = ("independent", "coherent-sum", "paper-effective")
U_KEYS = ("LL", "L0", "LR", "00", "0R", "RR")

_LEVEL_INDEX = {name: i for i, name in enumerate(LEVELS)}
_U_POS = {"LL": (0, 0), "L0": (0, 1), "LR": (0, 2),
          "00": (1, 1), "0R": (1, 2), "RR": (2, 2)}


class ConfigError(ValueError):
    """Malformed model configuration; the message names the offending key."""


def level_index(token: str) -> int:
    try:
        return _LEVEL_INDEX[token]
    except KeyError:
        raise ValueError(f"unknown level {token!r}; expected one of {LEVELS}") from None


def basis_index(tokens) -> int:
    """Index of a product basis state, atom 1 slowest."""
    idx = 0
    for t in tokens:
        idx = idx * N_LEVELS + (t if isinstance(t, int) else level_index(t))
    return idx


def parse_label(label: str) -> list[str]:
    """Split a product label like 'gLg0' / 'gL g0' / 'gL,g0' into level tokens."""
    cleaned = label.replace(",", " ").replace("_", "")
    parts = cleaned.split()
    if len(parts) == 1:
        text = parts[0]
        if len(text) % 2:
            raise ValueError(f"cannot parse product label {label!r}")
        parts = [text[i:i + 2] for i in range(0, len(text), 2)]
    for p in parts:
        if p not in _LEVEL_INDEX:
            raise ValueError(f"unknown level {p!r} in label {label!r}")
    return parts


def product_state(label: str, atoms: int) -> np.ndarray:
    tokens = parse_label(label)
    if len(tokens) != atoms:
        raise ValueError(
            f"label {label!r} names {len(tokens)} atoms, expected {atoms}"
        )
    v = np.zeros(N_LEVELS**atoms, dtype=np.complex128)
    v[basis_index(tokens)] = 1.0
    return v


def _ket2(i: int, j: int) -> np.ndarray:
    v = np.zeros(36, dtype=np.complex128)
    v[i * 6 + j] = 1.0
    return v


def target_state(name: str, atoms: int = 2) -> np.ndarray:
    """Named target states and product states, as unit vectors.

    Two-atom targets (ground-manifold superpositions of both atoms in the
    same level):

        Psi     = (|gL gL> - |g0 g0> + |gR gR>) / sqrt(3)
        Phi     = (|gL gL> + 2 |g0 g0> + |gR gR>) / sqrt(6)
        Upsilon = (|gL gL> - |gR gR>) / sqrt(2)

    Three-atom target: the totally antisymmetric qutrit singlet

        S3 = (|g0 gL gR> - |gL g0 gR> - |gR gL g0>
              + |gL gR g0> + |gR g0 gL> - |g0 gR gL>) / sqrt(6)

    Any product label (e.g. ``"gL g0"``) is also accepted.
    """
    key = name.strip().lower()
    if key in ("psi", "phi", "upsilon"):
        if atoms != 2:
            raise ValueError(f"{name} is a two-atom state (atoms={atoms})")
        gl, g0, gr = 0, 1, 2
        if key == "psi":
            return (_ket2(gl, gl) - _ket2(g0, g0) + _ket2(gr, gr)) / math.sqrt(3)
        if key == "phi":
            return (_ket2(gl, gl) + 2 * _ket2(g0, g0) + _ket2(gr, gr)) / math.sqrt(6)
        return (_ket2(gl, gl) - _ket2(gr, gr)) / math.sqrt(2)
    if key == "s3":
        if atoms != 3:
            raise ValueError(f"S3 is a three-atom state (atoms={atoms})")
        v = np.zeros(216, dtype=np.complex128)
        terms = [("g0", "gL", "gR", +1), ("gL", "g0", "gR", -1),
                 ("gR", "gL", "g0", -1), ("gL", "gR", "g0", +1),
                 ("gR", "g0", "gL", +1), ("g0", "gR", "gL", -1)]
        for a, b, c, sign in terms:
            v[basis_index((a, b, c))] = sign / math.sqrt(6)
        return v
    return product_state(name, atoms)


def ground_labels(atoms: int) -> list[str]:
    """All-ground product labels in lexicographic basis order."""
    labels = [""]
    for _ in range(atoms):
        labels = [pre + g for pre in labels for g in ("gL", "g0", "gR")]
    return labels


def uniform_ground_mixture(atoms: int) -> DensityMatrix:
    """Equal-weight mixture of every all-ground product state."""
    dim = N_LEVELS**atoms
    diag = np.zeros(dim)
    labels = ground_labels(atoms)
    for lab in labels:
        diag[basis_index(parse_label(lab))] = 1.0 / len(labels)
    return DensityMatrix(Operator(np.diag(diag).astype(complex), (N_LEVELS,) * atoms),
                         validate=False)


def ground_manifold_diagonal(atoms: int) -> np.ndarray:
    """0/1 diagonal weights of the all-ground projector."""
    dim = N_LEVELS**atoms
    w = np.zeros(dim)
    for lab in ground_labels(atoms):
        w[basis_index(parse_label(lab))] = 1.0
    return w


# ---------------------------------------------------------------------------
# ModelSpec and JSON configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ModelSpec:
    """All physical parameters of one simulation, in angular units (rad/us)
    except ``gamma`` which is a plain rate (1/us).
    """

    omega_drive: tuple          # (Omega_L, Omega_0, Omega_R)
    microwave: tuple            # (omega_L0, omega_0R), possibly complex
    delta: float
    u_table: np.ndarray         # symmetric 3x3, indices (L, 0, R)
    gamma: float
    atoms: int = 2
    flavor: str = "full"
    collapse_variant: str = "independent"
    gamma_angular: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "omega_drive",
                           tuple(complex(x) for x in self.omega_drive))
        object.__setattr__(self, "microwave",
                           tuple(complex(x) for x in self.microwave))
        u = np.array(self.u_table, dtype=float)
        if u.shape != (3, 3):
            raise ValueError(f"u_table must be 3x3, got {u.shape}")
        if np.abs(u - u.T).max() > 1e-12:
            raise ValueError("u_table must be symmetric")
        u.flags.writeable = False
        object.__setattr__(self, "u_table", u)
        if len(self.omega_drive) != 3:
            raise ValueError("omega_drive must have three entries (L, 0, R)")
        if len(self.microwave) != 2:
            raise ValueError("microwave must have two entries (L0, 0R)")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if self.atoms not in (2, 3):
            raise ValueError(f"atoms must be 2 or 3, got {self.atoms}")
        if self.flavor not in FLAVORS:
            raise ValueError(f"flavor must be one of {FLAVORS}")
        if self.collapse_variant not in COLLAPSE_VARIANTS:
            raise ValueError(
                f"collapse_variant must be one of {COLLAPSE_VARIANTS}"
            )
        if self.flavor == "effective" and self.atoms != 2:
            raise ValueError("the effective model is derived for 2 atoms only")
        if self.collapse_variant == "paper-effective" and self.atoms != 2:
            raise ValueError("paper-effective collapse set exists for 2 atoms only")

    @property
    def dim(self) -> int:
        return N_LEVELS**self.atoms

    @property
    def dims(self) -> tuple:
        return (N_LEVELS,) * self.atoms


CONFIG_KEYS = ("omega_mhz", "omega_mw_mhz", "delta_mhz", "u_table_mhz",
               "gamma_khz", "gamma_angular", "atoms", "flavor",
               "collapse_variant")
_REQUIRED_KEYS = ("omega_mhz", "omega_mw_mhz", "delta_mhz", "u_table_mhz",
                  "gamma_khz")


def _as_complex(value, key):
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 \
            and all(isinstance(x, (int, float)) for x in value):
        return complex(value[0], value[1])
    raise ConfigError(f"{key}: expected a number or [re, im] pair, got {value!r}")


def spec_from_config(config: dict) -> ModelSpec:
    """Build a ModelSpec from a JSON-style configuration document.

    Keys: omega_mhz (number or 3-list), omega_mw_mhz (pair), delta_mhz,
    u_table_mhz (mapping with the six independent entries LL, L0, LR, 00,
    0R, RR), gamma_khz, gamma_angular (bool, default false), atoms, flavor,
    collapse_variant.  Unknown keys are errors.
    """
    if not isinstance(config, dict):
        raise ConfigError(f"configuration must be an object, got {type(config).__name__}")
    unknown = sorted(set(config) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"unknown configuration key(s): {', '.join(unknown)}")
    missing = [k for k in _REQUIRED_KEYS if k not in config]
    if missing:
        raise ConfigError(f"missing configuration key(s): {', '.join(missing)}")

    om = config["omega_mhz"]
    if isinstance(om, (int, float)):
        om = [om, om, om]
    if not (isinstance(om, (list, tuple)) and len(om) == 3
            and all(isinstance(x, (int, float)) for x in om)):
        raise ConfigError("omega_mhz: expected a number or a 3-element list")
    mw = config["omega_mw_mhz"]
    if not (isinstance(mw, (list, tuple)) and len(mw) == 2):
        raise ConfigError("omega_mw_mhz: expected a 2-element list")
    mw = tuple(_as_complex(x, "omega_mw_mhz") for x in mw)
    if not isinstance(config["delta_mhz"], (int, float)):
        raise ConfigError("delta_mhz: expected a number")
    ut = config["u_table_mhz"]
    if not isinstance(ut, dict):
        raise ConfigError("u_table_mhz: expected a mapping with keys "
                          + ", ".join(U_KEYS))
    bad = sorted(set(ut) - set(U_KEYS))
    if bad:
        raise ConfigError(f"u_table_mhz: unknown entry key(s): {', '.join(bad)}")
    miss = [k for k in U_KEYS if k not in ut]
    if miss:
        raise ConfigError(f"u_table_mhz: missing entry key(s): {', '.join(miss)}")
    u = np.zeros((3, 3))
    for key, (i, j) in _U_POS.items():
        val = ut[key]
        if not isinstance(val, (int, float)):
            raise ConfigError(f"u_table_mhz.{key}: expected a number")
        u[i, j] = u[j, i] = TWO_PI * val
    if not isinstance(config["gamma_khz"], (int, float)):
        raise ConfigError("gamma_khz: expected a number")
    gamma_angular = config.get("gamma_angular", False)
    if not isinstance(gamma_angular, bool):
        raise ConfigError("gamma_angular: expected a boolean")
    gamma = config["gamma_khz"] * 1e-3 * (TWO_PI if gamma_angular else 1.0)
    atoms = config.get("atoms", 2)
    if atoms not in (2, 3):
        raise ConfigError("atoms: expected 2 or 3")
    flavor = config.get("flavor", "full")
    if flavor not in FLAVORS:
        raise ConfigError(f"flavor: expected one of {FLAVORS}")
    variant = config.get("collapse_variant")
    if variant is None:
        variant = "paper-effective" if flavor == "effective" else "independent"
    if variant not in COLLAPSE_VARIANTS:
        raise ConfigError(f"collapse_variant: expected one of {COLLAPSE_VARIANTS}")
    try:
        return ModelSpec(
            omega_drive=tuple(TWO_PI * x for x in om),
            microwave=tuple(TWO_PI * x for x in mw),
            delta=TWO_PI * config["delta_mhz"],
            u_table=u,
            gamma=gamma,
            atoms=atoms,
            flavor=flavor,
            collapse_variant=variant,
            gamma_angular=gamma_angular,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def spec_to_config(spec: ModelSpec) -> dict:
    """Inverse of :func:`spec_from_config` (values back in MHz / kHz)."""
    def real_or_pair(z):
        z = complex(z)
        return z.real if z.imag == 0.0 else [z.real, z.imag]

    u = {}
    for key, (i, j) in _U_POS.items():
        u[key] = spec.u_table[i, j] / TWO_PI
    return {
        "omega_mhz": [complex(x).real / TWO_PI for x in spec.omega_drive],
        "omega_mw_mhz": [real_or_pair(x / TWO_PI) for x in spec.microwave],
        "delta_mhz": spec.delta / TWO_PI,
        "u_table_mhz": u,
        "gamma_khz": spec.gamma * 1e3 / (TWO_PI if spec.gamma_angular else 1.0),
        "gamma_angular": spec.gamma_angular,
        "atoms": spec.atoms,
        "flavor": spec.flavor,
        "collapse_variant": spec.collapse_variant,
    }


# ---------------------------------------------------------------------------
# Canonical parameter points (derived-rule helpers, all in MHz)
# ---------------------------------------------------------------------------

def microwave_lock_mhz(omega_mhz: float, delta_mhz: float) -> float:
    """Microwave Rabi frequency locked to 3*Omega^2 / (4*Delta)."""
    return 3.0 * omega_mhz**2 / (4.0 * delta_mhz)


def cross_resonant_u_mhz(delta_mhz: float) -> dict:
    """Interaction table making cross bi-excitations two-photon resonant:
    cross entries 2*Delta, same-state entries 4*Delta (i.e. Delta = U/2)."""
    c, s = 2.0 * delta_mhz, 4.0 * delta_mhz
    return {"LL": s, "00": s, "RR": s, "L0": c, "LR": c, "0R": c}


def same_resonant_u_mhz(delta_mhz: float, cross_factor: float = 0.2) -> dict:
    """Interaction table making same-state bi-excitations resonant
    (same entries 2*Delta) with weak cross shifts ``cross_factor*Delta``."""
    s, c = 2.0 * delta_mhz, cross_factor * delta_mhz
    return {"LL": s, "00": s, "RR": s, "L0": c, "LR": c, "0R": c}


def two_atom_config(delta_mhz: float, gamma_khz: float = 1.0,
                    omega_mhz: float = 0.02, *, flavor: str = "full",
                    collapse_variant: str | None = None,
                    gamma_angular: bool = False) -> dict:
    """Two-atom configuration with the standard locked parameters."""
    mw = microwave_lock_mhz(omega_mhz, delta_mhz)
    cfg = {
        "omega_mhz": omega_mhz,
        "omega_mw_mhz": [mw, mw],
        "delta_mhz": delta_mhz,
        "u_table_mhz": cross_resonant_u_mhz(delta_mhz),
        "gamma_khz": gamma_khz,
        "gamma_angular": gamma_angular,
        "atoms": 2,
        "flavor": flavor,
    }
    if collapse_variant is not None:
        cfg["collapse_variant"] = collapse_variant
    return cfg


def three_atom_config(delta_mhz: float, gamma_khz: float = 1.0,
                      omega_mhz: float = 0.02, *, cross_factor: float = 0.2,
                      collapse_variant: str = "independent",
                      gamma_angular: bool = False) -> dict:
    """Three-atom singlet-pumping configuration (full model only)."""
    mw = microwave_lock_mhz(omega_mhz, delta_mhz)
    return {
        "omega_mhz": omega_mhz,
        "omega_mw_mhz": [mw, mw],
        "delta_mhz": delta_mhz,
        "u_table_mhz": same_resonant_u_mhz(delta_mhz, cross_factor),
        "gamma_khz": gamma_khz,
        "gamma_angular": gamma_angular,
        "atoms": 3,
        "flavor": "full",
        "collapse_variant": collapse_variant,
    }


def two_atom_spec(delta_mhz: float, gamma_khz: float = 1.0,
                  omega_mhz: float = 0.02, **kwargs) -> ModelSpec:
    return spec_from_config(two_atom_config(delta_mhz, gamma_khz, omega_mhz,
                                            **kwargs))


def three_atom_spec(delta_mhz: float, gamma_khz: float = 1.0,
                    omega_mhz: float = 0.02, **kwargs) -> ModelSpec:
    return spec_from_config(three_atom_config(delta_mhz, gamma_khz, omega_mhz,
                                              **kwargs))


# ---------------------------------------------------------------------------
# Hamiltonians
# ---------------------------------------------------------------------------

def single_atom_matrix(spec: ModelSpec) -> np.ndarray:
    """The 6x6 one-atom matrix in the (gL, g0, gR, eL, e0, eR) basis:

        [[ 0     wL0   0     OL    0     0  ]
         [ wL0*  0     w0R   0     O0    0  ]
         [ 0     w0R*  0     0     0     OR ]
         [ OL*   0     0    -D     0     0  ]
         [ 0     O0*   0     0    -D     0  ]
         [ 0     0     OR*   0     0    -D  ]]
    """
    ol, o0, orr = spec.omega_drive
    wl0, w0r = spec.microwave
    h = np.zeros((6, 6), dtype=np.complex128)
    h[0, 1] = wl0
    h[1, 0] = np.conj(wl0)
    h[1, 2] = w0r
    h[2, 1] = np.conj(w0r)
    h[0, 3] = ol
    h[3, 0] = np.conj(ol)
    h[1, 4] = o0
    h[4, 1] = np.conj(o0)
    h[2, 5] = orr
    h[5, 2] = np.conj(orr)
    for k in EXCITED:
        h[k, k] = -spec.delta
    return h


def single_atom_hamiltonian(spec: ModelSpec) -> Operator:
    return Operator(single_atom_matrix(spec), (N_LEVELS,))


def _embed(mat6: np.ndarray, atom: int, atoms: int):
    """Single-atom operator acting on ``atom`` (0-based), identity elsewhere.

    Returns dense for 2 atoms, CSR for 3.
    """
    if atoms == 2:
        eye = np.eye(6)
        parts = [mat6 if n == atom else eye for n in range(2)]
        return np.kron(parts[0], parts[1])
    m = sp.csr_array(mat6)
    eye = sp.identity(6, dtype=complex, format="csr")
    out = m if atom == 0 else eye
    for n in range(1, atoms):
        out = sp.kron(out, m if n == atom else eye, format="csr")
    return out


def microwave_matrix(spec: ModelSpec):
    """Sum of the per-atom microwave couplings.  Each atom's coupling lives
    inside its own ground triplet; spectator atoms may be in any state."""
    wl0, w0r = spec.microwave
    hm = np.zeros((6, 6), dtype=np.complex128)
    hm[0, 1] = wl0
    hm[1, 0] = np.conj(wl0)
    hm[1, 2] = w0r
    hm[2, 1] = np.conj(w0r)
    total = sum(_embed(hm, n, spec.atoms) for n in range(spec.atoms))
    return total


def microwave_hamiltonian(spec: ModelSpec) -> Operator:
    return Operator(microwave_matrix(spec), spec.dims)


def ground_microwave_matrix(spec: ModelSpec) -> np.ndarray:
    """Microwave coupling restricted to the all-ground manifold (the form
    entering the effective model: no terms with an excited spectator)."""
    m = microwave_matrix(spec)
    if sp.issparse(m):
        m = m.toarray()
    mask = ground_manifold_diagonal(spec.atoms)
    return m * np.outer(mask, mask)


def interaction_diagonal(spec: ModelSpec) -> np.ndarray:
    """Diagonal of the pairwise excitation-shift operator over the full basis."""
    atoms = spec.atoms
    diag = np.zeros(N_LEVELS**atoms)
    for idx in range(diag.size):
        digits = []
        k = idx
        for _ in range(atoms):
            digits.append(k % N_LEVELS)
            k //= N_LEVELS
        digits.reverse()
        for a in range(atoms):
            for b in range(a + 1, atoms):
                if digits[a] >= 3 and digits[b] >= 3:
                    diag[idx] += spec.u_table[digits[a] - 3, digits[b] - 3]
    return diag


def interaction_hamiltonian(spec: ModelSpec) -> Operator:
    diag = interaction_diagonal(spec).astype(complex)
    if spec.dim > 36:
        return Operator(sp.diags_array(diag, format="csr"), spec.dims)
    return Operator(np.diag(diag), spec.dims)


def full_hamiltonian(spec: ModelSpec) -> Operator:
    """Sum of the embedded one-atom matrices plus the interaction diagonal."""
    h1 = single_atom_matrix(spec)
    total = sum(_embed(h1, n, spec.atoms) for n in range(spec.atoms))
    if sp.issparse(total):
        total = total + sp.diags_array(interaction_diagonal(spec).astype(complex),
                                       format="csr")
        return Operator(sp.csr_array(total), spec.dims)
    total = total + np.diag(interaction_diagonal(spec))
    return Operator(total, spec.dims)


def _uniform_drive(spec: ModelSpec) -> float:
    om = np.array(spec.omega_drive, dtype=complex)
    if np.abs(om.imag).max() > 1e-12 or np.abs(om.real - om.real[0]).max() > 1e-9:
        raise ValueError(
            "the effective model assumes one common real drive Rabi frequency"
        )
    return float(om.real[0])


def effective_hamiltonian(spec: ModelSpec) -> Operator:
    """Second-order effective Hamiltonian for two atoms, embedded in the
    36-dim space (zero rows/columns on single-excitation and same-state
    bi-excitation states).

    The drive block couples each cross ground pair |g_i g_j> (i != j) to its
    bi-excitation |e_i e_j> with strength 2*Omega^2/Delta and puts the same
    Stark shift on both, plus on the span of the same-state ground pairs.
    The microwave block is the bare ground-manifold microwave coupling.
    """
    if spec.flavor != "effective":
        raise ValueError(f"flavor mismatch: spec.flavor={spec.flavor!r}")
    if spec.atoms != 2:
        raise ValueError("effective model is defined for 2 atoms")
    if spec.delta == 0:
        raise ValueError("effective model requires a nonzero detuning")
    omega = _uniform_drive(spec)
    s = 2.0 * omega**2 / spec.delta
    h = np.zeros((36, 36), dtype=np.complex128)
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            g = i * 6 + j
            e = (3 + i) * 6 + (3 + j)
            h[g, e] += s
            h[e, g] += s
            h[e, e] += s
            h[g, g] += s
    for name in ("Psi", "Phi", "Upsilon"):
        v = target_state(name)
        h += s * np.outer(v, v.conj())
    h += ground_microwave_matrix(spec)
    return Operator(h, spec.dims)


def hamiltonian(spec: ModelSpec) -> Operator:
    return effective_hamiltonian(spec) if spec.flavor == "effective" \
        else full_hamiltonian(spec)


# ---------------------------------------------------------------------------
# Collapse operators
# ---------------------------------------------------------------------------

def _jump6(target: int, source: int) -> np.ndarray:
    m = np.zeros((6, 6), dtype=np.complex128)
    m[target, 3 + source] = 1.0
    return m


def collapse_ops(spec: ModelSpec) -> list[Operator]:
    """Decay operators for the configured variant, each scaled by
    sqrt(gamma/3).

    * ``independent``: one operator per (atom, excited level, ground target),
      9 per atom; distinguishable decay channels.
    * ``coherent-sum``: one operator per (atom, ground target), summing the
      three source levels coherently, 3 per atom.
    * ``paper-effective`` (2 atoms): the truncated effective-model set; the
      two-atom sum skips same-level spectator terms (i != j only) and routes
      each same-level single excitation |e_j g_j> / |g_j e_j> straight back
      to |g_j g_j>, written as the matching combination of Psi/Phi/Upsilon.
    """
    c = math.sqrt(spec.gamma / 3.0)
    atoms = spec.atoms
    ops: list[Operator] = []
    if spec.collapse_variant == "independent":
        for n in range(atoms):
            for i in range(3):
                for j in range(3):
                    ops.append(Operator(c * _embed(_jump6(j, i), n, atoms),
                                        spec.dims))
        return ops
    if spec.collapse_variant == "coherent-sum":
        for n in range(atoms):
            for j in range(3):
                m = sum(_jump6(j, i) for i in range(3))
                ops.append(Operator(c * _embed(m, n, atoms), spec.dims))
        return ops
    if spec.atoms != 2:
        raise ValueError("paper-effective collapse set exists for 2 atoms only")
    # weights of (Psi, Phi, Upsilon) that recombine to |g_j g_j| for each target
    combos = {
        0: (1 / math.sqrt(3), 1 / math.sqrt(6), 1 / math.sqrt(2)),   # -> gL gL
        2: (1 / math.sqrt(3), 1 / math.sqrt(6), -1 / math.sqrt(2)),  # -> gR gR
        1: (-1 / math.sqrt(3), 2 / math.sqrt(6), 0.0),               # -> g0 g0
    }
    psi, phi, ups = (target_state(n) for n in ("Psi", "Phi", "Upsilon"))
    ops = []
    for n in (0, 1):
        for tgt in (0, 2, 1):  # targets in gL, gR, g0 order
            m = np.zeros((36, 36), dtype=np.complex128)
            for i in range(3):
                for j in range(3):
                    if i == j:
                        continue
                    if n == 0:
                        # atom 1 decays e_i -> g_tgt, atom 2 spectates in e_j/g_j
                        m[basis_index((tgt, 3 + j)), basis_index((3 + i, 3 + j))] += 1
                        m[basis_index((tgt, j)), basis_index((3 + i, j))] += 1
                    else:
                        m[basis_index((3 + j, tgt)), basis_index((3 + j, 3 + i))] += 1
                        m[basis_index((j, tgt)), basis_index((j, 3 + i))] += 1
            wp, wf, wu = combos[tgt]
            special = wp * psi + wf * phi + wu * ups
            src = basis_index((3 + tgt, tgt)) if n == 0 \
                else basis_index((tgt, 3 + tgt))
            m[:, src] += special
            ops.append(Operator(c * m, spec.dims))
    return ops
