"""Exact state algebra for the two-ion qubit register.

The register lives in a 4-dimensional Hilbert space with basis
|uu>, |ud>, |du>, |dd> (ion 1 is the left tensor factor).  |u> is the
bright, fluorescing qubit state and is the +1 eigenstate of sigma_z;
|d> is dark.  Pure states are stored as amplitude vectors, mixed states
as 4x4 density matrices.  Every value is validated on construction and
treated as immutable afterwards: operations return new states.
"""

from __future__ import annotations

import numpy as np

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
ID2 = np.eye(2, dtype=complex)
ID4 = np.eye(4, dtype=complex)

BASIS_LABELS = ("uu", "ud", "du", "dd")

#: entrywise tolerance for matrices that must be unitary / Hermitian
UNITARY_TOL = 1e-12
HERMITIAN_TOL = 1e-12
#: tolerance on state normalization (vector norm, density-matrix trace)
NORM_TOL = 1e-10
#: density-matrix eigenvalues may undershoot zero by at most this much
EIGVAL_TOL = 1e-10

for _m in (SIGMA_X, SIGMA_Y, SIGMA_Z, ID2, ID4):
    _m.setflags(write=False)


def is_unitary(matrix: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    """True if ``matrix`` is square and unitary to entrywise tolerance ``tol``."""
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) <= tol)


def is_hermitian(matrix: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    """True if ``matrix`` is square and Hermitian to entrywise tolerance ``tol``."""
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def embed_single(u: np.ndarray, ion: int) -> np.ndarray:
    """Lift a single-qubit unitary onto the register.

    Parameters
    ----------
    u : (2, 2) array
        Single-qubit unitary.
    ion : int
        1 places ``u`` on the left tensor factor (U x I), 2 on the right
        (I x U).

    Returns
    -------
    (4, 4) ndarray
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValueError(f"embed_single expects a 2x2 matrix, got shape {u.shape}")
    if not is_unitary(u):
        raise ValueError("embed_single expects a unitary matrix")
    if ion == 1:
        return np.kron(u, ID2)
    if ion == 2:
        return np.kron(ID2, u)
    raise ValueError(f"ion must be 1 or 2, got {ion!r}")


def exp_hermitian(h: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """exp(-i * scale * H) for Hermitian H, via eigendecomposition.

    This is the reference exponential used to cross-check every
    closed-form gate constructor.
    """
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h):
        raise ValueError("exp_hermitian expects a Hermitian matrix")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * scale * w)) @ v.conj().T


class TwoQubitState:
    """Pure or mixed state of the two-ion register.

    Use the classmethods :meth:`pure`, :meth:`mixed` and :meth:`up_up` to
    construct instances; the raw constructor is internal.
    """

    __slots__ = ("_vec", "_rho")

    def __init__(self, vec=None, rho=None, validate: bool = True):
        if (vec is None) == (rho is None):
            raise ValueError("provide exactly one of vec or rho")
        if vec is not None:
            vec = np.asarray(vec, dtype=complex)
            if validate:
                if vec.shape != (4,):
                    raise ValueError(f"pure state needs 4 amplitudes, got shape {vec.shape}")
                norm = np.linalg.norm(vec)
                if abs(norm - 1.0) > NORM_TOL:
                    raise ValueError(f"pure state norm {norm!r} deviates from 1 by more than {NORM_TOL}")
            vec = vec.copy()
            vec.setflags(write=False)
        if rho is not None:
            rho = np.asarray(rho, dtype=complex)
            if validate:
                if rho.shape != (4, 4):
                    raise ValueError(f"density matrix must be 4x4, got shape {rho.shape}")
                tr = np.trace(rho)
                if abs(tr - 1.0) > NORM_TOL:
                    raise ValueError(f"density-matrix trace {tr!r} deviates from 1 by more than {NORM_TOL}")
                if not is_hermitian(rho, tol=NORM_TOL):
                    raise ValueError("density matrix must be Hermitian")
                evals = np.linalg.eigvalsh(rho)
                if evals.min() < -EIGVAL_TOL:
                    raise ValueError(f"density matrix has negative eigenvalue {evals.min()!r}")
            rho = rho.copy()
            rho.setflags(write=False)
        self._vec = vec
        self._rho = rho

    # ------------------------------------------------------------------ #
    # constructors

    @classmethod
    def pure(cls, amplitudes) -> "TwoQubitState":
        """Normalized pure state from 4 complex amplitudes (basis order uu, ud, du, dd)."""
        return cls(vec=amplitudes)

    @classmethod
    def mixed(cls, rho) -> "TwoQubitState":
        """Mixed state from a 4x4 density matrix."""
        return cls(rho=rho)

    @classmethod
    def up_up(cls) -> "TwoQubitState":
        """The prepared register state |uu> (both ions bright)."""
        return cls(vec=np.array([1.0, 0.0, 0.0, 0.0], dtype=complex), validate=False)

    # ------------------------------------------------------------------ #
    # inspection

    @property
    def is_pure(self) -> bool:
        return self._vec is not None

    @property
    def vector(self) -> np.ndarray:
        """Amplitude vector; raises for mixed states."""
        if self._vec is None:
            raise ValueError("state is mixed; it has no amplitude vector")
        return self._vec

    @property
    def density_matrix(self) -> np.ndarray:
        """4x4 density matrix (computed from the vector for pure states)."""
        if self._rho is not None:
            return self._rho
        return np.outer(self._vec, self._vec.conj())

    def as_mixed(self) -> "TwoQubitState":
        """Equivalent state in density-matrix form."""
        if self._rho is not None:
            return self
        return TwoQubitState(rho=self.density_matrix, validate=False)

    def populations(self) -> np.ndarray:
        """Diagonal occupation probabilities (p_uu, p_ud, p_du, p_dd).

        Entries are clipped at zero (numerical noise only); the sum stays
        within 1e-10 of one.
        """
        if self._vec is not None:
            p = np.abs(self._vec) ** 2
        else:
            p = np.real(np.diag(self._rho)).copy()
        return np.clip(p, 0.0, None)

    def purity(self) -> float:
        """tr(rho^2); 1 for pure states, 0.25 for the maximally mixed state."""
        if self._vec is not None:
            return 1.0
        rho = self._rho
        return float(np.real(np.trace(rho @ rho)))

    def reduced_bloch(self, ion: int) -> np.ndarray:
        """Bloch vector (x, y, z) of one ion after tracing out the other."""
        rho = np.reshape(self.density_matrix, (2, 2, 2, 2))
        if ion == 1:
            r = np.einsum("ikjk->ij", rho)
        elif ion == 2:
            r = np.einsum("kikj->ij", rho)
        else:
            raise ValueError(f"ion must be 1 or 2, got {ion!r}")
        return np.array(
            [
                np.real(np.trace(r @ SIGMA_X)),
                np.real(np.trace(r @ SIGMA_Y)),
                np.real(np.trace(r @ SIGMA_Z)),
            ]
        )

    def overlap(self, target) -> float:
        """Fidelity <psi|rho|psi> against a pure target state.

        ``target`` may be a 4-vector of amplitudes or a pure TwoQubitState.
        """
        if isinstance(target, TwoQubitState):
            target = target.vector
        t = np.asarray(target, dtype=complex)
        if t.shape != (4,):
            raise ValueError("overlap target must be a pure 4-amplitude state")
        if self._vec is not None:
            return float(np.abs(np.vdot(t, self._vec)) ** 2)
        return float(np.real(np.vdot(t, self._rho @ t)))

    # ------------------------------------------------------------------ #
    # evolution

    def apply(self, u: np.ndarray) -> "TwoQubitState":
        """Return the state after the 4x4 unitary ``u`` (rho -> U rho U+)."""
        u = np.asarray(u, dtype=complex)
        if u.shape != (4, 4):
            raise ValueError(f"apply expects a 4x4 operator, got shape {u.shape}")
        if self._vec is not None:
            return TwoQubitState(vec=u @ self._vec, validate=False)
        return TwoQubitState(rho=u @ self._rho @ u.conj().T, validate=False)

    def __repr__(self) -> str:
        kind = "pure" if self.is_pure else "mixed"
        pops = ", ".join(f"{lbl}={p:.4f}" for lbl, p in zip(BASIS_LABELS, self.populations()))
        return f"TwoQubitState({kind}; {pops})"
