"""Bipartite qudit states: pure amplitude vectors and density matrices.

A state of two d-level systems is stored either as a length d**2 amplitude
vector (pure) or as a d**2 x d**2 density matrix (mixed).  Pure states keep
the cheap amplitude representation; the projector is formed lazily the first
time a mixed-state operation asks for it.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import DimensionError, FileFormatError, StateError

PURE_NORM_TOL = 1e-12
HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
EIGENVALUE_TOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def validate_density_matrix(rho: np.ndarray, *, tol: float = HERMITICITY_TOL,
                            eig_tol: float = EIGENVALUE_TOL) -> None:
    """Raise ``StateError`` unless ``rho`` is Hermitian, unit-trace and PSD.

    ``tol`` bounds the Hermiticity and trace defects, ``eig_tol`` the amount
    by which the smallest eigenvalue may dip below zero.
    """
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise StateError(f"density matrix must be square, got shape {rho.shape}")
    if np.abs(rho - rho.conj().T).max() > tol:
        raise StateError(f"density matrix not Hermitian within {tol:g}")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > max(tol, 10 * np.finfo(float).eps * rho.shape[0]):
        raise StateError(f"density matrix trace {tr!r} differs from 1 beyond {tol:g}")
    evals = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if evals.min() < -eig_tol:
        raise StateError(f"density matrix has eigenvalue {evals.min():g} < -{eig_tol:g}")


class QuditState:
    """State of a d x d bipartite system, pure or mixed.

    Use :meth:`pure` or :meth:`mixed` to construct; both validate their
    invariants (unit norm, respectively Hermitian/trace-one/PSD).  Instances
    are immutable and safe to share across threads.
    """

    __slots__ = ("d", "_vector", "_rho")

    def __init__(self, d: int, vector: np.ndarray | None, rho: np.ndarray | None):
        self.d = d
        self._vector = vector
        self._rho = rho

    @classmethod
    def pure(cls, amplitudes: np.ndarray, d: int | None = None) -> "QuditState":
        """Build a pure state from a length d**2 amplitude vector."""
        vec = np.asarray(amplitudes, dtype=complex).ravel()
        if d is None:
            d = int(round(np.sqrt(vec.size)))
        if d < 2:
            raise DimensionError(f"local dimension must be >= 2, got {d}")
        if vec.size != d * d:
            raise StateError(f"amplitude vector has length {vec.size}, expected {d * d}")
        nrm2 = float(np.vdot(vec, vec).real)
        if abs(nrm2 - 1.0) > PURE_NORM_TOL:
            raise StateError(f"squared norm {nrm2!r} differs from 1 beyond {PURE_NORM_TOL:g}")
        return cls(d, _frozen(vec), None)

    @classmethod
    def mixed(cls, rho: np.ndarray, d: int | None = None, *,
              tol: float = HERMITICITY_TOL) -> "QuditState":
        """Build a mixed state from a d**2 x d**2 density matrix."""
        mat = np.asarray(rho, dtype=complex)
        if d is None:
            d = int(round(np.sqrt(mat.shape[0])))
        if d < 2:
            raise DimensionError(f"local dimension must be >= 2, got {d}")
        if mat.shape != (d * d, d * d):
            raise StateError(f"density matrix has shape {mat.shape}, expected {(d * d, d * d)}")
        validate_density_matrix(mat, tol=tol, eig_tol=max(EIGENVALUE_TOL, tol * 100))
        return cls(d, None, _frozen(mat))

    @property
    def is_pure(self) -> bool:
        return self._vector is not None

    @property
    def vector(self) -> np.ndarray:
        if self._vector is None:
            raise StateError("state is mixed; no amplitude vector available")
        return self._vector

    def density(self) -> np.ndarray:
        """Density matrix of the state (projector for pure states, cached)."""
        if self._rho is None:
            v = self._vector
            self._rho = _frozen(np.outer(v, v.conj()))
        return self._rho

    def __repr__(self) -> str:  # pragma: no cover
        kind = "pure" if self.is_pure else "mixed"
        return f"QuditState(d={self.d}, {kind})"


def reduced_state(state: QuditState, party: str) -> np.ndarray:
    """Partial trace onto one party.

    Parameters
    ----------
    state : QuditState
    party : {'A', 'B'}
        The subsystem to keep.

    Returns
    -------
    numpy.ndarray
        d x d reduced density matrix (Hermitian, unit trace, PSD).
    """
    if party not in ("A", "B"):
        raise ValueError(f"party must be 'A' or 'B', got {party!r}")
    d = state.d
    if state.is_pure:
        psi = state.vector.reshape(d, d)
        if party == "A":
            return psi @ psi.conj().T
        return psi.T @ psi.conj()
    rho = state.density().reshape(d, d, d, d)
    if party == "A":
        return np.trace(rho, axis1=1, axis2=3)
    return np.trace(rho, axis1=0, axis2=2)


def read_density_matrix(path: str | Path, *, tol: float = 1e-8) -> QuditState:
    """Parse a density matrix from the plain-text interchange format.

    The format is: a first line ``d <dim>``, followed by ``dim**2`` rows of
    ``dim**2`` whitespace-separated ``re,im`` entries.  Lines starting with
    ``#`` and blank lines are ignored.  The parsed matrix is validated with
    tolerance ``tol``.
    """
    path = Path(path)
    rows: list[list[complex]] = []
    d = None
    with path.open() as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.strip()
            if not text or text.startswith("#"):
                continue
            if d is None:
                parts = text.split()
                if len(parts) != 2 or parts[0] != "d":
                    raise FileFormatError("expected header 'd <dim>'", line=lineno)
                try:
                    d = int(parts[1])
                except ValueError:
                    raise FileFormatError(f"bad dimension {parts[1]!r}", line=lineno) from None
                if d < 2:
                    raise FileFormatError(f"dimension must be >= 2, got {d}", line=lineno)
                continue
            entries = text.split()
            if len(entries) != d * d:
                raise FileFormatError(
                    f"expected {d * d} entries, found {len(entries)}", line=lineno)
            row = []
            for col, ent in enumerate(entries, start=1):
                pieces = ent.split(",")
                if len(pieces) != 2:
                    raise FileFormatError(
                        f"entry {ent!r} is not of the form 're,im'", line=lineno, column=col)
                try:
                    row.append(complex(float(pieces[0]), float(pieces[1])))
                except ValueError:
                    raise FileFormatError(
                        f"non-numeric entry {ent!r}", line=lineno, column=col) from None
            rows.append(row)
    if d is None:
        raise FileFormatError(f"{path}: empty file")
    if len(rows) != d * d:
        raise FileFormatError(f"expected {d * d} matrix rows, found {len(rows)}")
    try:
        return QuditState.mixed(np.array(rows, dtype=complex), d, tol=tol)
    except StateError as exc:
        raise FileFormatError(f"matrix fails density-matrix validation: {exc}") from exc


def write_density_matrix(path: str | Path, state: QuditState) -> None:
    """Inverse of :func:`read_density_matrix`; used by tests and the CLI."""
    rho = state.density()
    d = state.d
    with Path(path).open("w") as fh:
        fh.write(f"d {d}\n")
        for row in rho:
            fh.write(" ".join(f"{z.real:.17g},{z.imag:.17g}" for z in row) + "\n")
