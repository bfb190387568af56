"""One-particle reduced density matrices and natural occupation spectra.

The 1-RDM of a CI vector is ``rho[p-1, q-1] = <Psi| a+_q a_p |Psi>`` — real,
symmetric, trace ``N``, eigenvalues between 0 and 1.  Its eigenvalues,
sorted in descending order, are the natural occupation numbers that all
constraint analysis runs on; its eigenvectors define the natural orbitals.

When the vector lives in a spin-projection sector, every cross-spin element
of the 1-RDM vanishes identically (a single spin flip leaves the sector),
so diagonalization proceeds block by block and natural orbitals inherit
definite spins.  The merged spectrum is still sorted globally.

Sorting is deterministic under degeneracy: descending occupation, up before
down, block order last.  Exactly which orbital of a tied group comes first
is physically meaningless — the ``degeneracy_groups`` of the spectrum say
which positions are interchangeable, and constraint evaluation downstream
warns when a result depends on such a choice.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .ci import CIVector, OrbitalRotation
from .errors import SpectralRangeError
from .fock import DOWN, UP, SpinOrbitalLayout
from .integrals import SpinOrbitalIntegrals

TRACE_TOL = 1e-10
RANGE_TOL = 1e-10
DEFAULT_TIE_TOL = 1e-8


@dataclass
class OneRDM:
    """A one-particle reduced density matrix over ``m`` spin orbitals."""

    rho: np.ndarray
    spin_blocked: bool = False
    layout: SpinOrbitalLayout | None = None

    def __post_init__(self) -> None:
        self.rho = np.asarray(self.rho, dtype=float)
        m = self.rho.shape[0]
        if self.rho.shape != (m, m):
            raise ValueError("density matrix must be square")

    @property
    def m(self) -> int:
        return self.rho.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.rho))


def one_rdm(vector: CIVector) -> OneRDM:
    """The 1-RDM of a normalized CI vector.

    Runs over determinant pairs differing by at most a single substitution;
    everything else cannot contribute.  The result is symmetric by
    construction.
    """
    vector.require_normalized(1e-10)
    space = vector.space
    m = space.m
    c = vector.coeffs
    rho = np.zeros((m, m))

    masks = [det.mask for det in space]
    for i, det in enumerate(space):
        weight = c[i] * c[i]
        for p in det.orbitals():
            rho[p - 1, p - 1] += weight

    for i in range(len(space)):
        for j in range(i + 1, len(space)):
            diff = masks[i] ^ masks[j]
            if diff.bit_count() != 2:
                continue
            a = (diff & masks[i]).bit_length()  # orbital only in det i
            b = (diff & masks[j]).bit_length()  # orbital only in det j
            # phase of <K_i| a+_a a_b |K_j>: annihilate b, create a
            k1 = masks[j] ^ (1 << (b - 1))
            phase = 1
            if (masks[j] & ((1 << (b - 1)) - 1)).bit_count() % 2:
                phase = -phase
            if (k1 & ((1 << (a - 1)) - 1)).bit_count() % 2:
                phase = -phase
            value = phase * c[i] * c[j]
            rho[b - 1, a - 1] += value
            rho[a - 1, b - 1] += value

    blocked = False
    if space.layout is not None:
        up = [i - 1 for i in space.layout.indices_with_spin(UP)]
        down = [i - 1 for i in space.layout.indices_with_spin(DOWN)]
        blocked = bool(
            up and down and np.abs(rho[np.ix_(up, down)]).max() <= 1e-12
        )

    return OneRDM(rho, spin_blocked=blocked, layout=space.layout)


@dataclass
class OccupationSpectrum:
    """Natural occupations sorted in descending order.

    ``natural_rotation`` maps the original orbitals to the natural ones
    (``None`` for spectra supplied as bare numbers).  ``degeneracy_groups``
    partitions the 1-based positions into runs whose occupations agree
    within the tie tolerance used at construction.
    """

    n: np.ndarray
    N: int
    natural_rotation: OrbitalRotation | None = None
    degeneracy_groups: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self) -> None:
        self.n = np.asarray(self.n, dtype=float)

    @property
    def m(self) -> int:
        return len(self.n)

    @classmethod
    def from_occupations(
        cls,
        values: Sequence[float],
        N: int | None = None,
        tie_tolerance: float = DEFAULT_TIE_TOL,
    ) -> OccupationSpectrum:
        """Wrap externally supplied occupations (tables, files, CLI input).

        Values are sorted downward and lightly clamped to [0, 1]; the trace
        is NOT forced to be integral, since published occupations are often
        rounded.  ``N`` defaults to the rounded trace.
        """
        n = np.sort(np.asarray(values, dtype=float))[::-1].copy()
        n = _clamp_range(n, tol=1e-6)
        total = float(n.sum())
        if N is None:
            N = int(round(total))
        if not 0 < N <= len(n):
            raise ValueError(f"N={N} inconsistent with {len(n)} occupations")
        return cls(n, N, None, _tie_groups(n, tie_tolerance))

    def to_json(self) -> str:
        return json.dumps(
            {
                "N": self.N,
                "occupations": [float(v) for v in self.n],
                "degeneracy_groups": [list(g) for g in self.degeneracy_groups],
            }
        )


def _clamp_range(n: np.ndarray, tol: float) -> np.ndarray:
    if n.min() < -tol or n.max() > 1.0 + tol:
        raise SpectralRangeError(
            f"occupations outside [0,1]: min {n.min()!r}, max {n.max()!r}"
        )
    return np.clip(n, 0.0, 1.0)


def _tie_groups(n: np.ndarray, tie_tolerance: float) -> tuple[tuple[int, ...], ...]:
    groups: list[list[int]] = [[1]]
    for i in range(1, len(n)):
        if n[i - 1] - n[i] <= tie_tolerance:
            groups[-1].append(i + 1)
        else:
            groups.append([i + 1])
    return tuple(tuple(g) for g in groups)


def natural_spectrum(
    rdm: OneRDM, tie_tolerance: float = DEFAULT_TIE_TOL
) -> OccupationSpectrum:
    """Diagonalize a 1-RDM into occupations and a natural-orbital rotation.

    Spin-blocked matrices are diagonalized per block so the rotation stays
    spin-blocked and sector-safe.  Natural-orbital rows are sign-fixed the
    same way CI vectors are (largest component positive).
    """
    trace = rdm.trace
    N = int(round(trace))
    if abs(trace - N) > TRACE_TOL:
        raise SpectralRangeError(f"1-RDM trace {trace!r} is not close to an integer")

    if rdm.spin_blocked and rdm.layout is not None:
        entries = []  # (occupation, spin_rank, block_position, row)
        for spin_rank, spin in enumerate((UP, DOWN)):
            idx = [i - 1 for i in rdm.layout.indices_with_spin(spin)]
            if not idx:
                continue
            vals, vecs = np.linalg.eigh(rdm.rho[np.ix_(idx, idx)])
            for pos, val in enumerate(vals[::-1]):
                row = np.zeros(rdm.m)
                row[idx] = vecs[:, len(vals) - 1 - pos]
                entries.append((float(val), spin_rank, pos, row, spin))
        entries.sort(key=lambda e: (-e[0], e[1], e[2]))
        n = np.array([e[0] for e in entries])
        U = np.array([_sign_fix(e[3]) for e in entries])
        spins = tuple(e[4] for e in entries)
        rotation = OrbitalRotation(U, spin_blocked=True, row_spins=spins)
    else:
        vals, vecs = np.linalg.eigh(rdm.rho)
        n = vals[::-1].copy()
        U = np.array([_sign_fix(vecs[:, rdm.m - 1 - i]) for i in range(rdm.m)])
        rotation = OrbitalRotation(U)

    n = _clamp_range(n, tol=RANGE_TOL)
    return OccupationSpectrum(n, N, rotation, _tie_groups(n, tie_tolerance))


def _sign_fix(row: np.ndarray) -> np.ndarray:
    lead = int(np.argmax(np.abs(row)))
    return -row if row[lead] < 0 else row


def smith_check(spectrum: OccupationSpectrum, tol: float = 1e-8) -> tuple[bool, float]:
    """Whether the sorted occupations come in degenerate pairs.

    Time-reversal-symmetric singlet states of even particle number have
    doubly degenerate natural occupations; the returned deviation is the
    largest in-pair mismatch ``|n(2k-1) - n(2k)|``.
    """
    if spectrum.m % 2:
        raise ValueError("pair degeneracy needs an even number of orbitals")
    pairs = spectrum.n.reshape(-1, 2)
    deviation = float(np.abs(pairs[:, 0] - pairs[:, 1]).max())
    return deviation <= tol, deviation


def hf_distance(spectrum: OccupationSpectrum) -> float:
    """How far the leading occupations sit from a single determinant:
    ``sqrt(sum_{i<=N} (1-n_i)^2)``, the depletion of the N strongest
    natural orbitals.  Zero exactly for a one-determinant state."""
    holes = 1.0 - spectrum.n[: spectrum.N]
    return float(np.sqrt(np.sum(holes * holes)))
