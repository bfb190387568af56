"""Configuration-interaction vectors, Hamiltonians, and orbital rotations.

Hamiltonians are assembled dense over a :class:`~fermipin.fock.ConfigurationSpace`
using the Slater-Condon rules with antisymmetrized spin-orbital integrals.
Phases follow the package convention: acting on orbital ``p`` of a bitmask
costs ``(-1) ** (occupied orbitals below p)``.  Matrix elements are pure
functions of the determinant pair, so assembly could be parallelized across
rows without changing a single bit of the result; at the space sizes the
dense solver accepts, the serial loop is already cheap.

The solver is plain ``numpy.linalg.eigh`` on the full matrix — no iterative
or sparse machinery — which caps usable spaces at a few thousand
determinants and makes every eigenvalue available for degeneracy checks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    FermipinError,
    NormalizationError,
    RotationError,
    SectorError,
    SpaceTooLargeError,
    WidthError,
)
from .fock import ConfigurationSpace, Determinant, Spin, SpinOrbitalLayout, enumerate_space
from .integrals import SpinOrbitalIntegrals

MAX_DENSE_SPACE = 20000
DEGENERACY_GAP = 1e-10
ORTHOGONALITY_TOL = 1e-10


@dataclass
class CIVector:
    """Expansion coefficients over an ordered determinant basis."""

    space: ConfigurationSpace
    coeffs: np.ndarray
    energy: float | None = None
    degenerate: bool = False

    def __post_init__(self) -> None:
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (len(self.space),):
            raise ValueError("coefficient length does not match the space")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def require_normalized(self, tol: float = 1e-12) -> None:
        if abs(self.norm - 1.0) > tol:
            raise NormalizationError(f"vector norm {self.norm!r} is not 1")

    def leading(self, k: int = 5) -> list[tuple[Determinant, float]]:
        """The ``k`` determinants with the largest weights, heaviest first."""
        order = np.argsort(-np.abs(self.coeffs), kind="stable")[:k]
        return [(self.space[i], float(self.coeffs[i])) for i in order]

    def to_json(self) -> str:
        payload = {
            "energy": self.energy,
            "determinants": [list(d.orbitals()) for d in self.space],
            "coefficients": [float(c) for c in self.coeffs],
        }
        return json.dumps(payload)


@dataclass
class OrbitalRotation:
    """An orthogonal change of spin-orbital basis.

    Row ``p`` of ``U`` gives the expansion of new orbital ``p`` in the old
    ones.  ``spin_blocked`` promises that every new orbital has a definite
    spin, recorded per row in ``row_spins``; only such rotations may be
    applied to sector-restricted CI vectors.
    """

    U: np.ndarray
    spin_blocked: bool = False
    row_spins: tuple[Spin, ...] | None = None

    def __post_init__(self) -> None:
        self.U = np.asarray(self.U, dtype=float)
        m = self.U.shape[0]
        if self.U.shape != (m, m):
            raise RotationError("rotation matrix must be square")
        defect = np.abs(self.U @ self.U.T - np.eye(m)).max()
        if defect > ORTHOGONALITY_TOL:
            raise RotationError(f"matrix is not orthogonal (defect {defect:.2e})")
        if self.spin_blocked and (
            self.row_spins is None or len(self.row_spins) != m
        ):
            raise RotationError("spin-blocked rotation needs one row spin per orbital")

    @property
    def m(self) -> int:
        return self.U.shape[0]

    def rotated_layout(self) -> SpinOrbitalLayout:
        """Layout of the new basis: spatial labels count up within each spin."""
        if not self.spin_blocked:
            raise RotationError("only spin-blocked rotations define a layout")
        counters = {"up": 0, "down": 0}
        spatial = []
        for s in self.row_spins:
            counters[s] += 1
            spatial.append(counters[s])
        return SpinOrbitalLayout(tuple(self.row_spins), tuple(spatial))


def _ann(mask: int, p: int) -> tuple[int, int]:
    bit = 1 << (p - 1)
    phase = -1 if (mask & (bit - 1)).bit_count() % 2 else 1
    return mask ^ bit, phase


def _cre(mask: int, p: int) -> tuple[int, int]:
    bit = 1 << (p - 1)
    phase = -1 if (mask & (bit - 1)).bit_count() % 2 else 1
    return mask | bit, phase


def _single_element(ints, ket_mask: int, p: int, q: int, common: tuple[int, ...]) -> float:
    """<K| H |L> when K = L with q replaced by p."""
    k1, ph1 = _ann(ket_mask, q)
    _, ph2 = _cre(k1, p)
    value = ints.h[p - 1, q - 1]
    for i in common:
        value += ints.g[p - 1, i - 1, q - 1, i - 1]
    return ph1 * ph2 * value


def _double_element(ints, ket_mask: int, ps: tuple[int, int], qs: tuple[int, int]) -> float:
    """<K| H |L> when K and L differ by the pair substitution qs -> ps."""
    p1, p2 = ps
    q1, q2 = qs
    k1, ph1 = _ann(ket_mask, q1)
    k2, ph2 = _ann(k1, q2)
    k3, ph3 = _cre(k2, p2)
    _, ph4 = _cre(k3, p1)
    return ph1 * ph2 * ph3 * ph4 * ints.g[p1 - 1, p2 - 1, q1 - 1, q2 - 1]


def _diagonal_element(ints, orbitals: tuple[int, ...]) -> float:
    value = ints.core_energy
    for p in orbitals:
        value += ints.h[p - 1, p - 1]
    for a, p in enumerate(orbitals):
        for q in orbitals[a + 1 :]:
            value += ints.g[p - 1, q - 1, p - 1, q - 1]
    return value


def build_hamiltonian(ints: SpinOrbitalIntegrals, space: ConfigurationSpace) -> np.ndarray:
    """The dense, exactly symmetric Hamiltonian matrix over ``space``."""
    if ints.m != space.m:
        raise WidthError("integral width does not match the space")
    n = len(space)
    orbs = [det.orbitals() for det in space]
    masks = [det.mask for det in space]

    H = np.zeros((n, n))
    for i in range(n):
        H[i, i] = _diagonal_element(ints, orbs[i])
        for j in range(i + 1, n):
            diff = masks[i] ^ masks[j]
            degree = diff.bit_count() // 2
            if degree > 2:
                continue
            ket = masks[j]
            only_i = sorted(p + 1 for p in range(space.m) if diff >> p & 1 and masks[i] >> p & 1)
            only_j = sorted(p + 1 for p in range(space.m) if diff >> p & 1 and ket >> p & 1)
            if degree == 1:
                common = tuple(
                    p + 1 for p in range(space.m) if (masks[i] & ket) >> p & 1
                )
                value = _single_element(ints, ket, only_i[0], only_j[0], common)
            else:
                value = _double_element(ints, ket, tuple(only_i), tuple(only_j))
            H[i, j] = H[j, i] = value
    return H


def solve_ground(
    ints: SpinOrbitalIntegrals, space: ConfigurationSpace, k: int = 1
) -> list[CIVector]:
    """The ``k`` lowest eigenstates of the Hamiltonian over ``space``.

    Eigenvectors are normalized and sign-fixed so the coefficient of
    largest magnitude (first such, on exact ties) is positive.  A state
    whose eigenvalue sits within 1e-10 of a neighbouring one is flagged
    ``degenerate``: its vector is then an arbitrary basis choice inside
    the degenerate cluster and occupation analyses should be read with
    care.
    """
    if len(space) == 0:
        raise ValueError("cannot solve on an empty space")
    if len(space) > MAX_DENSE_SPACE:
        raise SpaceTooLargeError(
            f"{len(space)} determinants exceed the dense budget of {MAX_DENSE_SPACE}"
        )
    if not 1 <= k <= len(space):
        raise ValueError(f"k={k} outside 1..{len(space)}")

    H = build_hamiltonian(ints, space)
    try:
        values, vectors = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - numpy rarely fails here
        raise FermipinError(f"eigensolver failure: {exc}") from exc

    states = []
    for j in range(k):
        coeffs = vectors[:, j].copy()
        lead = int(np.argmax(np.abs(coeffs)))
        if coeffs[lead] < 0:
            coeffs = -coeffs
        gap_below = values[j] - values[j - 1] if j > 0 else np.inf
        gap_above = values[j + 1] - values[j] if j + 1 < len(values) else np.inf
        states.append(
            CIVector(
                space,
                coeffs,
                energy=float(values[j]),
                degenerate=bool(min(gap_below, gap_above) < DEGENERACY_GAP),
            )
        )
    return states


def rotate_ci(vector: CIVector, rotation: OrbitalRotation) -> CIVector:
    """Re-express ``vector`` in the rotated orbital basis.

    The coefficient of a target determinant ``K`` is
    ``sum_L det(U[K, L]) c_L`` — the determinant of the rotation submatrix
    with rows picked by ``K`` and columns by ``L``.  Sector-restricted
    vectors only admit spin-blocked rotations, which keep the sector intact;
    anything else would scatter amplitude onto determinants outside the
    space.
    """
    space = vector.space
    if rotation.m != space.m:
        raise WidthError("rotation width does not match the space")

    if rotation.spin_blocked:
        new_layout = rotation.rotated_layout()
        if space.layout is not None:
            for p in range(space.m):
                for q in range(space.m):
                    if rotation.row_spins[p] != space.layout.spin_of[q] and (
                        abs(rotation.U[p, q]) > ORTHOGONALITY_TOL
                    ):
                        raise RotationError(
                            "rotation mixes spins despite its spin-blocked promise"
                        )
    elif space.sector is not None:
        raise SectorError("sector-restricted vectors need a spin-blocked rotation")
    else:
        new_layout = None  # a general rotation erases definite spins

    if space.sector is not None:
        out_space = enumerate_space(space.N, space.m, new_layout, space.sector)
    else:
        out_space = ConfigurationSpace(space.N, space.m, space.dets, new_layout, None)

    rows = [np.array(det.orbitals()) - 1 for det in out_space]
    cols = [np.array(det.orbitals()) - 1 for det in space]
    blocks = np.empty((len(out_space), len(space), space.N, space.N))
    for a, r in enumerate(rows):
        sub = rotation.U[r, :]
        for b, c in enumerate(cols):
            blocks[a, b] = sub[:, c]
    overlap = np.linalg.det(blocks)
    new_coeffs = overlap @ vector.coeffs

    norm = float(np.linalg.norm(new_coeffs))
    if abs(norm - vector.norm) > 1e-8:
        raise RotationError(
            f"rotation leaks amplitude out of the space (norm {vector.norm!r} -> {norm!r})"
        )
    if norm > 0.0:
        new_coeffs *= vector.norm / norm

    return CIVector(out_space, new_coeffs, energy=vector.energy,
                    degenerate=vector.degenerate)
