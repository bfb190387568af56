"""Super-selection filtering and force-pinned truncated solves.

A constraint ``D = kappa0 + sum_i kappa_i n_i`` lifts to a one-particle
operator ``D = kappa0 + sum_i kappa_i a+_i a_i`` that is diagonal in the
determinant basis: determinant ``K`` is an eigenvector with the integer
eigenvalue ``kappa0 + sum_{i in K} kappa_i``.  A state pinned to the facet
``D = 0`` is annihilated by the operator, so its expansion can only touch
determinants of eigenvalue zero — the super-selection rule.  Filtering a
configuration space down to those determinants and re-solving inside them
is the *force-pinned* approximation to the ground state.

Orbital labels here are natural-orbital labels ordered by decreasing
occupation; :func:`pinned_solve` maintains that ordering self-consistently
by re-diagonalizing the truncated 1-RDM until the occupations stop moving.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ci import CIVector, build_hamiltonian, solve_ground
from .errors import (
    NoSurvivorsError,
    RegimeError,
    RepresentabilityError,
    SectorError,
    WidthError,
)
from .fock import (
    DOWN,
    UP,
    ConfigurationSpace,
    Determinant,
    ExcitationCensus,
    SpinOrbitalLayout,
    census,
    enumerate_space,
)
from .gpc import GPConstraint
from .integrals import SpinOrbitalIntegrals
from .rdm import OccupationSpectrum, natural_spectrum, one_rdm


def constraint_eigenvalue(constraint: GPConstraint, det: Determinant) -> int:
    """The integer eigenvalue of the lifted constraint on a determinant."""
    if constraint.m != det.m:
        raise WidthError("constraint and determinant have different widths")
    return constraint.kappa0 + sum(constraint.kappa[i - 1] for i in det.orbitals())


@dataclass(frozen=True)
class PinnedSpace:
    """A configuration space filtered by one or more pinned constraints."""

    base: ConfigurationSpace
    imposed: tuple[GPConstraint, ...]
    survivors: ConfigurationSpace

    @property
    def removed(self) -> int:
        return len(self.base) - len(self.survivors)

    def __len__(self) -> int:
        return len(self.survivors)


def filter_pinned(
    space: ConfigurationSpace, constraints: Sequence[GPConstraint]
) -> PinnedSpace:
    """Keep the determinants with eigenvalue zero under every constraint.

    Simultaneous filtering equals sequential filtering in any order, since
    the lifted operators are all diagonal here.  The result may be empty;
    callers that cannot use an empty space raise on it.
    """
    imposed = tuple(constraints)
    for c in imposed:
        if c.m != space.m:
            raise WidthError(f"constraint {c.label} has width {c.m}, space {space.m}")
    survivors = space.restrict(
        lambda det: all(constraint_eigenvalue(c, det) == 0 for c in imposed)
    )
    return PinnedSpace(space, imposed, survivors)


def pinned_census(
    space: ConfigurationSpace,
    constraints: Sequence[GPConstraint],
    reference: Determinant,
) -> ExcitationCensus:
    """Excitation census of the surviving determinants."""
    pinned = filter_pinned(space, constraints)
    if len(pinned) == 0:
        raise NoSurvivorsError(
            "no determinant satisfies all imposed constraints"
        )
    return census(pinned.survivors, reference)


def ls_reconstruct_36(spectrum: OccupationSpectrum, regime: str) -> CIVector:
    """Rebuild a rank-six wave function from its occupations alone.

    In either spin-compensated regime the state is fixed (up to orbital
    phases) by three determinants in the natural basis, with amplitudes
    that are square roots of occupations:

        weak    sqrt(n3)|123> + sqrt(n5)|145> + sqrt(n6)|246>
        strong  sqrt(n4)|124> + sqrt(n5)|135> + sqrt(n6)|236>

    in close analogy to the Lowdin-Shull two-electron functional.
    """
    if spectrum.m != 6 or spectrum.N != 3:
        raise ValueError("reconstruction applies to (N, m) = (3, 6) only")
    n = spectrum.n
    pairs = n + n[::-1]
    if np.abs(pairs - 1.0).max() > 1e-8:
        raise RepresentabilityError(
            "occupations do not satisfy the rank-six pair sums n_r + n_{7-r} = 1"
        )

    if regime == "weak":
        if abs(n[0] + n[1] + n[3] - 2.0) > 1e-8:
            raise RegimeError("spectrum is not on the weak facet n1+n2+n4 = 2")
        amplitudes = {(1, 2, 3): n[2], (1, 4, 5): n[4], (2, 4, 6): n[5]}
    elif regime == "strong":
        if abs(n[0] + n[1] + n[2] - 2.0) > 1e-8:
            raise RegimeError("spectrum is not on the strong plane n1+n2+n3 = 2")
        amplitudes = {(1, 2, 4): n[3], (1, 3, 5): n[4], (2, 3, 6): n[5]}
    else:
        raise ValueError(f"regime must be 'weak' or 'strong', not {regime!r}")

    space = enumerate_space(3, 6)
    coeffs = np.zeros(len(space))
    for orbitals, weight in amplitudes.items():
        coeffs[space.index_of(Determinant.from_orbitals(orbitals, 6))] = np.sqrt(
            max(weight, 0.0)
        )
    coeffs /= np.linalg.norm(coeffs)
    return CIVector(space, coeffs)


@dataclass(frozen=True)
class SectorPreset:
    """A named (layout, sector) combination for census studies."""

    name: str
    N: int
    layout: SpinOrbitalLayout
    sector: int
    description: str

    def space(self) -> ConfigurationSpace:
        return enumerate_space(self.N, self.layout.m, self.layout, self.sector)


def _preset_layout(up_positions: tuple[int, ...], m: int) -> SpinOrbitalLayout:
    spins = tuple(UP if i in up_positions else DOWN for i in range(1, m + 1))
    counters = {UP: 0, DOWN: 0}
    spatial = []
    for s in spins:
        counters[s] += 1
        spatial.append(counters[s])
    return SpinOrbitalLayout(spins, tuple(spatial))


SECTOR_PRESETS: dict[str, SectorPreset] = {
    preset.name: preset
    for preset in (
        SectorPreset(
            "4in8-restricted",
            4,
            _preset_layout((1, 2, 3, 5), 8),
            2,
            "four electrons, S_z = 1: natural orbitals 1-3 and 5 up, "
            "4 and 6-8 down (16 determinants)",
        ),
        SectorPreset(
            "4in8-unrestricted",
            4,
            _preset_layout((1, 2, 3, 5, 6), 8),
            2,
            "four electrons, S_z = 1: natural orbitals 1-3, 5 and 6 up, "
            "4, 7 and 8 down (30 determinants)",
        ),
    )
}


@dataclass
class PinnedSolveResult:
    """Outcome of a force-pinned truncated solve next to the full one."""

    full_energy: float
    reference_energy: float
    pinned_energy: float
    recovered_fraction: float
    census_full: ExcitationCensus
    census_pinned: ExcitationCensus
    occupations: np.ndarray
    iterations: int
    converged: bool
    survivors: PinnedSpace

    def to_json(self) -> str:
        return json.dumps(
            {
                "full_energy": self.full_energy,
                "reference_energy": self.reference_energy,
                "pinned_energy": self.pinned_energy,
                "recovered_fraction": self.recovered_fraction,
                "full_correlation": self.reference_energy - self.full_energy,
                "pinned_correlation": self.reference_energy - self.pinned_energy,
                "census_full": json.loads(self.census_full.to_json()),
                "census_pinned": json.loads(self.census_pinned.to_json()),
                "occupations": [float(v) for v in self.occupations],
                "iterations": self.iterations,
                "converged": self.converged,
                "survivor_determinants": json.loads(self.survivors.survivors.to_json()),
            }
        )


def _natural_frame(ints, space, state):
    """Rotate integrals and space into the natural basis of ``state``."""
    spectrum = natural_spectrum(one_rdm(state))
    rotation = spectrum.natural_rotation
    if space.sector is not None and not rotation.spin_blocked:
        raise SectorError(
            "sector-restricted space produced a spin-mixing natural rotation"
        )
    if rotation.spin_blocked:
        layout = rotation.rotated_layout()
        nat_ints = ints.rotated(rotation.U, layout)
        if space.sector is not None:
            nat_space = enumerate_space(space.N, space.m, layout, space.sector)
        else:
            nat_space = ConfigurationSpace(space.N, space.m, space.dets, layout, None)
    else:
        nat_ints = ints.rotated(rotation.U)
        nat_space = ConfigurationSpace(space.N, space.m, space.dets, None, None)
    return spectrum, nat_ints, nat_space


def pinned_solve(
    ints: SpinOrbitalIntegrals,
    space: ConfigurationSpace,
    constraints: Sequence[GPConstraint],
    max_iterations: int = 100,
    occupation_tol: float = 1e-10,
) -> PinnedSolveResult:
    """Solve exactly, then re-solve inside the pinned determinant set.

    The natural-orbital labels the constraints refer to are kept
    self-consistent: after each truncated solve the basis is rotated to
    the new natural orbitals, the sector space is filtered again, and the
    cycle repeats until no occupation moves by more than
    ``occupation_tol`` (or ``max_iterations`` is hit, which is reported
    rather than raised).

    The recovered correlation fraction compares against the energy of the
    reference determinant |1..N> in the natural basis of the *full*
    solution — a mean-field yardstick that needs no self-consistent-field
    machinery.
    """
    if ints.m != space.m:
        raise WidthError("integral width does not match the space")
    if not constraints:
        raise ValueError("at least one constraint is required")

    full_state = solve_ground(ints, space)[0]
    spectrum, nat_ints, nat_space = _natural_frame(ints, space, full_state)

    reference = Determinant.from_orbitals(range(1, space.N + 1), space.m)
    ref_space = ConfigurationSpace(space.N, space.m, (reference,))
    reference_energy = float(build_hamiltonian(nat_ints, ref_space)[0, 0])
    census_full = census(nat_space, reference)

    previous = spectrum.n
    converged = False
    iterations = 0
    pinned_space = None
    truncated = None
    while iterations < max_iterations:
        iterations += 1
        pinned_space = filter_pinned(nat_space, constraints)
        if len(pinned_space) == 0:
            raise NoSurvivorsError(
                "imposed constraints leave no determinants to expand in"
            )
        truncated = solve_ground(nat_ints, pinned_space.survivors)[0]
        tspectrum, next_ints, next_space = _natural_frame(
            nat_ints, nat_space, truncated
        )
        drift = float(np.abs(tspectrum.n - previous).max())
        previous = tspectrum.n
        if drift < occupation_tol:
            converged = True
            break
        nat_ints, nat_space = next_ints, next_space

    census_pinned = census(pinned_space.survivors, reference)
    full_correlation = reference_energy - full_state.energy
    pinned_correlation = reference_energy - truncated.energy
    if abs(full_correlation) < 1e-12:
        recovered = 1.0
    else:
        recovered = pinned_correlation / full_correlation

    return PinnedSolveResult(
        full_energy=full_state.energy,
        reference_energy=reference_energy,
        pinned_energy=truncated.energy,
        recovered_fraction=float(recovered),
        census_full=census_full,
        census_pinned=census_pinned,
        occupations=previous,
        iterations=iterations,
        converged=converged,
        survivors=pinned_space,
    )
