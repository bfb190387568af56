"""Determinants, spin-orbital layouts, and configuration spaces.

A Slater determinant over ``m`` spin orbitals is stored as a Python integer
bitmask: bit ``i - 1`` set means spin orbital ``i`` is occupied.  Orbital
indices are 1-based everywhere in the public interface, matching the labels
used for occupation numbers and constraint coefficients.  Because masks are
plain integers, determinant identity, set algebra, and excitation degrees
reduce to bitwise operations.

The maximum width is 64 spin orbitals.  That bound is far beyond what the
dense solver can use; it exists so masks stay cheap machine-sized integers.

Functions
=========
interleaved_layout : spin orbitals ordered 1-up, 1-down, 2-up, 2-down, ...
blocked_layout     : all up spin orbitals first, then all down
enumerate_space    : all N-electron determinants, optionally in an S_z sector
excitation_degree  : half the Hamming distance between two determinants
census             : tally determinants by excitation degree from a reference
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Callable, Iterable, Iterator, Literal

from .errors import SectorError, WidthError

MAX_WIDTH = 64

Spin = Literal["up", "down"]
UP: Spin = "up"
DOWN: Spin = "down"


@dataclass(frozen=True)
class SpinOrbitalLayout:
    """Assignment of a spin and a spatial-orbital label to each spin orbital.

    ``spin_of[i - 1]`` and ``spatial_of[i - 1]`` describe spin orbital ``i``.
    Spatial labels are 1-based; a spatial orbital may appear at most once per
    spin.  A layout is what lets particle-number bookkeeping be split into an
    up block and a down block.
    """

    spin_of: tuple[Spin, ...]
    spatial_of: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.spin_of) != len(self.spatial_of):
            raise ValueError("spin_of and spatial_of must have equal length")
        if len(self.spin_of) > MAX_WIDTH:
            raise WidthError(f"more than {MAX_WIDTH} spin orbitals")
        for spin in (UP, DOWN):
            labels = [sp for s, sp in zip(self.spin_of, self.spatial_of) if s == spin]
            if len(set(labels)) != len(labels):
                raise ValueError(f"duplicate spatial label within the {spin} block")

    @property
    def m(self) -> int:
        return len(self.spin_of)

    def indices_with_spin(self, spin: Spin) -> tuple[int, ...]:
        """1-based spin-orbital indices carrying the given spin."""
        return tuple(i + 1 for i, s in enumerate(self.spin_of) if s == spin)

    def truncated(self, m: int) -> SpinOrbitalLayout:
        """The layout of the first ``m`` spin orbitals."""
        if not 0 < m <= self.m:
            raise ValueError(f"cannot truncate a width-{self.m} layout to {m}")
        return SpinOrbitalLayout(self.spin_of[:m], self.spatial_of[:m])


def interleaved_layout(n_spatial: int) -> SpinOrbitalLayout:
    """Layout 1-up, 1-down, 2-up, 2-down, ..., n-up, n-down."""
    spins: list[Spin] = []
    spatial: list[int] = []
    for k in range(1, n_spatial + 1):
        spins += [UP, DOWN]
        spatial += [k, k]
    return SpinOrbitalLayout(tuple(spins), tuple(spatial))


def blocked_layout(n_spatial: int) -> SpinOrbitalLayout:
    """Layout 1-up, ..., n-up, 1-down, ..., n-down."""
    spins = (UP,) * n_spatial + (DOWN,) * n_spatial
    spatial = tuple(range(1, n_spatial + 1)) * 2
    return SpinOrbitalLayout(spins, spatial)


@dataclass(frozen=True, order=True)
class Determinant:
    """An occupation-number basis state over ``m`` spin orbitals."""

    mask: int
    m: int

    def __post_init__(self) -> None:
        if self.m > MAX_WIDTH:
            raise WidthError(f"determinant width {self.m} exceeds {MAX_WIDTH}")
        if self.mask < 0 or self.mask >> self.m:
            raise ValueError(f"mask {self.mask:#x} out of range for m={self.m}")

    @classmethod
    def from_orbitals(cls, orbitals: Iterable[int], m: int) -> Determinant:
        """Build from 1-based occupied orbital indices."""
        mask = 0
        for i in orbitals:
            if not 1 <= i <= m:
                raise ValueError(f"orbital index {i} outside 1..{m}")
            bit = 1 << (i - 1)
            if mask & bit:
               raise ValueError(f"orbital index {i} repeated")
            mask |= bit
        return cls(mask, m)

    @property
    def n_electrons(self) -> int:
        return self.mask.bit_count()

    def orbitals(self) -> tuple[int, ...]:
        """Occupied orbital indices, ascending, 1-based."""
        return tuple(i + 1 for i in range(self.m) if self.mask >> i & 1)

    def occupied(self, i: int) -> bool:
        return bool(self.mask >> (i - 1) & 1)

    def count_with_spin(self, layout: SpinOrbitalLayout, spin: Spin) -> int:
        return sum(1 for i in self.orbitals() if layout.spin_of[i - 1] == spin)

    def __str__(self) -> str:
        return "[" + ",".join(str(i) for i in self.orbitals()) + "]"


@dataclass(frozen=True)
class ConfigurationSpace:
    """An ordered basis of determinants with fixed particle number and width.

    ``sector`` is twice the spin projection (the integer 2*S_z), or ``None``
    when the space is not spin-resolved.  Determinants are kept in increasing
    mask order, which is the canonical ordering used by every matrix built on
    the space.
    """

    N: int
    m: int
    dets: tuple[Determinant, ...]
    layout: SpinOrbitalLayout | None = None
    sector: int | None = None

    def __post_init__(self) -> None:
        if self.layout is not None and self.layout.m != self.m:
            raise WidthError("layout width differs from space width")

    def __len__(self) -> int:
        return len(self.dets)

    def __iter__(self) -> Iterator[Determinant]:
        return iter(self.dets)

    def __getitem__(self, i: int) -> Determinant:
        return self.dets[i]

    @cached_property
    def _index(self) -> dict[int, int]:
        return {d.mask: i for i, d in enumerate(self.dets)}

    def index_of(self, det: Determinant) -> int:
        """Position of ``det`` in the basis ordering (KeyError if absent)."""
        if det.m != self.m:
            raise WidthError("determinant width differs from space width")
        return self._index[det.mask]

    def __contains__(self, det: Determinant) -> bool:
        return det.m == self.m and det.mask in self._index

    def restrict(self, keep: Callable[[Determinant], bool]) -> ConfigurationSpace:
        """Subspace of determinants passing ``keep``, order preserved."""
        kept = tuple(d for d in self.dets if keep(d))
        return ConfigurationSpace(self.N, self.m, kept, self.layout, self.sector)

    def to_json(self) -> str:
        return json.dumps([list(d.orbitals()) for d in self.dets])


def enumerate_space(
    N: int,
    m: int,
    layout: SpinOrbitalLayout | None = None,
    sector: int | None = None,
) -> ConfigurationSpace:
    """All determinants of ``N`` electrons in ``m`` spin orbitals.

    With ``sector`` (an integer 2*S_z) the enumeration is restricted to
    determinants with ``n_up - n_down == sector``; a ``layout`` is then
    required to know which spin orbitals are up.  Determinants come out in
    increasing mask order.
    """
    if m > MAX_WIDTH:
        raise WidthError(f"m={m} exceeds the {MAX_WIDTH}-orbital width limit")
    if not 0 < N <= m:
        raise ValueError(f"need 0 < N <= m, got N={N}, m={m}")

    if sector is None:
        masks = sorted(_mask_of(c) for c in combinations(range(m), N))
    else:
        if layout is None:
            raise SectorError("a sector restriction requires a layout")
        if (N + sector) % 2:
            raise SectorError(f"no determinant of {N} electrons has 2*S_z={sector}")
        n_up = (N + sector) // 2
        n_down = N - n_up
        up = [i - 1 for i in layout.indices_with_spin(UP)]
        down = [i - 1 for i in layout.indices_with_spin(DOWN)]
        if not (0 <= n_up <= len(up) and 0 <= n_down <= len(down)):
            raise SectorError(
                f"sector 2*S_z={sector} needs {n_up} up and {n_down} down electrons, "
                f"but the layout has {len(up)} up / {len(down)} down orbitals"
            )
        masks = [
            _mask_of(cu) | _mask_of(cd)
            for cu in combinations(up, n_up)
            for cd in combinations(down, n_down)
        ]
        masks.sort()

    dets = tuple(Determinant(mask, m) for mask in masks)
    return ConfigurationSpace(N, m, dets, layout, sector)


def _mask_of(bit_positions: Iterable[int]) -> int:
    mask = 0
    for b in bit_positions:
        mask |= 1 << b
    return mask


def excitation_degree(reference: Determinant, det: Determinant) -> int:
    """Number of orbital substitutions taking ``reference`` into ``det``."""
    if reference.m != det.m:
        raise WidthError("determinants have different widths")
    if reference.n_electrons != det.n_electrons:
        raise ValueError("determinants carry different particle numbers")
    return (reference.mask ^ det.mask).bit_count() // 2


@dataclass(frozen=True)
class ExcitationCensus:
    """Counts of determinants per excitation degree from a reference."""

    reference: Determinant
    counts: dict[int, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def count(self, degree: int) -> int:
        return self.counts.get(degree, 0)

    @property
    def max_degree(self) -> int:
        return max(self.counts) if self.counts else 0

    def to_json(self) -> str:
        return json.dumps(
            {
                "reference": list(self.reference.orbitals()),
                "counts": {str(k): v for k, v in sorted(self.counts.items())},
                "total": self.total,
            }
        )


def census(space: ConfigurationSpace, reference: Determinant) -> ExcitationCensus:
    """Tally ``space`` by excitation degree relative to ``reference``."""
    if len(space) == 0:
        raise ValueError("cannot take the census of an empty space")
    counts: dict[int, int] = {}
    for det in space:
        d = excitation_degree(reference, det)
        counts[d] = counts.get(d, 0) + 1
    return ExcitationCensus(reference, counts)
