"""Reduced two-qubit H2 Hamiltonian: coefficient ingestion, exact ground
energy, and energy assembly from measured expectations.

Term order is fixed as (I, Z1, Z2, Z1Z2, Y1Y2, X1X2); qubit 1 of the
operator symbols is qubit index 0 here (least-significant bit).
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .densesim import pauli_matrix
from .errors import CoefficientParseError, DataError

TERM_WORDS = ("II", "ZI", "IZ", "ZZ", "YY", "XX")

BUNDLED_COEFFICIENTS = "bundled"


@dataclass(frozen=True)
class ObservableSum:
    """Coefficients (hartree) paired with two-qubit Pauli words."""

    terms: tuple[tuple[float, str], ...]

    def __post_init__(self):
        if not 1 <= len(self.terms) <= 6:
            raise DataError("observable must have 1..6 terms")
        for _, word in self.terms:
            if len(word) != 2 or any(c not in "IXYZ" for c in word):
                raise DataError(f"bad Pauli word {word!r}")

    def matrix(self) -> np.ndarray:
        return sum(c * pauli_matrix(w) for c, w in self.terms)


@dataclass(frozen=True)
class CoefficientTable:
    """Rows of (bond length in angstrom, g0..g5 in hartree), r strictly increasing."""

    rows: tuple[tuple[float, tuple[float, ...]], ...]

    def __post_init__(self):
        rs = [r for r, _ in self.rows]
        if any(b <= a for a, b in zip(rs, rs[1:])):
            raise DataError("bond lengths must be strictly increasing")
        for _, g in self.rows:
            if len(g) != 6:
                raise DataError("each row needs exactly 6 coefficients")

    @property
    def bond_lengths(self) -> tuple[float, ...]:
        return tuple(r for r, _ in self.rows)

    def coefficients(self, r: float) -> tuple[float, ...]:
        for row_r, g in self.rows:
            if row_r == r:
                return g
        nearest = sorted(self.bond_lengths, key=lambda x: abs(x - r))[:3]
        raise DataError(
            f"bond length {r} not in table (no interpolation); nearest rows: {nearest}"
        )


def default_coefficients_path() -> Path:
    return Path(
        importlib.resources.files("vqemit").joinpath("data/h2_sto3g_coefficients.csv")
    )


def load_coefficients(path: str | Path) -> CoefficientTable:
    """Parse a coefficient CSV (header r_angstrom,g0..g5; # starts a comment)."""
    if str(path) == BUNDLED_COEFFICIENTS:
        path = default_coefficients_path()
    path = Path(path)
    if not path.exists():
        raise DataError(f"coefficient file not found: {path}")
    header_seen = False
    rows: list[tuple[float, tuple[float, ...]]] = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            if line != "r_angstrom,g0,g1,g2,g3,g4,g5":
                raise CoefficientParseError(f"unexpected header {line!r}", lineno)
            header_seen = True
            continue
        fields = line.split(",")
        if len(fields) != 7:
            raise CoefficientParseError(f"expected 7 columns, got {len(fields)}", lineno)
        try:
            values = [float(f) for f in fields]
        except ValueError as exc:
            raise CoefficientParseError(str(exc), lineno) from exc
        rows.append((values[0], tuple(values[1:])))
    if not header_seen:
        raise CoefficientParseError("missing header row")
    if not rows:
        raise CoefficientParseError("table has a header but no data rows")
    try:
        return CoefficientTable(tuple(rows))
    except DataError as exc:
        raise CoefficientParseError(str(exc)) from exc


def hamiltonian(table: CoefficientTable, r: float) -> ObservableSum:
    """Six-term operator at an exact table bond length."""
    g = table.coefficients(r)
    return ObservableSum(tuple(zip(g, TERM_WORDS)))


def exact_ground_energy(h: ObservableSum) -> float:
    """Minimum eigenvalue of the 4x4 operator matrix."""
    return float(np.linalg.eigvalsh(h.matrix())[0])


def assemble_energy(
    g: tuple[float, ...] | list[float],
    z1: float,
    z2: float,
    z1z2: float,
    x1x2: float,
    y1y2: float | None = None,
) -> float:
    """E = g0 + g1<Z1> + g2<Z2> + g3<Z1Z2> + g4<Y1Y2> + g5<X1X2>.

    When <Y1Y2> is not measured it is substituted with -<X1X2>, exact for
    the noise-free ansatz family.
    """
    if len(g) != 6:
        raise DataError("need 6 coefficients")
    values = [z1, z2, z1z2, x1x2] + ([] if y1y2 is None else [y1y2])
    for v in values:
        if abs(v) > 1.0 + 1e-6:
            raise DataError(f"expectation {v} outside [-1, 1]")
    yy = -x1x2 if y1y2 is None else y1y2
    return float(g[0] + g[1] * z1 + g[2] * z2 + g[3] * z1z2 + g[4] * yy + g[5] * x1x2)
