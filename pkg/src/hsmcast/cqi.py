"""Category 10 CQI mapping: modulation, transport block size, code usage and rates.

The bundled table is data, not code, so that tables for other UE categories can
be dropped in from a CSV file with the same schema:

    cqi,modulation,tbs,codes,code_rate,data_rate_kbps

one row per level, levels ascending, modulation in {QPSK, 16QAM}.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import TableError

BUNDLED_TABLE = "cqi_table_cat10.csv"

# One TTI is 2 ms, so a transport block of S bits carries S/2 kbps.
TTI_MS = 2.0

# Published rates are rounded to two decimals; identity checks allow for that.
RATE_TOL_KBPS = 0.5
CODE_RATE_TOL = 0.0005


class Modulation(Enum):
    QPSK = "QPSK"
    QAM16 = "16QAM"

    @property
    def bits_per_code(self) -> int:
        """Bits carried by one channelization code in one TTI."""
        return 960 if self is Modulation.QPSK else 1920


@dataclass(frozen=True)
class CqiEntry:
    cqi: int
    modulation: Modulation
    transport_block_size: int
    num_codes: int
    code_rate: float
    data_rate_kbps: float


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    problems: tuple[str, ...]


class CqiTable:
    """Immutable CQI -> MCS mapping; safe to share across concurrent runs."""

    def __init__(self, entries):
        self.entries: tuple[CqiEntry, ...] = tuple(entries)
        self.n_cqi = len(self.entries)
        self.rates = np.array([e.data_rate_kbps for e in self.entries], dtype=np.float64)
        self.codes = np.array([e.num_codes for e in self.entries], dtype=np.int64)
        self.rates.setflags(write=False)
        self.codes.setflags(write=False)

    def lookup(self, cqi: int) -> CqiEntry:
        if not 1 <= cqi <= self.n_cqi:
            raise ValueError(f"CQI level {cqi} outside [1, {self.n_cqi}]")
        return self.entries[cqi - 1]

    def rate(self, cqi: int) -> float:
        return self.lookup(cqi).data_rate_kbps

    def __len__(self) -> int:
        return self.n_cqi

    def __iter__(self):
        return iter(self.entries)


def validate(table: CqiTable) -> ValidationReport:
    """Check every per-row identity and the cross-row monotonicity rules."""
    problems = []
    seen = set()
    for entry in table.entries:
        row = f"cqi {entry.cqi}"
        if not 1 <= entry.cqi <= 30:
            problems.append(f"{row}: level outside [1, 30]")
        if entry.cqi in seen:
            problems.append(f"{row}: duplicate level")
        seen.add(entry.cqi)
        if not 1 <= entry.num_codes <= 15:
            problems.append(f"{row}: codes number {entry.num_codes} outside [1, 15]")
        if entry.transport_block_size <= 0:
            problems.append(f"{row}: non-positive transport block size")
        expect_rate = entry.transport_block_size / TTI_MS
        if abs(entry.data_rate_kbps - expect_rate) > RATE_TOL_KBPS:
            problems.append(
                f"{row}: data rate {entry.data_rate_kbps} kbps does not match "
                f"TBS/{TTI_MS:g} = {expect_rate:.2f}"
            )
        expect_cr = entry.transport_block_size / (
            entry.num_codes * entry.modulation.bits_per_code
        )
        if abs(entry.code_rate - expect_cr) > CODE_RATE_TOL:
            problems.append(
                f"{row}: code rate {entry.code_rate} does not match "
                f"TBS/(codes*bits_per_code) = {expect_cr:.4f}"
            )

    levels = [e.cqi for e in table.entries]
    if levels != list(range(1, len(levels) + 1)):
        problems.append("levels are not consecutive from 1")
    for prev, cur in zip(table.entries, table.entries[1:]):
        if cur.data_rate_kbps <= prev.data_rate_kbps:
            problems.append(f"cqi {cur.cqi}: data rate not strictly increasing")
        if cur.num_codes < prev.num_codes:
            problems.append(f"cqi {cur.cqi}: codes number decreases")

    return ValidationReport(ok=not problems, problems=tuple(problems))


def _parse_row(row: dict, where: str) -> CqiEntry:
    try:
        modulation = Modulation(row["modulation"].strip())
    except ValueError:
        raise TableError(f"{where}: unknown modulation {row['modulation']!r}")
    try:
        return CqiEntry(
            cqi=int(row["cqi"]),
            modulation=modulation,
            transport_block_size=int(row["tbs"]),
            num_codes=int(row["codes"]),
            code_rate=float(row["code_rate"]),
            data_rate_kbps=float(row["data_rate_kbps"]),
        )
    except (KeyError, ValueError) as exc:
        raise TableError(f"{where}: {exc}")


def load_table(path: str | Path | None = None) -> CqiTable:
    """Load and validate a CQI table; the bundled Category 10 table when no path."""
    try:
        if path is None:
            name = BUNDLED_TABLE
            source = resources.files(__package__).joinpath("data", BUNDLED_TABLE)
            text = source.read_text(encoding="utf-8")
        else:
            name = str(path)
            text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise TableError(f"cannot read CQI table: {exc}") from None

    lines = text.splitlines()
    if not lines:
        raise TableError(f"{name}: empty CQI table file")
    reader = csv.DictReader(lines)
    expected = ["cqi", "modulation", "tbs", "codes", "code_rate", "data_rate_kbps"]
    if reader.fieldnames != expected:
        raise TableError(f"{name}:1: header must be {','.join(expected)}")

    entries = []
    for lineno, row in enumerate(reader, start=2):
        if any(v is None or v == "" for v in row.values()):
            raise TableError(f"{name}:{lineno}: short or malformed row")
        entries.append(_parse_row(row, f"{name}:{lineno}"))
    if not entries:
        raise TableError(f"{name}: CQI table has a header but no rows")

    table = CqiTable(entries)
    report = validate(table)
    if not report.ok:
        raise TableError("invalid CQI table: " + "; ".join(report.problems))
    return table
