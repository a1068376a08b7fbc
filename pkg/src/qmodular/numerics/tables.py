"""Loader for the shipped singular-value, matrix and series tables."""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

from qmodular.numerics.quadform import QuadForm
from qmodular.numerics.surd import Radical, Surd, parse_radical, parse_surd

ENV_VAR = "QMODULAR_DATA"
FORMAT = "qmodular-tables 1"


class TableError(ValueError):
    pass


@dataclass(frozen=True)
class SingularRow:
    index: int
    disc: int
    form: QuadForm
    printed: str
    status: str
    value: Surd | None          # printed value when well formed
    replacement: Surd | None    # value used when the printed one is flagged

    @property
    def target(self) -> Surd:
        return self.replacement if self.replacement is not None else self.value


@dataclass(frozen=True)
class MatrixRow:
    index: int
    form: QuadForm
    n: int
    e: int
    abd: tuple[int, int, int]
    gamma: tuple[int, int, int, int]


@dataclass(frozen=True)
class PiSeriesRow:
    index: int
    A: Radical
    B: Surd
    C: Surd

    def __str__(self):
        return f"A={self.A} B={self.B} C={self.C}"


@dataclass(frozen=True)
class Tables:
    singular: list[SingularRow]
    matrices: list[MatrixRow]
    series: list[PiSeriesRow]
    source: str


# |C| must stay below the radius of convergence (3 - sqrt 5)/8 of sum a_n C^n
RADIUS = Surd(Fraction(3, 8), Fraction(-1, 8), 5)


def data_path() -> Path | None:
    env = os.environ.get(ENV_VAR)
    return Path(env) if env else None


def _read_default() -> tuple[str, str]:
    ref = resources.files("qmodular").joinpath("data/tables.txt")
    return ref.read_text(encoding="utf-8"), str(ref)


def _ints(text: str, count: int) -> tuple[int, ...]:
    parts = tuple(int(p) for p in text.split(","))
    if len(parts) != count:
        raise TableError(f"expected {count} integers in {text!r}")
    return parts


def parse_tables(text: str, source: str = "<string>") -> Tables:
    lines = text.splitlines()
    if not lines or FORMAT not in lines[0]:
        raise TableError(f"{source}: missing header '# format: {FORMAT}'")
    section = None
    sing, mats, ser = [], [], []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1]
            if section not in ("singular", "matrices", "series"):
                raise TableError(f"{source}:{lineno}: unknown section {section!r}")
            continue
        fields = [f.strip() for f in line.split("|")]
        try:
            if section == "singular":
                disc, form, printed, status, repl = (fields + [""] * 5)[:5]
                f = QuadForm(*_ints(form, 3))
                if f.disc != int(disc):
                    raise TableError(f"discriminant {disc} does not match form {f}")
                value = parse_surd(printed) if status == "ok" else None
                replacement = parse_surd(repl) if repl else None
                if value is None and replacement is None:
                    raise TableError("flagged row needs a replacement value")
                sing.append(SingularRow(len(sing), int(disc), f, printed, status, value, replacement))
            elif section == "matrices":
                form, n, e, abd, gamma = fields
                mats.append(MatrixRow(len(mats), QuadForm(*_ints(form, 3)), int(n), int(e),
                                      _ints(abd, 3), _ints(gamma, 4)))
            elif section == "series":
                A, B, C = fields
                row = PiSeriesRow(len(ser), parse_radical(A), parse_surd(B), parse_surd(C))
                _check_radius(row)
                ser.append(row)
            else:
                raise TableError("data outside a section")
        except (ValueError, TypeError) as exc:
            raise TableError(f"{source}:{lineno}: {exc}") from None
    return Tables(sing, mats, ser, source)


def _check_radius(row: PiSeriesRow) -> None:
    c = row.C.to_bigcomplex(64).abs()
    if not c < RADIUS.to_bigcomplex(64).abs():
        raise TableError(f"|C| = {c} outside the radius of convergence")


def load_tables(path: str | os.PathLike | None = None) -> Tables:
    """Read the tables from ``path``, $QMODULAR_DATA, or the packaged file."""
    p = Path(path) if path is not None else data_path()
    if p is None:
        text, src = _read_default()
    else:
        text, src = p.read_text(encoding="utf-8"), str(p)
    return parse_tables(text, src)
