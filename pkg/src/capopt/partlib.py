"""Capacitor part library: loading, validation, filtering, and electrical evaluation.

Internal units are SI (farads, henries, hertz, ohms, volts) except for board
geometry (millimeters, square millimeters) and cost, which is kept in cents as
an exact Decimal. The CSV/JSON interchange formats use engineering units
(nominal_uF, esl_nH, ...) and are converted on load.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from decimal import Decimal, InvalidOperation
from typing import Iterable, Optional, Sequence, Union

from .errors import ParseError, ValidationError

UF = 1e-6   # farads per microfarad
NH = 1e-9   # henries per nanohenry

PART_CSV_COLUMNS = [
    "id", "description", "package", "nominal_uF", "voltage_rating_V",
    "height_mm", "area_mm2", "cost_cents", "dielectric", "manufacturer",
    "esr_ohm", "esl_nH",
]
DERATING_CSV_COLUMNS = ["part_id", "bias_V", "ceff_uF"]
IMPEDANCE_CSV_COLUMNS = ["part_id", "freq_Hz", "zmag_ohm"]


@dataclass(frozen=True)
class DeratingTable:
    """Effective capacitance vs DC bias, anchored at (0 V, nominal)."""

    points: tuple[tuple[float, float], ...]  # (bias volts, capacitance farads)

    def last_bias(self) -> float:
        return self.points[-1][0]


@dataclass(frozen=True)
class SeriesRLC:
    """Series R-L-C impedance model; C comes from the derating table."""

    esr: float  # ohms
    esl: float  # henries


@dataclass(frozen=True)
class TabulatedImpedance:
    """Measured |Z| vs frequency, interpolated on log-log axes."""

    points: tuple[tuple[float, float], ...]  # (frequency Hz, |Z| ohms)


ImpedanceModel = Union[SeriesRLC, TabulatedImpedance]


@dataclass(frozen=True)
class CapacitorPart:
    id: str
    description: str
    package: str
    nominal_capacitance: float  # farads
    voltage_rating: float       # volts
    height: float               # millimeters
    area: float                 # mm^2
    cost: Decimal               # cents per unit
    dielectric: str
    manufacturer: str
    derating: DeratingTable
    impedance: ImpedanceModel


@dataclass(frozen=True)
class PartFilter:
    max_height: Optional[float] = None
    min_voltage_rating: Optional[float] = None
    allowed_dielectrics: Optional[frozenset[str]] = None
    allowed_manufacturers: Optional[frozenset[str]] = None

    def is_empty(self) -> bool:
        return (self.max_height is None and self.min_voltage_rating is None
                and self.allowed_dielectrics is None and self.allowed_manufacturers is None)


def validate_part(part: CapacitorPart) -> None:
    """Check every CapacitorPart invariant; raise ValidationError naming the field."""
    if not part.id:
        raise ValidationError("part id must be non-empty (field 'id')")
    for name, value in (("area", part.area), ("height", part.height),
                        ("nominal_capacitance", part.nominal_capacitance),
                        ("voltage_rating", part.voltage_rating)):
        if not (value > 0):
            raise ValidationError(f"part '{part.id}': field '{name}' must be > 0, got {value!r}")
    if part.cost < 0:
        raise ValidationError(f"part '{part.id}': field 'cost' must be >= 0, got {part.cost}")

    pts = part.derating.points
    if not pts:
        raise ValidationError(f"part '{part.id}': derating table must have at least one point")
    if pts[0][0] != 0.0:
        raise ValidationError(f"part '{part.id}': derating table must start at bias 0")
    if not math.isclose(pts[0][1], part.nominal_capacitance, rel_tol=1e-12):
        raise ValidationError(
            f"part '{part.id}': derating at bias 0 must equal nominal_capacitance "
            f"({pts[0][1]!r} != {part.nominal_capacitance!r})")
    for (b0, _), (b1, _) in zip(pts, pts[1:]):
        if not b1 > b0:
            raise ValidationError(
                f"part '{part.id}': derating bias points must be strictly ascending")
    for b, c in pts:
        if not (0 < c <= part.nominal_capacitance * (1 + 1e-12)):
            raise ValidationError(
                f"part '{part.id}': derated capacitance at {b:g} V must satisfy "
                f"0 < value <= nominal, got {c!r}")

    z = part.impedance
    if isinstance(z, SeriesRLC):
        if z.esr < 0 or z.esl < 0:
            raise ValidationError(f"part '{part.id}': esr and esl must be >= 0")
    else:
        if len(z.points) < 2:
            raise ValidationError(
                f"part '{part.id}': tabulated impedance needs at least two points")
        for (f0, _), (f1, _) in zip(z.points, z.points[1:]):
            if not f1 > f0:
                raise ValidationError(
                    f"part '{part.id}': impedance frequencies must be strictly ascending")
        for f, m in z.points:
            if not (f > 0 and m > 0):
                raise ValidationError(
                    f"part '{part.id}': impedance points must have positive "
                    f"frequency and magnitude")


# ---------------------------------------------------------------------------
# Loading / serialization
# ---------------------------------------------------------------------------

def _to_float(text: str, *, line: int, field: str) -> float:
    try:
        return float(text)
    except (TypeError, ValueError):
        raise ParseError(f"cannot parse {text!r} as a number", line=line, field=field) from None


def _to_decimal(text, *, line: int | None = None, field: str = "cost_cents") -> Decimal:
    try:
        return Decimal(str(text))
    except InvalidOperation:
        raise ParseError(f"cannot parse {text!r} as a decimal", line=line, field=field) from None


def _decode(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def _read_csv(text: str, columns: Sequence[str], what: str) -> list[tuple[int, dict]]:
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        raise ParseError(f"{what} CSV is empty (header required)", line=1)
    header = [h.strip() for h in rows[0]]
    if header != list(columns):
        raise ParseError(
            f"{what} CSV header must be exactly {','.join(columns)}, got {','.join(header)}",
            line=1)
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(columns):
            raise ParseError(
                f"{what} CSV row has {len(row)} cells, expected {len(columns)}", line=lineno)
        out.append((lineno, dict(zip(columns, (cell.strip() for cell in row)))))
    return out


def _build_derating(nominal: float, rows: list[tuple[float, float]], part_id: str) -> DeratingTable:
    """Sort bias rows, anchor at (0, nominal), and validate ascending biases."""
    rows = sorted(rows)
    if rows and rows[0][0] == 0.0:
        pass  # explicit anchor supplied; validate_part confirms it equals nominal
    else:
        rows = [(0.0, nominal)] + rows
    return DeratingTable(points=tuple(rows))


def load_library(source, format: str, *, derating=None, impedance=None) -> list[CapacitorPart]:
    """Load a part library from a byte stream / string.

    format "csv" reads the parts table; optional `derating` and `impedance`
    streams supply the per-part DC-bias and |Z| tables. format "json" reads
    the self-contained JSON schema produced by dump_library.
    """
    if format == "json":
        return _load_json(_decode(source))
    if format == "csv":
        return _load_csv(_decode(source),
                         _decode(derating) if derating is not None else None,
                         _decode(impedance) if impedance is not None else None)
    raise ValidationError(f"unknown library format {format!r} (expected 'csv' or 'json')")


def _load_csv(parts_text: str, derating_text: str | None,
              impedance_text: str | None) -> list[CapacitorPart]:
    derating_rows: dict[str, list[tuple[float, float]]] = {}
    if derating_text is not None:
        for lineno, row in _read_csv(derating_text, DERATING_CSV_COLUMNS, "derating"):
            bias = _to_float(row["bias_V"], line=lineno, field="bias_V")
            ceff = _to_float(row["ceff_uF"], line=lineno, field="ceff_uF") * UF
            derating_rows.setdefault(row["part_id"], []).append((bias, ceff))

    impedance_rows: dict[str, list[tuple[float, float]]] = {}
    if impedance_text is not None:
        for lineno, row in _read_csv(impedance_text, IMPEDANCE_CSV_COLUMNS, "impedance"):
            freq = _to_float(row["freq_Hz"], line=lineno, field="freq_Hz")
            zmag = _to_float(row["zmag_ohm"], line=lineno, field="zmag_ohm")
            impedance_rows.setdefault(row["part_id"], []).append((freq, zmag))

    parts: list[CapacitorPart] = []
    seen: set[str] = set()
    for lineno, row in _read_csv(parts_text, PART_CSV_COLUMNS, "parts"):
        pid = row["id"]
        if pid in seen:
            raise ParseError(f"duplicate part id '{pid}'", line=lineno, field="id")
        seen.add(pid)
        nominal = _to_float(row["nominal_uF"], line=lineno, field="nominal_uF") * UF
        imp: ImpedanceModel
        if pid in impedance_rows:
            imp = TabulatedImpedance(points=tuple(sorted(impedance_rows.pop(pid))))
        else:
            imp = SeriesRLC(esr=_to_float(row["esr_ohm"], line=lineno, field="esr_ohm"),
                            esl=_to_float(row["esl_nH"], line=lineno, field="esl_nH") * NH)
        part = CapacitorPart(
            id=pid,
            description=row["description"],
            package=row["package"],
            nominal_capacitance=nominal,
            voltage_rating=_to_float(row["voltage_rating_V"], line=lineno,
                                     field="voltage_rating_V"),
            height=_to_float(row["height_mm"], line=lineno, field="height_mm"),
            area=_to_float(row["area_mm2"], line=lineno, field="area_mm2"),
            cost=_to_decimal(row["cost_cents"], line=lineno),
            dielectric=row["dielectric"],
            manufacturer=row["manufacturer"],
            derating=_build_derating(nominal, derating_rows.pop(pid, []), pid),
            impedance=imp,
        )
        validate_part(part)
        parts.append(part)

    for orphan in list(derating_rows) + list(impedance_rows):
        raise ParseError(f"derating/impedance rows reference unknown part id '{orphan}'")
    return parts


def _load_json(text: str) -> list[CapacitorPart]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", line=exc.lineno) from None
    if isinstance(data, dict) and "parts" in data:
        data = data["parts"]
    if not isinstance(data, list):
        raise ParseError("library JSON must be an array of part objects")
    parts = []
    seen: set[str] = set()
    for i, obj in enumerate(data):
        part = parse_part(obj, where=f"parts[{i}]")
        if part.id in seen:
            raise ValidationError(f"duplicate part id '{part.id}'")
        seen.add(part.id)
        parts.append(part)
    return parts


def parse_part(obj: dict, where: str = "part") -> CapacitorPart:
    """Build and validate one CapacitorPart from its JSON object form."""
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")

    def need(key):
        if key not in obj:
            raise ParseError(f"{where}: missing field", field=key)
        return obj[key]

    def num(key, scale=1.0):
        value = need(key)
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ParseError(f"{where}: expected a number, got {value!r}", field=key)
        return float(value) * scale

    nominal = num("nominal_uF", UF)
    der_rows = []
    for j, p in enumerate(obj.get("derating") or []):
        if not isinstance(p, dict) or "bias_V" not in p or "ceff_uF" not in p:
            raise ParseError(f"{where}.derating[{j}]: expected bias_V and ceff_uF")
        der_rows.append((float(p["bias_V"]), float(p["ceff_uF"]) * UF))

    imp: ImpedanceModel
    if obj.get("impedance"):
        zpts = []
        for j, p in enumerate(obj["impedance"]):
            if not isinstance(p, dict) or "freq_Hz" not in p or "zmag_ohm" not in p:
                raise ParseError(f"{where}.impedance[{j}]: expected freq_Hz and zmag_ohm")
            zpts.append((float(p["freq_Hz"]), float(p["zmag_ohm"])))
        imp = TabulatedImpedance(points=tuple(sorted(zpts)))
    else:
        imp = SeriesRLC(esr=num("esr_ohm"), esl=num("esl_nH", NH))

    part = CapacitorPart(
        id=str(need("id")),
        description=str(obj.get("description", "")),
        package=str(obj.get("package", "")),
        nominal_capacitance=nominal,
        voltage_rating=num("voltage_rating_V"),
        height=num("height_mm"),
        area=num("area_mm2"),
        cost=_to_decimal(need("cost_cents")),
        dielectric=str(obj.get("dielectric", "")),
        manufacturer=str(obj.get("manufacturer", "")),
        derating=_build_derating(nominal, der_rows, str(need("id"))),
        impedance=imp,
    )
    validate_part(part)
    return part


def part_to_dict(part: CapacitorPart) -> dict:
    """JSON-ready mirror of a part (engineering units)."""
    d = {
        "id": part.id,
        "description": part.description,
        "package": part.package,
        "nominal_uF": part.nominal_capacitance / UF,
        "voltage_rating_V": part.voltage_rating,
        "height_mm": part.height,
        "area_mm2": part.area,
        "cost_cents": part.cost,
        "dielectric": part.dielectric,
        "manufacturer": part.manufacturer,
        "derating": [{"bias_V": b, "ceff_uF": c / UF} for b, c in part.derating.points],
    }
    if isinstance(part.impedance, SeriesRLC):
        d["esr_ohm"] = part.impedance.esr
        d["esl_nH"] = part.impedance.esl / NH
    else:
        d["esr_ohm"] = 0.0
        d["esl_nH"] = 0.0
        d["impedance"] = [{"freq_Hz": f, "zmag_ohm": z} for f, z in part.impedance.points]
    return d


def dump_library(parts: Iterable[CapacitorPart]) -> list[dict]:
    return [part_to_dict(p) for p in parts]


# ---------------------------------------------------------------------------
# Filtering and electrical evaluation
# ---------------------------------------------------------------------------

def filter_parts(parts: Sequence[CapacitorPart], flt: PartFilter) -> list[CapacitorPart]:
    """Parts satisfying every present bound, input order preserved."""
    out = []
    for p in parts:
        if flt.max_height is not None and p.height > flt.max_height:
            continue
        if flt.min_voltage_rating is not None and p.voltage_rating < flt.min_voltage_rating:
            continue
        if flt.allowed_dielectrics is not None and p.dielectric not in flt.allowed_dielectrics:
            continue
        if flt.allowed_manufacturers is not None and p.manufacturer not in flt.allowed_manufacturers:
            continue
        out.append(p)
    return out


def derated_capacitance(part: CapacitorPart, bias: float) -> float:
    """Effective capacitance in farads at a DC bias, linear between table points.

    No extrapolation: bias beyond the rating or the last table point is an error.
    """
    if bias < 0:
        raise ValidationError(f"part '{part.id}': bias must be >= 0, got {bias!r}")
    if bias > part.voltage_rating:
        raise ValidationError(
            f"part '{part.id}': bias {bias:g} V exceeds voltage rating "
            f"{part.voltage_rating:g} V")
    pts = part.derating.points
    if bias > pts[-1][0]:
        raise ValidationError(
            f"part '{part.id}': bias {bias:g} V is beyond the last derating point "
            f"{pts[-1][0]:g} V (no extrapolation)")
    for (b0, c0), (b1, c1) in zip(pts, pts[1:]):
        if bias <= b1:
            if bias == b0:
                return c0
            if bias == b1:
                return c1
            t = (bias - b0) / (b1 - b0)
            return c0 + t * (c1 - c0)
    return pts[0][1] if bias == pts[0][0] else pts[-1][1]


def impedance_magnitude(part: CapacitorPart, frequency: float, bias: float) -> float:
    """|Z| in ohms at a frequency (series RLC closed form or log-log table)."""
    if frequency <= 0:
        raise ValidationError(f"frequency must be > 0, got {frequency!r}")
    z = part.impedance
    if isinstance(z, SeriesRLC):
        c = derated_capacitance(part, bias)
        w = 2.0 * math.pi * frequency
        reactance = w * z.esl - 1.0 / (w * c)
        return math.hypot(z.esr, reactance)
    pts = z.points
    if frequency < pts[0][0] or frequency > pts[-1][0]:
        raise ValidationError(
            f"part '{part.id}': frequency {frequency:g} Hz outside tabulated range "
            f"[{pts[0][0]:g}, {pts[-1][0]:g}] Hz")
    for (f0, m0), (f1, m1) in zip(pts, pts[1:]):
        if frequency <= f1:
            if frequency == f0:
                return m0
            if frequency == f1:
                return m1
            t = (math.log(frequency) - math.log(f0)) / (math.log(f1) - math.log(f0))
            return math.exp(math.log(m0) + t * (math.log(m1) - math.log(m0)))
    return pts[0][1]


def admittance_magnitude(part: CapacitorPart, frequency: float, bias: float) -> float:
    """|Y| = 1/|Z| in siemens; infinite only for a lossless part at resonance."""
    zmag = impedance_magnitude(part, frequency, bias)
    if zmag == 0.0:
        return math.inf
    return 1.0 / zmag


def with_cost(part: CapacitorPart, cost: Decimal) -> CapacitorPart:
    """Copy of a part at a different unit cost (used by demand sweeps)."""
    if cost < 0:
        raise ValidationError(f"part '{part.id}': cost must be >= 0, got {cost}")
    return replace(part, cost=cost)
