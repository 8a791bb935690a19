"""Loading, validating and profiling the benchmark effort datasets.

Supports two on-disk formats: a small ARFF subset (numeric and nominal
attributes, '%' comments, '?' missing markers) and RFC-4180-style CSV with a
header row.  A registry file shipped with the package pins, per dataset, the
file, the feature schema, the expected statistical profile and the content
checksum, so ingestion is fully reproducible offline.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

DATASET_IDS = (
    "albrecht",
    "ucp",
    "china",
    "kemerer",
    "kitchenham",
    "maxwell",
    "desharnais",
    "nasa_v1",
)

TARGET_NAME = "Effort"


class IngestError(ValueError):
    """Malformed input file or broken dataset invariant."""


class SchemaError(IngestError):
    """A requested column does not exist."""


@dataclass(frozen=True)
class FeatureColumn:
    name: str
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if not np.all(np.isfinite(vals)):
            raise IngestError(f"column {self.name!r} contains non-finite values")


@dataclass(frozen=True)
class Dataset:
    """A numeric feature table plus one effort target column."""

    id: str
    features: tuple[FeatureColumn, ...]
    target: FeatureColumn
    source_checksum: str
    nominal_columns: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.features) < 1:
            raise IngestError(f"dataset {self.id!r} needs at least one feature")
        n = len(self.target.values)
        if n < 3:
            raise IngestError(f"dataset {self.id!r} has {n} rows; need at least 3")
        for col in self.features:
            if len(col.values) != n:
                raise IngestError(
                    f"column {col.name!r} has {len(col.values)} rows, target has {n}"
                )

    @property
    def n_rows(self) -> int:
        return len(self.target.values)

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(col.name for col in self.features)

    def feature_matrix(self) -> np.ndarray:
        return np.column_stack([col.values for col in self.features])

    def target_vector(self) -> np.ndarray:
        return np.array(self.target.values, dtype=float)

    def equals(self, other: "Dataset") -> bool:
        """Value equality over schema and cells; ignores id and checksum."""
        return (
            self.feature_names == other.feature_names
            and self.target.name == other.target.name
            and self.n_rows == other.n_rows
            and all(
                np.array_equal(a.values, b.values)
                for a, b in zip(self.features, other.features)
            )
            and np.array_equal(self.target.values, other.target.values)
        )


@dataclass
class RawTable:
    """Parser output: columns in declaration order, cells possibly missing."""

    names: list[str]
    columns: list[list[float | None]]
    nominal: set[str] = field(default_factory=set)
    checksum: str = ""

    @property
    def n_rows(self) -> int:
        return len(self.columns[0]) if self.columns else 0


def _checksum(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


# ---------------------------------------------------------------- parsers


def _strip_quotes(token: str) -> str:
    token = token.strip()
    if len(token) >= 2 and token[0] == token[-1] and token[0] in "'\"":
        return token[1:-1]
    return token


def parse_arff(text: str, source: str = "<arff>") -> RawTable:
    names: list[str] = []
    kinds: list[object] = []  # "numeric" or list of nominal tokens
    nominal: set[str] = set()
    columns: list[list[float | None]] = []
    in_data = False

    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.strip()
        if not line or line.startswith("%"):
            continue
        if not in_data:
            lowered = line.lower()
            if lowered.startswith("@relation"):
                continue
            if lowered.startswith("@attribute"):
                rest = line[len("@attribute"):].strip()
                if rest.startswith(("'", '"')):
                    quote = rest[0]
                    end = rest.find(quote, 1)
                    if end < 0:
                        raise IngestError(f"{source}:{lineno}: unterminated attribute name")
                    name = rest[1:end]
                    decl = rest[end + 1:].strip()
                else:
                    parts = rest.split(None, 1)
                    if len(parts) != 2:
                        raise IngestError(f"{source}:{lineno}: malformed @attribute line")
                    name, decl = parts[0], parts[1].strip()
                if decl.startswith("{"):
                    if not decl.endswith("}"):
                        raise IngestError(f"{source}:{lineno}: unterminated nominal domain")
                    tokens = [_strip_quotes(t) for t in decl[1:-1].split(",")]
                    if not tokens or any(t == "" for t in tokens):
                        raise IngestError(f"{source}:{lineno}: empty nominal domain value")
                    kinds.append(tokens)
                    nominal.add(name)
                elif decl.lower() in ("numeric", "real", "integer"):
                    kinds.append("numeric")
                else:
                    raise IngestError(
                        f"{source}:{lineno}: unsupported attribute type {decl!r}"
                    )
                names.append(name)
                continue
            if lowered.startswith("@data"):
                if not names:
                    raise IngestError(f"{source}:{lineno}: @data before any @attribute")
                columns = [[] for _ in names]
                in_data = True
                continue
            raise IngestError(f"{source}:{lineno}: unrecognized header line {line!r}")
        else:
            fields = [f.strip() for f in line.split(",")]
            if len(fields) != len(names):
                raise IngestError(
                    f"{source}:{lineno}: row has {len(fields)} fields, "
                    f"{len(names)} attributes declared"
                )
            for j, tok in enumerate(fields):
                tok = _strip_quotes(tok)
                if tok == "?":
                    columns[j].append(None)
                elif kinds[j] == "numeric":
                    try:
                        columns[j].append(float(tok))
                    except ValueError:
                        raise IngestError(
                            f"{source}:{lineno}: non-numeric value {tok!r} "
                            f"in numeric attribute {names[j]!r}"
                        ) from None
                else:
                    domain = kinds[j]
                    if tok not in domain:
                        raise IngestError(
                            f"{source}:{lineno}: value {tok!r} not in nominal domain "
                            f"of {names[j]!r}"
                        )
                    columns[j].append(float(domain.index(tok)))

    if not in_data:
        raise IngestError(f"{source}: no @data section found")
    if not columns or not columns[0]:
        raise IngestError(f"{source}: no data rows")
    return RawTable(names=names, columns=columns, nominal=nominal,
                    checksum=_checksum(text.encode()))


def parse_csv(text: str, source: str = "<csv>") -> RawTable:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise IngestError(f"{source}: empty file, header row required") from None
    names = [h.strip() for h in header]
    if any(not n for n in names):
        raise IngestError(f"{source}: blank column name in header")
    columns: list[list[float | None]] = [[] for _ in names]
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(names):
            raise IngestError(
                f"{source}:{lineno}: row has {len(row)} fields, header has {len(names)}"
            )
        for j, tok in enumerate(row):
            tok = tok.strip()
            if tok in ("?", ""):
                columns[j].append(None)
            else:
                try:
                    columns[j].append(float(tok))
                except ValueError:
                    raise IngestError(
                        f"{source}:{lineno}: non-numeric value {tok!r} "
                        f"in column {names[j]!r}"
                    ) from None
    if not columns or not columns[0]:
        raise IngestError(f"{source}: no data rows")
    return RawTable(names=names, columns=columns, checksum=_checksum(text.encode()))


# ------------------------------------------------------- table -> Dataset


def build_dataset(
    raw: RawTable,
    target_name: str,
    dataset_id: str = "",
    schema: list[str] | None = None,
    drop_missing_rows_in: tuple[str, ...] = (),
) -> Dataset:
    """Assemble a Dataset from parsed columns.

    Only the selected columns (schema features plus the target) matter for
    missing values: a '?' confined to unselected columns never affects the
    row.  A '?' in a selected column drops the row when that column is listed
    in drop_missing_rows_in and is an error otherwise.  The target column is
    renamed to the canonical target name.
    """
    index = {name: j for j, name in enumerate(raw.names)}
    if target_name not in index:
        raise SchemaError(
            f"target column {target_name!r} not found; file has {raw.names}"
        )
    if schema is None:
        feature_names = [n for n in raw.names if n != target_name]
    else:
        for name in schema:
            if name not in index:
                raise SchemaError(f"unknown column {name!r}; file has {raw.names}")
        feature_names = [n for n in schema if n != target_name]
    selected = feature_names + [target_name]

    keep_rows: list[int] = []
    for i in range(raw.n_rows):
        drop = False
        for name in selected:
            if raw.columns[index[name]][i] is None:
                if name in drop_missing_rows_in:
                    drop = True
                else:
                    raise IngestError(
                        f"missing value in column {name!r} at data row {i + 1} "
                        "(column not covered by the drop-rows policy)"
                    )
        if not drop:
            keep_rows.append(i)

    def column(name: str, out_name: str) -> FeatureColumn:
        vals = raw.columns[index[name]]
        return FeatureColumn(out_name, np.array([vals[i] for i in keep_rows], dtype=float))

    features = tuple(column(n, n) for n in feature_names)
    target = column(target_name, TARGET_NAME)
    nominal = tuple(n for n in feature_names if n in raw.nominal)
    return Dataset(
        id=dataset_id,
        features=features,
        target=target,
        source_checksum=raw.checksum,
        nominal_columns=nominal,
    )


def load_arff(path, target_name: str | None = None, schema=None,
              drop_missing_rows_in=()) -> Dataset:
    """Load an ARFF file; the last attribute is the target unless named."""
    path = Path(path)
    raw = parse_arff(path.read_text(), source=str(path))
    if target_name is None:
        target_name = raw.names[-1]
    return build_dataset(raw, target_name, dataset_id=path.stem, schema=schema,
                         drop_missing_rows_in=tuple(drop_missing_rows_in))


def load_csv(path, target_name: str, schema=None, drop_missing_rows_in=()) -> Dataset:
    path = Path(path)
    raw = parse_csv(path.read_text(), source=str(path))
    return build_dataset(raw, target_name, dataset_id=path.stem, schema=schema,
                         drop_missing_rows_in=tuple(drop_missing_rows_in))


def select_schema(dataset: Dataset, schema: list[str]) -> Dataset:
    """Restrict a dataset to the named feature columns (target always kept)."""
    by_name = {col.name: col for col in dataset.features}
    picked = []
    for name in schema:
        if name == dataset.target.name:
            continue
        if name not in by_name:
            raise SchemaError(
                f"unknown column {name!r}; dataset has {list(by_name)}"
            )
        picked.append(by_name[name])
    return Dataset(
        id=dataset.id,
        features=tuple(picked),
        target=dataset.target,
        source_checksum=dataset.source_checksum,
        nominal_columns=tuple(n for n in dataset.nominal_columns if n in schema),
    )


def to_csv(dataset: Dataset) -> str:
    """Serialize features plus target as CSV (floats via repr, lossless)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(dataset.feature_names) + [dataset.target.name])
    cols = [col.values for col in dataset.features] + [dataset.target.values]
    for i in range(dataset.n_rows):
        writer.writerow([repr(float(c[i])) for c in cols])
    return buf.getvalue()


# ------------------------------------------------------------- profiling


@dataclass(frozen=True)
class ColumnStats:
    min: float
    max: float
    mean: float
    std: float  # sample standard deviation, divisor n-1

    def as_dict(self):
        return {"min": self.min, "max": self.max, "mean": self.mean, "std": self.std}


@dataclass(frozen=True)
class ProfileStats:
    columns: dict[str, ColumnStats]


def compute_profile(dataset: Dataset) -> ProfileStats:
    stats: dict[str, ColumnStats] = {}
    for col in list(dataset.features) + [dataset.target]:
        v = col.values
        std = float(v.std(ddof=1)) if len(v) > 1 else 0.0
        stats[col.name] = ColumnStats(
            min=float(v.min()), max=float(v.max()), mean=float(v.mean()), std=std
        )
    return ProfileStats(columns=stats)


def printed_unit(text: str) -> float:
    """One unit in the last printed decimal of a transcribed number."""
    text = text.strip()
    if "." in text:
        return 10.0 ** -(len(text) - text.index(".") - 1)
    return 1.0


@dataclass(frozen=True)
class CellCheck:
    column: str
    stat: str
    computed: float
    expected: float
    passed: bool
    waived: bool = False
    waiver_reason: str = ""

    @property
    def ok(self) -> bool:
        return self.passed or self.waived


@dataclass(frozen=True)
class ValidationReport:
    dataset_id: str
    cells: tuple[CellCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.cells)

    @property
    def failures(self):
        return [c for c in self.cells if not c.ok]

    @property
    def waived(self):
        return [c for c in self.cells if c.waived]


def validate_profile(
    stats: ProfileStats,
    expected: dict[str, dict[str, str]],
    tolerance: float = 0.0,
    waivers: dict[str, dict[str, str]] | None = None,
    dataset_id: str = "",
) -> ValidationReport:
    """Check a computed profile against transcribed reference values.

    A cell passes when |computed - expected| <= max(tolerance * |expected|,
    one unit in the last printed decimal of the transcription).  Expected
    values are strings so the printed precision is preserved.
    """
    waivers = waivers or {}
    if set(stats.columns) != set(expected):
        raise SchemaError(
            f"column mismatch: computed {sorted(stats.columns)}, "
            f"expected {sorted(expected)}"
        )
    cells = []
    for name, col_stats in stats.columns.items():
        for stat_name, computed in col_stats.as_dict().items():
            text = str(expected[name][stat_name])
            value = float(text)
            allowed = max(tolerance * abs(value), printed_unit(text))
            passed = abs(computed - value) <= allowed
            reason = waivers.get(name, {}).get(stat_name, "")
            cells.append(
                CellCheck(
                    column=name,
                    stat=stat_name,
                    computed=computed,
                    expected=value,
                    passed=passed,
                    waived=(not passed and bool(reason)),
                    waiver_reason=reason,
                )
            )
    return ValidationReport(dataset_id=dataset_id, cells=tuple(cells))


# -------------------------------------------------------------- registry


@dataclass(frozen=True)
class RegistryEntry:
    id: str
    path: str
    format: str  # "arff" | "csv"
    target: str
    schema: tuple[str, ...]
    expected_profile: dict[str, dict[str, str]]
    sha256: str
    waivers: dict[str, dict[str, str]]


def data_dir() -> Path:
    return Path(resources.files("effortbench").joinpath("data"))


def load_registry(path: Path | None = None) -> dict[str, RegistryEntry]:
    reg_path = Path(path) if path else data_dir() / "registry.json"
    entries = json.loads(reg_path.read_text())
    registry = {}
    for e in entries:
        registry[e["id"]] = RegistryEntry(
            id=e["id"],
            path=e["path"],
            format=e["format"],
            target=e["target"],
            schema=tuple(e["schema"]),
            expected_profile=e["expected_profile"],
            sha256=e["sha256"],
            waivers=e.get("waivers", {}),
        )
    return registry


def load_dataset(dataset_id: str, registry: dict[str, RegistryEntry] | None = None) -> Dataset:
    registry = registry if registry is not None else load_registry()
    if dataset_id not in registry:
        raise SchemaError(
            f"unknown dataset id {dataset_id!r}; known ids: {', '.join(sorted(registry))}"
        )
    entry = registry[dataset_id]
    path = data_dir() / entry.path
    data = path.read_bytes()
    digest = _checksum(data)
    if digest != entry.sha256:
        raise IngestError(
            f"checksum mismatch for {entry.path}: got {digest}, registry says {entry.sha256}"
        )
    text = data.decode()
    if entry.format == "arff":
        raw = parse_arff(text, source=str(path))
    elif entry.format == "csv":
        raw = parse_csv(text, source=str(path))
    else:
        raise IngestError(f"unsupported format {entry.format!r} in registry")
    return build_dataset(raw, entry.target, dataset_id=entry.id,
                         schema=list(entry.schema))


def validate_dataset(dataset_id: str, tolerance: float = 0.0) -> ValidationReport:
    registry = load_registry()
    entry = registry[dataset_id] if dataset_id in registry else None
    if entry is None:
        raise SchemaError(
            f"unknown dataset id {dataset_id!r}; known ids: {', '.join(sorted(registry))}"
        )
    dataset = load_dataset(dataset_id, registry)
    stats = compute_profile(dataset)
    return validate_profile(stats, entry.expected_profile, tolerance=tolerance,
                            waivers=entry.waivers, dataset_id=dataset_id)
