"""Datasets: categorical CSV ingestion, geometric synthetics and the real benchmarks.

Dataset file format (``.ldpd``): line 1 is a compact JSON header
``{"d":..,"labels":[..],"n":..,"name":..}`` with sorted keys, followed by ``n``
lines each holding one category index in decimal. Lines end in ``\\n``.
"""

import csv
import hashlib
import io
import json
import logging
import os
import re
import urllib.request
import zipfile
from dataclasses import dataclass, field
from pathlib import Path
from urllib.parse import urljoin

import numpy as np

from .core import Domain, EmptyInput, IndexOutOfDomain, LdpError, true_distribution

log = logging.getLogger(__name__)


class ColumnNotFound(LdpError):
    pass


class EmptyColumn(LdpError):
    pass


class RaggedRow(LdpError):
    pass


class InvalidSpec(LdpError):
    pass


class DatasetUnavailable(LdpError):
    pass


@dataclass(frozen=True, eq=False)
class Dataset:
    name: str
    values: np.ndarray
    domain: Domain
    attribute: str = ""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.int64)
        if values.ndim != 1 or values.size == 0:
            raise EmptyInput("a dataset needs at least one value")
        if values.min() < 0 or values.max() >= self.domain.size_d:
            raise IndexOutOfDomain(f"dataset value outside [0, {self.domain.size_d})")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self):
        return int(self.values.shape[0])

    @property
    def d(self):
        return self.domain.size_d

    @property
    def labels(self):
        if self.domain.labels is not None:
            return list(self.domain.labels)
        return [str(i) for i in range(self.d)]

    def distribution(self):
        return true_distribution(self.values, self.domain)


# --- CSV ingestion ----------------------------------------------------------


def _read_rows(path, delimiter, trim):
    with open(path, newline="", encoding="utf-8", errors="replace") as fh:
        if delimiter is None:
            rows = (line.split() for line in fh)
        else:
            rows = csv.reader(fh, delimiter=delimiter)
        for row in rows:
            if not row or all(not cell.strip() for cell in row):
                continue
            yield [cell.strip() for cell in row] if trim else row


def ingest_csv(path, column, delimiter=",", has_header=False, trim=True, name=None):
    """Encode one categorical column of a delimited file as a :class:`Dataset`.

    ``column`` is a 0-based index, or a header name when ``has_header`` is
    set. ``delimiter=None`` splits on runs of whitespace. Distinct values,
    after trimming, are sorted lexicographically and numbered from 0; the
    missing-value token ``?`` is kept as an ordinary category.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    rows = _read_rows(path, delimiter, trim)
    header = None
    if has_header:
        header = next(rows, None)
        if header is None:
            raise EmptyColumn(f"{path} is empty")
    if isinstance(column, str) and not column.lstrip("-").isdigit():
        if header is None or column not in header:
            raise ColumnNotFound(f"column {column!r} not found in {path}")
        col = header.index(column)
    else:
        col = int(column)
    width = len(header) if header is not None else None
    cells = []
    for lineno, row in enumerate(rows, start=2 if has_header else 1):
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise RaggedRow(f"{path}: row {lineno} has {len(row)} fields, expected {width}")
        if not 0 <= col < width:
            raise ColumnNotFound(f"column {column!r} outside the {width} fields of {path}")
        cells.append(row[col])
    if not cells:
        raise EmptyColumn(f"column {column!r} of {path} holds no values")
    labels = sorted(set(cells))
    if len(labels) < 2:
        raise EmptyColumn(f"column {column!r} of {path} has a single category {labels[0]!r}")
    index = {label: i for i, label in enumerate(labels)}
    values = np.fromiter((index[c] for c in cells), dtype=np.int64, count=len(cells))
    attribute = header[col] if header is not None else str(column)
    return Dataset(name or path.stem, values, Domain(len(labels), labels), attribute)


# --- synthetic data ---------------------------------------------------------


@dataclass(frozen=True)
class SyntheticSpec:
    n: int
    d: int
    rho: float | None = None  # default 2/d
    seed: int = 0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidSpec(f"n must be a positive integer, got {self.n!r}")
        if int(self.d) != self.d or self.d < 2:
            raise InvalidSpec(f"d must be an integer >= 2, got {self.d!r}")
        if self.rho is None:
            object.__setattr__(self, "rho", min(0.999, 2 / self.d))
        if not 0 < self.rho < 1:
            raise InvalidSpec(f"rho must lie in (0, 1), got {self.rho!r}")

    def weights(self):
        w = (1 - self.rho) ** np.arange(self.d)
        return w / w.sum()


def generate_synthetic(spec):
    """Draw ``spec.n`` i.i.d. values from the truncated geometric weights ``(1 - rho)^i``."""
    rng = np.random.default_rng(spec.seed)
    values = rng.choice(spec.d, size=spec.n, p=spec.weights())
    name = f"geometric-d{spec.d}-n{spec.n}-rho{spec.rho:g}-s{spec.seed}"
    return Dataset(name, values, Domain(spec.d), attribute="geometric")


# --- dataset files ----------------------------------------------------------


def dumps_dataset(ds):
    header = json.dumps(
        {"d": ds.d, "labels": ds.labels, "n": ds.n, "name": ds.name},
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=True,
    )
    body = "\n".join(map(str, ds.values.tolist()))
    return f"{header}\n{body}\n"


def write_dataset(ds, path):
    Path(path).write_bytes(dumps_dataset(ds).encode("ascii"))


def read_dataset(path):
    with open(path, encoding="ascii") as fh:
        try:
            header = json.loads(fh.readline())
            values = np.array([int(line) for line in fh if line.strip()], dtype=np.int64)
        except ValueError as exc:
            raise LdpError(f"{path} is not a dataset file: {exc}") from None
    if values.size != header["n"]:
        raise LdpError(f"{path}: header says n={header['n']}, found {values.size} values")
    return Dataset(header["name"], values, Domain(header["d"], header["labels"]))


def dataset_sizes_table(datasets):
    """Rows ``(name, n, attribute, d)`` describing ingested datasets."""
    return [(ds.name, ds.n, ds.attribute, ds.d) for ds in datasets]


# --- the real benchmark datasets --------------------------------------------


@dataclass(frozen=True)
class Source:
    url: str
    member: str | None = None  # file inside a wheel/zip
    sha256: str | None = None  # digest of the downloaded archive, when known
    keel: bool = False  # comma-separated KEEL export: rewrite with spaces


@dataclass(frozen=True)
class KnownDataset:
    name: str
    filename: str
    n: int
    delimiter: str | None
    attributes: dict  # attribute -> 0-based column
    domain_sizes: dict  # attribute -> d
    sources: tuple = ()
    checksums: frozenset = field(default_factory=frozenset)  # sha256 of accepted cached files
    width: int = 0


_UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"

KNOWN = {
    "statlog": KnownDataset(
        name="Statlog",
        filename="australian.dat",
        n=690,
        delimiter=None,
        attributes={"A4": 3, "A6": 5, "A5": 4},
        domain_sizes={"A4": 3, "A6": 8, "A5": 14},
        width=15,
        sources=(
            Source(f"{_UCI}/statlog/australian/australian.dat"),
            Source(
                "pypi:keel-ds/keel_ds-0.2.5-py3-none-any.whl",
                member="keel_ds/data/balanced/raw/australian.dat",
                keel=True,
            ),
        ),
        checksums=frozenset({"480adb19c19019e452d256e4d0f42f4b985979fecef0f3494f9e0720840a12f3"}),
    ),
    "adult": KnownDataset(
        name="Adult",
        filename="adult.data",
        n=32561,
        delimiter=",",
        attributes={"Race": 8, "Occ": 6, "Country": 13},
        domain_sizes={"Race": 5, "Occ": 15, "Country": 42},
        width=15,
        sources=(
            Source(f"{_UCI}/adult/adult.data"),
            Source("pypi:responsibly/responsibly-0.1.2-py3-none-any.whl", member="responsibly/dataset/adult/adult.data"),
        ),
        checksums=frozenset({"5b00264637dbfec36bdeaab5676b0b309ff9eb788d63554ca0a249491c86603d"}),
    ),
    "uscensus1990": KnownDataset(
        name="USCensus1990",
        filename="USCensus1990raw.data.txt",
        n=2458285,
        delimiter=None,
        # column positions come from USCensus1990raw.attributes.txt when it sits next to the data
        attributes={},
        domain_sizes={"MILITARY": 5, "RVETSERV": 12, "RACE": 63, "POB": 283},
        sources=(Source(f"{_UCI}/census1990-mld/USCensus1990raw.data.txt"),),
    ),
}

ATTRIBUTE_ALIASES = {"uscensus1990": {"Military": "MILITARY", "Rvetserv": "RVETSERV", "Race": "RACE", "PoB": "POB"}}


def data_dir():
    return Path(os.environ.get("LDPFREQ_DATA_DIR") or Path.home() / ".cache" / "ldpfreq" / "datasets")


def _download(url, timeout=60):
    with urllib.request.urlopen(url, timeout=timeout) as resp:
        return resp.read()


def _wheel_url(spec):
    """Resolve ``project/filename`` through the PyPI simple index to ``(url, sha256)``."""
    project, filename = spec.split("/")
    index = f"https://pypi.org/simple/{project}/"
    page = _download(index).decode("utf-8")
    for href in re.findall(r'href="([^"]+)"', page):
        link, _, fragment = href.partition("#")
        if link.rsplit("/", 1)[-1] == filename:
            digest = fragment[len("sha256="):] if fragment.startswith("sha256=") else None
            return urljoin(index, link), digest
    raise DatasetUnavailable(f"{filename} is not listed on {index}")


def _fetch_source(src):
    if src.url.startswith("pypi:"):
        url, digest = _wheel_url(src.url[5:])
    else:
        url, digest = src.url, src.sha256
    blob = _download(url)
    if digest and hashlib.sha256(blob).hexdigest() != digest:
        raise DatasetUnavailable(f"checksum mismatch for {url}")
    if src.member:
        with zipfile.ZipFile(io.BytesIO(blob)) as zf:
            blob = zf.read(src.member)
    if src.keel:
        blob = blob.replace(b",", b" ")
    return blob


def _check_layout(info, path):
    """Row and field counts of a cached file must match the published dataset."""
    rows = 0
    for row in _read_rows(path, info.delimiter, True):
        if info.width and len(row) != info.width:
            raise DatasetUnavailable(f"{path}: expected {info.width} fields, got {len(row)}")
        rows += 1
    if rows != info.n:
        raise DatasetUnavailable(f"{path}: expected {info.n} rows, got {rows}")


def verify_file(key, path):
    info = KNOWN[key]
    digest = hashlib.sha256(Path(path).read_bytes()).hexdigest()
    if digest not in info.checksums:
        log.info("%s: digest %s not on record, checking layout", path, digest)
        _check_layout(info, path)
    return digest


def fetch(key, directory=None, force=False):
    """Make sure dataset ``key`` is cached locally; return its path.

    Sources are tried in order (UCI first, then PyPI wheels that ship the
    same file). The cached file must match a recorded checksum or, failing
    that, the published row and field counts.
    """
    info = KNOWN[key]
    directory = Path(directory) if directory else data_dir()
    path = directory / info.filename
    if path.is_file() and not force:
        verify_file(key, path)
        return path
    errors = []
    for src in info.sources:
        try:
            blob = _fetch_source(src)
        except Exception as exc:  # network, HTTP or archive errors: try the next source
            errors.append(f"{src.url}: {exc}")
            continue
        directory.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".part")
        tmp.write_bytes(blob)
        try:
            verify_file(key, tmp)
        except DatasetUnavailable as exc:
            tmp.unlink()
            errors.append(str(exc))
            continue
        tmp.replace(path)
        return path
    raise DatasetUnavailable(f"could not fetch {info.name}:\n  " + "\n  ".join(errors))


def locate(key, directory=None):
    """Path of the cached file for ``key`` or ``None``."""
    path = (Path(directory) if directory else data_dir()) / KNOWN[key].filename
    return path if path.is_file() else None


def _uscensus_columns(path):
    names = path.with_name("USCensus1990raw.attributes.txt")
    if not names.is_file():
        raise DatasetUnavailable(f"{names} is needed to locate USCensus1990 attributes")
    cols = [line.split()[0].upper() for line in names.read_text().splitlines() if line.strip()]
    return {name: i for i, name in enumerate(cols)}


def load_known(key, attribute, directory=None, download=True):
    """Load one attribute of a benchmark dataset (fetching it if allowed)."""
    if key not in KNOWN:
        raise LdpError(f"unknown dataset {key!r}; known: {', '.join(KNOWN)}")
    info = KNOWN[key]
    path = fetch(key, directory) if download else locate(key, directory)
    if path is None:
        raise DatasetUnavailable(f"{info.filename} not found in {directory or data_dir()}")
    attribute = ATTRIBUTE_ALIASES.get(key, {}).get(attribute, attribute)
    columns = info.attributes or _uscensus_columns(path)
    if attribute not in columns:
        raise ColumnNotFound(f"{info.name} has no attribute {attribute!r}; choose from {', '.join(columns)}")
    ds = ingest_csv(path, columns[attribute], delimiter=info.delimiter, name=info.name)
    return Dataset(ds.name, ds.values, ds.domain, attribute)
