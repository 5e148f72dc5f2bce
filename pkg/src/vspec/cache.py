"""Verification cache: a manifest tying property results to the exact inputs they were obtained from.

The manifest is a UTF-8 text file ``<dir>/manifest`` with one ``key<TAB>value``
line per entry, keys sorted bytewise and ``\\n`` line endings::

    network.<name>.hash   sha256 of the model file bytes
    network.<name>.path   model path as given on the command line
    parameter.<name>      exact rational, ``p/q``
    property.<name>       verified;<solver>;<timestamp> | failed | unknown
    spec.hash             sha256 of the raw specification bytes
    spec.path             specification path
    version               manifest format version
"""

from __future__ import annotations

import hashlib
import os
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Callable, Union

from vspec.core.syntax import Network, Parameter, Property, Spec
from vspec.errors import VspecError
from vspec.rationals import format_ratio, parse_rational

VERSION = "1"
MANIFEST = "manifest"


class CacheError(VspecError):
    pass


class MissingParameter(CacheError):
    def __init__(self, name: str):
        super().__init__(f"no value supplied for parameter '{name}'")
        self.name = name


class MissingNetworkBinding(CacheError):
    def __init__(self, name: str):
        super().__init__(f"no file bound to network '{name}'")
        self.name = name


class UnknownBinding(CacheError):
    pass


class CacheIOError(CacheError):
    def __init__(self, path, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = str(path)


class ManifestFormatError(CacheError):
    pass


@dataclass(frozen=True)
class Verified:
    solver: str
    timestamp: str


@dataclass(frozen=True)
class Failed:
    pass


@dataclass(frozen=True)
class Unknown:
    pass


Status = Union[Verified, Failed, Unknown]


def status_text(s: Status) -> str:
    match s:
        case Verified(solver, ts):
            return f"verified;{solver};{ts}"
        case Failed():
            return "failed"
        case Unknown():
            return "unknown"
    raise TypeError(s)


def parse_status(text: str) -> Status:
    if text == "failed":
        return Failed()
    if text == "unknown":
        return Unknown()
    parts = text.split(";")
    if len(parts) == 3 and parts[0] == "verified":
        return Verified(parts[1], parts[2])
    raise ManifestFormatError(f"bad property status {text!r}")


@dataclass(frozen=True)
class NetworkEntry:
    path: str
    content_hash: str


@dataclass
class CacheManifest:
    spec_hash: str
    spec_path: str = ""
    networks: dict[str, NetworkEntry] = field(default_factory=dict)
    parameters: dict[str, Fraction] = field(default_factory=dict)
    properties: dict[str, Status] = field(default_factory=dict)
    version: str = VERSION

    def entries(self) -> list[tuple[str, str]]:
        items = [("version", self.version), ("spec.hash", self.spec_hash), ("spec.path", self.spec_path)]
        for n, e in self.networks.items():
            items += [(f"network.{n}.path", e.path), (f"network.{n}.hash", e.content_hash)]
        items += [(f"parameter.{n}", format_ratio(q)) for n, q in self.parameters.items()]
        items += [(f"property.{n}", status_text(s)) for n, s in self.properties.items()]
        for k, v in items:
            if any(c in k + v for c in "\t\n\r"):
                raise ManifestFormatError(f"manifest entry {k!r} contains a tab or newline")
        return sorted(items, key=lambda kv: kv[0].encode("utf-8"))

    def to_text(self) -> str:
        return "".join(f"{k}\t{v}\n" for k, v in self.entries())

    @classmethod
    def from_text(cls, text: str) -> CacheManifest:
        raw: dict[str, str] = {}
        for i, line in enumerate(text.split("\n")):
            if not line:
                continue
            if "\t" not in line:
                raise ManifestFormatError(f"manifest line {i + 1} has no tab separator")
            k, v = line.split("\t", 1)
            if k in raw:
                raise ManifestFormatError(f"duplicate manifest key {k!r}")
            raw[k] = v
        for required in ("version", "spec.hash"):
            if required not in raw:
                raise ManifestFormatError(f"manifest lacks '{required}'")
        m = cls(raw.pop("spec.hash"), raw.pop("spec.path", ""), version=raw.pop("version"))
        paths: dict[str, str] = {}
        hashes: dict[str, str] = {}
        for k, v in raw.items():
            kind, _, rest = k.partition(".")
            if kind == "network" and rest.endswith(".path"):
                paths[rest[: -len(".path")]] = v
            elif kind == "network" and rest.endswith(".hash"):
                hashes[rest[: -len(".hash")]] = v
            elif kind == "parameter":
                m.parameters[rest] = parse_rational(v)
            elif kind == "property":
                m.properties[rest] = parse_status(v)
            else:
                raise ManifestFormatError(f"unknown manifest key {k!r}")
        if paths.keys() != hashes.keys():
            raise ManifestFormatError("every network needs both a path and a hash")
        m.networks = {n: NetworkEntry(paths[n], hashes[n]) for n in sorted(paths)}
        return m


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def read_bytes(path: str | os.PathLike) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise CacheIOError(path, e.strerror or str(e)) from None


def write_atomic(path: Path, data: bytes) -> None:
    """Write via a sibling temp file and rename, so readers never see a partial file."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def now_timestamp() -> str:
    # SOURCE_DATE_EPOCH makes recorded timestamps reproducible
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return t.strftime("%Y-%m-%dT%H:%M:%SZ")


def spec_names(spec: Spec) -> tuple[list[str], list[str], list[str]]:
    nets = [d.name for d in spec.decls if isinstance(d, Network)]
    params = [d.name for d in spec.decls if isinstance(d, Parameter)]
    props = [d.name for d in spec.decls if isinstance(d, Property)]
    return nets, params, props


def record_verification(
    spec: Spec,
    spec_source: bytes,
    bindings: dict[str, str],
    params: dict[str, Fraction],
    results: dict[str, Status],
    directory: str | os.PathLike,
    spec_path: str = "",
) -> CacheManifest:
    nets, pnames, props = spec_names(spec)
    for n in nets:
        if n not in bindings:
            raise MissingNetworkBinding(n)
    for p in pnames:
        if p not in params:
            raise MissingParameter(p)
    for n in bindings:
        if n not in nets:
            raise UnknownBinding(f"'{n}' is not a network of the specification")
    for p in params:
        if p not in pnames:
            raise UnknownBinding(f"'{p}' is not a parameter of the specification")
    m = CacheManifest(
        digest(spec_source),
        spec_path,
        {n: NetworkEntry(bindings[n], digest(read_bytes(bindings[n]))) for n in nets},
        {p: Fraction(params[p]) for p in pnames},
        {p: results.get(p, Unknown()) for p in props},
    )
    write_atomic(Path(directory) / MANIFEST, m.to_text().encode("utf-8"))
    return m


def load_manifest(directory: str | os.PathLike) -> CacheManifest:
    path = Path(directory) / MANIFEST
    try:
        text = read_bytes(path).decode("utf-8")
    except UnicodeDecodeError:
        raise ManifestFormatError(f"{path} is not UTF-8") from None
    return CacheManifest.from_text(text)


@dataclass(frozen=True)
class Finding:
    kind: str
    name: str | None = None

    def __str__(self) -> str:
        return self.kind if self.name is None else f"{self.kind}({self.name})"


@dataclass(frozen=True)
class IntegrityReport:
    findings: tuple[Finding, ...]

    @property
    def ok(self) -> bool:
        return all(f.kind == "ok" for f in self.findings)

    @property
    def problems(self) -> list[Finding]:
        return [f for f in self.findings if f.kind != "ok"]

    def lines(self) -> list[str]:
        return [str(f) for f in self.findings]


Reader = Callable[[str], bytes]


def check_integrity(
    manifest: CacheManifest,
    spec_source: bytes,
    fs: Reader | None = None,
    params: dict[str, Fraction] | None = None,
    bindings: dict[str, str] | None = None,
    require_verified: bool = True,
) -> IntegrityReport:
    """Compare the manifest against the current files; never raises for mismatches."""
    fs = fs or (lambda p: Path(p).read_bytes())
    out: list[Finding] = []
    out.append(Finding("ok", "spec") if digest(spec_source) == manifest.spec_hash else Finding("SpecChanged"))
    for n, e in manifest.networks.items():
        path = (bindings or {}).get(n, e.path)
        try:
            data = fs(path)
        except OSError:
            out.append(Finding("NetworkMissing", n))
            continue
        out.append(Finding("ok", n) if digest(data) == e.content_hash else Finding("NetworkChanged", n))
    for p, q in (params or {}).items():
        if manifest.parameters.get(p) != Fraction(q):
            out.append(Finding("ParameterChanged", p))
    if require_verified:
        for p, s in manifest.properties.items():
            if not isinstance(s, Verified):
                out.append(Finding("PropertyNotVerified", p))
    return IntegrityReport(tuple(out))
