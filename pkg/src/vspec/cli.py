"""Command-line driver: ``vspec check``, ``vspec verify`` and ``vspec export``.

Exit codes:
    0   success
    1   parse or type error
    2   cache integrity failure
    3   verify finished but not every property was verified
    64  usage error (bad flags, missing parameter, binding or cache)
    65  malformed solver output
    66  input/output error
    69  external solver failed
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from vspec import cache, solver_adapter
from vspec.backends import EXTENSIONS, TARGETS, EmitOptions, MissingCache, emit
from vspec.backends.common import EmissionError
from vspec.driver import ParameterTypeError, compile_source, parameter_names, substitute_parameters
from vspec.core.syntax import Network
from vspec.errors import VspecError
from vspec.itp_ir import to_itp_ir
from vspec.rationals import parse_rational
from vspec.typecheck.pipeline import type_spec

EXIT_OK, EXIT_TYPE, EXIT_INTEGRITY, EXIT_UNVERIFIED = 0, 1, 2, 3
EXIT_USAGE, EXIT_DATA, EXIT_IO, EXIT_SOLVER = 64, 65, 66, 69


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class CliInvocation:
    command: str
    spec: str
    target: str | None = None
    cache: str | None = None
    output: str | None = None
    networks: dict[str, str] = field(default_factory=dict)
    parameters: dict[str, Fraction] = field(default_factory=dict)
    solver: str | None = None
    constructive_reals: bool = False
    keep_parameters: bool = False
    name: str | None = None
    locale: str | None = None


def _pairs(values: list[str] | None, flag: str) -> list[tuple[str, str]]:
    out = []
    for v in values or []:
        name, sep, rest = v.partition(":")
        if not sep or not name or not rest:
            raise UsageError(f"{flag} expects name:value, got {v!r}")
        out.append((name, rest))
    return out


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="vspec", description="Check, verify and export neural network specifications.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def common(sp):
        sp.add_argument("-s", "--spec", required=True, help="specification file (.vcl)")
        sp.add_argument("-n", "--network", action="append", metavar="NAME:PATH", help="bind a network to a model file")
        sp.add_argument("-p", "--parameter", action="append", metavar="NAME:VALUE", help="set a parameter (decimal or p/q)")

    check = sub.add_parser("check", help="parse and type-check a specification")
    check.add_argument("-s", "--spec", required=True)

    verify = sub.add_parser("verify", help="run a solver and record results in a cache")
    common(verify)
    verify.add_argument("-v", "--verifier", required=True, metavar="KIND", help="mock:<table> or external:<command>")
    verify.add_argument("-c", "--cache", required=True, help="cache directory")

    export = sub.add_parser("export", help="emit an interactive theorem prover interface")
    common(export)
    export.add_argument("-t", "--target", required=True, choices=TARGETS)
    export.add_argument("-c", "--cache", help="cache directory to check and reference")
    export.add_argument("-o", "--output", help="output file (default: standard output)")
    export.add_argument("-r", "--constructive-reals", action="store_true", help="Rocq only: use the standard-library reals")
    export.add_argument("--keep-parameters", action="store_true", help="leave parameters abstract instead of substituting values")
    export.add_argument("--name", help="module or theory name (default: from the output file)")
    export.add_argument("--locale", help="Isabelle locale name (default: the theory name)")
    return p


def parse_args(argv: list[str]) -> CliInvocation:
    ns = build_parser().parse_args(argv)
    inv = CliInvocation(ns.command, ns.spec)
    inv.networks = dict(_pairs(getattr(ns, "network", None), "-n"))
    try:
        inv.parameters = {k: parse_rational(v) for k, v in _pairs(getattr(ns, "parameter", None), "-p")}
    except ValueError as e:
        raise UsageError(str(e)) from None
    inv.solver = getattr(ns, "verifier", None)
    inv.cache = getattr(ns, "cache", None)
    if ns.command == "export":
        inv.target, inv.output = ns.target, ns.output
        inv.constructive_reals, inv.keep_parameters = ns.constructive_reals, ns.keep_parameters
        inv.name, inv.locale = ns.name, ns.locale
        if inv.constructive_reals and inv.target != "Rocq":
            raise UsageError("-r is only valid with -t Rocq")
    return inv


# ---------------------------------------------------------------------------
# Diagnostics


def _colour(text: str, code: str) -> str:
    if os.environ.get("VSPEC_NO_COLOR") or not sys.stderr.isatty():
        return text
    return f"\x1b[{code}m{text}\x1b[0m"


def report(err: VspecError, path: str, source: str | None) -> None:
    line = err.render(path, source)
    print(line.replace(": error: ", ": " + _colour("error", "31") + ": ", 1), file=sys.stderr)


def fail(message: str) -> None:
    print(f"vspec: {_colour('error', '31')}: {message}", file=sys.stderr)


def module_name(inv: CliInvocation) -> str:
    if inv.name:
        return inv.name
    if inv.output:
        stem = re.sub(r"\W", "_", Path(inv.output).stem)
        if stem and not stem[0].isdigit():
            return stem
    return "Spec"


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise cache.CacheIOError(path, e.strerror or str(e)) from None


def _compile(raw: bytes):
    return compile_source(raw.decode("utf-8"))


def _parameters_for(core, values: dict[str, Fraction], keep: bool = False) -> dict[str, Fraction]:
    names = parameter_names(core)
    for n in values:
        if n not in names:
            raise UsageError(f"'{n}' is not a parameter of the specification")
    if not keep:
        for n in names:
            if n not in values:
                raise cache.MissingParameter(n)
    return {n: values[n] for n in names if n in values}


def cmd_check(inv: CliInvocation) -> int:
    compiled = _compile(_read(inv.spec))
    print(f"{inv.spec}: ok ({len(compiled.core.decls)} declarations)")
    return EXIT_OK


def cmd_verify(inv: CliInvocation) -> int:
    raw = _read(inv.spec)
    compiled = _compile(raw)
    params = _parameters_for(compiled.core, inv.parameters)
    for d in compiled.core.decls:
        if isinstance(d, Network) and d.name not in inv.networks:
            raise cache.MissingNetworkBinding(d.name)
    for n, path in inv.networks.items():
        if not Path(path).is_file():
            raise cache.CacheIOError(path, "network file not found")
    typed = type_spec(substitute_parameters(compiled.core, params))
    result = solver_adapter.run_solver(inv.solver, typed, inv.networks, params, inv.spec)
    stamp = cache.now_timestamp()
    solver_id = re.sub(r"[;\t\n]", "_", inv.solver)
    statuses = {n: solver_adapter.to_cache_status(s, solver_id, stamp) for n, s in result.statuses.items()}
    cache.record_verification(compiled.core, raw, inv.networks, params, statuses, inv.cache, inv.spec)
    for n, s in result.statuses.items():
        print(f"{n}\t{solver_adapter.status_text(s)}")
    return EXIT_OK if result.all_verified else EXIT_UNVERIFIED


def cmd_export(inv: CliInvocation) -> int:
    raw = _read(inv.spec)
    values = dict(inv.parameters)
    network_paths = dict(inv.networks)
    if inv.cache:
        # integrity comes first: a tampered spec must be reported as such even if it no longer parses
        manifest = cache.load_manifest(inv.cache)
        rep = cache.check_integrity(manifest, raw, params=inv.parameters, bindings=inv.networks)
        if not rep.ok:
            for f in rep.problems:
                print(f"integrity: {f}", file=sys.stderr)
            return EXIT_INTEGRITY
        values = {**manifest.parameters, **values}
        network_paths = {**{n: e.path for n, e in manifest.networks.items()}, **network_paths}
    compiled = _compile(raw)
    params = _parameters_for(compiled.core, values, keep=inv.keep_parameters)
    core = compiled.core if inv.keep_parameters else substitute_parameters(compiled.core, params)
    ir = to_itp_ir(core)
    opts = EmitOptions(
        module=module_name(inv),
        source_hash=cache.digest(raw),
        network_paths=network_paths,
        cache_ref=str(Path(inv.cache) / cache.MANIFEST) if inv.cache else None,
        constructive_reals=inv.constructive_reals,
        locale=inv.locale,
    )
    text = emit(inv.target, ir, opts)
    if inv.output:
        out = Path(inv.output)
        if out.suffix and out.suffix != EXTENSIONS[inv.target]:
            print(f"vspec: warning: {out} does not have the usual {EXTENSIONS[inv.target]} extension", file=sys.stderr)
        try:
            cache.write_atomic(out, text.encode("utf-8"))
        except OSError as e:
            raise cache.CacheIOError(out, e.strerror or str(e)) from None
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {"check": cmd_check, "verify": cmd_verify, "export": cmd_export}


def run(argv: list[str]) -> int:
    try:
        inv = parse_args(argv)
    except UsageError as e:
        fail(str(e))
        return EXIT_USAGE
    source = None
    try:
        try:
            source = Path(inv.spec).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError):
            source = None
        return COMMANDS[inv.command](inv)
    except UsageError as e:
        fail(str(e))
        return EXIT_USAGE
    except (cache.MissingParameter, cache.MissingNetworkBinding, cache.UnknownBinding, MissingCache, solver_adapter.UnknownSolver, ParameterTypeError) as e:
        fail(e.message)
        return EXIT_USAGE
    except cache.CacheIOError as e:
        fail(e.message)
        return EXIT_IO
    except UnicodeDecodeError:
        fail(f"{inv.spec}: not valid UTF-8")
        return EXIT_TYPE
    except solver_adapter.ExternalCommandFailed as e:
        fail(e.message)
        return EXIT_SOLVER
    except (solver_adapter.SolverError, cache.ManifestFormatError) as e:
        fail(e.message)
        return EXIT_DATA
    except EmissionError as e:
        fail(e.message)
        return EXIT_TYPE
    except VspecError as e:
        report(e, inv.spec, source)
        return EXIT_TYPE


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
