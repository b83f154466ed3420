"""Batch front end: parse lattices, run a pipeline, emit a report.

Commands:
  analyze      Jordan shape, residue chain, constituent types, alpha, beta
  density      local density with its exponent and group-order breakdown
  mass         global mass of an integer Gram matrix, or the closed form
               for the sum of n squares (--sum-squares N)
  oracle       congruence-count stabilization report
  normal-form  per-scale unimodular decomposition profiles

A lattice document is JSON: {"residue_degree": f, "precision": K,
"gram": [[...]]}.  Entries are integers, "num/den" strings whose
denominator is a power of two, or length-f coordinate arrays.  Reports
are printed as text, or as JSON with sorted keys under --json.

Exit codes: 0 success, 2 invalid input, 3 insufficient precision or no
stabilization, 4 oracle budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from .base_ring import (
    NegativeValuation,
    PrecisionExhausted,
    RingElem,
    unramified,
)
from .density_engine import density_report
from .invariant_chain import chain_report
from .lattice_forms import QuadLattice, jordan_split, unimodular_normal_form
from .mass_engine import (
    MissingFieldData,
    NumberFieldData,
    mass_report,
    sum_squares_mass_rational,
)
from .oracle import BudgetExceeded, NotStabilized, density_estimate


class CLIError(ValueError):
    """Invalid input or usage; maps to exit code 2."""


@dataclass(frozen=True)
class JobConfig:
    command: str
    input: str | None = None
    prime: int = 2
    residue_degree: int | None = None
    precision: int | None = None
    max_level: int = 6
    jobs: int = 1
    split_depth: int = 1
    sum_squares: int | None = None
    field_data: str | None = None
    output: str = "text"

    def __post_init__(self):
        if self.precision is not None and self.precision < 10:
            raise CLIError("precision must be at least 10")
        if self.residue_degree is not None and self.residue_degree < 1:
            raise CLIError("residue degree must be at least 1")
        if self.prime < 2:
            raise CLIError("prime must be at least 2")
        if self.max_level < 1:
            raise CLIError("max level must be at least 1")
        if self.jobs < 1 or self.split_depth < 1:
            raise CLIError("jobs and split depth must be positive")
        if self.output not in ("text", "json"):
            raise CLIError(f"unknown output format {self.output!r}")


# ---------------------------------------------------------------------------
# Lattice document parsing and serialization


def _load_document(source: str):
    """Read JSON from a path, or parse an inline JSON string."""
    text = None
    if os.path.exists(source):
        try:
            with open(source, "r", encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise CLIError(f"cannot read {source}: {exc}")
    elif source.lstrip().startswith(("{", "[")):
        text = source
    else:
        raise CLIError(f"no such file: {source}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CLIError(f"invalid JSON: {exc}")


def _fraction_token(raw: str) -> Fraction:
    try:
        value = Fraction(raw)
    except (ValueError, ZeroDivisionError):
        raise CLIError(f"cannot parse entry {raw!r}")
    return value


def _pow2_exponent(den: int) -> int:
    k = den.bit_length() - 1
    if 1 << k != den:
        raise CLIError(f"entry denominator {den} is not a power of two")
    return k


def _parse_entry(desc, raw) -> RingElem:
    if isinstance(raw, bool):
        raise CLIError("boolean is not a lattice entry")
    if isinstance(raw, int):
        return desc.elem(raw)
    if isinstance(raw, str):
        value = _fraction_token(raw)
        _pow2_exponent(value.denominator)
        return desc.elem(value)
    if isinstance(raw, (list, tuple)):
        if len(raw) != desc.degree:
            raise CLIError(
                f"coordinate array needs length {desc.degree}, got {len(raw)}")
        coords = []
        for item in raw:
            if isinstance(item, bool) or not isinstance(item, (int, str)):
                raise CLIError(f"bad coordinate {item!r}")
            coords.append(_fraction_token(item) if isinstance(item, str)
                          else Fraction(item))
        shift = max(_pow2_exponent(c.denominator) for c in coords)
        if shift == 0:
            return desc.elem([int(c) for c in coords])
        return RingElem.from_coeffs(
            desc, [int(c * (1 << shift)) for c in coords], shift=-shift)
    raise CLIError(f"cannot parse entry {raw!r}")


def parse_lattice(doc, precision: int | None = None,
                  residue_degree: int | None = None) -> QuadLattice:
    """Build a QuadLattice from a JSON document.

    Explicit arguments win over document fields, which win over the
    defaults (residue degree 1, precision 24).
    """
    if not isinstance(doc, dict) or "gram" not in doc:
        raise CLIError('lattice document must be an object with a "gram" key')
    degree = residue_degree if residue_degree is not None else doc.get("residue_degree", 1)
    bits = precision if precision is not None else doc.get("precision", 24)
    if not isinstance(degree, int) or degree < 1:
        raise CLIError("residue_degree must be a positive integer")
    if not isinstance(bits, int) or bits < 10:
        raise CLIError("precision must be an integer, at least 10")
    rows = doc["gram"]
    if not isinstance(rows, list) or not rows:
        raise CLIError("gram must be a nonempty square matrix")
    n = len(rows)
    if any(not isinstance(r, list) or len(r) != n for r in rows):
        raise CLIError("gram must be a nonempty square matrix")
    try:
        desc = unramified(degree, precision=bits)
    except ValueError as exc:
        raise CLIError(str(exc))
    entries = [[_parse_entry(desc, raw) for raw in row] for row in rows]
    try:
        lattice = QuadLattice.from_entries(desc, entries)
    except ValueError as exc:
        raise CLIError(str(exc))
    if lattice.det.kind == "near":
        raise PrecisionExhausted(
            "determinant indistinguishable from zero at this precision")
    return lattice


def _entry_token(entry: RingElem, bits: int):
    f = entry.desc.degree
    if entry.kind == "zero":
        return 0 if f == 1 else [0] * f
    v = entry.valuation()
    if v >= 0:
        coeffs = entry.integer_coeffs(bits)
        return coeffs[0] if f == 1 else list(coeffs)
    coeffs = entry.shifted(-v).integer_coeffs(bits)
    values = [Fraction(c, 1 << -v) for c in coeffs]
    tokens = [int(x) if x.denominator == 1
              else f"{x.numerator}/{x.denominator}" for x in values]
    return tokens[0] if f == 1 else tokens


def serialize_lattice(lattice: QuadLattice) -> dict:
    desc = lattice.descriptor
    bits = desc.precision
    return {
        "residue_degree": desc.degree,
        "precision": bits,
        "gram": [[_entry_token(e, bits) for e in row] for row in lattice.gram],
    }


# ---------------------------------------------------------------------------
# Command handlers: each returns (exit code, json payload, text lines)


def _cmd_analyze(config: JobConfig):
    lattice = _input_lattice(config)
    symbol = jordan_split(lattice)
    report = chain_report(lattice)
    payload = {
        "lattice": serialize_lattice(lattice),
        "jordan": [{"scale": s, "rank": r, "parity": p}
                   for s, r, p in symbol.shape],
        "chain": report.to_json_dict(),
    }
    lines = [f"rank {lattice.n}  residue degree {lattice.descriptor.degree}  "
             f"precision {lattice.descriptor.precision}"]
    lines.append("jordan: " + "; ".join(
        f"scale {s} rank {r} parity {p}" for s, r, p in symbol.shape))
    for row in report.rows:
        bound = "bound" if row.bound else "free"
        lines.append(f"scale {row.scale}: rank {row.rank} parity {row.parity} "
                     f"type {row.fine} {bound}  dim V {row.dim_vbar} "
                     f"({row.vbar_class})")
    lines.append(f"alpha {report.alpha}  beta {report.beta}")
    return 0, payload, lines


def _cmd_density(config: JobConfig):
    lattice = _input_lattice(config)
    report = density_report(lattice)
    exp = report.exponents
    payload = report.to_json_dict()
    lines = [
        f"exponents: N {exp.n} (NQ {exp.n_q} - NM {exp.n_m})",
        f"special fiber order {report.group.special_fiber_order}",
        f"density {payload['density']}",
    ]
    return 0, payload, lines


def _cmd_mass(config: JobConfig):
    if (config.sum_squares is None) == (config.input is None):
        raise CLIError("mass needs exactly one of --input or --sum-squares")
    if config.sum_squares is not None:
        field = None
        if config.field_data is not None:
            field = NumberFieldData.from_json_dict(_load_document(config.field_data))
        value = sum_squares_mass_rational(config.sum_squares, field)
        payload = {"n": config.sum_squares,
                   "mass": f"{value.numerator}/{value.denominator}"}
        return 0, payload, [str(value)]
    doc = _load_document(config.input)
    if not isinstance(doc, dict) or "gram" not in doc:
        raise CLIError('lattice document must be an object with a "gram" key')
    rows = doc["gram"]
    report = mass_report(rows, jobs=config.jobs)
    return 0, report.to_json_dict(), [str(report.mass)]


def _cmd_oracle(config: JobConfig):
    if config.input is None:
        raise CLIError("oracle needs --input")
    if config.prime == 2:
        rows = _input_lattice(config).gram
    else:
        doc = _load_document(config.input)
        if not isinstance(doc, dict) or "gram" not in doc:
            raise CLIError('lattice document must be an object with a "gram" key')
        if doc.get("residue_degree", 1) != 1 or (config.residue_degree or 1) != 1:
            raise CLIError("odd-prime oracle runs work over the base ring only")
        rows = doc["gram"]
        if not isinstance(rows, list) or not rows:
            raise CLIError("gram must be a nonempty square matrix")
    try:
        estimate = density_estimate(rows, p=config.prime,
                                    max_level=config.max_level,
                                    jobs=config.jobs,
                                    split_depth=config.split_depth)
    except NegativeValuation:
        raise CLIError("the oracle needs an integral Gram matrix")
    payload = estimate.to_json_dict()
    lines = [
        "levels: " + " ".join(str(c) for c in payload["levels"]),
        "ratios: " + " ".join(payload["ratios"]),
    ]
    if estimate.stabilized:
        lines.append(f"value {payload['value']}")
        return 0, payload, lines
    lines.append(f"no plateau by level {config.max_level} "
                 f"(threshold {estimate.threshold}); raise --max-level")
    return 3, payload, lines


def _json_profile_value(value):
    if value is None or isinstance(value, int):
        return value
    return [_json_profile_value(v) for v in value]


def _cmd_normal_form(config: JobConfig):
    lattice = _input_lattice(config)
    symbol = jordan_split(lattice)
    scales = []
    lines = []
    for constituent in symbol.constituents:
        profile = unimodular_normal_form(constituent)
        scales.append({
            "scale": constituent.scale,
            "rank": constituent.rank,
            "parity": profile.parity,
            "planes": profile.planes,
            "epsMod8": _json_profile_value(profile.eps_mod8),
            "gammaMod2": _json_profile_value(profile.gamma_mod2),
            "lambdaMod4": _json_profile_value(profile.lambda_mod4),
            "terminalMod4": _json_profile_value(profile.terminal_mod4),
        })
        parts = [f"scale {constituent.scale}: rank {constituent.rank} "
                 f"parity {profile.parity} planes {profile.planes}"]
        if profile.eps_mod8 is not None:
            parts.append(f"eps {profile.eps_mod8} mod 8")
        if profile.gamma_mod2 is not None:
            parts.append(f"gamma {profile.gamma_mod2} mod 2")
        if profile.lambda_mod4 is not None:
            parts.append(f"lambda {profile.lambda_mod4} mod 4")
        if profile.terminal_mod4 is not None:
            parts.append(f"terminal {profile.terminal_mod4} mod 4")
        lines.append("  ".join(parts))
    return 0, {"scales": scales}, lines


def _input_lattice(config: JobConfig) -> QuadLattice:
    if config.input is None:
        raise CLIError(f"{config.command} needs --input")
    doc = _load_document(config.input)
    return parse_lattice(doc, precision=config.precision,
                         residue_degree=config.residue_degree)


# ---------------------------------------------------------------------------
# Argument parsing and dispatch


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latdens",
        description="Local densities and masses of quadratic lattices.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("analyze", "Jordan shape, residue chain, and type classification"),
        ("density", "local density with exponent and group order detail"),
        ("mass", "global mass from a Gram matrix or the closed form"),
        ("oracle", "congruence-count stabilization report"),
        ("normal-form", "per-scale unimodular decomposition profiles"),
    ]:
        cmd = sub.add_parser(name, help=helptext)
        cmd.add_argument("--input", help="lattice JSON file or inline document")
        cmd.add_argument("--prime", type=int, default=2)
        cmd.add_argument("--residue-degree", type=int, default=None)
        cmd.add_argument("--precision", type=int, default=None)
        cmd.add_argument("--max-level", type=int, default=6)
        cmd.add_argument("--jobs", type=int, default=1)
        cmd.add_argument("--split-depth", type=int, default=1)
        cmd.add_argument("--json", action="store_true",
                         help="emit a JSON report with sorted keys")
        if name == "mass":
            cmd.add_argument("--sum-squares", type=int, default=None,
                             metavar="N", help="closed form for I_N")
            cmd.add_argument("--field-data", default=None, metavar="FILE",
                             help="number field data JSON (default: Q)")
    return parser


_HANDLERS = {
    "analyze": _cmd_analyze,
    "density": _cmd_density,
    "mass": _cmd_mass,
    "oracle": _cmd_oracle,
    "normal-form": _cmd_normal_form,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = JobConfig(
            command=args.command,
            input=args.input,
            prime=args.prime,
            residue_degree=args.residue_degree,
            precision=args.precision,
            max_level=args.max_level,
            jobs=args.jobs,
            split_depth=args.split_depth,
            sum_squares=getattr(args, "sum_squares", None),
            field_data=getattr(args, "field_data", None),
            output="json" if args.json else "text",
        )
        code, payload, lines = _HANDLERS[config.command](config)
    except (CLIError, MissingFieldData, NegativeValuation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PrecisionExhausted, NotStabilized) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if config.output == "json":
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        for line in lines:
            print(line)
    return code


if __name__ == "__main__":
    sys.exit(main())
