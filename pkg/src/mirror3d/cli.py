"""Batch front end: read a theory specification, run one computation, print a report.

Specifications are JSON objects::

    {"torus_rank": 1, "matter": [[1]],
     "rays": [[1], [-1]],
     "brane": {"kahler": ["q1", "q2"], "moment": ["0"]},
     "task": {"lambda": [1], "mu": [-1]}}

Structured output is ``{command, input_digest, result, details}`` with sorted
keys, so identical inputs give byte-identical reports.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Any, Callable, Sequence

from . import branes, coulomb, gluing, hypertoric
from .errors import BoundExceeded, Mirror3dError, ParseError, UndefinedMap, UnknownCommand, ValidationError
from .lattice import IntMatrix, ToricStackData, gale_dual
from .laurent import FracElem, LaurentElem, MPoly, format_coeff

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_INVALID = 2
EXIT_BOUND = 3
EXIT_UNKNOWN = 4

DEFAULT_DEGREE_BOUND = 2


def _int_rows(value, name: str) -> list[list[int]]:
    if not isinstance(value, list) or not all(isinstance(row, list) for row in value):
        raise ValidationError(f"{name} must be a list of integer vectors")
    for row in value:
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in row):
            raise ValidationError(f"{name} entries must be integers, got {row}")
    return value


def _rational(x, name: str) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise ValidationError(f"{name} must be an integer or a rational string such as '1/2'")
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"{name}: {exc}") from None


def _rationals(values, name: str, length: int | None = None) -> tuple[Fraction, ...]:
    if not isinstance(values, list):
        raise ValidationError(f"{name} must be a list")
    if length is not None and len(values) != length:
        raise ValidationError(f"{name} must have {length} entries, got {len(values)}")
    return tuple(_rational(x, name) for x in values)


@dataclass(frozen=True)
class TheorySpec:
    torus_rank: int
    matter: IntMatrix
    rays: IntMatrix | None = None
    brane: dict = field(default_factory=dict)
    task: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.matter.nrows

    def canonical(self) -> dict:
        return {
            "torus_rank": self.torus_rank,
            "matter": [list(row) for row in self.matter.rows],
            "rays": None if self.rays is None else [list(row) for row in self.rays.rows],
            "brane": self.brane,
            "task": self.task,
        }

    def digest(self, extra: dict | None = None) -> str:
        payload = {"spec": self.canonical(), "options": extra or {}}
        text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def parse_spec(text: str) -> TheorySpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(data, dict):
        raise ValidationError("the specification must be a JSON object")
    unknown = set(data) - {"torus_rank", "matter", "rays", "brane", "task"}
    if unknown:
        raise ValidationError(f"unknown field(s): {', '.join(sorted(unknown))}")
    if "torus_rank" not in data:
        raise ValidationError("missing field 'torus_rank'")
    r = data["torus_rank"]
    if isinstance(r, bool) or not isinstance(r, int) or r < 0:
        raise ValidationError("torus_rank must be a nonnegative integer")
    if "matter" not in data:
        raise ValidationError("missing field 'matter'")
    rows = _int_rows(data["matter"], "matter")
    for i, row in enumerate(rows):
        if len(row) != r:
            raise ValidationError(f"matter[{i}] has length {len(row)}, expected torus_rank = {r}")
    matter = IntMatrix.of(rows, r)
    rays = None
    if data.get("rays") is not None:
        ray_rows = _int_rows(data["rays"], "rays")
        for j, u in enumerate(ray_rows):
            if len(u) != matter.nrows:
                raise ValidationError(f"rays[{j}] has length {len(u)}, expected {matter.nrows} (one entry per character)")
        rays = IntMatrix.of(ray_rows, matter.nrows)
    brane = data.get("brane") or {}
    task = data.get("task") or {}
    if not isinstance(brane, dict) or not isinstance(task, dict):
        raise ValidationError("brane and task must be JSON objects")
    return TheorySpec(r, matter, rays, brane, task)


@dataclass
class Options:
    degree_bound: int | None = None
    chart_cap: int = gluing.DEFAULT_CHART_CAP
    workers: int = 1

    def as_dict(self) -> dict:
        return {"degree_bound": self.degree_bound, "chart_cap": self.chart_cap, "workers": self.workers}


@dataclass
class Report:
    command: str
    input_digest: str
    result: bool
    details: dict

    def as_dict(self) -> dict:
        return {"command": self.command, "input_digest": self.input_digest, "result": self.result, "details": self.details}


# ---------------------------------------------------------------------------
# helpers


def _chart_list(label) -> list[int]:
    return sorted(label)


def _require_cap(spec: TheorySpec, opts: Options) -> None:
    if spec.n > opts.chart_cap:
        raise BoundExceeded(f"{spec.n} characters give {1 << spec.n} charts, above the cap of {1 << opts.chart_cap}")


def _task_vector(spec: TheorySpec, key: str) -> tuple[int, ...]:
    if key not in spec.task:
        raise ValidationError(f"task.{key} is required")
    (vec,) = _int_rows([spec.task[key]], f"task.{key}")
    if len(vec) != spec.torus_rank:
        raise ValidationError(f"task.{key} must have {spec.torus_rank} entries")
    return tuple(vec)


def _task_text(spec: TheorySpec, key: str) -> str:
    value = spec.task.get(key)
    if not isinstance(value, str):
        raise ValidationError(f"task.{key} must be a string")
    return value


def _degree(spec: TheorySpec, opts: Options) -> int:
    if opts.degree_bound is not None:
        return opts.degree_bound
    value = spec.task.get("degree_bound", DEFAULT_DEGREE_BOUND)
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise ValidationError("degree_bound must be a nonnegative integer")
    return value


def _brane(spec: TheorySpec) -> branes.ToricBraneData:
    if spec.rays is None:
        raise ValidationError("brane commands need fan rays")
    b = spec.brane
    kahler = b.get("kahler")
    if kahler is not None:
        if not isinstance(kahler, list):
            raise ValidationError("brane.kahler must be a list")
        kahler = [k if isinstance(k, str) else _rational(k, "brane.kahler") for k in kahler]
    moment = _rationals(b["moment"], "brane.moment", spec.torus_rank) if "moment" in b else None
    return branes.ToricBraneData(spec.rays, spec.matter, kahler=kahler, moment=moment, w0=b.get("w0"))


def _lagrangian_inputs(spec: TheorySpec) -> tuple[MPoly, list[list[int]]]:
    names = spec.task.get("variables")
    if not isinstance(names, list) or not all(isinstance(v, str) and v.isidentifier() for v in names):
        raise ValidationError("task.variables must be a list of identifiers")
    W = MPoly.parse(_task_text(spec, "potential"), tuple(names))
    exps = _int_rows(spec.task.get("exponents"), "task.exponents")
    return W, exps


# ---------------------------------------------------------------------------
# commands


def cmd_gale_dual(spec: TheorySpec, opts: Options):
    rays = spec.rays.rows if spec.rays is not None else IntMatrix.identity(spec.n).rows
    data = ToricStackData(spec.torus_rank, spec.n, tuple(rays), spec.matter)
    dual = gale_dual(data)
    return True, {
        "matter_action": dual.matter_action.tolist(),
        "residual_action": dual.residual_action.tolist(),
        "dimension": dual.dimension,
    }


def cmd_glue_verify(spec: TheorySpec, opts: Options):
    _require_cap(spec, opts)
    passed = failed = undefined = 0
    failures = []
    for i, j, k in gluing.all_triples(spec.n):
        try:
            ok = gluing.verify_cocycle(spec.matter, i, j, k)
        except UndefinedMap:
            undefined += 1
            continue
        if ok:
            passed += 1
        else:
            failed += 1
            failures.append([_chart_list(i), _chart_list(j), _chart_list(k)])
    return failed == 0, {"passed": passed, "failed": failed, "undefined": undefined, "failures": failures}


def cmd_glue_components(spec: TheorySpec, opts: Options):
    comps = gluing.glued_components(spec.matter, bound=opts.chart_cap)
    return True, {
        "count": len(comps),
        "components": [[_chart_list(c) for c in comp] for comp in comps],
    }


def cmd_coulomb_basis(spec: TheorySpec, opts: Options):
    report = coulomb.verify_presentation(spec.matter, _degree(spec, opts), bound=opts.chart_cap)
    passed = report.pop("passed")
    return passed, report


def cmd_coulomb_mult(spec: TheorySpec, opts: Options):
    lam, mu = _task_vector(spec, "lambda"), _task_vector(spec, "mu")
    prod_ = coulomb.z_mult(spec.matter, lam, mu)
    laurent = coulomb.z_generator(spec.matter, lam) * coulomb.z_generator(spec.matter, mu)
    return prod_.to_laurent() == laurent, {
        "product": prod_.pretty(),
        "product_text": prod_.to_text(),
        "laurent": laurent.to_text(),
    }


def cmd_coulomb_member(spec: TheorySpec, opts: Options):
    _require_cap(spec, opts)
    f = LaurentElem.parse_rank(_task_text(spec, "element"), spec.torus_rank)
    member = coulomb.membership_all_charts(f, spec.matter, bound=opts.chart_cap, workers=opts.workers)
    expansion = coulomb.from_laurent(f, spec.matter)
    two, hypothesis = coulomb.membership_two_charts(f, spec.matter)
    return member, {
        "element": f.to_text(),
        "expansion": None if expansion is None else expansion.to_text(),
        "two_chart": two,
        "two_chart_sufficient": hypothesis,
    }


def cmd_hypertoric_check(spec: TheorySpec, opts: Options):
    n = spec.task.get("n", spec.n)
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise ValidationError("task.n must be a nonnegative integer")
    if n > opts.chart_cap:
        raise BoundExceeded(f"{1 << n} charts exceed the cap")
    target = hypertoric.standard_form(n)
    charts = gluing.all_charts(n)
    bad_forms = [_chart_list(c) for c in charts if hypertoric.pullback_symplectic(c, n) != target]
    bad_transitions = [
        [_chart_list(a), _chart_list(b)]
        for a, b in product(charts, repeat=2)
        if hypertoric.transition(a, b, n) != hypertoric.displayed_transition(a, b, n)
    ]
    return not bad_forms and not bad_transitions, {
        "charts": len(charts),
        "symplectic_failures": bad_forms,
        "transition_failures": bad_transitions,
    }


def cmd_hypertoric_compare(spec: TheorySpec, opts: Options):
    _require_cap(spec, opts)
    charts = gluing.all_charts(spec.n)
    mismatches = []
    empty = 0
    for a, b in product(charts, repeat=2):
        rep = hypertoric.comparison_report(spec.matter, a, b)
        empty += rep["empty_correspondence"]
        if not rep["matches"]:
            mismatches.append([_chart_list(a), _chart_list(b)])
    return not mismatches, {
        "orientation": hypertoric.ORIENTATION,
        "pairs": len(charts) ** 2,
        "empty_correspondences": empty,
        "mismatches": mismatches,
    }


def cmd_brane_mirror(spec: TheorySpec, opts: Options):
    brane = _brane(spec)
    F = branes.hori_vafa(brane)
    return F.check_weights(brane.rho), F.pretty()


def cmd_brane_clagrangian(spec: TheorySpec, opts: Options):
    W, exps = _lagrangian_inputs(spec)
    C = branes.c_lagrangian(W, exps)
    residual = branes.lagrangian_residual(C, W, exps)
    constraints = list(C.constraints)
    sound = all(res.is_zero() or any(res == c for c in constraints) for res in residual)
    return sound, C.pretty()


def cmd_brane_params(spec: TheorySpec, opts: Options):
    brane = _brane(spec)
    l, r = brane.rays.nrows, brane.torus_rank
    b = spec.brane
    alpha2 = _rationals(b.get("alpha2", [0] * l), "brane.alpha2", l)
    alpha0 = _rationals(b.get("alpha0", [0] * r), "brane.alpha0", r)
    xi = _rationals(b.get("xi", [0] * r), "brane.xi", r)
    F = branes.hori_vafa(brane)
    cls = branes.phi_param(brane, alpha2, alpha0)
    moved = branes.apply_phi(F, cls)
    # the same class computed from the deformed brane: q_j picks up e^{-a_j}, mu drops by alpha_0
    deformed = branes.shift_moment(branes.shift_kahler(brane, alpha2), [-a for a in alpha0])
    phi_ok = moved == branes.hori_vafa(deformed)
    shifted = branes.apply_psi(F, branes.psi_param(xi))
    psi_ok = shifted == branes.hori_vafa(branes.shift_moment(brane, xi))
    return phi_ok and psi_ok, {
        "class": [format_coeff(x) for x in cls.canonical],
        "phi_identity": phi_ok,
        "psi_identity": psi_ok,
        "after_phi": moved.pretty(),
        "after_psi": shifted.pretty(),
    }


def cmd_blowup_lift(spec: TheorySpec, opts: Options):
    W, exps = _lagrangian_inputs(spec)
    C = branes.c_lagrangian(W, exps)
    roots = _int_rows(spec.task.get("roots", [[1] * spec.torus_rank]), "task.roots")
    algebra = branes.AffineBlowupAlgebra(spec.torus_rank, tuple(tuple(a) for a in roots))
    if "expression" in spec.task:
        num = LaurentElem.parse_rank(_task_text(spec, "expression"), spec.torus_rank)
        expr = FracElem(num, algebra.coroots)
    else:
        expr = algebra.generators()[0] if algebra.roots else None
    if expr is None:
        raise ValidationError("no root and no expression given")
    ok = branes.blowup_membership(expr, algebra, C)
    image = branes.restrict(expr, C)
    return ok, {"restriction": image.reduced().pretty(), "regular": ok}


COMMANDS: dict[str, Callable[[TheorySpec, Options], tuple[bool, Any]]] = {
    "gale-dual": cmd_gale_dual,
    "glue-verify": cmd_glue_verify,
    "glue-components": cmd_glue_components,
    "coulomb-basis": cmd_coulomb_basis,
    "coulomb-mult": cmd_coulomb_mult,
    "coulomb-member": cmd_coulomb_member,
    "hypertoric-check": cmd_hypertoric_check,
    "hypertoric-compare": cmd_hypertoric_compare,
    "brane-mirror": cmd_brane_mirror,
    "brane-clagrangian": cmd_brane_clagrangian,
    "brane-params": cmd_brane_params,
    "blowup-lift": cmd_blowup_lift,
}


def run(command: str, spec: TheorySpec, options: Options | None = None) -> Report:
    if command not in COMMANDS:
        raise UnknownCommand(f"unknown command {command!r}; choose from {', '.join(COMMANDS)}")
    options = options or Options()
    result, details = COMMANDS[command](spec, options)
    return Report(command, spec.digest({"command": command, **options.as_dict()}), bool(result), details)


def render(report: Report, fmt: str = "text") -> str:
    if fmt == "structured":
        return json.dumps(report.as_dict(), sort_keys=True, indent=2, ensure_ascii=False)
    lines = [f"command: {report.command}", f"input_digest: {report.input_digest}", f"result: {'true' if report.result else 'false'}"]
    for key in sorted(report.details):
        lines.append(f"{key}: {json.dumps(report.details[key], sort_keys=True, ensure_ascii=False)}")
    return "\n".join(lines)


def parse_report(text: str) -> Report:
    """Inverse of the structured rendering."""
    data = json.loads(text)
    return Report(data["command"], data["input_digest"], data["result"], data["details"])


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mirror3d", description="Exact checks for abelian 3d mirror symmetry computations.")
    p.add_argument("--spec", required=True, help="path to a JSON theory specification ('-' for stdin)")
    p.add_argument("--command", required=True, help=f"one of: {', '.join(COMMANDS)}")
    p.add_argument("--degree-bound", type=int, default=None, help="bound on |lambda_k| for presentation checks")
    p.add_argument("--chart-cap", type=int, default=gluing.DEFAULT_CHART_CAP, help="largest n whose 2^n charts are enumerated")
    p.add_argument("--workers", type=int, default=1, help="processes for chart-parallel membership tests")
    p.add_argument("--format", choices=("text", "structured"), default="text")
    return p


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command not in COMMANDS:
        return _fail(f"unknown command {args.command!r}", EXIT_UNKNOWN)
    try:
        if args.spec == "-":
            text = sys.stdin.read()
        else:
            with open(args.spec, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        return _fail(str(exc), EXIT_INVALID)
    options = Options(args.degree_bound, args.chart_cap, max(1, args.workers))
    try:
        spec = parse_spec(text)
        report = run(args.command, spec, options)
    except BoundExceeded as exc:
        return _fail(str(exc), EXIT_BOUND)
    except UnknownCommand as exc:
        return _fail(str(exc), EXIT_UNKNOWN)
    except Mirror3dError as exc:
        return _fail(f"{type(exc).__name__}: {exc}", EXIT_INVALID)
    print(render(report, args.format))
    return EXIT_OK if report.result else EXIT_FALSE


if __name__ == "__main__":
    sys.exit(main())
