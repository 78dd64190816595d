"""Command-line interface.

Exit codes: 0 success, 1 computation or validation failure, 2 usage error.
Defaults live in defaults.json next to this module and are overridable by
flags; --json emits a schema-versioned object (see schema.json).
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction
from importlib import resources

import click
import mpmath

from . import chen, delext, freealg, hodge, linfilt, relations
from .cache import open_cache
from .delext import MatrixSeries
from .mzv import zeta as zeta_value
from .words import parse_index

SCHEMA_VERSION = "periods/1"


def _defaults():
    with resources.files(__package__).joinpath("defaults.json").open() as fh:
        return json.load(fh)


DEFAULTS = _defaults()


def _emit(obj, as_json, text):
    if as_json:
        obj = {"schema": SCHEMA_VERSION, **obj}
        click.echo(json.dumps(obj, indent=2, default=str))
    else:
        click.echo(text)


def _fail(message):
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _report_lines(report):
    return str(report)


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _rational_matrix(obj):
    rows = obj["matrix"] if isinstance(obj, dict) else obj
    return [[Fraction(str(x)) for x in row] for row in rows]


@click.group()
def main():
    """Tools for periods of the thrice-punctured line and limit mixed
    Hodge structures."""


@main.command("zeta")
@click.option("--index", required=True, help='MZV index, e.g. "2" or "1,2".')
@click.option("--digits", type=int, default=DEFAULTS["digits"], show_default=True)
@click.option("--json", "as_json", is_flag=True)
@click.option("--cache", "cache_path", default=None, help="cache file (or $PERIODS_CACHE)")
def zeta_cmd(index, digits, as_json, cache_path):
    """Evaluate a multiple zeta value."""
    try:
        idx = parse_index(index)
        store = open_cache(cache_path)
        value = zeta_value(idx, digits, cache=store)
        text = mpmath.nstr(value, digits)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        _fail(exc)
    _emit({"command": "zeta", "index": list(idx.parts), "digits": digits,
           "value": text}, as_json, text)


@main.command("assoc")
@click.option("--cutoff", type=int, default=DEFAULTS["cutoff"], show_default=True)
@click.option("--digits", type=int, default=15, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def assoc_cmd(cutoff, digits, as_json):
    """Coefficients of the regularized associator."""
    try:
        result = chen.associator(cutoff, digits=digits)
        series = result.series
        lines = [
            f"{word or '1':<{cutoff}}  {mpmath.nstr(series.coefficient(word), digits)}"
            for word in series.words()
        ]
    except Exception as exc:  # noqa: BLE001
        _fail(exc)
    _emit(
        {"command": "assoc", "cutoff": cutoff, "digits": digits,
         "series": freealg.to_json(series),
         "residuals": [str(r) for r in result.residuals]},
        as_json, "\n".join(lines),
    )


@main.command("monodromy")
@click.option("--cusp", type=click.Choice(["0", "1"]), default="0", show_default=True)
@click.option("--cutoff", type=int, default=3, show_default=True)
@click.option("--digits", type=int, default=15, show_default=True)
@click.option("--tol", type=float, default=1e-6, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def monodromy_cmd(cusp, cutoff, digits, tol, as_json):
    """Regularized circle transport at a cusp against the exact exponential."""
    try:
        limit, exact = chen.local_monodromy(int(cusp), cutoff, digits=digits)
        deviation = (limit.series - exact).max_abs()
        ok = deviation < tol
    except Exception as exc:  # noqa: BLE001
        _fail(exc)
    sign = "+" if cusp == "0" else "-"
    text = (
        f"loop around {cusp}: max deviation from exp({sign}2(pi)i X{cusp}) "
        f"= {mpmath.nstr(deviation, 3)} ({'ok' if ok else 'FAIL'})"
    )
    _emit(
        {"command": "monodromy", "cusp": int(cusp), "cutoff": cutoff,
         "deviation": str(deviation), "ok": ok,
         "exact": freealg.to_json(exact)},
        as_json, text,
    )
    if not ok:
        sys.exit(1)


@main.command("wfilt")
@click.option("--matrix", "matrix_path", required=True, type=click.Path(exists=True))
@click.option("--shift", type=int, default=0, show_default=True,
              help="reindex by a weight k")
@click.option("--json", "as_json", is_flag=True)
def wfilt_cmd(matrix_path, shift, as_json):
    """Monodromy weight filtration of a nilpotent rational matrix."""
    try:
        N = _rational_matrix(_load_json(matrix_path))
        W = linfilt.weight_filtration(N)
        if shift:
            W = W.shift(shift)
        report = linfilt.verify_weight_properties(N, W, shift=shift)
        steps = {
            str(idx): [[str(x) for x in v] for v in space.basis]
            for idx, space in W.steps
        }
        lines = [f"W_{idx}: dim {space.dim}" for idx, space in W.steps]
        lines.append(_report_lines(report))
    except linfilt.NotNilpotentError as exc:
        _fail(exc)
    except Exception as exc:  # noqa: BLE001
        _fail(exc)
    _emit({"command": "wfilt", "shift": shift, "steps": steps,
           "properties_ok": report.ok}, as_json, "\n".join(lines))
    if not report.ok:
        sys.exit(1)


@main.command("regularize")
@click.option("--matrix", "matrix_path", required=True, type=click.Path(exists=True),
              help="JSON list of rational coefficient matrices of A(t)")
@click.option("--order", type=int, default=None)
@click.option("--t", "t_value", default=None, help="evaluate N(t) at this point")
@click.option("--json", "as_json", is_flag=True)
def regularize_cmd(matrix_path, order, t_value, as_json):
    """Holomorphic gauge P(t) with v0 t^{A0} P(t) solving t v' = v A(t)."""
    try:
        obj = _load_json(matrix_path)
        coeffs = obj["series"] if isinstance(obj, dict) else obj
        A = MatrixSeries([_rational_matrix(c) for c in coeffs])
        P = delext.regularize(A, order=order)
        defects = delext.ode_defect(A.truncated(P.order), P)
        exact = all(linfilt.mat_is_zero(dft) for dft in defects)
        out = {
            "command": "regularize",
            "order": P.order,
            "coefficients": [[[str(x) for x in row] for row in c]
                             for c in P.coefficients],
            "defect_zero": exact,
            "residue": [[str(x) for x in row]
                        for row in delext.connection_residue(A)],
        }
        lines = [f"P computed through order {P.order}; defect zero: {exact}"]
        if t_value is not None:
            Nt, warning = delext.monodromy_log(A, complex(t_value), P=P)
            out["monodromy_log"] = [[repr(x) for x in row] for row in Nt.tolist()]
            if warning:
                out["warning"] = warning
                lines.append(f"warning: {warning}")
            lines.append(f"N({t_value}) = {Nt.tolist()}")
    except Exception as exc:  # noqa: BLE001
        _fail(exc)
    _emit(out, as_json, "\n".join(lines))
    if not exact:
        sys.exit(1)


@main.group("hodge")
def hodge_group():
    """Hodge structure validators."""


@hodge_group.command("check")
@click.option("--file", "path", required=True, type=click.Path(exists=True))
@click.option("--json", "as_json", is_flag=True)
def hodge_check(path, as_json):
    """Validate a Hodge-structure / polarized / mixed fixture file."""
    try:
        obj = _load_json(path)
        kind = obj.get("type")
        if kind is None:
            kind = "mhs" if "weights" in obj else (
                "polarized" if "form" in obj else "hodge")
        if kind == "hodge":
            report = hodge.validate_hodge(hodge.hodge_from_json(obj))
        elif kind == "polarized":
            report = hodge.validate_polarized(hodge.polarized_from_json(obj))
        elif kind == "mhs":
            report = hodge.validate_mhs(hodge.mhs_from_json(obj))
        else:
            raise ValueError(f"unknown fixture type {kind!r}")
    except Exception as exc:  # noqa: BLE001
        _fail(exc)
    _emit(
        {"command": "hodge.check", "type": kind, "ok": report.ok,
         "checks": [{"name": n, "ok": o, "witness": w}
                    for n, o, w in report.checks]},
        as_json, str(report),
    )
    if not report.ok:
        sys.exit(1)


@main.group("orbit")
def orbit_group():
    """Nilpotent orbit checks."""


@orbit_group.command("check")
@click.option("--file", "path", required=True, type=click.Path(exists=True))
@click.option("--t", "t_value", default="0.001", show_default=True)
@click.option("--json", "as_json", is_flag=True)
def orbit_check(path, t_value, as_json):
    """Limit-MHS check of a nilpotent orbit fixture at a sample t."""
    try:
        data = hodge.orbit_from_json(_load_json(path))
        report = hodge.nilpotent_orbit_check(data, complex(t_value))
    except Exception as exc:  # noqa: BLE001
        _fail(exc)
    _emit(
        {"command": "orbit.check", "t": str(t_value), "ok": report.ok,
         "checks": [{"name": n, "ok": o, "witness": w}
                    for n, o, w in report.checks]},
        as_json, str(report),
    )
    if not report.ok:
        sys.exit(1)


@main.command("relations")
@click.option("--weight", type=int, required=True)
@click.option("--digits", type=int, default=80, show_default=True)
@click.option("--bound", type=int, default=DEFAULTS["bound"], show_default=True)
@click.option("--json", "as_json", is_flag=True)
@click.option("--cache", "cache_path", default=None)
def relations_cmd(weight, digits, bound, as_json, cache_path):
    """Integer relations among all admissible MZVs of one weight."""
    try:
        store = open_cache(cache_path)
        result = relations.mzn_span_experiment(
            weight, digits=digits, bound=bound, cache=store
        )
        if store is not None:
            for rel in result.relations:
                store.store_relation(rel.weight, rel.labels, rel.coefficients,
                                     rel.residual, rel.digits)
        bound_dim = relations.zagier_dimensions(weight)[-1]
        lines = [
            f"weight {weight}: {len(result.labels)} values, detected dimension "
            f"{result.dimension} (upper-bound estimate; d_{weight} = {bound_dim})"
        ]
        for rel in result.relations:
            combo = " + ".join(
                f"{c}*{l}" for c, l in zip(rel.coefficients, rel.labels) if c
            )
            lines.append(f"  relation: {combo} = 0 (residual {rel.residual})")
    except relations.PrecisionError as exc:
        _fail(exc)
    except Exception as exc:  # noqa: BLE001
        _fail(exc)
    _emit(
        {"command": "relations", "weight": weight, "digits": digits,
         "bound": bound, "dimension": result.dimension,
         "zagier_bound": bound_dim,
         "independent": result.independent,
         "relations": [vars(rel) for rel in result.relations]},
        as_json, "\n".join(lines),
    )


@main.command("dims")
@click.option("--max", "m_max", type=int, default=DEFAULTS["dims_max"], show_default=True)
@click.option("--json", "as_json", is_flag=True)
def dims_cmd(m_max, as_json):
    """Weight-graded dimensions d_0..d_max of Q[Z2] (x) Q<Z3,Z5,...>."""
    try:
        dims = relations.zagier_dimensions(m_max)
    except Exception as exc:  # noqa: BLE001
        _fail(exc)
    text = ",".join(str(d) for d in dims)
    _emit({"command": "dims", "max": m_max, "dims": dims}, as_json, text)


@main.command("report")
@click.option("--out", "outdir", required=True, type=click.Path())
@click.option("--cutoff", type=int, default=3, show_default=True)
@click.option("--digits", type=int, default=15, show_default=True)
def report_cmd(outdir, cutoff, digits):
    """Render diagnostic figures and CSV tables into a directory."""
    from . import report as report_mod

    try:
        paths = report_mod.write_report(outdir, cutoff=cutoff, digits=digits)
    except Exception as exc:  # noqa: BLE001
        _fail(exc)
    for p in paths:
        click.echo(p)


if __name__ == "__main__":
    main()
