"""Command-line entry point: ``pastdiff gen|bound|leading|apply|study|selftest``."""

from __future__ import annotations

import json
import sys

import click

from pastdiff.convergence import RoundoffRegimeError, convergence_study, default_grid, get_function
from pastdiff.emit import EmitFormat, derivative_label, render
from pastdiff.error_analysis import (
    Bias,
    ErrorModel,
    bias_basis,
    bias_direction,
    bound_report,
    leading_error_term,
)
from pastdiff.stencil import NodeSet, generate_stencil
from pastdiff.stream import StreamConfig, StreamProcessor, read_samples_csv, write_estimates_csv

EXIT_OK, EXIT_EMPTY, EXIT_USAGE = 0, 1, 2


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_USAGE)


def _stencil(nodes: str, k: int):
    try:
        return generate_stencil(NodeSet.parse(nodes), k)
    except ValueError as exc:
        _fail(str(exc))


nodes_option = click.option("--nodes", required=True, help="Comma-separated offsets, e.g. -4,-3,-2,-1,0")
k_option = click.option("--k", "k", type=int, required=True, help="Derivative order, 0 < k < n.")


@click.group()
def main():
    """Past-only finite-difference stencils."""


@main.command()
@nodes_option
@k_option
@click.option("--format", "fmt", type=click.Choice([f.value for f in EmitFormat]), default="text", show_default=True)
def gen(nodes, k, fmt):
    """Generate a stencil and print it."""
    click.echo(render(_stencil(nodes, k), fmt))


@main.command()
@nodes_option
@k_option
@click.option("--M", "M", type=float, required=True, help="Bound on |f^(n)| over the sampled interval.")
@click.option("--h", "h", type=float, required=True, help="Step size.")
def bound(nodes, k, M, h):
    """Worst-case truncation bound as JSON."""
    stencil = _stencil(nodes, k)
    try:
        model = ErrorModel(stencil, M, h)
    except ValueError as exc:
        _fail(str(exc))
    click.echo(_dump(bound_report(model)))


@main.command()
@nodes_option
@k_option
def leading(nodes, k):
    """Leading error term and under/over-estimation verdicts."""
    stencil = _stencil(nodes, k)
    term = leading_error_term(stencil)
    out = term.to_dict()
    label = derivative_label(stencil.n)
    lines = []
    for sign, op in (("positive", ">"), ("negative", "<")):
        verdict = bias_direction(stencil, sign)
        if verdict is not Bias.INDETERMINATE:
            lines.append(f"{verdict.value} when {label}{op}0")
    out["bias"] = lines
    out["bias_basis"] = bias_basis(stencil) if lines else None
    click.echo(_dump(out))


@main.command()
@click.option("--input", "input_path", default="-", show_default=True, help="CSV with header t,y; '-' for stdin.")
@click.option("--output", "output_path", default="-", show_default=True)
@click.option("--diagnostics", "diag_path", default=None, help="Where 'line,reason' records go (default stderr).")
@click.option("--n", "n", type=int, required=True, help="Window size.")
@k_option
@click.option("--quantization", type=int, default=6, show_default=True, help="Decimal digits kept in offsets.")
def apply(input_path, output_path, diag_path, n, k, quantization):
    """Stream derivative estimates over a CSV of samples."""
    try:
        config = StreamConfig(n, k, quantization)
    except ValueError as exc:
        _fail(str(exc))
    proc = StreamProcessor(config)
    with click.open_file(input_path, "r") as src, click.open_file(output_path, "w") as dst:
        diag = click.open_file(diag_path, "w") if diag_path else None
        diag_handle = diag if diag is not None else sys.stderr
        diag_handle.write("line,reason\n")

        def report(line, reason):
            diag_handle.write(f"{line},{reason}\n")

        def estimates():
            seen = 0
            try:
                for line, t, y in read_samples_csv(src, report):
                    est = proc.push(t, y, index=line)
                    for rej in proc.rejected[seen:]:
                        report(rej.index, rej.reason)
                    seen = len(proc.rejected)
                    if est is not None:
                        yield t, est
            except ValueError as exc:
                _fail(str(exc))

        count = write_estimates_csv(dst, estimates())
        if diag is not None:
            diag.close()
    if count == 0:
        click.echo("insufficient samples", err=True)
        sys.exit(EXIT_EMPTY)


@main.command()
@nodes_option
@k_option
@click.option("--fn", "fn_name", default="sin", show_default=True, help="sin, exp, log1p, runge or poly:c0,c1,...")
@click.option("--t0", type=float, default=1.0, show_default=True)
@click.option("--h-max", type=float, default=1e-1, show_default=True)
@click.option("--h-min", type=float, default=1e-3, show_default=True)
@click.option("--points", type=int, default=12, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json", "csv"]), default="text", show_default=True)
def study(nodes, k, fn_name, t0, h_max, h_min, points, fmt):
    """Convergence table and fitted log-log slope."""
    stencil = _stencil(nodes, k)
    try:
        fn = get_function(fn_name)
        grid = default_grid(h_max, h_min, points)
        report = convergence_study(stencil, k, fn, t0, grid)
    except RoundoffRegimeError as exc:
        click.echo(f"exact regime: {exc}")
        sys.exit(EXIT_EMPTY)
    except ValueError as exc:
        _fail(str(exc))
    if fmt == "json":
        click.echo(report.to_json())
    elif fmt == "csv":
        click.echo(report.to_csv(), nl=False)
    else:
        click.echo(report.to_text())
        if leading_error_term(stencil).vanishes:
            click.echo("note: leading coefficient is zero; observed order exceeds n-k")


@main.command()
@click.option("--seed", type=int, default=20240601, show_default=True)
def selftest(seed):
    """Run the exact identity checks."""
    from pastdiff import selftest as suite

    failed = 0
    for name, ok, detail in suite.run(seed):
        click.echo(f"{'PASS' if ok else 'FAIL'} {name}{': ' + detail if detail else ''}")
        failed += not ok
    click.echo(f"{len(suite.CHECKS) - failed}/{len(suite.CHECKS)} checks passed")
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
