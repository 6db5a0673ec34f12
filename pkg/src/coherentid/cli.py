"""Command-line surface: curves, simulate, verify, database, optimize-t1.

Every subcommand accepts --config PATH pointing at a JSON object whose
keys mirror the option names (dashes may be written as underscores);
explicit command-line flags win over config values.  Reports are
deterministic byte-for-byte for a fixed configuration and seed.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__, database, strategies, verify
from .optics import (
    OutcomeRecord,
    build_ui2_circuit,
    count_ui2_outcomes,
    records_to_csv,
    run_circuit,
    sample_click_patterns,
    ui2_input,
)
from .strategies import CURVE_FUNCTIONS, CurvePoint, Priors


def _apply_config(ctx: click.Context, config_path: str | None) -> None:
    """Fill parameters from a JSON config for options the user left at default."""
    if config_path is None:
        return
    values = json.loads(Path(config_path).read_text())
    if not isinstance(values, dict):
        raise click.UsageError("config file must hold a JSON object")
    for key, value in values.items():
        name = key.replace("-", "_")
        if name not in ctx.params:
            raise click.UsageError(f"unknown config key {key!r}")
        source = ctx.get_parameter_source(name)
        if source is not None and source.name == "DEFAULT":
            ctx.params[name] = value


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        click.echo(text, nl=False)
    else:
        Path(path).write_text(text)


def _json_report(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _parse_complex(value: str) -> complex:
    try:
        return complex(value.replace(" ", ""))
    except ValueError as exc:
        raise click.UsageError(f"cannot parse complex amplitude {value!r}") from exc


config_option = click.option(
    "--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
    help="JSON file supplying defaults for any option of this command.",
)


@click.group()
@click.version_option(version=__version__)
def main():
    """Identification of unknown coherent states: curves, circuits, certification."""


@main.command("curves")
@click.option("--min", "grid_min", type=float, default=0.0, show_default=True)
@click.option("--max", "grid_max", type=float, default=3.0, show_default=True)
@click.option("--steps", type=int, default=301, show_default=True)
@click.option("--out", "out_path", default=None, help="Output CSV path (default stdout).")
@config_option
@click.pass_context
def cmd_curves(ctx, grid_min, grid_max, steps, out_path, config_path):
    """Emit all strategy probability curves over a separation grid as CSV."""
    _apply_config(ctx, config_path)
    grid_min = ctx.params["grid_min"]
    grid_max = ctx.params["grid_max"]
    steps = ctx.params["steps"]
    out_path = ctx.params["out_path"]
    if steps < 2:
        raise click.UsageError("steps must be at least 2")
    if grid_min < 0 or grid_max < grid_min:
        raise click.UsageError("need 0 <= min <= max")
    grid = np.linspace(grid_min, grid_max, steps)
    points = [
        CurvePoint(float(delta), name, float(prob))
        for name, func in CURVE_FUNCTIONS.items()
        for delta, prob in zip(grid, np.asarray(func(grid), dtype=float))
    ]
    lines = ["strategy,delta_abs,probability"]
    lines += [f"{p.strategy},{p.delta_abs:.9g},{p.probability:.9g}" for p in points]
    _write_text(out_path, "\n".join(lines) + "\n")


@main.command("simulate")
@click.option("--alpha1", default=None, help="First reference amplitude, e.g. '1+0.5j'.")
@click.option("--alpha2", default=None, help="Second reference amplitude.")
@click.option("--true-state", type=click.IntRange(1, 2), default=None,
              help="Which reference the probe carries.")
@click.option("--t1", type=float, default=0.5, show_default=True)
@click.option("--shots", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_path", default=None, help="Output JSON path (default stdout).")
@click.option("--records", "records_path", default=None,
              help="Optional per-shot CSV (seed, shot, clicks, outcome).")
@config_option
@click.pass_context
def cmd_simulate(ctx, alpha1, alpha2, true_state, t1, shots, seed, out_path,
                 records_path, config_path):
    """Run the two-reference circuit and compare counts with the predicted rates."""
    _apply_config(ctx, config_path)
    params = ctx.params
    missing = [k for k in ("alpha1", "alpha2", "true_state", "shots", "seed")
               if params[k] is None]
    if missing:
        raise click.UsageError(f"missing required parameters: {', '.join(missing)}")
    a1 = _parse_complex(str(params["alpha1"]))
    a2 = _parse_complex(str(params["alpha2"]))
    true_state = int(params["true_state"])
    t1 = float(params["t1"])
    shots = int(params["shots"])
    seed = int(params["seed"])
    if shots < 0:
        raise click.UsageError("shots must be non-negative")

    circuit = build_ui2_circuit(t1)
    probe = a1 if true_state == 1 else a2
    output = run_circuit(circuit, ui2_input(probe, a1, a2))
    if shots:
        patterns = sample_click_patterns(output, circuit, seed, shots)
        counts = count_ui2_outcomes(patterns)
    else:
        patterns = np.zeros((0, 2), dtype=bool)
        counts = {"identified_1": 0, "identified_2": 0, "inconclusive": 0, "error": 0}

    f1, f2 = strategies.bs_exponents(t1)
    delta_sq = abs(a1 - a2) ** 2
    expected = {
        "p_identify_1": float(1.0 - np.exp(-f1 * delta_sq)) if true_state == 1 else 0.0,
        "p_identify_2": float(1.0 - np.exp(-f2 * delta_sq)) if true_state == 2 else 0.0,
        "p_bs_equal_priors": strategies.p_bs(a1, a2, t1, Priors.equal()),
    }
    payload = {
        "config": {
            "alpha1": str(a1), "alpha2": str(a2), "true_state": true_state,
            "t1": t1, "shots": shots, "seed": seed,
        },
        "counts": counts,
        "frequencies": {k: (v / shots if shots else 0.0) for k, v in counts.items()},
        "expected": expected,
        "tool_version": __version__,
    }
    _write_text(params["out_path"], _json_report(payload))

    if params["records_path"] is not None and shots:
        records = []
        for i, row in enumerate(patterns):
            if row[0] and row[1]:
                outcome = "error"
            elif row[1]:
                outcome = "identified_1"
            elif row[0]:
                outcome = "identified_2"
            else:
                outcome = "inconclusive"
            records.append(OutcomeRecord(seed, i, tuple(bool(x) for x in row), outcome))
        with open(params["records_path"], "w", newline="") as handle:
            records_to_csv(records, handle)


@main.command("verify")
@click.option("--qudit", "qudit_only", is_flag=True, help="Run only the qudit battery.")
@click.option("--fock", "fock_only", is_flag=True, help="Run only the number-space battery.")
@click.option("--d", "dimension", type=int, default=3, show_default=True)
@click.option("--n-max", type=int, default=12, show_default=True)
@click.option("--out", "out_path", default=None, help="Output JSON path (default stdout).")
@config_option
@click.pass_context
def cmd_verify(ctx, qudit_only, fock_only, dimension, n_max, out_path, config_path):
    """Run the certification batteries; exit 1 if any check fails."""
    _apply_config(ctx, config_path)
    qudit_only = ctx.params["qudit_only"]
    fock_only = ctx.params["fock_only"]
    dimension = ctx.params["dimension"]
    n_max = ctx.params["n_max"]

    checks: list[verify.CheckResult] = []
    run_all = not (qudit_only or fock_only)
    if qudit_only or run_all:
        dims = [dimension] if qudit_only else sorted({2, dimension})
        for d in dims:
            checks.extend(verify.qudit_battery(d))
    if fock_only or run_all:
        checks.extend(verify.fock_battery(ctx.params["n_max"]))
    if run_all:
        checks.extend(verify.database_battery())

    payload = {
        "config": {"qudit": qudit_only, "fock": fock_only, "d": dimension, "n_max": n_max},
        "checks": [c.to_dict() for c in checks],
        "all_pass": all(c.passed for c in checks),
        "tool_version": __version__,
    }
    _write_text(ctx.params["out_path"], _json_report(payload))
    if not payload["all_pass"]:
        sys.exit(1)


@main.command("database")
@click.option("--n", "n_refs", type=int, default=None, help="Number of references.")
@click.option("--ring-alpha", type=float, default=None,
              help="Radius of the symmetric ring configuration.")
@click.option("--refs", "refs_json", default=None,
              help='JSON list of reference amplitudes, e.g. \'["1", "0.5+1j"]\'.')
@click.option("--true-index", type=int, default=1, show_default=True)
@click.option("--shots", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_path", default=None, help="Output JSON path (default stdout).")
@config_option
@click.pass_context
def cmd_database(ctx, n_refs, ring_alpha, refs_json, true_index, shots, seed,
                 out_path, config_path):
    """Simulate the N-reference search and report analytic and sampled rates."""
    _apply_config(ctx, config_path)
    params = ctx.params
    n_refs = params["n_refs"]
    ring_alpha = params["ring_alpha"]
    refs_json = params["refs_json"]
    true_index = int(params["true_index"])
    shots, seed = params["shots"], params["seed"]
    if shots is None or seed is None:
        raise click.UsageError("missing required parameters: shots, seed")
    if (ring_alpha is None) == (refs_json is None):
        raise click.UsageError("supply exactly one of --ring-alpha or --refs")

    if refs_json is not None:
        raw = refs_json if isinstance(refs_json, list) else json.loads(refs_json)
        refs = tuple(_parse_complex(str(r)) for r in raw)
        if n_refs is not None and n_refs != len(refs):
            raise click.UsageError("--n disagrees with the number of --refs entries")
        n_refs = len(refs)
        spec = database.DatabaseSpec(refs, (1.0 / n_refs,) * n_refs, true_index)
    else:
        if n_refs is None:
            raise click.UsageError("missing required parameters: n")
        spec = database.DatabaseSpec.ring(float(ring_alpha), int(n_refs), true_index)

    summary = database.run_database_mc(spec, int(shots), int(seed))
    p_paper = database.published_success_probability(spec)
    stderr = (
        (summary.p_conditional_true * (1.0 - summary.p_conditional_true) / shots) ** 0.5
        if shots
        else 0.0
    )
    payload = {
        "config": {
            "n": spec.n_refs,
            "ring_alpha": ring_alpha,
            "refs": [str(r) for r in spec.references],
            "true_index": true_index,
            "shots": shots,
            "seed": seed,
        },
        "n": spec.n_refs,
        "p_analytic_circuit": summary.p_analytic_circuit,
        "p_paper_constant": p_paper,
        "exponent_constants": {
            "circuit": database.circuit_exponent_constant(spec.n_refs),
            "published": database.published_exponent_constant(spec.n_refs),
        },
        "mc_estimate": summary.success_frequency,
        "mc_stderr": stderr,
        "shots": shots,
        "counts": {
            "identified": list(summary.identified),
            "inconclusive": summary.inconclusive,
            "misidentifications": summary.misidentifications,
        },
        "tool_version": __version__,
    }
    _write_text(params["out_path"], _json_report(payload))
    if summary.misidentifications:
        sys.exit(1)


@main.command("optimize-t1")
@click.option("--alpha1", required=True)
@click.option("--alpha2", required=True)
@click.option("--eta1", type=float, default=0.5, show_default=True)
@click.option("--out", "out_path", default=None)
@config_option
@click.pass_context
def cmd_optimize_t1(ctx, alpha1, alpha2, eta1, out_path, config_path):
    """Report the first-splitter transmittivity maximizing the success rate."""
    _apply_config(ctx, config_path)
    a1 = _parse_complex(str(ctx.params["alpha1"]))
    a2 = _parse_complex(str(ctx.params["alpha2"]))
    priors = Priors.from_eta1(float(ctx.params["eta1"]))
    t1_star = strategies.optimize_t1(a1, a2, priors)
    payload = {
        "config": {"alpha1": str(a1), "alpha2": str(a2), "eta1": priors.eta1},
        "t1_star": t1_star,
        "p_bs_at_optimum": strategies.p_bs(a1, a2, t1_star, priors),
        "tool_version": __version__,
    }
    _write_text(ctx.params["out_path"], _json_report(payload))


if __name__ == "__main__":
    main()
