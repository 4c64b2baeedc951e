"""Command-line console for designing, evaluating, and monitoring trials.

Every command reads JSON configs in the same schema the HTTP service uses,
prints either a rendered table or full-precision JSON, and can write a
report bundle (CSV + JSON + figure) next to the terminal output via --out.
"""

from __future__ import annotations

import functools
import json

import click

from . import render, serialize
from .design import derive_boundaries, interim_decision
from .errors import Bop2teError
from .mc import SimulationConfig, estimate_oc, simulate_multidose
from .oc import phi_sensitivity_curve
from .search import global_boundary_search, optimize
from .store import Store

DEFAULT_PHI_GRID = "0.25,0.5,1,2,4,10,100"


def _fail_on_domain_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except Bop2teError as exc:
            raise click.ClickException(str(exc))

    return wrapper


def _load_config(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _emit(payload: dict, text: str, output_format: str) -> None:
    if output_format == "json":
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    else:
        click.echo(text)


def _resolve_boundaries(obj: dict, spec):
    if "boundaries" in obj and obj["boundaries"] is not None:
        b = serialize.parse_boundaries(obj["boundaries"])
        b.validate_against(spec)
        return b
    if "cutoffs" in obj and obj["cutoffs"] is not None:
        return derive_boundaries(spec, serialize.parse_cutoffs(obj["cutoffs"]))
    return optimize(spec).boundaries


format_option = click.option(
    "--format", "output_format", type=click.Choice(["table", "json"]), default="table",
    help="Rendered table or full-precision JSON.",
)
out_option = click.option(
    "--out", "out_stem", default=None,
    help="Write <out>.csv, <out>.json and <out>.png report files.",
)
store_option = click.option(
    "--store", "store_path", default=None,
    help="Store file path (default: BOP2TE_STORE or ./bop2te_store.jsonl).",
)


@click.group()
def main():
    """Design engine and decision console for two-endpoint phase II trials."""


@main.command("design")
@click.option("--config", "config_path", required=True, help="Design spec JSON file.")
@click.option("--grid", type=click.Choice(["compact", "specified"]), default="compact")
@click.option("--global", "use_global", is_flag=True, help="Exhaustive boundary search instead of the cutoff grid.")
@click.option("--practical-constraint", is_flag=True, help="Restrict the exhaustive search to explainable boundaries.")
@click.option("--annotation", default="", help="Free-text note stored with the design.")
@click.option("--no-save", is_flag=True, help="Do not persist the design.")
@format_option
@out_option
@store_option
@_fail_on_domain_errors
def cmd_design(config_path, grid, use_global, practical_constraint, annotation,
               no_save, output_format, out_stem, store_path):
    """Optimize a design and print its boundaries and operating characteristics."""
    spec = serialize.parse_design_spec(_load_config(config_path))
    if use_global:
        result = global_boundary_search(spec, practical_constraint=practical_constraint)
        label = "Global*" if practical_constraint else "Global"
    else:
        result = optimize(spec, grid_variant=grid)
        label = "BOP2-TE"
    design_id = None
    if not no_save:
        doc = Store(store_path).save_design(spec, result, annotation)
        design_id = doc.id
    payload = {
        "design_id": design_id,
        "label": label,
        "spec": serialize.spec_to_dict(spec),
        "result": serialize.result_to_dict(result),
    }
    text = render.format_design(spec, result, label=label)
    if design_id is not None:
        text += f"\n\nsaved as design {design_id}"
    _emit(payload, text, output_format)
    if out_stem:
        render.write_csv(out_stem + ".csv", render.design_report_rows(spec, result))
        render.write_json(out_stem + ".json", payload)
        render.figure_boundaries(spec, result.boundaries, out_stem + ".png")


@main.command("oc")
@click.option("--config", "config_path", default=None, help="Design spec JSON (optionally with boundaries or cutoffs).")
@click.option("--design-id", default=None, help="Evaluate a stored design instead of a config file.")
@click.option("--mc", "mc_replicates", type=int, default=None, help="Add Monte Carlo estimates with this many replicates.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--phi-grid", "phi_grid", default=None,
              help=f"Comma-separated odds ratios for a sensitivity curve (e.g. {DEFAULT_PHI_GRID}).")
@format_option
@out_option
@store_option
@_fail_on_domain_errors
def cmd_oc(config_path, design_id, mc_replicates, seed, phi_grid,
           output_format, out_stem, store_path):
    """Exact operating characteristics, optional simulation check, odds-ratio sweep."""
    from .oc import operating_characteristics

    if (config_path is None) == (design_id is None):
        raise click.ClickException("give exactly one of --config or --design-id")
    if design_id is not None:
        doc = Store(store_path).get_design(design_id)
        spec = doc.spec
        if doc.result is None:
            raise click.ClickException(f"design {design_id} has no stored result")
        boundaries = doc.result.boundaries
    else:
        obj = _load_config(config_path)
        spec = serialize.parse_design_spec(obj)
        boundaries = _resolve_boundaries(obj, spec)
    ocs = {
        code: operating_characteristics(spec, boundaries, spec.hypothesis(code))
        for code in ("h00", "h01", "h10", "h11")
    }
    payload = {
        "design_id": design_id,
        "boundaries": serialize.boundaries_to_dict(boundaries),
        "oc": {code: serialize.oc_to_dict(oc) for code, oc in ocs.items()},
    }
    mc = None
    if mc_replicates is not None:
        config = SimulationConfig(replicates=mc_replicates, seed=seed)
        mc = {
            code: estimate_oc(spec, boundaries, spec.hypothesis(code), config)
            for code in ("h00", "h01", "h10", "h11")
        }
        payload["mc"] = {code: serialize.mc_oc_to_dict(est) for code, est in mc.items()}
    text = render.format_boundary_table(spec, boundaries) + "\n\n" + render.format_oc_table(ocs, mc)
    curve = None
    if phi_grid is not None:
        phis = [float(tok) for tok in phi_grid.split(",") if tok.strip()]
        curve = phi_sensitivity_curve(spec, boundaries, phis)
        payload["phi_curve"] = curve
        curve_rows = render.phi_report_rows(curve)
        text += "\n\n" + render._table(
            ["phi", "h00", "h01", "h10", "h11"],
            [[f"{r['phi']:g}"] + [render.fmt_prob(r[c]) for c in ("h00", "h01", "h10", "h11")]
             for r in curve_rows],
        )
    _emit(payload, text, output_format)
    if out_stem:
        if curve is not None:
            render.write_csv(out_stem + ".csv", render.phi_report_rows(curve))
            render.figure_phi_sensitivity(curve, spec.alpha_targets, out_stem + ".png")
        else:
            render.write_csv(out_stem + ".csv", render.oc_report_rows(ocs, mc))
            render.figure_oc(ocs, out_stem + ".png")
        render.write_json(out_stem + ".json", payload)


@main.command("simulate-multidose")
@click.option("--config", "config_path", required=True,
              help="JSON with arms, per_arm_design, truth, replicates, seed.")
@click.option("--replicates", type=int, default=None, help="Override the config replicate count.")
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@format_option
@out_option
@_fail_on_domain_errors
def cmd_simulate_multidose(config_path, replicates, seed, output_format, out_stem):
    """Simulate a randomized multi-dose trial and summarize selections."""
    obj = _load_config(config_path)
    dspec = serialize.parse_dose_spec(obj)
    config = serialize.parse_simulation_config({
        "replicates": replicates if replicates is not None else obj.get("replicates"),
        "seed": seed if seed is not None else obj.get("seed", 0),
        "truth": obj.get("truth"),
    })
    if config.truth is None:
        raise click.ClickException("truth: missing required field")
    result = simulate_multidose(dspec, config.truth, config)
    payload = {
        "dose_spec": serialize.dose_spec_to_dict(dspec),
        "boundaries": serialize.boundaries_to_dict(dspec.resolve_boundaries()),
        "config": {"replicates": config.replicates, "seed": config.seed},
        "result": serialize.multidose_result_to_dict(result),
    }
    _emit(payload, render.format_multidose(result), output_format)
    if out_stem:
        render.write_csv(out_stem + ".csv", render.multidose_report_rows(result))
        render.write_json(out_stem + ".json", payload)
        render.figure_multidose(result, out_stem + ".png")


@main.command("decide")
@click.option("--design-id", required=True)
@click.option("--n", "n", type=int, required=True, help="Patients enrolled at this look.")
@click.option("--responses", type=int, required=True)
@click.option("--toxicities", type=int, required=True)
@click.option("--record", is_flag=True, help="Append the decision to the design's log.")
@format_option
@store_option
@_fail_on_domain_errors
def cmd_decide(design_id, n, responses, toxicities, record, output_format, store_path):
    """Apply a stored design's stopping rule to observed counts."""
    from .design import TrialData

    store = Store(store_path)
    doc = store.get_design(design_id)
    if doc.result is None:
        raise click.ClickException(f"design {design_id} has no stored result")
    data = TrialData.from_margins(n, responses, toxicities)
    decision = interim_decision(doc.spec, doc.result.boundaries, data, doc.result.q)
    if record:
        store.add_decision(design_id, n, responses, toxicities, decision.decision, decision.reasons)
    _emit(serialize.decision_to_dict(decision), render.format_decision(decision), output_format)


@main.command("protocol")
@click.option("--design-id", required=True)
@format_option
@store_option
@_fail_on_domain_errors
def cmd_protocol(design_id, output_format, store_path):
    """Print the deterministic monitoring protocol for a stored design."""
    doc = Store(store_path).get_design(design_id)
    if doc.result is None:
        raise click.ClickException(f"design {design_id} has no stored result")
    text = render.protocol_text(doc.id, doc.spec, doc.result, doc.annotation)
    _emit({"design_id": design_id, "protocol": text}, text, output_format)


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@store_option
def cmd_serve(host, port, store_path):
    """Run the HTTP JSON service (and the web console if its assets exist)."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(store_path), host=host, port=port)


if __name__ == "__main__":
    main()
