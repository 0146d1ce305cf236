"""Command-line scenario runner.

    wavelet-qm run CONFIG [--threads N] [--output-dir DIR]
    wavelet-qm validate CONFIG
    wavelet-qm version

Exit codes: 0 success, 2 configuration error, 3 numerical precondition or
failed diagnostic, 4 I/O failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__, _kernels
from .config import ScenarioConfig
from .core import WaveFunction, l2_norm
from .errors import ConfigError, PreconditionError
from .evolution import (EvolutionConfig, coefficient_distance, diagonal_norm_drift,
                        evolve_reference, evolve_wavelet_diagonal)
from .io import SUFFIX, export_field
from .potential import potential_cwt
from .wavelet import (admissibility_constant, apply_affine, calibrate_frame,
                      evaluate_wavelet, forward_cwt, inverse_cwt)

log = logging.getLogger("wavelet_qm")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


class StageError(Exception):
    """Failure attributed to a named pipeline stage."""

    def __init__(self, stage, exc):
        super().__init__(f"stage {stage!r}: {exc}")
        self.stage = stage
        self.cause = exc


class _Stage:
    def __init__(self, name):
        self.name = name

    def __enter__(self):
        log.info("stage %s", self.name)

    def __exit__(self, typ, exc, tb):
        if exc is not None and isinstance(exc, (PreconditionError, OSError)):
            raise StageError(self.name, exc) from exc
        return False


def _fmt(x):
    return "%.17g" % x


def _write_fields(outdir, cfg, fields):
    with _Stage("export"):
        for stem, field in fields.items():
            for fmt in cfg["output"]["formats"]:
                export_field(field, outdir / f"{stem}{SUFFIX[fmt]}", fmt)


def _initial_state(cfg, grid):
    s = cfg["initial_state"]
    params = cfg.params()
    if s["kind"] == "atom":
        return apply_affine(cfg.wavelet(), s["a"], s["b"], params, grid)
    return evaluate_wavelet(cfg.initial_wavelet(), params, grid)


def _setup(cfg):
    params, w = cfg.params(), cfg.wavelet()
    x, grid = cfg.spatial_grid(), cfg.scale_grid()
    with _Stage("initial_state"):
        psi = _initial_state(cfg, x)
    with _Stage("calibrate_frame"):
        cal = calibrate_frame(w, grid, params, psi)
    return params, w, x, grid, psi, cal


def _transform_roundtrip(cfg, outdir):
    params, w, x, grid, psi, cal = _setup(cfg)
    with _Stage("forward_cwt"):
        field = forward_cwt(psi, w, grid, params)
    with _Stage("inverse_cwt"):
        back = inverse_cwt(field, w, cal, params, x)
    err = l2_norm(WaveFunction(x, back.values - psi.values)) / l2_norm(psi)
    with _Stage("export"):
        (outdir / "roundtrip_error.csv").write_text(f"relative_l2_error\n{_fmt(err)}\n")
    _write_fields(outdir, cfg, {"coefficients": field})
    tol = cfg["tolerances"]["roundtrip"]
    ok = err <= tol
    return ok, f"round-trip relative L2 error {err:.3e} (tolerance {tol:g}), c_eff={cal.c_eff:.6g}"


def _admissibility_report(cfg, outdir):
    params, w = cfg.params(), cfg.wavelet()
    k_max = cfg["admissibility"]["k_max"]
    rows = []
    with _Stage("admissibility_constant"):
        for k_min in cfg["admissibility"]["k_min"]:
            rows.append(admissibility_constant(w, params, k_min, k_max))
    lines = ["k_min,k_max,c_v_cutoff,divergent,dc_density"]
    lines += [f"{_fmt(r.k_min)},{_fmt(r.k_max)},{_fmt(r.c_v_cutoff)},{int(r.divergent)},{_fmt(r.dc_density)}"
              for r in rows]
    with _Stage("export"):
        (outdir / "admissibility.csv").write_text("\n".join(lines) + "\n")
    tol = cfg["tolerances"]["growth_law"]
    ok, notes = True, []
    for r0, r1 in zip(rows[:-1], rows[1:]):
        growth = r1.c_v_cutoff - r0.c_v_cutoff
        predicted = 2.0 * np.pi * r0.dc_density * np.log(r0.k_min / r1.k_min)
        noise = 1e-12 * max(r0.c_v_cutoff, r1.c_v_cutoff)
        if abs(predicted) > noise:
            good = abs(growth - predicted) <= tol * abs(predicted)
        else:
            good = abs(growth) <= noise
        ok &= good
        notes.append(f"growth {growth:.6e} vs ln-law {predicted:.6e}")
    return ok, "; ".join(notes) or f"c_v={rows[0].c_v_cutoff:.6g}"


def _potential_field(cfg, outdir):
    params, w, x, grid, psi, cal = _setup(cfg)
    with _Stage("potential_cwt"):
        wf = potential_cwt(cfg.potential(), w, grid, cal, params)
    ratio = wf.imag_ratio()
    with _Stage("export"):
        (outdir / "diagnostics.csv").write_text(
            f"quantity,value\nc_eff,{_fmt(cal.c_eff)}\nimag_ratio,{_fmt(ratio)}\n")
    _write_fields(outdir, cfg, {"potential": wf})
    return bool(np.all(np.isfinite(wf.values))), f"max|Im W|/max|W| = {ratio:.3e}"


def _evolve_compare(cfg, outdir):
    params, w, x, grid, psi, cal = _setup(cfg)
    model = cfg.potential()
    ev = cfg["evolution"]
    with _Stage("potential_cwt"):
        wf = potential_cwt(model, w, grid, cal, params)
    with _Stage("forward_cwt"):
        c0 = forward_cwt(psi, w, grid, params)
    lines = ["t,residual,reference_norm,diagonal_norm_drift"]
    residuals = []
    reference = diagonal = c0
    for t in ev["times"]:
        with _Stage(f"evolve_reference(t={t:g})"):
            psi_t = psi if t == 0 else evolve_reference(
                psi, model, params, EvolutionConfig.for_time(t, ev["dt"], ev["method"]))
        with _Stage(f"forward_cwt(t={t:g})"):
            reference = forward_cwt(psi_t, w, grid, params)
        diagonal = evolve_wavelet_diagonal(c0, wf, w, params, t)
        res = coefficient_distance(reference, diagonal)
        drift = diagonal_norm_drift(c0, wf, w, params, t)
        residuals.append(res)
        lines.append(f"{_fmt(t)},{_fmt(res)},{_fmt(l2_norm(psi_t))},{_fmt(drift)}")
    with _Stage("export"):
        (outdir / "residual.csv").write_text("\n".join(lines) + "\n")
    _write_fields(outdir, cfg, {"reference_final": reference, "diagonal_final": diagonal})
    tol = cfg["tolerances"]["residual_at_zero"]
    ok = all(r <= tol for t, r in zip(ev["times"], residuals) if t == 0)
    ok &= all(np.isfinite(residuals))
    return ok, "residuals " + ", ".join(f"{r:.3e}" for r in residuals)


PIPELINES = {
    "transform_roundtrip": _transform_roundtrip,
    "admissibility_report": _admissibility_report,
    "potential_field": _potential_field,
    "evolve_compare": _evolve_compare,
}


def run_scenario(cfg: ScenarioConfig, output_dir=None) -> int:
    """Execute the configured pipeline and write its artifacts; returns an exit code."""
    if output_dir is not None:
        cfg.data["output"]["directory"] = str(output_dir)
    outdir = Path(cfg["output"]["directory"])
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "resolved_config.yaml").write_text(cfg.to_yaml())
    except OSError as exc:
        print(f"error: stage 'output': {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        ok, summary = PIPELINES[cfg["pipeline"]](cfg, outdir)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO if isinstance(exc.cause, OSError) else EXIT_NUMERIC
    print(f"{cfg['pipeline']}: {summary}")
    if not ok:
        print(f"error: stage 'diagnostics': {cfg['pipeline']} diagnostics failed", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _load(path):
    try:
        return ScenarioConfig.from_file(path), None
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return None, EXIT_CONFIG
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return None, EXIT_IO


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="wavelet-qm", description=__doc__.splitlines()[0])
    ap.add_argument("--verbose", "-v", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario")
    run.add_argument("config")
    run.add_argument("--threads", type=int, default=None, help="cap kernel parallelism")
    run.add_argument("--output-dir", default=None, help="override output.directory")
    val = sub.add_parser("validate", help="parse and check a scenario without running it")
    val.add_argument("config")
    sub.add_parser("version")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")

    if args.command == "version":
        print(f"wavelet-qm {__version__} (backend: {_kernels.BACKEND})")
        return EXIT_OK
    cfg, code = _load(args.config)
    if cfg is None:
        return code
    if args.command == "validate":
        print(f"{args.config}: ok ({cfg['pipeline']})")
        return EXIT_OK
    if args.threads is not None:
        if args.threads < 1:
            print("error: config: --threads must be >= 1", file=sys.stderr)
            return EXIT_CONFIG
        _kernels.set_threads(args.threads)
    return run_scenario(cfg, args.output_dir)


if __name__ == "__main__":
    sys.exit(main())
