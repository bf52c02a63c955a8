"""Command-line front end: config parsing, experiment dispatch, CSV/JSON output.

Config files are UTF-8 lines of ``key = value`` with ``#`` comments and
comma-separated lists; command-line flags override config keys.  Report
commands write CSV row data plus a JSON summary carrying the fully
resolved configuration, and render a matplotlib figure alongside unless
``--no-plot`` is given.  Numbers are serialized with 17 significant
digits so doubles round-trip exactly.

Exit codes: 0 success, 1 usage or config error, 2 numerical failure.
"""

from __future__ import annotations

import dataclasses
import json
import math
import sys
import warnings
from dataclasses import dataclass

import click
import numpy as np

from . import analysis, plots
from .graph import (Edge, GraphFunction, GraphPoint, GridSpec, SpectralBand,
                    TadpoleGeometry, norms, queue_truncation_length)
from .quadrature import NonConvergenceError, QuadratureSpec
from .reference_fd import FdScheme, evolve_reference
from .resolvent import (CoefficientMode, KirchhoffSign, PoleError,
                        coefficients_closed_form, determinant,
                        kernel_continuous, kernel_difference, kernel_full,
                        kernel_neumann_halfline, kernel_point,
                        system_residuals)
from .propagator import evolve, evolve_neumann_halfline


class ConfigError(ValueError):
    """Malformed or invalid run configuration."""


DEFAULT_QUEUE_RESOLUTION = 0.1


@dataclass
class RunConfig:
    length: float = 1.0
    x_max: float | None = None        # None: truncation rule
    n_queue: int | None = None        # None: x_max / 0.1 resolution
    n_head: int = 201
    band: tuple[float, float] = (0.25, 4.0)
    rtol: float = 1e-8
    max_panels: int = 2**20
    nodes_per_panel: int = 16
    mode: str = "corrected"
    ic: str = "gaussian"
    ic_params: tuple[float, ...] = (3.0, 0.5)
    times: tuple[float, ...] = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)
    l_list: tuple[float, ...] = (0.2, 0.1, 0.05)
    t: float = 1.0
    dt: float | None = None           # None: min(h)^2 / 2
    k_max: int | None = None          # None: band/Nyquist rule
    output: str = "tadpole_run"
    plot: bool = True

    def validated(self) -> "RunConfig":
        if self.length <= 0:
            raise ConfigError(f"L must be positive, got {self.length}")
        try:
            SpectralBand(*self.band)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.mode not in ("corrected", "paper"):
            raise ConfigError(f"mode must be 'corrected' or 'paper', got {self.mode!r}")
        try:
            analysis.make_initial_condition(self.ic, self.ic_params)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.n_head < 2 or (self.n_queue is not None and self.n_queue < 2):
            raise ConfigError("grids need at least 2 points per edge")
        if self.rtol <= 0 or self.max_panels < 1 or self.nodes_per_panel < 1:
            raise ConfigError("quadrature parameters must be positive")
        if any(t <= 0 for t in self.times) or not self.times:
            raise ConfigError("times must be positive")
        if any(l <= 0 for l in self.l_list) or not self.l_list:
            raise ConfigError("L_list entries must be positive")
        if self.x_max is not None and self.x_max <= 0:
            raise ConfigError("x_max must be positive")
        if self.dt is not None and self.dt <= 0:
            raise ConfigError("dt must be positive")
        if self.k_max is not None and self.k_max < 1:
            raise ConfigError("k_max must be >= 1")
        return self

    # resolved pieces -----------------------------------------------------
    @property
    def coefficient_mode(self) -> CoefficientMode:
        return (CoefficientMode.CORRECTED if self.mode == "corrected"
                else CoefficientMode.PAPER)

    @property
    def spectral_band(self) -> SpectralBand:
        return SpectralBand(*self.band)

    @property
    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(self.rtol, self.max_panels, self.nodes_per_panel)

    @property
    def initial_condition(self) -> analysis.InitialCondition:
        return analysis.make_initial_condition(self.ic, self.ic_params)

    def grid(self, t_max: float) -> GridSpec:
        x_max = self.x_max
        if x_max is None:
            x_max = queue_truncation_length(self.initial_condition.support_extent,
                                            self.band[1], t_max)
        n_queue = self.n_queue
        if n_queue is None:
            n_queue = int(math.ceil(x_max / DEFAULT_QUEUE_RESOLUTION)) + 1
        return GridSpec(x_max, n_queue, self.n_head)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


_BOOL_VALUES = {"true": True, "yes": True, "on": True, "1": True,
                "false": False, "no": False, "off": False, "0": False}


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(p) for p in text.split(","))


def _parse_optional_float(text: str) -> float | None:
    return None if text.strip() == "auto" else float(text)


def _parse_optional_int(text: str) -> int | None:
    return None if text.strip() == "auto" else int(text)


_KEY_PARSERS = {
    "L": ("length", float),
    "x_max": ("x_max", _parse_optional_float),
    "n_queue": ("n_queue", _parse_optional_int),
    "n_head": ("n_head", int),
    "band": ("band", lambda s: tuple(float(p) for p in s.split(","))),
    "rtol": ("rtol", float),
    "max_panels": ("max_panels", int),
    "nodes_per_panel": ("nodes_per_panel", int),
    "mode": ("mode", lambda s: s.strip().lower()),
    "ic": ("ic", lambda s: s.strip().lower()),
    "ic_params": ("ic_params", _parse_float_list),
    "times": ("times", _parse_float_list),
    "L_list": ("l_list", _parse_float_list),
    "t": ("t", float),
    "dt": ("dt", _parse_optional_float),
    "k_max": ("k_max", _parse_optional_int),
    "output": ("output", lambda s: s.strip()),
    "plot": ("plot", lambda s: _BOOL_VALUES[s.strip().lower()]),
}


def parse_config(text: str) -> RunConfig:
    """Parse the line-based ``key = value`` format into a validated RunConfig."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _KEY_PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        field, parser = _KEY_PARSERS[key]
        try:
            values[field] = parser(value.strip())
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from None
    if "band" in values and len(values["band"]) != 2:
        raise ConfigError("band needs exactly two values 'a, b'")
    try:
        return RunConfig(**values).validated()
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def _load_config(config_path: str | None, overrides: dict) -> RunConfig:
    if config_path is not None:
        with open(config_path, encoding="utf-8") as fh:
            cfg = parse_config(fh.read())
    else:
        cfg = RunConfig()
    supplied = {k: v for k, v in overrides.items() if v is not None}
    if "band" in supplied:
        supplied["band"] = tuple(supplied["band"])
    if "ic_params" in supplied:
        supplied["ic_params"] = tuple(supplied["ic_params"])
    if "times" in supplied:
        supplied["times"] = tuple(supplied["times"])
    if "l_list" in supplied:
        supplied["l_list"] = tuple(supplied["l_list"])
    return dataclasses.replace(cfg, **supplied).validated()


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _write_csv(path: str, header: str, rows) -> None:
    lines = [header]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v)
                              for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_json(path: str | None, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if path is None:
        click.echo(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")


def _summary(cfg: RunConfig, command: str, results: dict) -> dict:
    return {"command": command, "config": cfg.as_dict(), "results": results}


def _complex_dict(value: complex) -> dict:
    return {"re": value.real, "im": value.imag}


# ---------------------------------------------------------------------------

@click.group()
def main():
    """Resolvent kernels and band-filtered Schrodinger dynamics on the
    tadpole graph."""


_CONFIG_OPTION = click.option("--config", "config_path", type=click.Path(exists=True),
                              default=None, help="Config file loaded before flag overrides.")
_OUTPUT_OPTION = click.option("--output", default=None, help="Output path prefix.")
_PLOT_OPTION = click.option("--plot/--no-plot", "plot", default=None,
                            help="Render a figure alongside the CSV output.")
_MODE_OPTION = click.option("--mode", type=click.Choice(["corrected", "paper"]),
                            default=None, help="Coefficient family.")


@main.command()
@click.option("--z-re", type=float, default=0.0, show_default=True)
@click.option("--z-im", type=float, required=True)
@click.option("--L", "length", type=float, required=True)
@_MODE_OPTION
@click.option("--json", "json_path", default=None, help="Write JSON here instead of stdout.")
def coeffs(z_re, z_im, length, mode, json_path):
    """Transmission coefficients and vertex-system residuals at one z."""
    cfg = _load_config(None, {"length": length, "mode": mode})
    z = complex(z_re, z_im)
    c = coefficients_closed_form(z, length, cfg.coefficient_mode)
    sign = (KirchhoffSign.DERIVED_MINUS if cfg.coefficient_mode is CoefficientMode.CORRECTED
            else KirchhoffSign.PAPER_PLUS)
    residuals = system_residuals(c, z, length, sign)
    payload = _summary(cfg, "coeffs", {
        "z": _complex_dict(z),
        "coefficients": {name: _complex_dict(getattr(c, name))
                         for name in ("f1", "f2", "f3", "g1", "g2", "g3",
                                      "h1", "h2", "h3")},
        "determinant": _complex_dict(determinant(z, length)),
        "max_system_residual": float(np.max(residuals)),
    })
    _write_json(json_path, payload)


@main.command()
@click.option("--kind", type=click.Choice(["full", "continuous", "point",
                                           "neumann", "difference"]),
              default="full", show_default=True)
@click.option("--edge-x", type=click.Choice(["queue", "head"]), default="queue")
@click.option("--x", "xs", type=float, required=True)
@click.option("--edge-y", type=click.Choice(["queue", "head"]), default="queue")
@click.option("--y", "ys", type=float, required=True)
@click.option("--z-re", type=float, default=0.0, show_default=True)
@click.option("--z-im", type=float, default=0.0, show_default=True)
@click.option("--mu", type=float, default=None, help="Real wavenumber for kind=difference.")
@click.option("--L", "length", type=float, required=True)
@_MODE_OPTION
@click.option("--json", "json_path", default=None)
def kernel(kind, edge_x, xs, edge_y, ys, z_re, z_im, mu, length, mode, json_path):
    """Evaluate one of the Green kernels at a pair of points."""
    cfg = _load_config(None, {"length": length, "mode": mode})
    x = GraphPoint(Edge(edge_x), xs)
    y = GraphPoint(Edge(edge_y), ys)
    z = complex(z_re, z_im)
    if kind == "full":
        value = kernel_full(x, y, z, length, cfg.coefficient_mode)
    elif kind == "continuous":
        value = kernel_continuous(x, y, z, length, cfg.coefficient_mode)
    elif kind == "point":
        value = kernel_point(x, y, z, length)
    elif kind == "neumann":
        value = kernel_neumann_halfline(xs, ys, z)
    else:
        if mu is None:
            raise click.UsageError("kind=difference needs --mu")
        value = kernel_difference(xs, ys, mu, length, cfg.coefficient_mode)
    payload = _summary(cfg, "kernel", {
        "kind": kind, "x": xs, "y": ys, "edge_x": edge_x, "edge_y": edge_y,
        "z": _complex_dict(z), "mu": mu, "value": _complex_dict(value),
    })
    _write_json(json_path, payload)


def _evolved_state(cfg: RunConfig) -> GraphFunction:
    grid = cfg.grid(cfg.t)
    geometry = TadpoleGeometry(cfg.length)
    u0 = cfg.initial_condition.sample(geometry, grid)
    return evolve(u0, cfg.spectral_band, cfg.t, cfg.quadrature,
                  cfg.coefficient_mode, cfg.k_max)


@main.command(name="evolve")
@_CONFIG_OPTION
@click.option("--t", type=float, default=None, help="Evolution time.")
@click.option("--L", "length", type=float, default=None)
@_MODE_OPTION
@_OUTPUT_OPTION
@_PLOT_OPTION
def evolve_cmd(config_path, t, length, mode, output, plot):
    """Band-filtered evolution of the catalog initial condition."""
    cfg = _load_config(config_path, {"t": t, "length": length, "mode": mode,
                                     "output": output, "plot": plot})
    u = _evolved_state(cfg)
    rows = [("queue", float(x), v.real, v.imag)
            for x, v in zip(u.grid.queue_points(), u.queue_values)]
    rows += [("head", float(s), v.real, v.imag)
             for s, v in zip(u.grid.head_points(u.geometry), u.head_values)]
    _write_csv(cfg.output + ".csv", "edge,s,re,im", rows)
    l1, l2, linf = norms(u)
    _write_json(cfg.output + ".json", _summary(cfg, "evolve", {
        "t": cfg.t, "l1": l1, "l2": l2, "linf": linf,
    }))
    if cfg.plot:
        plots.profile_figure(u, cfg.output + ".png",
                             title=f"band-filtered evolution, t = {cfg.t:g}")
    click.echo(f"wrote {cfg.output}.csv")


@main.command(name="evolve-halfline")
@_CONFIG_OPTION
@click.option("--t", type=float, default=None)
@_OUTPUT_OPTION
@_PLOT_OPTION
def evolve_halfline_cmd(config_path, t, output, plot):
    """Band-filtered Neumann half-line evolution of the initial condition."""
    cfg = _load_config(config_path, {"t": t, "output": output, "plot": plot})
    grid = cfg.grid(cfg.t)
    x = grid.queue_points()
    u0 = cfg.initial_condition.profile(x).astype(complex)
    u = evolve_neumann_halfline(x, u0, cfg.spectral_band, cfg.t, cfg.quadrature)
    _write_csv(cfg.output + ".csv", "s,re,im",
               [(float(xi), v.real, v.imag) for xi, v in zip(x, u)])
    _write_json(cfg.output + ".json", _summary(cfg, "evolve-halfline", {
        "t": cfg.t, "linf": float(np.max(np.abs(u))),
    }))
    if cfg.plot:
        plots.halfline_figure(x, u, cfg.output + ".png",
                              title=f"half-line evolution, t = {cfg.t:g}")
    click.echo(f"wrote {cfg.output}.csv")


@main.command()
@_CONFIG_OPTION
@click.option("--L", "length", type=float, default=None)
@_MODE_OPTION
@_OUTPUT_OPTION
@_PLOT_OPTION
def decay(config_path, length, mode, output, plot):
    """Sup-norm decay scan of the band-filtered evolution."""
    cfg = _load_config(config_path, {"length": length, "mode": mode,
                                     "output": output, "plot": plot})
    grid = cfg.grid(max(cfg.times))
    geometry = TadpoleGeometry(cfg.length)
    u0 = cfg.initial_condition.sample(geometry, grid)
    result = analysis.decay_scan(u0, cfg.spectral_band, cfg.times,
                                 cfg.quadrature, cfg.coefficient_mode, cfg.k_max)
    _write_csv(cfg.output + ".csv", "t,sup_norm,scaled", result.rows)
    _write_json(cfg.output + ".json", _summary(cfg, "decay", {
        "fitted_exponent": result.fitted_exponent,
        "fitted_constant": result.fitted_constant,
        "fit_residual": result.fit_residual,
        "scaled_spread": result.scaled_spread,
    }))
    if cfg.plot:
        plots.decay_figure(result, cfg.output + ".png")
    click.echo(f"wrote {cfg.output}.csv (exponent {result.fitted_exponent:.4f})")


@main.command()
@_CONFIG_OPTION
@_OUTPUT_OPTION
@_PLOT_OPTION
def perturbation(config_path, output, plot):
    """Shrinking-head comparison against the Neumann half-line."""
    cfg = _load_config(config_path, {"output": output, "plot": plot})
    grid = cfg.grid(max(cfg.times))
    report = analysis.perturbation_experiment(
        cfg.initial_condition, cfg.spectral_band, cfg.l_list, cfg.times,
        grid, cfg.quadrature)
    _write_csv(cfg.output + ".csv", "L,t,measured,bound,ratio",
               [(r.length, r.t, r.measured_sup, r.bound, r.ratio)
                for r in report.rows])
    _write_json(cfg.output + ".json", _summary(cfg, "perturbation", {
        "u0_l1": report.u0_l1,
        "all_within_bound": bool(all(r.measured_sup <= r.bound for r in report.rows)),
        "slopes_vs_length": {f"{t:g}": s for t, s in report.slopes_vs_length().items()},
    }))
    if cfg.plot:
        plots.perturbation_figure(report, cfg.output + ".png")
    click.echo(f"wrote {cfg.output}.csv")


@main.command(name="oracle-compare")
@_CONFIG_OPTION
@click.option("--t", type=float, default=None)
@_OUTPUT_OPTION
@_PLOT_OPTION
def oracle_compare(config_path, t, output, plot):
    """Band-filtered spectral evolution against the Crank-Nicolson oracle."""
    cfg = _load_config(config_path, {"t": t, "output": output, "plot": plot})
    grid = cfg.grid(cfg.t)
    geometry = TadpoleGeometry(cfg.length)
    u0 = cfg.initial_condition.sample(geometry, grid)
    band = cfg.spectral_band
    w = evolve(u0, band, 0.0, cfg.quadrature, cfg.coefficient_mode, cfg.k_max)
    u_spec = evolve(w, band, cfg.t, cfg.quadrature, cfg.coefficient_mode, cfg.k_max)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # filter tails legitimately touch the cap
        u_ref = evolve_reference(w, FdScheme(grid, geometry, cfg.t, cfg.dt))
    d = u_spec - u_ref
    wq, wh = w.queue_weights(), w.head_weights()
    rel_l2 = math.sqrt(float(wq @ np.abs(d.queue_values) ** 2
                             + wh @ np.abs(d.head_values) ** 2)) / norms(u_spec)[1]
    rows = [("queue", float(x), a.real, a.imag, b.real, b.imag)
            for x, a, b in zip(grid.queue_points(), u_spec.queue_values,
                               u_ref.queue_values)]
    rows += [("head", float(s), a.real, a.imag, b.real, b.imag)
             for s, a, b in zip(grid.head_points(geometry), u_spec.head_values,
                                u_ref.head_values)]
    _write_csv(cfg.output + ".csv",
               "edge,s,re_spectral,im_spectral,re_reference,im_reference", rows)
    _write_json(cfg.output + ".json", _summary(cfg, "oracle-compare", {
        "t": cfg.t, "rel_l2_difference": rel_l2,
    }))
    if cfg.plot:
        plots.compare_figure(u_spec, u_ref, rel_l2, cfg.output + ".png")
    click.echo(f"wrote {cfg.output}.csv (rel L2 {rel_l2:.3e})")


@main.command(name="scale-check")
@_CONFIG_OPTION
@click.option("--t", type=float, default=None)
@click.option("--L", "length", type=float, default=None)
@click.option("--json", "json_path", default=None)
def scale_check(config_path, t, length, json_path):
    """Discrepancy between the run and its rescaled unit-head counterpart."""
    cfg = _load_config(config_path, {"t": t, "length": length})
    grid = cfg.grid(cfg.t)
    geometry = TadpoleGeometry(cfg.length)
    u0 = cfg.initial_condition.sample(geometry, grid)
    disc = analysis.scale_invariance_check(u0, cfg.spectral_band, cfg.t,
                                           cfg.quadrature, cfg.coefficient_mode)
    _write_json(json_path, _summary(cfg, "scale-check", {
        "t": cfg.t, "discrepancy": disc,
    }))


@main.command()
@click.option("--mu", type=float, required=True)
@click.option("--L", "length", type=float, required=True)
@click.option("--terms", type=int, default=10, show_default=True)
@click.option("--x", "xs", type=float, default=0.0, show_default=True)
@click.option("--y", "ys", type=float, default=0.0, show_default=True)
@_OUTPUT_OPTION
@_PLOT_OPTION
def cycles(mu, length, terms, xs, ys, output, plot):
    """Cycle expansion (head windings) of the difference kernel."""
    cfg = _load_config(None, {"length": length, "output": output, "plot": plot})
    partials, bounds = analysis.cycle_expansion(xs, ys, mu, length, terms)
    limit = analysis.cycle_expansion_limit(xs, ys, mu, length)
    _write_csv(cfg.output + ".csv", "k,partial_re,partial_im,remainder",
               [(k, p.real, p.imag, float(b))
                for k, (p, b) in enumerate(zip(partials, bounds))])
    _write_json(cfg.output + ".json", _summary(cfg, "cycles", {
        "mu": mu, "x": xs, "y": ys, "terms": terms,
        "limit": _complex_dict(limit),
        "final_error": float(abs(partials[-1] - limit)),
        "final_remainder_bound": float(bounds[-1]),
    }))
    if cfg.plot:
        plots.cycles_figure(np.abs(partials - limit), bounds, cfg.output + ".png")
    click.echo(f"wrote {cfg.output}.csv")


def run_command(argv) -> int:
    """Programmatic CLI entry; returns the exit code instead of raising."""
    try:
        main.main(args=list(argv), standalone_mode=False)
        return 0
    except (ConfigError, click.UsageError, click.BadParameter) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        return 1
    except (NonConvergenceError, PoleError, np.linalg.LinAlgError) as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        return 2
    except ValueError as exc:  # domain violations from the library
        click.echo(f"error: {exc}", err=True)
        return 1


def entrypoint():  # console script target
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    entrypoint()
