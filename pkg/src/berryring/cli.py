"""Command-line interface: scenario runner, config handling, CSV/manifest output.

Usage:
    berry-ring <scenario> [--config FILE] [--set key=value ...] [--out DIR]

Scenarios: trajectory, sweep-alpha, sweep-lambda, spectrum, broadening,
frenet-demo.  The config file is YAML with the sections of DEFAULT_CONFIG;
--set overrides use dotted keys (e.g. --set sweep_alpha.step=5e-4).  Output
CSVs are byte-stable: fixed 17-significant-digit formatting, '#' metadata
lines, one header line.  A manifest.json records the config, its hash, and
artifact checksums.  Exit codes: 0 ok, 2 config error, 3 numerical error,
4 I/O error.
"""

import argparse
import copy
import hashlib
import json
import os
import sys
from dataclasses import dataclass

import numpy as np
import yaml

from . import __version__
from .backends import get_backend
from .errors import (
    BerryRingError,
    ConfigError,
    ContractViolationError,
    DomainError,
    InvalidArgumentError,
    OutputError,
)
from .evolution import IntegrationConfig, trajectory
from .frenet import frenet_frames, helix_curve
from .paths import HalfCirclePath, RingParams
from .resonator import (
    CouplerParams,
    broadened_transmission,
    calibrate_theta_t,
    modulator_sweep,
    s_matrix,
    transmission_critical,
    transmission_near_resonance,
)
from .spinor import eigenbasis
from .zener import transition_probability

ENV_OUT_DIR = "BERRY_RING_OUT"
DEFAULT_OUT_DIR = "berry-ring-out"

SCENARIOS = (
    "trajectory",
    "sweep-alpha",
    "sweep-lambda",
    "spectrum",
    "broadening",
    "frenet-demo",
)

DEFAULT_CONFIG = {
    "integration": {"steps_per_unit": 2000.0, "min_steps": 2},
    "ring": {
        "lambda1": 1.022,
        "beta": 5.0,
        "gamma": 1.0,
        "a_sharp": 50.0,
        "b_width": 0.6,
    },
    "coupler": {"xi_c": 1e-2, "xi_l": 1e-4, "theta_t": "auto", "alpha_res": 0.02},
    "backend": "auto",
    "workers": None,
    "output": {"dir": None, "emit_plots": True},
    "sweep_alpha": {"start": -0.15, "stop": 0.15, "step": 2.5e-4},
    "sweep_lambda": {"start": 0.0, "stop": 3.0, "step": 0.01},
    "trajectory": {"lam": 5.0, "initial": "down-pole", "n_samples": 481},
    "spectrum": {"start": -0.05, "stop": 0.05, "step": 1e-4},
    "broadening": {
        "q": 500.0,
        "delta_vartheta": 0.01,
        "start": -0.02,
        "stop": 0.02,
        "step": 5e-5,
    },
    "frenet": {"radius": 1.0, "pitch": 0.5, "n_turns": 2.0, "n_samples": 2001},
}


@dataclass(frozen=True)
class ScenarioTable:
    """One scenario's tabular artifact before serialization."""

    scenario: str
    filename: str
    columns: tuple
    rows: np.ndarray
    meta: dict


def _merge(base, override, path=""):
    for key, value in override.items():
        dotted = f"{path}.{key}" if path else str(key)
        if key not in base:
            raise ConfigError("unknown key", key=dotted)
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError("expected a mapping", key=dotted)
            _merge(base[key], value, dotted)
        else:
            base[key] = value


def _apply_set(config, assignment):
    if "=" not in assignment:
        raise ConfigError(f"--set needs key=value, got {assignment!r}")
    dotted, raw = assignment.split("=", 1)
    try:
        value = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        raise ConfigError(f"unparseable value {raw!r} ({exc})", key=dotted)
    if isinstance(value, str):
        # YAML 1.1 reads bare scientific notation like 2e-3 as a string.
        try:
            value = float(value)
        except ValueError:
            pass
    node = config
    parts = dotted.split(".")
    for part in parts[:-1]:
        if not isinstance(node.get(part), dict):
            raise ConfigError("unknown key", key=dotted)
        node = node[part]
    leaf = parts[-1]
    if leaf not in node or isinstance(node[leaf], dict):
        raise ConfigError("unknown key", key=dotted)
    node[leaf] = value


def load_config(config_path=None, overrides=()):
    """DEFAULT_CONFIG deep-merged with the YAML file and --set overrides."""
    config = copy.deepcopy(DEFAULT_CONFIG)
    if config_path is not None:
        try:
            with open(config_path, "r", encoding="utf-8") as fh:
                user = yaml.safe_load(fh)
        except OSError as exc:
            raise OutputError(f"cannot read config {config_path}: {exc}")
        except yaml.YAMLError as exc:
            raise ConfigError(f"config is not valid YAML: {exc}")
        if user is None:
            user = {}
        if not isinstance(user, dict):
            raise ConfigError("config root must be a mapping")
        _merge(config, user)
    for assignment in overrides:
        _apply_set(config, assignment)
    return config


def _require_number(config, dotted, lo=None, hi=None):
    node = config
    for part in dotted.split("."):
        node = node[part]
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        raise ConfigError("expected a number", key=dotted)
    value = float(node)
    if lo is not None and value < lo:
        raise ConfigError(f"must be >= {lo}", key=dotted)
    if hi is not None and value > hi:
        raise ConfigError(f"must be <= {hi}", key=dotted)
    return value


def _require_grid(config, section):
    start = _require_number(config, f"{section}.start")
    stop = _require_number(config, f"{section}.stop")
    step = _require_number(config, f"{section}.step")
    if step <= 0:
        raise ConfigError("must be positive", key=f"{section}.step")
    if stop <= start:
        raise ConfigError("stop must exceed start", key=f"{section}.stop")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


@dataclass(frozen=True)
class ResolvedRun:
    """Validated run parameters derived from one config mapping."""

    config: dict
    integration: IntegrationConfig
    ring: RingParams
    xi_c: float
    xi_l: float
    theta_t: object  # float, or the string "auto"
    alpha_res: float
    backend: object  # None for auto, else backend name
    workers: int


def resolve_run(config):
    """Validate the physical parameters and construct the module objects."""
    try:
        integration = IntegrationConfig(
            steps_per_unit=_require_number(config, "integration.steps_per_unit", lo=1e-9),
            min_steps=int(_require_number(config, "integration.min_steps", lo=2)),
        )
        ring = RingParams(
            lambda1=_require_number(config, "ring.lambda1", lo=1e-12),
            beta=_require_number(config, "ring.beta", lo=1e-12),
            gamma=_require_number(config, "ring.gamma", lo=1e-12),
            a_sharp=_require_number(config, "ring.a_sharp", lo=0.0),
            b_width=_require_number(config, "ring.b_width", lo=1e-12),
        )
    except InvalidArgumentError as exc:
        raise ConfigError(str(exc))
    xi_c = _require_number(config, "coupler.xi_c", lo=0.0, hi=1.0)
    xi_l = _require_number(config, "coupler.xi_l", lo=0.0, hi=1.0)
    theta_t = config["coupler"]["theta_t"]
    if theta_t != "auto":
        if isinstance(theta_t, bool) or not isinstance(theta_t, (int, float)):
            raise ConfigError("expected 'auto' or a number", key="coupler.theta_t")
        theta_t = float(theta_t)
    alpha_res = _require_number(config, "coupler.alpha_res")
    backend = config["backend"]
    if backend not in ("auto", "numpy", "numba"):
        raise ConfigError("expected auto, numpy, or numba", key="backend")
    workers = config["workers"]
    if workers is None:
        workers = os.cpu_count() or 1
    elif isinstance(workers, bool) or not isinstance(workers, int) or workers < 1:
        raise ConfigError("expected a positive integer or null", key="workers")
    return ResolvedRun(
        config=config,
        integration=integration,
        ring=ring,
        xi_c=xi_c,
        xi_l=xi_l,
        theta_t=theta_t,
        alpha_res=alpha_res,
        backend=None if backend == "auto" else backend,
        workers=workers,
    )


def _resolved_theta_t(run):
    if run.theta_t == "auto":
        return calibrate_theta_t(
            alpha_res=run.alpha_res,
            ring_params=run.ring,
            config=run.integration,
            backend=run.backend,
        )
    return float(run.theta_t)


def _pole_state(path, which):
    v = eigenbasis(path.kappa_at(path.domain[0]).kappa)
    p3 = [abs(v[0, j]) ** 2 - abs(v[1, j]) ** 2 for j in (0, 1)]
    j = int(np.argmin(p3)) if which == "down-pole" else int(np.argmax(p3))
    return v[:, j]


def run_trajectory(run):
    section = run.config["trajectory"]
    lam = _require_number(run.config, "trajectory.lam", lo=1e-12)
    n_samples = int(_require_number(run.config, "trajectory.n_samples", lo=2))
    path = HalfCirclePath(lam=lam, gamma=run.ring.gamma)
    initial = section["initial"]
    if initial in ("down-pole", "up-pole"):
        state = _pole_state(path, initial)
    elif isinstance(initial, (list, tuple)) and len(initial) == 4:
        nums = [float(x) for x in initial]
        state = np.array([nums[0] + 1j * nums[1], nums[2] + 1j * nums[3]])
    else:
        raise ConfigError(
            "expected 'down-pole', 'up-pole', or [re_up, im_up, re_down, im_down]",
            key="trajectory.initial",
        )
    traj = trajectory(
        path, state, config=run.integration, n_samples=n_samples, backend=run.backend
    )
    rows = np.column_stack([traj.s, traj.bloch])
    return ScenarioTable(
        scenario="trajectory",
        filename="fig5.csv",
        columns=("s", "p1", "p2", "p3"),
        rows=rows,
        meta={"lam": lam, "gamma": run.ring.gamma, "initial": str(initial)},
    )


def run_sweep_alpha(run):
    alphas = _require_grid(run.config, "sweep_alpha")
    theta_t = _resolved_theta_t(run)
    coupler = CouplerParams(xi_c=run.xi_c, xi_l=run.xi_l, theta_t=theta_t)
    result = modulator_sweep(
        alphas,
        ring_params=run.ring,
        coupler=coupler,
        config=run.integration,
        backend=run.backend,
        max_workers=run.workers,
    )
    rows = np.column_stack(
        [
            result.alpha,
            result.m12_sq,
            result.arg_m11,
            result.arg_m22,
            result.p11,
            result.p21,
        ]
    )
    return ScenarioTable(
        scenario="sweep-alpha",
        filename="fig3.csv",
        columns=("alpha", "m12_sq", "arg_m11", "arg_m22", "p11", "p21"),
        rows=rows,
        meta={"theta_t": theta_t, "xi_c": run.xi_c, "xi_l": run.xi_l},
    )


def run_sweep_lambda(run):
    lams = _require_grid(run.config, "sweep_lambda")
    if lams[0] < 0:
        raise ConfigError("must be >= 0", key="sweep_lambda.start")

    def p_of(lam):
        if lam < 1e-12:
            # Zero-length half circle: the sudden limit gives full conversion.
            return 1.0
        path = HalfCirclePath(lam=float(lam), gamma=run.ring.gamma)
        return transition_probability(
            path, config=run.integration, backend=run.backend
        ).p_z

    p_z = np.array([p_of(lam) for lam in lams])
    rows = np.column_stack([lams, p_z])
    return ScenarioTable(
        scenario="sweep-lambda",
        filename="fig6.csv",
        columns=("lambda", "p_z"),
        rows=rows,
        meta={
            "gamma": run.ring.gamma,
            "note": "lambda=0 row is the sudden-limit value 1",
        },
    )


def run_spectrum(run):
    vts = _require_grid(run.config, "spectrum")
    theta_t = _resolved_theta_t(run)
    coupler = CouplerParams(xi_c=run.xi_c, xi_l=run.xi_l, theta_t=theta_t)
    amp = transmission_near_resonance(vts, run.xi_l, run.xi_c)
    p_near = np.abs(amp) ** 2
    p_exact = np.empty_like(p_near)
    eye = np.eye(2, dtype=complex)
    for i, vt in enumerate(vts):
        m = np.exp(1j * (theta_t + vt)) * eye
        p_exact[i] = abs(s_matrix(m, coupler)[0, 0]) ** 2
    rows = np.column_stack([vts, p_near, p_exact])
    return ScenarioTable(
        scenario="spectrum",
        filename="spectrum.csv",
        columns=("vartheta", "p_near", "p_exact"),
        rows=rows,
        meta={"theta_t": theta_t, "xi_c": run.xi_c, "xi_l": run.xi_l},
    )


def run_broadening(run):
    vts = _require_grid(run.config, "broadening")
    q = _require_number(run.config, "broadening.q", lo=1e-12)
    dvt = _require_number(run.config, "broadening.delta_vartheta", lo=0.0)
    t_bar = broadened_transmission(vts, q, dvt)
    t_sharp = transmission_critical(vts, q)
    rows = np.column_stack([vts, t_bar, t_sharp])
    return ScenarioTable(
        scenario="broadening",
        filename="broadening.csv",
        columns=("vartheta", "t_broadened", "t_critical"),
        rows=rows,
        meta={"q": q, "delta_vartheta": dvt, "dip_floor": q * dvt / (1 + q * dvt)},
    )


def run_frenet_demo(run):
    radius = _require_number(run.config, "frenet.radius", lo=1e-12)
    pitch = _require_number(run.config, "frenet.pitch")
    n_turns = _require_number(run.config, "frenet.n_turns", lo=1e-12)
    n_samples = int(_require_number(run.config, "frenet.n_samples", lo=7))
    curve = helix_curve(radius, pitch, n_turns=n_turns, n_samples=n_samples)
    frames = frenet_frames(curve)
    rows = np.column_stack(
        [
            np.array([f.s for f in frames]),
            np.array([f.curvature for f in frames]),
            np.array([f.torsion for f in frames]),
            np.array([f.torsion for f in frames]),  # kappa2 of Rytov's law
        ]
    )
    denom = radius * radius + pitch * pitch
    return ScenarioTable(
        scenario="frenet-demo",
        filename="frenet.csv",
        columns=("s", "curvature", "torsion", "kappa2"),
        rows=rows,
        meta={
            "radius": radius,
            "pitch": pitch,
            "curvature_closed_form": radius / denom,
            "torsion_closed_form": pitch / denom,
        },
    )


_SCENARIO_RUNNERS = {
    "trajectory": run_trajectory,
    "sweep-alpha": run_sweep_alpha,
    "sweep-lambda": run_sweep_lambda,
    "spectrum": run_spectrum,
    "broadening": run_broadening,
    "frenet-demo": run_frenet_demo,
}


def config_sha256(config):
    """Hash of the canonical JSON serialization of the resolved config."""
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _format_value(v):
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def write_csv(path, table, config_hash, resolution, backend_name):
    rows = np.asarray(table.rows, dtype=float)
    if not np.all(np.isfinite(rows)):
        raise ContractViolationError(
            f"{table.scenario}: non-finite values in output table"
        )
    if rows.shape[1] != len(table.columns):
        raise ContractViolationError(f"{table.scenario}: column count mismatch")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"# berry-ring scenario: {table.scenario}\n")
            fh.write(f"# config_sha256: {config_hash}\n")
            fh.write(f"# steps_per_unit: {_format_value(resolution)}\n")
            fh.write(f"# backend: {backend_name}\n")
            for key in sorted(table.meta):
                fh.write(f"# {key}: {_format_value(table.meta[key])}\n")
            fh.write(",".join(table.columns) + "\n")
            for row in rows:
                fh.write(",".join("%.17g" % v for v in row) + "\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}")


_PLOT_HEADER = """\
# Plot script generated by berry-ring; run with: python3 {name}
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def load(path):
    with open(path) as fh:
        skip = 0
        for line in fh:
            if not line.startswith("#"):
                break
            skip += 1
    return np.genfromtxt(path, delimiter=",", names=True, skip_header=skip)


data = load("{csv}")
"""

_PLOT_BODIES = {
    "fig3.csv": """\
fig, axes = plt.subplots(3, 1, figsize=(6, 9), sharex=True)
axes[0].plot(data["alpha"], data["m12_sq"])
axes[0].set_ylabel("|M12|^2")
axes[1].plot(data["alpha"], data["arg_m11"], label="arg M11")
axes[1].plot(data["alpha"], data["arg_m22"], label="arg M22")
axes[1].set_ylabel("phase (rad)")
axes[1].legend()
axes[2].plot(data["alpha"], data["p11"], label="P11")
axes[2].plot(data["alpha"], data["p21"], label="P21")
axes[2].set_ylabel("transmission")
axes[2].set_xlabel("alpha")
axes[2].legend()
fig.tight_layout()
fig.savefig("fig3.png", dpi=150)
""",
    "fig5.csv": """\
fig, ax = plt.subplots(figsize=(6, 4))
for name in ("p1", "p2", "p3"):
    ax.plot(data["s"], data[name], label=name)
ax.set_xlabel("s")
ax.set_ylabel("Bloch components")
ax.legend()
fig.tight_layout()
fig.savefig("fig5.png", dpi=150)
""",
    "fig6.csv": """\
fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(data["lambda"], data["p_z"])
ax.set_xlabel("lambda")
ax.set_ylabel("p_z")
fig.tight_layout()
fig.savefig("fig6.png", dpi=150)
""",
    "spectrum.csv": """\
fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(data["vartheta"], data["p_near"], label="near-resonance")
ax.plot(data["vartheta"], data["p_exact"], "--", label="exact")
ax.set_xlabel("vartheta")
ax.set_ylabel("|t|^2")
ax.legend()
fig.tight_layout()
fig.savefig("spectrum.png", dpi=150)
""",
    "broadening.csv": """\
fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(data["vartheta"], data["t_broadened"], label="broadened")
ax.plot(data["vartheta"], data["t_critical"], "--", label="sharp")
ax.set_xlabel("vartheta")
ax.set_ylabel("transmission")
ax.legend()
fig.tight_layout()
fig.savefig("broadening.png", dpi=150)
""",
    "frenet.csv": """\
fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(data["s"], data["curvature"], label="curvature")
ax.plot(data["s"], data["torsion"], label="torsion")
ax.set_xlabel("s")
ax.set_ylabel("1/length")
ax.legend()
fig.tight_layout()
fig.savefig("frenet.png", dpi=150)
""",
}


def emit_plots(out_dir, filenames=None):
    """Write one plain-text matplotlib script per known CSV in out_dir."""
    candidates = filenames if filenames is not None else sorted(_PLOT_BODIES)
    written = []
    for csv_name in candidates:
        if csv_name not in _PLOT_BODIES:
            raise OutputError(f"no plot layout known for {csv_name}")
        csv_path = os.path.join(out_dir, csv_name)
        if not os.path.isfile(csv_path):
            if filenames is not None:
                raise OutputError(f"missing result CSV: {csv_path}")
            continue
        stem = csv_name.rsplit(".", 1)[0]
        script_name = f"plot_{stem}.py"
        body = _PLOT_HEADER.format(name=script_name, csv=csv_name)
        body += _PLOT_BODIES[csv_name]
        try:
            with open(
                os.path.join(out_dir, script_name), "w", encoding="utf-8", newline="\n"
            ) as fh:
                fh.write(body)
        except OSError as exc:
            raise OutputError(f"cannot write plot script: {exc}")
        written.append(script_name)
    if not written:
        raise OutputError(f"no result CSVs found in {out_dir}")
    return written


def _file_sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(out_dir, table, run, config_hash, backend_name, extra_files=()):
    versions = {"berryring": __version__, "numpy": np.__version__}
    try:
        import scipy

        versions["scipy"] = scipy.__version__
    except ImportError:
        versions["scipy"] = None
    try:
        import numba

        versions["numba"] = numba.__version__
    except ImportError:
        versions["numba"] = None
    files = {table.filename: _file_sha256(os.path.join(out_dir, table.filename))}
    for name in extra_files:
        files[name] = _file_sha256(os.path.join(out_dir, name))
    manifest = {
        "scenario": table.scenario,
        "config": run.config,
        "config_sha256": config_hash,
        "backend": backend_name,
        "integration": {
            "steps_per_unit": run.integration.steps_per_unit,
            "min_steps": run.integration.min_steps,
        },
        "versions": versions,
        "files": files,
        "rows": int(np.asarray(table.rows).shape[0]),
    }
    path = os.path.join(out_dir, "manifest.json")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OutputError(f"cannot write manifest: {exc}")
    return path


def resolve_out_dir(cli_out, config):
    if cli_out:
        return cli_out
    if config["output"]["dir"]:
        return str(config["output"]["dir"])
    return os.environ.get(ENV_OUT_DIR) or DEFAULT_OUT_DIR


def run(scenario, config_path=None, overrides=(), out_dir=None):
    """Execute one scenario end to end; returns the list of files written."""
    if scenario not in _SCENARIO_RUNNERS:
        raise ConfigError(
            f"unknown scenario {scenario!r}; expected one of {', '.join(SCENARIOS)}"
        )
    config = load_config(config_path, overrides)
    run_obj = resolve_run(config)
    out = resolve_out_dir(out_dir, config)
    try:
        os.makedirs(out, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create output dir {out}: {exc}")
    backend_name = run_obj.backend or get_backend()
    table = _SCENARIO_RUNNERS[scenario](run_obj)
    expected = int(np.asarray(table.rows).shape[0])
    if expected == 0:
        raise ContractViolationError(f"{scenario}: empty result table")
    config_hash = config_sha256(config)
    csv_path = os.path.join(out, table.filename)
    write_csv(csv_path, table, config_hash, run_obj.integration.steps_per_unit, backend_name)
    written = [table.filename]
    if config["output"]["emit_plots"]:
        written += emit_plots(out, filenames=[table.filename])
    write_manifest(out, table, run_obj, config_hash, backend_name, written[1:])
    written.append("manifest.json")
    return [os.path.join(out, name) for name in written]


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="berry-ring",
        description="Polarization evolution and ring-resonator scenarios.",
    )
    parser.add_argument("scenario", choices=SCENARIOS, metavar="scenario",
                        help="one of: " + ", ".join(SCENARIOS))
    parser.add_argument("--config", default=None, help="YAML config file")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config key (dotted path), repeatable",
    )
    parser.add_argument("--out", default=None, help="output directory")
    args = parser.parse_args(argv)
    try:
        files = run(
            args.scenario,
            config_path=args.config,
            overrides=args.overrides,
            out_dir=args.out,
        )
    except (ConfigError, InvalidArgumentError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OutputError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 4
    except (BerryRingError, ArithmeticError) as exc:
        print(f"numerical error ({args.scenario}): {exc}", file=sys.stderr)
        return 3
    for path in files:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
