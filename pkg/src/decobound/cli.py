"""Command-line front end: JSON config in, CSV/JSON artifacts out."""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from itertools import product
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .dynamics import concurrence, figure_of_merit, propagate, purity, trace_distance
from .env_model import DiscreteBath, OhmicBath, correlation_function, eval_spectrum, kms_residual
from .errors import DomainError, InvariantViolation, QuadratureError
from .generator_continuous import QubitParams, assemble_liouvillian, build_generator
from .generator_discrete import coherent_norm, delta_rho2_discrete, dissipator_matrix
from .io import (
    atomic_write,
    bath_from_dict,
    bath_to_dict,
    beta_from_json,
    beta_to_json,
    csv_text,
    flatten_complex,
    generator_to_dict,
    json_text,
    matrix_columns,
    spectral_columns,
)
from .kernels import eval_phi, eval_psi
from .operators import SINGLET, TRIPLET0, ket, projector
from .oracle import Mode, OracleModel, convergence_compare

EXIT_SCHEMA = 2
EXIT_NUMERICAL = 3
EXIT_INVARIANT = 4

SWEEP_AXES = ("lambda", "beta", "kappa", "omega_c", "detuning")
_STATES = {"singlet": SINGLET, "triplet0": TRIPLET0}


def load_schema() -> dict:
    text = resources.files("decobound").joinpath("config.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def _expand_grid(name: str, spec) -> tuple[float, ...]:
    if isinstance(spec, dict):
        vals = np.linspace(spec["start"], spec["stop"], int(spec["num"]))
    elif name == "beta":
        vals = np.array([beta_from_json(v) for v in spec])
    else:
        vals = np.asarray(spec, dtype=float)
    if vals.size == 0:
        raise DomainError(f"grid {name!r} is empty")
    if np.any(np.diff(vals) < 0):
        raise DomainError(f"grid {name!r} is not sorted")
    if not np.all(np.isfinite(vals) | ((name == "beta") & (vals == np.inf))):
        raise DomainError(f"grid {name!r} has non-finite entries")
    return tuple(float(v) for v in vals)


# which top-level sections each task needs
_NEEDS = {
    "spectrum": ("bath", "grids.omega"),
    "kernels": ("grids.t", "grids.omega"),
    "generator": ("bath",),
    "evolve": ("bath", "grids.t"),
    "discrete": ("bath", "grids.t"),
    "oracle": ("model", "grids.t", "grids.lambda"),
    "sweep": ("bath", "sweep"),
}


@dataclass
class RunConfig:
    task: str
    bath: dict | None = None
    qubits: QubitParams = field(default_factory=QubitParams)
    grids: dict = field(default_factory=dict)
    initial_state: str | tuple | None = None
    kernel: tuple[str, str] = ("+", "-")
    model: dict | None = None
    sweep_axes: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    output_path: str | None = None
    output_format: str = "csv"

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        jsonschema.validate(data, load_schema())
        grids = {k: _expand_grid(k, v) for k, v in data.get("grids", {}).items()}
        q = data.get("qubits", {})
        qp = QubitParams(float(q.get("omega0", 1.0)), float(q.get("lambda", 0.1)))
        bath = data.get("bath")
        if bath is not None:
            bath = bath_to_dict(bath_from_dict(bath))  # validates and normalizes
        model = data.get("model")
        if model is not None:
            model = {
                "beta": beta_to_json(beta_from_json(model.get("beta"))),
                "modes": [dict(m) for m in model["modes"]],
            }
        state = data.get("initial_state")
        if isinstance(state, list):
            state = tuple((float(re), float(im)) for re, im in state)
        kern = data.get("kernel", {})
        axes = {k: _expand_grid(k, v) for k, v in data.get("sweep", {}).get("axes", {}).items()}
        out = data.get("output", {})
        cfg = cls(
            task=data["task"],
            bath=bath,
            qubits=qp,
            grids=grids,
            initial_state=state,
            kernel=(kern.get("s", "+"), kern.get("s2", "-")),
            model=model,
            sweep_axes=axes,
            options=dict(data.get("options", {})),
            output_path=out.get("path"),
            output_format=out.get("format", "csv"),
        )
        cfg.check()
        return cfg

    def to_dict(self) -> dict:
        d: dict = {
            "task": self.task,
            "qubits": {"omega0": self.qubits.omega0, "lambda": self.qubits.lam},
            "kernel": {"s": self.kernel[0], "s2": self.kernel[1]},
            "output": {"format": self.output_format},
        }
        if self.bath is not None:
            d["bath"] = self.bath
        if self.grids:
            d["grids"] = {k: list(v) for k, v in self.grids.items()}
        if self.initial_state is not None:
            s = self.initial_state
            d["initial_state"] = s if isinstance(s, str) else [list(p) for p in s]
        if self.model is not None:
            d["model"] = self.model
        if self.sweep_axes:
            d["sweep"] = {
                "axes": {k: [beta_to_json(x) for x in v] if k == "beta" else list(v) for k, v in self.sweep_axes.items()}
            }
        if self.options:
            d["options"] = dict(self.options)
        if self.output_path is not None:
            d["output"]["path"] = self.output_path
        return d

    def check(self) -> None:
        for need in _NEEDS[self.task]:
            if need.startswith("grids."):
                if need[6:] not in self.grids:
                    raise DomainError(f"task {self.task!r} needs grids.{need[6:]}")
            elif need == "sweep":
                if not self.sweep_axes:
                    raise DomainError("task 'sweep' needs sweep.axes")
            elif getattr(self, need) is None:
                raise DomainError(f"task {self.task!r} needs a {need!r} section")
        kind = None if self.bath is None else self.bath["type"]
        if self.task in ("generator", "evolve") and kind != "ohmic":
            raise DomainError(f"task {self.task!r} needs a continuous (ohmic) bath")
        if self.task == "discrete" and kind != "discrete":
            raise DomainError("task 'discrete' needs a discrete bath")
        if "t" in self.grids and self.grids["t"][0] < 0:
            raise DomainError("times must be non-negative")
        if self.task == "evolve" and self.grids["t"][0] != 0:
            raise DomainError("evolve time grid must start at 0")
        if self.task == "sweep" and kind == "discrete" and "t" not in self.grids:
            raise DomainError("discrete sweeps need grids.t")
        if self.task == "sweep" and kind == "discrete" and {"kappa", "omega_c"} & set(self.sweep_axes):
            raise DomainError("kappa and omega_c axes apply to the ohmic family only")
        self.rho0()  # validates the state

    def rho0(self) -> np.ndarray:
        s = self.initial_state
        if s is None:
            return projector(ket("01"))
        if isinstance(s, str):
            return projector(_STATES[s] if s in _STATES else ket(s))
        rho = np.array([complex(re, im) for re, im in s]).reshape(4, 4)
        if np.abs(rho - rho.conj().T).max() > 1e-10 or abs(np.trace(rho) - 1) > 1e-10:
            raise DomainError("initial_state must be a Hermitian unit-trace matrix")
        if np.linalg.eigvalsh(rho)[0] < -1e-10:
            raise DomainError("initial_state is not positive semi-definite")
        return rho


# -- artifacts ---------------------------------------------------------------


@dataclass
class Artifact:
    name: str
    text: str


def _table(cfg: RunConfig, stem: str, header, rows, stamp: str | None) -> Artifact:
    if cfg.output_format == "json":
        payload = {"columns": list(header), "rows": [[_jsonable(x) for x in r] for r in rows]}
        if stamp:
            payload["generated"] = stamp
        return Artifact(f"{stem}.json", json_text(payload))
    return Artifact(f"{stem}.csv", csv_text(header, rows, comment=stamp))


def _jsonable(x):
    if isinstance(x, (str, type(None))):
        return x
    x = float(x)
    if math.isfinite(x):
        return x
    return str(x)


def _fom_dict(fom) -> dict:
    return {"t_gate": _jsonable(fom.t_gate), "t_dec": _jsonable(fom.t_dec), "q": _jsonable(fom.q)}


def _task_spectrum(cfg, stem, stamp):
    spec = bath_from_dict(cfg.bath)
    w = np.asarray(cfg.grids["omega"])
    J = eval_spectrum(spec, w)
    kms = kms_residual(spec, w)
    rows = [[x, *flatten_complex(Jx), k] for x, Jx, k in zip(w, J, kms)]
    out = [_table(cfg, stem, ["omega", *spectral_columns(), "kms_residual"], rows, stamp)]
    if "t" in cfg.grids:
        t = np.asarray(cfg.grids["t"])
        C = correlation_function(spec, t)
        crow = [[x, *flatten_complex(Cx)] for x, Cx in zip(t, C)]
        out.append(_table(cfg, f"{stem}_correlation", ["t", *spectral_columns()], crow, stamp))
    return out


def _task_kernels(cfg, stem, stamp):
    s, s2 = cfg.kernel
    rows = []
    for t in cfg.grids["t"]:
        for w in cfg.grids["omega"]:
            phi = complex(eval_phi(s, s2, t, w, cfg.qubits.omega0))
            psi = complex(eval_psi(s, s2, t, w, cfg.qubits.omega0))
            rows.append([t, w, phi.real, phi.imag, psi.real, psi.imag])
    header = ["t", "omega", "re_phi", "im_phi", "re_psi", "im_psi"]
    return [_table(cfg, stem, header, rows, stamp)]


def _fom_or_none(gen, decoherence):
    try:
        return figure_of_merit(gen, decoherence)
    except DomainError:
        return None


def _task_generator(cfg, stem, stamp):
    spec = bath_from_dict(cfg.bath)
    gen = build_generator(spec, cfg.qubits)
    fom = _fom_or_none(gen, cfg.options.get("decoherence", "total"))
    if cfg.output_format == "csv":
        h = gen.flip_flop
        rows = [
            ["h_AB", h.real, h.imag],
            ["total_rate", gen.total_rate, 0.0],
        ]
        for i in range(4):
            for j in range(4):
                z = gen.h_eff[i, j]
                rows.append([f"h_eff_{i}{j}", z.real, z.imag])
        if fom is not None:
            rows += [["t_gate", fom.t_gate, 0.0], ["t_dec", fom.t_dec, 0.0], ["q", fom.q, 0.0]]
        return [Artifact(f"{stem}.csv", csv_text(["quantity", "re", "im"], rows, comment=stamp))]
    payload = {
        "bath": cfg.bath,
        "qubits": {"omega0": cfg.qubits.omega0, "lambda": cfg.qubits.lam},
        "generator": generator_to_dict(gen),
        "flip_flop": [gen.flip_flop.real, gen.flip_flop.imag],
        "total_rate": gen.total_rate,
        "figure_of_merit": None if fom is None else _fom_dict(fom),
    }
    if stamp:
        payload["generated"] = stamp
    return [Artifact(f"{stem}.json", json_text(payload))]


def _task_evolve(cfg, stem, stamp):
    spec = bath_from_dict(cfg.bath)
    gen = build_generator(spec, cfg.qubits)
    rho0 = cfg.rho0()
    states = propagate(assemble_liouvillian(gen), rho0, cfg.grids["t"])
    header = ["t", "concurrence", "purity", "trace_distance_initial", *matrix_columns("rho", 4)]
    rows = []
    for t, rho in zip(cfg.grids["t"], states):
        rows.append([t, concurrence(rho), purity(rho), trace_distance(rho, rho0), *flatten_complex(rho)])
    out = [_table(cfg, stem, header, rows, stamp)]
    fom = _fom_or_none(gen, cfg.options.get("decoherence", "total"))
    if fom is not None:
        payload = _fom_dict(fom)
        if stamp:
            payload["generated"] = stamp
        out.append(Artifact(f"{stem}_fom.json", json_text(payload)))
    return out


def _task_discrete(cfg, stem, stamp):
    spec = bath_from_dict(cfg.bath)
    rw = bool(cfg.options.get("rotating_wave", False))
    rho0 = cfg.rho0()
    rows = []
    for t in cfg.grids["t"]:
        K = dissipator_matrix(spec, cfg.qubits, t, rw)
        est = concurrence(rho0 + delta_rho2_discrete(spec, cfg.qubits, rho0, t))
        rows.append([t, np.linalg.norm(K, 2), coherent_norm(spec, cfg.qubits, t), est])
    header = ["t", "residual", "coherent_norm", "concurrence_estimate"]
    return [_table(cfg, stem, header, rows, stamp)]


def _oracle_model(cfg) -> OracleModel:
    modes = tuple(Mode(**m) for m in cfg.model["modes"])
    return OracleModel(cfg.qubits, modes, beta_from_json(cfg.model["beta"]))


def _task_oracle(cfg, stem, stamp):
    model = _oracle_model(cfg)
    rho0 = cfg.rho0()
    rows = []
    for t in cfg.grids["t"]:
        table = convergence_compare(model, rho0, t, cfg.grids["lambda"])
        for lam, err, _ in table.rows:
            rows.append([lam, t, err, table.slope])
    return [_table(cfg, stem, ["lambda", "t", "error", "slope"], rows, stamp)]


# -- sweeps ------------------------------------------------------------------


def _point_bath(bath: dict, point: dict):
    """Bath for one sweep point. Discrete beta sweeps keep positive-line weights."""
    if bath["type"] == "ohmic":
        d = dict(bath)
        for key in ("beta", "kappa", "omega_c"):
            if key in point:
                d[key] = beta_to_json(point[key]) if key == "beta" else point[key]
        return bath_from_dict(d)
    spec = bath_from_dict(bath)
    if "beta" in point:
        pos = [(Om, W) for Om, W in spec.lines if Om > 0]
        spec = DiscreteBath.from_positive_lines(pos, point["beta"])
    return spec


def _sweep_point(job):
    bath, omega0, lam, point, t_grid, options = job
    try:
        qp = QubitParams(omega0 + point.get("detuning", 0.0), point.get("lambda", lam))
        spec = _point_bath(bath, point)
        if isinstance(spec, OhmicBath):
            gen = build_generator(spec, qp)
            fom = figure_of_merit(gen, options.get("decoherence", "total"))
            h = gen.flip_flop
            return [[h.real, h.imag, gen.total_rate, fom.t_gate, fom.t_dec, fom.q, ""]]
        rw = bool(options.get("rotating_wave", False))
        rows = []
        for t in t_grid:
            res = float(np.linalg.norm(dissipator_matrix(spec, qp, t, rw), 2))
            rows.append([t, res, coherent_norm(spec, qp, t), ""])
        return rows
    except (DomainError, QuadratureError, InvariantViolation, ValueError) as exc:
        msg = f"{type(exc).__name__}: {exc}"
        if bath["type"] == "ohmic":
            return [[None] * 6 + [msg]]
        return [[t, None, None, msg] for t in t_grid]


def resolve_workers(flag: int | None) -> int:
    if flag is not None:
        return max(1, flag)
    env = os.environ.get("DECOBOUND_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise DomainError(f"DECOBOUND_WORKERS={env!r} is not an integer") from None
    return 1


def sweep(cfg: RunConfig, workers: int = 1) -> tuple[list[str], list[list]]:
    names = [a for a in SWEEP_AXES if a in cfg.sweep_axes]
    points = [dict(zip(names, vals)) for vals in product(*(cfg.sweep_axes[a] for a in names))]
    t_grid = cfg.grids.get("t", ())
    jobs = [(cfg.bath, cfg.qubits.omega0, cfg.qubits.lam, p, t_grid, cfg.options) for p in points]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            results = list(pool.map(_sweep_point, jobs))  # map keeps submission order
    else:
        results = [_sweep_point(j) for j in jobs]
    if cfg.bath["type"] == "ohmic":
        header = [*names, "re_h_AB", "im_h_AB", "total_rate", "t_gate", "t_dec", "q", "error"]
    else:
        header = [*names, "t", "residual", "coherent_norm", "error"]
    rows = []
    for p, res in zip(points, results):
        for r in res:
            rows.append([p[a] for a in names] + r)
    return header, rows


def _task_sweep(cfg, stem, stamp, workers=1):
    header, rows = sweep(cfg, workers)
    return [_table(cfg, stem, header, rows, stamp)]


_TASKS = {
    "spectrum": _task_spectrum,
    "kernels": _task_kernels,
    "generator": _task_generator,
    "evolve": _task_evolve,
    "discrete": _task_discrete,
    "oracle": _task_oracle,
}


def run(cfg: RunConfig, out_dir: Path, workers: int = 1, reproducible: bool = False) -> list[Path]:
    """Compute every artifact in memory, then write them all."""
    stamp = None
    if not reproducible:
        now = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
        stamp = f"decobound {__version__} generated {now}"
    stem = cfg.output_path or cfg.task
    if cfg.task == "sweep":
        arts = _task_sweep(cfg, stem, stamp, workers)
    else:
        arts = _TASKS[cfg.task](cfg, stem, stamp)
    out_dir = Path(out_dir)
    paths = []
    for art in arts:
        p = out_dir / art.name
        atomic_write(p, art.text)
        paths.append(p)
    return paths


def _fail(code: int, kind: str, exc: BaseException) -> int:
    err = {"error": kind, "exit_code": code, "type": type(exc).__name__, "message": str(exc)}
    achieved = getattr(exc, "achieved", None)
    if achieved is not None:
        err["achieved"] = achieved
    print(json.dumps(err), file=sys.stderr)
    return code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="decobound", description=__doc__)
    p.add_argument("--config", required=True, type=Path, help="JSON run configuration")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--workers", type=int, default=None, help="sweep worker processes (default: $DECOBOUND_WORKERS or 1)")
    p.add_argument("--reproducible", action="store_true", help="omit the timestamp header")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        data = json.loads(args.config.read_text(encoding="utf-8"))
        cfg = RunConfig.from_dict(data)
        workers = resolve_workers(args.workers)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(x) for x in exc.absolute_path)
        return _fail(EXIT_SCHEMA, "schema", ValueError(f"{path or '<root>'}: {exc.message}"))
    except (OSError, json.JSONDecodeError, DomainError, KeyError, TypeError) as exc:
        return _fail(EXIT_SCHEMA, "schema", exc)
    try:
        paths = run(cfg, args.out, workers, args.reproducible)
    except DomainError as exc:
        return _fail(EXIT_SCHEMA, "domain", exc)
    except QuadratureError as exc:
        return _fail(EXIT_NUMERICAL, "numerical", exc)
    except InvariantViolation as exc:
        return _fail(EXIT_INVARIANT, "invariant", exc)
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
