"""JSON and CSV serialization of baths, generators and tables."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .env_model import DiscreteBath, OhmicBath
from .errors import DomainError
from .generator_continuous import EffectiveGenerator, RateMatrices


def beta_to_json(beta: float):
    return "inf" if math.isinf(beta) else beta


def beta_from_json(value) -> float:
    if value is None:
        return math.inf
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity", "+inf"):
            return math.inf
        raise DomainError(f"cannot parse beta {value!r}")
    return float(value)


def matrix_to_json(m: np.ndarray) -> list:
    """Dense complex matrix as a row-major list of [re, im] pairs."""
    return [[float(z.real), float(z.imag)] for z in np.asarray(m, dtype=complex).ravel()]


def matrix_from_json(data, shape: tuple[int, int]) -> np.ndarray:
    arr = np.array([complex(re, im) for re, im in data])
    if arr.size != shape[0] * shape[1]:
        raise DomainError(f"expected {shape[0] * shape[1]} [re, im] entries, got {arr.size}")
    return arr.reshape(shape)


def bath_to_dict(spec) -> dict:
    if isinstance(spec, OhmicBath):
        return {
            "type": "ohmic",
            "alpha": spec.alpha,
            "omega_c": spec.omega_c,
            "kappa": spec.kappa,
            "beta": beta_to_json(spec.beta),
        }
    if isinstance(spec, DiscreteBath):
        return {
            "type": "discrete",
            "beta": beta_to_json(spec.beta),
            "lines": [{"omega": Om, "J": matrix_to_json(W)} for Om, W in spec.lines],
        }
    raise DomainError(f"cannot serialize bath of type {type(spec).__name__}")


def bath_from_dict(data: dict):
    kind = data.get("type")
    beta = beta_from_json(data.get("beta"))
    if kind == "ohmic":
        return OhmicBath(
            alpha=float(data["alpha"]),
            omega_c=float(data["omega_c"]),
            kappa=float(data.get("kappa", 1.0)),
            beta=beta,
        )
    if kind == "discrete":
        lines = [(float(line["omega"]), matrix_from_json(line["J"], (2, 2))) for line in data["lines"]]
        if data.get("add_kms_partners"):
            return DiscreteBath.from_positive_lines(lines, beta)
        return DiscreteBath(tuple(lines), beta)
    raise DomainError(f"unknown bath type {kind!r}")


def generator_to_dict(gen: EffectiveGenerator) -> dict:
    out = {
        "h_eff": matrix_to_json(gen.h_eff),
        "lindblads": [matrix_to_json(L) for L in gen.lindblads],
    }
    if gen.rates is not None:
        out["rates"] = {
            "gamma_plus": matrix_to_json(gen.rates.gamma_plus),
            "gamma_minus": matrix_to_json(gen.rates.gamma_minus),
        }
    if gen.shifts is not None:
        out["shifts"] = {("+" if s > 0 else "-"): matrix_to_json(P) for s, P in gen.shifts.items()}
    return out


def generator_from_dict(data: dict) -> EffectiveGenerator:
    rates = None
    if "rates" in data:
        r = data["rates"]
        rates = RateMatrices(matrix_from_json(r["gamma_plus"], (2, 2)), matrix_from_json(r["gamma_minus"], (2, 2)))
    shifts = None
    if "shifts" in data:
        shifts = {(1 if k == "+" else -1): matrix_from_json(v, (2, 2)) for k, v in data["shifts"].items()}
    return EffectiveGenerator(
        matrix_from_json(data["h_eff"], (4, 4)),
        tuple(matrix_from_json(L, (4, 4)) for L in data["lindblads"]),
        rates,
        shifts,
    )


def fmt(x) -> str:
    """17 significant digits, '.' decimal point, no grouping."""
    if isinstance(x, (str, bytes)):
        return x
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def csv_text(header: list[str], rows, comment: str | None = None) -> str:
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def json_text(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def spectral_columns() -> list[str]:
    names = []
    for a in "AB":
        for b in "AB":
            names += [f"re_{a}{b}", f"im_{a}{b}"]
    return names


def matrix_columns(prefix: str, n: int) -> list[str]:
    return [f"{part}_{prefix}{i}{j}" for i in range(n) for j in range(n) for part in ("re", "im")]


def flatten_complex(m: np.ndarray) -> list[float]:
    out = []
    for z in np.asarray(m, dtype=complex).ravel():
        out += [z.real, z.imag]
    return out
