"""Flat key-value config files for the CLI.

Format: one ``key = value`` pair per line, ``#`` comments. Vectors are
comma-separated; matrices use ``;`` between rows. Keys mirror the DgpConfig
and ExperimentConfig field names.
"""

from __future__ import annotations

from .experiments import ExperimentConfig
from .model_core import ALL_VARIANTS, ModelVariant
from .simulation import DgpConfig

__all__ = ["parse_kv", "dgp_config_from", "experiment_config_from", "load_config"]


def parse_kv(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def _vector(s: str) -> tuple[float, ...]:
    return tuple(float(v) for v in s.split(","))


def _matrix(s: str) -> tuple[tuple[float, ...], ...]:
    return tuple(_vector(row) for row in s.split(";"))


def _bool(s: str) -> bool:
    if s.lower() in ("true", "1", "yes"):
        return True
    if s.lower() in ("false", "0", "no"):
        return False
    raise ValueError(f"expected boolean, got {s!r}")


_DGP_PARSERS = {
    "theta_t_true": _vector,
    "theta_c_true": _vector,
    "x_mean": _vector,
    "x_cov": _matrix,
    "n_raw": int,
    "label_fraction_d1": float,
    "keep_fraction_d2": float,
    "split_fraction": float,
    "c_observed_for_labeled": _bool,
    "seed": int,
}


def dgp_config_from(kv: dict[str, str]) -> DgpConfig:
    kwargs = {k: parse(kv[k]) for k, parse in _DGP_PARSERS.items() if k in kv}
    return DgpConfig(**kwargs)


def experiment_config_from(kv: dict[str, str]) -> ExperimentConfig:
    dgp = dgp_config_from(kv)
    kwargs: dict = {"dgp": dgp}
    if "variants" in kv:
        kwargs["variants"] = tuple(
            ModelVariant.parse(v.strip()) for v in kv["variants"].split(",")
        )
    else:
        kwargs["variants"] = ALL_VARIANTS
    if "replicates" in kv:
        kwargs["replicates"] = int(kv["replicates"])
    if "n_raw_list" in kv:
        kwargs["n_raw_list"] = tuple(int(v) for v in kv["n_raw_list"].split(","))
    if "workers" in kv:
        kwargs["workers"] = int(kv["workers"])
    known = set(_DGP_PARSERS) | {"variants", "replicates", "n_raw_list", "workers"}
    unknown = set(kv) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(**kwargs)


def load_config(path) -> dict[str, str]:
    with open(path) as fh:
        return parse_kv(fh.read())
