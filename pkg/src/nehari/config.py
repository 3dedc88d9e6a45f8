"""Flat ``key = value`` experiment configuration files.

Lines may carry ``#`` comments; dotted keys group settings (``solve.grad_tol``).
Every key is declared in :data:`SCHEMA`; anything else is an error.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .grid import DomainKind, DomainSpec, Field, build, read_field
from .params import ProblemParams
from .solver import SolveConfig


class ConfigError(ValueError):
    pass


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _strings(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


REQUIRED = object()

# key -> (parser, default)
SCHEMA: dict[str, tuple[Any, Any]] = {
    "params.N": (int, REQUIRED),
    "params.s1": (float, REQUIRED),
    "params.s2": (float, REQUIRED),
    "params.s3": (float, REQUIRED),
    "params.p": (float, REQUIRED),
    "params.lambda1": (float, REQUIRED),
    "params.lambda2": (float, REQUIRED),
    "params.lambda3": (float, REQUIRED),
    "params.continuation": (_bool, False),
    "domain.kind": (str, REQUIRED),
    "domain.L": (_floats, REQUIRED),
    "domain.alpha": (_floats, None),
    "grid.h": (float, REQUIRED),
    "solve.max_iters": (int, 2000),
    "solve.grad_tol": (float, 1e-7),
    "solve.step": (float, 1.0),
    "solve.armijo": (float, 0.5),
    "solve.seed": (int, 0),
    "solve.positive_part": (_bool, False),
    "solve.init": (str, "bump"),
    "solve.symmetrize": (_bool, False),
    "output.dir": (str, None),
    "sweep.axis": (str, None),
    "sweep.values": (_floats, None),
    "continue.path": (_floats, None),
    "verify.checks": (_strings, None),
    "verify.samples": (int, 0),
    "verify.seed": (int, 0),
    "verify.epsilons": (_floats, None),
    "verify.halfspace_L": (float, None),
    "debug.corrupt_gradient": (_bool, False),
}

SWEEP_AXES = ("lambda1", "lambda3", "p", "h", "L")
CHECKS = ("scaling", "threshold", "fibering", "gradient", "brezis_lieb", "testfunction")


def parse_text(text: str) -> dict[str, str]:
    raw: dict[str, str] = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected 'key = value', got {line!r}")
        key, val = (x.strip() for x in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"line {n}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {n}: duplicate key {key!r}")
        raw[key] = val
    return raw


@dataclass
class ExperimentConfig:
    values: dict[str, Any]
    base_dir: Path

    def __getitem__(self, key: str):
        return self.values[key]

    @classmethod
    def from_text(cls, text: str, base_dir: Path | str = ".") -> "ExperimentConfig":
        raw = parse_text(text)
        values: dict[str, Any] = {}
        for key, (parse, default) in SCHEMA.items():
            if key in raw:
                try:
                    values[key] = parse(raw[key])
                except ValueError as exc:
                    raise ConfigError(f"{key}: {exc}") from None
            elif default is REQUIRED:
                raise ConfigError(f"missing required key {key!r}")
            else:
                values[key] = default
        cfg = cls(values, Path(base_dir))
        cfg._validate()
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
        return cls.from_text(text, path.parent)

    def _validate(self):
        try:
            DomainKind(self["domain.kind"])
        except ValueError:
            kinds = ", ".join(k.value for k in DomainKind)
            raise ConfigError(f"domain.kind must be one of {kinds}") from None
        if self["verify.checks"] is not None:
            bad = [c for c in self["verify.checks"] if c not in CHECKS]
            if bad:
                raise ConfigError(f"unknown verify checks {bad}; choose from {', '.join(CHECKS)}")
        if self["sweep.axis"] is not None and self["sweep.axis"] not in SWEEP_AXES:
            raise ConfigError(f"sweep.axis must be one of {', '.join(SWEEP_AXES)}")

    def with_values(self, **changes) -> "ExperimentConfig":
        vals = dict(self.values)
        for k, v in changes.items():
            vals[k.replace("__", ".")] = v
        return ExperimentConfig(vals, self.base_dir)

    @property
    def output_dir(self) -> Path:
        out = self["output.dir"]
        return self.base_dir if out is None else self.base_dir / out

    def problem(self) -> ProblemParams:
        return ProblemParams(
            N=self["params.N"], s1=self["params.s1"], s2=self["params.s2"],
            s3=self["params.s3"], p=self["params.p"], lambda1=self["params.lambda1"],
            lambda2=self["params.lambda2"], lambda3=self["params.lambda3"],
            continuation=self["params.continuation"])

    def domain(self) -> DomainSpec:
        N = self["params.N"]
        L = self["domain.L"]
        if len(L) == 1:
            L = L * N
        if len(L) != N:
            raise ConfigError(f"domain.L needs 1 or {N} entries, got {len(L)}")
        kind = DomainKind(self["domain.kind"])
        alpha = self["domain.alpha"] or ()
        if kind is DomainKind.PERTURBED_BOUNDARY and len(alpha) != N - 1:
            raise ConfigError(f"domain.alpha needs {N - 1} entries for PerturbedBoundary")
        if kind is not DomainKind.PERTURBED_BOUNDARY:
            alpha = ()
        return DomainSpec(kind, tuple(L), tuple(alpha))

    def grid(self):
        return build(self.domain(), self["grid.h"])

    def solve_config(self, grid=None) -> SolveConfig:
        init: Any = self["solve.init"]
        if init not in ("bump", "random"):
            if grid is None:
                grid = self.grid()
            path = Path(init)
            if not path.is_absolute():
                path = self.base_dir / path
            try:
                init = read_field(path, grid)
            except OSError as exc:
                raise ConfigError(f"solve.init: cannot read {path}: {exc.strerror}") from None
        return SolveConfig(
            max_iters=self["solve.max_iters"], grad_tol=self["solve.grad_tol"],
            step=self["solve.step"], armijo=self["solve.armijo"], seed=self["solve.seed"],
            positive_part=self["solve.positive_part"], init=init,
            symmetrize=self["solve.symmetrize"])
