"""Random environments for the Bernoulli lattice model with stationary boundaries."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

Kind = Literal["boundary", "bulk"]


class ParameterError(ValueError):
    """Raised when model or perturbation parameters fall outside their valid range."""


def west_parameter(p: float, u: float) -> float:
    """Success probability of the west-axis weights, p(1-u)/(u+p(1-u))."""
    return p * (1.0 - u) / (u + p * (1.0 - u))


@dataclass(frozen=True)
class Params:
    p: float
    u: float

    def __post_init__(self):
        if not (0.0 < self.p < 1.0):
            raise ParameterError(f"p must lie in (0,1), got {self.p}")
        if not (0.0 < self.u <= 1.0):
            raise ParameterError(f"u must lie in (0,1], got {self.u}")

    @property
    def west(self) -> float:
        return west_parameter(self.p, self.u)


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the counter tuple ``key`` under a 64-bit master seed.

    The stream depends only on (seed, key), never on the order in which streams are
    requested, so sample k can be regenerated in isolation.
    """
    ss = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def _check_dims(dims) -> tuple[int, int]:
    m, n = int(dims[0]), int(dims[1])
    if m < 1 or n < 1:
        raise ParameterError(f"lattice extents must be at least (1,1), got {dims}")
    return m, n


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class UniformField:
    """i.i.d. Uniform[0,1) values on [0..m]x[0..n], shared by coupled environments."""

    values: np.ndarray

    @property
    def dims(self) -> tuple[int, int]:
        return self.values.shape[0] - 1, self.values.shape[1] - 1


@dataclass(frozen=True, eq=False)
class Environment:
    """{0,1} weights on [0..m]x[0..n]; row index i is the horizontal coordinate.

    ``weights[i, 0]`` (i >= 1) is the south axis, ``weights[0, j]`` (j >= 1) the west
    axis, and ``weights[i, j]`` with i, j >= 1 the bulk.  ``south_p``/``west_p`` record
    the axis laws; ``params`` is set when the environment came from a boundary model.
    """

    weights: np.ndarray
    kind: Kind = "boundary"
    params: Optional[Params] = None
    south_p: Optional[float] = None
    west_p: Optional[float] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        w = self.weights
        if w.ndim != 2 or w.shape[0] < 2 or w.shape[1] < 2:
            raise ParameterError(f"weights must be a 2-D array of shape >= (2,2), got {w.shape}")
        if w[0, 0] != 0:
            raise ParameterError("origin weight must be 0")

    @property
    def dims(self) -> tuple[int, int]:
        return self.weights.shape[0] - 1, self.weights.shape[1] - 1

    @property
    def south(self) -> np.ndarray:
        return self.weights[1:, 0]

    @property
    def west(self) -> np.ndarray:
        return self.weights[0, 1:]

    @property
    def bulk(self) -> np.ndarray:
        return self.weights[1:, 1:]


def make_environment(weights, kind: Kind = "boundary", params: Optional[Params] = None) -> Environment:
    """Wrap an explicit weight array (validated, copied to uint8, made read-only)."""
    w = np.array(weights, dtype=np.int64)
    if np.any((w != 0) & (w != 1)):
        raise ParameterError("weights must be 0 or 1")
    w = w.astype(np.uint8)
    if kind == "bulk":
        w[0, :] = 0
        w[:, 0] = 0
    sp = params.u if params is not None else None
    wp = params.west if params is not None else None
    return Environment(_frozen(w), kind, params, sp, wp)


def sample_uniform_field(dims, stream: np.random.Generator) -> UniformField:
    m, n = _check_dims(dims)
    return UniformField(_frozen(stream.random((m + 1, n + 1))))


def realize(field: UniformField, params: Params, kind: Kind = "boundary") -> Environment:
    """Threshold a uniform field: p in the bulk, u on the south axis, l(u) on the west axis.

    ``kind="bulk"`` zeroes both axes (the model without boundary weights).
    """
    eta = field.values
    w = (eta < params.p).astype(np.uint8)
    if kind == "boundary":
        w[1:, 0] = eta[1:, 0] < params.u
        w[0, 1:] = eta[0, 1:] < params.west
    else:
        w[1:, 0] = 0
        w[0, 1:] = 0
    w[0, 0] = 0
    if kind == "boundary":
        return Environment(_frozen(w), kind, params, params.u, params.west)
    return Environment(_frozen(w), kind, params, None, None)


def sample_environment(params: Params, dims, stream: np.random.Generator, kind: Kind = "boundary") -> Environment:
    return realize(sample_uniform_field(dims, stream), params, kind)


@dataclass(frozen=True)
class PerturbationSpec:
    epsilon: float
    side: Literal["south", "west"]

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ParameterError(f"epsilon must be positive, got {self.epsilon}")
        if self.side not in ("south", "west"):
            raise ParameterError(f"side must be 'south' or 'west', got {self.side!r}")


def south_flip_probability(u: float, eps: float) -> float:
    """P(H=1) so that max(H, Ber(u)) is Ber(u+eps)."""
    return eps / (1.0 - u)


def west_keep_probability(p: float, u: float, eps: float) -> float:
    """P(V=1) so that Ber(l(u)) * V is Ber(l(u+eps)), i.e. l(u+eps)/l(u)."""
    return 1.0 - eps / ((1.0 - u) * (p + u * (1.0 - p)) + (1.0 - u) * (1.0 - p) * eps)


def _perturbable(env: Environment, spec: PerturbationSpec, side: str) -> Params:
    if spec.side != side:
        raise ParameterError(f"perturbation spec is for the {spec.side} axis, not {side}")
    if env.kind != "boundary" or env.params is None:
        raise ParameterError("perturbation needs a boundary-model environment with recorded parameters")
    prm = env.params
    if not (prm.u + spec.epsilon < 1.0):
        raise ParameterError(f"u + epsilon must stay below 1 (u={prm.u}, epsilon={spec.epsilon})")
    return prm


def perturb_south(env: Environment, spec: PerturbationSpec, stream: np.random.Generator,
                  uniforms: Optional[np.ndarray] = None) -> Environment:
    """Raise the south law from Ber(u) to Ber(u+eps) by OR-ing in independent flips."""
    prm = _perturbable(env, spec, "south")
    q = south_flip_probability(prm.u, spec.epsilon)
    m, _ = env.dims
    draws = stream.random(m) if uniforms is None else uniforms
    h = (draws < q).astype(np.uint8)
    w = env.weights.copy()
    w[1:, 0] |= h
    new = Params(prm.p, prm.u + spec.epsilon)
    return Environment(_frozen(w), "boundary", new, new.u, prm.west, {"flips": h})


def perturb_west(env: Environment, spec: PerturbationSpec, stream: np.random.Generator,
                 uniforms: Optional[np.ndarray] = None) -> Environment:
    """Lower the west law from Ber(l(u)) to Ber(l(u+eps)) by thinning with independent keeps."""
    prm = _perturbable(env, spec, "west")
    keep = west_keep_probability(prm.p, prm.u, spec.epsilon)
    if not (0.0 <= keep <= 1.0):
        raise ParameterError(f"epsilon={spec.epsilon} gives an invalid keep probability {keep}")
    _, n = env.dims
    draws = stream.random(n) if uniforms is None else uniforms
    v = (draws < keep).astype(np.uint8)
    w = env.weights.copy()
    w[0, 1:] &= v
    new = Params(prm.p, prm.u + spec.epsilon)
    return Environment(_frozen(w), "boundary", new, prm.u, new.west, {"keeps": v})


def transpose(env: Environment) -> Environment:
    """Swap the coordinates; the south and west axes exchange roles.

    Since l(l(u)) = u, a boundary model with parameter u transposes to the boundary model
    with parameter l(u) whenever l(u) > 0.
    """
    w = _frozen(np.ascontiguousarray(env.weights.T))
    prm = None
    if env.params is not None and env.params.west > 0.0:
        prm = Params(env.params.p, env.params.west)
    return Environment(w, env.kind, prm, env.west_p, env.south_p)
