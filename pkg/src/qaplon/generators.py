"""Seeded random QAP instance generators and QAPLIB-style file I/O.

Two instance classes are produced. Both draw n points uniformly at random in
the square [0, coord_range]^2 and take the distance matrix as the rounded
pairwise Euclidean distances, so distances are symmetric, zero-diagonal, and
respect the triangle inequality up to rounding.

* uniform:   flows are integers drawn uniformly from [1, flow_max].
* real-like: each unordered pair is zero with probability
  `reallike_sparsity`, otherwise round(10 ** (u * reallike_amplitude)) with u
  uniform in [0, 1) -- a zero-inflated, log-uniform magnitude profile.

Randomness comes from numpy's PCG64 seeded through SeedSequence. The point
and flow streams are independent spawned substreams, so adding parameters to
one stream never perturbs the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import ParseError
from .qap import QapInstance

UNIFORM = "uniform"
REAL_LIKE = "real-like"
INSTANCE_CLASSES = (UNIFORM, REAL_LIKE)


@dataclass(frozen=True)
class GeneratorParams:
    """Defaults are calibrated so the two classes contrast sharply in local
    optima counts at equal n: coarse uniform values create many cost ties
    (strict best-improvement then leaves many plateau optima) while the
    log-spread real-like flows rarely tie."""

    n: int
    seed: int
    instance_class: str
    coord_range: float = 10.0
    flow_max: int = 3
    reallike_amplitude: float = 5.0
    reallike_sparsity: float = 0.6

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if self.instance_class not in INSTANCE_CLASSES:
            raise ValueError(
                f"instance_class must be one of {INSTANCE_CLASSES}, "
                f"got {self.instance_class!r}"
            )
        if not self.coord_range > 0:
            raise ValueError("coord_range must be positive")
        if self.flow_max < 1:
            raise ValueError("flow_max must be >= 1")
        if not 0.0 <= self.reallike_sparsity <= 1.0:
            raise ValueError("reallike_sparsity must lie in [0, 1]")
        if not self.reallike_amplitude > 0:
            raise ValueError("reallike_amplitude must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def instance_name(params: GeneratorParams) -> str:
    cls = "uni" if params.instance_class == UNIFORM else "rl"
    return f"{cls}-n{params.n:02d}-s{params.seed}"


def _fill_symmetric(n: int, upper_values: np.ndarray) -> np.ndarray:
    m = np.zeros((n, n), dtype=np.int64)
    iu = np.triu_indices(n, k=1)
    m[iu] = upper_values
    m[(iu[1], iu[0])] = upper_values
    return m


def generate(params: GeneratorParams) -> QapInstance:
    """Deterministic instance for (seed, params); both matrices symmetric."""
    n = params.n
    root = np.random.SeedSequence(params.seed)
    points_ss, flow_ss = root.spawn(2)

    rng_pts = np.random.Generator(np.random.PCG64(points_ss))
    pts = rng_pts.uniform(0.0, params.coord_range, size=(n, 2))
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.rint(np.sqrt((diff**2).sum(axis=2))).astype(np.int64)
    np.fill_diagonal(dist, 0)

    rng_flow = np.random.Generator(np.random.PCG64(flow_ss))
    npairs = n * (n - 1) // 2
    if params.instance_class == UNIFORM:
        vals = rng_flow.integers(1, params.flow_max, size=npairs, endpoint=True)
    else:
        zero_mask = rng_flow.random(npairs) < params.reallike_sparsity
        mag = np.rint(10.0 ** (rng_flow.random(npairs) * params.reallike_amplitude))
        vals = np.where(zero_mask, 0, mag.astype(np.int64))
    flow = _fill_symmetric(n, vals.astype(np.int64))

    return QapInstance(n=n, dist=dist, flow=flow, name=instance_name(params))


# ---------------------------------------------------------------------------
# QAPLIB-style text files: n, then the distance matrix, then the flow matrix,
# whitespace-separated. Blank lines between sections are tolerated.
# ---------------------------------------------------------------------------


def _format_value(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_instance(inst: QapInstance, path) -> None:
    path = Path(path)
    lines = [str(inst.n), ""]
    for m in (inst.dist, inst.flow):
        for row in m:
            lines.append(" ".join(_format_value(x) for x in row))
        lines.append("")
    path.write_text("\n".join(lines), encoding="ascii")


def _tokenize(text: str):
    """Yield (token, line, column), both 1-based."""
    for ln, line in enumerate(text.splitlines(), start=1):
        col = 1
        for tok in line.split():
            col = line.index(tok, col - 1) + 1
            yield tok, ln, col
            col += len(tok)


def read_instance(path) -> QapInstance:
    """Parse a QAPLIB-style file; integer files give exact integer matrices."""
    path = Path(path)
    tokens = list(_tokenize(path.read_text(encoding="ascii", errors="replace")))
    if not tokens:
        raise ParseError(f"{path}: empty instance file")
    tok, ln, col = tokens[0]
    try:
        n = int(tok)
    except ValueError:
        raise ParseError(f"{path}: instance size {tok!r} is not an integer",
                         line=ln, column=col) from None
    if n < 1:
        raise ParseError(f"{path}: instance size must be positive, got {n}",
                         line=ln, column=col)
    need = 1 + 2 * n * n
    if len(tokens) < need:
        have = len(tokens) - 1
        section = "distance" if have < n * n else "flow"
        raise ParseError(
            f"{path}: expected {2 * n * n} matrix entries for n={n}, "
            f"found {have} ({section} matrix is short)"
        )
    if len(tokens) > need:
        tok, ln, col = tokens[need]
        raise ParseError(f"{path}: unexpected trailing value {tok!r}",
                         line=ln, column=col)

    values = []
    integral = True
    for tok, ln, col in tokens[1:]:
        try:
            v = int(tok)
        except ValueError:
            try:
                v = float(tok)
            except ValueError:
                raise ParseError(f"{path}: {tok!r} is not a number",
                                 line=ln, column=col) from None
            integral = False
        values.append(v)
    dtype = np.int64 if integral else np.float64
    arr = np.array(values, dtype=dtype)
    dist = arr[: n * n].reshape(n, n)
    flow = arr[n * n :].reshape(n, n)
    return QapInstance(n=n, dist=dist, flow=flow, name=path.stem)
