"""Weight measures on the frequency axis, realized as quadrature rules.

Every integral in the contrast has the form  int phi(u) dW(u)  for a
probability measure W with finite absolute moments up to order three.  The
default W has the two-sided exponential density w(u) = exp(-|u|)/2, whose
k-th absolute moment is k! (so 1, 2, 6 for k = 1, 2, 3) -- handy analytic
oracles for the rule.

A rule is composite Gauss-Legendre on [-cutoff, cutoff] with the density
folded into the weights: panels of at most 8 nodes per half-axis, mirrored
so the node set is symmetric about zero.  The density is smooth inside each
half-axis (the |u| kink sits on a panel boundary), so the rule converges
geometrically for smooth integrands.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import BadWeightSpec

__all__ = [
    "WeightRule",
    "build_weight_rule",
    "scale_aware_cutoff",
    "laplace_density",
]

_NODES_PER_PANEL = 8


def laplace_density(u) -> np.ndarray:
    """Normalized two-sided exponential density exp(-|u|)/2."""
    return 0.5 * np.exp(-np.abs(np.asarray(u, dtype=float)))


@dataclass(frozen=True)
class WeightRule:
    """Quadrature realization of a weight measure: sum_q weights[q] phi(nodes[q])."""

    density_id: str
    node_count: int
    cutoff: float
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", np.asarray(self.nodes, dtype=float))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        self.nodes.flags.writeable = False
        self.weights.flags.writeable = False

    def density(self, u) -> np.ndarray:
        if self.density_id != "laplace_default":
            raise BadWeightSpec(f"no closed-form density for rule {self.density_id!r}")
        return laplace_density(u)

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def abs_moment(self, k: int) -> float:
        return float(np.dot(self.weights, np.abs(self.nodes) ** k))

    def to_json(self) -> str:
        return json.dumps({
            "density_id": self.density_id,
            "node_count": self.node_count,
            "cutoff": self.cutoff,
            "nodes": self.nodes.tolist(),
            "weights": self.weights.tolist(),
        })

    @classmethod
    def from_json(cls, text: str) -> "WeightRule":
        obj = json.loads(text)
        return cls(
            density_id=obj["density_id"],
            node_count=int(obj["node_count"]),
            cutoff=float(obj["cutoff"]),
            nodes=np.asarray(obj["nodes"], dtype=float),
            weights=np.asarray(obj["weights"], dtype=float),
        )


def _half_axis_panels(m: int, cutoff: float):
    """Split m nodes over equal panels of (0, cutoff], at most 8 nodes each."""
    k = max(1, m // _NODES_PER_PANEL)
    counts = [m // k] * k
    for i in range(m % k):
        counts[i] += 1
    edges = np.linspace(0.0, cutoff, k + 1)
    return counts, edges


def build_weight_rule(density_id: str = "laplace_default",
                      node_count: int = 256,
                      cutoff: float = 30.0,
                      table: tuple | None = None) -> WeightRule:
    """Build the quadrature rule for a weight measure.

    density_id "laplace_default": composite Gauss-Legendre on [-cutoff, cutoff]
    with exp(-|u|)/2 folded into the weights; node_count must be even and
    >= 16.  density_id "user_table": take (nodes, weights) directly from
    `table` after validating positivity and finiteness of the third moment.
    """
    if density_id == "user_table":
        if table is None:
            raise BadWeightSpec("user_table rule requires table=(nodes, weights)")
        nodes = np.asarray(table[0], dtype=float)
        weights = np.asarray(table[1], dtype=float)
        if nodes.shape != weights.shape or nodes.ndim != 1 or nodes.size == 0:
            raise BadWeightSpec("table nodes/weights must be equal-length 1-d arrays")
        if not np.all(np.isfinite(nodes)) or not np.all(np.isfinite(weights)):
            raise BadWeightSpec("table contains non-finite entries")
        if np.any(weights < 0.0):
            raise BadWeightSpec("table weights must be nonnegative")
        third = float(np.dot(weights, np.abs(nodes) ** 3))
        if not np.isfinite(third):
            raise BadWeightSpec("third absolute moment of the table is not finite")
        return WeightRule("user_table", nodes.size, float(np.max(np.abs(nodes))), nodes, weights)

    if density_id != "laplace_default":
        raise BadWeightSpec(f"unknown density_id {density_id!r}")
    if node_count < 16 or node_count % 2 != 0:
        raise ValueError("node_count must be an even integer >= 16")
    if not cutoff > 0.0:
        raise ValueError("cutoff must be positive")

    m = node_count // 2
    counts, edges = _half_axis_panels(m, cutoff)
    nodes_parts, weight_parts = [], []
    for j, cnt in enumerate(counts):
        x, gw = leggauss(cnt)
        a, b = edges[j], edges[j + 1]
        u = 0.5 * (b - a) * x + 0.5 * (b + a)
        w = 0.5 * (b - a) * gw * laplace_density(u)
        nodes_parts.append(u)
        weight_parts.append(w)
    u_pos = np.concatenate(nodes_parts)
    w_pos = np.concatenate(weight_parts)
    nodes = np.concatenate([-u_pos[::-1], u_pos])
    weights = np.concatenate([w_pos[::-1], w_pos])
    return WeightRule("laplace_default", node_count, float(cutoff), nodes, weights)


def scale_aware_cutoff(scale: float, units: float = 6.0, cap: float = 30.0) -> float:
    """Frequency cutoff covering `units` standardized frequency units.

    For data of dispersion `scale` the informative band of the empirical
    characteristic function ends around a few multiples of 1/scale; `units`
    of them gives the integration window, capped at the default support cap.
    """
    if not scale > 0.0:
        raise ValueError("scale must be positive")
    return float(min(cap, units / scale))
