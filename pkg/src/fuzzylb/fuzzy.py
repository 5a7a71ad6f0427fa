"""Fuzzy load-balancing controller.

Maps a node's load index (its queue length, executing task included) and the
number of heavily loaded nodes in the system to a status of sender, receiver
or neutral. The pipeline is classic Mamdani: piecewise-linear membership
functions, min for rule antecedents, max to aggregate consequents, centroid
defuzzification over a [0, 1] output universe, then a band classifier around
the midpoint.

Everything here is immutable after construction and evaluation is pure, so
engines can be shared freely across concurrent simulation runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Mapping


class NodeStatus(Enum):
    SENDER = "sender"
    RECEIVER = "receiver"
    NEUTRAL = "neutral"


class NoRuleFired(ValueError):
    """Raised by defuzzification when every rule activation is zero."""


ANY = "any"
LOAD_TERMS = ("very-light", "light", "moderate", "heavy", "very-heavy")
COUNT_TERMS = ("less", "moreequal")


def _ramp_up(x: float, a: float, b: float) -> float:
    # 0 at and below a, 1 at and above b; a zero-width ramp (a == b) becomes
    # a left-continuous step at the knot
    if x <= a:
        return 0.0
    if x >= b:
        return 1.0
    return (x - a) / (b - a)


def _ramp_down(x: float, a: float, b: float) -> float:
    if x <= a:
        return 1.0
    if x >= b:
        return 0.0
    return (b - x) / (b - a)


_KIND_KNOTS = {
    "left-shoulder": 2,
    "right-shoulder": 2,
    "triangle": 3,
    "trapezoid": 4,
}


@dataclass(frozen=True)
class MembershipFunction:
    """Piecewise-linear membership function with range inside [0, 1].

    Shapes: left-shoulder(a, b) is 1 up to a and falls to 0 at b;
    right-shoulder(a, b) is 0 up to a and rises to 1 at b; triangle and
    trapezoid are the usual ones. Knots must be non-decreasing; that is
    checked at construction, never at evaluation time.
    """

    kind: str
    knots: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.kind not in _KIND_KNOTS:
            raise ValueError(f"unknown membership kind {self.kind!r}")
        expected = _KIND_KNOTS[self.kind]
        if len(self.knots) != expected:
            raise ValueError(
                f"{self.kind} needs {expected} knots, got {len(self.knots)}"
            )
        if any(not math.isfinite(k) for k in self.knots):
            raise ValueError(f"knots must be finite: {self.knots}")
        if any(b < a for a, b in zip(self.knots, self.knots[1:])):
            raise ValueError(f"knots must be non-decreasing: {self.knots}")

    @classmethod
    def left_shoulder(cls, a: float, b: float) -> "MembershipFunction":
        return cls("left-shoulder", (a, b))

    @classmethod
    def right_shoulder(cls, a: float, b: float) -> "MembershipFunction":
        return cls("right-shoulder", (a, b))

    @classmethod
    def triangle(cls, a: float, b: float, c: float) -> "MembershipFunction":
        return cls("triangle", (a, b, c))

    @classmethod
    def trapezoid(cls, a: float, b: float, c: float, d: float) -> "MembershipFunction":
        return cls("trapezoid", (a, b, c, d))

    def __call__(self, x: float) -> float:
        k = self.knots
        if self.kind == "left-shoulder":
            return _ramp_down(x, k[0], k[1])
        if self.kind == "right-shoulder":
            return _ramp_up(x, k[0], k[1])
        if self.kind == "triangle":
            return min(_ramp_up(x, k[0], k[1]), _ramp_down(x, k[1], k[2]))
        return min(_ramp_up(x, k[0], k[1]), _ramp_down(x, k[2], k[3]))

    def support(self) -> tuple[float, float]:
        """Closure of {x : mu(x) > 0}. Shoulders extend to infinity."""
        k = self.knots
        if self.kind == "left-shoulder":
            return (-math.inf, k[-1])
        if self.kind == "right-shoulder":
            return (k[0], math.inf)
        return (k[0], k[-1])


def eval_membership(mf: MembershipFunction, x: float) -> float:
    """Evaluate a membership function at a non-negative, finite input."""
    if not math.isfinite(x) or x < 0:
        raise ValueError(f"input must be finite and >= 0, got {x}")
    return mf(x)


@dataclass(frozen=True)
class Breakpoints:
    """Ordered thresholds carving the load-index axis into five fuzzy sets.

    The universe runs from 0 to w; s doubles as the heavy-node threshold and
    as the peak of the moderate set.
    """

    p: float
    q: float
    r: float
    s: float
    t: float
    u: float
    v: float
    w: float

    def __post_init__(self) -> None:
        values = self.as_tuple()
        if any(not math.isfinite(x) for x in values):
            raise ValueError(f"breakpoints must be finite: {values}")
        if values[0] < 0:
            raise ValueError(f"breakpoints must be non-negative: {values}")
        if any(b < a for a, b in zip(values, values[1:])):
            raise ValueError(f"breakpoints must be non-decreasing: {values}")

    def as_tuple(self) -> tuple[float, ...]:
        return (self.p, self.q, self.r, self.s, self.t, self.u, self.v, self.w)

    @classmethod
    def from_string(cls, text: str) -> "Breakpoints":
        parts = [part.strip() for part in text.split(",")]
        if len(parts) != 8:
            raise ValueError(f"expected 8 comma-separated breakpoints, got {text!r}")
        try:
            return cls(*(float(part) for part in parts))
        except ValueError as exc:
            raise ValueError(f"bad breakpoints {text!r}: {exc}") from exc

    def to_string(self) -> str:
        return ",".join(format(x, "g") for x in self.as_tuple())


DEFAULT_BREAKPOINTS = Breakpoints(0, 1, 2, 3, 4, 5, 6, 20)


def load_sets(bp: Breakpoints) -> dict[str, MembershipFunction]:
    """The five load-index sets induced by a set of breakpoints."""
    return {
        "very-light": MembershipFunction.left_shoulder(bp.p, bp.q),
        "light": MembershipFunction.trapezoid(bp.p, bp.q, bp.r, bp.s),
        "moderate": MembershipFunction.triangle(bp.r, bp.s, bp.t),
        "heavy": MembershipFunction.trapezoid(bp.s, bp.t, bp.u, bp.v),
        "very-heavy": MembershipFunction.right_shoulder(bp.u, bp.v),
    }


def fuzzify_load(load: float, bp: Breakpoints) -> dict[str, float]:
    """Membership degree of a load index in each of the five load sets.

    Loads above w clamp to w so that unbounded queue lengths stay inside the
    universe; negative loads are rejected.
    """
    if not math.isfinite(load) or load < 0:
        raise ValueError(f"load must be finite and >= 0, got {load}")
    x = min(load, bp.w)
    return {name: mf(x) for name, mf in load_sets(bp).items()}


@dataclass(frozen=True)
class HeavyCountPartition:
    """Two-set partition (less / moreequal) of the heavy-node count axis."""

    pN: float
    qN: float
    rN: float

    def __post_init__(self) -> None:
        values = (self.pN, self.qN, self.rN)
        if any(not math.isfinite(x) for x in values):
            raise ValueError(f"partition knots must be finite: {values}")
        if values[0] < 0 or any(b < a for a, b in zip(values, values[1:])):
            raise ValueError(f"partition knots must satisfy 0 <= pN <= qN <= rN: {values}")

    @classmethod
    def default_for(cls, n: int) -> "HeavyCountPartition":
        """Evenly spread knots over a system of n nodes."""
        if n < 1:
            raise ValueError(f"need at least one node, got {n}")
        return cls(math.ceil(0.2 * n), math.ceil(0.4 * n), math.ceil(0.6 * n))

    def to_string(self) -> str:
        return ",".join(format(x, "g") for x in (self.pN, self.qN, self.rN))

    @classmethod
    def from_string(cls, text: str) -> "HeavyCountPartition":
        parts = [part.strip() for part in text.split(",")]
        if len(parts) != 3:
            raise ValueError(f"expected 3 comma-separated knots, got {text!r}")
        return cls(*(float(part) for part in parts))


def count_sets(hp: HeavyCountPartition) -> dict[str, MembershipFunction]:
    return {
        "less": MembershipFunction.left_shoulder(hp.pN, hp.qN),
        "moreequal": MembershipFunction.right_shoulder(hp.qN, hp.rN),
    }


def fuzzify_heavy_count(heavy_count: float, hp: HeavyCountPartition) -> dict[str, float]:
    """Membership degree of a heavy-node count in the less/moreequal sets."""
    if not math.isfinite(heavy_count) or heavy_count < 0:
        raise ValueError(f"heavy count must be finite and >= 0, got {heavy_count}")
    return {name: mf(heavy_count) for name, mf in count_sets(hp).items()}


@dataclass(frozen=True)
class FuzzyRule:
    """One rule: antecedent terms over (load, heavy count), one consequent.

    Either antecedent may be the wildcard "any", which contributes a degree
    of 1. The consequent is always sender or receiver; neutral only ever
    arises downstream, when no rule fires or no migration partner exists.
    """

    load_term: str
    count_term: str
    consequent: NodeStatus

    def __post_init__(self) -> None:
        if self.load_term not in LOAD_TERMS and self.load_term != ANY:
            raise ValueError(f"unknown load term {self.load_term!r}")
        if self.count_term not in COUNT_TERMS and self.count_term != ANY:
            raise ValueError(f"unknown count term {self.count_term!r}")
        if self.consequent not in (NodeStatus.SENDER, NodeStatus.RECEIVER):
            raise ValueError("rule consequent must be sender or receiver")


DEFAULT_RULES: tuple[FuzzyRule, ...] = (
    FuzzyRule("very-light", ANY, NodeStatus.RECEIVER),
    FuzzyRule("very-heavy", ANY, NodeStatus.SENDER),
    FuzzyRule("heavy", "moreequal", NodeStatus.RECEIVER),
    FuzzyRule("heavy", "less", NodeStatus.SENDER),
    FuzzyRule("light", "less", NodeStatus.SENDER),
    FuzzyRule("light", "moreequal", NodeStatus.RECEIVER),
    FuzzyRule("moderate", "moreequal", NodeStatus.RECEIVER),
    FuzzyRule("moderate", "less", NodeStatus.SENDER),
)


def parse_rule(text: str) -> FuzzyRule:
    """Parse "load_term & count_term -> consequent" (terms may be "any")."""
    head, sep, consequent = text.partition("->")
    if not sep:
        raise ValueError(f"rule {text!r} is missing '->'")
    terms = [part.strip() for part in head.split("&")]
    if len(terms) == 1:
        terms.append(ANY)
    if len(terms) != 2:
        raise ValueError(f"rule {text!r} must have one or two antecedent terms")
    status = consequent.strip()
    try:
        return FuzzyRule(terms[0], terms[1], NodeStatus(status))
    except ValueError as exc:
        raise ValueError(f"bad rule {text!r}: {exc}") from exc


def format_rule(rule: FuzzyRule) -> str:
    return f"{rule.load_term} & {rule.count_term} -> {rule.consequent.value}"


@dataclass(frozen=True)
class InferenceResult:
    activation_receiver: float
    activation_sender: float
    centroid: float | None = None
    status: NodeStatus | None = None


def infer(
    load_degrees: Mapping[str, float],
    count_degrees: Mapping[str, float],
    rules: tuple[FuzzyRule, ...],
) -> InferenceResult:
    """Mamdani min/max inference: per-rule strength is the min of its
    antecedent degrees, per-consequent activation the max over its rules."""
    if not rules:
        raise ValueError("empty rule base")
    activation = {NodeStatus.RECEIVER: 0.0, NodeStatus.SENDER: 0.0}
    for rule in rules:
        strength = 1.0
        if rule.load_term != ANY:
            strength = min(strength, load_degrees[rule.load_term])
        if rule.count_term != ANY:
            strength = min(strength, count_degrees[rule.count_term])
        activation[rule.consequent] = max(activation[rule.consequent], strength)
    return InferenceResult(
        activation_receiver=activation[NodeStatus.RECEIVER],
        activation_sender=activation[NodeStatus.SENDER],
    )


@dataclass(frozen=True)
class OutputPartition:
    """Receiver / neutral / sender sets over the [0, 1] output universe."""

    receiver: MembershipFunction
    neutral: MembershipFunction
    sender: MembershipFunction

    def __post_init__(self) -> None:
        spans = [_clip_span(mf.support()) for mf in (self.receiver, self.neutral, self.sender)]
        centers = [(lo + hi) / 2 for lo, hi in spans]
        if not (centers[0] < centers[1] < centers[2]):
            raise ValueError("output sets must be ordered receiver < neutral < sender")
        spans.sort()
        reach = spans[0][1]
        if spans[0][0] > 0.0:
            raise ValueError("output sets leave a gap at the low end of [0, 1]")
        for lo, hi in spans[1:]:
            if lo > reach:
                raise ValueError(f"output sets leave a gap near {reach:g}")
            reach = max(reach, hi)
        if reach < 1.0:
            raise ValueError("output sets leave a gap at the high end of [0, 1]")


def _clip_span(span: tuple[float, float]) -> tuple[float, float]:
    return (max(span[0], 0.0), min(span[1], 1.0))


DEFAULT_OUTPUT = OutputPartition(
    receiver=MembershipFunction.triangle(0.0, 0.0, 0.5),
    neutral=MembershipFunction.triangle(0.25, 0.5, 0.75),
    sender=MembershipFunction.triangle(0.5, 1.0, 1.0),
)


def _level_crossings(
    mf: MembershipFunction, level: float, lo: float, hi: float
) -> list[float]:
    # x positions strictly inside (lo, hi) where mu(x) crosses the clip level
    if level <= 0.0 or level >= 1.0:
        return []
    anchors = sorted({lo, hi, *(k for k in mf.knots if lo < k < hi)})
    crossings = []
    for x0, x1 in zip(anchors, anchors[1:]):
        width = x1 - x0
        if width <= 0.0:
            continue
        fa = mf(x0 + width / 3)
        fb = mf(x0 + 2 * width / 3)
        slope = 3.0 * (fb - fa) / width
        if slope == 0.0:
            continue
        intercept = fa - slope * (x0 + width / 3)
        xc = (level - intercept) / slope
        if x0 < xc < x1:
            crossings.append(xc)
    return crossings


def _aggregate_centroid(
    clipped: list[tuple[MembershipFunction, float]], lo: float, hi: float
) -> float:
    """Centroid of max_i min(mu_i(x), level_i) over [lo, hi], in closed form.

    The aggregate is piecewise linear. Its slope can change only at a set's
    knot, where a set meets its clip level, or where two clipped sets cross;
    collecting those points and integrating each linear piece exactly gives
    the centroid without any grid. Pieces are reconstructed from two interior
    samples so that left-continuous steps at degenerate knots cannot skew an
    endpoint value.
    """
    cuts = {lo, hi}
    for mf, level in clipped:
        cuts.update(k for k in mf.knots if lo < k < hi)
        cuts.update(_level_crossings(mf, level, lo, hi))

    def value(x: float) -> float:
        return max(min(mf(x), level) for mf, level in clipped)

    area = 0.0
    moment = 0.0
    base = sorted(cuts)
    for x0, x1 in zip(base, base[1:]):
        width = x1 - x0
        if width <= 0.0:
            continue
        lines = []
        for mf, level in clipped:
            fa = min(mf(x0 + width / 3), level)
            fb = min(mf(x0 + 2 * width / 3), level)
            slope = 3.0 * (fb - fa) / width
            lines.append((slope, fa - slope * (x0 + width / 3)))
        inner = {x0, x1}
        for i in range(len(lines)):
            for j in range(i + 1, len(lines)):
                mi, ci = lines[i]
                mj, cj = lines[j]
                if mi != mj:
                    xc = (cj - ci) / (mi - mj)
                    if x0 < xc < x1:
                        inner.add(xc)
        pts = sorted(inner)
        for y0, y1 in zip(pts, pts[1:]):
            w = y1 - y0
            if w <= 0.0:
                continue
            ga = value(y0 + w / 3)
            gb = value(y0 + 2 * w / 3)
            slope = 3.0 * (gb - ga) / w
            g0 = ga - slope * (w / 3)
            g1 = gb + slope * (w / 3)
            area += 0.5 * (g0 + g1) * w
            moment += w * (g0 * (2 * y0 + y1) + g1 * (y0 + 2 * y1)) / 6.0
    if area <= 0.0:
        raise NoRuleFired("no rule fired")
    return moment / area


def defuzzify_centroid(result: InferenceResult, out: OutputPartition) -> float:
    """Crisp output: centroid of the clipped-and-max-aggregated output sets.

    Receiver is clipped at its activation, sender at its, neutral at zero
    (no rule ever concludes neutral). Raises NoRuleFired when both
    activations are zero; the caller maps that to a neutral status.
    """
    if result.activation_receiver <= 0.0 and result.activation_sender <= 0.0:
        raise NoRuleFired("no rule fired")
    clipped = [
        (out.receiver, result.activation_receiver),
        (out.neutral, 0.0),
        (out.sender, result.activation_sender),
    ]
    return _aggregate_centroid(clipped, 0.0, 1.0)


def classify_status(centroid: float, neutral_band: float = 0.05) -> NodeStatus:
    """Map a crisp output in [0, 1] to a status, with a neutral band around 0.5."""
    if centroid < 0.5 - neutral_band:
        return NodeStatus.RECEIVER
    if centroid > 0.5 + neutral_band:
        return NodeStatus.SENDER
    return NodeStatus.NEUTRAL


@dataclass(frozen=True)
class FuzzyEngine:
    """Everything needed to turn (load, heavy count) into a node status."""

    breakpoints: Breakpoints = DEFAULT_BREAKPOINTS
    heavy_partition: HeavyCountPartition = HeavyCountPartition.default_for(5)
    rules: tuple[FuzzyRule, ...] = DEFAULT_RULES
    output: OutputPartition = DEFAULT_OUTPUT
    neutral_band: float = 0.05

    def evaluate(self, load: float, heavy_count: float) -> InferenceResult:
        """Run the full pipeline. When no rule fires the centroid stays None
        and the status is neutral."""
        load_degrees = fuzzify_load(load, self.breakpoints)
        count_degrees = fuzzify_heavy_count(heavy_count, self.heavy_partition)
        result = infer(load_degrees, count_degrees, self.rules)
        try:
            centroid = defuzzify_centroid(result, self.output)
        except NoRuleFired:
            return replace(result, status=NodeStatus.NEUTRAL)
        return replace(
            result,
            centroid=centroid,
            status=classify_status(centroid, self.neutral_band),
        )


@lru_cache(maxsize=65536)
def cached_status(engine: FuzzyEngine, load: float, heavy_count: float) -> NodeStatus:
    """Memoized status lookup; loads in the simulator are small integers, so
    the same (load, count) pairs recur constantly."""
    return engine.evaluate(load, heavy_count).status
