"""Decay-rate estimation for gamma and delta sequences, plus inequality checks.

Conventions used throughout:

* rates are -log(value)/n with the natural log; a log2 display rescale, if
  any, is the caller's job,
* limsup / liminf at finite n are approximated by the max / min over a tail
  window holding the largest ceil(tail_fraction * N) indices,
* a least-squares line of -log(value) against n over the same window gives a
  second rate estimate whose intercept absorbs constant prefactors
  (gamma1 * lambda^-floor(n/2) style sequences fit cleanly),
* every inequality check records an explicit slack and the caveats that
  qualify its direction, instead of silently widening tolerances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

INF = float("inf")

KINDS = ("exact", "upper", "lower", "estimate")

# fixed evaluation order of verification checks
CHECK_ORDER = (
    "expansive_vs_lebesgue",
    "entropy_dimension_bound",
    "sft_identity",
    "lipschitz_cap",
    "torus_half_entropy",
    "power_scaling",
)


@dataclass(frozen=True)
class GammaSequence:
    """Per-n values of gamma(f^n) (or delta_n), tagged by how they bound truth.

    kind is one of "exact", "upper", "lower", "estimate" and is uniform for
    the whole sequence. Values are positive; +inf is the sentinel for
    vacuously expansive (single-point) systems.
    """

    entries: dict[int, float]
    kind: str
    source: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.entries:
            raise ValueError("empty sequence")
        for n, v in self.entries.items():
            if not isinstance(n, int) or n < 1:
                raise ValueError(f"indices must be positive integers, got {n!r}")
            if not (v > 0.0):
                raise ValueError(f"values must be positive, got {v!r} at n={n}")

    def finite_items(self) -> list[tuple[int, float]]:
        return sorted((n, v) for n, v in self.entries.items() if v != INF)

    def has_sentinel(self) -> bool:
        return any(v == INF for v in self.entries.values())


@dataclass(frozen=True)
class DecayEstimate:
    """Tail-window estimate of the exponential decay rate of a sequence."""

    rate_points: dict[int, float]
    hE_minus_est: float
    hE_plus_est: float
    regression_slope: float
    regression_intercept: float
    tail_fraction: float
    window: tuple[int, int]
    kind: str
    caveats: tuple[str, ...] = ()

    @property
    def spread(self) -> float:
        return self.hE_plus_est - self.hE_minus_est


def _tail_window(ns: list[int], tail_fraction: float) -> list[int]:
    # largest ceil(frac * N) indices
    w = math.ceil(tail_fraction * len(ns))
    return sorted(ns)[-w:]


def _least_squares(xs: list[float], ys: list[float]) -> tuple[float, float]:
    n = len(xs)
    if n == 1:
        return 0.0, ys[0]
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    sxy = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx
    return slope, my - slope * mx


def decay_estimate(seq: GammaSequence, tail_fraction: float = 0.5) -> DecayEstimate:
    """Turn a gamma (or delta) sequence into finite-n rate estimates.

    Needs at least 4 finite entries; +inf sentinels are excluded from the
    rate points and flagged as a caveat rather than contributing a rate.
    """
    if not (0.0 < tail_fraction < 1.0):
        raise ValueError("tail_fraction must lie in (0, 1)")
    caveats = []
    if seq.has_sentinel():
        caveats.append(
            "vacuous expansiveness: +inf entries excluded from rate points"
        )
    finite = seq.finite_items()
    if len(finite) < 4:
        raise ValueError(
            f"need at least 4 finite entries for a rate estimate, got {len(finite)}"
        )
    rate_points = {n: -math.log(v) / n for n, v in finite}
    win = _tail_window([n for n, _ in finite], tail_fraction)
    window_rates = [rate_points[n] for n in win]
    hE_minus = min(window_rates)
    hE_plus = max(window_rates)
    slope, intercept = _least_squares(
        [float(n) for n in win], [n * rate_points[n] for n in win]
    )
    return DecayEstimate(
        rate_points=rate_points,
        hE_minus_est=hE_minus,
        hE_plus_est=hE_plus,
        regression_slope=slope,
        regression_intercept=intercept,
        tail_fraction=tail_fraction,
        window=(win[0], win[-1]),
        kind=seq.kind,
        caveats=tuple(caveats),
    )


@dataclass(frozen=True)
class CheckRecord:
    """One verified inequality: left op right with recorded slack."""

    name: str
    inputs: str
    inequality: str
    left: float
    right: float
    passed: bool
    slack: float = 0.0
    caveats: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "inputs": self.inputs,
            "inequality": self.inequality,
            "left": self.left,
            "right": self.right,
            "passed": self.passed,
            "slack": self.slack,
            "caveats": list(self.caveats),
        }


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[CheckRecord, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }


# relative float guard for >= / <= comparisons that may land on exact equality
_EQ_EPS = 1e-12


def _ge(left: float, right: float) -> bool:
    return left >= right - _EQ_EPS * max(1.0, abs(right))


def _le(left: float, right: float) -> bool:
    return left <= right + _EQ_EPS * max(1.0, abs(right))


def power_scaling_check(
    base: GammaSequence,
    power: GammaSequence,
    n: int,
    tail_fraction: float = 0.5,
) -> CheckRecord:
    """Check hE_plus(f^n) <= n*hE_plus(f) + slack on finite sequences.

    The power sequence is indexed by k and holds values for (f^n)^k, so the
    base sequence must contain the index n*k for every k present. The
    companion lower-rate form hE_minus(f^n) >= n*hE_minus(f) - slack is
    checked alongside; a self-referential variant of that display is vacuous
    and is treated as a misprint. Slack is 2*(spread(power) + n*spread(base)),
    both spreads over the respective tail windows.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if base.kind != power.kind:
        raise ValueError(
            f"kind mismatch: base {base.kind!r} vs power {power.kind!r}"
        )
    missing = [k for k in power.entries if n * k not in base.entries]
    if missing:
        raise ValueError(
            f"index mismatch: base lacks n*k for k={sorted(missing)} (n={n})"
        )
    db = decay_estimate(base, tail_fraction)
    dp = decay_estimate(power, tail_fraction)
    slack = 2.0 * (dp.spread + n * db.spread)
    left = dp.hE_plus_est
    right = n * db.hE_plus_est + slack
    up_ok = _le(left, right)
    lo_ok = _ge(dp.hE_minus_est, n * db.hE_minus_est - slack)
    caveats = [
        f"companion lower-rate form: {dp.hE_minus_est:.6g} >= "
        f"{n}*{db.hE_minus_est:.6g} - {slack:.6g} -> {lo_ok}",
    ]
    if base.kind != "exact":
        caveats.append(f"sequences are kind {base.kind!r}, rates are not exact")
    return CheckRecord(
        name="power_scaling",
        inputs=f"base={base.source or 'gamma(f^k)'}, power={power.source or 'gamma(f^nk)'}, n={n}",
        inequality="hE_plus(f^n) <= n*hE_plus(f) + slack",
        left=left,
        right=right,
        passed=up_ok and lo_ok,
        slack=slack,
        caveats=tuple(caveats),
    )


def _require(inputs: dict, key: str, check: str):
    if key not in inputs:
        raise ValueError(f"check {check!r} is missing required input {key!r}")
    return inputs[key]


def _check_expansive_vs_lebesgue(inp: dict, tail_fraction: float) -> CheckRecord:
    gamma: GammaSequence = _require(inp, "gamma", "expansive_vs_lebesgue")
    delta: GammaSequence = _require(inp, "delta", "expansive_vs_lebesgue")
    caveats = []
    shared = sorted(set(gamma.entries) & set(delta.entries))
    if not shared:
        raise ValueError("expansive_vs_lebesgue: no shared indices")
    finite_ok = True
    bad = []
    for k in shared:
        g, d = gamma.entries[k], delta.entries[k]
        if d == INF:
            # an element covers the whole space; nothing to dominate
            continue
        if not _ge(g, d):
            finite_ok = False
            bad.append(k)
    if bad:
        caveats.append(f"finite-n failures at n={bad}")
    diam = inp.get("cover_max_diameter")
    g1 = inp.get("gamma1")
    if diam is not None and g1 is not None:
        if not diam < g1:
            caveats.append(
                f"hypothesis violated: cover diameter {diam:.6g} >= gamma(f) bound {g1:.6g}"
            )
            finite_ok = False
    else:
        caveats.append("cover-diameter hypothesis not supplied, not checked")
    dg = decay_estimate(gamma, tail_fraction)
    dd = decay_estimate(delta, tail_fraction)
    slack = dg.spread + dd.spread
    left = dg.hE_plus_est
    right = dd.hE_plus_est + slack
    rate_ok = _le(left, right)
    caveats.append(
        "delta_n is itself an expansive constant for the n-th power, so "
        "gamma(f^n) >= delta_n; the reversed direction is inconsistent with "
        "the covering argument and is not checked"
    )
    return CheckRecord(
        name="expansive_vs_lebesgue",
        inputs=f"gamma={gamma.source or gamma.kind}, delta={delta.source or delta.kind}, "
        f"shared n={shared[0]}..{shared[-1]}",
        inequality="gamma(f^n) >= delta_n for shared n; hE_plus <= hL_plus + slack",
        left=left,
        right=right,
        passed=finite_ok and rate_ok,
        slack=slack,
        caveats=tuple(caveats),
    )


def _check_entropy_dimension_bound(inp: dict, tail_fraction: float) -> CheckRecord:
    gamma: GammaSequence = _require(inp, "gamma", "entropy_dimension_bound")
    dim = float(_require(inp, "dimension", "entropy_dimension_bound"))
    ent = float(_require(inp, "entropy", "entropy_dimension_bound"))
    if gamma.kind == "upper":
        raise ValueError(
            "entropy_dimension_bound: an upper-bound gamma sequence "
            "under-estimates the rate, the lower bound would be vacuous"
        )
    d = decay_estimate(gamma, tail_fraction)
    caveats = list(d.caveats)
    if gamma.kind == "exact":
        slack = d.spread * dim
        caveats.append(
            "slack is the finite-n tail spread times the dimension; exact "
            "sequences make the bound an equality for full shifts at even n_max"
        )
    else:
        slack = 0.0
        caveats.append(
            f"kind {gamma.kind!r}: rate points over-estimate the true rate, a "
            "pass is consistency and a failure would falsify"
        )
    left = d.hE_minus_est * dim
    right = ent - slack
    return CheckRecord(
        name="entropy_dimension_bound",
        inputs=f"gamma={gamma.source or gamma.kind}, dim={dim:.6g}, entropy={ent:.6g}",
        inequality="hE_minus * dim >= entropy - slack",
        left=left,
        right=right,
        passed=_ge(left, right),
        slack=slack,
        caveats=tuple(caveats),
    )


def _check_sft_identity(inp: dict, tail_fraction: float) -> CheckRecord:
    gamma: GammaSequence = _require(inp, "gamma", "sft_identity")
    dim = float(_require(inp, "dimension", "sft_identity"))
    ent = float(_require(inp, "entropy", "sft_identity"))
    tol = float(inp.get("tolerance", 0.02))
    if gamma.kind != "exact":
        raise ValueError("sft_identity needs an exact gamma sequence")
    d = decay_estimate(gamma, tail_fraction)
    left = d.hE_plus_est * dim
    return CheckRecord(
        name="sft_identity",
        inputs=f"gamma={gamma.source or 'exact'}, dim={dim:.6g}, entropy={ent:.6g}",
        inequality=f"|hE_plus * dim - entropy| <= {tol:.3g}*entropy",
        left=left,
        right=ent,
        passed=abs(left - ent) <= tol * ent,
        slack=tol * ent,
        caveats=(),
    )


def _check_lipschitz_cap(inp: dict, tail_fraction: float) -> CheckRecord:
    gamma: GammaSequence = _require(inp, "gamma", "lipschitz_cap")
    L = float(_require(inp, "L", "lipschitz_cap"))
    L_inv = float(_require(inp, "L_inv", "lipschitz_cap"))
    if not (L > 1.0 and L_inv > 1.0):
        raise ValueError("lipschitz_cap needs L > 1 and L_inv > 1")
    if gamma.kind == "upper":
        raise ValueError(
            "lipschitz_cap: an upper-bound gamma sequence under-estimates the "
            "rate, the cap comparison would be vacuous"
        )
    cap = math.log(L) * math.log(L_inv) / (math.log(L) + math.log(L_inv))
    d = decay_estimate(gamma, tail_fraction)
    caveats = list(d.caveats)
    if gamma.kind == "exact":
        est = d.hE_plus_est
        label = "hE_plus_est"
    else:
        est = d.regression_slope
        label = "regression_slope"
        caveats.append(
            "regression slope used: the intercept absorbs the constant "
            "prefactor of a bound sequence that tail maxima cannot shed"
        )
        if gamma.kind == "estimate":
            caveats.append("kind 'estimate': rate direction not controlled")
    slack = d.spread
    return CheckRecord(
        name="lipschitz_cap",
        inputs=f"gamma={gamma.source or gamma.kind}, L={L:.6g}, L_inv={L_inv:.6g}",
        inequality=f"{label} <= log(L)*log(L_inv)/(log(L)+log(L_inv)) + slack",
        left=est,
        right=cap + slack,
        passed=_le(est, cap + slack),
        slack=slack,
        caveats=tuple(caveats),
    )


def _check_torus_half_entropy(inp: dict, tail_fraction: float) -> CheckRecord:
    lower: GammaSequence = _require(inp, "lower", "torus_half_entropy")
    upper: GammaSequence = _require(inp, "upper", "torus_half_entropy")
    ent = float(_require(inp, "entropy", "torus_half_entropy"))
    tol = float(inp.get("tolerance", 0.15))
    if lower.kind != "lower" or upper.kind != "upper":
        raise ValueError("torus_half_entropy needs a lower and an upper sequence")
    target = ent / 2.0
    shared = sorted(set(lower.entries) & set(upper.entries))
    sandwich_bad = [
        k for k in shared if not _le(lower.entries[k], upper.entries[k])
    ]
    dl = decay_estimate(lower, tail_fraction)
    du = decay_estimate(upper, tail_fraction)
    est = dl.regression_slope
    caveats = [
        "estimator is the lower-bound-sequence regression slope; the "
        "intercept absorbs the certified gamma1 prefactor",
        f"upper-bound-sequence slope {du.regression_slope:.6g}: fixed-grid "
        "upper bounds saturate at lattice values, their fitted rate is not "
        "informative and is reported here only",
    ]
    if sandwich_bad:
        caveats.append(f"sandwich lower <= upper violated at n={sandwich_bad}")
    passed = abs(est - target) <= tol * target and not sandwich_bad
    return CheckRecord(
        name="torus_half_entropy",
        inputs=f"lower={lower.source or 'lower'}, upper={upper.source or 'upper'}, "
        f"entropy={ent:.6g}",
        inequality=f"|slope(lower) - entropy/2| <= {tol:.3g}*entropy/2; lower <= upper pointwise",
        left=est,
        right=target,
        passed=passed,
        slack=tol * target,
        caveats=tuple(caveats),
    )


_CHECKS = {
    "expansive_vs_lebesgue": _check_expansive_vs_lebesgue,
    "entropy_dimension_bound": _check_entropy_dimension_bound,
    "sft_identity": _check_sft_identity,
    "lipschitz_cap": _check_lipschitz_cap,
    "torus_half_entropy": _check_torus_half_entropy,
}


def verify_report(bundle: dict, tail_fraction: float = 0.5) -> VerificationReport:
    """Evaluate the checks named by the bundle keys, in a fixed order.

    bundle maps check names to their input dicts; see the individual check
    helpers for the required keys. Unknown names and missing inputs raise.
    Evaluation is pure: the same bundle gives an identical report.
    """
    unknown = set(bundle) - set(CHECK_ORDER)
    if unknown:
        raise ValueError(f"unknown checks requested: {sorted(unknown)}")
    records = []
    for name in CHECK_ORDER:
        if name not in bundle:
            continue
        if name == "power_scaling":
            inp = bundle[name]
            records.append(
                power_scaling_check(
                    _require(inp, "base", name),
                    _require(inp, "power", name),
                    int(_require(inp, "n", name)),
                    tail_fraction,
                )
            )
        else:
            records.append(_CHECKS[name](bundle[name], tail_fraction))
    return VerificationReport(checks=tuple(records))
