"""Assemble upper and lower bounds on the optimal keyed message length.

Every bound carries a machine-readable applicability tag and the key size
it is stated for, so consumers (and the consistency checks) only compare
bounds that actually apply together.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import dist
from .dist import JointDistribution
from .linalg import rank_and_nullity
from .mechanism import MechanismBounds, x_is_function_of_y

ALWAYS = "always"
REQ_DET = "requires: X=f(Y)"
REQ_MEMBER = "requires: member_Phat"
REQ_SMALL_Y = "requires: |Y|<=|X|"
REQ_CONVERSE = "requires: I(X;C)=0, H(Y|X,C)=0, X-Y-C"


@dataclass(frozen=True)
class BoundEntry:
    name: str
    bits: float
    applicability: str
    key_size: int


@dataclass(frozen=True)
class BoundsReport:
    upper: list[BoundEntry]
    lower: list[BoundEntry]
    prior_upper: list[tuple[str, float]]
    improvement_flags: dict[str, bool]
    nonexistence: bool
    achieved: float | None = None
    notes: list[str] = field(default_factory=list)


def _ceil_log2(n: int) -> int:
    return (n - 1).bit_length() if n >= 1 else 0


def upper_bounds(
    d: JointDistribution,
    mech_bounds: MechanismBounds | None,
    achieved_hu: float | None,
) -> list[BoundEntry]:
    """All achievable-length upper bounds that apply to this joint.

    The two mechanism-entropy bounds use the synthesized H(U*) as a stand-in
    for the (unknown) minimum over all admissible disclosures, and say so in
    their names; the rest are closed-form.
    """
    t, q = d.x_size, d.y_size
    logx = _ceil_log2(t)
    sum_h = float(sum(dist.conditional_entropy_per_x(d, x) for x in range(t)))
    closed = 1.0 + min(sum_h, float(np.ceil(np.log2(t * (q - 1) + 1) - 1.0))) + logx
    out = []
    if achieved_hu is not None:
        out.append(
            BoundEntry("two_part_achieved_surrogate", achieved_hu + 1.0 + logx, REQ_MEMBER, t)
        )
        out.append(
            BoundEntry("min_entropy_surrogate", achieved_hu + 1.0 + logx, ALWAYS, t)
        )
    if mech_bounds is not None:
        out.append(
            BoundEntry(
                "lp_strengthened",
                mech_bounds.k_upper_strengthened + 1.0 + logx,
                REQ_MEMBER,
                t,
            )
        )
        out.append(
            BoundEntry(
                "nullity_log", mech_bounds.log_nullity_bound + 1.0 + logx, REQ_MEMBER, t
            )
        )
    out.append(BoundEntry("sum_conditional_entropy", closed, ALWAYS, t))
    if x_is_function_of_y(d):
        out.append(
            BoundEntry(
                "deterministic_prior", float(_ceil_log2(q - t + 1) + logx), REQ_DET, t
            )
        )
    if q <= t:
        out.append(BoundEntry("pad_y_direct", float(_ceil_log2(q)), REQ_SMALL_Y, q))
    return out


def lower_bounds(
    d: JointDistribution, key_size: int, member: bool = False, k_lower: float | None = None
) -> tuple[list[BoundEntry], bool]:
    """Converse bounds for the given key size, plus the nonexistence flag.

    The flag fires when X = f(Y) and the key alphabet is smaller than |X|:
    no zero-leakage lossless code exists at all in that regime.
    """
    det = x_is_function_of_y(d)
    out = [
        BoundEntry(
            "max_conditional_entropy",
            float(max(dist.conditional_entropy_per_x(d, x) for x in range(d.x_size))),
            ALWAYS,
            key_size,
        )
    ]
    nonexistence = bool(det and key_size < d.x_size)
    if det and key_size >= d.x_size:
        out.append(BoundEntry("log_x_size", float(np.log2(d.x_size)), REQ_DET, key_size))
    if member and k_lower is not None:
        out.append(BoundEntry("lp_conditional_converse", float(k_lower), REQ_CONVERSE, key_size))
    return out, nonexistence


def improvement_flags(
    d: JointDistribution, uppers: list[BoundEntry]
) -> dict[str, bool]:
    """The two comparison claims: padding Y beats the closed-form bound when
    |Y| <= |X|, and the achieved two-part bound beats the deterministic
    prior when X = f(Y)."""
    by_name = {e.name: e.bits for e in uppers}
    flags = {"small_y_improves": False, "member_improves": False}
    if "pad_y_direct" in by_name:
        flags["small_y_improves"] = bool(
            _ceil_log2(d.y_size) <= _ceil_log2(d.x_size)
            and by_name["pad_y_direct"] <= by_name["sum_conditional_entropy"] + 1e-9
        )
    if "two_part_achieved_surrogate" in by_name and "deterministic_prior" in by_name:
        flags["member_improves"] = bool(
            by_name["two_part_achieved_surrogate"] < by_name["deterministic_prior"]
        )
    return flags


def build_report(
    d: JointDistribution,
    mech_bounds: MechanismBounds | None = None,
    achieved_hu: float | None = None,
    key_size: int | None = None,
    member: bool = False,
    achieved_length: float | None = None,
) -> BoundsReport:
    m = key_size if key_size is not None else d.x_size
    uppers = upper_bounds(d, mech_bounds, achieved_hu)
    lowers, nonexistence = lower_bounds(
        d, m, member=member, k_lower=mech_bounds.k_lower if mech_bounds else None
    )
    prior = [(e.name, e.bits) for e in uppers if e.name in ("sum_conditional_entropy", "deterministic_prior")]
    notes = []
    _, nullity = rank_and_nullity(dist.kernel_x_given_y(d).k)
    if x_is_function_of_y(d):
        notes.append(f"nullity(P_X|Y) = |Y| - |X| = {nullity}")
    return BoundsReport(
        upper=uppers,
        lower=lowers,
        prior_upper=prior,
        improvement_flags=improvement_flags(d, uppers),
        nonexistence=nonexistence,
        achieved=achieved_length,
        notes=notes,
    )
