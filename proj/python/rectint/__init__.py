"""Parametric p-adic rectilinearization and exact Igusa-type integration."""

from _rectint import (  # noqa: F401
    PAdic,
    Session,
    add,
    audit,
    from_int,
    hensel_lift,
    integrate,
    inv,
    member_pn,
    member_rk,
    mul,
    nth_root,
    oracle_compare,
    pow,
    rectify,
    verify,
)

__all__ = [
    "PAdic", "Session", "add", "audit", "from_int", "hensel_lift", "integrate",
    "inv", "member_pn", "member_rk", "mul", "nth_root", "oracle_compare",
    "pow", "rectify", "verify",
]
