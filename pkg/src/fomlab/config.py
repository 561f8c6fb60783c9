"""Default numerical tolerances.

Every tolerance can be overridden through the ``FOMLAB_TOL`` environment
variable, a comma separated list of ``name=value`` pairs, e.g.
``FOMLAB_TOL="psd=1e-9,exact=1e-8"``.
"""
import os

from .errors import ParameterError

DEFAULTS = {
    # oracle invariant probes (relative slack)
    "probe": 1e-10,
    # equality constraints of a dual certificate
    "equality": 1e-12,
    # PSD factorization, relative to max(1, ||S||_F)
    "psd": 1e-10,
    # absolute slack in the diagonal-dominance witness
    "dominance": 1e-12,
    # agreement of the two S constructions
    "assembly": 1e-12,
    # worst-case exactness (relative)
    "exact": 1e-9,
    # theta recursion identities (relative to theta^2)
    "theta": 1e-12,
    # IFC equality at construction (relative)
    "ifc": 1e-12,
}


def parse_overrides(text):
    """Parse ``name=value,...`` into a dict of floats."""
    out = {}
    if not text:
        return out
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or name not in DEFAULTS:
            raise ParameterError(f"bad tolerance override {item!r}; known names: {sorted(DEFAULTS)}")
        try:
            out[name] = float(value)
        except ValueError as exc:
            raise ParameterError(f"tolerance {name} is not a number: {value!r}") from exc
    return out


def tolerance(name):
    """Current value of tolerance ``name`` (env overrides applied)."""
    overrides = parse_overrides(os.environ.get("FOMLAB_TOL", ""))
    return overrides.get(name, DEFAULTS[name])
