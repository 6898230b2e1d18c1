import math


def rel_err(a, b):
    """Relative difference with a zero-safe scale."""
    diff = abs(a - b)
    scale = max(abs(a), abs(b))
    return diff / scale if scale > 0.0 else 0.0


def floored_rel_err(a, b, floor):
    """Relative difference that ignores cancellation noise below `floor`."""
    return abs(a - b) / max(abs(a), abs(b), floor)


def angle_dist_mod_pi(a, b):
    """Distance between two angles identified modulo pi."""
    d = math.fmod(a - b, math.pi)
    if d < 0.0:
        d += math.pi
    return min(d, math.pi - d)
