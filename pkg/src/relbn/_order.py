import re

_DIGITS = re.compile(r"(\d+)")


def natural_key(name):
    """Sort key that orders ``u2`` before ``u10``."""
    return tuple(int(tok) if tok.isdigit() else tok for tok in _DIGITS.split(str(name)))


def sort_names(names):
    return sorted(names, key=natural_key)


def ordered(names, order):
    """Return ``names`` as a tuple following the position of each name in ``order``."""
    pos = {n: i for i, n in enumerate(order)}
    return tuple(sorted(set(names), key=lambda n: (pos.get(n, len(pos)), natural_key(n))))
