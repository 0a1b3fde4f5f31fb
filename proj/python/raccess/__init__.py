"""Forward accessibility of rational discrete-time control systems."""

from fractions import Fraction
from pathlib import Path

from . import _core
from ._core import DegeneracyError, ParseError, PoleError, ResourceError, System, __version__

__all__ = [
    "System",
    "load",
    "analyze",
    "generically_accessible",
    "submersive",
    "point_status",
    "simulate",
    "jacobian_rank",
    "run",
    "ParseError",
    "ResourceError",
    "PoleError",
    "DegeneracyError",
]


def _exact(value):
    if isinstance(value, float):
        raise TypeError("exact values must be int, Fraction or str, not float")
    return str(Fraction(value)) if not isinstance(value, str) else value


def load(path, **params):
    """Reads a system file; keyword arguments bind parameters exactly."""
    system = System.from_text(Path(path).read_text())
    return system.bind({k: _exact(v) for k, v in params.items()}) if params else system


def analyze(system, max_k=0, exact_radical=False, confirm=False):
    return _core.analyze(system, max_k, exact_radical, confirm)


def generically_accessible(system):
    return _core.generically_accessible(system)


def submersive(system):
    return _core.submersive(system)


def point_status(system, x, k):
    return _core.point_status(system, [_exact(v) for v in x], k)


def simulate(system, x0, inputs):
    return _core.simulate(system, [float(v) for v in x0], [[float(c) for c in u] for u in inputs])


def jacobian_rank(system, x0, k, samples=64, tol=1e-8):
    return _core.jacobian_rank(system, [float(v) for v in x0], k, samples, tol)


def run(*args):
    """Command-line entry point; returns (exit code, stdout, stderr)."""
    return _core.run([str(a) for a in args])
