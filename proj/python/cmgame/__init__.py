"""Constrained Nash equilibria of absorbing Markov games.

Models, profiles and rho values may be given as file paths, JSON text, or
already-decoded Python objects in the file formats of the ``cmg`` tool.
Results come back as plain dicts and lists.
"""

import json
import os

from . import _cmgame
from ._cmgame import Error, GameModel

Error.code = property(lambda self: self.args[0], doc="Library error code name.")

__all__ = [
    "Error",
    "GameModel",
    "load_model",
    "load_discounted",
    "uniform_profile",
    "check_absorbing",
    "uniform_absorption_bound",
    "expected_hitting_time",
    "occupancy",
    "best_response",
    "unconstrained_rho",
    "verify_equilibrium",
    "solve_equilibrium",
    "simulate",
]


def _text(source):
    """JSON text for a path, a JSON string, or a decoded object."""
    if source is None:
        return None
    if isinstance(source, os.PathLike) or (
        isinstance(source, str) and not source.lstrip().startswith(("{", "["))
    ):
        with open(source, encoding="utf-8") as f:
            return f.read()
    if isinstance(source, str):
        return source
    return json.dumps(source)


def load_model(source):
    """Absorbing model from a path, JSON text or dict."""
    return _cmgame.parse_model(_text(source))


def load_discounted(source):
    """Absorbing cemetery-state model built from a discounted model file."""
    return _cmgame.discount_to_absorbing(_text(source))


def uniform_profile(model):
    return json.loads(_cmgame.uniform_profile(model))


def check_absorbing(model, everywhere=False):
    return json.loads(_cmgame.check_absorbing(model, everywhere))


def uniform_absorption_bound(model):
    return _cmgame.uniform_absorption_bound(model)


def expected_hitting_time(model, profile=None):
    return _cmgame.expected_hitting_time(model, _text(profile))


def occupancy(model, profile=None):
    return json.loads(_cmgame.occupancy(model, _text(profile)))


def best_response(model, player, profile=None, rho=None):
    return json.loads(_cmgame.best_response(model, player, _text(profile), _text(rho)))


def unconstrained_rho(model):
    return json.loads(_cmgame.unconstrained_rho(model))


def verify_equilibrium(model, profile=None, rho=None, tolerance=1e-6, unconstrained=False):
    return json.loads(
        _cmgame.verify_equilibrium(model, _text(profile), _text(rho), tolerance, unconstrained)
    )


def solve_equilibrium(model, rho=None, unconstrained=False, **config):
    """Damped best-response search; keyword arguments mirror the solver config
    (max_iterations, damping, convergence_tol, tolerance, restarts, seed,
    uniform_start, threads)."""
    return json.loads(_cmgame.solve_equilibrium(model, _text(rho), unconstrained, **config))


def simulate(model, profile=None, samples=10_000, seed=0, cap=1_000_000, threads=0):
    return json.loads(_cmgame.simulate(model, _text(profile), samples, seed, cap, threads))
