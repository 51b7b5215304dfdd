"""Negative controls: transports and rules that deliberately break locality laws.

The law suites must flag these. Each one satisfies the groupoid laws on a
single path, so only the restriction and reparameterization checks can
catch them.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import expm as scipy_expm

from .linear import AlongPathConnection, ConnectionTransport, IntegratorConfig
from .parallel import ParallelTransportRule, rule_from_transport
from .transport import TransportFamily

DEFAULT_G0 = np.array([[0.3, -1.1], [0.7, -0.2]])


class PathGlobalTransport(TransportFamily):
    """``exp(-(t - s) L G0)`` where ``L`` is the length of the parameter domain.

    Composition, identity and inverse hold on every path, but the matrix
    depends on the whole domain, so restricting the path changes it, and
    rescaling the parameter changes it too.
    """

    def __init__(self, G0=DEFAULT_G0):
        self.G0 = np.asarray(G0)
        self.fibre_dim = self.G0.shape[0]
        self.name = "mock_path_global"

    def matrix(self, path, s, t):
        return scipy_expm(-(t - s) * path.domain.length * self.G0)


def speed_blind_connection(G0=DEFAULT_G0) -> AlongPathConnection:
    """``Gamma(s) = |x(s)| G0`` with no velocity factor.

    Local in the path, so restriction holds, but the coefficients do not
    scale with ``tau'`` under a change of parameter.
    """
    G0 = np.asarray(G0)

    def fn(path, s):
        w = np.linalg.norm(path(s), axis=1) + 1.0
        return w[:, None, None] * G0

    return AlongPathConnection(fn, G0.shape[0], name="mock_speed_blind")


def speed_blind_transport(G0=DEFAULT_G0, cfg: IntegratorConfig = IntegratorConfig()) -> ConnectionTransport:
    return ConnectionTransport(speed_blind_connection(G0), cfg, name="mock_speed_blind")


def speed_blind_rule(G0=DEFAULT_G0, cfg: IntegratorConfig = IntegratorConfig()) -> ParallelTransportRule:
    """Parallel rule from the speed-blind transport; fails reparameterization invariance."""
    return rule_from_transport(speed_blind_transport(G0, cfg))


def path_global_rule(G0=DEFAULT_G0) -> ParallelTransportRule:
    return rule_from_transport(PathGlobalTransport(G0))


MOCKS = {
    "path_global": PathGlobalTransport,
    "speed_blind": speed_blind_transport,
}
