import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from wittforge.gf2k import GF
from wittforge.quadspace import QuadraticSpace, hyperbolic_plane, norm_plane, standard_space

settings.register_profile(
    "wittforge",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("wittforge")


def poly_mul_mod(a: int, b: int, modulus: int) -> int:
    """Schoolbook GF(2)[t] product reduced mod ``modulus``; test oracle."""
    deg = modulus.bit_length() - 1
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> deg & 1:
            a ^= modulus
    return out


def brute_force_nondegenerate(S: QuadraticSpace) -> bool:
    """No nonzero vector orthogonal to every basis vector."""
    basis = S.basis()
    return all(v.is_zero() or any(S.eval_beta(v, e) for e in basis) for v in S.vectors())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def F2():
    return GF(1)


@pytest.fixture
def F4():
    return GF(2)


@pytest.fixture
def F8():
    return GF(3)


@pytest.fixture
def H2(F2):
    return hyperbolic_plane(F2)


@pytest.fixture
def N2(F2):
    return norm_plane(F2)


@pytest.fixture
def HH2(F2):
    return standard_space(F2, 2, False)


def random_space(F, n: int, rng) -> QuadraticSpace:
    """Arbitrary (possibly degenerate) quadratic space of dimension n."""
    g = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            g[i][j] = g[j][i] = int(rng.integers(F.order))
    return QuadraticSpace(F, g, [int(x) for x in rng.integers(F.order, size=n)])
