import numpy as np
import pytest

from pccregions.algebra import field_make
from pccregions.channels import Channel3IC, make_example
from pccregions.regions.testchannel import TestChannel, identity_test_channel


def random_three_to_one_channel(rng: np.random.Generator, n: int = 2) -> Channel3IC:
    """Random 3-to-1 channel over n-ary alphabets with zero costs"""
    w1 = rng.dirichlet(np.ones(n), size=(n, n, n))
    w2 = rng.dirichlet(np.ones(n), size=n)
    w3 = rng.dirichlet(np.ones(n), size=n)
    return Channel3IC(np.einsum('abcx,by,cz->abcxyz', w1, w2, w3))


def random_field_test_channel(rng: np.random.Generator, order: int) -> TestChannel:
    """Random 3-to-1 test channel with U2, U3 over F_order and binary
    inputs, |Q| = 1
    """
    channel = random_three_to_one_channel(rng)
    factors = [
        rng.dirichlet(np.ones(2))[None],
        rng.dirichlet(np.ones(order * 2)).reshape(1, order, 2),
        rng.dirichlet(np.ones(order * 2)).reshape(1, order, 2),
    ]
    field = field_make(order)
    return TestChannel.from_factors(channel, factors, algebras={'U2': field, 'U3': field})


@pytest.fixture
def example1():
    return make_example(1, delta1=0.01, delta2=0.15, delta3=0.15, tau=0.125)


@pytest.fixture
def binary_test_channel(example1):
    """U_j = X_j uniform over F2, P(X1 = 1) = τ"""
    return identity_test_channel(example1, ([0.875, 0.125], [0.5, 0.5], [0.5, 0.5]))
