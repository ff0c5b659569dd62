import os

import numpy as np
import pytest

from model.params import ModelParams, REFERENCE_INSTANCE


@pytest.fixture(autouse=True, scope="session")
def clean_environment():
    """Keep CAPSWITCH_* variables of the developer's shell out of the tests."""
    saved = {key: os.environ.pop(key) for key in list(os.environ) if key.startswith("CAPSWITCH_")}
    yield
    os.environ.update(saved)


@pytest.fixture
def reference():
    return REFERENCE_INSTANCE


@pytest.fixture
def rho_two():
    """lambda=2, mu=1: the busy-period anchors (e^2 - 1)/2 and friends."""
    return ModelParams(lam=2.0, mu=1.0, h=1.0, c=100.0, s0=100.0, s1=100.0)


# small instances (n* <= 12) for exhaustive (M,N) enumeration
SMALL_INSTANCES = [
    ModelParams(lam=1.0, mu=1.0, h=1.0, c=3.0, s0=5.0, s1=5.0),
    ModelParams(lam=2.0, mu=1.0, h=1.0, c=7.5, s0=10.0, s1=10.0),
    ModelParams(lam=0.5, mu=1.0, h=1.0, c=11.0, s0=0.0, s1=20.0),
    ModelParams(lam=5.0, mu=1.0, h=1.0, c=6.0, s0=40.0, s1=0.0),
    ModelParams(lam=3.0, mu=2.0, h=2.0, c=9.0, s0=1.0, s1=1.0),
    ModelParams(lam=1.0, mu=0.5, h=0.5, c=4.0, s0=30.0, s1=30.0),
    ModelParams(lam=4.0, mu=1.0, h=1.0, c=10.0, s0=2.0, s1=50.0),
    ModelParams(lam=0.8, mu=1.0, h=1.0, c=2.0, s0=0.5, s1=0.5),
    ModelParams(lam=1.5, mu=1.0, h=3.0, c=20.0, s0=15.0, s1=5.0),
    ModelParams(lam=6.0, mu=2.0, h=1.0, c=11.0, s0=100.0, s1=100.0),
    ModelParams(lam=1.0, mu=1.0, h=1.0, c=0.5, s0=0.1, s1=0.1),
    ModelParams(lam=2.5, mu=1.0, h=1.0, c=8.0, s0=3.0, s1=12.0),
]


def random_small_instances(count: int = 30, seed: int = 2024):
    """Random instances with c/h < 11, so n* <= 11 and exhaustive (M,N) search stays cheap."""
    rng = np.random.default_rng(seed)
    instances = []
    for _ in range(count):
        h = float(rng.uniform(0.5, 2.0))
        instances.append(ModelParams(lam=float(rng.uniform(0.2, 5.0)), mu=float(rng.uniform(0.5, 2.0)), h=h,
                                     c=h * float(rng.uniform(0.2, 10.9)), s0=float(rng.uniform(0.0, 30.0)),
                                     s1=float(rng.uniform(0.1, 30.0))))
    return instances
