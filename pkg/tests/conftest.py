import pytest

from rsaccr.curves import CurveSet, flat_curve, flat_zero_curve_set
from rsaccr.saccr import SupervisoryConfig


@pytest.fixture
def cfg():
    return SupervisoryConfig()


@pytest.fixture
def flat0():
    return flat_zero_curve_set()


@pytest.fixture
def flat2():
    return CurveSet(discount=flat_curve(0.02))
