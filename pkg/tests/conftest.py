import hypothesis
import numpy as np
import pytest

from nuctrack._levelcount import counts_by_threshold

hypothesis.settings.register_profile("default", deadline=None)
hypothesis.settings.load_profile("default")


@pytest.fixture(scope="session", autouse=True)
def warm_component_counter():
    # trigger the one-off JIT compile outside any timed/deadlined test
    counts_by_threshold(np.zeros((4, 4), np.int16), 1)
