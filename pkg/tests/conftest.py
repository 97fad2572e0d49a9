import numpy as np
import pytest
from hypothesis import settings

from fiberpulse.core import Site, make_trace

settings.register_profile("fast", max_examples=40, deadline=None)
settings.load_profile("fast")


@pytest.fixture
def sine():
    """Factory for a sampled unit sinusoid trace."""
    def make(freq, duration=10.0, fs=250.0, amp=1.0, site=Site.UNSPECIFIED, phase=0.0):
        t = np.arange(int(round(duration * fs))) / fs
        return make_trace(fs, 0.0, amp * np.sin(2 * np.pi * freq * t + phase), site)
    return make
