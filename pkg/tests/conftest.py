import logging

import numpy as np
import pytest

from panolift.logging_config import logger
from panolift.sphere import erp_grid
from panolift.utils.splitmix import SplitMix64


def smooth_color(d: np.ndarray) -> np.ndarray:
    """Low-frequency RGB field on the sphere, continuous across the seam and poles."""
    x, y, z = d[..., 0], d[..., 1], d[..., 2]
    r = 0.5 + 0.2 * x + 0.1 * y * z
    g = 0.5 + 0.15 * z - 0.1 * x * y
    b = 0.5 + 0.2 * y + 0.05 * (x * x - z * z)
    return np.stack([r, g, b], axis=-1)


def textured_color(d: np.ndarray) -> np.ndarray:
    """Richer texture for calibration: several incommensurate plane waves."""
    x, y, z = d[..., 0], d[..., 1], d[..., 2]
    r = 0.5 + 0.2 * np.sin(4.0 * x + 1.0) * np.cos(3.0 * y) + 0.1 * np.sin(5.0 * z + 2.0 * y)
    g = 0.5 + 0.2 * np.cos(3.0 * z - 2.0 * x) + 0.1 * np.sin(6.0 * y + 0.5)
    b = 0.5 + 0.15 * np.sin(5.0 * x + 4.0 * z) + 0.1 * np.cos(4.0 * y - 3.0 * x)
    return np.stack([r, g, b], axis=-1)


@pytest.fixture
def sphere_field():
    return smooth_color


@pytest.fixture
def texture_field():
    return textured_color


@pytest.fixture
def sinusoid_erp():
    return smooth_color(erp_grid(64, 128))


@pytest.fixture
def large_sinusoid_erp():
    return smooth_color(erp_grid(256, 512))


@pytest.fixture
def textured_erp():
    return textured_color(erp_grid(256, 512))


@pytest.fixture
def continuous_erps():
    """Five synthetic wrap-continuous ERPs (64 x 128) with different content."""
    d = erp_grid(64, 128)
    x, y, z = d[..., 0], d[..., 1], d[..., 2]
    fields = []
    for k in range(5):
        a, b = 1.0 + k, 2.0 + 0.5 * k
        fields.append(np.stack([0.5 + 0.3 * np.sin(a * x + b * z),
                                0.5 + 0.3 * np.cos(b * y - a * z + k),
                                0.5 + 0.2 * np.sin(a * y * z + b * x)], axis=-1))
    return fields


@pytest.fixture
def rng():
    return SplitMix64(7)


@pytest.fixture
def panolift_logs(caplog, monkeypatch):
    """caplog for the package logger, which stops propagating once configured."""
    monkeypatch.setattr(logger, 'propagate', True)
    caplog.set_level(logging.DEBUG, logger='panolift')
    return caplog
