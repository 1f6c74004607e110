"""
Pytest configuration and fixtures.
"""

import os
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from ratnet.config import BlobsConfig, Config, DataConfig, TrainingConfig
from ratnet.models import Stack
from ratnet.services.data import IDX_IMAGES_MAGIC, IDX_LABELS_MAGIC, gen_blobs, write_idx
from ratnet.utils.diffcore import finite_diff_grad, seeded_rng

RUN_SLOW = os.getenv("RATNET_RUN_SLOW") == "1"


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running training checks (set RATNET_RUN_SLOW=1)")


def pytest_collection_modifyitems(config, items):
    if RUN_SLOW:
        return
    skip_slow = pytest.mark.skip(reason="slow test; set RATNET_RUN_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def relative_error(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    return np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-8)


@pytest.fixture
def rng():
    """Seeded random stream."""
    return seeded_rng(42)


@pytest.fixture
def gradient_check():
    """
    Compare analytic gradients of a stack with central differences.

    The scalar checked is sum(stack(X) * G) for a fixed random G. Returns the largest
    relative errors over parameters and over inputs.
    """
    def check(stack: Stack, X: np.ndarray, seed: int = 7, h: float = 1e-5):
        G = np.random.default_rng(seed).standard_normal((X.shape[0], stack.n_out))

        stack.zero_grad()
        stack.forward(X)
        dX = stack.backward(G)
        analytic = stack.flat_grad()
        original = stack.get_flat()

        def loss_of_params(theta):
            stack.set_flat(theta)
            return float(np.sum(stack.forward(X) * G))

        numeric = finite_diff_grad(loss_of_params, original, h)
        stack.set_flat(original)

        def loss_of_inputs(x):
            return float(np.sum(stack.forward(x.reshape(X.shape)) * G))

        numeric_dX = finite_diff_grad(loss_of_inputs, X.ravel(), h)
        return float(relative_error(analytic, numeric).max()), float(relative_error(dX.ravel(), numeric_dX).max())

    return check


@pytest.fixture
def blobs_pair():
    """Training and test blobs drawn from consecutive seeds."""
    train = gen_blobs(3, 500, 0.25, seeded_rng(42))
    test = gen_blobs(3, 500, 0.25, seeded_rng(43))
    return train, test


@pytest.fixture
def blobs_config():
    """Small synthetic run configuration."""
    return Config(
        model="ratio:[2/2,8]",
        training=TrainingConfig(lr=1e-3, max_steps=300, eval_every=100, normalize="minmax"),
        data=DataConfig(blobs=BlobsConfig()),
    )


@pytest.fixture
def idx_files(tmp_path):
    """Tiny IDX image and label files: 6 images of 2x3 pixels."""
    images = np.arange(36, dtype=np.uint8).reshape(6, 2, 3) * 7
    labels = np.array([5, 0, 4, 1, 9, 2], dtype=np.uint8)
    images_path = tmp_path / "images-idx3-ubyte"
    labels_path = tmp_path / "labels-idx1-ubyte"
    write_idx(images_path, images, IDX_IMAGES_MAGIC)
    write_idx(labels_path, labels, IDX_LABELS_MAGIC)
    return images_path, labels_path, images, labels


@pytest.fixture(scope="session")
def mnist_dir():
    """Directory with the official MNIST files, taken from RATNET_MNIST_DIR."""
    directory = os.getenv("RATNET_MNIST_DIR")
    if not directory or not Path(directory).is_dir():
        pytest.skip("RATNET_MNIST_DIR not set")
    return Path(directory)


@pytest.fixture
def runner(tmp_path, monkeypatch):
    """CLI runner working in an empty directory with no configuration file."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("RATNET_CONFIG", str(tmp_path / "absent-config.yaml"))
    return CliRunner()
