"""
Tests for softmax cross-entropy, accuracy and mean squared error.
"""

import math

import numpy as np
import pytest

from ratnet.exceptions import DataError, DimensionMismatchError, EmptyDatasetError
from ratnet.services.objective import accuracy, mean_squared_error, softmax, softmax_cross_entropy
from ratnet.utils.diffcore import finite_diff_grad


@pytest.fixture
def logits_and_labels():
    generator = np.random.default_rng(5)
    return generator.standard_normal((6, 4)) * 3.0, np.array([0, 3, 1, 1, 2, 0])


def test_uniform_logits_give_log_classes():
    loss, _ = softmax_cross_entropy(np.zeros((5, 10)), np.arange(5))
    assert loss == pytest.approx(math.log(10), abs=1e-12)


def test_saturated_softmax():
    logits = np.zeros((3, 4))
    labels = np.array([2, 0, 3])
    logits[np.arange(3), labels] = 1000.0
    loss, _ = softmax_cross_entropy(logits, labels)
    assert 0.0 <= loss < 1e-6


def test_gradient_matches_finite_differences(logits_and_labels):
    logits, labels = logits_and_labels
    _, dlogits = softmax_cross_entropy(logits, labels)

    def loss_of(flat):
        return softmax_cross_entropy(flat.reshape(logits.shape), labels)[0]

    numeric = finite_diff_grad(loss_of, logits.ravel(), 1e-5).reshape(logits.shape)
    assert np.max(np.abs(numeric - dlogits)) < 1e-7


def test_shift_invariance(logits_and_labels):
    logits, labels = logits_and_labels
    loss, dlogits = softmax_cross_entropy(logits, labels)
    shifted = logits + np.array([[7.0], [-3.0], [100.0], [0.5], [-40.0], [2.0]])
    loss_shifted, dlogits_shifted = softmax_cross_entropy(shifted, labels)
    assert loss_shifted == pytest.approx(loss, abs=1e-12)
    np.testing.assert_allclose(dlogits_shifted, dlogits, rtol=0, atol=1e-12)


def test_row_sums(logits_and_labels):
    logits, labels = logits_and_labels
    np.testing.assert_allclose(softmax(logits).sum(axis=1), 1.0, rtol=0, atol=1e-12)
    loss, dlogits = softmax_cross_entropy(logits, labels)
    assert loss >= 0.0
    np.testing.assert_allclose(dlogits.sum(axis=1), 0.0, rtol=0, atol=1e-12)


def test_gradient_is_batch_mean():
    logits = np.zeros((4, 2))
    labels = np.array([0, 0, 1, 1])
    _, dlogits = softmax_cross_entropy(logits, labels)
    np.testing.assert_allclose(dlogits[0], [-0.125, 0.125])


def test_loss_errors():
    with pytest.raises(EmptyDatasetError):
        softmax_cross_entropy(np.zeros((0, 3)), np.array([], dtype=np.int64))
    with pytest.raises(DataError):
        softmax_cross_entropy(np.zeros((2, 3)), np.array([0, 3]))
    with pytest.raises(DataError):
        softmax_cross_entropy(np.zeros((2, 3)), np.array([-1, 0]))
    with pytest.raises(DimensionMismatchError):
        softmax_cross_entropy(np.zeros((2, 3)), np.array([0, 1, 2]))


class TestAccuracy:
    """Argmax accuracy."""

    def test_onehot_logits(self):
        labels = np.array([0, 2, 1, 2])
        assert accuracy(np.eye(3)[labels], labels) == 1.0

    def test_shifted_onehot_logits(self):
        labels = np.array([0, 2, 1, 2])
        assert accuracy(np.eye(3)[(labels + 1) % 3], labels) == 0.0

    def test_ties_go_to_lowest_index(self):
        assert accuracy(np.zeros((4, 10)), np.zeros(4, dtype=np.int64)) == 1.0
        assert accuracy(np.zeros((4, 10)), np.ones(4, dtype=np.int64)) == 0.0

    def test_partial(self):
        logits = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 0.0]])
        assert accuracy(logits, np.array([0, 1, 1, 1])) == 0.5

    def test_empty_batch(self):
        with pytest.raises(EmptyDatasetError):
            accuracy(np.zeros((0, 2)), np.array([], dtype=np.int64))


def test_mean_squared_error():
    pred = np.array([[1.0], [2.0], [4.0]])
    target = np.array([[1.0], [0.0], [1.0]])
    loss, grad = mean_squared_error(pred, target)
    assert loss == pytest.approx(13.0 / 3.0)
    np.testing.assert_allclose(grad, [[0.0], [4.0 / 3.0], [2.0]])


def test_mean_squared_error_shapes():
    with pytest.raises(DimensionMismatchError):
        mean_squared_error(np.zeros((3, 1)), np.zeros((3, 2)))
