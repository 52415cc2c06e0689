"""From-scratch MLP: forward oracles, gradient checks, training, model IO."""

from __future__ import annotations

import json
import math

import numpy as np
import pytest

from eegpref.errors import (
    BadParameterError,
    CorruptModelError,
    DivergenceError,
    EmptyTrainSetError,
    NonFiniteError,
    ShapeError,
    VersionMismatchError,
)
from eegpref.mlp import (
    LayerSpec,
    MlpModel,
    TrainConfig,
    backward,
    bce_loss,
    grad_check,
    init_mlp,
    load_model,
    save_model,
    train,
)
from eegpref.signals import Label


def single_sigmoid_unit(w, b) -> MlpModel:
    """A 1-layer logistic model with explicit parameters."""
    w = np.atleast_2d(np.asarray(w, dtype=np.float64))
    return MlpModel(
        layers=[LayerSpec(w.shape[1], 1, "sigmoid")],
        weights=[w],
        biases=[np.asarray([b], dtype=np.float64)],
    )


class TestInit:
    def test_default_architecture_shapes(self):
        model = init_mlp(128, [128, 32], seed=0)
        assert [w.shape for w in model.weights] == [(128, 128), (32, 128), (1, 32)]
        assert [b.shape for b in model.biases] == [(128,), (32,), (1,)]
        assert all(np.all(b == 0.0) for b in model.biases)
        assert [spec.activation for spec in model.layers] == ["relu", "relu", "sigmoid"]

    def test_same_seed_bit_identical(self):
        a = init_mlp(16, [8, 4], seed=9)
        b = init_mlp(16, [8, 4], seed=9)
        for wa, wb in zip(a.weights, b.weights):
            np.testing.assert_array_equal(wa, wb)

    def test_different_seed_differs(self):
        a = init_mlp(16, [8], seed=1)
        b = init_mlp(16, [8], seed=2)
        assert not np.array_equal(a.weights[0], b.weights[0])

    def test_first_layer_scale(self):
        # He std sqrt(2/128) estimated over 128x128 = 16384 draws
        model = init_mlp(128, [128, 32], seed=4)
        sample_std = float(model.weights[0].std())
        expected = math.sqrt(2.0 / 128.0)
        assert abs(sample_std - expected) / expected < 0.10

    def test_bad_dims_rejected(self):
        with pytest.raises(BadParameterError):
            init_mlp(0, [4], seed=0)
        with pytest.raises(BadParameterError):
            init_mlp(4, [0], seed=0)


class TestForward:
    def test_zero_parameters_give_half(self):
        model = single_sigmoid_unit(np.zeros((1, 3)), 0.0)
        probs = model.forward(np.ones((5, 3)))
        np.testing.assert_array_equal(probs, np.full(5, 0.5))

    def test_hand_computed_logit(self):
        # w=[1,-1], b=0.5, x=[2,1] -> z=1.5
        model = single_sigmoid_unit([[1.0, -1.0]], 0.5)
        probs = model.forward([[2.0, 1.0]])
        np.testing.assert_allclose(probs, [0.8175744761936437], atol=1e-15)

    def test_dead_relu_layer_gives_half(self):
        layers = [LayerSpec(2, 3, "relu"), LayerSpec(3, 1, "sigmoid")]
        weights = [np.full((3, 2), -1.0), np.zeros((1, 3))]
        biases = [np.zeros(3), np.zeros(1)]
        model = MlpModel(layers=layers, weights=weights, biases=biases)
        probs = model.forward([[1.0, 2.0], [3.0, 4.0]])
        np.testing.assert_array_equal(probs, [0.5, 0.5])

    def test_extreme_logits_stay_finite(self):
        model = single_sigmoid_unit([[1000.0]], 0.0)
        probs = model.forward([[1.0], [-1.0]])
        assert np.all(np.isfinite(probs))
        assert probs[0] == pytest.approx(1.0)
        assert probs[1] == pytest.approx(0.0)

    def test_batch_shape_checked(self):
        model = single_sigmoid_unit([[1.0, 2.0]], 0.0)
        with pytest.raises(ShapeError):
            model.forward([[1.0, 2.0, 3.0]])

    def test_model_validation(self):
        with pytest.raises(ShapeError):
            MlpModel(
                layers=[LayerSpec(2, 1, "sigmoid")],
                weights=[np.zeros((2, 2))],
                biases=[np.zeros(1)],
            )
        with pytest.raises(BadParameterError):
            # final layer must be sigmoid with one unit
            MlpModel(
                layers=[LayerSpec(2, 2, "relu")],
                weights=[np.zeros((2, 2))],
                biases=[np.zeros(2)],
            )


class TestPredictLabels:
    def test_half_probability_is_like(self):
        model = single_sigmoid_unit(np.zeros((1, 2)), 0.0)
        assert model.predict_labels([[0.0, 0.0]]) == [Label.LIKE]

    def test_zero_threshold_is_all_like(self):
        model = single_sigmoid_unit([[5.0, -3.0]], 0.1)
        rng = np.random.default_rng(0)
        labels = model.predict_labels(rng.normal(size=(50, 2)), threshold=0.0)
        assert all(lbl is Label.LIKE for lbl in labels)

    def test_matches_forward_then_threshold(self):
        model = init_mlp(6, [5, 3], seed=3)
        rng = np.random.default_rng(1)
        batch = rng.normal(size=(1000, 6))
        probs = model.forward(batch)
        labels = model.predict_labels(batch)
        expected = [Label.LIKE if p >= 0.5 else Label.DISLIKE for p in probs]
        assert labels == expected


class TestBceLoss:
    def test_half_probability_gives_ln2(self):
        assert bce_loss([0.5], [1.0]) == pytest.approx(math.log(2.0), abs=1e-15)

    def test_mean_of_symmetric_pair(self):
        assert bce_loss([0.5, 0.5], [1.0, 0.0]) == pytest.approx(math.log(2.0), abs=1e-15)

    def test_confident_correct_is_tiny_after_clip(self):
        assert bce_loss([1.0], [1.0]) <= 1.1e-7

    def test_confident_wrong_is_large_but_finite(self):
        loss = bce_loss([1.0], [0.0])
        assert math.isfinite(loss)
        assert loss > 15.0

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ShapeError):
            bce_loss([0.5, 0.5], [1.0])


class TestBackward:
    def test_output_bias_gradient_is_p_minus_y(self):
        # w=0, b=0, x=[1], y=1: p=0.5 so dL/db = p - y = -0.5 exactly
        model = single_sigmoid_unit([[0.0]], 0.0)
        grads = backward(model, [[1.0]], [1.0])
        assert grads[-1][1][0] == pytest.approx(-0.5, abs=1e-12)

    def test_output_weight_gradient_scales_with_input(self):
        model = single_sigmoid_unit([[0.0]], 0.0)
        grads = backward(model, [[3.0]], [1.0])
        assert grads[-1][0][0, 0] == pytest.approx(-1.5, abs=1e-12)

    def test_saturated_correct_prediction_has_tiny_gradients(self):
        model = single_sigmoid_unit([[40.0]], 0.0)
        grads = backward(model, [[1.0]], [1.0])  # p = 1 to ~17 decimals
        for gw, gb in grads:
            assert np.abs(gw).max() < 1e-6
            assert np.abs(gb).max() < 1e-6

    def test_batch_gradient_is_mean_of_singles(self):
        model = init_mlp(4, [3], seed=5)
        rng = np.random.default_rng(6)
        x = rng.normal(size=(8, 4))
        y = (rng.uniform(size=8) > 0.5).astype(float)
        batch_grads = backward(model, x, y)
        summed = [
            (np.zeros_like(gw), np.zeros_like(gb)) for gw, gb in batch_grads
        ]
        for i in range(8):
            single = backward(model, x[i : i + 1], y[i : i + 1])
            for (sw, sb), (gw, gb) in zip(summed, single):
                sw += gw / 8.0
                sb += gb / 8.0
        for (sw, sb), (gw, gb) in zip(summed, batch_grads):
            np.testing.assert_allclose(sw, gw, atol=1e-12)
            np.testing.assert_allclose(sb, gb, atol=1e-12)


def random_net(input_dim, hidden, seed):
    """Fully random probe net: weights from init_mlp, biases jittered off
    zero.  With all-zero biases a dead relu layer feeds exact-zero
    preactivations downstream, and on the kink the subgradient convention
    and a central difference legitimately disagree."""
    model = init_mlp(input_dim, hidden, seed=seed).copy()
    rng = np.random.default_rng(seed)
    for b in model.biases:
        b += 0.1 * rng.normal(size=b.shape)
    return model


class TestGradCheck:
    def test_twenty_seeded_nets_under_tolerance(self):
        rng = np.random.default_rng(1234)
        for seed in range(20):
            dims_rng = np.random.default_rng(seed)
            input_dim = int(dims_rng.integers(2, 17))
            hidden = [int(h) for h in dims_rng.integers(2, 17, size=2)]
            model = random_net(input_dim, hidden, seed)
            x = rng.normal(size=(5, input_dim))
            y = (rng.uniform(size=5) > 0.5).astype(float)
            assert grad_check(model, x, y) < 1e-4

    def test_tiny_architecture_from_contract(self):
        model = init_mlp(4, [3, 2], seed=77)
        rng = np.random.default_rng(7)
        x = rng.normal(size=(6, 4))
        y = np.array([1.0, 0.0, 1.0, 1.0, 0.0, 0.0])
        assert grad_check(model, x, y, h=1e-5) < 1e-4

    def test_zero_gradient_point_reports_zero(self):
        # saturated-correct single unit: analytic and numeric both
        # essentially zero, floored denominator keeps the ratio at 0
        model = single_sigmoid_unit([[50.0]], 0.0)
        assert grad_check(model, [[1.0]], [1.0]) == 0.0

    def test_coarse_step_is_worse(self):
        model = init_mlp(3, [4], seed=21)
        rng = np.random.default_rng(3)
        x = rng.normal(size=(5, 3))
        y = np.array([1.0, 0.0, 0.0, 1.0, 1.0])
        assert grad_check(model, x, y, h=1e-1) > grad_check(model, x, y, h=1e-5)

    def test_refuses_large_models(self):
        model = init_mlp(128, [128, 32], seed=0)
        with pytest.raises(BadParameterError):
            grad_check(model, np.zeros((1, 128)), [1.0])


def separable_toy_set(n=200, margin=1.0, seed=0):
    """Two 2-D blobs separated by a margin along the first axis."""
    rng = np.random.default_rng(seed)
    half = n // 2
    x_pos = rng.uniform([margin / 2, -1.0], [margin / 2 + 2.0, 1.0], size=(half, 2))
    x_neg = rng.uniform([-margin / 2 - 2.0, -1.0], [-margin / 2, 1.0], size=(half, 2))
    x = np.vstack([x_pos, x_neg])
    y = np.concatenate([np.ones(half), np.zeros(half)])
    return x, y


class TestTrain:
    def test_deterministic_with_fixed_seed(self, tmp_path):
        x, y = separable_toy_set(seed=1)
        cfg = TrainConfig(epochs=5, seed=11, early_stop_patience=0)
        model = init_mlp(2, [8, 4], seed=3)
        m1, h1 = train(model, (x, y), None, cfg)
        m2, h2 = train(model, (x, y), None, cfg)
        assert h1.train_loss == h2.train_loss
        save_model(m1, tmp_path / "a.json")
        save_model(m2, tmp_path / "b.json")
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_input_model_not_mutated(self):
        x, y = separable_toy_set(seed=2)
        model = init_mlp(2, [4], seed=5)
        before = [w.copy() for w in model.weights]
        train(model, (x, y), None, TrainConfig(epochs=2, early_stop_patience=0))
        for w0, w1 in zip(before, model.weights):
            np.testing.assert_array_equal(w0, w1)

    def test_separable_data_reaches_full_train_accuracy(self):
        x, y = separable_toy_set(n=200, margin=1.0, seed=3)
        model = init_mlp(2, [8, 4], seed=1)
        cfg = TrainConfig(epochs=200, batch_size=32, early_stop_patience=0, seed=2)
        trained, history = train(model, (x, y), None, cfg)
        assert max(history.train_accuracy) == 1.0
        assert history.train_accuracy[-1] == 1.0

    def test_early_stopping_stops_and_restores_best(self):
        # validation labels inverted w.r.t. the training rule: val loss
        # rises almost immediately, so patience=5 must cut the run short
        x, y = separable_toy_set(n=120, seed=4)
        x_val, y_val = separable_toy_set(n=40, seed=5)
        y_val = 1.0 - y_val
        model = init_mlp(2, [8], seed=6)
        cfg = TrainConfig(epochs=100, early_stop_patience=5, seed=7)
        trained, history = train(model, (x, y), (x_val, y_val), cfg)
        assert len(history.val_loss) < 100
        assert history.best_epoch <= len(history.val_loss) - 5
        best = history.best_epoch
        assert history.val_loss[best] == min(history.val_loss)
        # restored parameters reproduce the best epoch's validation loss
        restored_loss = bce_loss(trained.forward(x_val), y_val)
        assert restored_loss == pytest.approx(history.val_loss[best], abs=1e-12)

    def test_patience_zero_disables_early_stop(self):
        x, y = separable_toy_set(n=60, seed=8)
        x_val, y_val = separable_toy_set(n=20, seed=9)
        y_val = 1.0 - y_val
        model = init_mlp(2, [4], seed=0)
        cfg = TrainConfig(epochs=12, early_stop_patience=0, seed=1)
        _, history = train(model, (x, y), (x_val, y_val), cfg)
        assert len(history.train_loss) == 12

    def test_divergence_raises(self):
        x, y = separable_toy_set(n=40, seed=10)
        model = init_mlp(2, [4], seed=2)
        cfg = TrainConfig(
            learning_rate=1e12, optimizer="sgd", epochs=50, early_stop_patience=0
        )
        with np.errstate(over="ignore", invalid="ignore"):
            with pytest.raises(DivergenceError):
                train(model, (x * 1e6, y), None, cfg)

    def test_sgd_momentum_path(self):
        x, y = separable_toy_set(n=100, seed=11)
        model = init_mlp(2, [6], seed=3)
        cfg = TrainConfig(
            optimizer="sgd", momentum=0.9, learning_rate=0.05, epochs=50,
            early_stop_patience=0, seed=4,
        )
        _, history = train(model, (x, y), None, cfg)
        assert history.train_accuracy[-1] > 0.9

    def test_empty_train_set_rejected(self):
        model = init_mlp(2, [4], seed=0)
        with pytest.raises(EmptyTrainSetError):
            train(model, (np.zeros((0, 2)), np.zeros(0)), None, TrainConfig(early_stop_patience=0))

    def test_patience_without_validation_rejected(self):
        x, y = separable_toy_set(n=20, seed=0)
        model = init_mlp(2, [4], seed=0)
        with pytest.raises(BadParameterError):
            train(model, (x, y), None, TrainConfig(early_stop_patience=5))


class TestModelIo:
    def test_round_trip_outputs_bit_identical(self, tmp_path):
        model = init_mlp(6, [5, 3], seed=13)
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path)
        rng = np.random.default_rng(5)
        batch = rng.normal(size=(32, 6))
        np.testing.assert_array_equal(model.forward(batch), loaded.forward(batch))

    def test_save_is_deterministic(self, tmp_path):
        model = init_mlp(4, [3], seed=1)
        save_model(model, tmp_path / "a.json")
        save_model(model, tmp_path / "b.json")
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_format_is_versioned_json(self, tmp_path):
        model = init_mlp(3, [2], seed=0)
        path = tmp_path / "model.json"
        save_model(model, path)
        doc = json.loads(path.read_text())
        assert doc["format_version"] == 1
        assert [(-1 if "w" not in e else e["rows"]) for e in doc["layers"]] == [2, 1]
        first = doc["layers"][0]
        assert first["cols"] == 3
        assert first["activation"] == "relu"
        assert len(first["w"]) == 6
        assert len(first["b"]) == 2

    def test_future_version_rejected(self, tmp_path):
        model = init_mlp(3, [2], seed=0)
        path = tmp_path / "model.json"
        save_model(model, path)
        doc = json.loads(path.read_text())
        doc["format_version"] = 999
        path.write_text(json.dumps(doc))
        with pytest.raises(VersionMismatchError):
            load_model(path)

    def test_truncated_file_rejected(self, tmp_path):
        model = init_mlp(3, [2], seed=0)
        path = tmp_path / "model.json"
        save_model(model, path)
        data = path.read_bytes()
        path.write_bytes(data[: len(data) // 2])
        with pytest.raises(CorruptModelError):
            load_model(path)

    def test_inconsistent_counts_rejected(self, tmp_path):
        model = init_mlp(3, [2], seed=0)
        path = tmp_path / "model.json"
        save_model(model, path)
        doc = json.loads(path.read_text())
        doc["layers"][0]["w"] = doc["layers"][0]["w"][:-1]
        path.write_text(json.dumps(doc))
        with pytest.raises(CorruptModelError):
            load_model(path)

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(CorruptModelError):
            load_model(tmp_path / "nope.json")
