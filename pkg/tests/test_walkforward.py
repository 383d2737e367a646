import numpy as np
import pytest

from quantroll.dataset import DatasetView, FeatureFrame, LabeledDataset, SegmentSplit, split
from quantroll.direction import DOWN, UP
from quantroll.errors import InsufficientHistory
from quantroll.models import ModelSpec
from quantroll.walkforward import (
    GLOBAL,
    TRAILING,
    PredictionSeries,
    WalkForwardConfig,
    run_walkforward,
    signal_from_predictions,
)

from .conftest import DAY, T0


def make_dataset(n, class_target=None, reg_target=None, valid_from=0, seed=0):
    rng = np.random.default_rng(seed)
    rows = rng.normal(0.0, 1.0, size=(n, 3))
    frame = FeatureFrame(("f1", "f2", "f3"), rows, np.arange(n, dtype=np.int64) * DAY + T0, valid_from)
    if reg_target is None:
        reg_target = np.concatenate([rng.normal(0, 0.01, n - 1), [np.nan]])
    if class_target is None:
        class_target = np.where(reg_target > 0, UP, DOWN).astype(np.int8)
        class_target[-1] = 0
    return LabeledDataset(frame, np.asarray(class_target, dtype=np.int8), np.asarray(reg_target), (valid_from, n - 2))


def view_of(ds, lo, hi):
    """View over global indices [lo, hi] clipped to the usable range."""
    indices = np.array([t for t in range(lo, hi + 1) if ds.usable_range[0] <= t <= ds.usable_range[1]], dtype=np.int64)
    return DatasetView(ds, "backtest", indices)


class TestCounting:
    def test_full_history_yields_one_record_per_index(self):
        ds = make_dataset(40)
        view = view_of(ds, 20, 34)
        preds = run_walkforward(view, ModelSpec("knn_c", {"k": 3}), WalkForwardConfig(window=7))
        assert len(preds) == 15
        assert (np.diff(preds.timestamps) > 0).all()

    def test_window7_over_10_indices_no_history(self):
        ds = make_dataset(11)  # usable 0..9
        view = view_of(ds, 0, 9)
        preds = run_walkforward(view, ModelSpec("knn_c", {"k": 1}), WalkForwardConfig(window=7))
        assert len(preds) == 3
        np.testing.assert_array_equal(preds.timestamps, ds.timestamps[[7, 8, 9]])

    def test_insufficient_history(self):
        ds = make_dataset(11)
        view = view_of(ds, 0, 9)
        with pytest.raises(InsufficientHistory):
            run_walkforward(view, ModelSpec("knn_c", {"k": 1}), WalkForwardConfig(window=25))

    def test_single_class_momentum_window1(self):
        n = 30
        reg = np.concatenate([np.full(n - 1, 0.01), [np.nan]])
        ds = make_dataset(n, reg_target=reg)  # every label up
        view = view_of(ds, 5, 25)
        preds = run_walkforward(view, ModelSpec("sgd_c"), WalkForwardConfig(window=1))
        assert (preds.direction == preds.realized_class).all()


class TestRecords:
    def test_realized_fields_come_from_row_t(self):
        ds = make_dataset(30, seed=1)
        view = view_of(ds, 10, 20)
        preds = run_walkforward(view, ModelSpec("ols_r"), WalkForwardConfig(window=5))
        np.testing.assert_array_equal(preds.realized_return, ds.reg_target[10:21])
        np.testing.assert_array_equal(preds.realized_class, ds.class_target[10:21])

    def test_regressor_records_value_and_direction(self):
        ds = make_dataset(30, seed=2)
        view = view_of(ds, 10, 20)
        preds = run_walkforward(view, ModelSpec("knn_r", {"k": 2}), WalkForwardConfig(window=5))
        assert np.isfinite(preds.value).all()
        np.testing.assert_array_equal(preds.direction, np.where(preds.value > 0, UP, DOWN))

    def test_classifier_value_is_nan(self):
        ds = make_dataset(30, seed=3)
        view = view_of(ds, 10, 20)
        preds = run_walkforward(view, ModelSpec("knn_c"), WalkForwardConfig(window=5))
        assert np.isnan(preds.value).all()

    def test_csv_export(self):
        ds = make_dataset(30, seed=4)
        view = view_of(ds, 10, 14)
        preds = run_walkforward(view, ModelSpec("knn_c"), WalkForwardConfig(window=5))
        lines = preds.to_csv().strip().split("\n")
        assert lines[0] == "timestamp,direction,score,value,realized_class,realized_return"
        assert len(lines) == len(preds) + 1


class TestNoLookahead:
    @pytest.mark.parametrize("kind,params", [("knn_c", {"k": 3}), ("random_forest_r", {"n_members": 5}), ("sgd_c", {})])
    def test_future_rows_do_not_change_prediction(self, kind, params):
        ds = make_dataset(60, seed=5)
        view = view_of(ds, 20, 50)
        spec = ModelSpec(kind, params, seed=9)
        config = WalkForwardConfig(window=7)
        clean = run_walkforward(view, spec, config)
        rng = np.random.default_rng(123)
        for t in (25, 33, 47):
            rows = ds.frame.rows.copy()
            class_t = ds.class_target.copy()
            reg_t = ds.reg_target.copy()
            rows[t + 1 :] = rng.normal(5.0, 3.0, size=rows[t + 1 :].shape)
            flips = rng.integers(0, 2, size=class_t[t + 1 :].shape).astype(np.int8) * 2 - 1
            class_t[t + 1 :] = flips
            reg_t[t + 1 :] = rng.normal(0, 0.05, size=reg_t[t + 1 :].shape)
            corrupted = LabeledDataset(
                FeatureFrame(ds.frame.feature_names, rows, ds.frame.timestamps, ds.frame.valid_from),
                class_t,
                reg_t,
                ds.usable_range,
            )
            cview = view_of(corrupted, 20, t)
            dirty = run_walkforward(cview, spec, config)
            i = int(np.nonzero(clean.timestamps == ds.timestamps[t])[0][0])
            assert dirty.direction[-1] == clean.direction[i]
            assert dirty.score[-1] == clean.score[i]
            if not np.isnan(clean.value[i]):
                assert dirty.value[-1] == clean.value[i]

    def test_stride_agrees_at_retrain_points(self):
        ds = make_dataset(60, seed=6)
        view = view_of(ds, 20, 50)
        spec = ModelSpec("knn_c", {"k": 3})
        base = run_walkforward(view, spec, WalkForwardConfig(window=7, retrain_stride=1))
        strided = run_walkforward(view, spec, WalkForwardConfig(window=7, retrain_stride=3))
        for k in range(0, len(base), 3):
            assert strided.direction[k] == base.direction[k]
            assert strided.score[k] == base.score[k]

    def test_stride_reuses_model_between_retrains(self):
        ds = make_dataset(60, seed=7)
        view = view_of(ds, 20, 50)
        preds = run_walkforward(view, ModelSpec("knn_c", {"k": 3}), WalkForwardConfig(window=7, retrain_stride=5))
        assert len(preds) == len(view.indices)


class TestGlobalMode:
    def test_global_fits_once_on_training_view(self):
        ds = make_dataset(60, seed=8)
        seg = SegmentSplit(
            train=(T0, T0 + 30 * DAY),
            backtest=(T0 + 30 * DAY, T0 + 45 * DAY),
            forward=(T0 + 45 * DAY, T0 + 60 * DAY),
        )
        train, back, _fwd = split(ds, seg)
        preds = run_walkforward(back, ModelSpec("knn_c", {"k": 5}), WalkForwardConfig(window=7, mode=GLOBAL), train_view=train)
        assert len(preds) == len(back)

    def test_global_requires_train_view(self):
        ds = make_dataset(60, seed=9)
        view = view_of(ds, 30, 40)
        with pytest.raises(ValueError):
            run_walkforward(view, ModelSpec("knn_c"), WalkForwardConfig(window=7, mode=GLOBAL))


def preds_fixture(task, directions=None, values=None):
    n = len(directions) if directions is not None else len(values)
    ts = np.arange(n, dtype=np.int64) * DAY + T0
    if task == "classifier":
        direction = np.array(directions, dtype=np.int8)
        value = np.full(n, np.nan)
        score = direction.astype(np.float64) * 0.25
    else:
        value = np.array(values, dtype=np.float64)
        direction = np.where(value > 0, UP, DOWN).astype(np.int8)
        score = value
    return PredictionSeries(
        task=task,
        timestamps=ts,
        direction=direction,
        score=score,
        value=value,
        realized_class=direction.copy(),
        realized_return=np.full(n, 0.01),
    )


class TestSignals:
    def test_classifier_mapping(self):
        preds = preds_fixture("classifier", directions=[UP, UP, DOWN])
        positions = signal_from_predictions(preds)
        np.testing.assert_array_equal(positions.positions, [1, 1, -1])

    def test_regressor_sign_rule(self):
        preds = preds_fixture("regressor", values=[0.02, -0.01])
        positions = signal_from_predictions(preds, threshold=0.0)
        np.testing.assert_array_equal(positions.positions, [1, -1])

    def test_regressor_dead_band_holds_flat(self):
        preds = preds_fixture("regressor", values=[0.001, -0.002])
        positions = signal_from_predictions(preds, threshold=0.005)
        np.testing.assert_array_equal(positions.positions, [0, 0])

    def test_regressor_dead_band_holds_prior_position(self):
        preds = preds_fixture("regressor", values=[0.02, 0.001, -0.001, -0.02, 0.002])
        positions = signal_from_predictions(preds, threshold=0.005)
        np.testing.assert_array_equal(positions.positions, [1, 1, 1, -1, -1])

    def test_threshold_rejected_for_classifiers(self):
        preds = preds_fixture("classifier", directions=[UP])
        with pytest.raises(ValueError):
            signal_from_predictions(preds, threshold=0.01)

    def test_task_mismatch_rejected(self):
        preds = preds_fixture("classifier", directions=[UP])
        with pytest.raises(ValueError):
            signal_from_predictions(preds, task="regressor")


class TestConfigValidation:
    def test_bad_window(self):
        with pytest.raises(ValueError):
            WalkForwardConfig(window=0)

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            WalkForwardConfig(mode="expanding")

    def test_modes_exposed(self):
        assert TRAILING == "trailing" and GLOBAL == "global"
