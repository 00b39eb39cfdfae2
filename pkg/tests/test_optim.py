import numpy as np
import pytest

from core.config import AdamConfig, TrainConfig
from core.exceptions import (
    ConfigurationError, DimensionalityError, NumericOverflowError,
    TrainingDivergedError, ValidationError,
)
from core.logging import TrainingLogger
from core.metrics import weight_dispersion
from generators import gen_gaussian
from models.neural.dropout import MaskSource
from models.neural.network import Gradient, NetworkDef, NetworkState, forward, init_network
from optimization import Adam, LossTrace, MSELoss, adam_step, epoch_permutation, mse_loss, train


def _scalar_state(value=0.5):
    return NetworkState([{'W': np.array([[value]])}])


class TestMSELoss:
    @pytest.mark.parametrize("pred, target, expected", [
        ([1.0, 1.0], [1.0, 1.0], 0.0),
        ([2.0], [0.0], 4.0),
        ([1.0, 3.0], [0.0, 0.0], 5.0),
    ])
    def test_examples(self, pred, target, expected):
        assert mse_loss(np.array(pred), np.array(target)) == pytest.approx(expected)

    def test_empty_input(self):
        with pytest.raises(ValidationError):
            mse_loss(np.array([]), np.array([]))

    def test_length_mismatch(self):
        with pytest.raises(DimensionalityError):
            mse_loss(np.ones(2), np.ones(3))

    def test_gradient(self):
        loss = MSELoss()
        np.testing.assert_allclose(loss.gradient(np.array([1.0, 3.0]), np.zeros(2)), [1.0, 3.0])


class TestAdam:
    def test_zero_gradient_leaves_state(self):
        state = _scalar_state()
        new = adam_step(state, Gradient([{'W': np.zeros((1, 1))}]), Adam())
        np.testing.assert_array_equal(new.params[0]['W'], state.params[0]['W'])

    def test_first_step_moves_by_learning_rate(self):
        state = _scalar_state(0.5)
        optimizer = Adam(AdamConfig(learning_rate=0.1))
        new = adam_step(state, Gradient([{'W': np.array([[1.0]])}]), optimizer)
        assert new.params[0]['W'][0, 0] == pytest.approx(0.4, abs=1e-6)
        assert optimizer.step_count == 1
        assert state.params[0]['W'][0, 0] == 0.5

    def test_identical_problems_identical_trajectories(self):
        def run():
            state, optimizer = _scalar_state(2.0), Adam(AdamConfig(learning_rate=0.05))
            path = []
            for _ in range(20):
                w = state.params[0]['W'][0, 0]
                state = adam_step(state, Gradient([{'W': np.array([[2 * (w - 1.0)]])}]), optimizer)
                path.append(state.params[0]['W'][0, 0])
            return path
        assert run() == run()

    def test_non_finite_gradient_names_layer(self):
        state = NetworkState([{}, {'W': np.ones((2, 1))}])
        grad = Gradient([{}, {'W': np.array([[np.nan], [0.0]])}])
        with pytest.raises(NumericOverflowError) as excinfo:
            Adam().step(state, grad)
        assert excinfo.value.details['layer'] == 1

    def test_incongruent_gradient(self):
        with pytest.raises(DimensionalityError):
            Adam().step(_scalar_state(), Gradient([{'W': np.zeros((2, 1))}]))

    def test_reset_state(self):
        optimizer = Adam()
        optimizer.step(_scalar_state(), Gradient([{'W': np.ones((1, 1))}]))
        optimizer.reset_state()
        assert optimizer.step_count == 0 and optimizer.m is None

    @pytest.mark.parametrize("kwargs", [
        {'learning_rate': 0.0}, {'beta1': 1.0}, {'beta2': 0.0}, {'epsilon': -1.0},
    ])
    def test_invalid_config(self, kwargs):
        with pytest.raises(ConfigurationError):
            AdamConfig(**kwargs)


class TestTrainConfig:
    def test_dropout_cannot_be_disabled(self):
        with pytest.raises(ConfigurationError):
            TrainConfig(dropout_active=False)

    def test_epoch_permutation_depends_on_epoch_only(self):
        a = epoch_permutation(3, 5, 100)
        np.testing.assert_array_equal(a, epoch_permutation(3, 5, 100))
        assert sorted(a) == list(range(100))
        assert not np.array_equal(a, epoch_permutation(3, 6, 100))


class TestTrain:
    def _setup(self, p_d=0.2, K=20, epochs=5):
        net_def = NetworkDef.single_layer(K, p_d)
        state = init_network(net_def, seed=1)
        dataset = gen_gaussian(10.0, 1.0, 200, seed=0)
        return net_def, state, dataset, TrainConfig(epochs=epochs, batch_size=32)

    def test_deterministic(self):
        net_def, state, dataset, cfg = self._setup()
        a_state, a_trace = train(net_def, state, dataset, cfg, AdamConfig(), MaskSource(2))
        b_state, b_trace = train(net_def, state, dataset, cfg, AdamConfig(), MaskSource(2))
        assert a_trace.losses == b_trace.losses
        np.testing.assert_array_equal(a_state.params[1]['W'], b_state.params[1]['W'])

    def test_input_state_untouched(self):
        net_def, state, dataset, cfg = self._setup()
        before = state.params[1]['W'].copy()
        train(net_def, state, dataset, cfg, AdamConfig(), MaskSource(2))
        np.testing.assert_array_equal(state.params[1]['W'], before)

    def test_trace_per_epoch_and_decreasing(self):
        net_def, state, dataset, cfg = self._setup(epochs=30)
        _, trace = train(net_def, state, dataset, cfg, AdamConfig(learning_rate=0.01),
                         MaskSource(2))
        assert len(trace.losses) == 30
        assert all(np.isfinite(trace.losses))
        assert trace.final < trace.losses[0]

    def test_mask_seed_matters(self):
        net_def, state, dataset, cfg = self._setup()
        _, a = train(net_def, state, dataset, cfg, AdamConfig(), MaskSource(2))
        _, b = train(net_def, state, dataset, cfg, AdamConfig(), MaskSource(3))
        assert a.losses != b.losses

    def test_no_dropout_reaches_least_squares(self):
        K, y_bar = 4, 2.0
        net_def = NetworkDef.single_layer(K, p_d=0.0)
        state = init_network(net_def, seed=0)
        inputs = np.full((64, K), 1.0 / K)
        targets = np.full((64, 1), y_bar)
        trained, trace = train(net_def, state, (inputs, targets),
                               TrainConfig(epochs=1000, batch_size=32),
                               AdamConfig(learning_rate=0.01), MaskSource(0))
        assert forward(trained, net_def, inputs[0])[0] == pytest.approx(y_bar, abs=1e-2)
        assert trace.final < 1e-4

    def test_divergence_reports_epoch(self):
        net_def = NetworkDef.single_layer(4, p_d=0.0)
        state = init_network(net_def, seed=0)
        dataset = gen_gaussian(1.0, 0.0, 4, seed=0)
        with pytest.raises(TrainingDivergedError) as excinfo:
            train(net_def, state, dataset, TrainConfig(epochs=5),
                  AdamConfig(learning_rate=1e300), MaskSource(0))
        assert excinfo.value.epoch == 2
        assert excinfo.value.to_dict()['epoch'] == 2

    def test_empty_data(self):
        net_def = NetworkDef.single_layer(4, p_d=0.0)
        state = init_network(net_def, seed=0)
        with pytest.raises(ValidationError):
            train(net_def, state, (np.zeros((0, 4)), np.zeros((0, 1))))

    def test_callbacks_receive_epochs(self):
        net_def, state, dataset, cfg = self._setup(epochs=3)
        logger = TrainingLogger('test_run', every=10)
        train(net_def, state, dataset, cfg, AdamConfig(), MaskSource(2), callbacks=[logger])
        assert len(logger.history['loss']) == 3

    def test_loss_trace_csv(self, tmp_path):
        trace = LossTrace([1.5, 0.25])
        path = trace.to_csv(tmp_path / 'loss.csv')
        assert path.read_text() == 'epoch,mean_loss\n1,1.5\n2,0.25\n'


@pytest.mark.slow
class TestSingleLayerConvergence:
    @pytest.mark.parametrize("p_d, expected", [(0.2, 0.025), (0.5, 0.040)])
    def test_mean_weight_matches_optimum(self, p_d, expected):
        net_def = NetworkDef.single_layer(500, p_d)
        state = init_network(net_def, seed=1)
        dataset = gen_gaussian(10.0, 1.0, 3200, seed=0)
        trained, trace = train(net_def, state, dataset, TrainConfig(epochs=600, batch_size=32),
                               AdamConfig(), MaskSource(2))
        assert all(np.isfinite(trace.losses))
        assert trained.params[1]['W'].mean() == pytest.approx(expected, rel=0.05)

    def test_weights_homogenize(self):
        # Noise-free targets and full batches isolate the dropout-driven pull
        # toward a common weight from minibatch noise.
        net_def = NetworkDef.single_layer(500, 0.2)
        state = init_network(net_def, seed=1)
        dataset = gen_gaussian(10.0, 0.0, 3200, seed=0)
        trained, _ = train(net_def, state, dataset, TrainConfig(epochs=3000, batch_size=3200),
                           AdamConfig(learning_rate=1e-4), MaskSource(2))
        weights = trained.params[1]['W'][:, 0]
        assert weights.mean() == pytest.approx(0.025, rel=0.05)
        assert weight_dispersion(weights) < 0.15
