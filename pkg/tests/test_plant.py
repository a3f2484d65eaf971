import math

import numpy as np
import pytest

from event_eso import (
    DisturbanceSpec,
    InputKind,
    InvalidArgument,
    PlantConfig,
    disturbance_eval,
    extended_state,
    plant_derivative,
    section_iv_noise,
    section_iv_plant,
)
from event_eso.plant import output

B9 = (2, 2, 1.5, 1.5, 1.5, 1.5, 2.5, 2.5, 2.5)


class TestDisturbance:
    def test_section_iv_origin(self):
        assert disturbance_eval(DisturbanceSpec.section_iv(B9), 0.0, (0.0, 0.0), 1.5, 0.0) == 1.5

    def test_section_iv_initial_state(self):
        # -2*1 - 2*(-1) + 1.5 sin(1.5 - 1.5) = 0
        assert disturbance_eval(DisturbanceSpec.section_iv(B9), 0.0, (1.0, -1.0), 0.0, 0.0) == 0.0

    def test_section_iv_general(self):
        x1, x2, v1, v2 = 0.3, -0.7, 0.25, -1.1
        expected = -2 * x1 - 2 * x2 + 1.5 * math.sin(1.5 * x1 + 1.5 * x2) + v1 + 2.5 * v2
        assert disturbance_eval(DisturbanceSpec.section_iv(B9), 1.0, (x1, x2), v1, v2) == pytest.approx(expected)

    def test_zero(self):
        assert disturbance_eval(DisturbanceSpec.zero(), 3.0, (5.0, 6.0), 7.0, 8.0) == 0.0

    def test_constant(self):
        assert disturbance_eval(DisturbanceSpec.constant(3.7), 3.0, (5.0, 6.0), 7.0, 8.0) == 3.7

    def test_custom(self):
        spec = DisturbanceSpec.custom(lambda t, x, v1, v2: t + x[0] + v1 * v2)
        assert disturbance_eval(spec, 1.0, (2.0,), 3.0, 4.0) == 15.0

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidArgument):
            disturbance_eval(DisturbanceSpec.zero(), 0.0, (1.0, 2.0), 0.0, 0.0, n=3)
        with pytest.raises(InvalidArgument):
            disturbance_eval(DisturbanceSpec.section_iv(B9), 0.0, (1.0, 2.0, 3.0), 0.0, 0.0)

    @pytest.mark.parametrize("b", [(0, 2, *B9[2:]), (2, -1, *B9[2:]), B9[:8]])
    def test_section_iv_invariants(self, b):
        with pytest.raises(InvalidArgument):
            DisturbanceSpec.section_iv(b)

    def test_pure(self):
        spec = DisturbanceSpec.section_iv(B9)
        args = (0.4, (0.1, 0.2), 0.3, 0.4)
        assert disturbance_eval(spec, *args) == disturbance_eval(spec, *args)


class TestPlant:
    def test_chain(self):
        assert list(plant_derivative(PlantConfig(2, (1.0, -1.0)), 0.0, (1.0, -1.0), 0.0, 0.0)) == [-1.0, 0.0]

    def test_constant(self):
        cfg = PlantConfig(2, (0.0, 0.0), DisturbanceSpec.constant(2.5))
        assert list(plant_derivative(cfg, 0.0, (0.0, 0.0), 0.0, 0.0)) == [0.0, 2.5]

    def test_chain_with_input(self):
        cfg = PlantConfig(3, (1.0, 2.0, 3.0), input_kind=InputKind.CUSTOM, input_hook=lambda t: 5.0)
        assert list(plant_derivative(cfg, 0.0, (1.0, 2.0, 3.0), 0.0, 0.0)) == [2.0, 3.0, 5.0]

    def test_cos_input(self):
        cfg = PlantConfig(1, (0.0,), input_kind=InputKind.COS, b10=2.5)
        assert plant_derivative(cfg, 0.4, (0.0,), 0.0, 0.0)[0] == pytest.approx(math.cos(1.0))

    def test_extended_state_mirrors_disturbance(self):
        plant = section_iv_plant()
        for x, v1, v2 in [((0.0, 0.0), 1.5, 0.0), ((1.0, -1.0), 0.0, 0.0), ((0.2, 0.9), -0.4, 0.8)]:
            assert extended_state(plant, 0.0, x, v1, v2) == disturbance_eval(plant.disturbance, 0.0, x, v1, v2)

    def test_zero_fixed_point(self):
        cfg = PlantConfig(4, (0.0,) * 4)
        x = np.zeros(4)
        for k in range(100):
            x = x + 1e-2 * plant_derivative(cfg, k * 1e-2, x, 0.3, -0.2)
        assert np.all(x == 0.0)

    def test_output(self):
        assert output((3.5, -1.0)) == 3.5

    def test_validation(self):
        with pytest.raises(InvalidArgument):
            PlantConfig(0, ())
        with pytest.raises(InvalidArgument):
            PlantConfig(2, (1.0,))
        with pytest.raises(InvalidArgument):
            PlantConfig(3, (0.0,) * 3, DisturbanceSpec.section_iv(B9))
        with pytest.raises(InvalidArgument):
            PlantConfig(2, (0.0, 0.0), input_kind=InputKind.CUSTOM)
        with pytest.raises(InvalidArgument):
            plant_derivative(PlantConfig(2, (0.0, 0.0)), 0.0, (0.0, 0.0, 0.0), 0.0, 0.0)


def test_section_iv_factories():
    plant, noise = section_iv_plant(), section_iv_noise()
    assert plant.n == 2 and plant.x_init == (1.0, -1.0) and plant.b10 == 2.5
    assert plant.disturbance.b == tuple(float(v) for v in B9)
    assert (noise.amplitude, noise.t_coeff, noise.b_coeff) == (1.5, 2.5, 2.5)
    assert (noise.alpha1, noise.alpha2, noise.v2_init) == (2.0, 2.0, 0.0)
