import math

import numpy as np
import pytest

from vtsi import parse_scenario
from vtsi.coupling import (assemble_coupled, constraint_matrix,
                           constraint_rates, residual)
from vtsi.simulate import build_scenario_bridge
from vtsi.vehicle import VehicleParams, vehicle_matrices
from vtsi.pathgeom import frame_kinematics


@pytest.fixture(scope="module")
def fem_bridge(default_scenario, default_path):
    return build_scenario_bridge(
        parse_scenario({"bridge": {"kind": "fem"}}), default_path)


class TestConstraintMatrix:
    def test_reproduces_constant_fields(self, default_bridge, fem_bridge):
        # Each coupling row interpolates one field: a unit constant field
        # (all other DOFs zero) must evaluate to exactly 1 anywhere.
        from vtsi.beams import F_TT, F_UB, F_UN, N_FIELDS
        for br in (default_bridge, fem_bridge):
            for s in (7.3, 43.125, 75.0, 131.9):
                L = constraint_matrix(br, s).L
                for row, f in zip(L, (F_UN, F_UB, F_TT)):
                    u = np.zeros(br.n_full)
                    u[f::N_FIELDS] = 1.0
                    assert row @ u == pytest.approx(1.0, abs=1e-10)

    def test_off_bridge_rejected(self, default_bridge):
        with pytest.raises(ValueError):
            constraint_matrix(default_bridge, -0.5)
        with pytest.raises(ValueError):
            constraint_matrix(default_bridge, default_bridge.length + 1.0)

    def test_full_row_rank_inside_path(self, default_bridge):
        rng = np.random.default_rng(5)
        Z = default_bridge.Z
        for s in rng.uniform(1.0, 149.0, 25):
            L = constraint_matrix(default_bridge, float(s)).L @ Z
            assert np.linalg.matrix_rank(L) == 3

    def test_interpolates_bridge_fields(self, default_bridge):
        # A manufactured reduced displacement: rows reproduce point values of
        # (u_n, u_b) obtained from the probe rows.
        rng = np.random.default_rng(11)
        ub = rng.normal(size=default_bridge.n_red)
        for s in (22.0, 75.0, 110.0):
            L = constraint_matrix(default_bridge, s).L @ default_bridge.Z
            probe = default_bridge.probe_rows(s)
            assert L[0] @ ub == pytest.approx(probe[0] @ ub, rel=1e-10)
            assert L[1] @ ub == pytest.approx(probe[1] @ ub, rel=1e-10)


class TestConstraintRates:
    @pytest.mark.parametrize("kind", ["nurbs", "fem"])
    def test_rates_match_finite_differences(self, kind, default_bridge,
                                            fem_bridge):
        br = default_bridge if kind == "nurbs" else fem_bridge
        v, s0 = 100.0, 43.125  # element midpoint, stencil stays inside
        t0 = s0 / v
        snap = constraint_rates(br, s0, v)
        scale1 = np.max(np.abs(snap.L_dot))
        scale2 = np.max(np.abs(snap.L_ddot))
        e1, e2 = [], []
        for h in (2e-3, 1e-3):
            Lp = constraint_rates(br, v * (t0 + h), v).L
            Lm = constraint_rates(br, v * (t0 - h), v).L
            e1.append(np.max(np.abs((Lp - Lm) / (2 * h) - snap.L_dot))
                      / scale1)
            e2.append(np.max(np.abs((Lp - 2 * snap.L + Lm) / h ** 2
                                    - snap.L_ddot)) / scale2)
        assert math.log2(e1[0] / e1[1]) >= 1.9
        # The second difference of a piecewise-cubic row is exact inside an
        # element, so the error may sit at the roundoff floor.
        assert math.log2(e2[0] / max(e2[1], 1e-300)) >= 1.9 or e2[0] <= 1e-8

    def test_zero_speed(self, default_bridge):
        snap = constraint_rates(default_bridge, 50.0, 0.0)
        assert np.max(np.abs(snap.L_dot)) == 0.0
        assert np.max(np.abs(snap.L_ddot)) == 0.0

    def test_reduction_through_null_space(self, default_bridge):
        snap = constraint_rates(default_bridge, 64.2, 100.0)
        L, Ld, Ldd = snap.reduced(default_bridge.Z)
        assert L.shape == (3, default_bridge.n_red)
        assert np.allclose(L, snap.L @ default_bridge.Z)
        assert np.allclose(Ldd, snap.L_ddot @ default_bridge.Z)


class TestCoupledSystem:
    def test_sizes(self, default_bridge, default_path):
        vp = VehicleParams()
        fk = frame_kinematics(default_path.curve, default_path.amap, 40.0,
                              vp.v)
        veh = vehicle_matrices(vp, fk)
        sys = assemble_coupled(veh, default_bridge,
                               constraint_rates(default_bridge, 40.0, vp.v))
        assert sys.sizes == (4, default_bridge.n_red, 3)

    def test_residual_of_consistent_state(self, default_bridge, default_path):
        # Static check: solve the coupled static problem directly and verify
        # all three block residuals vanish.
        vp = VehicleParams(v=0.0)
        fk = frame_kinematics(default_path.curve, default_path.amap, 40.0,
                              0.0)
        veh = vehicle_matrices(vp, fk)
        snap = constraint_rates(default_bridge, 40.0, 0.0)
        sys = assemble_coupled(veh, default_bridge, snap)
        nb = default_bridge.n_red
        Lb = snap.L @ default_bridge.Z
        A = np.zeros((4 + nb + 3, 4 + nb + 3))
        A[:4, :4] = veh.K
        A[:4, 4 + nb:] = veh.L_tr
        A[4:4 + nb, 4:4 + nb] = default_bridge.K
        A[4:4 + nb, 4 + nb:] = Lb.T
        A[4 + nb:, :4] = veh.L_tr.T
        A[4 + nb:, 4:4 + nb] = Lb
        rhs = np.concatenate([veh.P, default_bridge.P, np.zeros(3)])
        x = np.linalg.solve(A, rhs)
        ut, ub, lam = x[:4], x[4:4 + nb], x[4 + nb:]
        z = np.zeros
        r_t, r_b, r_c = residual(sys, ut, z(4), z(4), ub, z(nb), z(nb), lam)
        assert np.max(np.abs(r_t)) <= 1e-6
        assert np.max(np.abs(r_b)) <= 1e-6 * np.max(np.abs(default_bridge.P))
        assert np.max(np.abs(r_c)) <= 1e-12
