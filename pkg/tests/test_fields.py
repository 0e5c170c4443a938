import numpy as np
import pytest
from scipy.integrate import quad

from stokes2p import (
    InterfaceProfile,
    PeriodicGrid,
    PhysParams,
    ProximityError,
    eval_Z,
    far_field_residuals,
    interface_jump_checks,
    pressure_field,
    sample_flow,
    stokeslet_eval,
    trace_B,
    trace_velocity,
    velocity_field,
    velocity_gradient_field,
)
from stokes2p.fields import (
    antiderivative,
    default_collar,
    min_interface_distance,
    stokeslet_eval_halfangle,
    stokeslet_from_green,
    z_jump_coefficients,
)


@pytest.fixture(scope="module")
def setup():
    grid = PeriodicGrid(128)
    f = InterfaceProfile(grid, 0.2 * np.cos(grid.nodes) + 0.1 * np.sin(2 * grid.nodes))
    params = PhysParams.from_theta(mu=1.0, sigma=1.0, theta=1.5)
    return grid, f, params


class TestStokeslet:
    def test_symmetry_of_tensor(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            x1, x2 = rng.uniform(0.1, 6.0), rng.uniform(-3, 3) + 0.05
            U, _ = stokeslet_eval(x1, x2)
            assert U[0, 1] == U[1, 0]

    def test_even_under_point_reflection(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            x1, x2 = rng.uniform(0.1, 3.0), rng.uniform(0.05, 3.0)
            U, P = stokeslet_eval(x1, x2)
            Um, Pm = stokeslet_eval(-x1, -x2)
            assert np.max(np.abs(U - Um)) < 1e-12
            assert np.max(np.abs(P + Pm)) < 1e-12   # pressure vector is odd

    def test_periodic_in_x1(self):
        U, P = stokeslet_eval(0.7, 1.3)
        U2, P2 = stokeslet_eval(0.7 + 2 * np.pi, 1.3)
        assert np.max(np.abs(U - U2)) < 1e-12
        assert np.max(np.abs(P - P2)) < 1e-12

    def test_limit_point_on_lattice_line(self):
        # x = (pi, 0): tan blows up but the tensor is finite; off-diagonals
        # and the pressure vanish there by symmetry
        U, P = stokeslet_eval(np.pi, 0.0)
        assert np.isfinite(U).all()
        assert abs(U[0, 1]) < 1e-15
        assert np.max(np.abs(P)) < 1e-15

    def test_three_forms_agree(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            x1 = rng.uniform(-2.9, 2.9)
            x2 = rng.uniform(-3.0, 3.0)
            if np.hypot(x1, x2) < 0.05:
                continue
            U, P = stokeslet_eval(x1, x2)
            Ug, Pg = stokeslet_from_green(x1, x2)
            assert np.max(np.abs(U - Ug)) < 1e-12
            assert np.max(np.abs(P - Pg)) < 1e-12
            if abs(abs(x1) - np.pi) > 0.1:
                Uh, Ph = stokeslet_eval_halfangle(x1, x2)
                assert np.max(np.abs(U - Uh)) < 1e-12
                assert np.max(np.abs(P - Ph)) < 1e-12

    def test_source_point_rejected(self):
        with pytest.raises(ValueError):
            stokeslet_eval(0.0, 0.0)

    def test_satisfies_stokes_system(self):
        # mu Delta U^k - grad P^k = 0 and div U^k = 0 off the lattice,
        # via fourth-order finite differences
        h = 1e-3
        c1 = np.array([1.0, -8.0, 8.0, -1.0]) / (12 * h)
        off1 = np.array([-2 * h, -h, h, 2 * h])
        c2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12 * h * h)
        off2 = np.array([-2 * h, -h, 0.0, h, 2 * h])
        rng = np.random.default_rng(3)
        for _ in range(10):
            x1, x2 = rng.uniform(0.5, 5.8), rng.uniform(0.3, 2.0)

            def tensors(a, b):
                return stokeslet_eval(a, b)

            lap_U = sum(w * tensors(x1 + o, x2)[0] for w, o in zip(c2, off2)) \
                + sum(w * tensors(x1, x2 + o)[0] for w, o in zip(c2, off2))
            dP1 = sum(w * tensors(x1 + o, x2)[1] for w, o in zip(c1, off1))
            dP2 = sum(w * tensors(x1, x2 + o)[1] for w, o in zip(c1, off1))
            dU1 = sum(w * tensors(x1 + o, x2)[0] for w, o in zip(c1, off1))
            dU2 = sum(w * tensors(x1, x2 + o)[0] for w, o in zip(c1, off1))
            # momentum: columns of U against components of P
            resid = lap_U - np.vstack([dP1, dP2]).T
            assert np.max(np.abs(resid)) < 1e-6
            div = dU1[0, :] + dU2[1, :]
            assert np.max(np.abs(div)) < 1e-6


class TestLayerIntegrals:
    def test_zero_density(self, setup):
        grid, f, params = setup
        pts = np.array([[0.3, 2.0], [1.0, -2.5]])
        for idx in range(7):
            assert np.max(np.abs(eval_Z(idx, f, np.zeros(grid.n_points), pts))) < 1e-15

    def test_flat_unit_density_against_direct_quadrature(self):
        grid = PeriodicGrid(64)
        zero = InterfaceProfile.zero(grid)
        a = 1.2

        def kernel(s):
            t, T = np.tan((0.0 - s) / 2), np.tanh(a / 2)
            return T * (1 + t * t) / (t * t + T * T) / (2 * np.pi)

        want, _ = quad(kernel, -np.pi, np.pi, limit=200, epsabs=1e-12)
        got = eval_Z(2, zero, np.ones(grid.n_points), [0.0, a])
        assert abs(got - want) < 1e-10

    def test_gradient_of_log_layer(self, setup):
        # grad Z0 = (Z1, Z2), checked by central differences
        grid, f, params = setup
        dens = np.cos(grid.nodes) + 0.2 * np.sin(3 * grid.nodes)
        p = np.array([1.1, 1.7])
        h = 1e-5
        d1 = (eval_Z(0, f, dens, p + [h, 0]) - eval_Z(0, f, dens, p - [h, 0])) / (2 * h)
        d2 = (eval_Z(0, f, dens, p + [0, h]) - eval_Z(0, f, dens, p - [0, h])) / (2 * h)
        z1 = eval_Z(1, f, dens, p)
        z2 = eval_Z(2, f, dens, p)
        assert abs(d1 - z1) < 1e-6 * max(1, abs(z1))
        assert abs(d2 - z2) < 1e-6 * max(1, abs(z2))

    def test_gradients_of_moment_layers(self, setup):
        # grad Z5 = (-Z3, Z1 - 2 Z4) and grad Z6 = (-2 Z4, Z2 + Z3)
        grid, f, params = setup
        dens = np.cos(grid.nodes)
        p = np.array([2.0, -1.6])
        h = 1e-5

        def fd(idx, axis):
            e = np.array([h, 0.0]) if axis == 0 else np.array([0.0, h])
            return (eval_Z(idx, f, dens, p + e) - eval_Z(idx, f, dens, p - e)) / (2 * h)

        z = {i: eval_Z(i, f, dens, p) for i in (1, 2, 3, 4)}
        assert abs(fd(5, 0) + z[3]) < 1e-6
        assert abs(fd(5, 1) - (z[1] - 2 * z[4])) < 1e-6
        assert abs(fd(6, 0) + 2 * z[4]) < 1e-6
        assert abs(fd(6, 1) - (z[2] + z[3])) < 1e-6

    def test_proximity_refused(self, setup):
        grid, f, params = setup
        close = np.array([[0.0, f.values[0] + 0.5 * default_collar(f)]])
        with pytest.raises(ProximityError):
            eval_Z(1, f, np.cos(grid.nodes), close)

    def test_min_distance(self, setup):
        grid, f, params = setup
        d = min_interface_distance(f, np.array([[0.0, f.values[0] + 1.0]]))
        assert d[0] == pytest.approx(1.0, abs=0.05)


class TestTraces:
    def test_one_sided_limits_converge(self):
        # approach along the normal: Z_n tends to trace +/- jump at first order
        grid = PeriodicGrid(64)
        f = InterfaceProfile(grid, 0.1 * np.cos(grid.nodes))
        dens = np.cos(grid.nodes)
        jumps = z_jump_coefficients(f)
        fp = f.deriv_values
        i = 5
        nu = np.array([-fp[i], 1.0]) / np.sqrt(1 + fp[i] ** 2)
        base = np.array([grid.nodes[i], f.values[i]])
        for idx in (1, 2):
            tr = trace_B(idx, f, dens)[i]
            res = []
            for eps in (1e-2, 1e-3):
                got = eval_Z(idx, f, dens, (base + eps * nu)[None, :], near=True)[0]
                res.append(abs(got - (tr + jumps[idx][i] * dens[i])))
            assert res[1] < 0.3 * res[0]          # at least first order
            assert res[1] < 1e-3

    def test_moment_layers_continuous(self):
        # the two moment-weighted layers have no jump: two-sided limits agree
        grid = PeriodicGrid(64)
        f = InterfaceProfile(grid, 0.1 * np.cos(grid.nodes))
        dens = np.cos(grid.nodes)
        fp = f.deriv_values
        i = 9
        nu = np.array([-fp[i], 1.0]) / np.sqrt(1 + fp[i] ** 2)
        base = np.array([grid.nodes[i], f.values[i]])
        for idx in (5, 6):
            diffs = []
            for eps in (1e-3, 1e-4):
                up = eval_Z(idx, f, dens, (base + eps * nu)[None, :], near=True)[0]
                dn = eval_Z(idx, f, dens, (base - eps * nu)[None, :], near=True)[0]
                diffs.append(abs(up - dn))
            assert diffs[1] < 0.3 * diffs[0]   # two sides close at O(eps)
            # the stated agreement tolerance needs eps small enough for it
            eps = 3e-7
            up = eval_Z(idx, f, dens, (base + eps * nu)[None, :], near=True)[0]
            dn = eval_Z(idx, f, dens, (base - eps * nu)[None, :], near=True)[0]
            assert abs(up - dn) < 1e-6
            tr = trace_B(idx, f, dens)[i]
            assert abs(up - tr) < 1e-5

    def test_trace_index_validated(self, setup):
        grid, f, params = setup
        with pytest.raises(ValueError):
            trace_B(0, f, np.cos(grid.nodes))

    def test_variants_agree(self):
        grid = PeriodicGrid(128)
        f = InterfaceProfile(grid, 0.1 * np.cos(grid.nodes))
        for theta in (0.0, 1.0):
            params = PhysParams.from_theta(1.0, 1.0, theta)
            a = trace_velocity(f, params, "direct-g")
            b = trace_velocity(f, params, "parts-z")
            assert np.max(np.abs(a - b)) < 1e-8

    def test_variants_zero_on_flat(self):
        grid = PeriodicGrid(64)
        zero = InterfaceProfile.zero(grid)
        params = PhysParams.from_theta(1.0, 1.0, 1.0)
        assert np.max(np.abs(trace_velocity(zero, params, "direct-g"))) < 1e-13
        assert np.max(np.abs(trace_velocity(zero, params, "parts-z"))) < 1e-13

    def test_parts_variant_needs_mean_free(self):
        grid = PeriodicGrid(64)
        f = InterfaceProfile(grid, 0.1 * np.cos(grid.nodes) + 0.3)
        params = PhysParams.from_theta(1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            trace_velocity(f, params, "parts-z")

    def test_antiderivative_convention(self):
        grid = PeriodicGrid(64)
        v = np.cos(grid.nodes)
        S = antiderivative(v)
        assert np.max(np.abs(np.diff(S) / grid.spacing
                             - np.cos(grid.nodes[:-1] + grid.spacing / 2)
                             / np.sinc(grid.spacing / (2 * np.pi)))) < 1e-2
        with pytest.raises(ValueError):
            antiderivative(np.ones(64))


class TestBulkFields:
    def test_flat_profile_zero_flow(self):
        grid = PeriodicGrid(64)
        zero = InterfaceProfile.zero(grid)
        params = PhysParams.from_theta(1.0, 1.0, 2.0)
        pts = np.array([[0.5, 1.0], [2.0, -1.5]])
        assert np.max(np.abs(velocity_field(zero, params, pts))) < 1e-14
        assert np.max(np.abs(pressure_field(zero, params, pts))) < 1e-14

    def test_periodicity(self, setup):
        grid, f, params = setup
        p = np.array([[0.8, 1.4]])
        v1 = velocity_field(f, params, p)
        v2 = velocity_field(f, params, p + [2 * np.pi, 0.0])
        assert np.max(np.abs(v1 - v2)) < 1e-12

    def test_far_field_limits(self, setup):
        grid, f, params = setup
        res = far_field_residuals(f, params)
        for side in res.values():
            assert side["v1_residual"] < 1e-6
            assert side["v2_residual"] < 1e-6
            assert side["q_residual"] < 1e-6

    def test_moment_layer_far_limits(self, setup):
        # the far-field behavior of the individual layers
        grid, f, params = setup
        phi = np.cos(grid.nodes) + 0.4
        mean_phi = float(np.mean(phi))
        mean_fphi = float(np.mean(f.values * phi))
        for sign in (+1.0, -1.0):
            pts = np.array([[1.0, sign * 20.0]])
            z5 = eval_Z(5, f, phi, pts)[0]
            z6 = eval_Z(6, f, phi, pts)[0]
            z0 = eval_Z(0, f, phi, pts)[0]
            # limits per side: Z - sign*x2*<phi>, with x2 = sign*20
            assert abs(z5) < 1e-6
            assert abs(z6 - 20.0 * mean_phi + sign * mean_fphi) < 1e-6
            assert abs(z0 - 20.0 * mean_phi
                       + sign * mean_fphi + mean_phi * np.log(4.0)) < 1e-6

    def test_incompressibility_and_pressure_harmonicity(self, setup):
        grid, f, params = setup
        h = 1e-3
        c1 = np.array([1.0, -8.0, 8.0, -1.0]) / (12 * h)
        off1 = np.array([-2 * h, -h, h, 2 * h])
        c2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12 * h * h)
        off2 = np.array([-2 * h, -h, 0.0, h, 2 * h])
        rng = np.random.default_rng(4)
        pts = []
        while len(pts) < 5:
            p = np.array([rng.uniform(0, 2 * np.pi), rng.uniform(-2.0, 2.0)])
            if min_interface_distance(f, p[None, :])[0] >= 0.6:
                pts.append(p)
        for p in pts:
            vx = [velocity_field(f, params, p + [o, 0.0]) for o in off1]
            vy = [velocity_field(f, params, p + [0.0, o]) for o in off1]
            div = sum(w * v[0] for w, v in zip(c1, vx)) \
                + sum(w * v[1] for w, v in zip(c1, vy))
            assert abs(div) < 1e-6
            qq = [pressure_field(f, params, p + [o, 0.0]) for o in off2]
            qy = [pressure_field(f, params, p + [0.0, o]) for o in off2]
            lap_q = sum(w * q for w, q in zip(c2, qq)) + sum(w * q for w, q in zip(c2, qy))
            assert abs(lap_q) < 1e-5

    def test_gradient_field_matches_finite_differences(self, setup):
        grid, f, params = setup
        p = np.array([1.3, 1.6])
        h = 1e-5
        grad = velocity_gradient_field(f, params, p)
        for j, e in enumerate((np.array([h, 0.0]), np.array([0.0, h]))):
            fd = (velocity_field(f, params, p + e) - velocity_field(f, params, p - e)) / (2 * h)
            assert np.max(np.abs(grad[:, j] - fd)) < 1e-6

    def test_sample_flow_sides(self, setup):
        grid, f, params = setup
        samples = sample_flow(f, params, np.array([[0.5, 1.5], [0.5, -1.5]]))
        assert samples[0].side == "plus"
        assert samples[1].side == "minus"


@pytest.mark.slow
class TestJumpReport:
    def test_report_converges(self):
        grid = PeriodicGrid(64)
        f = InterfaceProfile(grid, 0.1 * np.cos(grid.nodes))
        params = PhysParams.from_theta(1.0, 1.0, 0.5)
        rep = interface_jump_checks(f, params, probe_count=2,
                                    eps_factors=(1e-2, 1e-3), check_stress=True)
        for idx, res in rep.z_residuals.items():
            assert res[-1] < res[0]
        assert all(o > 0.8 for o in rep.z_orders.values())
        assert rep.pressure_residuals[-1] < 1e-2
        assert rep.stress_tangential_residual < 1e-2
        assert rep.stress_normal_residual < 1e-2
