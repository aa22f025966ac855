import numpy as np
import pytest

import rydsteady as rs
from rydsteady import model
from rydsteady.metrics import (fidelity_pure, negativity, populations, report,
                               steady_residual)
from rydsteady.opalg import DensityMatrix, Operator

from conftest import random_density


def state(name, atoms=2):
    return DensityMatrix.from_vector(model.target_state(name, atoms),
                                     (6,) * atoms)


class TestNegativity:
    def test_maximally_entangled_target(self):
        assert negativity(state("Psi")) == pytest.approx(1.0, abs=1e-12)

    def test_separable_basis_state(self):
        assert negativity(state("gLgL")) == pytest.approx(0.0, abs=1e-12)

    def test_embedded_bell_pair(self):
        v = (model.target_state("gLgL") + model.target_state("g0g0")) \
            / np.sqrt(2)
        rho = DensityMatrix.from_vector(v, (6, 6))
        assert negativity(rho) == pytest.approx(0.5, abs=1e-12)

    def test_subsystem_choice_irrelevant(self, rng):
        for _ in range(5):
            rho = random_density(rng, 36, (6, 6))
            assert negativity(rho, 0) == pytest.approx(negativity(rho, 1),
                                                       abs=1e-12)

    def test_product_states_have_zero(self, rng):
        for _ in range(5):
            a = random_density(rng, 6).matrix
            b = random_density(rng, 6).matrix
            rho = DensityMatrix(Operator(np.kron(a, b), (6, 6)),
                                validate=False)
            assert abs(negativity(rho)) < 1e-10

    def test_requires_bipartite(self):
        with pytest.raises(ValueError):
            negativity(state("S3", 3))
        with pytest.raises(IndexError):
            negativity(state("Psi"), 2)


class TestFidelity:
    def test_self_fidelity(self):
        assert fidelity_pure(state("Psi"), model.target_state("Psi")) == \
            pytest.approx(1.0, abs=1e-14)

    def test_maximally_mixed(self):
        rho = DensityMatrix(Operator(np.eye(36, dtype=complex) / 36, (6, 6)),
                            validate=False)
        assert fidelity_pure(rho, model.target_state("Psi")) == \
            pytest.approx(1 / 36, abs=1e-14)

    def test_linearity(self, rng):
        r1 = random_density(rng, 36, (6, 6))
        r2 = random_density(rng, 36, (6, 6))
        t = model.target_state("Phi")
        for alpha in (0.0, 0.25, 0.7, 1.0):
            mix = DensityMatrix(
                Operator(alpha * r1.matrix + (1 - alpha) * r2.matrix, (6, 6)),
                validate=False)
            expected = alpha * fidelity_pure(r1, t) \
                + (1 - alpha) * fidelity_pure(r2, t)
            assert fidelity_pure(mix, t) == pytest.approx(expected, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            fidelity_pure(state("Psi"), model.target_state("S3", 3))


class TestPopulations:
    def test_uniform_mixture_overlap(self):
        rho = model.uniform_ground_mixture(2)
        pops = populations(rho, ["Psi"])
        assert pops["Psi"] == pytest.approx(1 / 9, abs=1e-14)

    def test_basis_state(self):
        rho = state("gLg0")
        pops = populations(rho, model.ground_labels(2))
        assert pops["gLg0"] == pytest.approx(1.0)
        rest = [v for k, v in pops.items() if k != "gLg0"]
        assert np.abs(rest).max() < 1e-14

    def test_population_equals_fidelity_for_named_state(self):
        spec = rs.two_atom_spec(1.0, 1.0, flavor="effective",
                                collapse_variant="independent")
        rho, _ = rs.steady_state(spec)
        pops = populations(rho, ["Psi"])
        assert abs(pops["Psi"] - fidelity_pure(
            rho, model.target_state("Psi"))) < 1e-3

    def test_unknown_label(self):
        with pytest.raises(ValueError):
            populations(state("Psi"), ["nope"])


class TestSteadyResidual:
    def test_solver_output_is_stationary(self):
        spec = rs.two_atom_spec(2.0, 1.0)
        rho, _ = rs.steady_state(spec)
        assert steady_residual(spec, rho) < 1e-10

    def test_dark_state_residual(self):
        spec = rs.two_atom_spec(0.5, 1.0, flavor="effective",
                                collapse_variant="paper-effective")
        assert steady_residual(spec, state("Psi")) < 1e-12

    def test_driven_basis_state_not_stationary(self):
        spec = rs.two_atom_spec(1.0, 1.0)
        val = steady_residual(spec, state("gLg0"))
        # commutator scale: the two drive couplings out of |gL g0>
        omega = abs(spec.omega_drive[0])
        assert val > omega

    def test_dimension_mismatch(self):
        spec = rs.three_atom_spec(1.0)
        with pytest.raises(ValueError):
            steady_residual(spec, state("Psi"))


class TestReport:
    def test_two_atom_report(self):
        spec = rs.two_atom_spec(5.0, 1.0)
        rho, _ = rs.steady_state(spec)
        rep = report(spec, rho)
        assert rep.negativity == pytest.approx(0.999, abs=2e-3)
        assert rep.fidelity["Psi"] >= 0.999
        assert sum(rep.populations.values()) <= 1 + 1e-9
        assert 0 < rep.purity <= 1 + 1e-9

    def test_three_atom_report_has_no_negativity(self):
        spec = rs.three_atom_spec(0.5, 1.0)
        rho = state("S3", 3)
        rep = report(spec, rho)
        assert rep.negativity is None
        assert rep.fidelity["S3"] == pytest.approx(1.0, abs=1e-12)
