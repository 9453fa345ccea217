import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eemx.errors import ClassTooSmall, ConstantColumn, IndexOutOfRange
from eemx.fixtures import duplicate_pair, helmert_columns, helmert_design
from eemx.indices import model_index_report
from eemx.model_space import ControlParams, ModelSubset, brute_force_dcd
from eemx.numerics import cd_of_regression, sym_eigen
from eemx.vi_select import max_collinearity_cd
from eemx.vr_select import (
    PccClass,
    cd_reduce,
    collinearity_identifier,
    identifier_matrix,
    lemma42_bounds,
    pcc_classes,
    principal_components,
    spawn_candidates,
    standardize,
    vr_algorithm,
    vr_trace,
)
from tests.helpers import PHI_1A, cols, random_design
from tests.oracles import r2_from_corr_inverse

SMALL = np.column_stack([np.ones(4), [1.0, 2.0, 3.0, 4.0], [1.0, 2.0, 3.0, 5.0]])


class TestStandardize:
    def test_hand_values(self):
        x = np.column_stack([np.ones(3), [1.0, 2.0, 3.0]])
        z = standardize(x, ModelSubset((0, 1))).z_matrix[:, 0]
        np.testing.assert_allclose(z, [-1 / np.sqrt(2), 0.0, 1 / np.sqrt(2)], atol=1e-15)

    def test_idempotent(self):
        h = helmert_columns(6)
        x = np.column_stack([np.ones(6), h[:, 1], h[:, 2]])
        std = standardize(x, ModelSubset((0, 1, 2)))
        np.testing.assert_allclose(std.z_matrix, x[:, 1:], atol=1e-14)

    def test_constant(self):
        x = np.column_stack([np.ones(4), [2.0] * 4, [1.0, 2.0, 3.0, 4.0]])
        with pytest.raises(ConstantColumn):
            standardize(x, ModelSubset((0, 1, 2)))

    def test_gasoline_correlations(self, gasoline):
        std = standardize(gasoline, ModelSubset(cols(gasoline, "X2", "X4", "X7", "X12")))
        np.testing.assert_allclose(std.z_matrix.T @ std.z_matrix, PHI_1A, atol=5e-4 + 1e-12)


class TestIdentifier:
    def test_identity_matrix(self):
        eig = sym_eigen(np.eye(4))
        d = identifier_matrix(eig)
        assert set(np.round(d.ravel(), 12)) <= {0.0, 1.0}
        np.testing.assert_allclose(d.sum(axis=0), 1.0)
        np.testing.assert_allclose(d.sum(axis=1), 1.0)

    def test_rows_sum_of_squares(self):
        d = identifier_matrix(sym_eigen(PHI_1A))
        np.testing.assert_allclose((d**2).sum(axis=0), 1.0, atol=1e-12)

    def test_matches_elementwise(self):
        eig = sym_eigen(PHI_1A)
        d = identifier_matrix(eig)
        for m, k in itertools.product(range(4), range(4)):
            assert collinearity_identifier(eig, m, k) == pytest.approx(d[m, k])
        with pytest.raises(IndexOutOfRange):
            collinearity_identifier(eig, 4, 0)

    def test_reference_matrix(self):
        d = identifier_matrix(sym_eigen(PHI_1A))
        np.testing.assert_allclose(d[0], [0.980, 0.977, 0.733, 0.859], atol=2e-3)

    def test_equals_correlation_with_component(self):
        rng = np.random.default_rng(0)
        x = random_design(rng, 30, 5, collinear=1.0)
        std = standardize(x, ModelSubset.of(range(5)))
        eig = principal_components(std)
        scores = std.z_matrix @ eig.eigenvectors
        d = identifier_matrix(eig)
        for m in range(4):
            g = scores[:, m] / np.linalg.norm(scores[:, m])
            np.testing.assert_allclose(np.abs(std.z_matrix.T @ g), d[m], atol=1e-10)


class TestPccClasses:
    def test_gasoline(self, gasoline):
        std = standardize(gasoline, ModelSubset(cols(gasoline, "X2", "X4", "X7", "X12")))
        classes = pcc_classes(std, 0.9, 0.4)
        assert len(classes) == 1
        (g,) = classes
        assert g.component_index == 2 and g.rank == 1
        assert set(g.variables) == {gasoline.column("X2"), gasoline.column("X4")}
        assert g.contribution == pytest.approx(0.797, abs=1e-3)

    def test_identity_has_no_class(self):
        std = standardize(helmert_design(8, 5), ModelSubset.of(range(5)))
        assert pcc_classes(std, 0.9, 0.4) == []

    def test_duplicated_pair(self):
        # z1 = z2 = h1, z3 = h2, z4 = h3: eigenvalues (2, 1, 1, 0), leading vector (1, 1, 0, 0)/sqrt(2)
        h = helmert_columns(8)
        x = np.column_stack([np.ones(8), h[:, 1], h[:, 1], h[:, 2], h[:, 3]])
        std = standardize(x, ModelSubset.of(range(5)))
        eig = principal_components(std)
        np.testing.assert_allclose(eig.eigenvalues, [2.0, 1.0, 1.0, 0.0], atol=1e-12)
        classes = pcc_classes(std, 0.95, 0.4, eig)
        assert [c.variables for c in classes] == [(1, 2)]
        for c in classes:
            for pb in lemma42_bounds(c, std):
                assert pb.correlation == pytest.approx(1.0)
                assert pb.passes

    def test_pair_bounds_gasoline(self, gasoline):
        std = standardize(gasoline, ModelSubset(cols(gasoline, "X2", "X4", "X7", "X12")))
        (g,) = pcc_classes(std, 0.9, 0.4)
        (pb,) = lemma42_bounds(g, std)
        assert pb.correlation == pytest.approx(0.990, abs=5e-4)
        assert pb.lower <= pb.correlation <= pb.upper
        assert pb.passes

    def test_too_small(self):
        std = standardize(helmert_design(5, 3), ModelSubset.of(range(3)))
        with pytest.raises(ClassTooSmall):
            lemma42_bounds(PccClass(2, 1.0, 0.5, ((1, 0.95),), 0.9), std)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0.9, 1.0), st.floats(0.05, 0.6))
    def test_class_properties(self, seed, a, b):
        rng = np.random.default_rng(seed)
        x = random_design(rng, int(rng.integers(10, 40)), int(rng.integers(3, 9)), collinear=2.0)
        std = standardize(x, ModelSubset.of(range(x.shape[1])))
        eig = principal_components(std)
        assert eig.eigenvalues.sum() == pytest.approx(x.shape[1] - 1, rel=1e-10)
        np.testing.assert_allclose((identifier_matrix(eig) ** 2).sum(axis=0), 1.0, atol=1e-10)
        classes = pcc_classes(std, a, b, eig)
        seen = set()
        for c in classes:
            assert c.contribution >= b
            if len(c):
                assert c.eigenvalue >= a**2 - 1e-12
            assert all(d >= a for _, d in c.members)
            assert not seen & set(c.variables)
            seen |= set(c.variables)
            if len(c) >= 2:
                assert all(pb.passes for pb in lemma42_bounds(c, std))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_cd_unchanged_by_standardization(seed):
    rng = np.random.default_rng(seed)
    x = random_design(rng, int(rng.integers(8, 30)), int(rng.integers(3, 8)), collinear=1.0)
    std = standardize(x, ModelSubset.of(range(x.shape[1])))
    for k in range(1, x.shape[1]):
        assert cd_of_regression(k, x) == pytest.approx(r2_from_corr_inverse(std.z_matrix, k - 1), abs=1e-8)


class TestSpawn:
    def _cls(self, comp, members):
        return PccClass(comp, 2.0, 0.5, tuple((k, 0.95) for k in members), 0.9)

    def test_no_multi_member_class(self):
        full = ModelSubset.of(range(5))
        assert spawn_candidates(full, [self._cls(2, [1])]) == [full]
        assert spawn_candidates(full, []) == [full]

    def test_product_count(self):
        full = ModelSubset.of(range(8))
        out = spawn_candidates(full, [self._cls(2, [1, 2, 3]), self._cls(3, [4, 5])])
        assert len(out) == 6
        for m in out:
            assert len(set(m.columns) & {1, 2, 3}) == 1
            assert len(set(m.columns) & {4, 5}) == 1
            assert {6, 7} <= set(m.columns)

    def test_gasoline(self, gasoline):
        full = ModelSubset(cols(gasoline, "X2", "X4", "X7", "X12"))
        g = self._cls(2, [gasoline.column("X2"), gasoline.column("X4")])
        assert {m.columns for m in spawn_candidates(full, [g])} == {
            cols(gasoline, "X2", "X7", "X12"),
            cols(gasoline, "X4", "X7", "X12"),
        }


class TestCdReduce:
    def test_compliant_unchanged(self, gasoline):
        for names in (("X2", "X7", "X12"), ("X4", "X7", "X12")):
            m = ModelSubset(cols(gasoline, *names))
            assert cd_reduce(m, gasoline, 0.9) == m

    def test_tie_deletes_lowest_index(self):
        # both CDs equal 169/175 > 0.9; x2 (column 1) goes, then q^2(x3) = 121/156 <= 0.9
        assert cd_reduce(ModelSubset((0, 1, 2)), SMALL, 0.9) == ModelSubset((0, 2))

    def test_exact_duplicates(self):
        x = duplicate_pair(15, 5, seed=2)
        out = cd_reduce(ModelSubset.of(range(5)), x, 0.9)
        assert out == ModelSubset((0, 2, 3, 4))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0.3, 0.95))
    def test_result_compliant(self, seed, d_R):
        rng = np.random.default_rng(seed)
        x = random_design(rng, int(rng.integers(10, 30)), int(rng.integers(3, 9)), collinear=2.0)
        out = cd_reduce(ModelSubset.of(range(x.shape[1])), x, d_R)
        assert max_collinearity_cd(out, x) <= d_R + 1e-12
        for size in range(3, out.column_size):
            for sub in itertools.combinations(out.variables, size - 1):
                assert max_collinearity_cd(ModelSubset.of(sub), x) <= d_R + 1e-12


class TestVrAlgorithm:
    def test_gasoline(self, gasoline):
        t = vr_trace(gasoline, ControlParams(0.9, 0.9, 0.9, 0.4))
        multi = [c for c in t.classes if len(c) >= 2]
        assert [set(c.variables) for c in multi] == [{gasoline.column("X2"), gasoline.column("X4")}]
        assert {m.columns for m in t.models} == {cols(gasoline, "X2", "X7", "X12"), cols(gasoline, "X4", "X7", "X12")}

    def test_helmert(self):
        assert vr_algorithm(helmert_design(10, 6), ControlParams()) == [ModelSubset.of(range(6))]

    def test_duplicated_pair(self):
        x = duplicate_pair(20, 4, seed=5)
        out = vr_algorithm(x, ControlParams(0.9, 0.9))
        assert out == [ModelSubset((0, 1, 2)), ModelSubset((0, 2, 3))]
        members = set(brute_force_dcd(x, ControlParams(0.9, 0.9)).models)
        assert set(out) <= members

    def test_weak_leading_component(self):
        # no component reaches the share threshold: reduce the full model
        x = helmert_design(10, 6)
        t = vr_trace(x, ControlParams(b=0.9))
        assert t.classes == [] and t.candidates == [ModelSubset.of(range(6))]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.5, 0.99), st.floats(0.3, 0.95), st.floats(0.9, 1.0), st.floats(0.1, 0.6))
def test_vr_outputs_are_members(seed, c_q, d_R, a, b):
    rng = np.random.default_rng(seed)
    x = random_design(rng, int(rng.integers(10, 25)), int(rng.integers(3, 9)), collinear=1.5)
    p = ControlParams(c_q, d_R, a, b)
    members = set(brute_force_dcd(x, p).models)
    for m in vr_algorithm(x, p):
        assert m in members
        rep = model_index_report(x[:, m.columns])
        assert rep.icri[0] <= p.c * (1 + 1e-12) and rep.icri[1] <= p.d * (1 + 1e-12)
