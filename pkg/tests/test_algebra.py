import json
from fractions import Fraction as F

import pytest
from helpers import LIE_EXAMPLES, model_filiform, rand_vec, sl2
from oracles import dense_tensor, first_jacobi_failure, lcs_dims

from liekit.algebra import (
    JacobiError,
    LieAlgebra,
    MalformedAlgebraError,
    ad,
    bracket,
    center,
    change_basis,
    derived_series,
    is_ideal,
    is_nilpotent,
    is_solvable,
    jacobi_holds,
    jacobi_violation,
    lower_central_series,
    nilindex,
    restrict,
)
from liekit.families import build_Q
from liekit.linalg import Subspace, add, commutator, identity, inverse, unit_vector, zeros


def e(n, i):
    return unit_vector(n, i - 1)


class TestBracket:
    def test_q5_chain_and_pairing(self):
        g = build_Q(2)
        assert bracket(g, e(5, 1), e(5, 2)) == e(5, 3)
        assert bracket(g, e(5, 2), e(5, 4)) == e(5, 5)
        assert bracket(g, e(5, 4), e(5, 2)) == tuple(-x for x in e(5, 5))

    def test_q7_pairing_sign(self):
        g = build_Q(3)
        assert bracket(g, e(7, 3), e(7, 5)) == tuple(-x for x in e(7, 7))
        assert bracket(g, e(7, 2), e(7, 6)) == e(7, 7)

    def test_antisymmetry(self, rng):
        g = build_Q(3)
        for _ in range(20):
            x = rand_vec(rng, 7)
            assert not any(bracket(g, x, x))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            bracket(build_Q(2), (1, 0), (0, 1))

    @pytest.mark.parametrize("name", sorted(LIE_EXAMPLES))
    def test_trilinear_and_jacobi_on_lie_algebras(self, name, rng):
        g = LIE_EXAMPLES[name]()
        n = g.dim
        for _ in range(200):
            x, y, z = rand_vec(rng, n), rand_vec(rng, n), rand_vec(rng, n)
            c = F(rng.randint(-3, 3), rng.randint(1, 3))
            xy = tuple(a + c * b for a, b in zip(x, y))
            assert bracket(g, xy, z) == tuple(a + c * b for a, b in zip(bracket(g, x, z), bracket(g, y, z)))
            cyc = zip(bracket(g, x, bracket(g, y, z)), bracket(g, y, bracket(g, z, x)), bracket(g, z, bracket(g, x, y)))
            assert not any(sum(t) for t in cyc)


class TestJacobi:
    def test_abelian(self):
        assert jacobi_holds(LieAlgebra.abelian(4))

    def test_hand_example(self):
        g = LieAlgebra.unchecked(3, {(1, 2): {1: 1}, (1, 3): {2: 1}})
        assert jacobi_violation(g) == (1, 2, 3)

    def test_checked_constructor_rejects(self):
        with pytest.raises(JacobiError) as info:
            LieAlgebra.from_brackets(3, {(1, 2): {1: 1}, (1, 3): {2: 1}})
        assert info.value.triple == (1, 2, 3)

    @pytest.mark.parametrize("m,triple", [(2, (1, 2, 3)), (3, (1, 3, 4)), (4, (1, 4, 5)), (5, (1, 5, 6))])
    def test_q_table_is_not_lie(self, m, triple):
        # the bracket table of Q_{2m+1} as written has a nonzero Jacobi sum;
        # the independent oracle reaches the same first triple
        g = build_Q(m)
        assert jacobi_violation(g) == triple
        assert first_jacobi_failure(dense_tensor(g.dim, g.brackets())) == triple

    def test_q5_jacobi_sum_value(self):
        g = build_Q(2)
        E = [e(5, i) for i in range(1, 6)]
        s = [sum(t) for t in zip(bracket(g, E[0], bracket(g, E[1], E[2])),
                                 bracket(g, E[1], bracket(g, E[2], E[0])),
                                 bracket(g, E[2], bracket(g, E[0], E[1])))]
        assert s == [0, 0, 0, 0, -1]

    def test_touching_filter(self):
        g = build_Q(2)
        assert jacobi_violation(g, touching=[4]) is None
        assert jacobi_violation(g, touching=[2]) == (1, 2, 3)


class TestSeries:
    def test_abelian(self):
        g = LieAlgebra.abelian(3)
        assert [S.dim for S in derived_series(g)] == [3, 0]
        assert [S.dim for S in lower_central_series(g)] == [3, 0]
        assert nilindex(g) == 1

    def test_q5(self):
        g = build_Q(2)
        assert [S.dim for S in derived_series(g)] == [5, 3, 0]
        assert [S.dim for S in lower_central_series(g)] == [5, 3, 2, 1, 0]

    def test_q7(self):
        assert [S.dim for S in lower_central_series(build_Q(3))] == [7, 5, 4, 3, 2, 1, 0]

    @pytest.mark.parametrize("m", [2, 3, 4, 5])
    def test_filiform_law_against_oracle(self, m):
        g = build_Q(m)
        n = g.dim
        dims = [S.dim for S in lower_central_series(g)]
        assert dims == [n] + [n - k - 1 for k in range(1, n)]
        assert dims == lcs_dims(n, g.brackets())
        assert is_nilpotent(g) and nilindex(g) == 2 * m

    @pytest.mark.parametrize("m,dims", [(2, [5, 3, 0]), (3, [7, 5, 1, 0]), (4, [9, 7, 1, 0])])
    def test_q_derived_series(self, m, dims):
        assert [S.dim for S in derived_series(build_Q(m))] == dims

    def test_solvable_not_nilpotent(self):
        g = LIE_EXAMPLES["solvable4"]()
        assert is_solvable(g) and not is_nilpotent(g)
        assert nilindex(g) is None

    def test_sl2(self):
        g = sl2()
        assert not is_solvable(g)
        assert [S.dim for S in derived_series(g)] == [3]

    def test_series_terms_stay_canonical(self):
        g = build_Q(3)
        for S in lower_central_series(g):
            assert Subspace.span(S.basis, 7) == S


class TestCenterAdIdeal:
    @pytest.mark.parametrize("m", [2, 3, 4, 5])
    def test_center_of_q(self, m):
        n = 2 * m + 1
        assert center(build_Q(m)) == Subspace.coordinate(n, [n - 1])

    def test_center_abelian(self):
        assert center(LieAlgebra.abelian(3)) == Subspace.full(3)

    def test_ad_examples(self):
        g = build_Q(2)
        assert ad(g, e(5, 5)) == zeros(5)
        assert ad(g, (0,) * 5) == zeros(5)
        want = [[0] * 5 for _ in range(5)]
        want[1][2] = want[2][3] = want[3][4] = 1
        assert ad(g, e(5, 1)) == tuple(tuple(F(v) for v in r) for r in want)

    def test_ad_linear(self, rng):
        g = build_Q(3)
        for _ in range(20):
            x, y = rand_vec(rng, 7), rand_vec(rng, 7)
            s = tuple(a + b for a, b in zip(x, y))
            assert ad(g, s) == add(ad(g, x), ad(g, y))

    @pytest.mark.parametrize("name", sorted(LIE_EXAMPLES))
    def test_ad_homomorphism_on_lie_algebras(self, name, rng):
        g = LIE_EXAMPLES[name]()
        for _ in range(100):
            x, y = rand_vec(rng, g.dim), rand_vec(rng, g.dim)
            assert ad(g, bracket(g, x, y)) == commutator(ad(g, x), ad(g, y))

    def test_ad_homomorphism_fails_on_q5(self):
        g = build_Q(2)
        x, y = e(5, 1), e(5, 2)
        assert ad(g, bracket(g, x, y)) != commutator(ad(g, x), ad(g, y))

    def test_ideals(self):
        g = build_Q(2)
        assert is_ideal(g, Subspace.coordinate(5, [2, 3, 4]))
        assert not is_ideal(g, Subspace.coordinate(5, [0]))
        assert is_ideal(g, Subspace.zero(5))


class TestSerialization:
    def test_round_trip(self):
        for m in (2, 3):
            g = build_Q(m)
            text = g.dumps()
            h = LieAlgebra.loads(text)
            assert h == g and h.dumps() == text

    def test_canonical_format(self):
        obj = build_Q(2).to_json_obj()
        assert obj["dim"] == 5
        assert obj["basis"] == ["e1", "e2", "e3", "e4", "e5"]
        assert [(b["a"], b["b"]) for b in obj["brackets"]] == [(1, 2), (1, 3), (1, 4), (2, 4)]
        assert obj["brackets"][3]["out"] == [{"c": 5, "coeff": "1"}]

    def test_coefficients_normalized_on_read(self):
        text = json.dumps({"dim": 3, "brackets": [{"a": 1, "b": 2, "out": [{"c": 3, "coeff": "4/8"}]}]})
        g = LieAlgebra.loads(text)
        assert g.to_json_obj()["brackets"][0]["out"][0]["coeff"] == "1/2"

    @pytest.mark.parametrize("obj,loc", [
        ({"dim": 0, "brackets": []}, "$.dim"),
        ({"dim": 3}, "$.brackets"),
        ({"dim": 3, "brackets": [{"a": 2, "b": 1, "out": []}]}, "$.brackets[0]"),
        ({"dim": 3, "brackets": [{"a": 1, "b": 4, "out": []}]}, "$.brackets[0].b"),
        ({"dim": 3, "brackets": [{"a": 1, "b": 2, "out": [{"c": 3, "coeff": "0.5"}]}]}, "$.brackets[0].out[0].coeff"),
        ({"dim": 3, "brackets": [{"a": 1, "b": 2, "out": [{"c": 3, "coeff": "1/0"}]}]}, "$.brackets[0].out[0].coeff"),
        ({"dim": 3, "brackets": [{"a": 1, "b": 2, "out": [{"c": 3, "coeff": "1"}, {"c": 3, "coeff": "2"}]}]},
         "$.brackets[0].out[1].c"),
        ({"dim": 2, "basis": ["x"], "brackets": []}, "$.basis"),
    ])
    def test_malformed_locations(self, obj, loc):
        with pytest.raises(MalformedAlgebraError) as info:
            LieAlgebra.from_json_obj(obj)
        assert info.value.location == loc

    def test_bad_json_location(self):
        with pytest.raises(MalformedAlgebraError) as info:
            LieAlgebra.loads('{"dim": 3,\n "brackets": [}')
        assert info.value.location.startswith("line 2")


class TestBasisChange:
    def test_restrict(self):
        g = build_Q(2)
        sub = restrict(g, [2, 3, 4])
        assert sub.dim == 3 and sub.bracket_count() == 0
        with pytest.raises(ValueError):
            restrict(g, [0, 1])

    def test_change_basis_identity(self):
        g = build_Q(2)
        assert change_basis(g, identity(5)) == g

    def test_change_basis_preserves_invariants(self, rng):
        g = model_filiform(5)
        for _ in range(5):
            P = tuple(tuple(F(1) if i == j else (rand_vec(rng, 1)[0] if j > i else F(0)) for j in range(5))
                      for i in range(5))
            h = change_basis(g, P)
            assert jacobi_holds(h)
            assert [S.dim for S in lower_central_series(h)] == [S.dim for S in lower_central_series(g)]
            assert change_basis(h, inverse(P)) == g
