"""Field arithmetic and secrecy-map tests.

The multiplication oracle here is an independent implementation: schoolbook
polynomial multiplication over coefficient lists followed by long division,
sharing no code with the library's shift-and-XOR routine.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wiretaplab.gf2q import (
    REDUCTION_POLYS,
    BitString,
    FieldSpec,
    encode_phi,
    field_inv,
    field_mul,
    hash_f,
    mul_by_table,
    two_universality_check,
)


def _to_coeffs(value: int) -> list[int]:
    return [(value >> i) & 1 for i in range(value.bit_length())]


def _from_coeffs(coeffs: list[int]) -> int:
    return sum(c << i for i, c in enumerate(coeffs))


def oracle_mul(a: int, b: int, poly: int, q: int) -> int:
    """Coefficient-list polynomial product reduced by long division."""
    ca, cb = _to_coeffs(a), _to_coeffs(b)
    prod = [0] * (len(ca) + len(cb))
    for i, x in enumerate(ca):
        for j, y in enumerate(cb):
            prod[i + j] ^= x & y
    cm = _to_coeffs(poly)
    deg_m = len(cm) - 1
    for top in range(len(prod) - 1, deg_m - 1, -1):
        if prod[top]:
            for j, y in enumerate(cm):
                prod[top - deg_m + j] ^= y
    return _from_coeffs(prod[:q]) if prod else 0


def oracle_inv(a: int, f: FieldSpec) -> int:
    for b in range(1, f.order):
        if oracle_mul(a, b, f.reduction_poly, f.q) == 1:
            return b
    raise AssertionError(f"no inverse found for {a}")


class TestPolynomialTable:
    def test_spec_entries(self):
        assert REDUCTION_POLYS[4] == 0b10011  # x^4 + x + 1
        assert REDUCTION_POLYS[8] == 0b100011011  # x^8 + x^4 + x^3 + x + 1

    def test_table_is_lexicographically_smallest_irreducible(self):
        def poly_mod(a, m):
            dm = m.bit_length() - 1
            while a and a.bit_length() - 1 >= dm:
                a ^= m << (a.bit_length() - 1 - dm)
            return a

        def irreducible(p, deg):
            return all(
                poly_mod(p, d) != 0
                for dd in range(1, deg // 2 + 1)
                for d in range(1 << dd, 1 << (dd + 1))
            )

        for q, poly in REDUCTION_POLYS.items():
            assert poly >> q == 1
            assert irreducible(poly, q)
            for smaller in range(1 << q, poly):
                assert not irreducible(smaller, q)

    def test_reducible_polynomial_rejected(self):
        # x^4 + 1 = (x+1)^4 over GF(2)
        with pytest.raises(ValueError, match="reducible"):
            FieldSpec(4, 0b10001)

    def test_wrong_degree_rejected(self):
        with pytest.raises(ValueError, match="degree"):
            FieldSpec(4, 0b1011)


class TestFieldMul:
    def test_spec_example_q4(self):
        f = FieldSpec(4)
        assert field_mul(0b0010, 0b1001, f) == 0b0001
        assert oracle_mul(0b0010, 0b1001, f.reduction_poly, 4) == 0b0001

    @pytest.mark.parametrize("q", [2, 3, 4, 5, 8])
    def test_identity_and_zero(self, q):
        f = FieldSpec(q)
        for a in range(f.order):
            assert field_mul(a, 1, f) == a
            assert field_mul(a, 0, f) == 0

    @pytest.mark.parametrize("q", [2, 3, 4, 6])
    def test_matches_oracle_exhaustively(self, q):
        f = FieldSpec(q)
        for a in range(f.order):
            for b in range(f.order):
                assert field_mul(a, b, f) == oracle_mul(a, b, f.reduction_poly, q)

    @given(st.integers(9, 16), st.data())
    @settings(max_examples=60, deadline=None)
    def test_matches_oracle_random_wide(self, q, data):
        f = FieldSpec(q)
        a = data.draw(st.integers(0, f.order - 1))
        b = data.draw(st.integers(0, f.order - 1))
        assert field_mul(a, b, f) == oracle_mul(a, b, f.reduction_poly, q)

    @pytest.mark.parametrize("q", list(range(1, 9)))
    def test_field_axioms_exhaustive(self, q):
        """Associativity, commutativity, distributivity, unique inverses."""
        f = FieldSpec(q)
        order = f.order
        table = np.empty((order, order), dtype=np.uint32)
        for a in range(order):
            table[a] = mul_by_table(a, f)
        assert np.array_equal(table, table.T)  # commutativity
        idx = np.arange(order, dtype=np.uint32)
        xor_all = idx[:, None] ^ idx[None, :]
        for a in range(order):
            # a*(b*c) == (a*b)*c for all b, c
            assert np.array_equal(table[a][table], table[table[a]])
            # a*(b^c) == (a*b)^(a*c)
            assert np.array_equal(table[a][xor_all], table[a][:, None] ^ table[a][None, :])
        # every nonzero row is a permutation hitting 1 exactly once
        for a in range(1, order):
            row = table[a]
            assert len(set(row.tolist())) == order
            assert int((row == 1).sum()) == 1

    @given(st.integers(9, 16), st.data())
    @settings(max_examples=40, deadline=None)
    def test_axioms_random_wide_fields(self, q, data):
        f = FieldSpec(q)
        a = data.draw(st.integers(0, f.order - 1))
        b = data.draw(st.integers(0, f.order - 1))
        c = data.draw(st.integers(0, f.order - 1))
        assert field_mul(a, b, f) == field_mul(b, a, f)
        assert field_mul(field_mul(a, b, f), c, f) == field_mul(a, field_mul(b, c, f), f)
        assert field_mul(a, b ^ c, f) == field_mul(a, b, f) ^ field_mul(a, c, f)

    @pytest.mark.parametrize("q", list(range(1, 13)))
    def test_mul_by_fixed_element_is_bijection(self, q):
        f = FieldSpec(q)
        for a in range(1, f.order):
            assert len(np.unique(mul_by_table(a, f))) == f.order


class TestFieldInv:
    def test_identity_self_inverse(self):
        for q in (1, 3, 8, 16):
            assert field_inv(1, FieldSpec(q)) == 1

    def test_spec_example_q4(self):
        f = FieldSpec(4)
        assert field_inv(0b0010, f) == 0b1001
        assert oracle_inv(0b0010, f) == 0b1001

    def test_zero_raises(self):
        with pytest.raises(ZeroDivisionError):
            field_inv(0, FieldSpec(4))

    @pytest.mark.parametrize("q", [2, 3, 5, 6])
    def test_matches_exhaustive_search(self, q):
        f = FieldSpec(q)
        for a in range(1, f.order):
            inv = field_inv(a, f)
            assert field_mul(a, inv, f) == 1
            assert inv == oracle_inv(a, f)


class TestHash:
    def test_identity_seed_passes_top_bits(self):
        f = FieldSpec(3)
        assert hash_f(1, 0b110, 1, f).value == 1
        assert hash_f(1, 0b110, 2, f) == BitString(0b11, 2)

    def test_spec_example_table_seed(self):
        # q=3 field, seed 010: s*v for v=010 is x*x = x^2 = 100, top bit 1
        f = FieldSpec(3)
        s = f.seed_from_string("010")
        assert hash_f(s, 0b010, 1, f).value == 1

    def test_zero_seed_rejected(self):
        with pytest.raises(ValueError, match="seed"):
            hash_f(0, 3, 1, FieldSpec(3))

    def test_oversized_k_rejected(self):
        with pytest.raises(ValueError, match="k"):
            hash_f(1, 3, 4, FieldSpec(3))

    def test_regularity_exhaustive_q4(self):
        """Every seed partitions the domain into equal-size cosets."""
        f = FieldSpec(4)
        k = 2
        for s in range(1, f.order):
            counts = {}
            for v in range(f.order):
                m = hash_f(s, v, k, f).value
                counts[m] = counts.get(m, 0) + 1
            assert all(c == 1 << (f.q - k) for c in counts.values())


class TestEncodePhi:
    def test_spec_example(self):
        f = FieldSpec(3)
        s = f.seed_from_string("010")
        assert field_inv(s, f) == 0b101
        v = encode_phi(s, BitString(1, 1), BitString(0, 2), f)
        assert v == 0b010

    def test_identity_seed_concatenates(self):
        f = FieldSpec(5)
        v = encode_phi(1, BitString(0b10, 2), BitString(0b011, 3), f)
        assert v == 0b10011

    def test_zero_seed_rejected(self):
        with pytest.raises(ValueError, match="seed"):
            encode_phi(0, BitString(1, 1), BitString(0, 2), FieldSpec(3))

    @pytest.mark.parametrize("q", list(range(1, 11)))
    def test_round_trip_exhaustive(self, q):
        """hash_f(s, encode_phi(s, m, b)) == m for every seed, k, m, b."""
        f = FieldSpec(q)
        for k in range(1, q + 1):
            shift = q - k
            for s in range(1, f.order):
                inv_table = mul_by_table(field_inv(s, f), f)
                hash_table = mul_by_table(s, f)
                words = np.arange(f.order, dtype=np.uint32)
                recovered = hash_table[inv_table[words]] >> shift
                assert np.array_equal(recovered, words >> shift)

    @given(
        st.integers(1, 16),
        st.data(),
    )
    @settings(max_examples=300, deadline=None)
    def test_round_trip_random_wide(self, q, data):
        f = FieldSpec(q)
        k = data.draw(st.integers(1, q))
        s = data.draw(st.integers(1, f.order - 1))
        m = data.draw(st.integers(0, (1 << k) - 1))
        b = data.draw(st.integers(0, (1 << (q - k)) - 1))
        v = encode_phi(s, BitString(m, k), BitString(b, q - k), f)
        assert hash_f(s, v, k, f).value == m

    def test_coset_uniformity(self):
        """For fixed s and m, phi hits every element of the coset once."""
        f = FieldSpec(6)
        k = 2
        for s in (1, 0b000011, 0b100001):
            for m in range(1 << k):
                images = {
                    encode_phi(s, BitString(m, k), BitString(b, f.q - k), f)
                    for b in range(1 << (f.q - k))
                }
                assert len(images) == 1 << (f.q - k)
                assert all(hash_f(s, v, k, f).value == m for v in images)


class TestTwoUniversality:
    @pytest.mark.parametrize("q,k", [(4, 1), (4, 4), (8, 4)])
    def test_bound_holds(self, q, k):
        f = FieldSpec(q)
        slack = 1.0 / (f.order - 1)
        assert two_universality_check(f, k) <= 2.0**-k * (1.0 + slack) + 1e-12

    def test_full_width_hash_never_collides(self):
        assert two_universality_check(FieldSpec(2), 2) == 0.0

    def test_budget_guard(self):
        with pytest.raises(ValueError, match="budget"):
            two_universality_check(FieldSpec(13), 1)


class TestBitString:
    def test_format_parse_round_trip(self):
        b = BitString.from_string("00101")
        assert str(b) == "00101"
        assert b.length == 5 and b.value == 5

    def test_concat(self):
        assert BitString(0b1, 1).concat(BitString(0b00, 2)) == BitString(0b100, 3)

    def test_overflow_rejected(self):
        with pytest.raises(ValueError):
            BitString(4, 2)

    def test_seed_string_round_trip(self):
        f = FieldSpec(7)
        for text in ("0001101", "1000000"):
            assert f.seed_to_string(f.seed_from_string(text)) == text
