import numpy as np
import pytest

from ewcalc.algebra import Module, regular_module, validate_algebra
from ewcalc.decompose import (
    center_basis,
    central_primitive_idempotents,
    is_semisimple,
    module_multiplicities,
    simple_blocks,
    simple_dims,
)
from ewcalc.doubles import (
    cyclic_group,
    double_algebra,
    double_simple_dims,
    symmetric_group_3,
)
from ewcalc.hopf import (
    cyclic_group_algebra,
    sweedler_hopf,
    symmetric3_group_algebra,
)
from ewcalc.linalg import DEFAULT_PRIME

P = DEFAULT_PRIME


def test_cyclic_group_algebras_split():
    assert simple_dims(cyclic_group_algebra(P, 2).algebra) == [1, 1]
    assert simple_dims(cyclic_group_algebra(P, 3).algebra) == [1, 1, 1]


def test_s3_block_structure():
    A = symmetric3_group_algebra(P).algebra
    assert center_basis(A).shape[1] == 3
    assert simple_dims(A) == [1, 1, 2]
    es = central_primitive_idempotents(A)
    # the symmetrizer e = (1/6) sum_g g is among them
    inv6 = pow(6, P - 2, P)
    assert any(np.all(e == inv6 * np.ones(6, dtype=np.int64) % P) for e in es)


def test_sweedler_is_not_semisimple():
    A = sweedler_hopf(P).algebra
    assert not is_semisimple(A)
    with pytest.raises(ValueError, match="not semisimple"):
        central_primitive_idempotents(A)


def test_regular_module_multiplicities_match_dims():
    A = symmetric3_group_algebra(P).algebra
    blocks = simple_blocks(A)
    mults = module_multiplicities(A, regular_module(A), blocks)
    # regular module contains each simple with multiplicity = its dimension
    assert mults == [b.dim for b in blocks]


def test_trivial_module_multiplicity():
    A = symmetric3_group_algebra(P).algebra
    triv = Module(A, np.ones((6, 1, 1), dtype=np.int64), name="triv")
    blocks = simple_blocks(A)
    mults = module_multiplicities(A, triv, blocks)
    assert sum(m * b.dim for m, b in zip(mults, blocks)) == 1
    assert sorted(mults) == [0, 0, 1]


def test_double_simple_dims_from_characters():
    assert double_simple_dims(cyclic_group(2)) == [1, 1, 1, 1]
    assert double_simple_dims(cyclic_group(3)) == [1] * 9
    assert double_simple_dims(symmetric_group_3()) == [1, 1, 2, 2, 2, 2, 3, 3]


@pytest.mark.parametrize("G", [cyclic_group(2), cyclic_group(3), symmetric_group_3()])
def test_double_algebra_decomposition_matches_characters(G):
    # two fully independent routes to the simple dimensions of D(G)
    A = double_algebra(G, P)
    assert validate_algebra(A) == []
    assert simple_dims(A) == double_simple_dims(G)
