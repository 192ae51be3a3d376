import numpy as np
import pytest

from eigenform_lab import (
    FractalTriple,
    builtin,
    builtin_names,
    cell_graph,
    check_weights,
    connectivity_flags,
    validate,
)


def test_builtin_gasket_shape(gasket):
    assert (gasket.N, gasket.k, gasket.num_vertices) == (3, 3, 6)
    assert gasket.cells == ((0, 3, 4), (3, 1, 5), (4, 5, 2))


def test_builtin_vicsek_shape(vicsek):
    assert (vicsek.N, vicsek.k, vicsek.num_vertices) == (4, 5, 16)


def test_builtin_tree_gasket_shape(tree_gasket):
    assert (tree_gasket.N, tree_gasket.k, tree_gasket.num_vertices) == (3, 3, 7)


def test_builtins_all_valid():
    for name in builtin_names():
        assert validate(builtin(name)) == [], name


def test_unknown_builtin():
    with pytest.raises(ValueError, match="unknown builtin"):
        builtin("sponge")


def test_validate_broken_fixed_point(gasket):
    broken = FractalTriple("broken", 3, 3, 6, ((3, 3, 4), (3, 1, 5), (4, 5, 2)))
    report = validate(broken)
    assert any("fixed-point condition at j=0" in v for v in report)


def test_validate_disconnected_cells():
    broken = FractalTriple("split", 2, 2, 4, ((0, 2), (3, 1)))
    report = validate(broken)
    assert any("cell graph disconnected" in v for v in report)


def test_validate_noninjective_cell():
    broken = FractalTriple("dup", 3, 3, 6, ((0, 3, 3), (3, 1, 5), (4, 5, 2)))
    assert any("not injective" in v for v in validate(broken))


def test_validate_boundary_reuse():
    # vertex 1 shows up inside cell 0
    broken = FractalTriple("reuse", 3, 3, 6, ((0, 1, 4), (3, 1, 5), (4, 5, 2)))
    report = validate(broken)
    assert any("boundary vertex 1 appears in cell 0" in v for v in report)


def test_validate_uncovered_vertex():
    broken = FractalTriple("gap", 3, 3, 7, ((0, 3, 4), (3, 1, 5), (4, 5, 2)))
    assert any("vertex id 6 does not occur" in v for v in validate(broken))


def test_boundary_vertex_occurs_only_in_own_cell():
    for name in builtin_names():
        t = builtin(name)
        for j in range(t.N):
            owners = [i for i in range(t.k) if j in t.cells[i]]
            assert owners == [j]


def test_cell_graph_gasket(gasket):
    assert cell_graph(gasket) == frozenset({(0, 1), (0, 2), (1, 2)})


def test_cell_graph_vicsek_star(vicsek):
    assert cell_graph(vicsek) == frozenset({(0, 4), (1, 4), (2, 4), (3, 4)})


def test_cell_graph_single_cell():
    lonely = FractalTriple("one", 2, 1, 2, ((0, 1),))
    assert cell_graph(lonely) == frozenset()


def test_connectivity_flags():
    assert connectivity_flags(builtin("vicsek")) == (True, True)
    assert connectivity_flags(builtin("tree_gasket")).a_connected is False
    gasket_flags = connectivity_flags(builtin("gasket"))
    assert gasket_flags.o_connected is False
    assert gasket_flags.a_connected is True


def test_o_connected_implies_a_connected():
    for name in builtin_names():
        flags = connectivity_flags(builtin(name))
        assert not flags.o_connected or flags.a_connected


def test_check_weights(gasket):
    assert np.allclose(check_weights(gasket, [1, 2, 3]), [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        check_weights(gasket, [1.0, 2.0])
    with pytest.raises(ValueError):
        check_weights(gasket, [1.0, 0.0, 1.0])
    with pytest.raises(ValueError):
        check_weights(gasket, [1.0, -1.0, 1.0])
