import numpy as np
import pytest

from codec.octree import (
    NO_FLOW,
    Cuboid,
    FlowKind,
    FlowModel,
    InvalidFlowError,
    SegmentationError,
    brute_force_prunings,
    best_flow,
    candidate_flows,
    compensate,
    cuboid_cost,
    decompensate,
    segment,
    translation,
)
from codec.wavelet import GroupOfFrames, QuantSpec, distortion, lambda_of
from conftest import make_random_gof, make_static_texture, make_translating_dot, make_two_region

ROOT8 = Cuboid(origin=(0, 0, 0), dims=(8, 8, 8))


def constant_gof(value, shape=(2, 2, 2)):
    return GroupOfFrames(np.full(shape, value, dtype=np.uint8))


def test_zero_cost_for_mid_gray():
    cost = cuboid_cost(constant_gof(128), Cuboid((0, 0, 0), (2, 2, 2)), NO_FLOW, QuantSpec(delta=3.0))
    assert (cost.D, cost.R, cost.cost) == (0.0, 0.0, 0.0)


def test_constant_136_block():
    cost = cuboid_cost(constant_gof(136), Cuboid((0, 0, 0), (2, 2, 2)), NO_FLOW, QuantSpec(delta=1.0))
    assert cost.R == 7
    assert cost.D == pytest.approx(8 * (23 / 2 ** 1.5 - 8) ** 2, rel=1e-9)
    assert cost.D == pytest.approx(0.139, abs=1e-3)
    assert cost.cost == pytest.approx(cost.D + 0.75, rel=1e-12)
    assert cost.cost == pytest.approx(0.889, abs=1e-3)


def test_compensation_clamps_at_edges():
    block = np.arange(32.0).reshape(2, 4, 4)
    shifted = compensate(block, translation(1, 0))
    np.testing.assert_array_equal(shifted[0], block[0])
    np.testing.assert_array_equal(shifted[1, :3], block[1, 1:])
    np.testing.assert_array_equal(shifted[1, 3], [28, 29, 30, 31])


def test_decompensation_restores_interior():
    block = np.random.default_rng(4).normal(size=(4, 8, 8))
    f = translation(2, -1)
    restored = decompensate(compensate(block, f), f)
    for t in range(4):
        np.testing.assert_array_equal(restored[t, 2 * t:, :8 - t], block[t, 2 * t:, :8 - t])


def test_candidate_order():
    flows = candidate_flows(1)
    assert flows[0] == NO_FLOW
    assert flows[1] == translation(-1, -1)
    assert flows[-1] == translation(1, 1)
    assert len(flows) == 10


def test_flow_parameters_cost_bits():
    assert NO_FLOW.param_count == 0
    assert translation(1, 0).param_count == 2
    assert str(translation(1, 0)) == "ConstTranslation(1,0)"


def test_out_of_window_flow_rejected():
    gof = make_static_texture()
    with pytest.raises(InvalidFlowError):
        cuboid_cost(gof, ROOT8, translation(3, 0), QuantSpec(delta=1.0))


def test_reserved_flow_rejected():
    gof = make_static_texture()
    with pytest.raises(InvalidFlowError):
        cuboid_cost(gof, ROOT8, FlowModel(FlowKind.RESERVED2), QuantSpec(delta=1.0))


def test_static_texture_prefers_no_flow(static_gof):
    q = QuantSpec(delta=1.0)
    flow, cost = best_flow(static_gof, ROOT8, q)
    assert flow == NO_FLOW
    zero_shift = cuboid_cost(static_gof, ROOT8, translation(0, 0), q)
    assert zero_shift.D == cost.D
    assert zero_shift.R == cost.R + 14


def test_translating_dot_prefers_translation(dot_gof):
    root = Cuboid((0, 0, 0), (4, 8, 8))
    q = QuantSpec(delta=1.0)
    flow, cost = best_flow(dot_gof, root, q)
    assert flow == translation(1, 0)
    # 13 ненульових коефіцієнтів нерухомої точки + 2 параметри руху
    assert cost.R == 7 * 15
    assert cost.cost < cuboid_cost(dot_gof, root, NO_FLOW, q).cost


def test_best_flow_never_worse_than_no_flow(two_region_gof):
    q = QuantSpec(delta=2.0)
    for c in ROOT8.children():
        _, cost = best_flow(two_region_gof, c, q)
        assert cost.cost <= cuboid_cost(two_region_gof, c, NO_FLOW, q).cost


def test_children_skip_minimum_axes():
    assert len(Cuboid((0, 0, 0), (4, 4, 4)).children()) == 8
    assert len(Cuboid((0, 0, 0), (2, 4, 4)).children()) == 4
    assert len(Cuboid((0, 0, 0), (2, 2, 8)).children()) == 2
    assert not Cuboid((0, 0, 0), (2, 2, 2)).can_split()


def test_uniform_gof_is_root_only():
    tree = segment(constant_gof(90, (8, 8, 8)), QuantSpec(delta=1.0), max_depth=2, search_range=1)
    assert len(tree.leaves) == 1
    assert tree.leaves[0].cuboid == ROOT8


def test_minimum_gof_is_root_only():
    tree = segment(make_random_gof((2, 2, 2)), QuantSpec(delta=1.0), max_depth=2)
    assert len(tree.leaves) == 1


def test_too_small_gof():
    with pytest.raises(SegmentationError):
        segment(make_random_gof((1, 4, 4)), QuantSpec(delta=1.0))


@pytest.mark.parametrize("seed", range(20))
def test_segment_matches_exhaustive_pruning(seed):
    gof = make_random_gof((8, 8, 8), seed=seed, low=40 + 5 * seed, high=120 + 5 * seed)
    q = QuantSpec(delta=4.0 + seed % 8)
    tree = segment(gof, q, max_depth=2)
    best, count = brute_force_prunings(tree.root)
    assert count == 257
    assert tree.total_cost == pytest.approx(best, rel=1e-12)
    assert tree.root.best_cost == pytest.approx(best, rel=1e-12)


def test_two_region_matches_exhaustive_pruning(two_region_gof):
    tree = segment(two_region_gof, QuantSpec(delta=2.0), max_depth=1, search_range=1)
    best, count = brute_force_prunings(tree.root)
    assert count == 2
    assert tree.total_cost == pytest.approx(best, rel=1e-12)


def test_leaves_partition_padded_volume():
    gof = make_random_gof((3, 6, 5), seed=3)
    tree = segment(gof, QuantSpec(delta=2.0), max_depth=2, search_range=1)
    coverage = np.zeros(gof.padded_dims, dtype=int)
    for leaf in tree.leaves:
        coverage[leaf.cuboid.slices] += 1
    assert (coverage == 1).all()


def test_cost_accounting(two_region_gof):
    q = QuantSpec(delta=3.0)
    tree = segment(two_region_gof, q, max_depth=2, search_range=1)
    lam = lambda_of(q)
    assert tree.total_cost == pytest.approx(tree.total_distortion + lam * tree.total_rate, rel=1e-9)
    assert distortion(two_region_gof.samples, tree.reconstruction()) == pytest.approx(tree.total_distortion, rel=1e-9)


@pytest.mark.parametrize("make", [make_static_texture, make_translating_dot, make_two_region])
def test_rate_distortion_monotonic(make):
    gof = make()
    previous = None
    for delta in (1.0, 2.0, 4.0, 8.0):
        tree = segment(gof, QuantSpec(delta=delta), max_depth=2, search_range=1)
        current = (tree.total_rate, tree.total_distortion)
        if previous is not None:
            assert current[0] <= previous[0]
            assert current[1] >= previous[1] - 1e-9
        previous = current


def test_flow_histogram(dot_gof):
    tree = segment(dot_gof, QuantSpec(delta=1.0), max_depth=0)
    assert tree.flow_histogram() == {"ConstTranslation(1,0)": 1}
