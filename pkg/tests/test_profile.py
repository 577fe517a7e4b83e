import pytest

from src.services.config import Config, config_from_dict
from src.services.oracles import OracleSet
from src.services.profile import (
    AMPEST_BLOCK,
    ROOT,
    CallNode,
    Mode,
    build_node,
    build_profile,
    call_counts,
    count_rotations,
    estimate,
    evaluate,
    fold,
    resolve_policy,
    template_defs,
)
from src.services.resources import ZERO, GateKind, gates
from src.services.sizing import resolve_params
from src.services.synthesis import FIXED_BUDGET, RotationMode
from src.services.template_file import parse_template_file
from src.services.templates import Compose, TemplateError

HS_CALLS = 196_596
KERNEL_CALLS = HS_CALLS * 2_500_000_000_000 * 5 * 18


def test_anchor_counts(default_report):
    a = default_report.anchors
    assert a["grover_per_ampest"] == 16383
    assert a["hs_calls"] == HS_CALLS
    assert a["trotter_slices"] == 2_500_000_000_000
    assert a["suzuki_exponentials"] == HS_CALLS * 2_500_000_000_000 * 5
    assert a["hsimkernel_calls"] == KERNEL_CALLS
    assert a["oracle_A_queries"] == KERNEL_CALLS * 6
    assert a["hmag_calls"] == KERNEL_CALLS * 24
    assert a["oracle_b_queries"] == 4 * 16383 * 4
    assert a["oracle_R_queries"] == 2 * 16383 * 4
    assert a["integer_inverse_calls"] == HS_CALLS
    assert (a["n0"], a["n1"], a["n2"], a["n4"]) == (14, 24, 30, 65)
    assert a["registers"] == 287


def test_anchor_magnitudes(default_report):
    a = default_report.anchors
    assert a["suzuki_exponentials"] == pytest.approx(2.457e18, rel=1e-3)
    assert a["hsimkernel_calls"] == pytest.approx(4.4234e19, rel=1e-4)
    assert a["oracle_A_queries"] == pytest.approx(2.654e20, rel=1e-3)
    assert a["hmag_calls"] == pytest.approx(1.062e21, rel=1e-3)


def test_excl_oracles_against_published_totals(default_report):
    v = default_report.excl_oracles
    assert v.width == 341
    assert v.ancilla_max == 281
    assert v.total_gates == pytest.approx(3.34e25, rel=0.05)
    assert v.depth == pytest.approx(3.30e25, rel=0.05)
    assert v.t_count == pytest.approx(1.29e25, rel=0.05)
    assert v.measurements == pytest.approx(8.23e21, rel=2e-3)


def test_excl_oracles_model_values(default_report):
    v = default_report.excl_oracles
    assert v.total_gates == pytest.approx(KERNEL_CALLS * 736_616, rel=1e-3)
    assert v.t_count == pytest.approx(KERNEL_CALLS * 283_122, rel=1e-3)
    assert v.measurements == pytest.approx(KERNEL_CALLS * 186, rel=1e-3)
    assert v.t_depth <= v.depth
    assert v.count(GateKind.H) > v.count(GateKind.S) > v.count(GateKind.CNOT)


def test_incl_oracles(default_report):
    v = default_report.incl_oracles
    # Oracle b and Oracle R ancillas live side by side in the swap test
    assert v.width == 287 + 204_765_119 + 110_576_558
    # the headline width is quoted to one significant figure
    assert f"{v.width:.0e}" == "3e+08"
    assert v.total_gates == pytest.approx(1.96e29, rel=0.01)
    assert v.ancilla_max == v.width - 60


def test_incl_dominates_excl(default_report):
    incl, excl = default_report.incl_oracles, default_report.excl_oracles
    for field in ("width", "depth", "t_depth", "measurements", "ancilla_cycles"):
        assert getattr(incl, field) >= getattr(excl, field)
    assert incl.total_gates > 1000 * excl.total_gates


def test_report_bookkeeping(default_report):
    assert default_report.registers == 287
    assert default_report.data_qubits == 60
    assert not default_report.parallel_ampest
    assert default_report.vector(Mode.EXCL) is default_report.excl_oracles
    seconds = default_report.run_time_seconds(Mode.EXCL)
    assert seconds == pytest.approx(default_report.excl_oracles.depth * 1e-9)
    assert default_report.run_time_years(Mode.EXCL) == pytest.approx(seconds / 31_557_600)


def test_parallel_amplitude_estimation(default_config, default_report):
    par_report = estimate(default_config, parallel_ampest=True)
    v = par_report.excl_oracles
    assert par_report.parallel_ampest
    assert par_report.registers == 4 * 287
    assert v.width == 4 * 287 + 29 + 54 + 2 * 54
    assert v.total_gates == default_report.excl_oracles.total_gates
    assert v.depth < default_report.excl_oracles.depth / 2


def test_r_override_scales_hs_dominated_totals(default_config, default_report):
    doubled = estimate(
        config_from_dict({"trotter": {"r_override": 5_000_000_000_000}})
    )
    ratio = doubled.excl_oracles.total_gates / default_report.excl_oracles.total_gates
    assert ratio == pytest.approx(2.0, rel=1e-3)


def test_small_problem_is_same_order(small_config, default_report):
    small = estimate(small_config)
    assert small.params.n2 == 6
    for mode in Mode:
        ratio = small.vector(mode).total_gates / default_report.vector(mode).total_gates
        assert 0.5 <= ratio <= 1.0


def test_mix_true_moves_oracle_cost():
    all_false = estimate(config_from_dict({"oracles": {"mix_true": 0}}))
    all_true = estimate(config_from_dict({"oracles": {"mix_true": 6}}))
    assert all_true.incl_oracles.total_gates > all_false.incl_oracles.total_gates
    assert all_true.excl_oracles == all_false.excl_oracles


def test_oracle_scale_what_if(default_report):
    scaled = estimate(config_from_dict({"oracles": {"scale": 0.1}}))
    assert scaled.excl_oracles == default_report.excl_oracles
    assert scaled.incl_oracles.total_gates < default_report.incl_oracles.total_gates / 2


def test_call_counts_propagate_multiplicities():
    leaf = CallNode("leaf", leaf=gates(h=1, width=1))
    mid = CallNode("mid", ((leaf, 3),))
    root = CallNode("root", ((mid, 2), (leaf, 1)))
    counts = call_counts(root)
    assert counts == {"root": 1, "mid": 2, "leaf": 7}
    assert fold(root).count(GateKind.H) == 7


def test_fold_par_stacks_children():
    leaf = CallNode("leaf", leaf=gates(h=1, width=2))
    root = CallNode("root", ((leaf, 3),), compose=Compose.PAR)
    v = fold(root)
    assert v.width == 6
    assert v.depth == 1


def _overrides(text):
    return parse_template_file(text)


def test_overrides_replace_blocks(default_params):
    tree = build_profile(
        default_params,
        oracles=OracleSet.from_config(),
        overrides=_overrides("[template qlsa_main]\nchild = mcnot(3) : 2\n"),
    )
    assert fold(tree, Mode.EXCL).t_count == 42


def test_oracle_only_tree_folds_to_zero(default_params):
    tree = build_profile(
        default_params,
        overrides=_overrides("[template qlsa_main]\nchild = oracle_b : 1\n"),
    )
    report = evaluate(tree, default_params)
    assert report.excl_oracles == ZERO
    assert report.incl_oracles.width == 287 + 204_765_119


def test_zero_multiplicity_children_are_skipped(default_params):
    tree = build_profile(
        default_params,
        overrides=_overrides("[template qlsa_main]\nchild = nothing_here : 0\nchild = h : 1\n"),
    )
    assert fold(tree).total_gates == 1


@pytest.mark.parametrize(
    "text, message",
    [
        ("[template qlsa_main]\nchild = missing : 1\n", "unresolved"),
        ("[template qlsa_main]\nchild = loop : 1\n[template loop]\nchild = qlsa_main : 1\n", "cycle"),
        ("[template qlsa_main]\nchild = h : n7\n", "line 2"),
        ("[template qlsa_main]\nchild = oracle_b(3) : 1\n", "takes no arguments"),
        ("[template qlsa_main]\nchild = mcnot : 1\n", "argument"),
    ],
)
def test_tree_errors(default_params, text, message):
    with pytest.raises(TemplateError, match=message):
        build_profile(default_params, overrides=_overrides(text))


def test_parallel_flag_only_touches_ampest_block():
    defs = template_defs(parallel_ampest=True)
    assert defs[AMPEST_BLOCK].compose is Compose.PAR
    assert template_defs()[AMPEST_BLOCK].compose is Compose.SEQ
    assert ROOT in defs


def test_build_node_for_a_subtree(default_params):
    kernel = build_node("hsim_kernel", default_params)
    assert fold(kernel, Mode.EXCL).total_gates == 736_616
    assert build_node("oracle_b", default_params).leaf.total_gates == 14_525_927_206


def test_count_rotations_on_small_tree(default_params):
    overrides = _overrides("[template qlsa_main]\nchild = crz : 3\nchild = cphase(3, 0) : 1\n")
    assert count_rotations(default_params, OracleSet.from_config(), overrides) == 10


def test_fowler_distance_derived_from_rotation_count():
    cfg = config_from_dict({"rotation": {"mode": "fowler"}})
    params = resolve_params(cfg)
    oracles = OracleSet.from_config(cfg.oracles)
    policy = resolve_policy(cfg, params, oracles)
    n_rot = count_rotations(params, oracles)
    assert policy.mode is RotationMode.FOWLER_FIT
    assert policy.target_distance == pytest.approx(0.01 / n_rot)
    assert n_rot == pytest.approx(KERNEL_CALLS * 6704, rel=1e-3)


def test_fixed_policy_passes_through(default_config, default_params):
    policy = resolve_policy(default_config, default_params, OracleSet.from_config())
    assert policy == FIXED_BUDGET
    assert Config().rotation.mode == "fixed"
