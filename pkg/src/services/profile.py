from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping

from .config import Config
from .oracles import OracleSet
from .resources import (
    ZERO,
    ResourceVector,
    par_all,
    repeat,
    seq_all,
    stack,
)
from .sizing import (
    ProblemParams,
    data_qubits,
    expression_env,
    register_total,
    resolve_params,
)
from .synthesis import FIXED_BUDGET, RotationMode, RotationPolicy, per_rotation_budget
from .template_file import ExpressionError, evaluate_expression, load_template_file
from .templates import (
    ChildRef,
    Compose,
    NodeTag,
    TemplateDef,
    TemplateError,
    template_library,
)

logger = logging.getLogger(__name__)

BUNDLED_TEMPLATES = (
    Path(__file__).resolve().parent.parent / "data" / "qlsa_profile.templates"
)
ROOT = "qlsa_main"
AMPEST_BLOCK = "amplitude_estimations"
SECONDS_PER_YEAR = 365.25 * 24 * 3600


class Mode(str, Enum):
    INCL = "incl"
    EXCL = "excl"


@dataclass(frozen=True, eq=False)
class CallNode:
    """
    One materialised template call. Nodes are shared by reference wherever the same
    call appears, so a subtree is folded once and scaled by its multiplicity.
    """

    name: str
    children: tuple[tuple[CallNode, int], ...] = ()
    leaf: ResourceVector | None = None
    compose: Compose = Compose.SEQ
    tag: NodeTag = NodeTag.CORE

    def walk(self) -> Iterable[CallNode]:
        """Every distinct node once, parents before children."""
        seen: set[int] = set()
        order: list[CallNode] = []

        def visit(n: CallNode) -> None:
            if id(n) in seen:
                return
            seen.add(id(n))
            for c, _ in n.children:
                visit(c)
            order.append(n)

        visit(self)
        return reversed(order)


@lru_cache(maxsize=1)
def _bundled_defs() -> tuple[TemplateDef, ...]:
    return tuple(load_template_file(BUNDLED_TEMPLATES))


def _call_name(name: str, args: tuple[int, ...]) -> str:
    return f"{name}({', '.join(map(str, args))})" if args else name


class _Materialiser:
    def __init__(
        self,
        defs: Mapping[str, TemplateDef],
        env: Mapping[str, int],
        policy: RotationPolicy,
        oracles: Mapping[str, ResourceVector],
    ):
        self.defs = defs
        self.env = env
        self.policy = policy
        self.oracles = oracles
        self.library = template_library()
        self.memo: dict[tuple[str, tuple[int, ...]], CallNode] = {}
        self.active: list[str] = []

    def _eval(self, owner: str, ref: ChildRef, text: str) -> int:
        try:
            return evaluate_expression(text, self.env)
        except ExpressionError as e:
            raise TemplateError(
                f"template {owner}, line {ref.line}, child {ref.name}: {e}"
            ) from e

    def node(self, name: str, args: tuple[int, ...] = ()) -> CallNode:
        key = (name, args)
        if key in self.memo:
            return self.memo[key]
        if name in self.active:
            cycle = " -> ".join(self.active[self.active.index(name):] + [name])
            raise TemplateError(f"template cycle: {cycle}")

        if name in self.defs:
            node = self._tree(self.defs[name], args)
        elif name in self.oracles:
            if args:
                raise TemplateError(f"oracle {name} takes no arguments")
            tag = NodeTag.INTEGER_INVERSE if name == "integer_inverse" else NodeTag.ORACLE
            node = CallNode(name, leaf=self.oracles[name], tag=tag)
        elif name in self.library:
            node = CallNode(
                _call_name(name, args),
                leaf=self.library[name].evaluate(*args, policy=self.policy),
            )
        else:
            raise TemplateError(f"unresolved template reference: {name}")

        self.memo[key] = node
        return node

    def _tree(self, d: TemplateDef, args: tuple[int, ...]) -> CallNode:
        if args:
            raise TemplateError(f"template {d.name} takes no arguments")
        self.active.append(d.name)
        children: list[tuple[CallNode, int]] = []
        for ref in d.children:
            mult = self._eval(d.name, ref, ref.multiplicity)
            if mult == 0:
                continue
            child_args = tuple(self._eval(d.name, ref, a) for a in ref.args)
            children.append((self.node(ref.name, child_args), mult))
        if d.literal is not None:
            children.append((CallNode(f"{d.name}.gates", leaf=d.literal), 1))
        self.active.pop()
        return CallNode(d.name, tuple(children), compose=d.compose, tag=d.tag)


def template_defs(
    overrides: str | Path | Iterable[TemplateDef] | None = None,
    parallel_ampest: bool = False,
) -> dict[str, TemplateDef]:
    defs = {d.name: d for d in _bundled_defs()}
    if overrides is not None:
        extra = (
            load_template_file(overrides)
            if isinstance(overrides, (str, Path))
            else list(overrides)
        )
        for d in extra:
            if d.name in defs:
                logger.info("template %s overridden", d.name)
            defs[d.name] = d
    if parallel_ampest and AMPEST_BLOCK in defs:
        defs[AMPEST_BLOCK] = replace(defs[AMPEST_BLOCK], compose=Compose.PAR)
    return defs


def build_node(
    name: str,
    params: ProblemParams,
    policy: RotationPolicy = FIXED_BUDGET,
    oracles: OracleSet | None = None,
    overrides: str | Path | Iterable[TemplateDef] | None = None,
    parallel_ampest: bool = False,
    args: tuple[int, ...] = (),
) -> CallNode:
    """Materialise one call (a tree template, an oracle or a library gate)."""
    if oracles is None:
        oracles = OracleSet.from_config()
    defs = template_defs(overrides, parallel_ampest)
    m = _Materialiser(defs, expression_env(params), policy, oracles.vectors())
    node = m.node(name, args)
    logger.debug("materialised %d call nodes under %s", len(m.memo), name)
    return node


def build_profile(
    params: ProblemParams,
    policy: RotationPolicy = FIXED_BUDGET,
    oracles: OracleSet | None = None,
    overrides: str | Path | Iterable[TemplateDef] | None = None,
    parallel_ampest: bool = False,
) -> CallNode:
    if ROOT not in template_defs(overrides):
        raise TemplateError(f"template file defines no {ROOT}")
    return build_node(ROOT, params, policy, oracles, overrides, parallel_ampest)


def fold(node: CallNode, mode: str = Mode.INCL) -> ResourceVector:
    memo: dict[int, ResourceVector] = {}

    def go(n: CallNode) -> ResourceVector:
        if id(n) in memo:
            return memo[id(n)]
        if mode == Mode.EXCL and n.tag is not NodeTag.CORE:
            v = ZERO
        elif n.leaf is not None:
            v = n.leaf
        elif n.compose is Compose.PAR:
            v = par_all(stack(go(c), m) for c, m in n.children)
        else:
            v = seq_all(repeat(go(c), m) for c, m in n.children)
        memo[id(n)] = v
        return v

    return go(node)


def call_counts(root: CallNode) -> dict[str, int]:
    """Total number of times each named call runs, propagated top-down."""
    counts: dict[int, int] = {id(root): 1}
    by_name: dict[str, int] = {}
    for n in root.walk():
        c = counts.get(id(n), 0)
        by_name[n.name] = by_name.get(n.name, 0) + c
        for child, m in n.children:
            counts[id(child)] = counts.get(id(child), 0) + c * m
    return by_name


def _prefixed(counts: Mapping[str, int], prefix: str) -> int:
    return sum(v for k, v in counts.items() if k.startswith(prefix))


def anchors(root: CallNode, params: ProblemParams) -> dict[str, int]:
    counts = call_counts(root)
    ampest = _prefixed(counts, "ampest_")
    grover = _prefixed(counts, "grover_")
    return {
        "grover_per_ampest": grover // ampest if ampest else 0,
        "hs_calls": counts.get("hamiltonian_simulation", 0),
        "trotter_slices": params.r,
        "suzuki_exponentials": counts.get("uz", 0),
        "hsimkernel_calls": counts.get("hsim_kernel", 0),
        "oracle_A_queries": counts.get("oracle_A_false", 0)
        + counts.get("oracle_A_true", 0),
        "hmag_calls": counts.get("controlled_hmag", 0),
        "oracle_b_queries": counts.get("oracle_b", 0),
        "oracle_R_queries": counts.get("oracle_R", 0),
        "integer_inverse_calls": counts.get("integer_inverse", 0),
        "n0": params.n0,
        "n1": params.n1,
        "n2": params.n2,
        "n4": params.n4,
        "registers": register_total(params),
    }


@dataclass(frozen=True)
class Report:
    incl_oracles: ResourceVector
    excl_oracles: ResourceVector
    anchors: dict[str, int]
    params: ProblemParams
    registers: int
    data_qubits: int
    gate_time_ns: float = 1.0
    parallel_ampest: bool = False
    policy: RotationPolicy = field(default=FIXED_BUDGET)

    def vector(self, mode: str) -> ResourceVector:
        return self.incl_oracles if mode == Mode.INCL else self.excl_oracles

    def run_time_seconds(self, mode: str) -> float:
        return self.vector(mode).depth * self.gate_time_ns * 1e-9

    def run_time_years(self, mode: str) -> float:
        return self.run_time_seconds(mode) / SECONDS_PER_YEAR


def _amplitude_copies(root: CallNode) -> int:
    for n in root.walk():
        if n.name == AMPEST_BLOCK and n.compose is Compose.PAR:
            return sum(m for _, m in n.children)
    return 1


def _finalise(raw: ResourceVector, registers: int, data: int) -> ResourceVector:
    # persistent registers plus the peak temporary ancilla demand
    if raw.is_zero:
        return ZERO
    width = registers + raw.ancilla_max
    return raw.with_fields(width=width, ancilla_max=width - data)


def evaluate(
    tree: CallNode,
    params: ProblemParams,
    *,
    gate_time_ns: float = 1.0,
    policy: RotationPolicy = FIXED_BUDGET,
) -> Report:
    copies = _amplitude_copies(tree)
    registers = register_total(params) * copies
    data = data_qubits(params) * copies
    return Report(
        incl_oracles=_finalise(fold(tree, Mode.INCL), registers, data),
        excl_oracles=_finalise(fold(tree, Mode.EXCL), registers, data),
        anchors=anchors(tree, params),
        params=params,
        registers=registers,
        data_qubits=data,
        gate_time_ns=gate_time_ns,
        parallel_ampest=copies > 1,
        policy=policy,
    )


def count_rotations(
    params: ProblemParams,
    oracles: OracleSet,
    overrides: str | Path | None = None,
    parallel_ampest: bool = False,
) -> int:
    """Arbitrary rotations in the core circuit: one extra gate per rotation moves the total by one."""

    def total(budget: int) -> int:
        tree = build_profile(
            params, RotationPolicy.fixed(budget), oracles, overrides, parallel_ampest
        )
        return fold(tree, Mode.EXCL).total_gates

    return total(101) - total(100)


def resolve_policy(
    config: Config,
    params: ProblemParams,
    oracles: OracleSet,
    parallel_ampest: bool = False,
) -> RotationPolicy:
    rot = config.rotation
    if rot.mode == RotationMode.FOWLER_FIT.value and rot.distance is None:
        n_rotations = count_rotations(
            params, oracles, config.templates.overrides, parallel_ampest
        )
        distance = per_rotation_budget(params.epsilon, max(1, n_rotations))
        logger.info(
            "rotation distance %.3g from %d rotations", distance, n_rotations
        )
        return rot.policy(distance)
    return rot.policy()


def estimate(config: Config, parallel_ampest: bool = False) -> Report:
    params = resolve_params(config)
    oracles = OracleSet.from_config(config.oracles)
    policy = resolve_policy(config, params, oracles, parallel_ampest)
    tree = build_profile(
        params, policy, oracles, config.templates.overrides, parallel_ampest
    )
    report = evaluate(
        tree, params, gate_time_ns=config.output.gate_time_ns, policy=policy
    )
    logger.info(
        "estimate: excl %d gates, incl %d gates",
        report.excl_oracles.total_gates,
        report.incl_oracles.total_gates,
    )
    return report
