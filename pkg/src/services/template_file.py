"""
Template-definition files.

A file holds one block per template:

    [template grover_b]
    compose = seq
    tag = core
    child = u_b : 2
    child = zero_reflection(n2 + 1)
    gates = h:2, cnot:1

Multiplicities and child arguments are integer expressions over the problem parameters.
"""

from __future__ import annotations

import ast
import logging
import math
import re
from fractions import Fraction
from pathlib import Path
from typing import Mapping

from .resources import ResourceError, ResourceVector, gates
from .templates import ChildRef, Compose, NodeTag, TemplateDef, TemplateError

logger = logging.getLogger(__name__)

EXPRESSION_PARAMS = ("n0", "n1", "n2", "n4", "Nb", "k", "r", "mix_true")
MAX_EXPONENT = 4096

_HEADER = re.compile(r"^\[template\s+([A-Za-z_][A-Za-z0-9_]*)\s*\]$")
_CHILD = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*(?:\((.*)\))?$")
_LITERAL_SCALARS = (
    "width",
    "depth",
    "t_depth",
    "ancilla_max",
    "ancilla_cycles",
    "measurements",
)


class ExpressionError(ValueError):
    pass


class TemplateParseError(TemplateError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _normalise(text: str) -> str:
    return text.replace("^", "**").replace("×", "*").replace("−", "-").strip()


def _ceil(x: Fraction) -> Fraction:
    return Fraction(math.ceil(x))


def _floor(x: Fraction) -> Fraction:
    return Fraction(math.floor(x))


_FUNCTIONS = {"ceil": _ceil, "floor": _floor, "min": min, "max": max}


def _eval(node: ast.AST, env: Mapping[str, Fraction]) -> Fraction:
    if isinstance(node, ast.Expression):
        return _eval(node.body, env)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ExpressionError(f"unsupported literal: {node.value!r}")
        return Fraction(str(node.value))
    if isinstance(node, ast.Name):
        if node.id not in env:
            raise ExpressionError(f"unknown parameter: {node.id}")
        return env[node.id]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand, env)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp):
        a = _eval(node.left, env)
        b = _eval(node.right, env)
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a - b
        if isinstance(node.op, ast.Mult):
            return a * b
        if isinstance(node.op, ast.Div):
            if b == 0:
                raise ExpressionError("division by zero")
            return a / b
        if isinstance(node.op, ast.Pow):
            if b.denominator != 1:
                raise ExpressionError(f"non-integer exponent: {b}")
            if abs(b) > MAX_EXPONENT:
                raise ExpressionError(f"exponent {b} exceeds {MAX_EXPONENT}")
            if a == 0 and b < 0:
                raise ExpressionError("zero raised to a negative power")
            return a ** int(b)
        raise ExpressionError(f"unsupported operator: {type(node.op).__name__}")
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
            raise ExpressionError(f"unsupported function: {ast.unparse(node.func)}")
        if node.keywords or not node.args:
            raise ExpressionError(f"bad call to {node.func.id}")
        args = [_eval(a, env) for a in node.args]
        fn = _FUNCTIONS[node.func.id]
        if fn in (_ceil, _floor):
            if len(args) != 1:
                raise ExpressionError(f"{node.func.id} takes one argument")
            return fn(args[0])
        return fn(*args)
    raise ExpressionError(f"unsupported syntax: {type(node).__name__}")


def evaluate_expression(text: str, params: Mapping[str, int | Fraction]) -> int:
    """Evaluate exactly over the rationals; the result must be a non-negative integer."""
    source = _normalise(text)
    if not source:
        raise ExpressionError("empty expression")
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as e:
        raise ExpressionError(f"cannot parse {text!r}: {e.msg}") from e

    env = {k: Fraction(v) for k, v in params.items()}
    value = _eval(tree, env)
    if value.denominator != 1:
        raise ExpressionError(f"{text!r} evaluates to non-integer {value}")
    if value < 0:
        raise ExpressionError(f"{text!r} evaluates to negative {value}")
    return int(value)


def _split_args(text: str) -> tuple[str, ...]:
    # commas at depth zero separate arguments
    parts: list[str] = []
    depth = 0
    current = ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(current.strip())
            current = ""
        else:
            current += ch
    if current.strip():
        parts.append(current.strip())
    return tuple(parts)


def _parse_child(value: str, line: int) -> ChildRef:
    call, _, mult = value.partition(":")
    m = _CHILD.match(call.strip())
    if not m:
        raise TemplateParseError(line, f"bad child reference: {value!r}")
    args = _split_args(m.group(2)) if m.group(2) is not None else ()
    return ChildRef(
        name=m.group(1),
        args=args,
        multiplicity=mult.strip() or "1",
        line=line,
    )


def _parse_literal(value: str, line: int) -> ResourceVector:
    fields: dict[str, int] = {}
    for item in value.split(","):
        if not item.strip():
            continue
        key, sep, num = item.partition(":")
        key = key.strip().lower()
        if not sep or not num.strip().isdigit():
            raise TemplateParseError(line, f"bad gate literal: {item.strip()!r}")
        fields[key] = fields.get(key, 0) + int(num)
    try:
        return gates(**fields)
    except (ResourceError, TypeError) as e:
        raise TemplateParseError(line, str(e)) from e


def parse_template_file(text: str) -> list[TemplateDef]:
    blocks: list[dict] = []
    current: dict | None = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        header = _HEADER.match(line)
        if header:
            current = {
                "name": header.group(1),
                "line": lineno,
                "children": [],
                "literal": None,
                "compose": Compose.SEQ,
                "tag": NodeTag.CORE,
            }
            blocks.append(current)
            continue
        if current is None:
            raise TemplateParseError(lineno, "entry outside a [template ...] block")

        key, sep, value = line.partition("=")
        if not sep:
            raise TemplateParseError(lineno, f"expected 'key = value', got {line!r}")
        key, value = key.strip(), value.strip()
        if key == "child":
            current["children"].append(_parse_child(value, lineno))
        elif key == "gates":
            literal = _parse_literal(value, lineno)
            if current["literal"] is not None:
                raise TemplateParseError(lineno, "gates given twice")
            current["literal"] = literal
        elif key == "compose":
            try:
                current["compose"] = Compose(value)
            except ValueError:
                raise TemplateParseError(lineno, f"compose must be seq or par, got {value!r}")
        elif key == "tag":
            try:
                current["tag"] = NodeTag(value)
            except ValueError:
                raise TemplateParseError(lineno, f"unknown tag: {value!r}")
        else:
            raise TemplateParseError(lineno, f"unknown key: {key}")

    defs: list[TemplateDef] = []
    seen: set[str] = set()
    for b in blocks:
        if b["name"] in seen:
            raise TemplateParseError(b["line"], f"template {b['name']} defined twice")
        seen.add(b["name"])
        if not b["children"] and b["literal"] is None:
            raise TemplateParseError(b["line"], f"template {b['name']} is empty")
        defs.append(
            TemplateDef(
                name=b["name"],
                children=tuple(b["children"]),
                literal=b["literal"],
                compose=b["compose"],
                tag=b["tag"],
            )
        )
    return defs


def load_template_file(path: str | Path) -> list[TemplateDef]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Template file not found: {path}")
    defs = parse_template_file(path.read_text(encoding="utf-8"))
    logger.debug("loaded %d templates from %s", len(defs), path)
    return defs


def serialize_template(d: TemplateDef) -> str:
    lines = [f"[template {d.name}]"]
    if d.compose is not Compose.SEQ:
        lines.append(f"compose = {d.compose.value}")
    if d.tag is not NodeTag.CORE:
        lines.append(f"tag = {d.tag.value}")
    for c in d.children:
        call = f"{c.name}({', '.join(c.args)})" if c.args else c.name
        lines.append(f"child = {call} : {c.multiplicity}")
    if d.literal is not None:
        fields = d.literal.to_fields()
        parts = [f"{k}:{v}" for k, v in fields.items() if v and k not in ("measure",)]
        lines.append("gates = " + ", ".join(parts))
    return "\n".join(lines)
