"""Expression language for classes on a model variety.

Grammar::

    expr   := term { ("+" | "-") term }
    term   := unary { "*" unary }
    unary  := "-" unary | factor
    factor := atom [ "^" nat ]
    atom   := int | "h" nat | "O" "(" ints ")" | "L" "(" ints ")" | "OL" "(" ints ")"
            | ident "(" args ")" | "(" expr ")"

Lists of ints accept a sign on each entry. Parsing is followed by a type
pass (``elaborate``) that checks arities, kinds and index bounds against
the variety, and then ``evaluate``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .exactnum import check_prime
from .kchow import (
    ChowElt,
    KCohElt,
    KHomElt,
    ModelVariety,
    VirtualBundle,
    adams_coh,
    adams_hom,
    bott_theta,
    ch_coh,
    ch_hom,
    ch_hom_total,
    todd_class,
)

# AST --------------------------------------------------------------------------


@dataclass(frozen=True)
class Node:
    pos: int = field(default=0, compare=False, kw_only=True)


@dataclass(frozen=True)
class Int(Node):
    value: int


@dataclass(frozen=True)
class Gen(Node):
    index: int  # 1-based, as written


@dataclass(frozen=True)
class Ctor(Node):
    kind: str  # "O", "L" or "OL"
    args: tuple


@dataclass(frozen=True)
class Call(Node):
    name: str
    args: tuple


@dataclass(frozen=True)
class Neg(Node):
    operand: Node


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exp: int


# errors -----------------------------------------------------------------------


class ExprError(ValueError):
    def __init__(self, message: str, offset: int, source: str = ""):
        self.offset = offset
        self.source = source
        super().__init__(f"{message} at offset {offset}")

    def caret(self) -> str:
        if not self.source:
            return ""
        col = len(self.source.encode()[: self.offset].decode(errors="ignore"))
        return f"{self.source}\n{' ' * col}^"


class ParseError(ExprError):
    def __init__(self, offset: int, expected, found: str, source: str = ""):
        self.expected = frozenset(expected)
        self.found = found
        exp = ", ".join(sorted(self.expected))
        super().__init__(f"syntax error: expected one of {{{exp}}}, found {found}", offset, source)


class ElabError(ExprError):
    """Arity, kind or bound error attached to a node."""


# lexer ------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^(),]))")
_GEN = re.compile(r"h(\d+)$")


@dataclass(frozen=True)
class Token:
    kind: str  # int, ident, op, end
    text: str
    offset: int  # byte offset


def tokenize(source: str) -> list[Token]:
    out = []
    i = 0
    raw = source.encode()
    while True:
        m = _TOKEN.match(source, i)
        if not m:
            rest = source[i:]
            if not rest.strip():
                break
            j = i + len(rest) - len(rest.lstrip())
            off = len(source[:j].encode())
            raise ParseError(off, {"integer", "identifier", "operator"}, repr(source[j]), source)
        kind = m.lastgroup
        start = m.start(kind)
        out.append(Token(kind, m.group(kind), len(source[:start].encode())))
        i = m.end()
    out.append(Token("end", "", len(raw)))
    return out


def _describe(tok: Token) -> str:
    return "end of input" if tok.kind == "end" else repr(tok.text)


# parser -----------------------------------------------------------------------

FUNCTIONS = {
    # name: tuple of argument kinds; "int" means an integer constant
    "td": ("any",),
    "ch": ("any",),
    "chh": ("any",),
    "psi": ("int", "any"),
    "theta": ("int", "any"),
    "r": ("int", "any"),
    "T": ("int", "any"),
    "Tc": ("int", "any"),
    "S": ("any",),
    "Tp": ("any",),
}
_ATOM_START = {"integer", "h<n>", "O", "L", "OL", "(", "-", *FUNCTIONS}


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.toks = tokenize(source)
        self.k = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.k]

    def fail(self, expected):
        raise ParseError(self.tok.offset, expected, _describe(self.tok), self.source)

    def accept(self, text: str) -> Token | None:
        if self.tok.kind == "op" and self.tok.text == text:
            t = self.tok
            self.k += 1
            return t
        return None

    def expect(self, text: str, also=()) -> Token:
        t = self.accept(text)
        if t is None:
            self.fail({text, *also})
        return t

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            self.fail({"+", "-", "*", "^", "end of input"})
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok
            self.k += 1
            node = BinOp(op.text, node, self.term(), pos=op.offset)
        return node

    def term(self) -> Node:
        node = self.unary()
        while (op := self.accept("*")) is not None:
            node = BinOp("*", node, self.unary(), pos=op.offset)
        return node

    def unary(self) -> Node:
        op = self.accept("-")
        if op is not None:
            return Neg(self.unary(), pos=op.offset)
        return self.factor()

    def factor(self) -> Node:
        base = self.atom()
        op = self.accept("^")
        if op is not None:
            if self.tok.kind != "int":
                self.fail({"integer"})
            e = int(self.tok.text)
            self.k += 1
            return Pow(base, e, pos=op.offset)
        return base

    def signed_int(self) -> int:
        neg = self.accept("-") is not None
        if self.tok.kind != "int":
            self.fail({"integer"} if neg else {"integer", "-"})
        v = int(self.tok.text)
        self.k += 1
        return -v if neg else v

    def int_list(self) -> tuple:
        vals = [self.signed_int()]
        while self.accept(",") is not None:
            vals.append(self.signed_int())
        self.expect(")", {","})
        return tuple(vals)

    def atom(self) -> Node:
        t = self.tok
        if t.kind == "int":
            self.k += 1
            return Int(int(t.text), pos=t.offset)
        if t.kind == "op" and t.text == "(":
            self.k += 1
            node = self.expr()
            self.expect(")", {"+", "-", "*", "^"})
            return node
        if t.kind == "ident":
            self.k += 1
            g = _GEN.match(t.text)
            if g:
                return Gen(int(g.group(1)), pos=t.offset)
            if t.text in ("O", "L", "OL"):
                self.expect("(")
                return Ctor(t.text, self.int_list(), pos=t.offset)
            if t.text in FUNCTIONS:
                self.expect("(")
                args = [self.expr()]
                while self.accept(",") is not None:
                    args.append(self.expr())
                self.expect(")", {",", "+", "-", "*", "^"})
                return Call(t.text, tuple(args), pos=t.offset)
            self.k -= 1
        self.fail(_ATOM_START)


def parse(source: str) -> Node:
    if not source or not source.strip():
        raise ParseError(len(source.encode()), _ATOM_START, "end of input", source)
    return _Parser(source).parse()


# renderer ---------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2}


def render(node: Node) -> str:
    """Canonical text; ``parse(render(n)) == n``."""
    if isinstance(node, Int):
        return str(node.value)
    if isinstance(node, Gen):
        return f"h{node.index}"
    if isinstance(node, Ctor):
        return f"{node.kind}({','.join(map(str, node.args))})"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(render(a) for a in node.args)})"
    if isinstance(node, Neg):
        inner = render(node.operand)
        return f"-({inner})" if isinstance(node.operand, BinOp) else f"-{inner}"
    if isinstance(node, Pow):
        inner = render(node.base)
        if isinstance(node.base, (BinOp, Neg, Pow)):
            inner = f"({inner})"
        return f"{inner}^{node.exp}"
    if isinstance(node, BinOp):
        prec = _PREC[node.op]
        left, right = render(node.left), render(node.right)
        if isinstance(node.left, BinOp) and _PREC[node.left.op] < prec:
            left = f"({left})"
        if isinstance(node.right, BinOp) and _PREC[node.right.op] <= prec:
            right = f"({right})"
        if node.op == "*" and isinstance(node.right, Neg):
            right = f"({right})"
        sep = "*" if node.op == "*" else f" {node.op} "
        return f"{left}{sep}{right}"
    raise TypeError(f"not an expression node: {node!r}")


# elaboration ------------------------------------------------------------------

# kinds: int, chow, chow_p (mod p), bundle, kcoh, khom, graded
_NUMERIC = ("int",)


def _const_int(node: Node) -> int | None:
    if isinstance(node, Int):
        return node.value
    if isinstance(node, Neg):
        v = _const_int(node.operand)
        return None if v is None else -v
    return None


class _Elaborator:
    def __init__(self, variety: ModelVariety, mod: int | None, source: str):
        self.X = variety
        self.mod = mod
        self.source = source

    def err(self, node: Node, msg: str):
        raise ElabError(msg, node.pos, self.source)

    def kind(self, node: Node) -> str:
        X = self.X
        if isinstance(node, Int):
            return "int"
        if isinstance(node, Gen):
            if not 1 <= node.index <= X.nfactors:
                self.err(node, f"h{node.index} out of range for {X.name} (factors 1..{X.nfactors})")
            return "chow"
        if isinstance(node, Ctor):
            if len(node.args) != X.nfactors:
                self.err(node, f"{node.kind} takes {X.nfactors} entries on {X.name}, got {len(node.args)}")
            if node.kind in ("L", "OL"):
                for a, n in zip(node.args, X.dims):
                    if not 0 <= a <= n:
                        self.err(node, f"{render(node)}: entries must satisfy 0 <= i_j <= n_j on {X.name}")
                return "chow" if node.kind == "L" else "khom"
            return "bundle"
        if isinstance(node, Neg):
            k = self.kind(node.operand)
            if k == "graded":
                self.err(node, "cannot negate a graded list")
            return k
        if isinstance(node, Pow):
            k = self.kind(node.base)
            if k in ("khom", "graded"):
                self.err(node, f"cannot raise a {k} value to a power")
            return k
        if isinstance(node, BinOp):
            return self.binop(node)
        if isinstance(node, Call):
            return self.call(node)
        raise TypeError(node)

    def binop(self, node: BinOp) -> str:
        a, b = self.kind(node.left), self.kind(node.right)
        if "graded" in (a, b):
            self.err(node, "graded lists do not support arithmetic")
        if node.op == "*":
            if "int" in (a, b):
                return b if a == "int" else a
            pair = {a, b}
            if pair <= {"chow", "chow_p"}:
                return "chow_p" if "chow_p" in pair else "chow"
            if pair == {"bundle"}:
                return "bundle"
            if pair <= {"bundle", "kcoh"}:
                return "kcoh"
            self.err(node, f"cannot multiply {a} by {b}")
        if a == "int":
            return b
        if b == "int" or a == b:
            return a
        pair = {a, b}
        if pair == {"chow", "chow_p"}:
            return "chow_p"
        if pair == {"bundle", "kcoh"}:
            return "kcoh"
        self.err(node, f"cannot add {a} and {b}")

    def call(self, node: Call) -> str:
        sig = FUNCTIONS[node.name]
        if len(node.args) != len(sig):
            self.err(node, f"{node.name} takes {len(sig)} argument(s), got {len(node.args)}")
        if sig[0] == "int" and _const_int(node.args[0]) is None:
            self.err(node.args[0], f"first argument of {node.name} must be an integer constant")
        arg = node.args[-1]
        k = self.kind(arg)
        name = node.name
        if name == "td":
            if k not in ("bundle", "int"):
                self.err(arg, "td expects a bundle expression")
            return "chow"
        if name == "ch":
            if k not in ("bundle", "kcoh", "khom", "int"):
                self.err(arg, "ch expects a K-class")
            return "chow"
        if name == "chh":
            if k != "khom":
                self.err(arg, "chh expects a K'_0 class built from OL(...)")
            return "graded"
        if name == "psi":
            if _const_int(node.args[0]) == 0:
                self.err(node.args[0], "psi needs a nonzero integer")
            if k not in ("bundle", "kcoh", "khom", "int"):
                self.err(arg, "psi expects a K-class")
            return k
        if name == "theta":
            if _const_int(node.args[0]) == 0:
                self.err(node.args[0], "theta needs a nonzero integer")
            if k not in ("bundle", "int"):
                self.err(arg, "theta expects a bundle expression")
            return "kcoh"
        if name == "r":
            try:
                check_prime(_const_int(node.args[0]))
            except ValueError as exc:
                self.err(node.args[0], str(exc))
            if k not in ("bundle", "int"):
                self.err(arg, "r expects a bundle expression")
            return "chow_p"
        # Steenrod-type operations
        if self.mod is None:
            self.err(node, f"{name} works mod p; pass a prime modulus")
        if k not in ("chow", "chow_p", "int"):
            self.err(arg, f"{name} expects a Chow class")
        if name in ("T", "Tc") and _const_int(node.args[0]) < 0:
            self.err(node.args[0], f"{name} needs i >= 0")
        return "chow_p"


CONTEXTS = {
    "chow": ("int", "chow", "chow_p", "graded"),
    "k": ("int", "bundle", "kcoh", "khom"),
}


def elaborate(
    node: Node, variety: ModelVariety, mod: int | None = None, source: str = "", context: str | None = None
) -> str:
    """Kind of the expression's value; raises ElabError on misuse."""
    if mod is not None:
        check_prime(mod)
    kind = _Elaborator(variety, mod, source).kind(node)
    if context is not None and kind not in CONTEXTS[context]:
        raise ElabError(f"expected a {context} expression, got {kind}", node.pos, source)
    return kind


# evaluation -------------------------------------------------------------------


class _Evaluator:
    def __init__(self, variety: ModelVariety, mod: int | None, source: str):
        self.X = variety
        self.mod = mod
        self.source = source
        self.el = _Elaborator(variety, mod, source)

    def unit(self, kind: str, c: int, p=None):
        X = self.X
        if kind == "chow":
            return ChowElt.one(X).scale(c)
        if kind == "chow_p":
            return ChowElt.one(X, p).scale(c)
        if kind == "bundle":
            return VirtualBundle.trivial(X, c)
        if kind == "kcoh":
            return KCohElt.one(X).scale(c)
        if kind == "khom":
            return KHomElt.structure_sheaf(X).scale(c)
        return c

    def coerce(self, value, kind: str, node: Node):
        """Bring a value into ``kind`` (int -> unit multiple, chow -> chow mod p, bundle -> kcoh)."""
        if isinstance(value, int) and kind != "int":
            return self.unit(kind, value, self.mod_of(node))
        if kind == "kcoh" and isinstance(value, VirtualBundle):
            return value.to_kcoh()
        if kind == "chow_p" and isinstance(value, ChowElt) and value.mod is None:
            return self.reduce(value, self.mod_of(node), node)
        return value

    def reduce(self, x: ChowElt, p: int, node: Node) -> ChowElt:
        try:
            return x.reduce_mod(p)
        except ValueError as exc:
            self.el.err(node, str(exc))

    def mod_of(self, node: Node) -> int:
        # prime of the first mod-p class below node, else the global modulus
        found = self._find_mod(node)
        return found if found is not None else self.mod

    def _find_mod(self, node: Node):
        if isinstance(node, Call):
            if node.name == "r":
                return _const_int(node.args[0])
            if node.name in ("T", "Tc", "S", "Tp"):
                return self.mod
            return None
        for child in _children(node):
            m = self._find_mod(child)
            if m is not None:
                return m
        return None

    def ev(self, node: Node):
        X = self.X
        if isinstance(node, Int):
            return node.value
        if isinstance(node, Gen):
            return ChowElt.hyperplane(X, node.index - 1)
        if isinstance(node, Ctor):
            if node.kind == "O":
                return VirtualBundle.line(X, node.args)
            if node.kind == "L":
                return ChowElt.cycle(X, node.args)
            return KHomElt.basis(X, node.args)
        if isinstance(node, Neg):
            return -self.ev(node.operand)
        if isinstance(node, Pow):
            return self.ev(node.base) ** node.exp
        if isinstance(node, BinOp):
            kind = self.el.kind(node)
            a, b = self.ev(node.left), self.ev(node.right)
            if node.op == "*":
                if isinstance(a, int) or isinstance(b, int):
                    if isinstance(a, int) and isinstance(b, int):
                        return a * b
                    scalar, other = (a, b) if isinstance(a, int) else (b, a)
                    return other * scalar if isinstance(other, VirtualBundle) else other.scale(scalar)
                a, b = self.coerce(a, kind, node), self.coerce(b, kind, node)
                return a * b
            a, b = self.coerce(a, kind, node), self.coerce(b, kind, node)
            return a + b if node.op == "+" else a - b
        if isinstance(node, Call):
            return self.call(node)
        raise TypeError(node)

    def call(self, node: Call):
        X = self.X
        name = node.name
        arg = node.args[-1]
        v = self.ev(arg)
        n = _const_int(node.args[0]) if FUNCTIONS[name][0] == "int" else None
        if name in ("td", "theta", "r") and isinstance(v, int):
            v = VirtualBundle.trivial(X, v)
        if name == "td":
            return todd_class(v)
        if name == "ch":
            if isinstance(v, int):
                return ChowElt.one(X).scale(v)
            if isinstance(v, KHomElt):
                return ch_hom_total(v)
            return ch_coh(v.to_kcoh() if isinstance(v, VirtualBundle) else v)
        if name == "chh":
            return ch_hom(v)
        if name == "psi":
            if isinstance(v, int):
                return v
            if isinstance(v, KHomElt):
                return adams_hom(n, v)
            if isinstance(v, VirtualBundle):
                return v.adams(n)
            return adams_coh(n, v)
        if name == "theta":
            return bott_theta(n, v)
        if name == "r":
            from .integrality import r_class

            return r_class(v, n)
        from . import steenrod

        p = self.mod
        x = self.coerce(v, "chow_p", node) if not isinstance(v, int) else ChowElt.one(X, p).scale(v)
        if x.mod != p:
            self.el.err(arg, f"class is mod {x.mod} but the operation works mod {p}")
        if name == "T":
            return steenrod.T_hom(n, x, p)
        if name == "Tc":
            return steenrod.T_coh(n, x, p)
        if name == "S":
            return steenrod.total_S(x, p)
        return steenrod.total_T_prime(x, p)


def _children(node: Node):
    if isinstance(node, (Neg,)):
        return (node.operand,)
    if isinstance(node, Pow):
        return (node.base,)
    if isinstance(node, BinOp):
        return (node.left, node.right)
    if isinstance(node, Call):
        return node.args
    return ()


def evaluate(node: Node, variety: ModelVariety, mod: int | None = None, source: str = "", context=None):
    """Value of an elaborated expression; Chow results are reduced mod ``mod`` when given."""
    elaborate(node, variety, mod, source, context)
    out = _Evaluator(variety, mod, source).ev(node)
    if mod is not None:
        if isinstance(out, int):
            out = out % mod
        elif isinstance(out, ChowElt) and out.mod is None:
            try:
                out = out.reduce_mod(mod)
            except ValueError as exc:
                raise ElabError(str(exc), node.pos, source) from None
    return out


def parse_expr(source: str, variety: ModelVariety, context: str | None = None, mod: int | None = None) -> Node:
    node = parse(source)
    elaborate(node, variety, mod, source, context)
    return node


def compute(source: str, variety: ModelVariety | str, mod: int | None = None, context: str | None = None):
    if isinstance(variety, str):
        variety = ModelVariety.parse(variety)
    return evaluate(parse(source), variety, mod, source, context)
