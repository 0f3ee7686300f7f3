"""Formula AST, concrete syntax, and negation normal form.

Formulas are LTL (X, U, R plus the derived F and G) extended with
per-message quantifiers: ``exists x in "/root/elem" : body`` binds ``x``
to each value the quoted path extracts from the current message, and
``forall`` is its dual.  Atoms compare two terms, where a term is a
quantifier-bound variable or a double-quoted string constant.
"""
from __future__ import annotations

from dataclasses import dataclass


class FormulaError(ValueError):
    """Parent of all parse-time and well-formedness errors."""


class FormulaSyntaxError(FormulaError):
    def __init__(self, position: int, expected: str, found: str = ""):
        self.position = position
        self.expected = expected
        detail = f", found {found}" if found else ""
        super().__init__(f"at offset {position}: expected {expected}{detail}")


class UnboundVariableError(FormulaError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"variable {name!r} is not bound by any enclosing quantifier")


class ShadowedVariableError(FormulaError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"quantifier rebinds variable {name!r} already in scope")


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: str


Term = Var | Const


@dataclass(frozen=True)
class Path:
    """Child-axis path, one element name per step, rooted at the first."""

    segments: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.segments or any(not s for s in self.segments):
            raise ValueError("path needs at least one non-empty segment")

    def __str__(self) -> str:
        return "/" + "/".join(self.segments)


class Formula:
    """Base class for formula AST nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class TrueLit(Formula):
    pass


@dataclass(frozen=True)
class FalseLit(Formula):
    pass


@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Neq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Next(Formula):
    body: Formula


@dataclass(frozen=True)
class Finally(Formula):
    body: Formula


@dataclass(frozen=True)
class Globally(Formula):
    body: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Release(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    path: Path
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    path: Path
    body: Formula


# Normal-form stand-ins for the boolean literals.  Both use the same
# constant so negating one yields exactly the other.
TRUE_ATOM = Eq(Const("true"), Const("true"))
FALSE_ATOM = Neq(Const("true"), Const("true"))

KEYWORDS = frozenset({"G", "F", "X", "U", "R", "exists", "forall", "in", "true", "false"})


@dataclass(frozen=True)
class _Token:
    kind: str  # IDENT, STRING, a punctuation literal, or EOF
    text: str
    position: int


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(source)
    while i < n:
        c = source[i]
        if c.isspace():
            i += 1
            continue
        if c == '"':
            start = i
            i += 1
            chars: list[str] = []
            while True:
                if i >= n:
                    raise FormulaSyntaxError(start, "closing quote")
                c = source[i]
                if c == "\\":
                    if i + 1 >= n or source[i + 1] not in ('"', "\\"):
                        raise FormulaSyntaxError(i, 'escape sequence \\" or \\\\')
                    chars.append(source[i + 1])
                    i += 2
                elif c == '"':
                    i += 1
                    break
                else:
                    chars.append(c)
                    i += 1
            tokens.append(_Token("STRING", "".join(chars), start))
            continue
        if c.isalpha() or c == "_":
            start = i
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
            word = source[start:i]
            kind = word if word in KEYWORDS else "IDENT"
            tokens.append(_Token(kind, word, start))
            continue
        if c == "!" and i + 1 < n and source[i + 1] == "=":
            tokens.append(_Token("!=", "!=", i))
            i += 2
            continue
        if c == "-":
            if i + 1 < n and source[i + 1] == ">":
                tokens.append(_Token("->", "->", i))
                i += 2
                continue
            raise FormulaSyntaxError(i, "token", found="-")
        if c in "()=&|:!":
            tokens.append(_Token(c, c, i))
            i += 1
            continue
        raise FormulaSyntaxError(i, "token", found=repr(c))
    tokens.append(_Token("EOF", "", n))
    return tokens


class Parser:
    """Recursive descent over the token stream.

    Precedence, tightest first: unary operators and quantifiers, then
    U and R (right associative, one level), then &, then |, then ->
    (right associative).  Scope is tracked so unbound and shadowed
    variables are rejected during the parse itself.
    """

    def __init__(self, source: str):
        self._tokens = _tokenize(source)
        self._pos = 0
        self._scope: list[str] = []

    def _peek(self) -> _Token:
        return self._tokens[self._pos]

    def _advance(self) -> _Token:
        tok = self._tokens[self._pos]
        self._pos += 1
        return tok

    def _expect(self, kind: str) -> _Token:
        tok = self._peek()
        if tok.kind != kind:
            raise FormulaSyntaxError(tok.position, f"'{kind}'", found=tok.text or "end of input")
        return self._advance()

    def parse(self) -> Formula:
        formula = self._formula()
        tok = self._peek()
        if tok.kind != "EOF":
            raise FormulaSyntaxError(tok.position, "end of input", found=tok.text)
        return formula

    def _formula(self) -> Formula:
        left = self._disjunction()
        if self._peek().kind == "->":
            self._advance()
            return Implies(left, self._formula())
        return left

    def _disjunction(self) -> Formula:
        left = self._conjunction()
        if self._peek().kind == "|":
            self._advance()
            return Or(left, self._disjunction())
        return left

    def _conjunction(self) -> Formula:
        left = self._temporal()
        if self._peek().kind == "&":
            self._advance()
            return And(left, self._conjunction())
        return left

    def _temporal(self) -> Formula:
        left = self._unary()
        kind = self._peek().kind
        if kind == "U":
            self._advance()
            return Until(left, self._temporal())
        if kind == "R":
            self._advance()
            return Release(left, self._temporal())
        return left

    def _unary(self) -> Formula:
        tok = self._peek()
        if tok.kind == "G":
            self._advance()
            return Globally(self._unary())
        if tok.kind == "F":
            self._advance()
            return Finally(self._unary())
        if tok.kind == "X":
            self._advance()
            return Next(self._unary())
        if tok.kind == "!":
            self._advance()
            return Not(self._unary())
        if tok.kind in ("exists", "forall"):
            self._advance()
            name = self._expect("IDENT").text
            if name in self._scope:
                raise ShadowedVariableError(name)
            self._expect("in")
            path = self._path()
            self._expect(":")
            self._scope.append(name)
            body = self._unary()
            self._scope.pop()
            return Exists(name, path, body) if tok.kind == "exists" else Forall(name, path, body)
        return self._atom()

    def _path(self) -> Path:
        tok = self._expect("STRING")
        text = tok.text
        if not text.startswith("/") or any(not seg for seg in text[1:].split("/")):
            raise FormulaSyntaxError(tok.position, 'path of the form "/a/b"')
        return Path(tuple(text[1:].split("/")))

    def _atom(self) -> Formula:
        tok = self._peek()
        if tok.kind == "(":
            self._advance()
            inner = self._formula()
            self._expect(")")
            return inner
        if tok.kind == "true":
            self._advance()
            return TrueLit()
        if tok.kind == "false":
            self._advance()
            return FalseLit()
        left = self._term()
        op = self._peek()
        if op.kind == "=":
            self._advance()
            return Eq(left, self._term())
        if op.kind == "!=":
            self._advance()
            return Neq(left, self._term())
        raise FormulaSyntaxError(op.position, "'=' or '!='", found=op.text or "end of input")

    def _term(self) -> Term:
        tok = self._peek()
        if tok.kind == "IDENT":
            self._advance()
            if tok.text not in self._scope:
                raise UnboundVariableError(tok.text)
            return Var(tok.text)
        if tok.kind == "STRING":
            self._advance()
            return Const(tok.text)
        raise FormulaSyntaxError(tok.position, "variable or quoted constant", found=tok.text or "end of input")


def parse(source: str) -> Formula:
    """Parse one formula; the result is well formed by construction."""
    return Parser(source).parse()


def _quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _format_term(term: Term) -> str:
    return term.name if isinstance(term, Var) else _quote(term.value)


def format_formula(formula: Formula) -> str:
    """Render to concrete syntax; parse(format_formula(f)) == f."""
    match formula:
        case TrueLit():
            return "true"
        case FalseLit():
            return "false"
        case Eq(left, right):
            return f"{_format_term(left)} = {_format_term(right)}"
        case Neq(left, right):
            return f"{_format_term(left)} != {_format_term(right)}"
        case Not(body):
            return f"! {format_formula(body)}"
        case Next(body):
            return f"X {format_formula(body)}"
        case Finally(body):
            return f"F {format_formula(body)}"
        case Globally(body):
            return f"G {format_formula(body)}"
        case And(left, right):
            return f"({format_formula(left)} & {format_formula(right)})"
        case Or(left, right):
            return f"({format_formula(left)} | {format_formula(right)})"
        case Implies(left, right):
            return f"({format_formula(left)} -> {format_formula(right)})"
        case Until(left, right):
            return f"({format_formula(left)} U {format_formula(right)})"
        case Release(left, right):
            return f"({format_formula(left)} R {format_formula(right)})"
        case Exists(var, path, body):
            return f"exists {var} in {_quote(str(path))} : {format_formula(body)}"
        case Forall(var, path, body):
            return f"forall {var} in {_quote(str(path))} : {format_formula(body)}"
    raise TypeError(f"not a formula: {formula!r}")


def to_nnf(formula: Formula) -> Formula:
    """Push negations to atoms and lower F, G, ->, true, false.

    The result contains only Eq, Neq, And, Or, Next, Until, Release and
    the two quantifiers.  Boolean literals become the self-evident atoms
    "true" = "true" and "true" != "true".
    """
    match formula:
        case TrueLit():
            return TRUE_ATOM
        case FalseLit():
            return FALSE_ATOM
        case Eq() | Neq():
            return formula
        case And(left, right):
            return And(to_nnf(left), to_nnf(right))
        case Or(left, right):
            return Or(to_nnf(left), to_nnf(right))
        case Implies(left, right):
            return Or(to_nnf(Not(left)), to_nnf(right))
        case Next(body):
            return Next(to_nnf(body))
        case Finally(body):
            return Until(TRUE_ATOM, to_nnf(body))
        case Globally(body):
            return Release(FALSE_ATOM, to_nnf(body))
        case Until(left, right):
            return Until(to_nnf(left), to_nnf(right))
        case Release(left, right):
            return Release(to_nnf(left), to_nnf(right))
        case Exists(var, path, body):
            return Exists(var, path, to_nnf(body))
        case Forall(var, path, body):
            return Forall(var, path, to_nnf(body))
        case Not(inner):
            match inner:
                case TrueLit():
                    return FALSE_ATOM
                case FalseLit():
                    return TRUE_ATOM
                case Eq(left, right):
                    return Neq(left, right)
                case Neq(left, right):
                    return Eq(left, right)
                case Not(body):
                    return to_nnf(body)
                case And(left, right):
                    return Or(to_nnf(Not(left)), to_nnf(Not(right)))
                case Or(left, right):
                    return And(to_nnf(Not(left)), to_nnf(Not(right)))
                case Implies(left, right):
                    return And(to_nnf(left), to_nnf(Not(right)))
                case Next(body):
                    return Next(to_nnf(Not(body)))
                case Finally(body):
                    return Release(FALSE_ATOM, to_nnf(Not(body)))
                case Globally(body):
                    return Until(TRUE_ATOM, to_nnf(Not(body)))
                case Until(left, right):
                    return Release(to_nnf(Not(left)), to_nnf(Not(right)))
                case Release(left, right):
                    return Until(to_nnf(Not(left)), to_nnf(Not(right)))
                case Exists(var, path, body):
                    return Forall(var, path, to_nnf(Not(body)))
                case Forall(var, path, body):
                    return Exists(var, path, to_nnf(Not(body)))
    raise TypeError(f"not a formula: {formula!r}")


def negate(formula: Formula) -> Formula:
    """Negation, returned in negation normal form."""
    return to_nnf(Not(formula))


def is_nnf(formula: Formula) -> bool:
    match formula:
        case Eq() | Neq():
            return True
        case And(left, right) | Or(left, right) | Until(left, right) | Release(left, right):
            return is_nnf(left) and is_nnf(right)
        case Next(body) | Exists(_, _, body) | Forall(_, _, body):
            return is_nnf(body)
        case _:
            return False


def temporal_depth(formula: Formula) -> int:
    """Largest number of temporal operators on any root-to-leaf branch."""
    match formula:
        case TrueLit() | FalseLit() | Eq() | Neq():
            return 0
        case Not(body) | Exists(_, _, body) | Forall(_, _, body):
            return temporal_depth(body)
        case Next(body) | Finally(body) | Globally(body):
            return 1 + temporal_depth(body)
        case And(left, right) | Or(left, right) | Implies(left, right):
            return max(temporal_depth(left), temporal_depth(right))
        case Until(left, right) | Release(left, right):
            return 1 + max(temporal_depth(left), temporal_depth(right))
    raise TypeError(f"not a formula: {formula!r}")


def node_count(formula: Formula) -> int:
    """Number of formula nodes; terms do not count."""
    match formula:
        case TrueLit() | FalseLit() | Eq() | Neq():
            return 1
        case Not(body) | Next(body) | Finally(body) | Globally(body):
            return 1 + node_count(body)
        case Exists(_, _, body) | Forall(_, _, body):
            return 1 + node_count(body)
        case (
            And(left, right)
            | Or(left, right)
            | Implies(left, right)
            | Until(left, right)
            | Release(left, right)
        ):
            return 1 + node_count(left) + node_count(right)
    raise TypeError(f"not a formula: {formula!r}")


def free_variables(formula: Formula) -> frozenset[str]:
    match formula:
        case TrueLit() | FalseLit():
            return frozenset()
        case Eq(left, right) | Neq(left, right):
            return frozenset(t.name for t in (left, right) if isinstance(t, Var))
        case Not(body) | Next(body) | Finally(body) | Globally(body):
            return free_variables(body)
        case (
            And(left, right)
            | Or(left, right)
            | Implies(left, right)
            | Until(left, right)
            | Release(left, right)
        ):
            return free_variables(left) | free_variables(right)
        case Exists(var, _, body) | Forall(var, _, body):
            return free_variables(body) - {var}
    raise TypeError(f"not a formula: {formula!r}")


def quantified_variables(formula: Formula) -> frozenset[str]:
    match formula:
        case TrueLit() | FalseLit() | Eq() | Neq():
            return frozenset()
        case Not(body) | Next(body) | Finally(body) | Globally(body):
            return quantified_variables(body)
        case (
            And(left, right)
            | Or(left, right)
            | Implies(left, right)
            | Until(left, right)
            | Release(left, right)
        ):
            return quantified_variables(left) | quantified_variables(right)
        case Exists(var, _, body) | Forall(var, _, body):
            return quantified_variables(body) | {var}
    raise TypeError(f"not a formula: {formula!r}")


def subformulas(formula: Formula) -> list[Formula]:
    """Subformula closure of a normal-form formula, in first-visit order.

    The formula itself is a member.  Binary connectives and U, R
    contribute both operands, X and the quantifiers contribute the body,
    and equality atoms only themselves.  Structurally equal subtrees are
    collapsed, so the result can be shorter than the node count.
    """
    seen: dict[Formula, None] = {}

    def walk(f: Formula) -> None:
        if f in seen:
            return
        seen[f] = None
        match f:
            case Eq() | Neq():
                pass
            case And(left, right) | Or(left, right) | Until(left, right) | Release(left, right):
                walk(left)
                walk(right)
            case Next(body) | Exists(_, _, body) | Forall(_, _, body):
                walk(body)
            case _:
                raise ValueError("subformula closure is defined on negation normal form only")

    walk(formula)
    return list(seen)


def ensure_well_formed(formula: Formula, scope: frozenset[str] = frozenset()) -> None:
    """Raise unless every variable is bound exactly once on its branch."""
    match formula:
        case TrueLit() | FalseLit():
            return
        case Eq(left, right) | Neq(left, right):
            for term in (left, right):
                if isinstance(term, Var) and term.name not in scope:
                    raise UnboundVariableError(term.name)
        case Not(body) | Next(body) | Finally(body) | Globally(body):
            ensure_well_formed(body, scope)
        case (
            And(left, right)
            | Or(left, right)
            | Implies(left, right)
            | Until(left, right)
            | Release(left, right)
        ):
            ensure_well_formed(left, scope)
            ensure_well_formed(right, scope)
        case Exists(var, _, body) | Forall(var, _, body):
            if var in scope:
                raise ShadowedVariableError(var)
            ensure_well_formed(body, scope | {var})
        case _:
            raise TypeError(f"not a formula: {formula!r}")
