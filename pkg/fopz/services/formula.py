"""FOP_Z formulas: syntax tree, text parser, printer and normal forms.

A formula is a quantifier prefix over named finite sets of integer vectors
followed by a quantifier-free boolean matrix of linear atoms. Free scalar
variables are allowed and must be substituted before any decision procedure
runs.
"""

import re
from dataclasses import dataclass
from enum import Enum
from functools import reduce
from math import gcd
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from fopz.config.settings import DNF_CAP
from fopz.utils.errors import (
    AssignmentError,
    DimensionError,
    DuplicateVariableError,
    FormulaSyntaxError,
    FormulaTooLargeError,
    UnboundVariableError,
)

# (variable name, 1-based coordinate)
Var = Tuple[str, int]
Vector = Tuple[int, ...]


# ===============================
# RELATIONS AND QUANTIFIERS
# ===============================

class Relation(str, Enum):
    GE = ">="
    GT = ">"
    EQ = "="
    NE = "!="
    LE = "<="
    LT = "<"


NEGATED_RELATION = {
    Relation.GE: Relation.LT,
    Relation.GT: Relation.LE,
    Relation.EQ: Relation.NE,
    Relation.NE: Relation.EQ,
    Relation.LE: Relation.GT,
    Relation.LT: Relation.GE,
}

_COMPARE: Dict[Relation, Callable[[int], bool]] = {
    Relation.GE: lambda v: v >= 0,
    Relation.GT: lambda v: v > 0,
    Relation.EQ: lambda v: v == 0,
    Relation.NE: lambda v: v != 0,
    Relation.LE: lambda v: v <= 0,
    Relation.LT: lambda v: v < 0,
}


class Quantifier(str, Enum):
    EXISTS = "exists"
    FORALL = "forall"

    def flipped(self) -> "Quantifier":
        return Quantifier.FORALL if self is Quantifier.EXISTS else Quantifier.EXISTS


# ===============================
# LINEAR FORMS AND ATOMS
# ===============================

@dataclass(frozen=True)
class LinearForm:
    """Σ c·x[i] + Σ c·t + constant, with zero coefficients omitted.

    Coefficient tuples are kept sorted by (variable name, coordinate), which is
    the canonical variable ordering used everywhere else.
    """
    coeffs: Tuple[Tuple[Var, int], ...] = ()
    free_coeffs: Tuple[Tuple[str, int], ...] = ()
    constant: int = 0

    @classmethod
    def build(cls, coeffs: Optional[Mapping[Var, int]] = None,
              free_coeffs: Optional[Mapping[str, int]] = None,
              constant: int = 0) -> "LinearForm":
        return cls(
            tuple(sorted((var, int(c)) for var, c in (coeffs or {}).items() if c != 0)),
            tuple(sorted((name, int(c)) for name, c in (free_coeffs or {}).items() if c != 0)),
            int(constant),
        )

    @classmethod
    def const(cls, value: int) -> "LinearForm":
        return cls(constant=int(value))

    def coeff_map(self) -> Dict[Var, int]:
        return dict(self.coeffs)

    def free_map(self) -> Dict[str, int]:
        return dict(self.free_coeffs)

    @property
    def is_constant(self) -> bool:
        return not self.coeffs and not self.free_coeffs

    def variables(self) -> List[str]:
        return sorted({name for (name, _), _ in self.coeffs})

    def coefficients_for(self, name: str) -> Dict[int, int]:
        """Coordinate → coefficient for one quantified variable."""
        return {i: c for (var, i), c in self.coeffs if var == name}

    def __add__(self, other: "LinearForm") -> "LinearForm":
        coeffs = self.coeff_map()
        for var, c in other.coeffs:
            coeffs[var] = coeffs.get(var, 0) + c
        free = self.free_map()
        for name, c in other.free_coeffs:
            free[name] = free.get(name, 0) + c
        return LinearForm.build(coeffs, free, self.constant + other.constant)

    def __neg__(self) -> "LinearForm":
        return self.scale(-1)

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return self + (-other)

    def scale(self, factor: int) -> "LinearForm":
        return LinearForm.build(
            {var: c * factor for var, c in self.coeffs},
            {name: c * factor for name, c in self.free_coeffs},
            self.constant * factor,
        )

    def shift(self, delta: int) -> "LinearForm":
        return LinearForm(self.coeffs, self.free_coeffs, self.constant + delta)

    def evaluate(self, env: Mapping[str, Sequence[int]], free: Optional[Mapping[str, int]] = None) -> int:
        total = self.constant
        for (name, i), c in self.coeffs:
            total += c * env[name][i - 1]
        for name, c in self.free_coeffs:
            total += c * free[name]
        return total

    def substitute_free(self, assignment: Mapping[str, int]) -> "LinearForm":
        folded = self.constant + sum(c * assignment[name] for name, c in self.free_coeffs)
        return LinearForm(self.coeffs, (), folded)

    def bind_variable(self, name: str, vector: Sequence[int]) -> "LinearForm":
        """Fold a concrete vector for ``name`` into the constant."""
        kept = []
        folded = self.constant
        for (var, i), c in self.coeffs:
            if var == name:
                folded += c * vector[i - 1]
            else:
                kept.append(((var, i), c))
        return LinearForm(tuple(kept), self.free_coeffs, folded)


def _canonical_ge(form: LinearForm) -> LinearForm:
    # f >= 0 with gcd g over the coefficients  <=>  f/g rounded down >= 0
    values = [abs(c) for _, c in form.coeffs] + [abs(c) for _, c in form.free_coeffs]
    if not values:
        return form
    g = reduce(gcd, values)
    if g == 1:
        return form
    return LinearForm(
        tuple((var, c // g) for var, c in form.coeffs),
        tuple((name, c // g) for name, c in form.free_coeffs),
        form.constant // g,
    )


@dataclass(frozen=True)
class Atom:
    """``form ⋈ 0`` for a relation ⋈."""
    form: LinearForm
    relation: Relation = Relation.GE

    def holds(self, env: Mapping[str, Sequence[int]], free: Optional[Mapping[str, int]] = None) -> bool:
        return _COMPARE[self.relation](self.form.evaluate(env, free))

    @property
    def is_constant(self) -> bool:
        return self.form.is_constant

    def constant_value(self) -> bool:
        return _COMPARE[self.relation](self.form.constant)

    def negated(self) -> "Atom":
        return Atom(self.form, NEGATED_RELATION[self.relation])

    def to_ge_clauses(self) -> List[List["Atom"]]:
        """DNF of this atom using only canonical ``>=`` atoms (integrality shifts)."""
        f = self.form
        rel = self.relation
        if rel is Relation.GE:
            clauses = [[f]]
        elif rel is Relation.GT:
            clauses = [[f.shift(-1)]]
        elif rel is Relation.LE:
            clauses = [[-f]]
        elif rel is Relation.LT:
            clauses = [[(-f).shift(-1)]]
        elif rel is Relation.EQ:
            clauses = [[f, -f]]
        else:
            clauses = [[f.shift(-1)], [(-f).shift(-1)]]
        return [[Atom(_canonical_ge(form), Relation.GE) for form in clause] for clause in clauses]

    def canonical(self) -> "Atom":
        """gcd-reduced atom; ≤ and < are rewritten as ≥ and >."""
        if self.relation in (Relation.GE, Relation.GT):
            form = self.form if self.relation is Relation.GE else self.form.shift(-1)
            return Atom(_canonical_ge(form), Relation.GE)
        if self.relation in (Relation.LE, Relation.LT):
            return Atom(-self.form, Relation.GE if self.relation is Relation.LE else Relation.GT).canonical()
        values = [abs(c) for _, c in self.form.coeffs] + [abs(c) for _, c in self.form.free_coeffs]
        if not values:
            return self
        g = reduce(gcd, values)
        if self.form.constant % g:
            # ℓ·g = -c has no integer solution
            return Atom(LinearForm.const(0 if self.relation is Relation.NE else -1), Relation.GE)
        form = LinearForm(
            tuple((var, c // g) for var, c in self.form.coeffs),
            tuple((name, c // g) for name, c in self.form.free_coeffs),
            self.form.constant // g,
        )
        leading = form.coeffs[0][1] if form.coeffs else form.free_coeffs[0][1]
        return Atom(-form if leading < 0 else form, self.relation)


TRUE_ATOM = Atom(LinearForm.const(0), Relation.GE)
FALSE_ATOM = Atom(LinearForm.const(-1), Relation.GE)


# Key of the hyperplane behind a canonical >= atom: (primitive coefficients, r)
# for the inequality ℓ <= r; the atom is either that inequality or its negation.
InequalityKey = Tuple[Tuple[Tuple[Var, int], ...], int]


def inequality_key(atom: Atom) -> Optional[Tuple[InequalityKey, bool]]:
    """Return ((ℓ, r), positive) with atom ≡ (ℓ <= r) when positive, else ¬(ℓ <= r).

    ``ℓ`` is primitive with a positive leading coefficient. Constant atoms have
    no key.
    """
    form = atom.form
    if atom.relation is not Relation.GE:
        raise ValueError("inequality keys are defined on >= atoms")
    if form.free_coeffs:
        raise AssignmentError("inequality keys need a closed atom")
    if not form.coeffs:
        return None
    g = reduce(gcd, (abs(c) for _, c in form.coeffs))
    sign = 1 if form.coeffs[0][1] > 0 else -1
    primitive = tuple((var, sign * c // g) for var, c in form.coeffs)
    if sign > 0:
        # g·ℓ + c >= 0  <=>  ℓ >= -floor(c/g)  <=>  ¬(ℓ <= -floor(c/g) - 1)
        return (primitive, -(form.constant // g) - 1), False
    # -g·ℓ + c >= 0  <=>  ℓ <= floor(c/g)
    return (primitive, form.constant // g), True


# ===============================
# MATRIX
# ===============================

@dataclass(frozen=True)
class And:
    parts: Tuple["Matrix", ...]


@dataclass(frozen=True)
class Or:
    parts: Tuple["Matrix", ...]


@dataclass(frozen=True)
class Not:
    part: "Matrix"


Matrix = Union[Atom, And, Or, Not]


def iter_atoms(matrix: Matrix) -> Iterator[Atom]:
    if isinstance(matrix, Atom):
        yield matrix
    elif isinstance(matrix, Not):
        yield from iter_atoms(matrix.part)
    else:
        for part in matrix.parts:
            yield from iter_atoms(part)


def map_atoms(matrix: Matrix, fn: Callable[[Atom], Atom]) -> Matrix:
    if isinstance(matrix, Atom):
        return fn(matrix)
    if isinstance(matrix, Not):
        return Not(map_atoms(matrix.part, fn))
    return type(matrix)(tuple(map_atoms(part, fn) for part in matrix.parts))


def matrix_holds(matrix: Matrix, env: Mapping[str, Sequence[int]], free: Optional[Mapping[str, int]] = None) -> bool:
    if isinstance(matrix, Atom):
        return matrix.holds(env, free)
    if isinstance(matrix, Not):
        return not matrix_holds(matrix.part, env, free)
    if isinstance(matrix, And):
        return all(matrix_holds(part, env, free) for part in matrix.parts)
    return any(matrix_holds(part, env, free) for part in matrix.parts)


def push_negation(matrix: Matrix, negate: bool = False) -> Matrix:
    """Negation normal form: ``not`` only survives folded into atom relations."""
    if isinstance(matrix, Atom):
        return matrix.negated() if negate else matrix
    if isinstance(matrix, Not):
        return push_negation(matrix.part, not negate)
    parts = tuple(push_negation(part, negate) for part in matrix.parts)
    if isinstance(matrix, And):
        return Or(parts) if negate else And(parts)
    return And(parts) if negate else Or(parts)


# ===============================
# FORMULAS
# ===============================

@dataclass(frozen=True)
class QuantifiedVar:
    quantifier: Quantifier
    name: str
    set_name: str
    dimension: int = 1


def evaluate_prefix(prefix: Sequence[QuantifiedVar], sets: Mapping[str, Sequence[Vector]],
                    test: Callable[[Dict[str, Vector]], bool],
                    env: Optional[Dict[str, Vector]] = None) -> bool:
    """Nested enumeration: ∃ is ``any`` and ∀ is ``all`` over the named set."""
    if env is None:
        env = {}
    if not prefix:
        return test(env)
    head, rest = prefix[0], prefix[1:]

    def branch(vector: Vector) -> bool:
        env[head.name] = vector
        return evaluate_prefix(rest, sets, test, env)

    items = sets[head.set_name]
    if head.quantifier is Quantifier.EXISTS:
        return any(branch(v) for v in items)
    return all(branch(v) for v in items)


@dataclass(frozen=True)
class Formula:
    prefix: Tuple[QuantifiedVar, ...]
    matrix: Matrix
    free_vars: Tuple[str, ...] = ()

    def __post_init__(self):
        if not self.prefix:
            raise FormulaSyntaxError("formula needs at least one quantifier", 1, 1)
        dims: Dict[str, int] = {}
        for q in self.prefix:
            if q.name in dims:
                raise DuplicateVariableError(f"variable '{q.name}' is quantified twice")
            if q.dimension < 1:
                raise DimensionError(f"dimension of '{q.name}' must be >= 1")
            dims[q.name] = q.dimension
        free = set(self.free_vars)
        if free & set(dims):
            raise DuplicateVariableError(f"free variables shadow quantified ones: {sorted(free & set(dims))}")
        for atom in iter_atoms(self.matrix):
            for (name, i), _ in atom.form.coeffs:
                if name not in dims:
                    raise UnboundVariableError(f"variable '{name}' is not bound by the prefix")
                if not 1 <= i <= dims[name]:
                    raise DimensionError(f"coordinate {name}[{i}] outside 1..{dims[name]}")
            for name, _ in atom.form.free_coeffs:
                if name not in free:
                    raise UnboundVariableError(f"free variable '{name}' is not declared")

    @property
    def k(self) -> int:
        return len(self.prefix)

    @property
    def is_closed(self) -> bool:
        return not self.free_vars

    @property
    def quantifiers(self) -> Tuple[Quantifier, ...]:
        return tuple(q.quantifier for q in self.prefix)

    def evaluate(self, sets: Mapping[str, Sequence[Vector]], free: Optional[Mapping[str, int]] = None) -> bool:
        """Brute-force truth value over concrete sets."""
        return evaluate_prefix(self.prefix, sets, lambda env: matrix_holds(self.matrix, env, free))


@dataclass(frozen=True)
class NormalizedFormula:
    """Closed formula whose matrix is a DNF of canonical ``>=`` atoms."""
    prefix: Tuple[QuantifiedVar, ...]
    disjuncts: Tuple[Tuple[Atom, ...], ...]

    @property
    def k(self) -> int:
        return len(self.prefix)

    @property
    def quantifiers(self) -> Tuple[Quantifier, ...]:
        return tuple(q.quantifier for q in self.prefix)

    def holds(self, env: Mapping[str, Sequence[int]]) -> bool:
        return any(all(atom.holds(env) for atom in clause) for clause in self.disjuncts)

    def evaluate(self, sets: Mapping[str, Sequence[Vector]]) -> bool:
        return evaluate_prefix(self.prefix, sets, self.holds)

    def bind_variable(self, name: str, vector: Sequence[int]) -> "NormalizedFormula":
        """Substitute a concrete vector for a quantified variable and drop it from the prefix."""
        prefix = tuple(q for q in self.prefix if q.name != name)
        if len(prefix) == len(self.prefix):
            raise UnboundVariableError(f"variable '{name}' is not in the prefix")
        clauses = []
        for clause in self.disjuncts:
            clauses.append([Atom(atom.form.bind_variable(name, vector), Relation.GE) for atom in clause])
        return NormalizedFormula(prefix, _simplify_clauses(clauses))

    def negated(self, cap: int = DNF_CAP) -> "NormalizedFormula":
        """Normal form of the negation: quantifiers flipped, ¬(f >= 0) as -f - 1 >= 0."""
        prefix = tuple(QuantifiedVar(q.quantifier.flipped(), q.name, q.set_name, q.dimension) for q in self.prefix)
        clauses: List[List[Atom]] = [[]]
        for clause in self.disjuncts:
            options = [Atom(_canonical_ge((-atom.form).shift(-1)), Relation.GE) for atom in clause]
            if len(clauses) * len(options) > cap:
                raise FormulaTooLargeError(f"formula too large: more than {cap} disjuncts in the negation")
            clauses = list(_simplify_clauses([left + [option] for left in clauses for option in options]))
            clauses = [list(clause) for clause in clauses]
        return NormalizedFormula(prefix, _simplify_clauses(clauses))

    def inequality_keys(self) -> Tuple[InequalityKey, ...]:
        keys = {}
        for clause in self.disjuncts:
            for atom in clause:
                entry = inequality_key(atom)
                if entry is not None:
                    keys[entry[0]] = None
        return tuple(sorted(keys))

    @property
    def dimension(self) -> int:
        return len(self.inequality_keys())


# ===============================
# PARSER
# ===============================

KEYWORDS = {"exists", "forall", "in", "and", "or", "not"}

_UNICODE_RELATIONS = {"≤": "<=", "≥": ">=", "≠": "!="}

TOKEN_SPEC = [
    ("COMMENT", r"#[^\n]*"),
    ("NUMBER", r"\d+"),
    ("IDENT", r"[A-Za-z_][A-Za-z_0-9]*"),
    ("REL", r"<=|>=|!=|≤|≥|≠|<|>|="),
    ("OP", r"[+\-*:^\[\]()]"),
    ("NEWLINE", r"\n"),
    ("SKIP", r"[ \t\r]+"),
    ("MISMATCH", r"."),
]
TOKEN_REGEX = re.compile("|".join(f"(?P<{name}>{pattern})" for name, pattern in TOKEN_SPEC))


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    line, line_start = 1, 0
    for match in TOKEN_REGEX.finditer(text):
        kind, value = match.lastgroup, match.group()
        column = match.start() - line_start + 1
        if kind == "NEWLINE":
            line, line_start = line + 1, match.end()
            continue
        if kind in ("SKIP", "COMMENT"):
            continue
        if kind == "MISMATCH":
            raise FormulaSyntaxError(f"unexpected character {value!r}", line, column)
        if kind == "REL":
            value = _UNICODE_RELATIONS.get(value, value)
        tokens.append(Token(kind, value, line, column))
    tokens.append(Token("EOF", "", line, len(text) - line_start + 1))
    return tokens


class _Parser:
    """Recursive-descent parser over the token list."""

    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.dims: Dict[str, int] = {}
        self.free: Dict[str, None] = {}

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def at(self, kind: str, value: Optional[str] = None) -> bool:
        token = self.peek()
        return token.kind == kind and (value is None or token.value == value)

    def expect(self, kind: str, value: Optional[str] = None) -> Token:
        if not self.at(kind, value):
            token = self.peek()
            wanted = repr(value) if value is not None else kind.lower()
            found = repr(token.value) if token.value else "end of input"
            raise FormulaSyntaxError(f"expected {wanted}, found {found}", token.line, token.column)
        return self.advance()

    def parse(self) -> Formula:
        prefix = []
        while self.at("IDENT", "exists") or self.at("IDENT", "forall"):
            prefix.append(self.parse_quantifier())
        if not prefix:
            token = self.peek()
            raise FormulaSyntaxError("expected 'exists' or 'forall'", token.line, token.column)
        self.expect("OP", ":")
        matrix = self.parse_or()
        self.expect("EOF")
        return Formula(tuple(prefix), matrix, tuple(self.free))

    def parse_quantifier(self) -> QuantifiedVar:
        quantifier = Quantifier(self.advance().value)
        name_token = self.parse_identifier()
        if name_token.value in self.dims:
            raise DuplicateVariableError(
                f"variable '{name_token.value}' is quantified twice "
                f"(line {name_token.line}, column {name_token.column})"
            )
        self.expect("IDENT", "in")
        set_token = self.parse_identifier()
        dimension = 1
        if self.at("OP", "^"):
            self.advance()
            dim_token = self.expect("NUMBER")
            dimension = int(dim_token.value)
            if dimension < 1:
                raise DimensionError(f"dimension must be >= 1 (line {dim_token.line}, column {dim_token.column})")
        self.dims[name_token.value] = dimension
        return QuantifiedVar(quantifier, name_token.value, set_token.value, dimension)

    def parse_identifier(self) -> Token:
        token = self.expect("IDENT")
        if token.value in KEYWORDS:
            raise FormulaSyntaxError(f"keyword '{token.value}' used as a name", token.line, token.column)
        return token

    def parse_or(self) -> Matrix:
        parts = [self.parse_and()]
        while self.at("IDENT", "or"):
            self.advance()
            parts.append(self.parse_and())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def parse_and(self) -> Matrix:
        parts = [self.parse_not()]
        while self.at("IDENT", "and"):
            self.advance()
            parts.append(self.parse_not())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def parse_not(self) -> Matrix:
        if self.at("IDENT", "not"):
            self.advance()
            return Not(self.parse_not())
        if self.at("OP", "("):
            self.advance()
            inner = self.parse_or()
            self.expect("OP", ")")
            return inner
        return self.parse_atom()

    def parse_atom(self) -> Atom:
        left = self.parse_linexpr()
        relation = Relation(self.expect("REL").value)
        right = self.parse_linexpr()
        return Atom(left - right, relation)

    def parse_linexpr(self) -> LinearForm:
        sign = 1
        if self.at("OP", "+") or self.at("OP", "-"):
            sign = -1 if self.advance().value == "-" else 1
        total = self.parse_term().scale(sign)
        while self.at("OP", "+") or self.at("OP", "-"):
            sign = -1 if self.advance().value == "-" else 1
            total = total + self.parse_term().scale(sign)
        return total

    def parse_term(self) -> LinearForm:
        if self.at("NUMBER"):
            value = int(self.advance().value)
            if self.at("OP", "*"):
                self.advance()
                return self.parse_reference().scale(value)
            return LinearForm.const(value)
        return self.parse_reference()

    def parse_reference(self) -> LinearForm:
        token = self.parse_identifier()
        name = token.value
        if self.at("OP", "["):
            self.advance()
            index_token = self.expect("NUMBER")
            self.expect("OP", "]")
            if name not in self.dims:
                raise UnboundVariableError(
                    f"variable '{name}' is not bound by the prefix (line {token.line}, column {token.column})"
                )
            index = int(index_token.value)
            if not 1 <= index <= self.dims[name]:
                raise DimensionError(
                    f"coordinate {name}[{index}] outside 1..{self.dims[name]} "
                    f"(line {index_token.line}, column {index_token.column})"
                )
            return LinearForm.build({(name, index): 1})
        if name in self.dims:
            raise FormulaSyntaxError(f"quantified variable '{name}' needs a coordinate index", token.line, token.column)
        self.free[name] = None
        return LinearForm.build(free_coeffs={name: 1})


def parse(text: str) -> Formula:
    """Parse formula source text.

    Args:
        text: formula in the DSL, e.g. ``exists a in A: a[1] = 0``

    Returns:
        Formula whose free variables are listed in order of first appearance
    """
    return _Parser(text).parse()


# ===============================
# PRINTER
# ===============================

def _format_form(form: LinearForm) -> str:
    terms = [(c, f"{name}[{i}]") for (name, i), c in form.coeffs]
    terms += [(c, name) for name, c in form.free_coeffs]
    if not terms:
        return "0"
    pieces = []
    for position, (c, ref) in enumerate(terms):
        magnitude = abs(c)
        body = ref if magnitude == 1 else f"{magnitude}*{ref}"
        if position == 0:
            pieces.append(f"-{body}" if c < 0 else body)
        else:
            pieces.append(f"- {body}" if c < 0 else f"+ {body}")
    return " ".join(pieces)


def _format_matrix(matrix: Matrix) -> str:
    if isinstance(matrix, Atom):
        rhs = -matrix.form.constant
        lhs = LinearForm(matrix.form.coeffs, matrix.form.free_coeffs, 0)
        rhs_text = str(rhs) if rhs >= 0 else f"-{-rhs}"
        return f"{_format_form(lhs)} {matrix.relation.value} {rhs_text}"
    if isinstance(matrix, Not):
        return f"not ({_format_matrix(matrix.part)})"
    joiner = " and " if isinstance(matrix, And) else " or "
    return joiner.join(
        _format_matrix(part) if isinstance(part, Atom) else f"({_format_matrix(part)})"
        for part in matrix.parts
    )


def pretty_print(f: Formula) -> str:
    quantifiers = " ".join(
        f"{q.quantifier.value} {q.name} in {q.set_name}" + (f"^{q.dimension}" if q.dimension > 1 else "")
        for q in f.prefix
    )
    return f"{quantifiers}: {_format_matrix(f.matrix)}"


# ===============================
# TRANSFORMATIONS
# ===============================

def substitute_free(f: Formula, assignment: Mapping[str, int]) -> Formula:
    """Fold free-variable values into atom constants, closing the formula."""
    missing = [name for name in f.free_vars if name not in assignment]
    extra = [name for name in assignment if name not in f.free_vars]
    if missing or extra:
        raise AssignmentError(f"assignment mismatch: missing {missing}, extra {extra}")
    values = {name: int(value) for name, value in assignment.items()}
    matrix = map_atoms(f.matrix, lambda atom: Atom(atom.form.substitute_free(values), atom.relation))
    return Formula(f.prefix, matrix, ())


def negate_dualize(f: Formula) -> Formula:
    """Formula deciding the negation: quantifiers flipped, negation pushed to the atoms."""
    prefix = tuple(QuantifiedVar(q.quantifier.flipped(), q.name, q.set_name, q.dimension) for q in f.prefix)
    return Formula(prefix, push_negation(f.matrix, negate=True), f.free_vars)


def _atom_order(atom: Atom):
    return atom.form.coeffs, atom.form.free_coeffs, atom.form.constant


def _simplify_clauses(clauses: Sequence[Sequence[Atom]]) -> Tuple[Tuple[Atom, ...], ...]:
    """Drop true constants, drop clauses with a false constant, dedup."""
    result: Dict[Tuple[Atom, ...], None] = {}
    for clause in clauses:
        kept = {}
        satisfiable = True
        for atom in clause:
            if atom.is_constant:
                if not atom.constant_value():
                    satisfiable = False
                    break
                continue
            kept[atom] = None
        if satisfiable:
            result[tuple(sorted(kept, key=_atom_order))] = None
    return tuple(result)


def _dnf(matrix: Matrix, cap: int) -> List[List[Atom]]:
    if isinstance(matrix, Atom):
        return matrix.to_ge_clauses()
    if isinstance(matrix, Or):
        clauses = []
        for part in matrix.parts:
            clauses.extend(_dnf(part, cap))
            if len(clauses) > cap:
                raise FormulaTooLargeError(f"formula too large: more than {cap} disjuncts")
        return clauses
    if isinstance(matrix, And):
        clauses = [[]]
        for part in matrix.parts:
            part_clauses = _dnf(part, cap)
            if len(clauses) * len(part_clauses) > cap:
                raise FormulaTooLargeError(f"formula too large: more than {cap} disjuncts")
            clauses = [left + right for left in clauses for right in part_clauses]
        return clauses
    raise TypeError(f"matrix not in negation normal form: {matrix!r}")


def to_dnf(f: Formula, cap: int = DNF_CAP) -> NormalizedFormula:
    """Disjunctive normal form over canonical ``>=`` atoms.

    Args:
        f: closed formula
        cap: maximum number of co-clauses before giving up

    Returns:
        NormalizedFormula with the same prefix and semantics
    """
    if not f.is_closed:
        raise AssignmentError(f"formula has free variables {list(f.free_vars)}; substitute them first")
    clauses = _dnf(push_negation(f.matrix), cap)
    return NormalizedFormula(f.prefix, _simplify_clauses(clauses))


def inequality_dimension_upper(f: Formula, cap: int = DNF_CAP) -> int:
    """Syntactic upper bound on the inequality dimension.

    Counts distinct hyperplanes among the normalized atoms; an atom and its
    integer negation share one hyperplane, so ``=`` and ``!=`` contribute two.
    """
    return to_dnf(f, cap).dimension
