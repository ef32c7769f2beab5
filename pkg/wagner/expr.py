"""Scalar expression language for chart coefficients, metrics and curves.

Grammar (see ``docs/grammar.md``)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Evaluation is generic: bindings may be floats or :class:`wagner.jets.Jet`
values, and the same tree yields either a number or a jet.
"""

import logging
import math
import re
from dataclasses import dataclass

from . import jets
from .errors import ExprSyntaxError, UnboundVariableError, UnknownIdentifierError

logger = logging.getLogger(__name__)

FUNCTIONS = {
    'sqrt': jets.sqrt,
    'exp': jets.exp,
    'log': jets.log,
    'sin': jets.sin,
    'cos': jets.cos,
}
CONSTANTS = {'pi': math.pi}
NON_SMOOTH = frozenset(['abs', 'min', 'max', 'sign', 'floor', 'ceil'])

_TOKEN = re.compile(r'''
    (?P<space>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
''', re.VERBOSE)

_PRIMARY = frozenset(['number', 'identifier', '(', '-'])

# Binding strength used when printing.
_ADD, _MUL, _NEG, _POW, _ATOM = 1, 2, 3, 4, 5


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    func: str
    arg: object


def variables_for(m, extra=()):
    """Names a chart of dimension ``2m+1`` lets expressions use."""
    names = ['x%d' % i for i in range(1, 2 * m + 2)]
    names += ['v%d' % i for i in range(1, 2 * m + 1)]
    return tuple(names) + tuple(extra)


class _Token(object):
    __slots__ = ('kind', 'text', 'offset')

    def __init__(self, kind, text, offset):
        self.kind = kind
        self.text = text
        self.offset = offset


def _tokenize(text):
    tokens = []
    pos = 0
    byte_offset = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise ExprSyntaxError('unexpected character %r' % text[pos], byte_offset,
                                  _PRIMARY | {'+', '*', '/', '^', ')'})
        kind = match.lastgroup
        value = match.group()
        if kind == 'name':
            tokens.append(_Token('identifier', value, byte_offset))
        elif kind == 'number':
            tokens.append(_Token('number', value, byte_offset))
        elif kind == 'op':
            tokens.append(_Token(value, value, byte_offset))
        byte_offset += len(value.encode('utf-8'))
        pos = match.end()
    tokens.append(_Token('end', '', byte_offset))
    return tokens


class _Parser(object):

    def __init__(self, text, permitted, extra=()):
        self.tokens = _tokenize(text)
        self.index = 0
        self.permitted = permitted
        self.extra = tuple(extra)

    @property
    def token(self):
        return self.tokens[self.index]

    def advance(self):
        token = self.tokens[self.index]
        self.index += 1
        return token

    def fail(self, expected):
        token = self.token
        found = 'end of input' if token.kind == 'end' else repr(token.text)
        raise ExprSyntaxError('unexpected %s' % found, token.offset, expected)

    def parse(self):
        tree = self.expr()
        if self.token.kind != 'end':
            self.fail({'+', '-', '*', '/', '^', 'end of input'})
        return tree

    def expr(self):
        left = self.term()
        while self.token.kind in ('+', '-'):
            op = self.advance().kind
            left = BinOp(op, left, self.term())
        return left

    def term(self):
        left = self.unary()
        while self.token.kind in ('*', '/'):
            op = self.advance().kind
            left = BinOp(op, left, self.unary())
        return left

    def unary(self):
        if self.token.kind == '-':
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.token.kind == '^':
            self.advance()
            return BinOp('^', base, self.unary())
        return base

    def atom(self):
        token = self.token
        if token.kind == 'number':
            self.advance()
            return Num(float(token.text))
        if token.kind == '(':
            self.advance()
            inner = self.expr()
            if self.token.kind != ')':
                self.fail({')', '+', '-', '*', '/', '^'})
            self.advance()
            return inner
        if token.kind == 'identifier':
            return self.identifier()
        self.fail(_PRIMARY)

    def identifier(self):
        token = self.advance()
        name = token.text
        if self.token.kind == '(':
            if name in NON_SMOOTH:
                raise UnknownIdentifierError(
                    name, sorted(FUNCTIONS), token.offset,
                    reason='function %r is not smooth and is not allowed' % name)
            if name not in FUNCTIONS:
                raise UnknownIdentifierError(name, sorted(FUNCTIONS), token.offset,
                                             reason='unknown function %r' % name)
            self.advance()
            arg = self.expr()
            if self.token.kind != ')':
                self.fail({')', '+', '-', '*', '/', '^'})
            self.advance()
            return Call(name, arg)
        if name in CONSTANTS:
            return Num(CONSTANTS[name])
        if self.permitted is None:
            if name in self.extra or re.match(r'^[xv][1-9]\d*$', name):
                return Var(name)
            raise UnknownIdentifierError(name, ('x<i>', 'v<i>') + self.extra,
                                         token.offset)
        if name not in self.permitted:
            raise UnknownIdentifierError(name, self.permitted, token.offset)
        return Var(name)


def parse(text, m=None, extra=(), variables=None):
    """Parse ``text`` into an expression tree.

    Args:
        text (str): Expression source.
        m (int): Half-rank of the chart; restricts variables to ``x1..x{2m+1}``
            and ``v1..v{2m}``. When omitted any ``x<i>`` or ``v<i>`` is accepted.
        extra (tuple): Additional variable names allowed next to the chart's.
        variables (tuple): Exact set of permitted variable names; overrides
            ``m`` and ``extra``, e.g. ``('t',)`` for curve components.

    Returns:
        The root node of the tree.
    """
    if isinstance(text, bytes):
        text = text.decode('utf-8')
    if variables is not None:
        permitted = tuple(variables)
    elif m is not None:
        permitted = variables_for(m, extra)
    else:
        permitted = None
    return _Parser(text, permitted, extra).parse()


def free_variables(tree):
    """Set of variable names occurring in ``tree``."""
    if isinstance(tree, Var):
        return frozenset([tree.name])
    if isinstance(tree, Num):
        return frozenset()
    if isinstance(tree, Neg):
        return free_variables(tree.operand)
    if isinstance(tree, Call):
        return free_variables(tree.arg)
    return free_variables(tree.left) | free_variables(tree.right)


def _strength(tree):
    if isinstance(tree, BinOp):
        return {'+': _ADD, '-': _ADD, '*': _MUL, '/': _MUL, '^': _POW}[tree.op]
    if isinstance(tree, Neg):
        return _NEG
    if isinstance(tree, Num) and (tree.value < 0 or math.copysign(1.0, tree.value) < 0):
        return _NEG
    return _ATOM


def _wrap(tree, needs_parens):
    text = to_text(tree)
    return '(%s)' % text if needs_parens else text


def to_text(tree):
    """Source text that parses back to ``tree``."""
    if isinstance(tree, Num):
        return repr(float(tree.value))
    if isinstance(tree, Var):
        return tree.name
    if isinstance(tree, Neg):
        return '-' + _wrap(tree.operand, _strength(tree.operand) < _NEG)
    if isinstance(tree, Call):
        return '%s(%s)' % (tree.func, to_text(tree.arg))
    strength = _strength(tree)
    left, right = _strength(tree.left), _strength(tree.right)
    if tree.op == '^':
        return '%s^%s' % (_wrap(tree.left, left <= _POW), _wrap(tree.right, right < _NEG))
    return '%s %s %s' % (_wrap(tree.left, left < strength), tree.op,
                         _wrap(tree.right, right <= strength))


def evaluate(tree, bindings):
    """Value of ``tree`` with variables taken from ``bindings``.

    Bindings may hold floats or jets; the result has the same kind.

    Raises:
        UnboundVariableError: a free variable has no binding.
        DomainError: log, sqrt, power or division outside its smooth domain.
    """
    if isinstance(tree, Num):
        return tree.value
    if isinstance(tree, Var):
        try:
            return bindings[tree.name]
        except KeyError:
            raise UnboundVariableError(tree.name)
    if isinstance(tree, Neg):
        return -evaluate(tree.operand, bindings)
    if isinstance(tree, Call):
        return FUNCTIONS[tree.func](evaluate(tree.arg, bindings))
    left = evaluate(tree.left, bindings)
    right = evaluate(tree.right, bindings)
    op = tree.op
    if op == '+':
        return left + right
    if op == '-':
        return left - right
    if op == '*':
        return left * right
    if op == '/':
        return jets.divide(left, right)
    return jets.power(left, right)


def substitute(tree, mapping):
    """Copy of ``tree`` with variables replaced by the trees in ``mapping``."""
    if isinstance(tree, Var):
        return mapping.get(tree.name, tree)
    if isinstance(tree, Num):
        return tree
    if isinstance(tree, Neg):
        return Neg(substitute(tree.operand, mapping))
    if isinstance(tree, Call):
        return Call(tree.func, substitute(tree.arg, mapping))
    return BinOp(tree.op, substitute(tree.left, mapping), substitute(tree.right, mapping))
