"""Hash-consed polynomial expression DAGs.

Nodes are constants, parameters, binary ``add``/``mul``, ``scale`` by a
complex constant and nonnegative integer powers.  Identical subexpressions are
shared, constants are folded eagerly, and symbolic differentiation stays inside
the same node set, which is what lets constructors such as tangential
varieties be expressed as DAGs again.

Evaluation compiles a list of output nodes into a flat :class:`Program` that
the jet kernel interprets.
"""

import itertools
import numbers
import weakref

import numpy as np

from . import _kernels
from .jets import Jet3

_INTERN = weakref.WeakValueDictionary()
_COUNTER = itertools.count()


class Expr:
    __slots__ = ("op", "args", "data", "uid", "__weakref__")

    def __repr__(self):
        return f"Expr<{self.op}#{self.uid}>"

    def __hash__(self):
        return self.uid

    def __eq__(self, other):
        return self is other

    # operator sugar
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, scale(as_expr(other), -1.0))

    def __rsub__(self, other):
        return add(as_expr(other), scale(self, -1.0))

    def __neg__(self):
        return scale(self, -1.0)

    def __mul__(self, other):
        if isinstance(other, Expr):
            return mul(self, other)
        return scale(self, other)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, e):
        return power(self, e)

    @property
    def is_const(self):
        return self.op == "const"

    @property
    def value(self):
        if self.op != "const":
            raise TypeError("not a constant")
        return self.data


def _node(op, args=(), data=None):
    key = (op, tuple(a.uid for a in args), data)
    node = _INTERN.get(key)
    if node is None:
        node = Expr.__new__(Expr)
        node.op = op
        node.args = tuple(args)
        node.data = data
        node.uid = next(_COUNTER)
        _INTERN[key] = node
    return node


def const(c):
    c = complex(c)
    if c == 0:
        c = 0j  # fold -0.0
    return _node("const", (), c)


def param(i):
    if i < 0:
        raise ValueError("parameter index must be nonnegative")
    return _node("param", (), int(i))


def as_expr(x):
    if isinstance(x, Expr):
        return x
    if isinstance(x, numbers.Number) or np.isscalar(x):
        return const(x)
    raise TypeError(f"cannot use {type(x).__name__} in an expression")


def _is(e, c):
    return e.op == "const" and e.data == c


def add(a, b):
    if a.op == "const" and b.op == "const":
        return const(a.data + b.data)
    if _is(a, 0):
        return b
    if _is(b, 0):
        return a
    if a.uid > b.uid:
        a, b = b, a
    return _node("add", (a, b))


def mul(a, b):
    if a.op == "const":
        return scale(b, a.data)
    if b.op == "const":
        return scale(a, b.data)
    if a is b:
        return power(a, 2)
    if a.uid > b.uid:
        a, b = b, a
    return _node("mul", (a, b))


def scale(a, c):
    c = complex(c)
    if c == 0:
        return const(0)
    if c == 1:
        return a
    if a.op == "const":
        return const(a.data * c)
    if a.op == "scale":
        return scale(a.args[0], a.data * c)
    return _node("scale", (a,), c)


def power(a, e):
    if not isinstance(e, numbers.Integral) or e < 0:
        raise ValueError("only nonnegative integer powers are supported")
    e = int(e)
    if e == 0:
        return const(1)
    if e == 1:
        return a
    if a.op == "const":
        return const(a.data ** e)
    if a.op == "pow":
        return power(a.args[0], a.data * e)
    return _node("pow", (a,), e)


def esum(terms):
    """Balanced sum of an iterable of expressions."""
    terms = [as_expr(t) for t in terms]
    terms = [t for t in terms if not _is(t, 0)]
    if not terms:
        return const(0)
    while len(terms) > 1:
        nxt = [add(terms[i], terms[i + 1]) for i in range(0, len(terms) - 1, 2)]
        if len(terms) % 2:
            nxt.append(terms[-1])
        terms = nxt
    return terms[0]


def eprod(factors):
    out = const(1)
    for f in factors:
        out = mul(out, as_expr(f))
    return out


def dot(coeffs, exprs):
    return esum(scale(as_expr(e), c) for c, e in zip(coeffs, exprs))


def monomial_poly(terms):
    """Polynomial from ``[(exponents, coeff), ...]``."""
    out = []
    for exps, c in terms:
        if c == 0:
            continue
        out.append(scale(eprod(power(param(i), e) for i, e in enumerate(exps) if e), c))
    return esum(out)


# --------------------------------------------------------------------------
# traversal


def topological(outputs):
    """Nodes reachable from ``outputs`` in dependency order (children first)."""
    order = []
    seen = set()
    stack = [(o, False) for o in reversed(outputs)]
    while stack:
        node, expanded = stack.pop()
        if node.uid in seen:
            continue
        if expanded:
            seen.add(node.uid)
            order.append(node)
            continue
        stack.append((node, True))
        for a in reversed(node.args):
            if a.uid not in seen:
                stack.append((a, False))
    return order


def max_param(exprs):
    m = -1
    for node in topological(list(exprs)):
        if node.op == "param":
            m = max(m, node.data)
    return m


def diff(exprs, i, memo=None):
    """Symbolic partial derivative along parameter ``i`` of each expression."""
    single = isinstance(exprs, Expr)
    exprs = [exprs] if single else list(exprs)
    memo = {} if memo is None else memo
    for node in topological(exprs):
        if node.uid in memo:
            continue
        op = node.op
        if op == "const":
            d = const(0)
        elif op == "param":
            d = const(1) if node.data == i else const(0)
        elif op == "add":
            d = add(memo[node.args[0].uid], memo[node.args[1].uid])
        elif op == "scale":
            d = scale(memo[node.args[0].uid], node.data)
        elif op == "mul":
            a, b = node.args
            d = add(mul(memo[a.uid], b), mul(a, memo[b.uid]))
        elif op == "pow":
            a = node.args[0]
            d = scale(mul(power(a, node.data - 1), memo[a.uid]), node.data)
        else:  # pragma: no cover
            raise ValueError(op)
        memo[node.uid] = d
    out = [memo[e.uid] for e in exprs]
    return out[0] if single else out


def gradient(exprs, n):
    """``[d/du_0 exprs, ..., d/du_{n-1} exprs]``."""
    return [diff(exprs, i) for i in range(n)]


def substitute(exprs, mapping, memo=None):
    """Replace ``param(i)`` by ``mapping[i]`` throughout."""
    single = isinstance(exprs, Expr)
    exprs = [exprs] if single else list(exprs)
    mapping = [as_expr(m) for m in mapping]
    memo = {} if memo is None else memo
    for node in topological(exprs):
        if node.uid in memo:
            continue
        op = node.op
        if op == "const":
            r = node
        elif op == "param":
            r = mapping[node.data]
        elif op == "add":
            r = add(memo[node.args[0].uid], memo[node.args[1].uid])
        elif op == "mul":
            r = mul(memo[node.args[0].uid], memo[node.args[1].uid])
        elif op == "scale":
            r = scale(memo[node.args[0].uid], node.data)
        elif op == "pow":
            r = power(memo[node.args[0].uid], node.data)
        else:  # pragma: no cover
            raise ValueError(op)
        memo[node.uid] = r
    out = [memo[e.uid] for e in exprs]
    return out[0] if single else out


def shift_params(exprs, offset):
    n = max_param(exprs if not isinstance(exprs, Expr) else [exprs]) + 1
    return substitute(exprs, [param(i + offset) for i in range(n)])


def determinant(rows):
    """Determinant of a square matrix of expressions by memoized Laplace expansion."""
    size = len(rows)
    memo = {}

    def minor(r, cols):
        if r == size:
            return const(1)
        key = (r, cols)
        if key in memo:
            return memo[key]
        terms = []
        for j, c in enumerate(cols):
            entry = as_expr(rows[r][c])
            if _is(entry, 0):
                continue
            sub = minor(r + 1, cols[:j] + cols[j + 1:])
            if _is(sub, 0):
                continue
            term = mul(entry, sub)
            terms.append(term if j % 2 == 0 else scale(term, -1))
        memo[key] = esum(terms)
        return memo[key]

    return minor(0, tuple(range(size)))


def cofactor_vector(rows):
    """Vector ``h`` with ``sum_k rows[r][k] * h[k] == 0`` for each of the ``N`` rows.

    ``rows`` is ``N x (N + 1)``; ``h[k]`` is the signed maximal minor with
    column ``k`` removed (generalized cross product).
    """
    width = len(rows[0])
    if len(rows) != width - 1:
        raise ValueError("cofactor_vector needs an N x (N+1) matrix")
    out = []
    for k in range(width):
        sub = [[row[c] for c in range(width) if c != k] for row in rows]
        d = determinant(sub)
        out.append(d if k % 2 == 0 else scale(d, -1))
    return out


# --------------------------------------------------------------------------
# compilation


class Program:
    """A flattened DAG ready for the jet interpreter."""

    def __init__(self, outputs, n):
        outputs = [as_expr(o) for o in outputs]
        nodes = topological(outputs)
        index = {node.uid: k for k, node in enumerate(nodes)}
        consts = []
        cindex = {}

        def cid(c):
            if c not in cindex:
                cindex[c] = len(consts)
                consts.append(c)
            return cindex[c]

        m = len(nodes)
        ops = np.zeros(m, np.int64)
        a_idx = np.zeros(m, np.int64)
        b_idx = np.zeros(m, np.int64)
        ival = np.zeros(m, np.int64)
        for k, node in enumerate(nodes):
            op = node.op
            if op == "const":
                ops[k] = _kernels.OP_CONST
                ival[k] = cid(node.data)
            elif op == "param":
                if node.data >= n:
                    raise ValueError(f"parameter {node.data} out of range for n={n}")
                ops[k] = _kernels.OP_PARAM
                ival[k] = node.data
            elif op == "add":
                ops[k] = _kernels.OP_ADD
                a_idx[k], b_idx[k] = index[node.args[0].uid], index[node.args[1].uid]
            elif op == "mul":
                ops[k] = _kernels.OP_MUL
                a_idx[k], b_idx[k] = index[node.args[0].uid], index[node.args[1].uid]
            elif op == "scale":
                ops[k] = _kernels.OP_SCALE
                a_idx[k] = index[node.args[0].uid]
                ival[k] = cid(node.data)
            elif op == "pow":
                ops[k] = _kernels.OP_POW
                a_idx[k] = index[node.args[0].uid]
                ival[k] = node.data
        self.n = n
        self.ops, self.a_idx, self.b_idx, self.ival = ops, a_idx, b_idx, ival
        self.consts = np.array(consts if consts else [0j], dtype=np.complex128)
        self.outputs = np.array([index[o.uid] for o in outputs], dtype=np.intp)

    def __len__(self):
        return len(self.ops)

    def run(self, u, order=3):
        """Jets of every output at ``u`` (batched :class:`Jet3` of shape ``(k,)``)."""
        u = np.asarray(u, dtype=np.complex128).reshape(-1)
        if u.shape[0] != self.n:
            raise ValueError(f"expected {self.n} parameters, got {u.shape[0]}")
        rows = _kernels.run_program(self.ops, self.a_idx, self.b_idx, self.ival,
                                    self.consts, u, order)
        return Jet3.from_packed(rows[self.outputs], self.n)

    def values(self, u):
        return self.run(u, order=0).value


def evaluate(exprs, u, order=3):
    single = isinstance(exprs, Expr)
    exprs = [exprs] if single else list(exprs)
    u = np.atleast_1d(np.asarray(u, dtype=np.complex128))
    jets = Program(exprs, u.shape[0]).run(u, order)
    return jets[0] if single else jets
