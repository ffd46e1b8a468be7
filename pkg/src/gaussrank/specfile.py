"""Loading varieties from JSON spec files.

A polynomial leaf::

    {"name": "twisted cubic", "ambient_dim": 3, "kind": "polynomial",
     "coords": [[{"monomial": [0], "coeff": [1, 0]}], ...]}

A constructor::

    {"name": "...", "op": "join", "args": [leaf, leaf], "options": {}}

Coefficients are ``[re, im]`` pairs.  A leaf may give its parameter count
as ``"params"``; otherwise it is read off the longest monomial.  Errors carry the file and the line of
the offending object.
"""

import json
import json.scanner
from pathlib import Path

import numpy as np

from . import expr as E
from . import variety as V
from .errors import GaussRankError, SpecError
from .frames import DirectionField

OPS = ("join", "cone", "secant", "tangential", "osculating", "hyperband", "line_union",
       "plane_band", "dual")


class _Obj(dict):
    """A JSON object that remembers the line it started on."""

    line = None


class _LineDecoder(json.JSONDecoder):
    def __init__(self, text):
        super().__init__()
        plain = self.parse_object

        def parse_object(s_and_end, *args):
            s, end = s_and_end
            obj, stop = plain(s_and_end, *args)
            out = _Obj(obj)
            out.line = s.count("\n", 0, end) + 1
            return out, stop

        self.parse_object = parse_object
        self.scan_once = json.scanner.py_make_scanner(self)


def parse_spec_text(text, path=None):
    try:
        return _LineDecoder(text).decode(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"malformed JSON: {exc.msg} (column {exc.colno})", path, exc.lineno) from None


def load_spec(path):
    """Build the variety described by the spec file at ``path``."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecError(f"cannot read spec: {exc.strerror}", path) from None
    return build_spec(parse_spec_text(text, path), path)


def build_spec(node, path=None):
    return _Builder(path).build(node)


def _complex(c, err):
    if isinstance(c, (int, float)) and not isinstance(c, bool):
        return complex(c)
    if (isinstance(c, list) and len(c) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in c)):
        return complex(c[0], c[1])
    raise err(f"coefficient must be an [re, im] pair, got {c!r}")


class _Builder:
    def __init__(self, path):
        self.path = path

    def error(self, node, message):
        return SpecError(message, self.path, getattr(node, "line", None))

    def build(self, node):
        if not isinstance(node, dict):
            raise self.error(node, "a spec must be a JSON object")
        try:
            X = self._build(node)
        except SpecError:
            raise
        except (GaussRankError, ValueError, TypeError) as exc:
            raise self.error(node, f"{type(exc).__name__}: {exc}") from None
        if "ambient_dim" in node and node["ambient_dim"] != X.N:
            raise self.error(node, f"ambient_dim {node['ambient_dim']} but the construction "
                                   f"lives in P{X.N}")
        if "name" in node:
            X.name = str(node["name"])
        return X

    def _build(self, node):
        op = node.get("op")
        if op is None:
            kind = node.get("kind", "polynomial")
            if kind != "polynomial":
                raise self.error(node, f"unknown kind {kind!r} without an op")
            return self.polynomial(node)
        if op not in OPS:
            raise self.error(node, f"unknown constructor {op!r}")
        args = node.get("args", [])
        if not isinstance(args, list):
            raise self.error(node, "args must be a list")
        opts = node.get("options", {}) or {}
        if not isinstance(opts, dict):
            raise self.error(node, "options must be an object")
        subs = [self.build(a) for a in args]
        return getattr(self, "op_" + op)(node, subs, opts)

    # -- leaves -----------------------------------------------------------
    def poly(self, node, terms, nvars=None):
        if not isinstance(terms, list):
            raise self.error(node, "a polynomial is a list of monomial terms")
        out = []
        for term in terms:
            if not isinstance(term, dict) or "monomial" not in term:
                raise self.error(term if isinstance(term, dict) else node,
                                 "each term needs a 'monomial' exponent list")
            exps = term["monomial"]
            if (not isinstance(exps, list)
                    or not all(isinstance(e, int) and e >= 0 for e in exps)):
                raise self.error(term, "monomial exponents must be nonnegative integers")
            if nvars is not None and len(exps) > nvars:
                raise self.error(term, f"monomial uses {len(exps)} variables, only {nvars} exist")
            coeff = _complex(term.get("coeff", [1, 0]), lambda m: self.error(term, m))
            out.append((exps, coeff))
        return E.monomial_poly(out)

    def polynomial(self, node):
        coords = node.get("coords")
        if not isinstance(coords, list) or not coords:
            raise self.error(node, "polynomial spec needs a nonempty 'coords' list")
        exprs = [self.poly(node, c) for c in coords]
        n = node.get("params")
        if n is None:
            n = max(len(t["monomial"]) for c in coords for t in c) if any(coords) else 0
        X = V.ParametrizedVariety(node.get("name", "polynomial"), int(n), len(exprs) - 1, exprs)
        return X

    def vectors(self, node, raw, owner):
        if not isinstance(raw, list) or not raw:
            raise self.error(node, "frame must be a nonempty list of vectors")
        return V.FrameField(owner, [[self.poly(node, c, owner.n) for c in vec] for vec in raw])

    def arity(self, node, subs, k):
        if len(subs) != k:
            raise self.error(node, f"{node['op']} takes {k} argument(s), got {len(subs)}")

    # -- constructors -----------------------------------------------------
    def op_join(self, node, subs, opts):
        if len(subs) < 2:
            raise self.error(node, "join needs at least two arguments")
        return V.join(subs)

    def op_cone(self, node, subs, opts):
        self.arity(node, subs, 1)
        vertex = opts.get("vertex")
        if not isinstance(vertex, list) or not vertex:
            raise self.error(node, "cone needs options.vertex: a list of points")
        pts = np.array([[_complex(c, lambda m: self.error(node, m)) for c in p] for p in vertex])
        return V.cone(subs[0], pts)

    def op_secant(self, node, subs, opts):
        self.arity(node, subs, 1)
        return V.secant_variety(subs[0], int(opts.get("k", 2)))

    def op_tangential(self, node, subs, opts):
        self.arity(node, subs, 1)
        return V.tangential_variety(subs[0])

    def op_osculating(self, node, subs, opts):
        self.arity(node, subs, 1)
        return V.osculating_variety(subs[0], int(opts.get("order", 2)))

    def op_hyperband(self, node, subs, opts):
        self.arity(node, subs, 1)
        frame = self.vectors(node, opts.get("frame"), subs[0])
        return V.hyperband(subs[0], frame, seed=int(opts.get("seed", 0)))

    def op_plane_band(self, node, subs, opts):
        self.arity(node, subs, 1)
        frame = self.vectors(node, opts.get("frame"), subs[0])
        return V.plane_band(subs[0], frame, seed=int(opts.get("seed", 0)))

    def op_dual(self, node, subs, opts):
        self.arity(node, subs, 1)
        return V.dual_variety(subs[0], seed=int(opts.get("seed", 0)))

    def op_line_union(self, node, subs, opts):
        self.arity(node, subs, 1)
        Y = subs[0]
        spec = opts.get("field")
        if not isinstance(spec, dict) or "kind" not in spec:
            raise self.error(node, "line_union needs options.field with a 'kind'")
        kind = spec["kind"]
        if kind == "user":
            vec = spec.get("vector")
            if not isinstance(vec, list):
                raise self.error(node, "a user field needs 'vector': one polynomial per parameter")
            field = DirectionField.user([self.poly(node, c, Y.n) for c in vec])
        elif kind in DirectionField.KINDS:
            field = DirectionField(kind, int(spec.get("index", 0)))
        else:
            raise self.error(node, f"unknown field kind {kind!r}")
        return V.line_union(Y, field, seed=int(opts.get("seed", 0)))


def to_poly_json(expr_terms):
    """``[(exps, coeff), ...]`` in spec-file form."""
    return [{"monomial": list(e), "coeff": [float(np.real(c)), float(np.imag(c))]}
            for e, c in expr_terms]
