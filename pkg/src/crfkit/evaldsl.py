"""Tiny bracket DSL for evaluating tensor expressions against an instance.

Grammar:  expr := NAME | '0' | '(' expr ',' expr ')' | NAME '(' expr {',' expr} ')'
Names resolve to tensors declared by the instance (A, pi, contact fields,
named vectors and forms, coordinate functions); calls resolve to the
operator table below.  '0' is allowed only inside a section pair, where the
slot fixes its type.
"""

from __future__ import annotations

from .biggeom import GenEndomorphism, GenSection, courant_bracket, s_phi
from .scalar import PolyScalar
from .structures import StructureInstance
from .tensor import (DiffForm, Endomorphism, Multivector, cr_tensor, d_scalar,
                     exterior_derivative, interior_product, lie_bracket,
                     lie_derivative, nijenhuis, poisson_bracket_1forms,
                     schouten_bracket, schouten_concomitant, sharp)


class EvalError(ValueError):
    def __init__(self, message: str, pos: int | None = None):
        if pos is not None:
            message = f"{message} at position {pos}"
        super().__init__(message)
        self.pos = pos


class _Zero:
    """Placeholder for a '0' literal awaiting a typed slot."""

    def __init__(self, pos: int):
        self.pos = pos


def _tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "(),":
            tokens.append((ch, ch, i))
            i += 1
            continue
        if ch == "0":
            tokens.append(("zero", "0", i))
            i += 1
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
            continue
        raise EvalError(f"unexpected character {ch!r}", i)
    tokens.append(("end", None, n))
    return tokens


class Evaluator:
    def __init__(self, inst: StructureInstance):
        self.inst = inst
        self.names = {}
        patch = inst.patch
        if inst.a is not None:
            self.names["A"] = inst.a
        self.names["pi"] = inst.bivector()
        if inst.p_proj is not None:
            self.names["P"] = inst.p_proj
        for idx, (z, xi) in enumerate(inst.contact):
            self.names.setdefault("Z" if idx == 0 else f"Z{idx}", z)
            self.names.setdefault("xi" if idx == 0 else f"xi{idx}", xi)
        self.names.update(inst.vectors)
        self.names.update(inst.forms)
        for i, c in enumerate(patch.coords):
            self.names.setdefault(c, PolyScalar.coordinate(patch, i))

    # -- parsing ------------------------------------------------------------

    def run(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        value = self._expr()
        kind, _, at = self.tokens[self.pos]
        if kind != "end":
            raise EvalError("trailing input", at)
        if isinstance(value, _Zero):
            raise EvalError("bare 0 has no type; use it inside a section pair", value.pos)
        return value

    def _peek(self):
        return self.tokens[self.pos]

    def _take(self, kind=None):
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            raise EvalError(f"expected {kind!r}, found {tok[1]!r}", tok[2])
        self.pos += 1
        return tok

    def _expr(self):
        kind, value, at = self._peek()
        if kind == "zero":
            self._take()
            return _Zero(at)
        if kind == "(":
            self._take()
            first = self._expr()
            self._take(",")
            second = self._expr()
            self._take(")")
            return self._make_section(first, second, at)
        if kind == "name":
            self._take()
            if self._peek()[0] == "(":
                self._take()
                args = [self._expr()]
                while self._peek()[0] == ",":
                    self._take()
                    args.append(self._expr())
                self._take(")")
                return self._call(value, args, at)
            if value not in self.names:
                raise EvalError(f"unknown name {value!r}", at)
            return self.names[value]
        raise EvalError(f"unexpected token {value!r}", at)

    def _make_section(self, first, second, at) -> GenSection:
        patch = self.inst.patch
        if isinstance(first, _Zero):
            first = Multivector.zero(patch, 1)
        if isinstance(second, _Zero):
            second = DiffForm.zero(patch, 1)
        if not isinstance(first, Multivector) or first.k != 1:
            raise EvalError("first slot of a section pair must be a vector field", at)
        if not isinstance(second, DiffForm) or second.k != 1:
            raise EvalError("second slot of a section pair must be a 1-form", at)
        return GenSection(first, second)

    # -- operators ------------------------------------------------------------

    def _need(self, args, at, *types):
        if len(args) != len(types):
            raise EvalError(f"expected {len(types)} arguments, got {len(args)}", at)
        out = []
        for n, (arg, ty) in enumerate(zip(args, types)):
            if isinstance(arg, _Zero):
                raise EvalError("0 literal only allowed inside a section pair", arg.pos)
            if ty == "vec":
                if not isinstance(arg, Multivector) or arg.k != 1:
                    raise EvalError(f"argument {n+1}: expected a vector field", at)
            elif ty == "form1":
                if not isinstance(arg, DiffForm) or arg.k != 1:
                    raise EvalError(f"argument {n+1}: expected a 1-form", at)
            elif ty == "biv":
                if not isinstance(arg, Multivector) or arg.k != 2:
                    raise EvalError(f"argument {n+1}: expected a bivector", at)
            elif ty == "mv":
                if not isinstance(arg, Multivector):
                    raise EvalError(f"argument {n+1}: expected a multivector", at)
            elif ty == "endo":
                if not isinstance(arg, Endomorphism):
                    raise EvalError(f"argument {n+1}: expected an endomorphism", at)
            elif ty == "sec":
                if not isinstance(arg, GenSection):
                    raise EvalError(f"argument {n+1}: expected a section pair", at)
            elif ty == "any":
                pass
            out.append(arg)
        return out

    def _call(self, op, args, at):
        if op == "lie":
            x, y = self._need(args, at, "vec", "vec")
            return lie_bracket(x, y)
        if op == "courant":
            e1, e2 = self._need(args, at, "sec", "sec")
            return courant_bracket(e1, e2)
        if op == "schouten":
            u, v = self._need(args, at, "mv", "mv")
            return schouten_bracket(u, v)
        if op == "d":
            (w,) = self._need(args, at, "any")
            if isinstance(w, PolyScalar):
                return d_scalar(w)
            if isinstance(w, DiffForm):
                return exterior_derivative(w)
            raise EvalError("d expects a form or a function", at)
        if op == "L":
            x, t = self._need(args, at, "vec", "any")
            if not isinstance(t, (PolyScalar, Multivector, DiffForm)):
                raise EvalError("L expects a tensor or function second argument", at)
            return lie_derivative(x, t)
        if op == "i":
            a, t = self._need(args, at, "any", "any")
            if not isinstance(a, (Multivector, DiffForm)):
                raise EvalError("i expects a degree-1 tensor first", at)
            if not isinstance(t, (Multivector, DiffForm)):
                raise EvalError("i expects a tensor second", at)
            return interior_product(a, t)
        if op == "sharp":
            pi, a = self._need(args, at, "biv", "form1")
            return sharp(pi, a)
        if op == "nijenhuis":
            a, x, y = self._need(args, at, "endo", "vec", "vec")
            return nijenhuis(a, x, y)
        if op == "S_A":
            a, x, y = self._need(args, at, "endo", "vec", "vec")
            return cr_tensor(a, x, y)
        if op == "S_Phi":
            e1, e2 = self._need(args, at, "sec", "sec")
            phi = self.inst.phi()
            return s_phi(phi, e1, e2)
        if op == "R":
            pi, a, x, al = self._need(args, at, "biv", "endo", "vec", "form1")
            return schouten_concomitant(pi, a, x, al)
        if op == "pb1":
            pi, a, b = self._need(args, at, "biv", "form1", "form1")
            return poisson_bracket_1forms(pi, a, b)
        raise EvalError(f"unknown operator {op!r}", at)


def evaluate_expression(inst: StructureInstance, text: str):
    return Evaluator(inst).run(text)
