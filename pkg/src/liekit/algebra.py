"""Structure-constant algebras: brackets, Jacobi check, series, center, ad."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .linalg import (
    ZERO,
    DimensionError,
    Matrix,
    Subspace,
    Vector,
    format_scalar,
    nullspace,
    parse_scalar,
    to_fraction,
    unit_vector,
)


class JacobiError(ValueError):
    """Raised by checked constructors when the bracket violates Jacobi."""

    def __init__(self, triple):
        self.triple = triple
        super().__init__(f"Jacobi identity fails on basis triple {triple}")


class MalformedAlgebraError(ValueError):
    """An algebra file or bracket table is structurally invalid."""

    def __init__(self, message, location=None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """Finite-dimensional algebra given by antisymmetric structure constants.

    ``structure`` maps 0-based pairs ``(a, b)`` with ``a < b`` to a tuple of
    ``(c, coeff)`` with nonzero coefficients.  Public constructors and file
    formats use 1-based indices like ``e_1 .. e_n``.
    """

    dim: int
    structure: Mapping[tuple[int, int], tuple[tuple[int, Fraction], ...]]
    names: tuple[str, ...] = ()
    _table: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not self.names:
            object.__setattr__(self, "names", tuple(f"e{i + 1}" for i in range(self.dim)))
        table = {}
        for (a, b), terms in self.structure.items():
            v = [ZERO] * self.dim
            for c, coeff in terms:
                v[c] = coeff
            table[(a, b)] = tuple(v)
        object.__setattr__(self, "_table", table)

    # -- construction -------------------------------------------------------

    @classmethod
    def from_brackets(cls, dim: int, brackets: Mapping, names: Sequence[str] | None = None,
                      check: bool = True) -> "LieAlgebra":
        """Build from ``{(a, b): {c: coeff}}`` with 1-based indices.

        Entries with ``a > b`` are folded in by antisymmetry.  With ``check``
        a :class:`JacobiError` is raised for non-Lie tables.
        """
        if dim < 1:
            raise MalformedAlgebraError("dimension must be positive")
        acc: dict[tuple[int, int], dict[int, Fraction]] = {}
        for (a, b), out in brackets.items():
            if not (1 <= a <= dim and 1 <= b <= dim):
                raise MalformedAlgebraError(f"bracket index ({a}, {b}) out of range 1..{dim}")
            if a == b:
                if any(to_fraction(v) for v in dict(out).values()):
                    raise MalformedAlgebraError(f"nonzero self-bracket [e{a}, e{a}]")
                continue
            sign = 1
            if a > b:
                a, b, sign = b, a, -1
            slot = acc.setdefault((a - 1, b - 1), {})
            for c, coeff in dict(out).items():
                if not 1 <= c <= dim:
                    raise MalformedAlgebraError(f"output index {c} out of range 1..{dim}")
                slot[c - 1] = slot.get(c - 1, ZERO) + sign * to_fraction(coeff)
        structure = {}
        for key in sorted(acc):
            terms = tuple((c, v) for c, v in sorted(acc[key].items()) if v)
            if terms:
                structure[key] = terms
        if names is not None and len(names) != dim:
            raise MalformedAlgebraError(f"{len(names)} basis names for dimension {dim}")
        g = cls(dim, structure, tuple(names) if names else ())
        if check:
            bad = jacobi_violation(g)
            if bad is not None:
                raise JacobiError(bad)
        return g

    @classmethod
    def unchecked(cls, dim: int, brackets: Mapping, names: Sequence[str] | None = None) -> "LieAlgebra":
        """Like :meth:`from_brackets` but skips the Jacobi check."""
        return cls.from_brackets(dim, brackets, names, check=False)

    @classmethod
    def abelian(cls, n: int) -> "LieAlgebra":
        return cls(n, {})

    def brackets(self) -> dict[tuple[int, int], dict[int, Fraction]]:
        """1-based ``{(a, b): {c: coeff}}`` with ``a < b``."""
        return {(a + 1, b + 1): {c + 1: v for c, v in terms} for (a, b), terms in self.structure.items()}

    def bracket_count(self) -> int:
        return len(self.structure)

    def basis_bracket(self, a: int, b: int) -> Vector:
        """``[e_a, e_b]`` for 0-based indices."""
        if a == b:
            return (ZERO,) * self.dim
        if a < b:
            return self._table.get((a, b)) or (ZERO,) * self.dim
        v = self._table.get((b, a))
        return tuple(-x for x in v) if v else (ZERO,) * self.dim

    def __eq__(self, other):
        if not isinstance(other, LieAlgebra):
            return NotImplemented
        return self.dim == other.dim and dict(self.structure) == dict(other.structure)

    def __hash__(self):
        return hash((self.dim, tuple(sorted(self.structure.items()))))

    # -- serialization ------------------------------------------------------

    def to_json_obj(self) -> dict:
        entries = []
        for (a, b) in sorted(self.structure):
            entries.append({
                "a": a + 1,
                "b": b + 1,
                "out": [{"c": c + 1, "coeff": format_scalar(v)} for c, v in self.structure[(a, b)]],
            })
        return {"dim": self.dim, "basis": list(self.names), "brackets": entries}

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2) + "\n"

    @classmethod
    def from_json_obj(cls, obj) -> "LieAlgebra":
        if not isinstance(obj, dict):
            raise MalformedAlgebraError("top level must be an object", "$")
        dim = obj.get("dim")
        if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
            raise MalformedAlgebraError("'dim' must be a positive integer", "$.dim")
        names = obj.get("basis", [f"e{i + 1}" for i in range(dim)])
        if not isinstance(names, list) or len(names) != dim or not all(isinstance(s, str) for s in names):
            raise MalformedAlgebraError(f"'basis' must list {dim} names", "$.basis")
        entries = obj.get("brackets")
        if not isinstance(entries, list):
            raise MalformedAlgebraError("'brackets' must be a list", "$.brackets")
        table = {}
        for i, ent in enumerate(entries):
            loc = f"$.brackets[{i}]"
            if not isinstance(ent, dict):
                raise MalformedAlgebraError("entry must be an object", loc)
            a, b, out = ent.get("a"), ent.get("b"), ent.get("out")
            for key, val in (("a", a), ("b", b)):
                if not isinstance(val, int) or isinstance(val, bool) or not 1 <= val <= dim:
                    raise MalformedAlgebraError(f"'{key}' must be an index in 1..{dim}", f"{loc}.{key}")
            if a >= b:
                raise MalformedAlgebraError("entries must have a < b", loc)
            if (a, b) in table:
                raise MalformedAlgebraError(f"duplicate entry for ({a}, {b})", loc)
            if not isinstance(out, list):
                raise MalformedAlgebraError("'out' must be a list", f"{loc}.out")
            terms = {}
            for j, term in enumerate(out):
                tloc = f"{loc}.out[{j}]"
                if not isinstance(term, dict):
                    raise MalformedAlgebraError("term must be an object", tloc)
                c = term.get("c")
                if not isinstance(c, int) or isinstance(c, bool) or not 1 <= c <= dim:
                    raise MalformedAlgebraError(f"'c' must be an index in 1..{dim}", f"{tloc}.c")
                if c in terms:
                    raise MalformedAlgebraError(f"duplicate output index {c}", f"{tloc}.c")
                try:
                    terms[c] = parse_scalar(term.get("coeff"))
                except ValueError as exc:
                    raise MalformedAlgebraError(str(exc), f"{tloc}.coeff") from None
            table[(a, b)] = terms
        return cls.from_brackets(dim, table, names, check=False)

    @classmethod
    def loads(cls, text: str) -> "LieAlgebra":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedAlgebraError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
        return cls.from_json_obj(obj)


def _check_len(g: LieAlgebra, *vs):
    for v in vs:
        if len(v) != g.dim:
            raise DimensionError(f"vector of length {len(v)} in {g.dim}-dimensional algebra")


def bracket(g: LieAlgebra, x: Sequence, y: Sequence) -> Vector:
    """Bilinear antisymmetric expansion of ``[x, y]``."""
    _check_len(g, x, y)
    out = [ZERO] * g.dim
    for (a, b), terms in g.structure.items():
        co = x[a] * y[b] - x[b] * y[a]
        if co:
            for c, v in terms:
                out[c] += co * v
    return tuple(out)


def basis(g: LieAlgebra) -> list[Vector]:
    return [unit_vector(g.dim, i) for i in range(g.dim)]


def jacobi_violation(g: LieAlgebra, touching: Iterable[int] | None = None) -> tuple[int, int, int] | None:
    """First 1-based triple ``a < b < c`` whose cyclic Jacobi sum is nonzero.

    With ``touching`` (0-based indices), only triples containing one of them
    are examined.
    """
    n = g.dim
    E = basis(g)
    keep = None if touching is None else set(touching)
    for a in range(n):
        for b in range(a + 1, n):
            bab = g.basis_bracket(a, b)
            for c in range(b + 1, n):
                if keep is not None and not keep & {a, b, c}:
                    continue
                s1 = bracket(g, E[a], g.basis_bracket(b, c))
                s2 = bracket(g, E[b], g.basis_bracket(c, a))
                s3 = bracket(g, E[c], bab)
                if any(p + q + r for p, q, r in zip(s1, s2, s3)):
                    return (a + 1, b + 1, c + 1)
    return None


def jacobi_holds(g: LieAlgebra) -> bool:
    return jacobi_violation(g) is None


def bracket_span(g: LieAlgebra, U: Subspace, V: Subspace) -> Subspace:
    """``[U, V]`` as a canonical subspace."""
    vecs = [bracket(g, u, v) for u in U.basis for v in V.basis]
    return Subspace.span([v for v in vecs if any(v)], g.dim)


def _series(g: LieAlgebra, step) -> list[Subspace]:
    terms = [Subspace.full(g.dim)]
    for _ in range(g.dim + 1):
        nxt = step(terms[-1])
        if nxt == terms[-1]:
            break
        terms.append(nxt)
    return terms


def derived_series(g: LieAlgebra) -> list[Subspace]:
    """``g, [g, g], [[g, g], [g, g]], ...`` until two consecutive terms agree."""
    return _series(g, lambda S: bracket_span(g, S, S))


def lower_central_series(g: LieAlgebra) -> list[Subspace]:
    """``g, [g, g], [g, [g, g]], ...`` until two consecutive terms agree."""
    full = Subspace.full(g.dim)
    return _series(g, lambda S: bracket_span(g, full, S))


def is_solvable(g: LieAlgebra) -> bool:
    return derived_series(g)[-1].dim == 0


def is_nilpotent(g: LieAlgebra) -> bool:
    return lower_central_series(g)[-1].dim == 0


def nilindex(g: LieAlgebra) -> int | None:
    """Smallest ``k`` with ``g^k = 0``, or None if ``g`` is not nilpotent."""
    lcs = lower_central_series(g)
    return len(lcs) - 1 if lcs[-1].dim == 0 else None


def ad(g: LieAlgebra, x: Sequence) -> Matrix:
    """Matrix of ``y -> [x, y]``; row ``b`` is ``[x, e_b]``."""
    _check_len(g, x)
    return tuple(bracket(g, x, e) for e in basis(g))


def center(g: LieAlgebra) -> Subspace:
    """``{x : [x, e_b] = 0 for all b}``."""
    n = g.dim
    stacked = [
        tuple(v for b in range(n) for v in g.basis_bracket(a, b))
        for a in range(n)
    ]
    return nullspace(stacked)


def is_ideal(g: LieAlgebra, S: Subspace) -> bool:
    """``[g, S] <= S``."""
    if S.ambient_dim != g.dim:
        raise DimensionError("subspace lives in a different ambient space")
    return all(S.contains(bracket(g, e, s)) for e in basis(g) for s in S.basis)


def restrict(g: LieAlgebra, indices: Iterable[int]) -> LieAlgebra:
    """Subalgebra spanned by the given 0-based coordinate axes.

    The axes must span a subalgebra; raises ValueError otherwise.
    """
    idx = sorted(set(indices))
    pos = {a: i for i, a in enumerate(idx)}
    table = {}
    for (a, b), terms in g.structure.items():
        if a in pos and b in pos:
            out = {}
            for c, v in terms:
                if c not in pos:
                    raise ValueError(f"[{g.names[a]}, {g.names[b]}] leaves the chosen span")
                out[pos[c] + 1] = v
            table[(pos[a] + 1, pos[b] + 1)] = out
    return LieAlgebra.unchecked(len(idx), table, [g.names[i] for i in idx])


def change_basis(g: LieAlgebra, M: Sequence[Sequence]) -> LieAlgebra:
    """Same algebra in the basis ``f_i = sum_j M[i][j] e_j``."""
    from .linalg import inverse, matrix, vecmat

    M = matrix(M)
    Minv = inverse(M)
    n = g.dim
    table = {}
    for i in range(n):
        for j in range(i + 1, n):
            v = vecmat(bracket(g, M[i], M[j]), Minv)
            out = {c + 1: x for c, x in enumerate(v) if x}
            if out:
                table[(i + 1, j + 1)] = out
    return LieAlgebra.unchecked(n, table, g.names)
