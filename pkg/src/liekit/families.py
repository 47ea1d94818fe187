"""Q_{2m+1} and its solvable extensions by one or two non-nilpotent generators.

Each family is encoded twice: as the literal list of ``[h, e_i]`` brackets,
and as a point of the derivation shape (:class:`DerivationShape`).  The
literal matrix is used when it is already a derivation of Q_{2m+1};
otherwise the shape realization is used and the entries it had to add are
recorded in :attr:`FamilyBuild.notes`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .algebra import LieAlgebra, ad, jacobi_violation
from .derivations import (
    DerivationShape,
    derivation_violation,
    shape_violation,
    nil_dependence_witness,
)
from .linalg import ZERO, Matrix, commutator, format_scalar, sub, to_fraction, vector

FamilyId = Union[int, str]
FAMILY_2M3 = "2m+3"


class FamilyParameterError(ValueError):
    """An invalid family/m/parameter combination."""


def build_Q(m: int) -> LieAlgebra:
    """Q_{2m+1}: ``[e1, ek] = e_{k+1}`` (2 <= k <= 2m) and ``[e_k, e_{2m+2-k}] = (-1)^k e_{2m+1}``.

    The table does not satisfy the Jacobi identity (already
    ``J(e1, e2, e3) = -e5`` for m = 2), so it is built unchecked; Leibniz- and
    homomorphism-type questions about it remain well posed.
    """
    if not isinstance(m, int) or m < 2:
        raise FamilyParameterError(f"Q_(2m+1) needs an integer m >= 2, got {m!r}")
    n = 2 * m + 1
    table = {}
    for k in range(2, 2 * m + 1):
        table[(1, k)] = {k + 1: 1}
    for k in range(2, m + 1):
        table[(k, 2 * m + 2 - k)] = {n: (-1) ** k}
    return LieAlgebra.unchecked(n, table)


# -- extension data --------------------------------------------------------

@dataclass(frozen=True)
class ExtensionSpec:
    """A nilradical with derivations ``H_i`` and constants ``r^a_ij``.

    ``H[i]`` has row ``a`` equal to ``[h_i, e_a]``; ``r`` maps 0-based pairs
    ``(i, j)``, ``i < j``, to the coordinate vector of ``[h_i, h_j]``.
    """

    nilradical: LieAlgebra
    H: tuple
    r: Mapping[tuple[int, int], tuple] = field(default_factory=dict)

    @property
    def t(self) -> int:
        return len(self.H)

    def r_vector(self, i: int, j: int) -> tuple:
        n = self.nilradical.dim
        if i == j:
            return (ZERO,) * n
        if i < j:
            return tuple(self.r.get((i, j), (ZERO,) * n))
        return tuple(-v for v in self.r.get((j, i), (ZERO,) * n))

    def assemble(self) -> LieAlgebra:
        """Total algebra on ``e_1..e_n, h_1..h_t`` (h's get indices n+1..n+t)."""
        N = self.nilradical
        n, t = N.dim, self.t
        table = {k: dict(v) for k, v in N.brackets().items()}
        for i, Hi in enumerate(self.H):
            for a in range(n):
                out = {b + 1: -v for b, v in enumerate(Hi[a]) if v}  # [e_a, h_i] = -[h_i, e_a]
                if out:
                    table[(a + 1, n + i + 1)] = out
        for i in range(t):
            for j in range(i + 1, t):
                out = {c + 1: v for c, v in enumerate(self.r_vector(i, j)) if v}
                if out:
                    table[(n + i + 1, n + j + 1)] = out
        hnames = ["h"] if t == 1 else [f"h{i + 1}" for i in range(t)]
        return LieAlgebra.unchecked(n + t, table, list(N.names) + hnames)

    def invariant_failures(self) -> list[tuple[str, object]]:
        """``(invariant, witness)`` for every violated extension invariant."""
        N = self.nilradical
        fails = []
        for i, Hi in enumerate(self.H):
            bad = derivation_violation(N, Hi)
            if bad:
                fails.append((f"H{i + 1} is a derivation", {"pair": list(bad)}))
        for i in range(self.t):
            for j in range(i + 1, self.t):
                lhs = commutator(self.H[i], self.H[j])
                rhs = ad(N, self.r_vector(i, j))
                if lhs != rhs:
                    diff = sub(lhs, rhs)
                    pos = next((a + 1, b + 1) for a, row in enumerate(diff) for b, v in enumerate(row) if v)
                    fails.append((f"[H{i + 1}, H{j + 1}] = ad(r_{i + 1}{j + 1})", {"entry": list(pos)}))
        try:
            w = nil_dependence_witness(list(self.H))
        except ValueError as exc:
            fails.append(("nil-independent", {"error": str(exc)}))
        else:
            if w is not None:
                fails.append(("nil-independent", {"combination": list(w)}))
        bad = jacobi_violation(self.assemble())
        if bad:
            fails.append(("assembled algebra satisfies Jacobi", {"triple": list(bad)}))
        return fails

    def to_json_obj(self) -> dict:
        obj = self.assemble().to_json_obj()
        obj["nilradical_dim"] = self.nilradical.dim
        obj["H"] = [[[format_scalar(v) for v in row] for row in Hi] for Hi in self.H]
        obj["r"] = [
            {"i": i + 1, "j": j + 1, "coords": [format_scalar(v) for v in vec]}
            for (i, j), vec in sorted(self.r.items()) if any(vec)
        ]
        return obj

    @classmethod
    def from_json_obj(cls, obj) -> "ExtensionSpec":
        from .algebra import MalformedAlgebraError
        from .linalg import parse_scalar

        g = LieAlgebra.from_json_obj(obj)
        n = obj.get("nilradical_dim")
        if not isinstance(n, int) or not 1 <= n <= g.dim:
            raise MalformedAlgebraError("'nilradical_dim' must be an index in 1..dim", "$.nilradical_dim")
        try:
            H = tuple(tuple(tuple(parse_scalar(v) for v in row) for row in Hi) for Hi in obj.get("H", []))
            r = {}
            for ent in obj.get("r", []):
                r[(ent["i"] - 1, ent["j"] - 1)] = tuple(parse_scalar(v) for v in ent["coords"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedAlgebraError(f"bad extension data: {exc}", "$.H") from None
        for Hi in H:
            if len(Hi) != n or any(len(row) != n for row in Hi):
                raise MalformedAlgebraError(f"H matrices must be {n}x{n}", "$.H")
        from .algebra import restrict

        spec = cls(restrict(g, range(n)), H, r)
        if spec.assemble() != g:
            raise MalformedAlgebraError("brackets disagree with the H/r extension data", "$")
        return spec


# -- family parameters -----------------------------------------------------

@dataclass(frozen=True)
class FamilyParams:
    """Parameters of one family member.

    ``family`` is 1..7 or ``"2m+3"``.  ``d`` holds ``(k, value)`` pairs:
    for family 6 the single coefficient ``d_{3-beta}`` (key ``3 - beta``),
    for family 7 the coefficients ``d_{2k}`` keyed by ``2k``.  ``gamma`` is
    the ``[h1, h2] = gamma e_{2m+1}`` coefficient of the ``2m+3`` algebra
    before normalization.
    """

    family: FamilyId
    m: int
    beta: Fraction | None = None
    mu: Fraction = Fraction(0)
    nu: Fraction = Fraction(0)
    d: tuple = ()
    gamma: Fraction = Fraction(0)

    def __post_init__(self):
        if self.family not in (1, 2, 3, 4, 5, 6, 7, FAMILY_2M3):
            raise FamilyParameterError(f"unknown family {self.family!r} (expected 1..7 or '2m+3')")
        if not isinstance(self.m, int) or self.m < 2:
            raise FamilyParameterError(f"m must be an integer >= 2, got {self.m!r}")
        for name in ("mu", "nu", "gamma"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))
        if self.beta is not None:
            object.__setattr__(self, "beta", to_fraction(self.beta))
        d = tuple(sorted((int(k), to_fraction(v)) for k, v in dict(self.d).items()))
        object.__setattr__(self, "d", d)
        if self.family in (1, 6) and self.beta is None:
            raise FamilyParameterError(f"family {self.family} needs beta")
        if self.family not in (1, 6) and self.beta is not None:
            raise FamilyParameterError(f"family {self.family} has no free beta")
        if self.family == 6:
            self._check_family6()
        if self.family == 7:
            allowed = set(family7_d_indices(self.m))
            for k, _ in d:
                if k not in allowed:
                    raise FamilyParameterError(
                        f"family 7 at m={self.m} has d_k only for k in {sorted(allowed)}, got d_{k}")
        elif self.family != 6 and d:
            raise FamilyParameterError(f"family {self.family} takes no d parameters")
        if self.gamma and self.family != FAMILY_2M3:
            raise FamilyParameterError("gamma only applies to the 2m+3 algebra")

    def _check_family6(self):
        b = self.beta
        if b.denominator != 1:
            raise FamilyParameterError("family 6 needs an integer beta")
        idx = 2 * self.m + int(b)
        if not 2 <= idx <= 2 * self.m:
            raise FamilyParameterError(
                f"family 6 index 2m+beta = {idx} outside 2..2m for beta={b}, m={self.m}")
        if idx == self.m + 1:
            raise FamilyParameterError(f"family 6 index 2m+beta = m+1 = {idx} collides with the mu row")
        keys = [k for k, _ in self.d]
        if keys and keys != [3 - int(b)]:
            raise FamilyParameterError(f"family 6 takes only d_{3 - int(b)}")

    def normal_form_issue(self) -> str | None:
        """Why these parameters fall outside the classified normal forms, if they do."""
        if self.family == 3 and self.m == 2:
            return "family 3 requires m >= 3 (g_(2m+2,3) does not exist for m = 2)"
        if self.mu not in (0, 1):
            return "mu must be 0 or 1 in normal form"
        if self.family == 6 and int(self.beta) not in family6_betas(self.m):
            return f"beta = {self.beta} is not in the family-6 set {family6_betas(self.m)} for m = {self.m}"
        return None

    @property
    def label(self) -> str:
        if self.family == FAMILY_2M3:
            name = f"g_{2 * self.m + 3}"
        else:
            name = f"g_({2 * self.m + 2},{self.family})"
        parts = [f"m={self.m}"]
        if self.beta is not None:
            parts.append(f"beta={self.beta}")
        parts.append(f"mu={self.mu}")
        if self.family in (2, 3, 4):
            parts.append(f"nu={self.nu}")
        for k, v in self.d:
            parts.append(f"d{k}={v}")
        if self.gamma:
            parts.append(f"gamma={self.gamma}")
        return f"{name}[{', '.join(parts)}]"

    def sort_key(self):
        fam = 8 if self.family == FAMILY_2M3 else self.family
        return (fam, self.m, self.beta if self.beta is not None else Fraction(0), self.mu, self.nu,
                self.d, self.gamma)

    def to_json_obj(self) -> dict:
        obj = {"family": self.family, "m": self.m,
               "mu": format_scalar(self.mu), "nu": format_scalar(self.nu)}
        if self.beta is not None:
            obj["beta"] = format_scalar(self.beta)
        if self.d:
            obj["d"] = {str(k): format_scalar(v) for k, v in self.d}
        if self.gamma:
            obj["gamma"] = format_scalar(self.gamma)
        return obj


def family6_betas(m: int) -> tuple[int, ...]:
    """Admissible family-6 beta values for this m.

    Enumerates the odd integers between the listed endpoints
    ``-2m+3 .. -m`` (m odd) or ``-2m+3 .. -m-1`` (m even) and keeps those
    whose row index ``2m + beta`` lies in ``2..2m`` away from ``m + 1``.
    """
    ends = (-2 * m + 3, -m - 2, -m) if m % 2 else (-2 * m + 3, -m - 3, -m - 1)
    lo, hi = min(ends), max(ends)
    out = []
    for b in range(lo, hi + 1):
        if b % 2 == 0:
            continue
        idx = 2 * m + b
        if 2 <= idx <= 2 * m and idx != m + 1:
            out.append(b)
    return tuple(out)


def family7_d_indices(m: int) -> tuple[int, ...]:
    """Indices ``2k`` for ``k = floor((m+1)/2)+1 .. m``."""
    return tuple(2 * k for k in range((m + 1) // 2 + 1, m + 1))


# -- literal bracket lists -------------------------------------------------

def _rows(n: int, entries: Mapping[int, Mapping[int, Fraction]]) -> Matrix:
    M = [[ZERO] * n for _ in range(n)]
    for i, out in entries.items():
        for j, v in out.items():
            if 1 <= j <= n:
                M[i - 1][j - 1] += to_fraction(v)
    return tuple(tuple(r) for r in M)


def literal_H(p: FamilyParams) -> list[Matrix]:
    """``[h, e_i]`` exactly as listed for the family, nothing added."""
    m, n = p.m, 2 * p.m + 1
    F = Fraction
    e: dict[int, dict[int, Fraction]] = {}
    mid = m + 1
    if p.family == 1:
        b = p.beta
        e[1] = {1: 1, 2: b - 1}
        for i in range(2, 2 * m + 1):
            if i != mid:
                e[i] = {i: i - 2 + b}
        e[mid] = {mid: m - 1 + b, n: p.mu}
        e[n] = {n: 2 * m + 2 * b - 2}
    elif p.family == 2:
        e[1] = {1: 1, 2: -m}
        if m % 2 == 0:
            e[1][m + 2] = p.nu
        for i in range(2, 2 * m + 1):
            if i != mid:
                e[i] = {i: i - m - 1}
        e[mid] = {n: p.mu}
    elif p.family == 3:
        e[1] = {1: 1, 2: 1 - m, mid: p.mu}
        for i in range(2, 2 * m + 1):
            if i != mid:
                e[i] = {i: i - m}
        e[mid] = {mid: 1, n: p.nu}
        e[n] = {n: 2}
    elif p.family == 4:
        half = F(1, 2)
        e[1] = {1: 1, 2: half - m, n: p.mu}
        for i in range(2, 2 * m + 1):
            if i != mid:
                e[i] = {i: i - m - half}
        e[mid] = {mid: half, n: p.nu}
        e[n] = {n: 1}
    elif p.family == 5:
        e[1] = {1: 1, 2: -1}
        for i in range(3, 2 * m + 1):
            if i != mid:
                e[i] = {i: i - 2}
        e[mid] = {mid: m - 1, n: p.mu}
        e[n] = {n: 2 * m - 2}
    elif p.family == 6:
        b = int(p.beta)
        dv = dict(p.d).get(3 - b, Fraction(1))
        e[1] = {1: 1, 2: b - 1, 3 - b: -dv}
        for i in range(2, 2 * m + 1):
            if i not in (mid, 2 * m + b):
                e[i] = {i: i - 2 + b}
        e[mid] = {mid: m - 1 + b, n: p.mu}
        e[2 * m + b] = {2 * m + b: 2 * m + 2 * b - 2, n: dv}
        e[n] = {n: 2 * m + 2 * b - 2}
    elif p.family == 7:
        ds = dict(p.d)
        e[1] = {2: 1}
        for i in range(2, 2 * m + 1):
            if i != mid:
                row = {i: F(1)}
                for k2, v in ds.items():
                    if i + k2 - 2 <= n:
                        row[i + k2 - 2] = row.get(i + k2 - 2, ZERO) + v
                e[i] = row
        e[mid] = {mid: 1, n: p.mu}
        e[n] = {n: 2}
    elif p.family == FAMILY_2M3:
        e1: dict[int, dict[int, Fraction]] = {1: {1: 1, 2: -1}}
        for i in range(3, 2 * m + 1):
            if i != mid:
                e1[i] = {i: i - 2}
        e1[mid] = {mid: m - 1, n: p.mu}
        e1[n] = {n: 2 * m - 2}
        e2: dict[int, dict[int, Fraction]] = {1: {2: 1}}
        for i in range(2, 2 * m + 1):
            if i != mid:
                e2[i] = {i: 1}
        e2[mid] = {mid: 1, n: p.mu / (m - 1)}
        e2[n] = {n: 2}
        return [_rows(n, e1), _rows(n, e2)]
    return [_rows(n, e)]


def shape_H(p: FamilyParams) -> list[DerivationShape]:
    """The family as points of the derivation shape (named parameters only)."""
    m = p.m
    F = Fraction
    S = DerivationShape.from_labels
    if p.family == 1:
        return [S(m, 1, p.beta, c=p.mu)]
    if p.family == 2:
        row1 = {m + 2: p.nu} if m % 2 == 0 and p.nu else {}
        return [S(m, 1, 1 - m, c=p.mu, row1=row1)]
    if p.family == 3:
        return [S(m, 1, 2 - m, a=p.mu, c=p.nu)]
    if p.family == 4:
        return [S(m, 1, F(3 - 2 * m, 2), b=p.mu, c=p.nu)]
    if p.family == 5:
        return [S(m, 1, 0, c=p.mu)]
    if p.family == 6:
        b = int(p.beta)
        dv = dict(p.d).get(3 - b, F(1))
        return [S(m, 1, b, c=p.mu, row1={3 - b: -dv})]
    if p.family == 7:
        return [S(m, 0, 1, c=p.mu, d=dict(p.d))]
    return [S(m, 1, 0, c=p.mu), S(m, 0, 1, c=p.mu / (m - 1))]


def _diff_entries(A: Matrix, B: Matrix) -> list[dict]:
    out = []
    for i, (ra, rb) in enumerate(zip(A, B)):
        for j, (x, y) in enumerate(zip(ra, rb)):
            if x != y:
                out.append({"entry": [i + 1, j + 1], "listed": format_scalar(x), "used": format_scalar(y)})
    return out


@dataclass(frozen=True)
class FamilyBuild:
    params: FamilyParams
    spec: ExtensionSpec
    algebra: LieAlgebra
    literal: tuple
    notes: tuple = ()

    def failed_invariants(self) -> list[tuple[str, object]]:
        return self.spec.invariant_failures()


def build_family(params: FamilyParams) -> FamilyBuild:
    """Assemble the extension for ``params``.

    Never raises for broken invariants; they are reported by
    :meth:`FamilyBuild.failed_invariants` and the verifier.
    """
    m = params.m
    N = build_Q(m)
    literal = literal_H(params)
    shapes = shape_H(params)
    H = []
    notes = []
    for i, (L, s) in enumerate(zip(literal, shapes)):
        ok = derivation_violation(N, L) is None and shape_violation(m, L) is None
        if ok:
            H.append(L)
            continue
        R = s.realize()
        H.append(R)
        bad = derivation_violation(N, L)
        notes.append({
            "H": i + 1,
            "literal_is_derivation": bad is None,
            "literal_failure": list(bad) if bad else None,
            "completed_entries": _diff_entries(L, R),
        })
    n = N.dim
    r = {}
    if params.family == FAMILY_2M3 and params.gamma:
        r[(0, 1)] = tuple(params.gamma if c == n - 1 else ZERO for c in range(n))
    spec = ExtensionSpec(N, tuple(H), r)
    return FamilyBuild(params, spec, spec.assemble(), tuple(literal), tuple(notes))


def family_catalog(m: int) -> list[FamilyParams]:
    """Deterministic canonical samples of the seven (2m+2)-dimensional families.

    mu and nu run over {0, 1}, family 6 over its full beta set; family 3 is
    omitted for m = 2 and the single free beta of family 1 is sampled at
    1, 2 and 1/3.
    """
    if m < 2:
        raise FamilyParameterError("m must be >= 2")
    F = Fraction
    out = []
    for beta in (F(1), F(2), F(1, 3)):
        for mu in (0, 1):
            out.append(FamilyParams(1, m, beta=beta, mu=mu))
    for mu in (0, 1):
        for nu in ((0, 1) if m % 2 == 0 else (0,)):
            out.append(FamilyParams(2, m, mu=mu, nu=nu))
    for fam in (3, 4):
        if fam == 3 and m == 2:
            continue
        for mu in (0, 1):
            for nu in (0, 1):
                out.append(FamilyParams(fam, m, mu=mu, nu=nu))
    for mu in (0, 1):
        out.append(FamilyParams(5, m, mu=mu))
    for beta in family6_betas(m):
        for mu in (0, 1):
            out.append(FamilyParams(6, m, beta=beta, mu=mu, d={3 - beta: 1}))
    first = family7_d_indices(m)[0]
    for ds in ({}, {first: 1}):
        for mu in (0, 1):
            out.append(FamilyParams(7, m, mu=mu, d=ds))
    return out


def family_2m3_params(m: int, mu=0, gamma=0) -> FamilyParams:
    return FamilyParams(FAMILY_2M3, m, mu=mu, gamma=gamma)


def shift_h(g: LieAlgebra, h_index: int, coeffs: Sequence) -> LieAlgebra:
    """Change of basis ``h -> h + sum coeffs_a e_a`` on the 0-based basis vector ``h_index``."""
    from .algebra import change_basis
    from .linalg import identity

    n = g.dim
    M = [list(r) for r in identity(n)]
    for a, c in enumerate(vector(coeffs)):
        M[h_index][a] += c
    return change_basis(g, tuple(tuple(r) for r in M))
