"""Certification of nilradicals, the extension-dimension bound and the classified families."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .algebra import (
    LieAlgebra,
    ad,
    bracket,
    bracket_span,
    center,
    derived_series,
    is_nilpotent,
    is_solvable,
    jacobi_violation,
    lower_central_series,
)
from .derivations import (
    DerivationShape,
    NotADerivationError,
    NotTriangularError,
    ShapeViolation,
    alpha_beta,
    check_derivation_shape,
    derivation_space,
    is_derivation,
    nil_dependence_witness,
)
from .families import (
    FAMILY_2M3,
    ExtensionSpec,
    FamilyParams,
    build_family,
    build_Q,
    family_catalog,
    shift_h,
    family_2m3_params,
)
from .linalg import (
    ZERO,
    Subspace,
    commutator,
    format_scalar,
    inverse,
    is_upper_triangular,
    matmul,
    nullspace,
    rank,
    unit_vector,
)


class NotSolvableError(ValueError):
    pass


def _vec(v) -> list[str]:
    return [format_scalar(x) for x in v]


@dataclass
class Check:
    name: str
    passed: bool
    witness: dict | None = None

    def to_json_obj(self) -> dict:
        return {"name": self.name, "pass": self.passed, "witness": self.witness}


@dataclass
class CertificationReport:
    subject: dict
    checks: list[Check] = field(default_factory=list)
    notes: list = field(default_factory=list)

    def add(self, name: str, passed: bool, witness: dict | None = None) -> Check:
        c = Check(name, bool(passed), witness)
        self.checks.append(c)
        return c

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    @property
    def first_failure(self) -> Check | None:
        return next((c for c in self.checks if not c.passed), None)

    def check(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    def to_json_obj(self) -> dict:
        obj = {
            "subject": self.subject,
            "checks": [c.to_json_obj() for c in self.checks],
            "verdict": self.verdict,
        }
        if self.notes:
            obj["notes"] = self.notes
        return obj


# -- nilradical ------------------------------------------------------------

def _adapted_basis(N: Subspace) -> list:
    """Complement coordinate axes first, then the basis of ``N``."""
    n = N.ambient_dim
    return [unit_vector(n, j) for j in N.complement_axes()] + [list(b) for b in N.basis]


def ad_diagonal_kernel(g: LieAlgebra, N: Subspace) -> Subspace:
    """``{x : ad x has zero diagonal}`` computed in the basis adapted to ``N``.

    All ``ad e_i`` must be upper triangular in that basis, otherwise raises
    NotTriangularError.
    """
    B = _adapted_basis(N)
    Binv = inverse(B)
    diags = []
    for i in range(g.dim):
        M = matmul(matmul(B, ad(g, unit_vector(g.dim, i))), Binv)
        if not is_upper_triangular(M):
            raise NotTriangularError(f"ad({g.names[i]}) is not upper triangular in the basis adapted to N")
        diags.append([M[k][k] for k in range(g.dim)])
    return nullspace(diags)


def verify_nilradical(g: LieAlgebra, N: Subspace, report: CertificationReport | None = None) -> CertificationReport:
    """Checks that ``N`` is an ideal, nilpotent, contains ``[g, g]`` and is maximal."""
    if not is_solvable(g):
        raise NotSolvableError("g is not solvable")
    if report is None:
        report = CertificationReport({"algebra_dim": g.dim, "N": N.to_json()})
    names = g.names

    bad = None
    for i in range(g.dim):
        for s in N.basis:
            v = bracket(g, unit_vector(g.dim, i), s)
            if not N.contains(v):
                bad = {"element": names[i], "n": _vec(s), "bracket": _vec(v)}
                break
        if bad:
            break
    report.add("nilradical_ideal", bad is None, bad)

    term, k = N, 1
    while term.dim and k <= g.dim + 1:
        nxt = bracket_span(g, N, term)
        if nxt == term:
            break
        term, k = nxt, k + 1
    report.add("nilradical_nilpotent", term.dim == 0,
               None if term.dim == 0 else {"stable_term": term.to_json(), "step": k})

    D = derived_series(g)
    derived = D[1] if len(D) > 1 else Subspace.zero(g.dim)
    out = next((b for b in derived.basis if not N.contains(b)), None)
    report.add("derived_in_nilradical", out is None, None if out is None else {"vector": _vec(out)})

    try:
        K = ad_diagonal_kernel(g, N)
    except NotTriangularError as exc:
        report.add("nilradical_maximal", False, {"error": str(exc)})
    else:
        extra = next((b for b in K.basis if not N.contains(b)), None)
        ok = extra is None and N <= K
        wit = None
        if extra is not None:
            wit = {"nilpotent_ad_outside_N": _vec(extra)}
        elif not ok:
            wit = {"N_element_with_nonzero_ad_diagonal": _vec(next(b for b in N.basis if not K.contains(b)))}
        report.add("nilradical_maximal", ok, wit)
    return report


# -- indecomposability heuristic -------------------------------------------

def coordinate_components(g: LieAlgebra) -> list[list[int]]:
    """Connected components of the graph joining ``a, b, c`` whenever ``C^c_ab != 0``."""
    parent = list(range(g.dim))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (a, b), terms in g.structure.items():
        for c, _ in terms:
            for u, v in ((a, b), (a, c)):
                ru, rv = find(u), find(v)
                if ru != rv:
                    parent[ru] = rv
    comps: dict[int, list[int]] = {}
    for i in range(g.dim):
        comps.setdefault(find(i), []).append(i)
    return sorted(comps.values())


def indecomposability_check(g: LieAlgebra) -> Check:
    comps = coordinate_components(g)
    Z = center(g)
    D = derived_series(g)
    derived = D[1] if len(D) > 1 else Subspace.zero(g.dim)
    central_outside = next((z for z in Z.basis if not derived.contains(z)), None)
    ok = len(comps) == 1 and Z.dim <= 1 and central_outside is None
    wit = {
        "status": "consistent with indecomposable" if ok else "decomposition evidence found",
        "center_dim": Z.dim,
        "coordinate_components": [[g.names[i] for i in c] for c in comps],
    }
    if central_outside is not None:
        wit["central_element_outside_derived"] = _vec(central_outside)
    return Check("indecomposable_consistent", ok, wit)


# -- extension dimension bound ------------------------------------------

def diagonal_pair(m: int):
    """The two diagonal-law derivations ``(alpha, beta) = (1, 0)`` and ``(0, 1)``."""
    return DerivationShape(m, 1, 0).realize(), DerivationShape(m, 0, 1).realize()


def check_dimension_bound(m: int) -> CertificationReport:
    """At most two nil-independent derivations of Q_{2m+1}, and two are attained."""
    if not isinstance(m, int) or m < 2:
        raise ValueError(f"m must be an integer >= 2, got {m!r}")
    g = build_Q(m)
    report = CertificationReport({"check": "dimension_bound", "m": m})
    space = derivation_space(g)
    reps = space.outer_representatives()
    ab = []
    shape_bad = None
    for i, D in enumerate(reps):
        try:
            check_derivation_shape(m, D, g)
        except (NotADerivationError, ShapeViolation) as exc:
            shape_bad = shape_bad or {"representative": i, "error": str(exc)}
        ab.append(alpha_beta(D))
    report.add("outer_representatives_in_shape", shape_bad is None, shape_bad)
    r = rank([list(v) for v in ab]) if ab else 0
    report.add("alpha_beta_rank_at_most_2", r <= 2,
               {"rank": r, "outer_dim": space.outer_dim, "total_dim": space.total_dim,
                "inner_dim": space.inner_dim})
    independent = None
    witnesses = []
    for idx in combinations(range(len(reps)), 3):
        w = nil_dependence_witness([reps[i] for i in idx])
        if w is None:
            independent = {"subset": list(idx)}
            break
        witnesses.append({"subset": list(idx), "combination": list(w)})
    report.add("three_subsets_nil_dependent", independent is None,
               independent or {"subsets": len(witnesses), "first": witnesses[:3]})
    D1, D2 = diagonal_pair(m)
    ok = is_derivation(g, D1) and is_derivation(g, D2) and nil_dependence_witness([D1, D2]) is None
    report.add("nil_independent_pair_exists", ok,
               {"D1_diagonal": _vec(D1[k][k] for k in range(g.dim)),
                "D2_diagonal": _vec(D2[k][k] for k in range(g.dim))})
    report.notes.append({"extension_dims": [2 * m + 2, 2 * m + 3] if report.passed else None})
    return report


# -- family certification --------------------------------------------------

def _names(g: LieAlgebra, triple) -> list[str]:
    return [g.names[i - 1] for i in triple]


def certify_family(params: FamilyParams) -> CertificationReport:
    """Full pipeline on one family member; failures become report entries."""
    build = build_family(params)
    g, spec = build.algebra, build.spec
    m = params.m
    n = spec.nilradical.dim
    subject = dict(params.to_json_obj(), label=params.label, dim=g.dim)
    report = CertificationReport(subject)
    issue = params.normal_form_issue()
    if issue:
        report.notes.append({"parameter_range": issue})
    for note in build.notes:
        report.notes.append({"completed_literal_reading": note})

    bad = jacobi_violation(g)
    report.add("jacobi", bad is None, None if bad is None else {"triple": _names(g, bad)})
    hidx = range(n, g.dim)
    bad = jacobi_violation(g, touching=hidx)
    report.add("extension_jacobi", bad is None, None if bad is None else {"triple": _names(g, bad)})

    for i, H in enumerate(spec.H):
        shape_err = None
        try:
            check_derivation_shape(m, H, spec.nilradical)
        except NotADerivationError as exc:
            shape_err = {"not_a_derivation": list(exc.pair) if exc.pair else None}
        except ShapeViolation as exc:
            shape_err = {"constraint": exc.constraint, "entry": list(exc.entry) if exc.entry else None}
        report.add(f"H{i + 1}_derivation_shape", shape_err is None, shape_err)
    for i, j in combinations(range(spec.t), 2):
        lhs = commutator(spec.H[i], spec.H[j])
        rhs = ad(spec.nilradical, spec.r_vector(i, j))
        report.add(f"[H{i + 1},H{j + 1}]_inner", lhs == rhs, None)
    w = nil_dependence_witness(list(spec.H))
    report.add("nil_independent", w is None, None if w is None else {"combination": list(w)})
    if params.family == FAMILY_2M3:
        zero = commutator(spec.H[0], spec.H[1])
        hh = g.basis_bracket(n, n + 1)
        ok = not any(any(r) for r in zero) and not any(hh)
        report.add("h1_h2_commute", ok, None if ok else {"[h1,h2]": _vec(hh)})

    solvable = is_solvable(g)
    report.add("solvable", solvable, None if solvable else
               {"derived_series_dims": [S.dim for S in derived_series(g)]})
    nil = is_nilpotent(g)
    report.add("non_nilpotent", not nil, None if not nil else {"lcs_dims": [S.dim for S in lower_central_series(g)]})
    N = Subspace.coordinate(g.dim, range(n))
    if solvable:
        verify_nilradical(g, N, report)
    else:
        for name in ("nilradical_ideal", "nilradical_nilpotent", "derived_in_nilradical", "nilradical_maximal"):
            report.add(name, False, {"error": "g is not solvable"})
    report.checks.append(indecomposability_check(g))
    return report


def gamma_shift_check(m: int, mu=0, gamma=1) -> Check:
    """``h1 -> h1 + (gamma/2) e_{2m+1}`` takes the gamma variant to the gamma = 0 tensor."""
    gamma = Fraction(gamma)
    base = build_family(family_2m3_params(m, mu)).algebra
    variant = build_family(family_2m3_params(m, mu, gamma)).algebra
    n = 2 * m + 1
    shifted = shift_h(variant, n, [gamma / 2 if a == n - 1 else ZERO for a in range(variant.dim)])
    ok = shifted.structure == base.structure
    return Check("gamma_shift", ok, {"m": m, "mu": format_scalar(Fraction(mu)), "gamma": format_scalar(gamma)})


# -- fingerprints ----------------------------------------------------------

@dataclass(frozen=True)
class Fingerprint:
    derived_dims: tuple
    lcs_dims: tuple
    center_dim: int
    derivation_dim: int
    h_diagonals: tuple

    def to_json_obj(self) -> dict:
        return {
            "derived_dims": list(self.derived_dims),
            "lcs_dims": list(self.lcs_dims),
            "center_dim": self.center_dim,
            "derivation_dim": self.derivation_dim,
            "h_diagonals": [_vec(d) for d in self.h_diagonals],
        }


def _normalized_diagonal(H) -> tuple:
    diag = [H[k][k] for k in range(len(H))]
    lead = next((x for x in diag if x), None)
    if lead is not None:
        diag = [x / lead for x in diag]
    return tuple(sorted(diag))


def fingerprint(g: LieAlgebra, spec: ExtensionSpec | None = None) -> Fingerprint:
    H = spec.H if spec is not None else ()
    return Fingerprint(
        tuple(S.dim for S in derived_series(g)),
        tuple(S.dim for S in lower_central_series(g)),
        center(g).dim,
        derivation_space(g).total_dim,
        tuple(sorted(_normalized_diagonal(Hi) for Hi in H)),
    )


@dataclass
class DistinctnessReport:
    labels: list
    families: list
    matrix: list
    undecided: list

    @property
    def same_count(self) -> int:
        return sum(v == "same" for row in self.matrix for v in row)

    def cross_family_undecided(self) -> list:
        return [(a, b) for a, b in self.undecided if self.families[a] != self.families[b]]

    def to_json_obj(self) -> dict:
        return {
            "labels": self.labels,
            "matrix": self.matrix,
            "same": self.same_count,
            "undecided": [[self.labels[a], self.labels[b]] for a, b in self.undecided],
        }


def pairwise_distinct(entries: Sequence) -> DistinctnessReport:
    """Compare fingerprints pairwise: ``"different"`` or ``"undecided"`` (equal fingerprints).

    ``entries`` holds FamilyParams or ``(label, LieAlgebra, ExtensionSpec)`` triples.
    """
    labels, fams, fps = [], [], []
    for e in entries:
        if isinstance(e, FamilyParams):
            b = build_family(e)
            labels.append(e.label)
            fams.append(e.family)
            fps.append(fingerprint(b.algebra, b.spec))
        else:
            label, g, spec = e
            labels.append(label)
            fams.append(label)
            fps.append(fingerprint(g, spec))
    k = len(fps)
    mat = [["-" if i == j else ("undecided" if fps[i] == fps[j] else "different") for j in range(k)]
           for i in range(k)]
    und = [(i, j) for i in range(k) for j in range(i + 1, k) if mat[i][j] == "undecided"]
    return DistinctnessReport(labels, fams, mat, und)


# -- suites ----------------------------------------------------------------

SUITES = ("theorem1", "theorem2", "theorem3", "corollary1", "all")


def _entry(suite: str, expect: str, report) -> dict:
    obj = report.to_json_obj()
    verdict = obj["verdict"]
    return {"suite": suite, "expect": expect, "verdict": verdict, "met": verdict == expect, "report": obj}


def run_suite(suite: str, ms: Iterable[int]) -> dict:
    """Consolidated report; ``ok`` is true iff every expectation is met."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    ms = list(ms)
    names = ("theorem1", "theorem2", "theorem3", "corollary1") if suite == "all" else (suite,)
    entries = []
    for name in names:
        for m in ms:
            if name == "theorem1":
                entries.append(_entry(name, "pass", check_dimension_bound(m)))
            elif name == "theorem2":
                for p in family_catalog(m):
                    entries.append(_entry(name, "pass", certify_family(p)))
                d = pairwise_distinct(family_catalog(m))
                rep = CertificationReport({"check": "pairwise_distinct", "m": m})
                rep.add("no_same_verdicts", d.same_count == 0, d.to_json_obj())
                entries.append(_entry(name, "pass", rep))
            elif name == "theorem3":
                for mu in (0, 1):
                    rep = certify_family(family_2m3_params(m, mu))
                    rep.checks.append(gamma_shift_check(m, mu))
                    entries.append(_entry(name, "pass", rep))
            else:
                rep = certify_family(FamilyParams(3, m, mu=1, nu=1))
                ff = rep.first_failure
                rep.notes.append({"first_failure": None if ff is None else ff.to_json_obj()})
                entries.append(_entry(name, "fail" if m == 2 else "pass", rep))
    return {
        "suite": suite,
        "m": ms,
        "entries": entries,
        "expectations": len(entries),
        "unmet": sum(not e["met"] for e in entries),
        "ok": all(e["met"] for e in entries),
    }
