"""Divisor classes on the blow-up of a marked set and the involution actions.

Classes are written ``D = m L - sum m_q E_q`` and stored as ``(m, (m_0, ..., m_{n-1}))``
indexed by omega id.  The intersection form is ``diag(1, -1, ..., -1)`` in the
basis ``(L, E_0, ..., E_{n-1})``.

The certificate enumerates reduced words depth first, carrying the class and
the full table of ``Delta``/``Lambda`` values down the tree, so each node costs
one lattice step plus one invariant sweep.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .curve import MarkedPointSet
from .errors import (
    AssertionFailure,
    InputError,
    NotAGenerator,
    NotInSuccRelation,
    RecursionMismatch,
    UnknownId,
    VerificationFailure,
    WordNotReduced,
)

# composition order used to read degrees off the lattice; degree is invariant
# under reversal (deg g = deg g^-1) so this only labels the convention
ORIENTATION = "word (p1..pm) <-> sigma_pm o ... o sigma_p1"

FAMILIES = ("delta_p_negative", "delta_a_positive", "delta_a_beats_delta_p",
            "ijk_first", "ijk_second", "mixed_lower_bound", "not_L")


@dataclass(frozen=True)
class DivisorClass:
    m: int
    mults: Tuple[int, ...]

    def vector(self) -> Tuple[int, ...]:
        """Coordinates in the basis ``(L, E_0, ...)``."""
        return (self.m,) + tuple(-x for x in self.mults)

    @classmethod
    def from_vector(cls, v: Sequence[int]) -> "DivisorClass":
        return cls(int(v[0]), tuple(-int(x) for x in v[1:]))

    @classmethod
    def line(cls, n: int) -> "DivisorClass":
        return cls(1, (0,) * n)

    def max_abs(self) -> int:
        return max([abs(self.m)] + [abs(x) for x in self.mults])

    def __str__(self):
        parts = [f"{self.m}L"]
        for q, x in enumerate(self.mults):
            if x:
                parts.append(f"{'-' if x > 0 else '+'}{abs(x)}E{q}")
        return "".join(parts)


class PicLattice:
    """Basis, intersection form and canonical-type class of a marked set."""

    def __init__(self, marked: MarkedPointSet):
        self.marked = marked
        self.n = len(marked.omega)
        self.basis = ("L",) + tuple(f"E{q}" for q in range(self.n))
        self.J = [[(1 if i == 0 else -1) if i == j else 0 for j in range(self.n + 1)]
                  for i in range(self.n + 1)]
        self.K = (-3,) + (1,) * self.n
        self.generators = tuple(marked.generators)
        self.succ_of = {q: tuple(marked.successors(q)) for q in range(self.n)}
        self.pairs = tuple(sorted(marked.succ))
        self._actions: dict = {}

    @property
    def size(self) -> int:
        return self.n + 1

    def form(self, u: Sequence[int], v: Sequence[int]) -> int:
        return u[0] * v[0] - sum(a * b for a, b in zip(u[1:], v[1:]))

    def line(self) -> DivisorClass:
        return DivisorClass.line(self.n)

    def check_id(self, q: int):
        if not isinstance(q, int) or not 0 <= q < self.n:
            raise UnknownId(f"{q!r} is not an omega id")

    def check_generator(self, p: int):
        if p not in self.generators:
            raise NotAGenerator(f"{p!r} is not a generator id")

    def check_class(self, D: DivisorClass):
        if len(D.mults) != self.n:
            raise InputError(f"class has {len(D.mults)} multiplicities, lattice has {self.n} points")


def lattice_new(marked: MarkedPointSet) -> PicLattice:
    return PicLattice(marked)


# --------------------------------------------------------------------------
# the action of a generator


def _matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))]
            for i in range(len(A))]


def _matvec(A, v):
    return tuple(sum(a * x for a, x in zip(row, v)) for row in A)


def _transpose(A):
    return [list(r) for r in zip(*A)]


@dataclass(frozen=True)
class LatticeAction:
    p: int
    matrix: tuple  # rows, integer entries

    def apply(self, D: DivisorClass) -> DivisorClass:
        return DivisorClass.from_vector(_matvec(self.matrix, D.vector()))

    def check(self, lat: PicLattice) -> List[str]:
        """Names of the violated invariants (empty when all hold)."""
        M = [list(r) for r in self.matrix]
        size = lat.size
        ident = [[int(i == j) for j in range(size)] for i in range(size)]
        bad = []
        if _matmul(M, M) != ident:
            bad.append("involution")
        if _matmul(_matmul(_transpose(M), lat.J), M) != lat.J:
            bad.append("isometry")
        if _matvec(M, lat.K) != tuple(lat.K):
            bad.append("canonical")
        lp = [0] * size
        lp[0], lp[1 + self.p] = 1, -1
        if _matvec(M, lp) != tuple(lp):
            bad.append("pencil")
        return bad


def sigma_action(lat: PicLattice, p: int) -> LatticeAction:
    """Matrix of the lifted involution centred at generator ``p``.

    Column ``j`` is the image of the ``j``-th basis vector.
    """
    lat.check_generator(p)
    if p in lat._actions:
        return lat._actions[p]
    size = lat.size
    cols = []
    succ = lat.succ_of[p]

    def vec(L=0, E=None):
        v = [0] * size
        v[0] = L
        for q, c in (E or {}).items():
            v[1 + q] += c
        return v

    minus_succ = {b: -1 for b in succ}
    cols.append(vec(3, {p: -2, **minus_succ}))
    for a in range(lat.n):
        if a == p:
            cols.append(vec(2, {p: -1, **minus_succ}))
        elif a in succ:
            cols.append(vec(1, {p: -1, a: -1}))
        else:
            cols.append(vec(0, {a: 1}))
    M = tuple(tuple(cols[j][i] for j in range(size)) for i in range(size))
    act = LatticeAction(p, M)
    bad = act.check(lat)
    if bad:
        raise VerificationFailure(f"action of {p} violates {', '.join(bad)}")
    lat._actions[p] = act
    return act


def apply_sigma(lat: PicLattice, D: DivisorClass, p: int) -> DivisorClass:
    """``sigma'_p(D)`` by the closed formulas (same result as the matrix)."""
    n, mu = D.m, D.mults
    succ = lat.succ_of[p]
    np_ = mu[p]
    s = sum(mu[b] for b in succ)
    out = list(mu)
    out[p] = 2 * n - np_ - s
    for a in succ:
        out[a] = n - np_ - mu[a]
    return DivisorClass(3 * n - 2 * np_ - s, tuple(out))


# --------------------------------------------------------------------------
# the functionals


def delta(lat: PicLattice, D: DivisorClass, b: int) -> int:
    lat.check_id(b)
    mu = D.mults
    return 2 * D.m - 2 * mu[b] - sum(mu[c] for c in lat.succ_of[b])


def lambda_(lat: PicLattice, D: DivisorClass, b: int, a: int) -> int:
    lat.check_id(b)
    lat.check_id(a)
    if a not in lat.succ_of[b]:
        raise NotInSuccRelation(f"{b} > {a} does not hold")
    mu = D.mults
    return D.m - mu[b] + mu[a] - sum(mu[c] for c in lat.succ_of[b] if c != a)


def all_values(lat: PicLattice, D: DivisorClass):
    """All ``Delta_q(D)`` (list by id) and ``Lambda_{b,a}(D)`` (dict by pair)."""
    deltas = [delta(lat, D, q) for q in range(lat.n)]
    lambdas = {(b, a): lambda_(lat, D, b, a) for b, a in lat.pairs}
    return deltas, lambdas


def recursion_table(lat: PicLattice, deltas, lambdas, p: int, verbatim: bool = False):
    """Values on ``sigma'_p(D)`` predicted from those on ``D``.

    For a pair ``b > a`` unrelated to ``p`` only ``m`` moves, by ``delta_p``, so
    ``Lambda`` shifts by ``delta_p``.  ``verbatim=True`` uses the printed
    coefficient 2 in that case instead; it disagrees with the direct values as
    soon as such a pair exists, and is kept only to exhibit that.
    """
    dp = deltas[p]
    succ_p = lat.succ_of[p]
    new_d = []
    for a in range(lat.n):
        if a == p:
            new_d.append(-deltas[a])
        elif p in lat.succ_of[a]:
            new_d.append(deltas[a] + dp)
        elif a in succ_p:
            new_d.append(deltas[a] + 2 * lambdas[(p, a)])
        else:
            new_d.append(deltas[a] + 2 * dp)
    new_l = {}
    for (b, a), lam in lambdas.items():
        if b == p:
            v = -lam
        elif a == p:
            v = lam + 2 * dp
        elif p in lat.succ_of[b]:
            v = lam
        elif b in succ_p:
            v = lam + lambdas[(p, b)]
        else:
            v = lam + (2 if verbatim else 1) * dp
        new_l[(b, a)] = v
    return new_d, new_l


@dataclass
class StepTable:
    p: int
    table_deltas: list
    table_lambdas: dict
    direct_deltas: list
    direct_lambdas: dict

    @property
    def mismatches(self):
        out = [("delta", q, t, d) for q, (t, d) in enumerate(zip(self.table_deltas, self.direct_deltas)) if t != d]
        out += [("lambda", k, self.table_lambdas[k], self.direct_lambdas[k])
                for k in self.direct_lambdas if self.table_lambdas[k] != self.direct_lambdas[k]]
        return out


def overt_step(lat: PicLattice, D: DivisorClass, p: int, verbatim: bool = False):
    """``sigma'_p(D)`` with its values computed by the case table and directly."""
    lat.check_generator(p)
    lat.check_class(D)
    d0, l0 = all_values(lat, D)
    D1 = apply_sigma(lat, D, p)
    td, tl = recursion_table(lat, d0, l0, p, verbatim)
    dd, dl = all_values(lat, D1)
    tab = StepTable(p, td, tl, dd, dl)
    if tab.mismatches:
        raise RecursionMismatch(f"case table disagrees with direct values at p={p}", details=tab.mismatches)
    return D1, tab


# --------------------------------------------------------------------------
# words and the invariant sweep


@dataclass(frozen=True)
class Word:
    letters: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))
        for u, v in zip(self.letters, self.letters[1:]):
            if u == v:
                raise WordNotReduced(f"letter {u} repeated consecutively")

    def __len__(self):
        return len(self.letters)

    def reversed(self) -> "Word":
        return Word(self.letters[::-1])


def _eventually_positive(slope: int, at_start: int) -> bool:
    """``slope*t + c > 0`` for every integer ``t >= t0`` given its value at ``t0``."""
    return slope >= 0 and at_start > 0


@dataclass
class InvariantReport:
    prefix_length: int
    p: Optional[int]
    deltas: list
    lambdas: dict
    results: Dict[str, bool] = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self):
        return {
            "prefix_length": self.prefix_length,
            "p": self.p,
            "deltas": list(self.deltas),
            "lambdas": [[b, a, v] for (b, a), v in sorted(self.lambdas.items())],
            "results": dict(self.results),
            "failures": list(self.failures),
        }


def check_assertions(lat: PicLattice, deltas, lambdas, p: Optional[int], D: DivisorClass,
                     prefix_length: int = 0) -> InvariantReport:
    """Evaluate every assertion family at one prefix.

    The two families quantified over ``i, j`` are linear in the free index once
    the pattern ties ``i`` to ``j``, so "for all j" reduces to a sign check on
    the slope plus the value at the smallest admissible ``j``.
    """
    fails: list = []
    res = {}
    n = lat.n
    dp = deltas[p] if p is not None else None

    ok = True
    if p is not None and not dp < 0:
        ok = False
        fails.append(f"delta_{p} = {dp} is not negative")
    res["delta_p_negative"] = ok

    ok = True
    for a in range(n):
        if a != p and not deltas[a] > 0:
            ok = False
            fails.append(f"delta_{a} = {deltas[a]} is not positive")
    res["delta_a_positive"] = ok

    ok = True
    if p is not None:
        for a in range(n):
            if a == p or p in lat.succ_of[a]:
                continue
            if not -dp < deltas[a]:
                ok = False
                fails.append(f"-delta_{p} = {-dp} not below delta_{a} = {deltas[a]}")
    res["delta_a_beats_delta_p"] = ok

    ok = True
    for (b, a), lam in lambdas.items():
        da, db = deltas[a], deltas[b]
        s = da + lam
        cases = []
        if a != p:
            cases.append(("i=j,k=-1", s, 2 * s - db))
            cases.append(("i=j+1,k=1", s, 2 * s + da + db))
        if b != p:
            cases.append(("i=j,k=1", s, 2 * s + db))
            cases.append(("i=j-1,k=-1", s, 2 * s - da - db))
        for name, slope, v0 in cases:
            if not _eventually_positive(slope, v0):
                ok = False
                fails.append(f"first family {name} fails for {b}>{a}")
    res["ijk_first"] = ok

    ok = True
    for b in range(n):
        succ = lat.succ_of[b]
        if len(succ) < 2:
            continue
        db = deltas[b]
        for a in succ:
            X = deltas[a] + 2 * lambdas[(b, a)]
            for a2 in succ:
                if a2 == a:
                    continue
                s = X + deltas[a2]
                cases = []
                if b != p:
                    cases.append(("i=j,k=1", s, s + db))
                    cases.append(("i=j+1,k=-1", s, s + X - db))
                if a2 != p:
                    cases.append(("i=j,k=-1", s, s - db))
                    cases.append(("i=j-1,k=1", s, 2 * s - X + db))
                for name, slope, v0 in cases:
                    if not _eventually_positive(slope, v0):
                        ok = False
                        fails.append(f"second family {name} fails for {b}>{a},{a2}")
    res["ijk_second"] = ok

    ok = True
    if p is not None:
        for a in lat.succ_of[p]:
            base = deltas[a] + 2 * lambdas[(p, a)]
            for r in range(n):
                if r != p and not base + deltas[r] > dp:
                    ok = False
                    fails.append(f"mixed bound fails for a={a}, r={r}")
    res["mixed_lower_bound"] = ok

    ok = p is None or D != lat.line()
    if not ok:
        fails.append("class returned to L")
    res["not_L"] = ok
    return InvariantReport(prefix_length, p, list(deltas), dict(lambdas), res, fails)


def word_evaluate(lat: PicLattice, w, check_table: bool = True):
    """Class of ``w`` applied to ``L`` and one report per prefix (including the empty one)."""
    if not isinstance(w, Word):
        w = Word(tuple(w))
    for p in w.letters:
        lat.check_generator(p)
    D = lat.line()
    deltas, lambdas = all_values(lat, D)
    reports = [check_assertions(lat, deltas, lambdas, None, D, 0)]
    for k, p in enumerate(w.letters, 1):
        if check_table:
            D, tab = overt_step(lat, D, p)
            deltas, lambdas = tab.direct_deltas, tab.direct_lambdas
        else:
            D = apply_sigma(lat, D, p)
            deltas, lambdas = all_values(lat, D)
        reports.append(check_assertions(lat, deltas, lambdas, p, D, k))
    bad = [r for r in reports if not r.ok]
    if bad:
        raise AssertionFailure(f"assertions fail on word {list(w.letters)}", word=list(w.letters),
                               failures=[f for r in bad for f in r.failures])
    return D, reports


def predicted_degree(lat: PicLattice, w) -> int:
    D, _ = word_evaluate(lat, w)
    return D.m


# --------------------------------------------------------------------------
# certificate


def reduced_words(gens: Sequence[int], max_len: int, prefix: Tuple[int, ...] = ()) -> Iterator[Tuple[int, ...]]:
    """Reduced words extending ``prefix``, depth first, lexicographic in ids."""
    if prefix:
        yield prefix
    if len(prefix) >= max_len:
        return
    for g in sorted(gens):
        if prefix and prefix[-1] == g:
            continue
        yield from reduced_words(gens, max_len, prefix + (g,))


def count_reduced_words(k: int, length: int) -> int:
    return k * (k - 1) ** (length - 1) if length >= 1 else 1


@dataclass
class ShardResult:
    first: int
    nodes: int = 0
    leaves: int = 0
    max_abs: int = 0
    failure: Optional[dict] = None


def _run_shard(marked: MarkedPointSet, first: int, max_len: int) -> ShardResult:
    lat = PicLattice(marked)
    gens = sorted(lat.generators)
    out = ShardResult(first)
    D0 = lat.line()
    d0, l0 = all_values(lat, D0)
    # explicit stack keeps deep words off the recursion limit; children pushed
    # in reverse so pops come out lexicographic
    stack = [((first,), D0, d0, l0)]
    while stack:
        word, Dprev, dprev, lprev = stack.pop()
        p = word[-1]
        D = apply_sigma(lat, Dprev, p)
        td, tl = recursion_table(lat, dprev, lprev, p)
        dd, dl = all_values(lat, D)
        if td != dd or tl != dl:
            out.failure = {"word": list(word), "kind": "recursion"}
            return out
        rep = check_assertions(lat, dd, dl, p, D, len(word))
        if not rep.ok or not dd[p] < 0:
            out.failure = {"word": list(word), "kind": "assertion", "failures": rep.failures}
            return out
        out.nodes += 1
        out.max_abs = max(out.max_abs, D.max_abs())
        children = [g for g in gens if g != p] if len(word) < max_len else []
        if not children:
            out.leaves += 1
        for g in reversed(children):
            stack.append((word + (g,), D, dd, dl))
    return out


@dataclass
class Certificate:
    config_hash: str
    generators: list
    omega: list
    succ: list
    max_len: int
    words_checked: int
    words_total: int
    max_coeff_bits: int
    status: str
    orientation: str = ORIENTATION
    counterexample: Optional[dict] = None

    def to_json(self) -> dict:
        out = {
            "config_hash": self.config_hash,
            "generators": self.generators,
            "omega": self.omega,
            "succ": self.succ,
            "max_len": self.max_len,
            "words_checked": self.words_checked,
            "words_total": self.words_total,
            "max_coeff_bits": self.max_coeff_bits,
            "status": self.status,
            "orientation": self.orientation,
        }
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


def certify_free_product(lat: PicLattice, max_len: int = 12, workers: int = 1,
                         raise_on_failure: bool = True) -> Certificate:
    """Check every reduced word of length ``1..max_len``.

    ``words_checked`` counts the maximal words (length ``max_len``, or shorter
    when no extension exists); every prefix of each is checked on the way, so
    ``words_total`` counts all reduced words visited.
    """
    if max_len < 1:
        raise InputError("max_len must be at least 1")
    gens = sorted(lat.generators)
    if not gens:
        raise InputError("no generators")
    marked = lat.marked
    if workers > 1 and len(gens) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(gens))) as ex:
            shards = list(ex.map(_run_shard, [marked] * len(gens), gens, [max_len] * len(gens)))
    else:
        shards = [_run_shard(marked, g, max_len) for g in gens]
    failure = next((s.failure for s in shards if s.failure), None)
    blob = marked.to_json()
    cert = Certificate(
        config_hash=marked.config_hash,
        generators=list(gens),
        omega=blob["omega"],
        succ=blob["succ"],
        max_len=max_len,
        words_checked=sum(s.leaves for s in shards),
        words_total=sum(s.nodes for s in shards),
        max_coeff_bits=max(s.max_abs for s in shards).bit_length(),
        status="certified" if failure is None else "failed",
        counterexample=failure,
    )
    if failure is not None and raise_on_failure:
        raise AssertionFailure(f"word {failure['word']} fails", word=failure["word"],
                               failures=failure.get("failures"))
    return cert
