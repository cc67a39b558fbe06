"""Run every identity check for one field and collect a pass/fail report."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from gl2kloosterman import code, glgroup, kloosterman, moments
from gl2kloosterman.field import FieldParams, make_field

FULL_DISTRIBUTION_MAX_R = 4  # full C_j table; beyond that only C_0..C_h_max
DP_MAX_R = 4
VERIFY_MAX_R = 6


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class MomentRecord:
    h: int
    kind: str
    direct: int
    recursion: int
    generated: int

    @property
    def passed(self) -> bool:
        return self.direct == self.recursion == self.generated


@dataclass
class RecursionReport:
    q: int
    r: int
    modulus: int
    h_max: int
    checks: list[Check] = field(default_factory=list)
    records: list[MomentRecord] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and all(m.passed for m in self.records)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(Check(name, bool(passed), detail))

    def render(self, timing: bool = True) -> str:
        lines = [f"verify q={self.q} r={self.r} modulus={self.modulus:#x} h_max={self.h_max}"]
        for c in self.checks:
            tag = "PASS" if c.passed else "FAIL"
            lines.append(f"[{tag}] {c.name}" + (f": {c.detail}" if c.detail else ""))
        for m in self.records:
            tag = "PASS" if m.passed else "FAIL"
            lines.append(f"[{tag}] {m.kind} h={m.h} direct={m.direct} "
                         f"recursion={m.recursion} generated={m.generated}")
        n_fail = sum(not c.passed for c in self.checks) + sum(not m.passed for m in self.records)
        total = len(self.checks) + len(self.records)
        lines.append(f"summary: {total - n_fail}/{total} passed")
        if timing:
            lines.append(f"elapsed: {self.seconds:.2f}s")
        return "\n".join(lines) + "\n"

    def to_json(self, timing: bool = True) -> dict:
        out = {
            "q": self.q, "r": self.r, "modulus": hex(self.modulus), "h_max": self.h_max,
            "passed": self.passed,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
            "moments": [{"kind": m.kind, "h": m.h, "direct": str(m.direct),
                         "recursion": str(m.recursion), "generated": str(m.generated),
                         "passed": m.passed} for m in self.records],
        }
        if timing:
            out["seconds"] = round(self.seconds, 3)
        return out


def _check_field(p: FieldParams, rep: RecursionReport) -> None:
    q = p.q
    x = np.arange(q)
    table = p.mul_array(x[:, None], x[None, :])
    scalar = np.array([[p.mul(a, b) for b in range(q)] for a in range(q)])
    rep.add("field: log-table product equals carry-less product", np.array_equal(table, scalar))
    comm = np.array_equal(table, table.T)
    # (a x) z == a (x z) and (x + b) z == x z + b z, all at once per a / b
    assoc = all(np.array_equal(table[table[a]], table[a][table]) for a in range(q))
    dist = all(np.array_equal(table[x ^ b], table ^ table[b]) for b in range(q))
    rep.add("field: commutative, associative, distributive", comm and assoc and dist)
    inv_ok = all(p.mul(a, int(p.inv_table[a])) == 1 and int(p.inv_table[a]) == p.pow(a, q - 2)
                 for a in p.nonzero())
    rep.add("field: inverses, x^(q-1) = 1",
            inv_ok and all(p.pow(a, q - 1) == 1 for a in p.nonzero()))
    tr = p.trace_table
    frob = all(tr[p.mul(a, a)] == tr[a] for a in range(q))
    rep.add("field: tr(x^2) = tr(x), q/2 elements of trace 0",
            frob and int((tr == 0).sum()) == q // 2)
    orth = all(int(p.char_table[p.mul_array(a, x)].sum()) == (q if a == 0 else 0) for a in range(q))
    rep.add("field: character orthogonality", orth)


def verify_all(r: int, h_max: int = 10, modulus: int | None = None,
               threads: int = 1) -> RecursionReport:
    """Check every identity for GF(2^r); r = 1 is rejected."""
    if r < 2:
        raise ValueError("the code construction needs q >= 4 (r >= 2)")
    if r > VERIFY_MAX_R:
        raise ValueError(f"verification is limited to r <= {VERIFY_MAX_R}")
    if h_max < 1:
        raise ValueError("h_max must be at least 1")
    start = time.perf_counter()
    p = make_field(r, modulus)
    q = p.q
    rep = RecursionReport(q, r, p.modulus, h_max)

    _check_field(p, rep)

    k1 = kloosterman.kloosterman_table(p, 1)
    k2 = kloosterman.kloosterman_table(p, 2)
    rep.add("Weil bound |K| <= 2 sqrt(q)", all(k * k <= 4 * q for k in k1.values.values()))
    rep.add("K_2 = K^2 - q", all(k2[a] == k1[a] ** 2 - q for a in p.nonzero()))
    frob = all(k1[p.mul(a, a)] == k1[a] and k2[p.mul(a, a)] == k2[a] for a in p.nonzero())
    rep.add("K_m(a^2) = K_m(a), m = 1, 2", frob)
    rep.add("MK^1 = 1", kloosterman.power_moment(k1, 1) == 1)

    census = kloosterman.value_census(p, k1)
    rep.add("census support equals {t : |t| < 2 sqrt(q), t = -1 mod 4}",
            census.support == kloosterman.theoretical_range(q),
            " ".join(f"{t}:{m}" for t, m in census.multiplicity.items()))
    cmp_ = kloosterman.compare_census_with_class_numbers(census)
    rep.add("census multiplicity = H(t^2 - 4q)", cmp_.matches_4q)
    # reported, not asserted: the t^2 - q reading
    mismatched = [t for t, mult, _, h1 in cmp_.rows if mult != h1]
    rep.add("finding: H(t^2 - q) reading", True,
            "agrees" if not mismatched else f"disagrees at t in {mismatched}")

    tables = {1: k1, 2: k2}
    max_m = kloosterman.max_dimension(q)
    if max_m >= 3:
        tables[3] = kloosterman.kloosterman_table(p, 3)
    twisted_ok = True
    for m, tab in tables.items():
        lower = tables.get(m - 1)
        for beta in p.elements():
            lhs = kloosterman.twisted_character_sum(p, m, beta, tab)
            rhs = kloosterman.twisted_character_sum_closed_form(p, m, beta, lower)
            twisted_ok &= lhs == rhs
    rep.add(f"twisted sums, m = 1..{max(tables)}", twisted_ok)

    if q <= 16:
        kgl = {a: glgroup.gl2_kloosterman_direct(p, a) for a in p.nonzero()}
    else:
        kgl = glgroup.gl2_kloosterman_all(p)
    rep.add("K_GL(2) = qK^2 + q^2(q-1) = qK_2 + q^3",
            all(kgl[a] == q * k1[a] ** 2 + q * q * (q - 1) == q * k2[a] + q**3
                for a in p.nonzero()))
    rep.add("K_GL(2) recursion matches enumeration",
            all(glgroup.gl_kloosterman_recursive(p, 2, a, k1[a]) == kgl[a] for a in p.nonzero()))
    scaled_ok = all(glgroup.gl2_scaled_trace_sum(p, a) == kgl[p.mul(a, a)] for a in p.nonzero())
    rep.add("sum lam(a(Tr g + Tr g^-1)) = K_GL(2)(a^2)", scaled_ok)
    rep.add("|K_GL(2)(a^2)| <= q^2(q+3)", all(abs(kgl[a]) <= q * q * (q + 3) for a in p.nonzero()))
    lemma = all(abs(glgroup.gl_kloosterman_recursive(p, n, a, k1[a])) < glgroup.gl_order(q, n)
                for n in (2, 3) for a in p.nonzero())
    rep.add("|K_GL(n)| < |GL(n,q)|, n = 2, 3", lemma)

    fib_direct = glgroup.fiber_census_direct(p)
    fib_formula = glgroup.fiber_census_formula(p, k1)
    rep.add("n(beta): enumeration = formula", fib_direct.counts == fib_formula.counts,
            f"n(0)={fib_direct[0]}")
    rep.add("n(beta) > 0, sum n(beta) beta = 0",
            min(fib_direct.counts) > 0 and fib_direct.weighted_sum() == 0)

    ctx = code.build_code_context(p, "direct")
    dw = code.DualWeightTable({a: code.dual_weight(ctx, k1, a, k2 if a else None)
                               for a in p.elements()})
    rep.add("dual weights: formula = enumeration",
            all(dw[a] == code.dual_weight_direct(ctx, a) for a in p.elements()))
    rep.add("a -> c(a) injective (w(c(a)) > 0 for a != 0)",
            all(dw[a] > 0 for a in p.nonzero()))

    if r <= FULL_DISTRIBUTION_MAX_R:
        wd = code.weight_distribution_transform(ctx, dw, threads=threads)
    else:
        wd = code.weight_distribution_transform(ctx, dw, max_weight=h_max, threads=threads)
    if r <= DP_MAX_R:
        dp_cap = None if r <= 3 else h_max
        wd_dp = code.weight_distribution_dp(ctx, max_weight=dp_cap)
        J = wd_dp.max_weight
        rep.add("weight distribution: DP = transform", wd_dp.freqs == wd.freqs[: J + 1],
                f"C_0..C_{J}")
    rep.add("C_0 = 1, C_1 = n(0)", wd[0] == 1 and wd[1] == fib_direct[0])
    if wd.complete:
        N = ctx.N
        rep.add("sum C_j = 2^(N-r)", wd.total() == 2 ** (N - r))
        rep.add("C_j = C_(N-j)", wd.is_symmetric() and wd[N] == 1)
        rep.add("sum j C_j = N 2^(N-r-1)", wd.first_moment() == N * 2 ** (N - r - 1))

    mk2_direct = [kloosterman.power_moment(k2, h) for h in range(h_max + 1)]
    mk_direct = [kloosterman.power_moment(k1, 2 * h) for h in range(h_max + 1)]
    rep.add("MK^(2h) = sum C(h,l) q^(h-l) MK_2^l",
            moments.even_moments_from_mk2(q, mk2_direct) == mk_direct)

    base2 = q**3 - 2 * q * q - q + 1
    base1 = q**3 - 2 * q * q + 1
    hook_ok = True
    pless_ok = []
    for h in range(h_max + 1):
        lhs, rhs = moments.pless_both_sides(ctx, dw, wd, h)
        pless_ok.append(lhs == rhs)
        if h >= 1:
            via_mk2 = sum((-1) ** l * moments.binom(h, l) * base2 ** (h - l) * mk2_direct[l]
                          for l in range(h + 1))
            via_mk = sum((-1) ** l * moments.binom(h, l) * base1 ** (h - l) * mk_direct[l]
                         for l in range(h + 1))
            hook_ok &= lhs * 2**h == q**h * via_mk2 == q**h * via_mk
    rep.add("sum_a w(c(a))^h in terms of MK_2 and MK^2", hook_ok)
    rep.add(f"Pless identity, h = 0..{h_max}", all(pless_ok),
            "" if all(pless_ok) else f"fails at h in {[h for h, ok in enumerate(pless_ok) if not ok]}")

    gen2 = moments.generate_moments(ctx, wd, h_max, "mk2")
    gen1 = moments.generate_moments(ctx, wd, h_max, "mk_even")
    for h in range(1, h_max + 1):
        rep.records.append(MomentRecord(h, "MK_2^h", mk2_direct[h],
                                        moments.mk2_recursion(ctx, wd, h, mk2_direct), gen2[h]))
    for h in range(1, h_max + 1):
        rep.records.append(MomentRecord(h, "MK^2h", mk_direct[h],
                                        moments.mk_even_recursion(ctx, wd, h, mk_direct), gen1[h]))
    rep.seconds = time.perf_counter() - start
    return rep
