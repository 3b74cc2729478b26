#!/usr/bin/env python3
"""Independent reference computations for the frozen test values.

Everything here runs whole tapes from scratch with a naive interpreter and
exact Fractions; nothing is shared with the C++ headers. Run it to regenerate
tests/frozen_values.hpp:

    python3 tests/oracle/oracle.py > tests/frozen_values.hpp
"""

import itertools
import math
from fractions import Fraction as F
from functools import lru_cache

HALT, EMIT0, EMIT1, RDC, DUP, SKC, BRE, ABT = range(8)
PREFIX, MONOTONE, TWICE, LENAWARE = "Prefix", "Monotone", "TwicePrefix", "CondLengthAware"


def run(kind, tape, cond=None, steps=10000, maxout=10000, observe=None):
    """Returns (status, out, consumed_bits, k, steps)."""
    out, k, used, pos, skip = "", 0, 0, 0, False
    while pos + 3 <= len(tape):
        op = int(tape[pos:pos + 3], 2)
        pos += 3
        if skip:
            skip = False
            if observe:
                observe(pos, out)
            continue
        if op == ABT:
            return ("Aborted", out, pos, k, used)
        if op == HALT:
            if used + 1 > steps:
                return ("StepLimit", out, pos, k, used)
            return ("Halted", out, pos, k, used + 1)
        if op in (EMIT0, EMIT1):
            if used + 1 > steps:
                return ("StepLimit", out, pos, k, used)
            used += 1
            if len(out) + 1 > maxout:
                return ("OutputLimit", out, pos, k, used)
            out += "0" if op == EMIT0 else "1"
        elif op in (RDC, SKC):
            if kind in (PREFIX, MONOTONE):
                return ("Aborted", out, pos, k, used)
            if k >= len(cond):
                return ("CondExhausted", out, pos, k, used)
            if used + 1 > steps:
                return ("StepLimit", out, pos, k, used)
            used += 1
            c = cond[k]
            k += 1
            if op == RDC:
                if len(out) + 1 > maxout:
                    return ("OutputLimit", out, pos, k, used)
                out += c
        elif op == DUP:
            cost = max(1, len(out))
            if used + cost > steps:
                return ("StepLimit", out, pos, k, used)
            used += cost
            if 2 * len(out) > maxout:
                return ("OutputLimit", out, pos, k, used)
            out = out + out
        elif op == BRE:
            if kind != LENAWARE:
                return ("Aborted", out, pos, k, used)
            if used + 1 > steps:
                return ("StepLimit", out, pos, k, used)
            used += 1
            if k == len(cond):
                skip = True
        if observe:
            observe(pos, out)
    return ("ProgramExhausted", out, pos, k, used)


def tapes(L):
    n = L // 3
    for ops in itertools.product(range(8), repeat=n):
        yield "".join(format(o, "03b") for o in ops)


@lru_cache(maxsize=None)
def witnesses(kind, cond, L, S=10000):
    found = {}
    for t in tapes(L):
        st, out, used, k, steps = run(kind, t, cond, S)
        if st == "Halted":
            found[t[:used]] = (out, k, steps)
    return found


def shortest(kind, cond, y, L, S=10000):
    best = None
    for p, (out, _, _) in witnesses(kind, cond, L, S).items():
        if out == y and (best is None or len(p) < best):
            best = len(p)
    return best


def K(y, L, S=10000):
    return shortest(PREFIX, None, y, L, S)


def Kcond(y, x, L, S=10000):
    return shortest(LENAWARE, x, y, L, S)


def Kstar(y, x, L, S=10000):
    return shortest(TWICE, x, y, L, S)


def zigzag_code(n):
    z = 2 * n if n >= 0 else -2 * n - 1
    return bin(z)[2:]


@lru_cache(maxsize=None)
def monotone_prefixes(L, depth, S=10000):
    """x -> set of minimal consumed prefixes covering x, for len(x) <= depth."""
    cover = {}
    for t in tapes(L):
        seen = [0]

        def obs(pos, out, t=t, seen=seen):
            for j in range(seen[0] + 1, min(len(out), depth) + 1):
                cover.setdefault(out[:j], set()).add(t[:pos])
            seen[0] = max(seen[0], min(len(out), depth))

        run(MONOTONE, t, None, S, observe=obs)
    return cover


def M(x, L, depth=None, S=10000):
    if x == "":
        return F(1)
    depth = max(depth or 0, len(x))
    return sum((F(1, 2 ** len(q)) for q in monotone_prefixes(L, depth, S).get(x, ())), F(0))


def Km(x, L, S=10000):
    if x == "":
        return 0
    qs = monotone_prefixes(L, len(x), S).get(x)
    return min(len(q) for q in qs) if qs else None


# --- measures -----------------------------------------------------------------

def m_uniform(a):
    return lambda x: F(1, a ** len(x))


def m_iid(p):
    def f(x):
        r = F(1)
        for c in x:
            r *= p[int(c, 16)]
        return r
    return f


def m_markov1(table):
    def f(x):
        r, ctx = F(1), 0
        for c in x:
            s = int(c, 16)
            r *= table[ctx][s]
            ctx = s
        return r
    return f


def m_lemma5(l):
    return lambda x: F(1) if all(c == ("0" if i < l else "1") for i, c in enumerate(x)) else F(0)


def m_det(cycle, prefix=""):
    def f(x):
        for i, c in enumerate(x):
            want = prefix[i] if i < len(prefix) else cycle[(i - len(prefix)) % len(cycle)]
            if c != want:
                return F(0)
        return F(1)
    return f


def enc(x, a):
    if a == 2:
        return x
    w = (a - 1).bit_length()
    return "".join(format(int(c, 16), "0%db" % w) for c in x)


class Xi:
    def __init__(self, measures, alphabet, L, depth):
        self.ms, self.a, self.L, self.depth = measures, alphabet, L, depth
        self.k = [K(zigzag_code(i), L) for i in range(len(measures))]
        self.w = [F(1, 2 ** k) if k is not None else F(0) for k in self.k]

    def __call__(self, x):
        mm = M(enc(x, self.a), self.L, self.depth)
        return mm / 2 + sum((w * m(x) for w, m in zip(self.w, self.ms)), F(0)) / 2


# --- output helpers -----------------------------------------------------------

def frac(q):
    return 'Rational("%s")' % q


def opt(v):
    return "std::nullopt" if v is None else "std::size_t{%d}" % v


def main():
    lines = ["#pragma once", "", "// Generated by tests/oracle/oracle.py; do not edit by hand.", "",
             "#include \"mclab/types.hpp\"", "", "#include <optional>", "#include <string>",
             "#include <vector>", "", "namespace frozen {", "", "using mclab::Rational;", ""]
    emit = lines.append

    # enumeration
    w3 = sorted(witnesses(PREFIX, None, 3, 100).items())
    w6 = sorted(witnesses(PREFIX, None, 6, 100).items(), key=lambda kv: (len(kv[0]), kv[0]))
    emit("// Prefix witnesses at L=6, S=100: program -> output")
    emit("inline const std::vector<std::pair<std::string, std::string>> kPrefixL6 = {%s};" %
         ", ".join('{"%s", "%s"}' % (p, o[0]) for p, o in w6))
    emit("inline const std::size_t kPrefixL3Count = %d;" % len(w3))
    emit("inline const Rational kKraftL6 = %s;" % frac(sum(F(1, 2 ** len(p)) for p, _ in w6)))
    for L in (9, 12, 18):
        for kind, cond in ((PREFIX, None), (TWICE, "0"), (TWICE, "10"), (LENAWARE, "10")):
            ws = witnesses(kind, cond, L)
            name = "k%s%sL%d" % (kind, "" if cond is None else "C" + cond, L)
            emit("inline const std::size_t %sCount = %d;" % (name, len(ws)))
            emit("inline const Rational %sKraft = %s;" % (name, frac(sum(F(1, 2 ** len(p)) for p in ws))))
    emit("")

    # complexity
    emit("inline const std::size_t kKEmptyL6 = %d;" % K("", 6, 100))
    emit("inline const std::size_t kK0L6 = %d;" % K("0", 6, 100))
    emit("inline const std::size_t kKm0L6 = %d;" % Km("0", 6, 100))
    emit("inline const std::size_t kKm0000L9 = %d;" % Km("0000", 9, 100))
    for x in ("0", "00", "01", "1"):
        emit("inline const Rational kM%sL6 = %s;" % (x, frac(M(x, 6))))
    for x in ("0", "01", "0000", "1010", "111"):
        emit("inline const Rational kM%sL12 = %s;" % (x, frac(M(x, 12, 8))))
        emit("inline const std::optional<std::size_t> kKm%sL12 = %s;" % (x, opt(Km(x, 12))))
    for y in ("", "0", "1", "00", "10", "0000", "11111111"):
        emit('inline const std::optional<std::size_t> kK_%sL15 = %s;' % (y or "eps", opt(K(y, 15))))
    for y, x in (("0", "0"), ("00", "0"), ("1", "10"), ("10", "10")):
        emit('inline const std::optional<std::size_t> kKcond_%s_%sL12 = %s;' % (y, x, opt(Kcond(y, x, 12))))
    emit("")

    # kstar
    emit("inline const std::size_t kKstar10_10L9 = %d;" % Kstar("10", "10", 9, 100))
    emit("inline const std::vector<std::optional<std::size_t>> kProfile0_01L9 = {%s};" %
         ", ".join(opt(Kstar("0", "01"[:l], 9)) for l in range(3)))
    emit("inline const std::optional<std::size_t> kKstar0_0L9 = %s;" % opt(Kstar("0", "0", 9)))
    emit("inline const std::optional<std::size_t> kKcond0_epsL9 = %s;" % opt(Kcond("0", "", 9)))
    emit("inline const std::optional<std::size_t> kKstar0_epsL9 = %s;" % opt(Kstar("0", "", 9)))
    emit("inline const std::optional<std::size_t> kK0L9 = %s;" % opt(K("0", 9)))
    emit("")

    # bounds: D example, 2 KL((1/4,3/4),(1/2,1/2))
    kl = 0.25 * math.log(0.25 / 0.5) + 0.75 * math.log(0.75 / 0.5)
    emit("inline const double kTwoKL = %.17g;" % (2 * kl))

    # eq4 on alpha = 1^10 with registry {Det(1^inf), Uniform}
    xi = Xi([m_det("1"), m_uniform(2)], 2, 18, 12)
    alpha = "1" * 10
    gap, neglog = 0.0, 0.0
    for t in range(1, 11):
        a = xi(alpha[:t]) / xi(alpha[:t - 1])
        gap += 1 - float(a)
        neglog += -math.log(float(a))
    emit("inline const Rational kXiOnes10 = %s;" % frac(xi(alpha)))
    emit("inline const Rational kXiEmptyOnes = %s;" % frac(xi("")))
    emit("inline const double kChainGap = %.17g;" % gap)
    emit("inline const double kChainNegLog = %.17g;" % neglog)
    emit("inline const double kChainNegLogTotal = %.17g;" % -math.log(float(xi(alpha))))

    # deficiency: mu = Uniform, registry {Uniform}, x = "00"
    xu = Xi([m_uniform(2)], 2, 18, 12)
    emit("inline const Rational kXiUniform00 = %s;" % frac(xu("00")))
    emit("inline const std::size_t kKCode0L18 = %d;" % xu.k[0])

    # lemma5 instances: registry {Uniform} plus Lemma5(l)
    for l in (2, 4, 6):
        xl = Xi([m_uniform(2), m_lemma5(l)], 2, 18, max(l + 1, 12))
        x = "0" * l
        emit("inline const Rational kLemma5XiOne_%d = %s;" % (l, frac(xl(x + "1") / xl(x))))
        emit("inline const Rational kLemma5Ratio_%d = %s;" % (l, frac(xl(x) / 1)))
        emit("inline const std::optional<std::size_t> kLemma5KCodeGivenX_%d = %s;" %
             (l, opt(Kcond(zigzag_code(1), x, 18))))

    # T1 on the repeat-first-symbol family: registry {Uniform, repeat-0, repeat-1}
    xr = Xi([m_uniform(2), m_det("0"), m_det("1")], 2, 18, 12)
    x, y = "1", "11111"
    emit("inline const Rational kT1Ratio = %s;" % frac(xr(x) / xr(x + y)))
    emit("inline const std::optional<std::size_t> kT1KCodeGivenX = %s;" % opt(Kcond(zigzag_code(2), x, 18)))
    emit("inline const std::optional<std::size_t> kT1KLen = %s;" % opt(K(zigzag_code(1), 18)))

    # T7 vs T1 for alpha = (0^n 1)^inf, x = 0^n 1: registry {Uniform, Det(0^n1)}
    for n in (3, 5):
        cyc = "0" * n + "1"
        xt = Xi([m_uniform(2), m_det(cyc)], 2, 18, 12)
        code = zigzag_code(1)
        d = xt(cyc) / 1
        ceil_d = math.ceil(math.log2(d)) if d != 0 else None
        # exact ceiling of log2 of a rational
        m = 0
        while F(2) ** m < d:
            m += 1
        while F(2) ** (m - 1) >= d:
            m -= 1
        emit("inline const long kT7CeilD_%d = %d;" % (n, m))
        emit("inline const std::optional<std::size_t> kT7Kstar_%d = %s;" % (n, opt(Kstar(code, cyc, 18))))
        emit("inline const std::optional<std::size_t> kT7KCeilD_%d = %s;" % (n, opt(K(zigzag_code(m), 18))))
        emit("inline const std::optional<std::size_t> kT1KCodeGivenX_%d = %s;" % (n, opt(Kcond(code, cyc, 18))))
        emit("inline const std::optional<std::size_t> kT1KLen_%d = %s;" % (n, opt(K(zigzag_code(n + 1), 18))))
    emit("")

    # nu construction at L=12
    nu_L = 12
    words4 = ["".join(w) for n in range(5) for w in itertools.product("01", repeat=n)]

    def nu_block(tag, ms):
        xn = Xi(ms, 2, nu_L, 12)
        codes = [zigzag_code(i) for i in range(len(ms))]

        @lru_cache(maxsize=None)
        def level_mass(t, n):
            return sum((ms[t]("".join(v)) for v in itertools.product("01", repeat=n)), F(0))

        def member(z, d, t):
            s = level_mass(t, len(z)) - ms[t](z) + F(2) ** (-d) * xn(z) > 1
            assert s == (ms[t](z) < F(2) ** (-d) * xn(z))
            return s

        def lam(z, t, d):
            best = None
            for k in range(len(z) + 1):
                if member(z[:k], d, t):
                    v = Kstar(codes[t], z[:k], nu_L)
                    if v is not None and (best is None or v < best):
                        best = v
            return F(1, 2 ** best) if best is not None else F(0)

        @lru_cache(maxsize=None)
        def tilde(z, d):
            return sum((lam(z, t, d) * F(2) ** d * ms[t](z) for t in range(len(ms))), F(0))

        @lru_cache(maxsize=None)
        def fix(z, d, depth):
            v = tilde(z, d)
            if len(z) < depth:
                v = max(v, fix(z + "0", d, depth) + fix(z + "1", d, depth))
            return v

        def nu_total(z, depth=4):
            s = F(0)
            for d in range(-8, 9):
                kd = K(zigzag_code(d), nu_L)
                if kd is not None:
                    s += F(1, 2 ** kd) * fix(z, d, depth)
            return s

        for t in range(len(ms)):
            for d in (0, 1, 2):
                bits = "".join("1" if member(z, d, t) else "0" for z in words4)
                emit('inline const std::string k%sMember%d_d%d = "%s";  // shortlex, length <= 4' % (tag, t, d, bits))
        emit("inline const Rational k%sLambda0_0110_d1 = %s;" % (tag, frac(lam("0110", 0, 1))))
        emit("inline const Rational k%sLambda0_0000_dm2 = %s;" % (tag, frac(lam("0000", 0, -2))))
        emit("inline const Rational k%sLambda1_0000_d2 = %s;" % (tag, frac(lam("0000", 1, 2))))
        for d in (0, 2, -2):
            emit("inline const std::vector<Rational> k%sNuTilde_d%s = {%s};  // shortlex, length <= 4" %
                 (tag, str(d).replace("-", "m"), ", ".join(frac(tilde(z, d)) for z in words4)))
            emit("inline const Rational k%sNuRoot_d%s = %s;" % (tag, str(d).replace("-", "m"), frac(fix("", d, 4))))
        best = max((nu_total(z) / xn(z), z) for z in words4 if xn(z) != 0)
        emit("inline const Rational k%sNuMaxRatioDepth4 = %s;" % (tag, frac(best[0])))
        emit("inline const Rational k%sNuTotalRootDepth4 = %s;" % (tag, frac(nu_total(""))))
        emit("")

    nu_block("Balanced", [m_uniform(2), m_iid([F(1, 4), F(3, 4)]), m_lemma5(3)])
    nu_block("Skewed", [m_uniform(2), m_iid([F(1, 16), F(15, 16)]), m_lemma5(3)])

    # 16-ary repeat family plus Uniform, mu = repeat-c, one observed symbol.
    a, L16, n = 16, 21, 3
    regs = [m_uniform(16)] + [m_det(format(c, "x")) for c in range(16)]
    ks = [K(zigzag_code(i), L16) for i in range(len(regs))]
    ws = [F(1, 2 ** k) if k is not None else F(0) for k in ks]
    for c in (0, 5):
        mc = M(enc(format(c, "x"), 16), L16, 4)
        w_c, w_u = ws[c + 1], ws[0]
        num = mc / 2 + (w_c + w_u / 16) / 2
        den = w_c / 2 + w_u * F(1, 16 ** n) / 2
        emit("inline const double kPosteriorOracle_c%d = %.17g;  // n = %d" % (c, math.log(num / den), n))
    emit("inline const std::vector<std::optional<std::size_t>> kCodeK16 = {%s};" % ", ".join(opt(k) for k in ks))

    emit("")
    emit("}  // namespace frozen")
    print("\n".join(lines))


if __name__ == "__main__":
    main()
