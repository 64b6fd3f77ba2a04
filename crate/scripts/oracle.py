"""Independent reference computations used to generate corpus golden files.

Bracket/Jones via a direct loop count over all smoothings, and Khovanov
homology ranks via dense exact (sympy) rank of matrices built from a
cube-of-resolutions construction.
"""
import itertools, json, sys
from collections import defaultdict
import sympy

def components(pd):
    # arcs adjacent along strands: a~c, b~d
    parent = {}
    def f(x):
        while parent.setdefault(x, x) != x:
            x = parent[x]
        return x
    for a, b, c, d in pd:
        parent[f(a)] = f(c); parent[f(b)] = f(d)
    comps = defaultdict(set)
    for x in list(parent):
        comps[f(x)].add(x)
    return sorted((sorted(s) for s in comps.values()), key=lambda s: s[0])

def loops(pd, bits, free):
    # nodes (crossing, slot); arcs join slots with equal labels
    n = 4 * len(pd)
    parent = list(range(n))
    def f(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]; x = parent[x]
        return x
    def u(x, y): parent[f(x)] = f(y)
    where = defaultdict(list)
    for k, cr in enumerate(pd):
        for s, lab in enumerate(cr):
            where[lab].append(4 * k + s)
    for lab, occ in where.items():
        u(occ[0], occ[1])
    for k in range(len(pd)):
        if bits[k] == 0:
            u(4*k, 4*k+1); u(4*k+2, 4*k+3)
        else:
            u(4*k, 4*k+3); u(4*k+1, 4*k+2)
    roots = sorted({f(x) for x in range(n)}, key=lambda r: min(x for x in range(n) if f(x) == r))
    lid = {r: i for i, r in enumerate(roots)}
    return [lid[f(x)] for x in range(n)], len(roots) + free

def padd(p, e, c):
    p[e] = p.get(e, 0) + c
    if p[e] == 0: del p[e]

def pmul(p, r):
    out = {}
    for e1, c1 in p.items():
        for e2, c2 in r.items():
            padd(out, e1 + e2, c1 * c2)
    return out

def bracket_A(pd, free):
    c = len(pd)
    delta = {2: -1, -2: -1}
    out = {}
    for bits in itertools.product([0, 1], repeat=c):
        _, nl = loops(pd, bits, free)
        term = {bits.count(0) - bits.count(1): 1}
        for _ in range(nl):
            term = pmul(term, delta)
        for e, co in term.items():
            padd(out, e, co)
    return out

def over_incoming(pd):
    """For each crossing, True if the over strand enters at slot b (b -> d)."""
    comps = components(pd)
    nxt = {}
    for comp in comps:
        for i, x in enumerate(comp):
            nxt[x] = comp[(i + 1) % len(comp)]
    # slots where each arc ends (incoming) when known from under strands
    ends_at_a = {cr[0] for cr in pd}
    starts_at_c = {cr[2] for cr in pd}
    out = []
    for a, b, c, d in pd:
        fwd = nxt[b] == d and nxt[d] != b
        bwd = nxt[d] == b and nxt[b] != d
        if fwd or bwd:
            out.append(fwd)
        elif b in ends_at_a or d in starts_at_c:
            out.append(False)  # b starts here, so d is incoming
        elif d in ends_at_a or b in starts_at_c:
            out.append(True)
        else:
            out.append(True)
    return out

def writhe(pd):
    # positive iff the over strand runs d -> b
    return sum(-1 if f else 1 for f in over_incoming(pd))

def pdiv(p, dv):
    p = dict(p); q = {}
    dmax = max(dv)
    while p:
        e = max(p)
        co, r = divmod(p[e], dv[dmax])
        assert r == 0
        q[e - dmax] = co
        for e2, c2 in dv.items():
            padd(p, e - dmax + e2, -co * c2)
    return q

def f_poly(pd, free):
    br = bracket_A(pd, free)
    w = writhe(pd)
    br = pdiv(br, {2: -1, -2: -1})
    fac = {3 * -w: (-1) ** (w % 2)}
    return pmul(br, fac)

def jones(pd, free):
    f = f_poly(pd, free)
    return {-e: c for e, c in f.items()}  # tQuarter exponents

def fmt(p, var="t", div=4):
    return " + ".join(f"{c}*{var}^{sympy.Rational(e, div)}" for e, c in sorted(p.items()))

def enhanced(pd, free):
    c = len(pd)
    states = []
    for bits in itertools.product([0, 1], repeat=c):
        lid, nl = loops(pd, bits, free)
        for labels in itertools.product([1, -1], repeat=nl):
            i = sum(bits)
            states.append((bits, labels, i, i + sum(labels), lid))
    return states

def khovanov(pd, free):
    """Ranks of H^{i,j} over Q, plus invariant factors via sympy SNF."""
    c = len(pd)
    states = enhanced(pd, free)
    idx = {(s[0], s[1]): n for n, s in enumerate(states)}
    loopcache = {}
    def lp(bits):
        if bits not in loopcache:
            loopcache[bits] = loops(pd, bits, free)
        return loopcache[bits]
    entries = defaultdict(int)
    for n, (bits, labels, i, j, lid) in enumerate(states):
        for k in range(c):
            if bits[k]:
                continue
            sign = (-1) ** sum(bits[:k])
            nb = bits[:k] + (1,) + bits[k+1:]
            nlid, nn = lp(nb)
            # map loops: for each new loop, collect old loops touching it
            old_of_new = defaultdict(set)
            for x in range(4 * c):
                old_of_new[nlid[x]].add(lid[x])
            ncross = len(set(nlid)) if c else 0
            la, lb = lid[4*k], lid[4*k+2]
            if la != lb:
                # merge
                m = labels[la] * 0
                if labels[la] == 1 and labels[lb] == 1: m = 1
                elif labels[la] == -1 and labels[lb] == -1: continue
                else: m = -1
                newl = []
                for L in range(nn):
                    if L >= ncross:
                        newl.append(labels[L - ncross + (len(labels) - free)])
                    else:
                        olds = old_of_new[L]
                        newl.append(m if la in olds else labels[next(iter(olds))])
                entries[(n, idx[(nb, tuple(newl))])] += sign
            else:
                L1, L2 = nlid[4*k], nlid[4*k+1]
                assert L1 != L2
                if labels[la] == 1:
                    opts = [(1, -1), (-1, 1)]
                else:
                    opts = [(-1, -1)]
                for v1, v2 in opts:
                    newl = []
                    for L in range(nn):
                        if L >= ncross:
                            newl.append(labels[L - ncross + (len(labels) - free)])
                        elif L == L1: newl.append(v1)
                        elif L == L2: newl.append(v2)
                        else:
                            newl.append(labels[next(iter(old_of_new[L]))])
                    entries[(n, idx[(nb, tuple(newl))])] += sign
    byij = defaultdict(list)
    for n, s in enumerate(states):
        byij[(s[2], s[3])].append(n)
    pos = {}
    for key, lst in byij.items():
        for p, n in enumerate(lst):
            pos[n] = p
    def mat(i, j):
        src = byij.get((i, j), []); dst = byij.get((i + 1, j), [])
        M = sympy.zeros(len(dst), len(src))
        for (a, b), v in entries.items():
            if v and states[a][2] == i and states[a][3] == j:
                M[pos[b], pos[a]] += v
        return M
    rows = []
    js = sorted({k[1] for k in byij})
    for j in js:
        for i in range(0, c + 1):
            dim = len(byij.get((i, j), []))
            if dim == 0:
                continue
            out = mat(i, j); inc = mat(i - 1, j)
            rk_out = out.rank() if out.shape[0] and out.shape[1] else 0
            rk_in = inc.rank() if inc.shape[0] and inc.shape[1] else 0
            betti = dim - rk_out - rk_in
            tors = []
            if inc.shape[0] and inc.shape[1]:
                from sympy.matrices.normalforms import smith_normal_form
                snf = smith_normal_form(inc, domain=sympy.ZZ)
                for t in range(min(snf.shape)):
                    v = abs(snf[t, t])
                    if v > 1:
                        tors.append(int(v))
            if betti or tors:
                rows.append({"i": i, "j": j, "betti": int(betti), "torsion": sorted(tors)})
    rows.sort(key=lambda r: (r["i"], r["j"]))
    return rows

if __name__ == "__main__":
    path = sys.argv[1]
    d = json.load(open(path))
    pd = [tuple(x) for x in d["crossings"]]
    free = d["freeLoops"]
    cmd = sys.argv[2] if len(sys.argv) > 2 else "jones"
    if cmd == "jones":
        print("writhe", writhe(pd))
        print("bracketA", sorted(bracket_A(pd, free).items()))
        print("jones", fmt(jones(pd, free)))
    elif cmd == "khovanov":
        print(json.dumps({"rows": khovanov(pd, free)}))
