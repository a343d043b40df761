"""Brute-force oracle for tests/golden/oracle.json, written independently of
the Rust enumeration code. Run from this directory: python3 gen_oracle.py"""

import itertools
import json
from fractions import Fraction as F


def lattice(n, d, wrap):
    verts = list(itertools.product(range(n), repeat=d))
    index = {v: i for i, v in enumerate(verts)}
    nbrs = []
    for v in verts:
        out = set()
        for axis in range(d):
            for step in (-1, 1):
                c = list(v)
                c[axis] += step
                if wrap:
                    c[axis] %= n
                elif not 0 <= c[axis] < n:
                    continue
                u = index[tuple(c)]
                if u != index[v]:
                    out.add(u)
        nbrs.append(sorted(out))
    return nbrs


def bootstrap(nbrs, k):
    m = len(nbrs)

    def f(bits):
        occ = list(bits)
        changed = True
        while changed:
            changed = False
            for v in range(m):
                if not occ[v] and sum(occ[u] for u in nbrs[v]) >= k:
                    occ[v] = 1
                    changed = True
        return all(occ)

    return m, f


def majority(m):
    return m, lambda bits: 2 * sum(bits) > m


def tribes(k):
    t = 2 ** k
    return k * t, lambda bits: any(all(bits[i * k:(i + 1) * k]) for i in range(t))


def weight(bits, p):
    w = F(1)
    for b in bits:
        w *= p if b else 1 - p
    return w


def success(fn, p):
    m, f = fn
    return sum(weight(b, p) for b in itertools.product((0, 1), repeat=m) if f(b))


def influences(fn, p):
    m, f = fn
    out = [F(0)] * m
    for b in itertools.product((0, 1), repeat=m):
        w = weight(b, p)
        val = f(b)
        for i in range(m):
            c = list(b)
            c[i] ^= 1
            if f(tuple(c)) != val:
                out[i] += w
    return out


def noise_corr(fn, p, eps):
    m, f = fn
    configs = list(itertools.product((0, 1), repeat=m))
    val = {b: 1 if f(b) else -1 for b in configs}
    wt = {b: weight(b, p) for b in configs}
    mean = sum(wt[b] * val[b] for b in configs)

    def kern(a, b):
        pb = p if b else 1 - p
        return (1 - eps) * (a == b) + eps * pb

    joint = F(0)
    for a in configs:
        if wt[a] == 0:
            continue
        for b in configs:
            k = F(1)
            for x, y in zip(a, b):
                k *= kern(x, y)
            joint += wt[a] * val[a] * val[b] * k
    cov = joint - mean * mean
    var = 1 - mean * mean
    return cov, (cov / var if var else None)


def fmt(r):
    return f"{r.numerator}/{r.denominator}"


def key(name, quantity, **params):
    s = f"{name}|{quantity}"
    for k, v in params.items():
        s += f"|{k}={fmt(v)}"
    return s


out = {}
half, fifth = F(1, 2), F(1, 5)
subjects = {
    "bootstrap[box n=2 d=2; k=2]": bootstrap(lattice(2, 2, False), 2),
    "bootstrap[torus n=3 d=2; k=2]": bootstrap(lattice(3, 2, True), 2),
    "bootstrap[box n=3 d=2; k=2]": bootstrap(lattice(3, 2, False), 2),
    "bootstrap[cycle n=5; k=1]": bootstrap(lattice(5, 1, True), 1),
    "majority[m=3]": majority(3),
    "majority[m=5]": majority(5),
    "tribes[k=1]": tribes(1),
    "tribes[k=2]": tribes(2),
}
for name, fn in subjects.items():
    for p in (F(1, 10), F(3, 10), half):
        out[key(name, "success", p=p)] = fmt(success(fn, p))
    for p in (F(1, 5), half):
        inf = influences(fn, p)
        out[key(name, "influence_total", p=p)] = fmt(sum(inf))
        out[key(name, "influence_sum_squares", p=p)] = fmt(sum(x * x for x in inf))
        out[key(name, "influence_0", p=p)] = fmt(inf[0])
    if fn[0] <= 9:
        cov, corr = noise_corr(fn, half, half)
        out[key(name, "covariance", p=half, eps=half)] = fmt(cov)
        if corr is not None:
            out[key(name, "correlation", p=half, eps=half)] = fmt(corr)
for name, fn in (("majority[m=9]", majority(9)), ("tribes[k=2]", tribes(2))):
    cov, corr = noise_corr(fn, half, fifth)
    out[key(name, "correlation", p=half, eps=fifth)] = fmt(corr)

with open("oracle.json", "w") as fh:
    json.dump(out, fh, indent=2, sort_keys=True)
    fh.write("\n")
