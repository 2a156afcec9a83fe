"""Independent reference values frozen into the C++ tests.

Run with python3; prints every value the tests pin. Nothing here imports the
library under test.
"""
import itertools
import math

from scipy import special, stats

M64 = (1 << 64) - 1


def splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & M64
    return x ^ (x >> 31)


def fnv1a(data: bytes):
    h = 0xCBF29CE484222325
    for c in data:
        h ^= c
        h = (h * 0x100000001B3) & M64
    return h


class MT19937_64:
    def __init__(self, seed):
        self.mt = [0] * 312
        self.mt[0] = seed & M64
        for i in range(1, 312):
            prev = self.mt[i - 1]
            self.mt[i] = (6364136223846793005 * (prev ^ (prev >> 62)) + i) & M64
        self.index = 312

    def twist(self):
        upper, lower = 0xFFFFFFFF80000000, 0x7FFFFFFF
        for i in range(312):
            x = (self.mt[i] & upper) | (self.mt[(i + 1) % 312] & lower)
            xa = x >> 1
            if x & 1:
                xa ^= 0xB5026F5AA96619E9
            self.mt[i] = self.mt[(i + 156) % 312] ^ xa
        self.index = 0

    def next(self):
        if self.index >= 312:
            self.twist()
        y = self.mt[self.index]
        self.index += 1
        y ^= (y >> 29) & 0x5555555555555555
        y ^= (y << 17) & 0x71D67FFFEDA60000
        y ^= (y << 37) & 0xFFF7EEE000000000
        y ^= y >> 43
        return y & M64


def derive_seed(master, path):
    h = splitmix64(master)
    for label, index in path:
        h = splitmix64(h ^ fnv1a(label.encode()))
        h = splitmix64(h ^ index)
    return h


def main():
    print("mt19937_64 default seed, 10000th:", end=" ")
    eng = MT19937_64(5489)
    for _ in range(9999):
        eng.next()
    print(eng.next())

    for master, path in [(42, []), (42, [("boot", 3)]), (7, [("rep", 0), ("data", 0)])]:
        eng = MT19937_64(derive_seed(master, path))
        print("stream", master, path, "first outputs:", eng.next(), eng.next())
        eng = MT19937_64(derive_seed(master, path))
        u = ((eng.next() >> 11) + 0.5) * 2.0**-53
        print("  first uniform:", repr(u))

    print("C(1000,3) =", math.comb(1000, 3))
    pascal = [[1]]
    for n in range(1, 1001):
        row = [1] * (n + 1)
        for k in range(1, n):
            row[k] = pascal[-1][k - 1] + pascal[-1][k]
        pascal.append(row)
    print("  Pascal cross-check:", pascal[1000][3])
    print("C(100,50) =", math.comb(100, 50))
    print("C(1000000,7) =", math.comb(10**6, 7), "fits 128 bits:", math.comb(10**6, 7) < 2**128)
    print("C(300,3) =", math.comb(300, 3), "C(299,2) =", math.comb(299, 2))

    tuples = list(itertools.combinations(range(5), 3))
    print("lex tuples of I_{5,3}:", tuples[0], tuples[4], tuples[9])
    tuples = list(itertools.combinations(range(10), 4))
    print("I_{10,4} rank 100:", tuples[100], "rank 177:", tuples[177])

    print("product kernel n=4:", sum(a * b for a, b in itertools.combinations([1, 2, 3, 4], 2)) / 6)
    vals = [2, 3, 4, 5, 6]
    print("jackknife n=6 r=3 i1=1:", sum(a * b for a, b in itertools.combinations(vals, 2)) / 10)

    df, ncp = 3, 2
    print("noncentral t mean:", ncp * math.sqrt(df / 2) * special.gamma((df - 1) / 2) / special.gamma(df / 2),
          "scipy:", stats.nct.mean(df, ncp))
    print("gaussian Spearman a=0.9:", 6 / math.pi * math.asin(0.45))

    # floor(c n^(a/b)) by exact integer search
    def budget(c, n, a, b):
        m = int(c * n ** (a / b))
        while (m + 1) ** b <= c**b * n**a:
            m += 1
        while m**b > c**b * n**a:
            m -= 1
        return m

    print("budget 2n@300:", budget(2, 300, 1, 1), "n^4/3@300:", budget(1, 300, 4, 3),
          "4n^3/2@300:", budget(4, 300, 3, 2), "n^4/3@1000:", budget(1, 1000, 4, 3))
    print("Bernstein envelope at t=3, N=50:", math.sqrt(2 * 3 / 50) + 2 * 3 / (3 * 50), "2e^-3:", 2 * math.exp(-3))

    # Kendall / Spearman / BD / D hand cases
    def sign(x):
        return (x > 0) - (x < 0)

    print("kendall (1,2),(2,1):", sign(1 - 2) * sign(2 - 1))
    xs = [(1, 1), (2, 2), (3, 3)]
    sp = 0.5 * sum(sign(xs[p[0]][0] - xs[p[1]][0]) * sign(xs[p[0]][1] - xs[p[2]][1])
                   for p in itertools.permutations(range(3)))
    print("spearman diag:", sp)

    def bd_phi(y1, y2, y3, y4):
        return ((max(y1, y3) < min(y2, y4)) + (min(y1, y3) > max(y2, y4))
                - (max(y1, y2) < min(y3, y4)) - (min(y1, y2) > max(y3, y4)))

    def d_phi(y1, y2, y3, y4, y5):
        return ((y1 >= y2) - (y1 >= y3)) * ((y1 >= y4) - (y1 >= y5)) / 4

    print("bd phi(1,2,3,4):", bd_phi(1, 2, 3, 4), "d phi(3,1,5,2,4):", d_phi(3, 1, 5, 2, 4))
    obs = [(0.3, 1.2, -0.5), (1.1, -0.7, 0.2), (-0.4, 0.9, 1.5), (0.8, 0.1, -1.3), (2.0, -0.2, 0.6)]

    def bd_kernel(o, j, k):
        return sum(bd_phi(*[o[p][j] for p in perm]) * bd_phi(*[o[p][k] for p in perm])
                   for perm in itertools.permutations(range(4))) / 24

    def d_kernel(o, j, k):
        return sum(d_phi(*[o[p][j] for p in perm]) * d_phi(*[o[p][k] for p in perm])
                   for perm in itertools.permutations(range(5))) / 120

    def sp_kernel(o, j, k):
        return 0.5 * sum(sign(o[p[0]][j] - o[p[1]][j]) * sign(o[p[0]][k] - o[p[2]][k])
                         for p in itertools.permutations(range(3)))

    pairs = [(0, 1), (0, 2), (1, 2)]
    print("spearman on obs[:3]:", [sp_kernel(obs[:3], j, k) for j, k in pairs])
    print("bd on obs[:4]:", [bd_kernel(obs[:4], j, k) for j, k in pairs])
    print("hoeffding on obs:", [d_kernel(obs, j, k) for j, k in pairs])

    # complete Kendall U-statistic over a small fixed sample
    data = [(0.3, 1.2, -0.5), (1.1, -0.7, 0.2), (-0.4, 0.9, 1.5), (0.8, 0.1, -1.3), (2.0, -0.2, 0.6),
            (-1.0, 0.4, 0.0), (0.5, 2.2, -0.8)]
    ken = [sum(sign(a[j] - b[j]) * sign(a[k] - b[k]) for a, b in itertools.combinations(data, 2))
           / math.comb(len(data), 2) for j, k in pairs]
    print("complete kendall on 7x3 sample:", ken)
    print("FNV-1a of '1,2\\n3,4\\n':", format(fnv1a(b"1,2\n3,4\n"), "016x"))


if __name__ == "__main__":
    main()
