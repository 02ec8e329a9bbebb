"""Reference p-values for the bit-test battery, computed with scipy."""
import math

from scipy.special import erfc, gammaincc


def monobit(b):
    s = sum(2 * x - 1 for x in b)
    return erfc(abs(s) / math.sqrt(len(b)) / math.sqrt(2))


def runs(b):
    n = len(b)
    pi = sum(b) / n
    if abs(pi - 0.5) >= 2 / math.sqrt(n):
        return 0.0
    v = 1 + sum(b[i] != b[i + 1] for i in range(n - 1))
    return erfc(abs(v - 2 * n * pi * (1 - pi)) / (2 * math.sqrt(2 * n) * pi * (1 - pi)))


def psi(b, m):
    if m == 0:
        return 0.0
    n = len(b)
    c = {}
    for i in range(n):
        k = tuple(b[(i + j) % n] for j in range(m))
        c[k] = c.get(k, 0) + 1
    return 2 ** m / n * sum(v * v for v in c.values()) - n


def serial(b):
    return gammaincc(1, (psi(b, 2) - psi(b, 1)) / 2)


def longest(b):
    n = len(b)
    if n < 6272:
        m, lo, pr = 8, 1, [0.2148, 0.3672, 0.2305, 0.1875]
    elif n < 750000:
        m, lo, pr = 128, 4, [0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124]
    else:
        m, lo, pr = 10000, 10, [0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727]
    k = len(pr) - 1
    nb = n // m
    v = [0] * (k + 1)
    for i in range(nb):
        best = cur = 0
        for x in b[i * m:(i + 1) * m]:
            cur = cur + 1 if x else 0
            best = max(best, cur)
        v[min(max(best, lo), lo + k) - lo] += 1
    chi = sum((v[i] - nb * pr[i]) ** 2 / (nb * pr[i]) for i in range(k + 1))
    return gammaincc(k / 2, chi / 2)


VECTORS = {
    "nist_100": "1100100100001111110110101010001000100001011010001100001000110100110001001100011001100010100010111000",
    "nist_128": "11001100000101010110110001001100111000000000001001001101010100010001001111010110100000001101011111001100111001101101100010110010",
}

def xorshift_bits(n, state=2463534242):
    """Top bit of successive xorshift32 states."""
    out = []
    for _ in range(n):
        state ^= (state << 13) & 0xFFFFFFFF
        state ^= state >> 17
        state ^= (state << 5) & 0xFFFFFFFF
        out.append(state >> 31)
    return "".join(map(str, out))


if __name__ == "__main__":
    VECTORS["xorshift_1000"] = xorshift_bits(1000)
    VECTORS["xorshift_7000"] = xorshift_bits(7000)
    for name, s in VECTORS.items():
        b = [int(c) for c in s]
        print(name, len(b), *("%.12f" % f(b) for f in (monobit, runs, serial, longest)))
