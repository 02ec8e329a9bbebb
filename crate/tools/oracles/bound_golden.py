"""High-precision reference values for the concrete security bound."""
from mpmath import mp, mpf, log, exp, cbrt

mp.dps = 60


def gnfs(n, literal):
    nl2 = n * log(2)
    b = cbrt(log(nl2)) ** 2
    a = n * cbrt(log(2)) if literal else cbrt(nl2)
    return mpf("2.8e-3") * exp(mpf("1.9229") * a * b)


def t_max(n, m, eps, literal):
    L = gnfs(n, literal)
    lg = log(n, 2)
    first = L / (6 * n * lg * eps ** -2 * m ** 2)
    second = 2 ** 7 * n * eps ** -2 * m ** 2 * log(8 * n * m / eps, 2)
    return first - second


if __name__ == "__main__":
    eps = mpf("0.2")
    for literal in (False, True):
        tag = "literal" if literal else "grouped"
        for n, m in ((900, 100), (32, 100), (512, 128), (1024, 1000)):
            print(tag, n, m, mp.nstr(gnfs(n, literal), 25), mp.nstr(t_max(n, m, eps, literal), 25))
