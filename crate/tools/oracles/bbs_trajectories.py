"""Schoolbook reference trajectories for small Blum moduli."""


def trajectory(p, q, s, steps):
    n = p * q
    x = s * s % n
    states, bits = [x], []
    for _ in range(steps):
        x = x * x % n
        states.append(x)
        bits.append(x & 1)
    return states, bits


if __name__ == "__main__":
    for p, q, s in ((7, 11, 3), (499, 547, 123), (40423, 65519, 99991), (1019, 1031, 5)):
        st, b = trajectory(p, q, s, 24)
        print(p, q, s)
        print("  states", st[:8])
        print("  bits  ", "".join(map(str, b)))
