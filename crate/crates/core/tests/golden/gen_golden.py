#!/usr/bin/env python3
"""Reference loss tables for the default sweep grid.

Evaluated with mpmath at 40 digits, independently of the Rust code:
phi(t) directly from its definition, hybrid expectations by adaptive
tanh-sinh integration over the whole real line. Output uses the paper_txt
layout (alpha first, one column per SNR, 8 decimals).
"""
import mpmath as mp

mp.mp.dps = 40
SNR_DB = [-25, -10, -5, -2.5]
ALPHAS = [i * 0.05 for i in range(21)]  # same f64 values as the Rust grid


def q(x):
    return mp.erfc(x / mp.sqrt(2)) / 2


def phi(t):
    return mp.exp(-t * t) / (2 * mp.pi * q(t) * q(-t))


def det(alpha, snr, known):
    z = mp.mpf(10) ** (mp.mpf(snr) / 20)
    p, m = phi(alpha + z), phi(alpha - z)
    return (p + m) / 2 if known else 2 * p * m / (p + m)


def hybrid(alpha, snr, known):
    s2 = mp.mpf(10) ** (mp.mpf(snr) / 10)
    s = mp.sqrt(s2)

    def prior(z):
        return mp.exp(-z * z / (2 * s2)) / mp.sqrt(2 * mp.pi * s2)

    if known:
        f = lambda z: prior(z) / (phi(alpha + z) + phi(alpha - z))
    else:
        f = lambda z: prior(z) / phi(alpha + z)
    pts = [-mp.inf, -20 * s, -5 * s, 0, 5 * s, 20 * s, mp.inf]
    e = mp.quad(f, pts)
    return 1 / (2 * e) if known else 1 / e


def write(name, fn, known):
    with open(name, "w") as out:
        for a in ALPHAS:
            am = mp.mpf(a)
            vals = [10 * mp.log10(fn(am, snr, known)) for snr in SNR_DB]
            out.write("%.8f" % a + "".join(" %.8f" % float(v) for v in vals) + "\n")


if __name__ == "__main__":
    write("det_chi.txt", det, False)
    write("det_chi_star.txt", det, True)
    write("hybrid_chi.txt", hybrid, False)
    write("hybrid_chi_star.txt", hybrid, True)
