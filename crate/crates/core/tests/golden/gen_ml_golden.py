"""Reference values for the Mittag-Leffler evaluator.

Computed with mpmath at high working precision, independently of the Rust
code paths: direct power series with enough guard digits to absorb the
cancellation when |z|^(1/rho) is moderate, and the full exponentially
accurate asymptotic expansion (algebraic tail plus every exponential branch)
otherwise. Run: python3 gen_ml_golden.py > ml_golden.csv
"""
import mpmath as mp

def series(rho, mu, z, gam=1):
    rho, mu = mp.mpf(rho), mp.mpf(mu)
    s = mp.mpc(0)
    k = 0
    small = 0
    peak = False
    last = None
    while True:
        t = mp.rf(gam, k) / mp.factorial(k) * mp.rgamma(rho * k + mu) * z ** k
        s += t
        a = abs(t)
        if last is not None and a < last:
            peak = True
        last = a if a != 0 else last
        if peak and a < mp.mpf(10) ** (-mp.mp.dps + 5) * max(1, abs(s)):
            small += 1
            if small >= 3:
                return s
        else:
            small = 0
        k += 1

def asymptotic(rho, mu, z):
    rho, mu = mp.mpf(rho), mp.mpf(mu)
    r, th = abs(z), mp.arg(z)
    total = mp.mpc(0)
    mmax = int(mp.ceil(rho)) + 2
    for m in range(-mmax, mmax + 1):
        a = th + 2 * mp.pi * m
        if abs(a) < rho * mp.pi:
            w = 1
        elif abs(abs(a) - rho * mp.pi) < mp.mpf(10) ** -40:
            w = mp.mpf(1) / 2
        else:
            continue
        zeta = r ** (1 / rho) * mp.expj(a / rho)
        total += w * zeta ** (1 - mu) * mp.exp(zeta) / rho
    best = None
    k = 1
    acc = mp.mpc(0)
    while k < 4000:
        t = -z ** (-k) * mp.rgamma(mu - rho * k)
        acc += t
        if best is not None and abs(t) > 10 * best and k > 5:
            break
        if t != 0:
            best = abs(t) if best is None else min(best, abs(t))
        if best is not None and best < mp.mpf(10) ** -45:
            break
        k += 1
    return total + acc, best

def ml(rho, mu, z):
    x = abs(z) ** (1 / mp.mpf(rho)) if z != 0 else 0
    if x < 600:
        with mp.workdps(int(x / 2.3) + 45):
            return series(rho, mu, mp.mpc(z))
    with mp.workdps(60):
        v, err = asymptotic(rho, mu, mp.mpc(z))
        assert err is None or err < mp.mpf(10) ** -35, (rho, mu, z, err)
        return v

def main():
    mp.mp.dps = 40
    rhos = ["0.25", "0.5", "0.75", "0.9", "1", "1.5", "2"]
    mus = ["-0.5", "0", "0.5", "1", "1.25", "2.5"]
    radii = ["0.5", "3", "8", "12", "20", "50", "1000", "100000"]
    angles = ["0", "0.25", "0.5", "0.75", "1"]
    print("rho,mu,re_z,im_z,re_e,im_e")
    for rho in rhos:
        for mu in mus:
            for rr in radii:
                for ang in angles:
                    z = mp.mpf(rr) * mp.expj(mp.pi * mp.mpf(ang))
                    if ang == "1":
                        z = mp.mpc(-mp.mpf(rr), 0)
                    if ang == "0.5":
                        z = mp.mpc(0, mp.mpf(rr))
                    if ang == "0":
                        z = mp.mpc(mp.mpf(rr), 0)
                    x = abs(z) ** (1 / mp.mpf(rho))
                    # skip values that overflow double precision
                    if x * mp.cos(mp.arg(z) / mp.mpf(rho)) > 600 and abs(mp.arg(z)) < mp.mpf(rho) * mp.pi:
                        continue
                    zz = mp.mpc(float(z.real), float(z.imag))
                    v = ml(rho, mu, zz)
                    if abs(v) > mp.mpf(10) ** 250:
                        continue
                    print(",".join([rho, mu, mp.nstr(zz.real, 17), mp.nstr(zz.imag, 17),
                                    mp.nstr(v.real, 25), mp.nstr(v.imag, 25)]))

if __name__ == "__main__":
    main()
