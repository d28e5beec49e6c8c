"""High-precision reference values frozen into the C++ unit tests.

Run with:  python3 tests/oracles/compute_oracles.py
Every value is computed from the defining integral or a closed form with
mpmath, independently of the C++ quadrature code.
"""
import mpmath as mp

mp.mp.dps = 40


def h_direct(t, s, a):
    """h(t,s) = 1 - a s exp(a s^2/2) int_s^t exp(-a u^2/2) du by quadrature."""
    if t < s:
        return mp.mpf(0)
    integral = mp.quad(lambda u: mp.exp(-a * (u**2 - s**2) / 2), [s, t])
    return 1 - a * s * integral


def h_limit_direct(s, a):
    integral = mp.quad(lambda u: mp.exp(-a * (u**2 - s**2) / 2), [s, mp.inf])
    return 1 - a * s * integral


def weight_direct(s, a, H):
    """w(s) = 2H(2H-1) int_0^s h(s,m)(s-m)^(2H-2) dm, singularity removed by r = s - m = rho^(1/alpha)."""
    alpha = 2 * H - 1
    f = lambda rho: h_direct(s, s - rho ** (1 / alpha), a)
    return 2 * H * mp.quad(f, [0, s**alpha])


def main():
    print("h(2,1,a=1)          =", mp.nstr(h_direct(2, 1, 1), 20))
    print("h_limit(1,a=1)      =", mp.nstr(h_limit_direct(1, 1), 20))
    print("h_limit(100,a=1)    =", mp.nstr(h_limit_direct(100, 1), 20))
    print("h(2,0.5)-h(1,0.5)   =", mp.nstr(h_direct(2, 0.5, 1) - h_direct(1, 0.5, 1), 20))
    print("w(1,a=1,H=0.6)      =", mp.nstr(weight_direct(1, 1, mp.mpf('0.6')), 20))
    print("w(0.5,a=2,H=0.75)   =", mp.nstr(weight_direct(mp.mpf('0.5'), 2, mp.mpf('0.75')), 20))
    H = mp.mpf('0.75')
    phi = lambda u, v: H * (2 * H - 1) * abs(u - v) ** (2 * H - 2)
    m = mp.quad(phi, [0, 1], [2, 3])
    print("cell00 [0,1]x[2,3]  =", mp.nstr(m, 20))
    m11 = mp.quad(lambda u, v: u * v * phi(u, v), [0, 1], [2, 3])
    print("cell11 [0,1]x[2,3]  =", mp.nstr(m11, 20))
    H = mp.mpf('0.6')
    mean0 = mp.quad(lambda u: (1 - u) / (mp.mpf('0.1') + u ** (2 * H)), [0, 1]) / (2 * mp.pi)
    print("mean beta a->0 eps=0.1 H=0.6 T=1 =", mp.nstr(mean0, 20))
    for eps in ['0.5', '0.2']:
        v = mp.quad(lambda u: (1 - u) / (mp.mpf(eps) + u ** (2 * H)), [0, 1]) / (2 * mp.pi)
        print("mean beta a->0 eps=%s =" % eps, mp.nstr(v, 20))
    print("E L_1^z a->0 H=0.6  =", mp.nstr(1 / ((1 - H) * mp.sqrt(2 * mp.pi)), 20))


if __name__ == "__main__":
    main()
