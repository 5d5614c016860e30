"""Regenerate subsequence_powers.csv by brute-force summation in mpmath.

Each c_n is the 200-term partial sum of 2^-k exp(i pi 2^k / n), with 2^k
reduced modulo 2n in exact integers before the angle is formed.  The
neglected tail is below 2^-200.  Run: python3 make_golden.py > subsequence_powers.csv
"""
import mpmath as mp

mp.mp.dps = 60
TERMS = 200


def hilbert(n):
    total = mp.mpc(0)
    r = 1
    for k in range(1, TERMS + 1):
        r = (2 * r) % (2 * n)
        total += mp.expjpi(mp.mpf(r) / n) / mp.mpf(2) ** k
    return total


def main():
    print("model,subseq,m,n,re,im,power")
    for subseq, base in (("pow2", 1), ("3pow2", 3)):
        for m in range(1, 46):
            n = base * 2**m
            c = hilbert(n)
            h_power = mp.power(abs(c), n)
            lp = mp.mpf(16) / 17 + c.real / 17
            lp_power = mp.power(lp, n)
            print(f"hilbert,{subseq},{m},{n},{mp.nstr(c.real, 35)},{mp.nstr(c.imag, 35)},{mp.nstr(h_power, 35)}")
            print(f"lp,{subseq},{m},{n},{mp.nstr(lp, 35)},0,{mp.nstr(lp_power, 35)}")


if __name__ == "__main__":
    main()
