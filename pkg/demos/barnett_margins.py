"""The 14-epsilon inequality on random polynomials.

Prints the constants for the tracial and the non-tracial setup and the
tightest cases among 200 random polynomials.

    python demos/barnett_margins.py
"""

from awlab.barnett import barnett_check, modular_setup, random_polynomials, tracial_setup


def main(samples=200, seed=7):
    for setup in (tracial_setup(), modular_setup(0.5)):
        report = barnett_check(setup, random_polynomials(setup, samples, seed))
        K = report.constants
        print(f"{setup.name}: E={K.E:.4f}  F={K.F:.4f}  C(a)={K.C_a:.4f}  pass={report.passed}")
        tight = sorted(report.rows, key=lambda r: r["margin"])[:3]
        for row in tight:
            print(f"   lhs={row['lhs']:.4f}  rhs={row['rhs']:.4f}  x = {row['word'][:60]}")


if __name__ == "__main__":
    main()
