"""The L-infinity relation and cyclic invariance on small inputs.

Each check prints its report: one row per canonical coefficient with the
residual, its propagated standard error and the verdict.

    python demos/identities.py
"""

from cycformality.formality import WeightSource, check_cyclic_invariance, check_linfty, taylor_coefficient
from cycformality.hochschild import format_op
from cycformality.tpoly import parse_polyvector
from cycformality.weights import WeightCache

# small runs carry sigmas near 0.05, so the ceiling is relaxed here
CEILING = 1.0


def main():
    weights = WeightSource(samples=1 << 15, cache=WeightCache())
    pi = parse_polyvector("x1 d1^d2", 2)

    tc = taylor_coefficient([pi], weights)
    print("U1(x1 d1^d2):\n" + format_op(tc.dpoly))
    bare = taylor_coefficient([pi], weights, include_tadpoles=False)
    print("without tadpoles:\n" + format_op(bare.dpoly) + "\n")

    print(check_linfty([pi], weights, sigma_ceiling=CEILING).to_text(), "\n")
    print(check_cyclic_invariance([pi], weights, sigma_ceiling=CEILING).to_text())


if __name__ == "__main__":
    main()
