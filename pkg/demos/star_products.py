"""Star products from unimodular Poisson structures.

Builds the order-2 star product of a constant structure on R^2, compares it
with the Moyal product, then gauges a Poisson structure and checks that the
result still yields an associative closed product.

    python demos/star_products.py
"""

from cycformality.formality import WeightSource
from cycformality.hochschild import format_op
from cycformality.star import (build_star, check_associativity, check_closed, check_maurer_cartan,
                               format_poisson, gauge_transform_poisson, parse_poisson)
from cycformality.tpoly import PolyVector, parse_polyvector
from cycformality.weights import WeightCache

CEILING = 1.0


def show(title, star):
    print(f"== {title}")
    for j, op in enumerate(star.ops):
        print(f"  hbar^{j}:", format_op(op).replace("\n", "\n          "))
    a = check_associativity(star, sigma_ceiling=CEILING)
    c = check_closed(star, sigma_ceiling=CEILING)
    print(f"  associative: {a.passed} (max sigma {a.max_sigma:.2g}), closed: {c.passed}\n")


def main():
    weights = WeightSource(samples=1 << 16, cache=WeightCache())
    pi = parse_poisson("hbar d1^d2", 2, 2)
    show("constant structure", build_star(pi, 2, weights))

    xi = [PolyVector.zero(2, 1), parse_polyvector("x1 x2 d1", 2)]
    gauged = gauge_transform_poisson(pi, xi)
    print("gauged structure:", format_poisson(gauged))
    print("Maurer-Cartan residual:", check_maurer_cartan(gauged) or "none", "\n")
    show("star product of the gauged structure", build_star(gauged, 2, weights))


if __name__ == "__main__":
    main()
