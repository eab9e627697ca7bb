"""Rational maps, height distortion, and embedding transport.

Applies rational linear maps to subspaces, bounds the height growth with
an exact distortion constant, and compares intrinsic versus ambient
approximation records through a coordinate-plane embedding.
"""

from fractions import Fraction

from subdioph import estimation as est
from subdioph import exact
from subdioph import morphisms as mor


def main():
    F = Fraction

    # a map with rational entries scales the lattice by its denominator lcm
    phi = mor.RationalMap.from_rows(((F(1), F(0)), (F(1, 2), F(1, 3))))
    print("denominator clearing:", phi.denominator_clearing)

    line = exact.RationalSubspace.from_basis(((F(1),), (F(1),)))
    image = mor.apply_to_subspace(phi, line)
    print(
        "image of Span(1,1):", image.pluecker.coords,
        "height^2", image.height_squared,
    )

    # the distortion constant bounds height growth, exactly
    c = mor.height_distortion_constant(phi, 1)
    print(
        "distortion bound:", c,
        "| bound respected:",
        image.height_squared <= c * c * line.height_squared,
    )

    # embed the plane spanned by the first two axes into R^3 and compare
    # records for the golden line seen in both ambient spaces
    f_sub = exact.RationalSubspace.from_basis(
        ((F(1), F(0)), (F(0), F(1)), (F(0), F(0)))
    )
    proj = mor.RationalMap.from_rows(((F(1), F(0), F(0)), (F(0), F(1), F(0))))
    report = mor.embedding_harness(
        est.golden_line_target(), f_sub, proj, 10**5
    )
    print("harness summary:", report.as_dict() | {"recordPairs": "..."})
    print(
        "paired records:", len(report.record_pairs),
        "of", len(report.intrinsic_records), "intrinsic records",
    )
    heights_match = all(
        report.intrinsic_records[i].subspace.height_squared
        == report.ambient_records[j].subspace.height_squared
        for i, j in report.record_pairs
    )
    print("paired heights identical:", heights_match)


if __name__ == "__main__":
    main()
