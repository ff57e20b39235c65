"""Walk through the foliated flip of the cone over a square, printing each quantity."""
from folmmp import fixtures as fx
from folmmp.foliation import FoliatedPair, classify_flc, foliated_canonical, foliated_discrepancy, is_dicritical
from folmmp.mmp import classify_contraction, flip, negative_extremal_walls
from folmmp.polyhedral import walls
from folmmp.toric import intersection_number, transport


def main() -> None:
    f = fx.atiyah_delta1()
    fol = fx.atiyah_foliation()
    pair = FoliatedPair.on(f, fol)
    kf = foliated_canonical(f, fol)
    print("rays:", f.rays)
    print("cones:", f.cones)
    print("K_F coefficients:", [str(c) for c in kf.coeffs])

    (ray,) = negative_extremal_walls(f, pair)
    print(f"wall {ray.wall.cone}: relation {ray.relation}, K_F value {ray.value}")
    print("contraction:", classify_contraction(ray).kind.value)

    rep = is_dicritical(f, fol)
    print("dicritical:", rep.dicritical, "first witness:", rep.witness)
    print("discrepancy at (1,1,2):", foliated_discrepancy(f, pair, (1, 1, 2)))
    print("singularity class:", classify_flc(f, pair).status.value)

    g = flip(f, ray)
    new_wall = next(w for w in walls(g) if w.relation == tuple(-c for c in ray.relation))
    print("after the flip, cones:", g.cones, "same as the other triangulation:", g.same_as(fx.atiyah_delta2()))
    print("K_F value on the new wall:", intersection_number(g, transport(kf, f, g), new_wall))
    print("dicritical after the flip:", is_dicritical(g, fol).dicritical)


if __name__ == "__main__":
    main()
