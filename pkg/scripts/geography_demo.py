"""Print the chambers of a two-parameter boundary family on one corpus instance.

    python scripts/geography_demo.py fan084
"""
import argparse

from folmmp.corpus import build_corpus
from folmmp.models import geography
from folmmp.toric import ToricDivisor


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("name", nargs="?", default="fan084", help="corpus instance name")
    args = parser.parse_args()

    inst = next((i for i in build_corpus() if i.name == args.name), None)
    if inst is None:
        raise SystemExit(f"no corpus instance called {args.name}")
    f, fol = inst.fan, inst.foliation
    free = [i for i, r in enumerate(f.rays) if fol.epsilon(r) == 1]
    if len(free) < 2:
        raise SystemExit(f"{args.name} has fewer than two non-invariant rays")
    family = [ToricDivisor.ray(f.n_rays, free[0]), ToricDivisor.ray(f.n_rays, free[-1])]
    geo = geography(f, fol, family)
    print(f"{args.name}: rays {f.rays}")
    print(f"boundary t1*D{free[0]} + t2*D{free[-1]}, {len(geo.models)} models, {len(geo.chambers)} chambers")
    for c in geo.chambers:
        verts = ", ".join("(" + ", ".join(str(x) for x in v) + ")" for v in c.vertices)
        extra = f" (+ {len(c.equivalent)} flop-equivalent)" if c.equivalent else ""
        print(f"  model {c.model}{extra}, dim {c.dim}: {verts}")
    print(f"covering={geo.covered} disjoint={geo.disjoint}")


if __name__ == "__main__":
    main()
