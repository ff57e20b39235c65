"""Run every MMP branch over a seeded corpus and tabulate what happened.

    python scripts/termination_sweep.py --seed 1 --size 500
"""
import argparse
import collections
import time

from folmmp.corpus import CorpusConfig, build_corpus
from folmmp.mmp import TerminationViolation
from folmmp.models import cone_bound_audit, enumerate_models


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=CorpusConfig.seed)
    parser.add_argument("--size", type=int, default=CorpusConfig.size)
    parser.add_argument("--max-rays", type=int, default=CorpusConfig.max_rays)
    parser.add_argument("--cap", type=int, default=10_000)
    args = parser.parse_args()

    cfg = CorpusConfig(seed=args.seed, size=args.size, max_rays=args.max_rays)
    t0 = time.perf_counter()
    corpus = build_corpus(cfg)
    outcomes = collections.Counter()
    steps = collections.Counter()
    lowest = 0
    failures = []
    for inst in corpus:
        try:
            g = enumerate_models(inst.fan, inst.pair, cap=args.cap)
        except TerminationViolation as exc:
            failures.append((inst.name, exc))
            continue
        outcomes["minimal models"] += len(g.nodes)
        outcomes["fiber outcomes"] += len(g.fiber_outcomes)
        for node in g.nodes:
            for s in node.provenance:
                steps[s.kind.value] += 1
        for e in cone_bound_audit(inst.fan, inst.pair).entries:
            lowest = min(lowest, e.foliated_value)
    print(f"{len(corpus)} instances in {time.perf_counter() - t0:.1f}s")
    for name, count in sorted(outcomes.items()):
        print(f"  {name}: {count}")
    for name, count in sorted(steps.items()):
        print(f"  {name} steps on the way to minimal models: {count}")
    print(f"  lowest (K_F+B) value on a negative extremal wall: {lowest}")
    print(f"  termination failures: {len(failures)}")
    for name, exc in failures:
        print(f"    {name}: {type(exc).__name__}: {exc}")
    raise SystemExit(1 if failures else 0)


if __name__ == "__main__":
    main()
