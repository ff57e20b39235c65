from folmmp.corpus import CorpusConfig, build_corpus, random_instance
from folmmp.polyhedral import validate_fan


def test_size_and_shape(corpus):
    assert len(corpus) >= 200
    assert {inst.fan.lattice_rank for inst in corpus} == {2, 3}
    assert all(inst.fan.n_rays <= 9 for inst in corpus)
    assert all(inst.fan.relative for inst in corpus)
    assert len({inst.name for inst in corpus}) == len(corpus)


def test_fans_are_valid_and_simplicial(corpus):
    for inst in corpus:
        report = validate_fan(inst.fan)
        assert report.ok, (inst.name, report.violations)
        assert all(len(c) == inst.fan.lattice_rank for c in inst.fan.cones)


def test_foliations_are_corank_one(corpus):
    for inst in corpus:
        assert inst.foliation.corank == 1


def test_boundaries_are_admissible(corpus):
    for inst in corpus:
        for r, c in zip(inst.fan.rays, inst.boundary.coeffs):
            assert 0 <= c <= inst.foliation.epsilon(r)


def test_some_instances_do_something(corpus):
    # the corpus should not be all trivial: several subdivisions, both foliation kinds
    assert sum(inst.fan.n_rays >= 6 for inst in corpus) >= 20
    assert sum(any(inst.foliation.epsilon(r) == 0 for r in inst.fan.rays) for inst in corpus) >= 50


def test_deterministic_for_a_seed():
    cfg = CorpusConfig(seed=7, size=15)
    a = build_corpus(cfg)
    build_corpus.cache_clear()
    b = build_corpus(cfg)
    assert a == b
    assert build_corpus(CorpusConfig(seed=8, size=15)) != a


def test_single_instance_respects_config():
    import random
    cfg = CorpusConfig(ranks=(2,), max_rays=4)
    inst = random_instance(random.Random(1), cfg, "x")
    assert inst.fan.lattice_rank == 2 and inst.fan.n_rays <= 4
