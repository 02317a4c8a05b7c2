import random
from importlib import resources

import pytest
from hypothesis import HealthCheck, settings

from pegrw import harness
from pegrw.grammar import Grammar, desugar
from pegrw.reader import parse_expr, parse_grammar

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FIXTURES = resources.files("pegrw") / "fixtures"


def fixture_grammar(name: str) -> Grammar:
    return parse_grammar((FIXTURES / f"{name}.peg").read_text(encoding="utf-8"), name)


def fixture_json() -> dict[str, str]:
    return {p.name: p.read_text(encoding="utf-8")
            for p in sorted((FIXTURES / "json").iterdir(), key=lambda p: p.name)}


def E(src: str):
    return desugar(parse_expr(src))


def G(text: str) -> Grammar:
    return parse_grammar(text)


EMPTY_G = Grammar.build({}, E("eps"))


def grammars(n: int, seed: int, **kw) -> list[Grammar]:
    rng = random.Random(seed)
    cfg = harness.GenConfig(**kw)
    return [harness.random_grammar(rng, cfg) for _ in range(n)]


@pytest.fixture
def anbncn():
    return fixture_grammar("anbncn")
