from __future__ import annotations

import pytest

from fsseval.corpus import AuthorSlot, Corpus, PublicationRecord, ResearcherRecord, Window


def slots(*authors, inst="I1"):
    """Byline from researcher ids; an (id, inst) tuple overrides the institution."""
    out = []
    for pos, a in enumerate(authors, 1):
        rid, i = a if isinstance(a, tuple) else (a, inst)
        out.append(AuthorSlot(pos, rid, i))
    return tuple(out)


def pub(pub_id, citations, *authors, year=2012, field="F1", inst="I1"):
    return PublicationRecord(pub_id, year, field, citations, slots(*authors, inst=inst))


def researcher(rid, unit="U1", field="F1", salary=None, years=None):
    return ResearcherRecord(rid, unit, field, salary, years)


def make_corpus(pubs, researchers, window=(2010, 2014)):
    return Corpus(tuple(pubs), tuple(researchers), Window(*window))


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return p
    return _write


PUBS_CSV = """pub_id,year,field_id,citations,byline
P1,2011,F1,10,1:R1:I1;2:R2:I1
P2,2012,F1,0,1:R2:I1
P3,2014,F2,5,1:X9:I7;2:R1:I1;3:R2:I2
"""

RES_CSV = """researcher_id,unit_id,field_id,salary,active_years
R1,U1,F1,50000,5
R2,U2,F2,,
"""


# -- acceptance summary: one line per criterion ------------------------------

_criteria: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria.append((props["criterion"], "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _criteria:
        terminalreporter.write_line(f"{outcome}  {name}")
