"""Fractional Scientific Strength (FSS) research-productivity evaluation."""

__version__ = "0.1.0"

from .baselines import (
    FieldBaseline,
    MissingBaseline,
    Unclassifiable,
    classify_researcher,
    compute_baselines,
    hca_threshold,
    normalized_citation,
)
from .corpus import (
    UNMATCHED,
    AuthorSlot,
    Corpus,
    CorpusError,
    DuplicateId,
    MalformedRow,
    PublicationRecord,
    ResearcherRecord,
    Window,
    YearOutOfWindow,
    load_corpus,
    researcher_publications,
)
from .credit import BylinePolicy, PolicyConfig, PolicyKind, WeightTable, fractional_contribution
from .indicators import (
    ResearcherScore,
    UnitScore,
    fss_researcher,
    fss_unit,
    h_index,
    hca_share,
    mncs,
    total_normalized_impact,
)
from .paradox import paradox_demo
from .ranking import RankedList, rank_field, rank_units
