"""Counting methods, field-normalized indicators and the full counting bonus."""

__version__ = "0.1.0"

from .bonus import (  # noqa: E402
    BonusInput,
    BonusReport,
    Grouping,
    bonus_input,
    fcb_breakdown,
    fcb_direct,
    fcb_via_unit_averages,
)
from .corpus import (  # noqa: E402
    AddressEntry,
    Level,
    PublicationRecord,
    ResolvedPublication,
    enumerate_units,
    load_corpus,
    resolve,
    resolve_all,
    unit_count,
)
from .counting import Method, WeightVector, compute_weights, weighted_publication_count  # noqa: E402
from .indicators import (  # noqa: E402
    Indicator,
    UnitIndicatorRow,
    comparison_table,
    profile,
    unit_indicators,
    world_average,
)
from .normalization import (  # noqa: E402
    FieldYearStats,
    Mode,
    NormalizedScores,
    build_field_year_stats,
    normalize,
    normalized_citation_score,
    top10_score,
)
from .simulate import SimulationConfig, simulate_corpus  # noqa: E402
