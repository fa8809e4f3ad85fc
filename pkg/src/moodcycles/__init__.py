"""Holiday-centered analysis of weekly interest and sentiment series.

The package re-centers weekly time series on recurring holidays (Christmas,
Eid al-Fitr, the solstices), classifies countries by which holiday their
interest peaks on, scores short texts against affective lexicons, decomposes
weekly sentiment distributions into eigenmoods, and provides the regression
and distance-correlation statistics used to relate mood to search interest.
"""

from .errors import (
    DataError,
    DegenerateSeriesError,
    MoodcyclesError,
    NumericalError,
)
from .timeseries import (
    AnchorCalendar,
    AnchorKind,
    AveragedYear,
    CenteredYear,
    MonthlyBirthSeries,
    WeeklySeries,
    average_years,
    build_centered_years,
    centered_week_spans,
    normalize_births,
    normalize_yearly_max,
    zscore,
)
from .countries import (
    Classification,
    CountryProfile,
    CountryRecord,
    HolidayResponse,
    build_profiles,
    classify,
    cohort_agreement,
    compare_search_terms,
    export_choropleth,
    holiday_response,
    identify,
)
from .sentiment import (
    BinnedWeek,
    GreetingStoplist,
    Lexicon,
    ScoredRecord,
    TextScore,
    WeeklyMood,
    aggregate,
    bin_edges,
    bin_index,
    bin_week,
    bin_weeks,
    score_records,
    score_text,
    strip_greetings,
    tokenize,
    weekly_scores,
)
from .eigenmood import (
    BinnedMoodMatrix,
    Component,
    DenoiseResult,
    EigenDecomposition,
    Eigenmood,
    WeekProjection,
    decompose,
    denoise,
    heatmap,
    linguistic_response,
    matrix_from_binned,
    mean_projection,
    membership_matrix,
    project,
    project_weeks,
    retained_components,
    select_eigenmood,
    similarity,
)
from .stats import (
    OLSResult,
    distance_correlation,
    distance_covariance,
    ols,
    pearson,
    permutation_test,
)
from .synth import SynthSpec, generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "AnchorCalendar",
    "AnchorKind",
    "AveragedYear",
    "BinnedMoodMatrix",
    "BinnedWeek",
    "CenteredYear",
    "Classification",
    "Component",
    "CountryProfile",
    "CountryRecord",
    "DataError",
    "DegenerateSeriesError",
    "DenoiseResult",
    "EigenDecomposition",
    "Eigenmood",
    "GreetingStoplist",
    "HolidayResponse",
    "Lexicon",
    "MonthlyBirthSeries",
    "MoodcyclesError",
    "NumericalError",
    "OLSResult",
    "ScoredRecord",
    "SynthSpec",
    "TextScore",
    "WeekProjection",
    "WeeklyMood",
    "WeeklySeries",
    "aggregate",
    "average_years",
    "bin_edges",
    "bin_index",
    "bin_week",
    "bin_weeks",
    "build_centered_years",
    "build_profiles",
    "centered_week_spans",
    "classify",
    "cohort_agreement",
    "compare_search_terms",
    "decompose",
    "denoise",
    "distance_correlation",
    "distance_covariance",
    "export_choropleth",
    "generate_synthetic",
    "heatmap",
    "holiday_response",
    "identify",
    "linguistic_response",
    "matrix_from_binned",
    "mean_projection",
    "membership_matrix",
    "normalize_births",
    "normalize_yearly_max",
    "ols",
    "pearson",
    "permutation_test",
    "project",
    "project_weeks",
    "retained_components",
    "score_records",
    "score_text",
    "select_eigenmood",
    "similarity",
    "strip_greetings",
    "tokenize",
    "weekly_scores",
    "zscore",
]
