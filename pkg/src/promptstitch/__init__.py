"""promptstitch: compile role-annotated sentences into control-coded
infill prompts, perturb them with a small operation language, build
likelihood/unlikelihood training data, and evaluate generations."""

from .clients import (
    ClientConfig,
    GenerateRequest,
    GeneratorClient,
    ScoreClient,
    ScoreResponse,
    SrlClient,
    mock_generate,
    mock_predict_srl,
    mock_score,
    resolve_config,
)
from .errors import (
    ContractError,
    CorpusError,
    FeatureDetectionError,
    ProgramParseError,
    PromptParseError,
    PromptstitchError,
    RecipeInapplicableError,
    RecipeParameterError,
    RecordError,
    SchemaError,
    TaggedParseError,
    TransportError,
    UnknownRoleError,
)
from .metrics import (
    ArgChecks,
    ClosenessReport,
    ControllabilityReport,
    FluencyReport,
    SpanOutcome,
    VerbChecks,
    align_tokens,
    changed_token_indices,
    closeness,
    cycle_consistency,
    fluency_ratio,
    perplexity_filter,
    select_best,
    span_changed,
)
from .morph import conjugate, infer_verb_features
from .ops import (
    Clause,
    OpKind,
    OpProgram,
    PerturbOp,
    apply,
    expected_changes,
    parse_program,
    render_program,
)
from .prompts import (
    ArgCode,
    Blank,
    Context,
    Header,
    LiteralSegment,
    LiteralTok,
    PromptSpec,
    SourceInfo,
    TaggedOutput,
    TaggedSegment,
    VerbCode,
    build_target,
    compile,
    compile_prompt,
    parse_prompt,
    parse_tagged_output,
    serialize,
    untag,
)
from .recipes import (
    LabeledPair,
    RecipeCandidate,
    candidate_record,
    contrast_recipe,
    nli_labeled_pair,
    nli_perturb,
    pp_attachment_swap,
    recipe_candidates,
    recipe_names,
    run_recipe,
    style_transfer_program,
)
from .srl import (
    ADVERBIAL,
    AGENT,
    CAUSE,
    DISCOURSE,
    EXTENT,
    GOAL,
    LOCATIVE,
    MANNER,
    MODAL,
    NEGATION,
    PATIENT,
    PURPOSE,
    STAR,
    TEMPORAL,
    ArgSpan,
    PredicateFrame,
    RoleLabel,
    Specificity,
    SrlSentence,
    Token,
    classify_specificity,
    extract_keyword_candidates,
    map_role_label,
    parse_corpus,
    parse_record,
)
from .training import (
    DatasetSummary,
    KeywordTable,
    Provenance,
    TrainingExample,
    build_keyword_table,
    gen_dataset,
    gen_negatives,
    iter_dataset,
    sample_positive,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
