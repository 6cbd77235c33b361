"""Constrained decoding for span-encoded sequence labeling.

Transition masks for IOB1/BIO/IOBES, greedy/Viterbi/constrained decoding,
linear-chain CRF likelihood machinery, entity-level F1 and corpus tag
dynamics.
"""

__version__ = "0.1.0"

from .corpus import (
    Corpus,
    Sentence,
    Span,
    convert_corpus,
    convert_scheme,
    encode_spans,
    extract_spans,
    read_conll,
    read_conll_file,
    validate_sequence,
    write_conll,
)
from .crf import (
    CrfGradients,
    CrfParams,
    crf_nll,
    crf_nll_gradients,
    forward_backward,
    log_partition,
    token_cross_entropy,
)
from .decode import (
    DecodedPath,
    NoLegalPathError,
    constrained_decode,
    greedy_decode,
    score_path,
    viterbi,
)
from .dynamics import TagDynamicsReport, ambiguity, analyze, easy_boundaries, strictly_dominated, token_label_sets
from .evaluate import EvalReport, entity_f1
from .schemes import (
    Scheme,
    Tag,
    TagVocabulary,
    TransitionMask,
    build_transition_mask,
    is_legal_transition,
    mask_to_scores,
    parse_tag,
)
